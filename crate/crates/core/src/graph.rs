//! Sparse binary measurement matrices stored as bipartite graphs.
//!
//! An M x N matrix with entries in {0, 1} is kept as adjacency in both
//! directions: for every variable (column) the sorted list of checks (rows)
//! it participates in, and for every check the sorted list of its variables.
//! The regular constructor places edges greedily onto the lowest-degree
//! checks while refusing any placement that would create a 4-cycle, so two
//! checks never share more than one variable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::seed;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("construction infeasible: {0}")]
    ConstructionInfeasible(String),
    #[error("{kind} index {index} out of range (0..{limit})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("alist parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Bipartite adjacency of a binary measurement matrix.
///
/// Stored compressed: `var_nbr[var_off[n]..var_off[n+1]]` are the checks of
/// variable `n`, sorted ascending, and symmetrically for checks. Immutable
/// once built, so one graph can back many concurrent decoders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementGraph {
    n_vars: usize,
    n_checks: usize,
    var_off: Vec<usize>,
    var_nbr: Vec<u32>,
    check_off: Vec<usize>,
    check_nbr: Vec<u32>,
}

/// Pair-of-checks bitset used to veto 4-cycles during construction.
struct PairBits {
    m: usize,
    bits: Vec<u64>,
}

impl PairBits {
    fn new(m: usize) -> Self {
        PairBits {
            m,
            bits: vec![0; (m * m).div_ceil(64)],
        }
    }

    #[inline]
    fn idx(&self, a: u32, b: u32) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        lo as usize * self.m + hi as usize
    }

    #[inline]
    fn get(&self, a: u32, b: u32) -> bool {
        let i = self.idx(a, b);
        self.bits[i >> 6] >> (i & 63) & 1 != 0
    }

    #[inline]
    fn set(&mut self, a: u32, b: u32) {
        let i = self.idx(a, b);
        self.bits[i >> 6] |= 1 << (i & 63);
    }
}

/// Checks grouped by current degree; supports O(1) degree bumps and cheap
/// "lowest degree first" scans.
struct DegreeBuckets {
    degree: Vec<u32>,
    position: Vec<u32>,
    buckets: Vec<Vec<u32>>,
}

impl DegreeBuckets {
    fn new(m: usize) -> Self {
        DegreeBuckets {
            degree: vec![0; m],
            position: (0..m as u32).collect(),
            buckets: vec![(0..m as u32).collect()],
        }
    }

    fn bump(&mut self, c: u32) {
        let d = self.degree[c as usize] as usize;
        let p = self.position[c as usize] as usize;
        let moved = self.buckets[d].swap_remove(p);
        debug_assert_eq!(moved, c);
        if let Some(&tail) = self.buckets[d].get(p) {
            self.position[tail as usize] = p as u32;
        }
        if self.buckets.len() == d + 1 {
            self.buckets.push(Vec::new());
        }
        self.position[c as usize] = self.buckets[d + 1].len() as u32;
        self.buckets[d + 1].push(c);
        self.degree[c as usize] += 1;
    }
}

impl MeasurementGraph {
    /// Builds a variable-regular graph without 4-cycles.
    ///
    /// Each variable gets exactly `var_degree` edges, placed one variable at
    /// a time onto the feasible checks of lowest current degree with ties
    /// broken uniformly at random. Dead ends restart the whole placement
    /// with a re-derived stream, up to `max_attempts` times. The result is a
    /// pure function of the arguments.
    pub fn build_regular(
        n_vars: usize,
        n_checks: usize,
        var_degree: usize,
        seed: u64,
        max_attempts: usize,
    ) -> Result<Self, GraphError> {
        if n_vars == 0 {
            return Err(GraphError::ConstructionInfeasible(
                "need at least one variable".into(),
            ));
        }
        if var_degree == 0 {
            return Err(GraphError::ConstructionInfeasible(
                "variable degree must be at least 1".into(),
            ));
        }
        if var_degree > n_checks {
            return Err(GraphError::ConstructionInfeasible(format!(
                "variable degree {var_degree} exceeds the number of checks {n_checks}"
            )));
        }
        // every variable claims C(var_degree, 2) check pairs and no pair can
        // repeat, so this bound is hard
        let pairs_needed = n_vars * var_degree * (var_degree - 1) / 2;
        let pairs_available = n_checks * (n_checks - 1) / 2;
        if pairs_needed > pairs_available {
            return Err(GraphError::ConstructionInfeasible(format!(
                "{pairs_needed} check pairs required but only {pairs_available} exist; \
                 no 4-cycle-free placement is possible"
            )));
        }
        let attempts = max_attempts.max(1);
        for attempt in 0..attempts {
            if let Some(g) = Self::try_place(
                n_vars,
                n_checks,
                var_degree,
                seed::mix(seed, attempt as u64),
            ) {
                return Ok(g);
            }
        }
        Err(GraphError::ConstructionInfeasible(format!(
            "no 4-cycle-free placement for {n_checks}x{n_vars} at degree {var_degree} after {attempts} attempts"
        )))
    }

    fn try_place(n_vars: usize, n_checks: usize, var_degree: usize, rng_seed: u64) -> Option<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut buckets = DegreeBuckets::new(n_checks);
        let mut conflict = PairBits::new(n_checks);
        let mut var_adj: Vec<Vec<u32>> = Vec::with_capacity(n_vars);
        let mut feasible: Vec<u32> = Vec::new();
        let mut chosen: Vec<u32> = Vec::with_capacity(var_degree);

        for _ in 0..n_vars {
            chosen.clear();
            for _ in 0..var_degree {
                let ok = |c: u32, chosen: &[u32], conflict: &PairBits| {
                    !chosen.contains(&c) && chosen.iter().all(|&c0| !conflict.get(c0, c))
                };
                let mut picked = None;
                for bucket in buckets.buckets.iter().filter(|b| !b.is_empty()) {
                    // Rejection sampling first: most candidates are feasible,
                    // so this almost always lands in one or two draws and
                    // stays uniform over the feasible subset.
                    for _ in 0..4 {
                        let c = bucket[rng.random_range(0..bucket.len())];
                        if ok(c, &chosen, &conflict) {
                            picked = Some(c);
                            break;
                        }
                    }
                    if picked.is_none() {
                        feasible.clear();
                        feasible.extend(
                            bucket
                                .iter()
                                .copied()
                                .filter(|&c| ok(c, &chosen, &conflict)),
                        );
                        if !feasible.is_empty() {
                            picked = Some(feasible[rng.random_range(0..feasible.len())]);
                        }
                    }
                    if picked.is_some() {
                        break;
                    }
                }
                chosen.push(picked?);
            }
            chosen.sort_unstable();
            for i in 0..chosen.len() {
                for j in i + 1..chosen.len() {
                    conflict.set(chosen[i], chosen[j]);
                }
            }
            for &c in &chosen {
                buckets.bump(c);
            }
            var_adj.push(chosen.clone());
        }
        Some(Self::assemble(n_vars, n_checks, &var_adj))
    }

    /// Builds a graph from explicit per-variable check lists.
    ///
    /// Lists may be unsorted; duplicate edges and out-of-range checks are
    /// rejected. 4-cycles are allowed here so that degenerate graphs can be
    /// constructed and inspected.
    pub fn from_var_lists(
        n_vars: usize,
        n_checks: usize,
        lists: &[Vec<u32>],
    ) -> Result<Self, GraphError> {
        if lists.len() != n_vars {
            return Err(GraphError::DimensionMismatch(format!(
                "{} adjacency lists for {} variables",
                lists.len(),
                n_vars
            )));
        }
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(n_vars);
        for (v, list) in lists.iter().enumerate() {
            let mut l = list.clone();
            l.sort_unstable();
            for w in l.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::DimensionMismatch(format!(
                        "duplicate edge between variable {v} and check {}",
                        w[0]
                    )));
                }
            }
            if let Some(&c) = l.last() {
                if c as usize >= n_checks {
                    return Err(GraphError::IndexOutOfRange {
                        kind: "check",
                        index: c as usize,
                        limit: n_checks,
                    });
                }
            }
            sorted.push(l);
        }
        Ok(Self::assemble(n_vars, n_checks, &sorted))
    }

    /// `var_adj` entries must be sorted, in range and duplicate-free.
    fn assemble(n_vars: usize, n_checks: usize, var_adj: &[Vec<u32>]) -> Self {
        let mut var_off = Vec::with_capacity(n_vars + 1);
        var_off.push(0usize);
        let mut var_nbr = Vec::new();
        let mut check_deg = vec![0usize; n_checks];
        for l in var_adj {
            var_nbr.extend_from_slice(l);
            var_off.push(var_nbr.len());
            for &c in l {
                check_deg[c as usize] += 1;
            }
        }
        let mut check_off = Vec::with_capacity(n_checks + 1);
        check_off.push(0usize);
        for m in 0..n_checks {
            check_off.push(check_off[m] + check_deg[m]);
        }
        let mut cursor = check_off.clone();
        let mut check_nbr = vec![0u32; var_nbr.len()];
        for (v, l) in var_adj.iter().enumerate() {
            for &c in l {
                check_nbr[cursor[c as usize]] = v as u32;
                cursor[c as usize] += 1;
            }
        }
        MeasurementGraph {
            n_vars,
            n_checks,
            var_off,
            var_nbr,
            check_off,
            check_nbr,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn edge_count(&self) -> usize {
        self.var_nbr.len()
    }

    /// Checks of variable `n`, sorted ascending. Panics on a bad index;
    /// the bounds-checked variant is [`Self::var_neighbors`].
    #[inline]
    pub(crate) fn checks_of(&self, n: usize) -> &[u32] {
        &self.var_nbr[self.var_off[n]..self.var_off[n + 1]]
    }

    /// Variables of check `m`, sorted ascending.
    #[inline]
    pub(crate) fn vars_of(&self, m: usize) -> &[u32] {
        &self.check_nbr[self.check_off[m]..self.check_off[m + 1]]
    }

    /// Sorted checks of variable `n`.
    pub fn var_neighbors(&self, n: usize) -> Result<&[u32], GraphError> {
        if n >= self.n_vars {
            return Err(GraphError::IndexOutOfRange {
                kind: "variable",
                index: n,
                limit: self.n_vars,
            });
        }
        Ok(self.checks_of(n))
    }

    /// Sorted variables of check `m`.
    pub fn check_neighbors(&self, m: usize) -> Result<&[u32], GraphError> {
        if m >= self.n_checks {
            return Err(GraphError::IndexOutOfRange {
                kind: "check",
                index: m,
                limit: self.n_checks,
            });
        }
        Ok(self.vars_of(m))
    }

    pub fn var_degree(&self, n: usize) -> Result<usize, GraphError> {
        self.var_neighbors(n).map(<[u32]>::len)
    }

    pub fn check_degree(&self, m: usize) -> Result<usize, GraphError> {
        self.check_neighbors(m).map(<[u32]>::len)
    }

    pub fn max_var_degree(&self) -> usize {
        (0..self.n_vars)
            .map(|n| self.checks_of(n).len())
            .max()
            .unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks)
            .map(|m| self.vars_of(m).len())
            .max()
            .unwrap_or(0)
    }

    /// True iff no two checks share two or more variables.
    pub fn girth_at_least_six(&self) -> bool {
        let m = self.n_checks as u64;
        let mut pairs: Vec<u64> = Vec::new();
        for v in 0..self.n_vars {
            let cs = self.checks_of(v);
            for i in 0..cs.len() {
                for j in i + 1..cs.len() {
                    pairs.push(cs[i] as u64 * m + cs[j] as u64);
                }
            }
        }
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }

    /// Serializes to alist text: `N M`, the two maximum degrees, N variable
    /// degrees, M check degrees, then one 1-based neighbor line per variable
    /// and per check. Rows are written at their true length, no zero padding.
    pub fn to_alist(&self) -> String {
        fn push_row(out: &mut String, it: impl Iterator<Item = usize>) {
            let mut first = true;
            for x in it {
                if !first {
                    out.push(' ');
                }
                out.push_str(&x.to_string());
                first = false;
            }
            out.push('\n');
        }
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.n_vars, self.n_checks));
        out.push_str(&format!(
            "{} {}\n",
            self.max_var_degree(),
            self.max_check_degree()
        ));
        push_row(&mut out, (0..self.n_vars).map(|n| self.checks_of(n).len()));
        push_row(&mut out, (0..self.n_checks).map(|m| self.vars_of(m).len()));
        for n in 0..self.n_vars {
            push_row(&mut out, self.checks_of(n).iter().map(|&c| c as usize + 1));
        }
        for m in 0..self.n_checks {
            push_row(&mut out, self.vars_of(m).iter().map(|&v| v as usize + 1));
        }
        out
    }

    /// Parses alist text produced by [`Self::to_alist`] (or compatible).
    ///
    /// Neighbor lists may be unsorted. Declared degrees must match list
    /// lengths, the two directions must describe the same edge set, and all
    /// indices must be in range.
    pub fn from_alist(text: &str) -> Result<Self, GraphError> {
        let lines: Vec<&str> = text.lines().collect();
        let mut cursor = 0usize;
        let mut next_row = |what: &str| -> Result<(usize, Vec<i64>), GraphError> {
            let lineno = cursor + 1;
            let line = lines.get(cursor).ok_or_else(|| GraphError::ParseError {
                line: lineno,
                msg: format!("unexpected end of input, expected {what}"),
            })?;
            cursor += 1;
            let mut nums = Vec::new();
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| GraphError::ParseError {
                    line: lineno,
                    msg: format!("invalid integer {tok:?} in {what}"),
                })?;
                if v < 0 {
                    return Err(GraphError::ParseError {
                        line: lineno,
                        msg: format!("negative value {v} in {what}"),
                    });
                }
                nums.push(v);
            }
            Ok((lineno, nums))
        };

        let (l1, dims) = next_row("dimensions")?;
        if dims.len() != 2 {
            return Err(GraphError::ParseError {
                line: l1,
                msg: format!("expected \"N M\", found {} values", dims.len()),
            });
        }
        let (n_vars, n_checks) = (dims[0] as usize, dims[1] as usize);
        if n_vars == 0 || n_checks == 0 {
            return Err(GraphError::ParseError {
                line: l1,
                msg: "dimensions must be positive".into(),
            });
        }
        let (l2, maxima) = next_row("maximum degrees")?;
        if maxima.len() != 2 {
            return Err(GraphError::ParseError {
                line: l2,
                msg: format!("expected two maximum degrees, found {}", maxima.len()),
            });
        }
        let (l3, var_deg) = next_row("variable degrees")?;
        if var_deg.len() != n_vars {
            return Err(GraphError::ParseError {
                line: l3,
                msg: format!(
                    "expected {} variable degrees, found {}",
                    n_vars,
                    var_deg.len()
                ),
            });
        }
        let (l4, check_deg) = next_row("check degrees")?;
        if check_deg.len() != n_checks {
            return Err(GraphError::ParseError {
                line: l4,
                msg: format!(
                    "expected {} check degrees, found {}",
                    n_checks,
                    check_deg.len()
                ),
            });
        }

        let mut read_lists = |count: usize,
                              declared: &[i64],
                              what: &str,
                              limit: usize|
         -> Result<Vec<Vec<u32>>, GraphError> {
            let mut lists = Vec::with_capacity(count);
            for &decl in declared.iter().take(count) {
                let (lineno, row) = next_row(what)?;
                if row.len() != decl as usize {
                    return Err(GraphError::DimensionMismatch(format!(
                        "line {lineno}: declared degree {} but {} neighbors listed",
                        decl,
                        row.len()
                    )));
                }
                let mut list = Vec::with_capacity(row.len());
                for &x in &row {
                    if x < 1 || x as usize > limit {
                        return Err(GraphError::DimensionMismatch(format!(
                            "line {lineno}: neighbor {x} outside 1..={limit}"
                        )));
                    }
                    list.push(x as u32 - 1);
                }
                list.sort_unstable();
                if list.windows(2).any(|w| w[0] == w[1]) {
                    return Err(GraphError::DimensionMismatch(format!(
                        "line {lineno}: duplicate neighbor"
                    )));
                }
                lists.push(list);
            }
            Ok(lists)
        };

        let var_lists = read_lists(n_vars, &var_deg, "variable neighbor row", n_checks)?;
        let check_lists = read_lists(n_checks, &check_deg, "check neighbor row", n_vars)?;

        for line in &lines[cursor..] {
            if !line.trim().is_empty() {
                return Err(GraphError::ParseError {
                    line: cursor + 1,
                    msg: "trailing content after neighbor rows".into(),
                });
            }
            cursor += 1;
        }

        // Cross-check the two directions against each other.
        let mut from_vars: Vec<(u32, u32)> = Vec::new();
        for (v, l) in var_lists.iter().enumerate() {
            from_vars.extend(l.iter().map(|&c| (v as u32, c)));
        }
        let mut from_checks: Vec<(u32, u32)> = Vec::new();
        for (m, l) in check_lists.iter().enumerate() {
            from_checks.extend(l.iter().map(|&v| (v, m as u32)));
        }
        from_vars.sort_unstable();
        from_checks.sort_unstable();
        if from_vars != from_checks {
            return Err(GraphError::DimensionMismatch(
                "variable and check neighbor rows describe different edge sets".into(),
            ));
        }

        let g = Self::assemble(n_vars, n_checks, &var_lists);
        if g.max_var_degree() != maxima[0] as usize || g.max_check_degree() != maxima[1] as usize {
            return Err(GraphError::DimensionMismatch(format!(
                "declared maximum degrees {} {} but actual are {} {}",
                maxima[0],
                maxima[1],
                g.max_var_degree(),
                g.max_check_degree()
            )));
        }
        Ok(g)
    }
}
