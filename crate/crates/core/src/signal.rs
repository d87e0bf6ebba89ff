//! Gaussian sparse signals and the measurement operator.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::graph::MeasurementGraph;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("sparsity {k} exceeds signal length {n}")]
    InvalidSparsity { k: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid support entry: {0}")]
    InvalidSupport(String),
    #[error("signal parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

/// Length-N real vector stored as its support and the nonzero values.
///
/// Entries off the support are exactly zero. Support indices are sorted,
/// unique and in range; stored values are never 0.0.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    length: usize,
    support: Vec<u32>,
    values: Vec<f64>,
}

impl SparseSignal {
    /// Builds a signal from `(index, value)` pairs; pairs may be unsorted.
    pub fn from_pairs(length: usize, pairs: &[(usize, f64)]) -> Result<Self, SignalError> {
        let mut sorted: Vec<(usize, f64)> = pairs.to_vec();
        sorted.sort_by_key(|&(i, _)| i);
        let mut support = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        for &(i, v) in &sorted {
            if i >= length {
                return Err(SignalError::InvalidSupport(format!(
                    "index {i} outside 0..{length}"
                )));
            }
            if support.last() == Some(&(i as u32)) {
                return Err(SignalError::InvalidSupport(format!("duplicate index {i}")));
            }
            if v == 0.0 {
                return Err(SignalError::InvalidSupport(format!(
                    "explicit zero value at index {i}"
                )));
            }
            support.push(i as u32);
            values.push(v);
        }
        Ok(SparseSignal {
            length,
            support,
            values,
        })
    }

    /// Collects the nonzero entries of a dense vector.
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut support = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                support.push(i as u32);
                values.push(v);
            }
        }
        SparseSignal {
            length: dense.len(),
            support,
            values,
        }
    }

    pub fn zero(length: usize) -> Self {
        SparseSignal {
            length,
            support: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Number of nonzero entries.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (i as usize, v))
    }

    /// Entry at `n`; exact 0.0 off the support.
    pub fn value_at(&self, n: usize) -> f64 {
        match self.support.binary_search(&(n as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.length];
        for (i, v) in self.iter() {
            dense[i] = v;
        }
        dense
    }

    /// Largest absolute difference against another signal of the same length.
    pub fn max_abs_diff(&self, other: &SparseSignal) -> f64 {
        let (a, b) = (self.to_dense(), other.to_dense());
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// CSV form: header `N=<n>,K=<k>`, then one `index,value` line per
    /// support element, indices 0-based ascending.
    pub fn to_csv(&self) -> String {
        let mut out = format!("N={},K={}\n", self.length, self.sparsity());
        for (i, v) in self.iter() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SignalError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(SignalError::ParseError {
            line: 1,
            msg: "empty input".into(),
        })?;
        let parse_kv = |part: Option<&str>, key: &str| -> Result<usize, SignalError> {
            part.and_then(|p| p.strip_prefix(key))
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| SignalError::ParseError {
                    line: 1,
                    msg: format!("header must be N=<n>,K=<k>, found {header:?}"),
                })
        };
        let mut parts = header.split(',');
        let n = parse_kv(parts.next(), "N=")?;
        let k = parse_kv(parts.next(), "K=")?;
        let mut pairs = Vec::with_capacity(k);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let mut fields = line.split(',');
            let parse_err = |msg: String| SignalError::ParseError { line: lineno, msg };
            let i: usize = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| parse_err("bad index field".into()))?;
            let v: f64 = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| parse_err("bad value field".into()))?;
            pairs.push((i, v));
        }
        if pairs.len() != k {
            return Err(SignalError::ParseError {
                line: 1,
                msg: format!("header claims K={k} but {} pairs listed", pairs.len()),
            });
        }
        Self::from_pairs(n, &pairs)
    }
}

/// Vector of check measurements; length always matches the graph that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    values: Vec<f64>,
}

impl MeasurementVector {
    pub fn new(values: Vec<f64>) -> Self {
        MeasurementVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Draws a signal with exactly `k` nonzeros: support uniform without
/// replacement, values standard normal with exact zeros redrawn.
pub fn generate_gaussian_sparse<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<SparseSignal, SignalError> {
    if k > n {
        return Err(SignalError::InvalidSparsity { k, n });
    }
    let mut support: Vec<u32> = rand::seq::index::sample(rng, n, k)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    support.sort_unstable();
    let mut values = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: f64 = rng.sample(StandardNormal);
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        values.push(v);
    }
    Ok(SparseSignal {
        length: n,
        support,
        values,
    })
}

/// Applies the measurement operator: each check reads the sum of its
/// neighboring signal entries. Checks with no support neighbor measure an
/// exact 0.0.
pub fn measure(g: &MeasurementGraph, e: &SparseSignal) -> Result<MeasurementVector, SignalError> {
    if e.length() != g.n_vars() {
        return Err(SignalError::DimensionMismatch(format!(
            "signal length {} vs {} graph variables",
            e.length(),
            g.n_vars()
        )));
    }
    let mut s = vec![0.0f64; g.n_checks()];
    // Support is sorted, so each check accumulates its neighbors in
    // ascending variable order; trials are bit-reproducible.
    for (n, v) in e.iter() {
        for &m in g.checks_of(n) {
            s[m as usize] += v;
        }
    }
    Ok(MeasurementVector::new(s))
}
