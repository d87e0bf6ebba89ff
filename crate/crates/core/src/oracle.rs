//! Brute-force ground truth for tiny instances.
//!
//! Enumerates candidate supports in order of increasing size and solves the
//! restricted system for each, which yields every minimum-weight solution of
//! `H e = s`. Also computes the spark of the matrix (smallest number of
//! linearly dependent columns), giving the classical sufficient condition
//! for unique recovery at sparsity K: no dependent subset of size 2K.
//!
//! Everything here is deliberately dense and simple; instances are capped at
//! 24 variables where binary columns stay well conditioned.

use thiserror::Error;

use crate::graph::MeasurementGraph;
use crate::signal::{MeasurementVector, SparseSignal};

/// Enumeration guard; subsets of anything larger get out of hand.
pub const MAX_ORACLE_VARS: usize = 24;

const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(
        "instance too large: {n_vars} variables exceeds the {limit}-variable enumeration guard"
    )]
    InstanceTooLarge { n_vars: usize, limit: usize },
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Outcome of the minimum-weight enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetLeaderResult {
    /// Smallest support size admitting a solution, or `None` if nothing was
    /// found up to `k_max`.
    pub min_weight: Option<usize>,
    /// Every solution of that weight, sorted by support.
    pub leaders: Vec<SparseSignal>,
    /// Exactly one minimum-weight solution exists.
    pub unique: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparkResult {
    /// Smallest number of linearly dependent columns.
    Spark(usize),
    /// Every subset up to the bound was independent.
    AboveBound(usize),
}

/// Visits all size-`t` subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, t: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if t > n {
        return;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        if !f(&idx) {
            return;
        }
        // advance
        let mut i = t;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - t {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Rank of the M x t binary column submatrix, by elimination with partial
/// pivoting.
fn subset_rank(g: &MeasurementGraph, cols: &[usize]) -> usize {
    let m = g.n_checks();
    let t = cols.len();
    let mut a = vec![0.0f64; m * t];
    for (j, &col) in cols.iter().enumerate() {
        for &row in g.checks_of(col) {
            a[row as usize * t + j] = 1.0;
        }
    }
    let mut rank = 0;
    for j in 0..t {
        let (mut best, mut best_abs) = (rank, 0.0);
        for i in rank..m {
            let v = a[i * t + j].abs();
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= PIVOT_TOL {
            continue;
        }
        for jj in 0..t {
            a.swap(rank * t + jj, best * t + jj);
        }
        let pivot = a[rank * t + j];
        for i in rank + 1..m {
            let factor = a[i * t + j] / pivot;
            if factor != 0.0 {
                for jj in j..t {
                    a[i * t + jj] -= factor * a[rank * t + jj];
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// Least-squares solution of the system restricted to `cols`, via the
/// normal equations with partial pivoting. Rank-deficient subsets get their
/// free entries set to zero, which makes them fail the all-nonzero leader
/// test; any exact solution they carry is already represented on a smaller
/// subset, so nothing is lost.
fn solve_restricted(g: &MeasurementGraph, cols: &[usize], s: &[f64]) -> Vec<f64> {
    let t = cols.len();
    // gram[i][j] = |M(cols[i]) ∩ M(cols[j])| since the columns are binary
    let mut gram = vec![0.0f64; t * t];
    let mut rhs = vec![0.0f64; t];
    for i in 0..t {
        let ci = g.checks_of(cols[i]);
        for j in i..t {
            let cj = g.checks_of(cols[j]);
            let (mut a, mut b, mut shared) = (0, 0, 0usize);
            while a < ci.len() && b < cj.len() {
                if ci[a] == cj[b] {
                    shared += 1;
                    a += 1;
                    b += 1;
                } else if ci[a] < cj[b] {
                    a += 1;
                } else {
                    b += 1;
                }
            }
            gram[i * t + j] = shared as f64;
            gram[j * t + i] = shared as f64;
        }
        rhs[i] = ci.iter().map(|&m| s[m as usize]).sum();
    }

    // elimination with partial pivoting, tracking pivot rows per column
    let mut pivot_row = vec![usize::MAX; t];
    let mut rank = 0;
    for j in 0..t {
        let (mut best, mut best_abs) = (rank, 0.0);
        for i in rank..t {
            let v = gram[i * t + j].abs();
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= PIVOT_TOL {
            continue;
        }
        for jj in 0..t {
            gram.swap(rank * t + jj, best * t + jj);
        }
        rhs.swap(rank, best);
        let pivot = gram[rank * t + j];
        for i in rank + 1..t {
            let factor = gram[i * t + j] / pivot;
            if factor != 0.0 {
                for jj in j..t {
                    gram[i * t + jj] -= factor * gram[rank * t + jj];
                }
                rhs[i] -= factor * rhs[rank];
            }
        }
        pivot_row[j] = rank;
        rank += 1;
    }

    // back substitution; free variables stay zero
    let mut x = vec![0.0f64; t];
    for j in (0..t).rev() {
        let r = pivot_row[j];
        if r == usize::MAX {
            continue;
        }
        let mut acc = rhs[r];
        for jj in j + 1..t {
            acc -= gram[r * t + jj] * x[jj];
        }
        x[j] = acc / gram[r * t + j];
    }
    x
}

fn guard(g: &MeasurementGraph) -> Result<(), OracleError> {
    if g.n_vars() > MAX_ORACLE_VARS {
        return Err(OracleError::InstanceTooLarge {
            n_vars: g.n_vars(),
            limit: MAX_ORACLE_VARS,
        });
    }
    Ok(())
}

/// Finds all minimum-weight solutions of `H e = s` with support size up to
/// `k_max`. A candidate support is accepted when the restricted least-squares
/// solve leaves residual within `tol` in the infinity norm and every solved
/// entry exceeds `tol` in magnitude.
pub fn enumerate_coset_leaders(
    g: &MeasurementGraph,
    s: &MeasurementVector,
    k_max: usize,
    tol: f64,
) -> Result<CosetLeaderResult, OracleError> {
    guard(g)?;
    if k_max > g.n_vars() {
        return Err(OracleError::InvalidBound(format!(
            "k_max {} exceeds {} variables",
            k_max,
            g.n_vars()
        )));
    }
    if s.len() != g.n_checks() {
        return Err(OracleError::DimensionMismatch(format!(
            "{} measurements vs {} checks",
            s.len(),
            g.n_checks()
        )));
    }
    let sv = s.as_slice();
    for t in 0..=k_max {
        let mut leaders: Vec<SparseSignal> = Vec::new();
        for_each_subset(g.n_vars(), t, |cols| {
            let x = solve_restricted(g, cols, sv);
            if x.iter().any(|v| v.abs() <= tol) {
                return true;
            }
            let mut residual = sv.to_vec();
            for (j, &col) in cols.iter().enumerate() {
                for &m in g.checks_of(col) {
                    residual[m as usize] -= x[j];
                }
            }
            if residual.iter().all(|r| r.abs() <= tol) {
                let pairs: Vec<(usize, f64)> =
                    cols.iter().copied().zip(x.iter().copied()).collect();
                leaders.push(
                    SparseSignal::from_pairs(g.n_vars(), &pairs)
                        .expect("accepted leader entries are nonzero and in range"),
                );
            }
            true
        });
        if !leaders.is_empty() {
            let unique = leaders.len() == 1;
            return Ok(CosetLeaderResult {
                min_weight: Some(t),
                leaders,
                unique,
            });
        }
    }
    Ok(CosetLeaderResult {
        min_weight: None,
        leaders: Vec::new(),
        unique: false,
    })
}

/// Smallest `t` such that some `t` columns are linearly dependent over the
/// reals, searched up to `t_max`.
pub fn spark(g: &MeasurementGraph, t_max: usize) -> Result<SparkResult, OracleError> {
    guard(g)?;
    if t_max > g.n_vars() {
        return Err(OracleError::InvalidBound(format!(
            "t_max {} exceeds {} variables",
            t_max,
            g.n_vars()
        )));
    }
    for t in 1..=t_max {
        let mut dependent = false;
        for_each_subset(g.n_vars(), t, |cols| {
            if subset_rank(g, cols) < t {
                dependent = true;
                return false;
            }
            true
        });
        if dependent {
            return Ok(SparkResult::Spark(t));
        }
    }
    Ok(SparkResult::AboveBound(t_max))
}

/// Sufficient condition for the weight-`k` enumeration to return a unique
/// answer on any signal with at most `k` nonzeros: no set of up to `2k`
/// columns is linearly dependent.
pub fn recovery_guarantee_holds(g: &MeasurementGraph, k: usize) -> Result<bool, OracleError> {
    let bound = (2 * k).min(g.n_vars());
    Ok(matches!(spark(g, bound)?, SparkResult::AboveBound(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::measure;

    fn six_cycle() -> MeasurementGraph {
        MeasurementGraph::from_var_lists(3, 3, &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
    }

    /// v0 and v1 both attach to exactly {c0}: identical columns.
    fn duplicate_columns() -> MeasurementGraph {
        MeasurementGraph::from_var_lists(2, 1, &[vec![0], vec![0]]).unwrap()
    }

    #[test]
    fn zero_measurement_has_zero_leader() {
        let g = six_cycle();
        let s = MeasurementVector::new(vec![0.0; 3]);
        let r = enumerate_coset_leaders(&g, &s, 3, 1e-9).unwrap();
        assert_eq!(r.min_weight, Some(0));
        assert!(r.unique);
        assert_eq!(r.leaders[0].sparsity(), 0);
    }

    #[test]
    fn planted_signal_is_unique_leader() {
        let g = six_cycle();
        let e = SparseSignal::from_pairs(3, &[(0, 1.5), (2, -2.0)]).unwrap();
        let s = measure(&g, &e).unwrap();
        let r = enumerate_coset_leaders(&g, &s, 2, 1e-9).unwrap();
        assert_eq!(r.min_weight, Some(2));
        assert!(r.unique);
        assert!(r.leaders[0].max_abs_diff(&e) <= 1e-9);
    }

    #[test]
    fn duplicate_columns_give_two_leaders() {
        let g = duplicate_columns();
        let s = MeasurementVector::new(vec![1.0]);
        let r = enumerate_coset_leaders(&g, &s, 1, 1e-9).unwrap();
        assert_eq!(r.min_weight, Some(1));
        assert_eq!(r.leaders.len(), 2);
        assert!(!r.unique);
    }

    #[test]
    fn nothing_found_below_weight() {
        let g = duplicate_columns();
        let s = MeasurementVector::new(vec![1.0]);
        let r = enumerate_coset_leaders(&g, &s, 0, 1e-9).unwrap();
        assert_eq!(r.min_weight, None);
        assert!(r.leaders.is_empty());
        assert!(!r.unique);
    }

    #[test]
    fn spark_cases() {
        assert_eq!(
            spark(&duplicate_columns(), 2).unwrap(),
            SparkResult::Spark(2)
        );
        // the 3x3 cycle matrix is nonsingular
        assert_eq!(spark(&six_cycle(), 3).unwrap(), SparkResult::AboveBound(3));
        // an isolated variable is a zero column
        let zero_col = MeasurementGraph::from_var_lists(2, 1, &[vec![0], vec![]]).unwrap();
        assert_eq!(spark(&zero_col, 2).unwrap(), SparkResult::Spark(1));
    }

    #[test]
    fn recovery_guarantee_cases() {
        assert!(recovery_guarantee_holds(&six_cycle(), 1).unwrap());
        assert!(!recovery_guarantee_holds(&duplicate_columns(), 1).unwrap());
        assert!(recovery_guarantee_holds(&duplicate_columns(), 0).unwrap());
    }

    #[test]
    fn guards() {
        let g = MeasurementGraph::build_regular(30, 12, 2, 1, 32).unwrap();
        assert!(matches!(
            spark(&g, 2),
            Err(OracleError::InstanceTooLarge { .. })
        ));
        let small = six_cycle();
        assert!(matches!(
            spark(&small, 4),
            Err(OracleError::InvalidBound(_))
        ));
        let s = MeasurementVector::new(vec![0.0; 2]);
        assert!(matches!(
            enumerate_coset_leaders(&small, &s, 2, 1e-9),
            Err(OracleError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spark_is_permutation_invariant() {
        let lists: Vec<Vec<u32>> = vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1]];
        let g = MeasurementGraph::from_var_lists(4, 3, &lists).unwrap();
        let mut permuted = lists.clone();
        permuted.swap(0, 2);
        permuted.swap(1, 3);
        let gp = MeasurementGraph::from_var_lists(4, 3, &permuted).unwrap();
        assert_eq!(spark(&g, 4).unwrap(), spark(&gp, 4).unwrap());
    }
}
