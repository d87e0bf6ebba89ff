//! Failure-rate statistics: Wilson score intervals and the log-linear decay
//! fit for failure-vs-additional-measurements curves.

use thiserror::Error;

use crate::harness::FailureCurve;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

/// Wilson score interval for a binomial proportion at confidence level `z`.
pub fn wilson_interval(failures: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    assert!(failures <= trials);
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let radius = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the bounds are exactly 0 and 1 at the extremes; keep them free of
    // rounding dust
    let lo = if failures == 0 {
        0.0
    } else {
        ((center - radius) / denom).max(0.0)
    };
    let hi = if failures == trials {
        1.0
    } else {
        ((center + radius) / denom).min(1.0)
    };
    (lo, hi)
}

/// Wilson 95% interval.
pub fn wilson95(failures: usize, trials: usize) -> (f64, f64) {
    wilson_interval(failures, trials, Z_95)
}

/// Parameters of the empirical decay rule `p(L) = p0 * alpha^L`.
///
/// `alpha` is the per-sample multiplicative factor; 0.5 means one extra
/// direct sample halves the failure probability.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecayFit {
    pub p0: f64,
    pub alpha: f64,
    pub rms_log_residual: f64,
    pub points_used: usize,
}

/// Least-squares line through `(L, ln p_hat)` over the curve points with at
/// least one observed failure.
pub fn fit_decay(curve: &FailureCurve) -> Result<DecayFit, FitError> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.failures >= 1)
        .map(|p| (p.l as f64, p.p_hat.ln()))
        .collect();
    if pts.is_empty() {
        return Err(FitError::DegenerateFit("no points with failures".into()));
    }
    let first_l = pts[0].0;
    if pts.iter().all(|&(l, _)| l == first_l) {
        return Err(FitError::DegenerateFit(format!(
            "all {} usable points share L={first_l}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let rms = (pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        p0: intercept.exp(),
        alpha: slope.exp(),
        rms_log_residual: rms,
        points_used: pts.len(),
    })
}
