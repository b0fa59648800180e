//! Least-squares helpers for decay-rate and bound fits.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::TooFewSamples(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..n).map(|i| (ys[i] - slope * xs[i] - intercept).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit { slope, intercept, r2, n })
}

/// Fit of `log(y)` against `x` using only points with `y > floor`.
/// Returns the fit and the indices used.
pub fn log_linear_fit(xs: &[f64], ys: &[f64], floor: f64, min_points: usize) -> Result<(LinearFit, Vec<usize>)> {
    let used: Vec<usize> = (0..xs.len().min(ys.len())).filter(|&i| ys[i] > floor).collect();
    if used.len() < min_points {
        return Err(Error::TooFewSamples(used.len()));
    }
    let x: Vec<f64> = used.iter().map(|&i| xs[i]).collect();
    let y: Vec<f64> = used.iter().map(|&i| ys[i].ln()).collect();
    Ok((linear_fit(&x, &y)?, used))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ProportionalFit {
    pub k: f64,
    /// Coefficient of determination of `y ≈ k·x` against the mean of `y`.
    pub r2: f64,
    /// `max_i y_i / x_i`, the smallest constant that bounds every point.
    pub k_envelope: f64,
}

/// Least squares through the origin, `y ≈ k·x`.
pub fn proportional_fit(xs: &[f64], ys: &[f64]) -> Result<ProportionalFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let sxx: f64 = xs[..n].iter().map(|x| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewSamples(0));
    }
    let sxy: f64 = (0..n).map(|i| xs[i] * ys[i]).sum();
    let k = sxy / sxx;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let ss_res: f64 = (0..n).map(|i| (ys[i] - k * xs[i]).powi(2)).sum();
    let ss_tot: f64 = ys[..n].iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    let k_envelope = (0..n)
        .filter(|&i| xs[i] > 0.0)
        .map(|i| ys[i] / xs[i])
        .fold(0.0, f64::max);
    Ok(ProportionalFit { k, r2, k_envelope })
}
