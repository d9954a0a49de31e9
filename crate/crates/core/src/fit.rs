//! Power-law fits for convergence-order checks.

use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Least-squares fit of `ln y = slope · ln x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence half-width of the slope; NaN with fewer than 3 points.
    pub half_width: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|t| t.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae must not all coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let half_width = if lx.len() > 2 {
        let dof = n - 2.0;
        let se = (sse / dof / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, dof)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .inverse_cdf(0.975);
        t * se
    } else {
        f64::NAN
    };
    Ok(LogLogFit {
        slope,
        intercept,
        half_width,
        r_squared,
        points: lx.len(),
    })
}

/// At least four distinct values spanning at least one decade.
pub fn sweep_is_sufficient(values: &[f64]) -> bool {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len() >= 4 && v[v.len() - 1] / v[0] >= 10.0 * (1.0 - 1e-12)
}
