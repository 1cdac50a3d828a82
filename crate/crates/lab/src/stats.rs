//! Interval estimates, quantiles and the log-log fit.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
pub fn quantile(sorted: &[u64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo] as f64, sorted[hi] as f64);
    Some(a + (h - lo as f64) * (b - a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[u64]) -> Option<Self> {
        let mut v = values.to_vec();
        v.sort_unstable();
        Some(Quantiles {
            min: quantile(&v, 0.0)?,
            q25: quantile(&v, 0.25)?,
            q50: quantile(&v, 0.5)?,
            q75: quantile(&v, 0.75)?,
            max: quantile(&v, 1.0)?,
        })
    }
}

/// Least-squares line through `(ln b, ln q50)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    /// Standard error of the slope; zero with exactly two points or a
    /// perfect fit.
    pub se: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// One `(b, median, success rate)` point offered to [`fit_exponent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub b: f64,
    pub median: Option<f64>,
    pub rate: f64,
}

/// Fits `ln median = slope · ln b + c`. Needs at least three points, each
/// with success rate at least one half and a median.
pub fn fit_exponent(points: &[FitPoint]) -> Result<Fit> {
    let bad: Vec<String> = points
        .iter()
        .filter(|p| p.rate < 0.5 || p.median.map_or(true, |m| m <= 0.0))
        .map(|p| format!("b={} (rate {})", p.b, p.rate))
        .collect();
    if !bad.is_empty() {
        return Err(LabError::Runtime(format!(
            "fit needs success rate >= 1/2 at every point; failing: {}",
            bad.join(", ")
        )));
    }
    if points.len() < 3 {
        return Err(LabError::Runtime(format!(
            "fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.b.ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| p.median.unwrap_or(1.0).ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(LabError::Runtime(
            "fit needs at least two distinct b".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    Ok(Fit {
        slope,
        se,
        intercept,
        residuals,
    })
}
