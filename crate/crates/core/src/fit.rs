//! Least-squares fits of decay laws and late-time averages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = A exp(−α t²)`; `parameter` is `α`.
    GaussianDecay,
    /// `y = A x^p`; `parameter` is `p`.
    PowerLaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub parameter: f64,
    pub prefactor: f64,
    /// Inclusive range of the abscissa actually used.
    pub window: (f64, f64),
    pub n_points: usize,
    /// RMS residual of the linearized fit.
    pub residual_norm: f64,
    /// Set when the data show no decay at all.
    pub flagged: bool,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("abscissa has no spread".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Ok((a, b, (ss / n as f64).sqrt()))
}

fn positive_logs(points: &[(f64, f64)]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&(x, y)| {
            if y > 0.0 {
                Ok(y.ln())
            } else {
                Err(Error::Fit(format!("non-positive value {y} at {x}")))
            }
        })
        .collect()
}

/// Values at or above this are used by the default decay window.
pub const DECAY_FLOOR: f64 = 1e-3;

/// Fit `ln y = ln A − α t²` over `window`, or by default from the first
/// sample up to the last one before `y` drops below [`DECAY_FLOOR`].
pub fn fit_gaussian_decay(series: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = match window {
        Some((lo, hi)) => series
            .iter()
            .copied()
            .filter(|&(t, _)| t >= lo && t <= hi)
            .collect(),
        None => series
            .iter()
            .copied()
            .take_while(|&(_, y)| y >= DECAY_FLOOR)
            .collect(),
    };
    if points.is_empty() {
        return Err(Error::Fit("empty fit window".into()));
    }
    let ys = positive_logs(&points)?;
    let xs: Vec<f64> = points.iter().map(|(t, _)| t * t).collect();
    let (a, b, residual_norm) = linear_fit(&xs, &ys)?;
    let alpha = -b;
    Ok(FitResult {
        model: FitModel::GaussianDecay,
        parameter: alpha,
        prefactor: a.exp(),
        window: (points[0].0, points[points.len() - 1].0),
        n_points: points.len(),
        residual_norm,
        flagged: alpha.abs() < 1e-12,
    })
}

/// Fit `ln y = ln A + p ln x` over `lo ≤ x ≤ hi`.
pub fn fit_power_law(profile: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = profile
        .iter()
        .copied()
        .filter(|&(x, _)| x >= window.0 && x <= window.1)
        .collect();
    if points.is_empty() {
        return Err(Error::Fit("empty fit window".into()));
    }
    if points.iter().any(|&(x, _)| x <= 0.0) {
        return Err(Error::Fit("power law needs positive abscissae".into()));
    }
    let ys = positive_logs(&points)?;
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let (a, b, residual_norm) = linear_fit(&xs, &ys)?;
    Ok(FitResult {
        model: FitModel::PowerLaw,
        parameter: b,
        prefactor: a.exp(),
        window: (points[0].0, points[points.len() - 1].0),
        n_points: points.len(),
        residual_norm,
        flagged: b.abs() < 1e-12,
    })
}

/// Default power-law window `[4, min(40, L/2)]` for a profile of length `L`.
pub fn default_power_window(len: usize) -> (f64, f64) {
    (4.0, (len as f64 / 2.0).min(40.0))
}

/// Mean of `values` over the last 10% of the time span.
pub fn late_time_mean(times: &[f64], values: &[f64]) -> f64 {
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return f64::NAN;
    };
    let cut = t1 - 0.1 * (t1 - t0);
    let tail: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= cut)
        .map(|(_, v)| *v)
        .collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_gaussian_rate() {
        let series: Vec<(f64, f64)> = (0..40)
            .map(|k| {
                let t = 0.1 * k as f64;
                (t, 0.8 * (-0.5 * t * t).exp())
            })
            .collect();
        let fit = fit_gaussian_decay(&series, None).unwrap();
        assert!((fit.parameter - 0.5).abs() < 1e-6);
        assert!((fit.prefactor - 0.8).abs() < 1e-6);
        assert!(!fit.flagged);
        // exp(−0.5 t²) ≥ 1e−3 up to t ≈ 3.72
        assert!(fit.window.1 <= 3.72 && fit.window.1 > 3.5);
    }

    #[test]
    fn constant_series_is_flagged() {
        let series: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 0.3)).collect();
        let fit = fit_gaussian_decay(&series, None).unwrap();
        assert!(fit.parameter.abs() < 1e-12);
        assert!(fit.flagged);
        assert!(fit.residual_norm < 1e-12);
    }

    #[test]
    fn rejects_non_positive() {
        let series = [(0.0, 1.0), (1.0, 0.0), (2.0, 0.5)];
        assert!(fit_gaussian_decay(&series, Some((0.0, 2.0))).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -1.0)], (1.0, 2.0)).is_err());
    }

    #[test]
    fn recovers_power_law() {
        let profile: Vec<(f64, f64)> = (1..60).map(|l| (l as f64, 3.0 / (l * l) as f64)).collect();
        let fit = fit_power_law(&profile, default_power_window(100)).unwrap();
        assert!((fit.parameter + 2.0).abs() < 1e-6);
        assert_eq!(fit.window, (4.0, 40.0));
        assert_eq!(default_power_window(50), (4.0, 25.0));
    }

    #[test]
    fn late_mean_uses_last_tenth() {
        let times: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| if t >= 90.0 { 2.0 } else { 0.0 }).collect();
        assert_eq!(late_time_mean(&times, &values), 2.0);
    }
}
