use serde::{Deserialize, Serialize};

use super::coherence::CoherenceCurve;
use crate::error::{Error, Result};

/// End of the fit window: first point below this coherence.
pub const FIT_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `exp(−t/T₂)`
    Exponential,
    /// `exp(−(t/T₂)ⁿ)`
    #[default]
    Stretched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// s
    pub t2: f64,
    pub stretch_n: f64,
    /// Root-mean-square residual over the fit window.
    pub rmse: f64,
    pub points: usize,
}

fn residuals(t: &[f64], y: &[f64], log_t2: f64, n: f64) -> Vec<f64> {
    let t2 = log_t2.exp();
    t.iter()
        .zip(y)
        .map(|(&ti, &yi)| (-(ti / t2).powf(n)).exp() - yi)
        .collect()
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Time at which the curve first drops below `level`, linearly interpolated.
pub fn crossing_time(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    let k = values.iter().position(|&v| v < level)?;
    if k == 0 {
        return Some(times[0]);
    }
    let (t0, t1, v0, v1) = (times[k - 1], times[k], values[k - 1], values[k]);
    Some(t0 + (t1 - t0) * (v0 - level) / (v0 - v1))
}

/// Least-squares fit of the mean coherence on `[0, t(0.05)]` by
/// Levenberg–Marquardt in `(ln T₂, n)`.
pub fn fit_decay(curve: &CoherenceCurve, model: DecayModel) -> Result<DecayFit> {
    let (times, values) = (&curve.times, &curve.mean);
    let e_inv = (-1.0f64).exp();
    let guess = crossing_time(times, values, e_inv).ok_or_else(|| {
        let (k, min) = values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        Error::NotDecaying {
            min,
            t_min: times.get(k).copied().unwrap_or(f64::NAN),
        }
    })?;
    let end = values
        .iter()
        .position(|&v| v < FIT_FLOOR)
        .map_or(values.len(), |k| k + 1);
    let (t, y) = (&times[..end], &values[..end]);
    if t.len() < 3 || guess <= 0.0 {
        return Err(Error::FitFailed(format!("{} points in the fit window", t.len())));
    }
    let free_n = model == DecayModel::Stretched;
    let mut p = [guess.ln(), 1.0];
    let mut r = residuals(t, y, p[0], p[1]);
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        // Analytic Jacobian of exp(−x) with x = (t/T₂)ⁿ.
        let t2 = p[0].exp();
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for (&ti, &ri) in t.iter().zip(&r) {
            if ti == 0.0 {
                continue;
            }
            let x = (ti / t2).powf(p[1]);
            let f = (-x).exp();
            let g = [f * x * p[1], -f * x * (ti / t2).ln()];
            for a in 0..2 {
                jtr[a] += g[a] * ri;
                for b in 0..2 {
                    jtj[a][b] += g[a] * g[b];
                }
            }
        }
        let step = if free_n {
            let m = [
                [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
                [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            [
                -(m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det,
                -(m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det,
            ]
        } else {
            if jtj[0][0] == 0.0 {
                break;
            }
            [-jtr[0] / (jtj[0][0] * (1.0 + lambda)), 0.0]
        };
        let trial = [p[0] + step[0], (p[1] + step[1]).clamp(0.05, 10.0)];
        let rt = residuals(t, y, trial[0], trial[1]);
        let ct = sum_sq(&rt);
        if ct.is_finite() && ct <= cost {
            let done = (cost - ct) <= 1e-30 + 1e-15 * cost
                && step[0].abs() < 1e-12
                && step[1].abs() < 1e-12;
            p = trial;
            r = rt;
            cost = ct;
            lambda = (lambda * 0.3).max(1e-12);
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let t2 = p[0].exp();
    if !(t2.is_finite() && t2 > 0.0) {
        return Err(Error::FitFailed(format!("T2 = {t2}")));
    }
    Ok(DecayFit {
        t2,
        stretch_n: p[1],
        rmse: (cost / t.len() as f64).sqrt(),
        points: t.len(),
    })
}
