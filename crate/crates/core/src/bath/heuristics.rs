use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sample::{sample_configuration, CentralState, SampleSpec};
use crate::error::Result;
use crate::field_points::{ct_fields, mixing_range};
use crate::spin::{eigensystem, DonorSpecies, Line};
use crate::units::dipolar_alpha;

/// Closed-form coherence-time estimates for a line at a given donor density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicT2 {
    /// Resonant donors per m³.
    pub n_res: f64,
    /// Mean resonant-neighbour distance from `(4π/3) n_res R̄³ = 1`, m.
    pub r_bar: f64,
    /// Orientation-averaged coupling `α/(2R̄³)` at `R̄`, rad/s.
    pub j_mean: f64,
    /// `12/(π α n_res)`, s.
    pub t2_m: f64,
    /// `T₂^(M)` divided by the enhancement, s. `None` without a CT.
    pub t2_id: Option<f64>,
    /// `(P_u(∞) − P_d(∞))² / [½(1+P_u)(1−P_d)]` with the denominator at the CT.
    pub enhancement: Option<f64>,
    /// T
    pub ct_field: Option<f64>,
}

pub fn heuristic_t2(species: &DonorSpecies, line: &Line, density: f64, resonant_fraction: f64) -> Result<HeuristicT2> {
    let alpha = dipolar_alpha(species.gamma_e);
    let n_res = resonant_fraction * density;
    let r_bar = (3.0 / (4.0 * PI * n_res)).cbrt();
    let t2_m = 12.0 / (PI * alpha * n_res);
    let (lo, hi) = mixing_range();
    let ct = ct_fields(species, line, lo, hi)?.first().map(|p| p.field);
    let enhancement = ct.map(|b| {
        let (pu_inf, pd_inf) = line.polarizations(species, f64::INFINITY);
        let (pu, pd) = line.polarizations(species, b);
        (pu_inf - pd_inf).powi(2) / (0.5 * (1.0 + pu) * (1.0 - pd))
    });
    Ok(HeuristicT2 {
        n_res,
        r_bar,
        j_mean: alpha / (2.0 * r_bar.powi(3)),
        t2_m,
        t2_id: enhancement.map(|e| t2_m / e),
        enhancement,
        ct_field: ct,
    })
}

/// Half-width (rad/s) of the Overhauser-like shift `Σ_k J_k P_k/2` that bath
/// donors impose on the central one, estimated by Monte Carlo as the median
/// absolute shift, plus a separately supplied ²⁹Si half-width. Lorentzian
/// half-widths of independent contributions add.
pub fn estimate_overhauser_width(
    spec: &SampleSpec,
    species: &DonorSpecies,
    field: f64,
    si29_halfwidth: f64,
) -> Result<f64> {
    if spec.density == 0.0 {
        return Ok(si29_halfwidth);
    }
    let sys = eigensystem(species, field)?;
    // Uniform occupation of all levels.
    let spec = SampleSpec {
        resonant_fraction: None,
        ..spec.clone()
    };
    let mut shifts: Vec<f64> = (0..spec.n_realizations)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(k as u64);
            let config = sample_configuration(&spec, species, (1, 2), CentralState::U, &mut rng)?;
            Ok(config
                .neighbors
                .iter()
                .map(|n| 0.5 * n.coupling * sys.levels()[n.level - 1].polarization)
                .sum::<f64>()
                .abs())
        })
        .collect::<Result<_>>()?;
    shifts.sort_by(f64::total_cmp);
    let m = shifts.len();
    let median = if m % 2 == 1 {
        shifts[m / 2]
    } else {
        0.5 * (shifts[m / 2 - 1] + shifts[m / 2])
    };
    Ok(median + si29_halfwidth)
}
