//! Clock transitions and dipolar refocusing points as roots in the applied field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pair_echo::{drp_full_evolution, PairState};
use crate::roots::scan_roots;
use crate::spin::{level_energy, DonorSpecies, Line};
use crate::units::{gauss_to_tesla, rad_to_hz};

/// Pre-scan spacing of the root search, T.
pub const SCAN_STEP: f64 = 1e-4;
/// Roots closer than this are merged, T.
pub const MERGE_DISTANCE: f64 = 0.5e-4;
/// Bracket width at which root refinement stops, T.
pub const ROOT_XTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FieldPointKind {
    Ct,
    Drp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub kind: FieldPointKind,
    /// T
    pub field: f64,
    pub line: Line,
    /// Value of the defining function at `field`.
    pub residual: f64,
    /// Worst pair-echo fidelity of `|u⟩|d⟩` over the verification draws (DRP only).
    pub oracle_fidelity: Option<f64>,
}

/// `φ = (P_u − P_d)² − 2ρ`; negative where exchange dominates the echo.
pub fn phi(species: &DonorSpecies, line: &Line, field: f64) -> f64 {
    let (p_u, p_d) = line.polarizations(species, field);
    let dp = p_u - p_d;
    dp * dp - 2.0 * line.rho(species, field)
}

fn polarization_gap(species: &DonorSpecies, line: &Line, field: f64) -> f64 {
    let (p_u, p_d) = line.polarizations(species, field);
    p_u - p_d
}

/// Fields in `[lo, hi]` (T) where `P_u = P_d`.
pub fn ct_fields(species: &DonorSpecies, line: &Line, lo: f64, hi: f64) -> Result<Vec<FieldPoint>> {
    let f = |b| polarization_gap(species, line, b);
    let roots = scan_roots(f, lo, hi, SCAN_STEP, ROOT_XTOL, MERGE_DISTANCE)?;
    Ok(roots
        .into_iter()
        .map(|b| FieldPoint {
            kind: FieldPointKind::Ct,
            field: b,
            line: *line,
            residual: f(b),
            oracle_fidelity: None,
        })
        .collect())
}

/// Couplings (rad/s) and half-intervals (s) used to confirm each DRP.
pub fn drp_check_points() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d4b0);
    (0..3)
        .map(|_| {
            let j = 10f64.powf(rng.random_range(2.0..5.0)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let tau = 10f64.powf(rng.random_range(-6.0..0.0));
            (j, tau)
        })
        .collect()
}

/// Worst-case `|u⟩|d⟩` echo fidelity at `field` over `points`.
pub fn drp_fidelity(species: &DonorSpecies, line: &Line, field: f64, points: &[(f64, f64)]) -> Result<f64> {
    let init = PairState::Ud.vector();
    let mut worst = 1.0f64;
    for &(j, tau) in points {
        worst = worst.min(drp_full_evolution(species, field, line, j, tau, &init)?.fidelity);
    }
    Ok(worst)
}

/// Fields in `[lo, hi]` (T) where `φ = 0`, each confirmed by the 4-state
/// echo evolution.
pub fn drp_fields(species: &DonorSpecies, line: &Line, lo: f64, hi: f64) -> Result<Vec<FieldPoint>> {
    let f = |b| phi(species, line, b);
    let roots = scan_roots(f, lo, hi, SCAN_STEP, ROOT_XTOL, MERGE_DISTANCE)?;
    let checks = drp_check_points();
    roots
        .into_iter()
        .map(|b| {
            Ok(FieldPoint {
                kind: FieldPointKind::Drp,
                field: b,
                line: *line,
                residual: f(b),
                oracle_fidelity: Some(drp_fidelity(species, line, b, &checks)?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub field: f64,
    pub line: Line,
    pub phi: f64,
    pub p_u: f64,
    pub p_d: f64,
    /// `(E_u − E_d)/2π`, Hz; negative if the pair is inverted at this field.
    pub frequency_hz: f64,
}

/// `φ`, polarizations and frequency of each line on each grid field, grid
/// major.
pub fn scan_table(species: &DonorSpecies, lines: &[Line], grid: &[f64]) -> Result<Vec<ScanRow>> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::InvalidGrid("field grid must be strictly increasing".into()));
    }
    Ok(grid
        .par_iter()
        .flat_map_iter(|&b| {
            lines.iter().map(move |line| {
                let (p_u, p_d) = line.polarizations(species, b);
                ScanRow {
                    field: b,
                    line: *line,
                    phi: phi(species, line, b),
                    p_u,
                    p_d,
                    frequency_hz: rad_to_hz(
                        level_energy(species, line.u, b) - level_energy(species, line.d, b),
                    ),
                }
            })
        })
        .collect())
}

/// Uniform field grid with `n` points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Default search window of the mixing regime, T.
pub fn mixing_range() -> (f64, f64) {
    (0.0, 0.6)
}

/// Tesla to gauss.
pub fn to_gauss(field: f64) -> f64 {
    field / gauss_to_tesla(1.0)
}
