use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair_echo::{DetuningMode, NonResonantModel};
use crate::spin::DonorSpecies;
use crate::units::dipolar_alpha;

/// Closest allowed donor separation, m.
pub const MIN_SEPARATION: f64 = 1e-9;
/// Cauchy draws are clipped at this many half-widths.
pub const CAUCHY_CLIP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonMagneticShape {
    #[default]
    Lorentzian,
    Gaussian,
}

/// Outer boundary of the sampled shell around the central donor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shell {
    /// Expected number of donors in the shell.
    NeighborCount(f64),
    /// Outer radius, m.
    Radius(f64),
}

impl Default for Shell {
    fn default() -> Self {
        Shell::NeighborCount(100.0)
    }
}

/// Statistical description of the donor ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// Donors per m³.
    pub density: f64,
    /// Probability that a bath donor sits in `u` or `d`; `None` means uniform
    /// occupation of all levels.
    pub resonant_fraction: Option<f64>,
    /// Overhauser half-width `w_OH`, rad/s.
    pub overhauser_halfwidth: f64,
    /// Non-magnetic detuning half-width `w_NM`, rad/s.
    pub nonmagnetic_halfwidth: f64,
    pub nonmagnetic_shape: NonMagneticShape,
    pub shell: Shell,
    pub n_realizations: usize,
    pub seed: u64,
    pub detuning_mode: DetuningMode,
    pub nonresonant_model: NonResonantModel,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            density: 4.4e21,
            resonant_fraction: None,
            overhauser_halfwidth: 0.0,
            nonmagnetic_halfwidth: 0.0,
            nonmagnetic_shape: NonMagneticShape::Lorentzian,
            shell: Shell::default(),
            n_realizations: 1000,
            seed: 0,
            detuning_mode: DetuningMode::Unperturbed,
            nonresonant_model: NonResonantModel::TwoLevel,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSample(m));
        if !(self.density.is_finite() && self.density >= 0.0) {
            return bad(format!("density {}", self.density));
        }
        if self.n_realizations == 0 {
            return bad("n_realizations must be at least 1".into());
        }
        if let Some(f) = self.resonant_fraction {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("resonant fraction {f}"));
            }
        }
        for (name, w) in [
            ("overhauser half-width", self.overhauser_halfwidth),
            ("non-magnetic half-width", self.nonmagnetic_halfwidth),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return bad(format!("{name} {w}"));
            }
        }
        match self.shell {
            Shell::NeighborCount(m) if !(m.is_finite() && m >= 50.0) => {
                bad(format!("expected neighbour count {m} is below 50"))
            }
            Shell::Radius(r) if !(r.is_finite() && r > MIN_SEPARATION) => bad(format!("shell radius {r}")),
            Shell::Radius(_) if self.density > 0.0 && self.expected_neighbors() < 50.0 => bad(format!(
                "shell holds {:.1} donors on average, at least 50 required",
                self.expected_neighbors()
            )),
            _ => Ok(()),
        }
    }

    pub fn resonant_fraction_for(&self, species: &DonorSpecies) -> f64 {
        self.resonant_fraction
            .unwrap_or(2.0 / species.level_count() as f64)
    }

    /// Outer shell radius, m. Zero for an empty sample.
    pub fn outer_radius(&self) -> f64 {
        match self.shell {
            Shell::Radius(r) => r,
            Shell::NeighborCount(_) if self.density == 0.0 => 0.0,
            Shell::NeighborCount(m) => {
                (3.0 * m / (4.0 * PI * self.density) + MIN_SEPARATION.powi(3)).cbrt()
            }
        }
    }

    pub fn expected_neighbors(&self) -> f64 {
        let r = self.outer_radius();
        if r <= MIN_SEPARATION {
            return 0.0;
        }
        self.density * 4.0 * PI / 3.0 * (r.powi(3) - MIN_SEPARATION.powi(3))
    }
}

/// Which level of the line the central spin is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralState {
    U,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    /// m, relative to the central donor.
    pub position: [f64; 3],
    /// Eigenlevel label (1-based, ascending energy at the working field).
    pub level: usize,
    /// Local Overhauser field, rad/s.
    pub overhauser: f64,
    /// Non-magnetic detuning, rad/s.
    pub delta_nm: f64,
    /// Dipolar coupling to the central donor, rad/s.
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathConfiguration {
    pub central: CentralState,
    /// Central donor's non-magnetic detuning, rad/s. Its Overhauser field is
    /// the zero of the local-field scale.
    pub central_delta_nm: f64,
    pub neighbors: Vec<Neighbor>,
}

/// `J = (μ₀/4π) γ_e² ħ (1 − 3cos²θ)/r³` for the secular dipolar coupling, with
/// `θ` measured from the field axis `z`.
pub fn dipolar_coupling(r: [f64; 3], gamma_e: f64) -> Result<f64> {
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let d = r2.sqrt();
    if d.is_nan() || d < MIN_SEPARATION {
        return Err(Error::Overlap(d));
    }
    let cos2 = r[2] * r[2] / r2;
    Ok(dipolar_alpha(gamma_e) * (1.0 - 3.0 * cos2) / (r2 * d))
}

/// Cauchy variate with half-width `w` by inverse CDF, clipped at
/// `±CAUCHY_CLIP·w`.
pub fn cauchy<R: Rng + ?Sized>(rng: &mut R, w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random();
    (w * (PI * (u - 0.5)).tan()).clamp(-CAUCHY_CLIP * w, CAUCHY_CLIP * w)
}

fn nonmagnetic<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> f64 {
    let w = spec.nonmagnetic_halfwidth;
    match spec.nonmagnetic_shape {
        NonMagneticShape::Lorentzian => cauchy(rng, w),
        NonMagneticShape::Gaussian if w == 0.0 => 0.0,
        NonMagneticShape::Gaussian => {
            let sigma = w / (2.0 * std::f64::consts::LN_2).sqrt();
            Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
        }
    }
}

/// Uniform point in the shell `MIN_SEPARATION ≤ r ≤ r_max`.
fn shell_point<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> [f64; 3] {
    let r0 = MIN_SEPARATION.powi(3);
    let r = (r0 + rng.random::<f64>() * (r_max.powi(3) - r0)).cbrt();
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let az = rng.random_range(0.0..2.0 * PI);
    [r * sin_t * az.cos(), r * sin_t * az.sin(), r * cos_t]
}

/// Draw one donor configuration. `resonant` holds the two labels of the line
/// (`u`, `d`) at the working field.
pub fn sample_configuration<R: Rng + ?Sized>(
    spec: &SampleSpec,
    species: &DonorSpecies,
    resonant: (usize, usize),
    central: CentralState,
    rng: &mut R,
) -> Result<BathConfiguration> {
    spec.validate()?;
    let levels = species.level_count();
    let mean = spec.expected_neighbors();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as usize
    } else {
        0
    };
    let r_max = spec.outer_radius();
    let fraction = spec.resonant_fraction_for(species);
    let others: Vec<usize> = (1..=levels)
        .filter(|&k| k != resonant.0 && k != resonant.1)
        .collect();
    let central_delta_nm = nonmagnetic(rng, spec);
    let mut neighbors = Vec::with_capacity(count);
    for _ in 0..count {
        let position = shell_point(rng, r_max);
        let level = if rng.random::<f64>() < fraction {
            if rng.random_bool(0.5) {
                resonant.0
            } else {
                resonant.1
            }
        } else {
            others[rng.random_range(0..others.len())]
        };
        let overhauser = cauchy(rng, spec.overhauser_halfwidth);
        let delta_nm = nonmagnetic(rng, spec);
        neighbors.push(Neighbor {
            position,
            level,
            overhauser,
            delta_nm,
            coupling: dipolar_coupling(position, species.gamma_e)?,
        });
    }
    Ok(BathConfiguration {
        central,
        central_delta_nm,
        neighbors,
    })
}
