//! Hahn-echo coherence of a single dipolar-coupled pair.
//!
//! `τ` is always the half-interval of the echo; the echo is read at `2τ`.

mod oracle;

pub use oracle::{
    drp_full_evolution, echo_propagator, free_evolution, pair_hamiltonian, PairEvolution, PairState,
};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::spin::{DonorSpecies, Line};

/// Parameters of one two-level flip-flop problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    /// Signed dipolar coupling, rad/s.
    pub j: f64,
    pub rho: f64,
    pub p_u: f64,
    pub p_d: f64,
    /// Overhauser detuning of the pair, rad/s.
    pub gamma: f64,
    pub delta_nm: f64,
    /// Eigenenergy mismatch of a non-resonant channel, rad/s.
    pub delta_e: f64,
}

impl PairParams {
    pub fn resonant(j: f64, rho: f64, p_u: f64, p_d: f64) -> Self {
        Self {
            j,
            rho,
            p_u,
            p_d,
            gamma: 0.0,
            delta_nm: 0.0,
            delta_e: 0.0,
        }
    }

    /// Total detuning `Δ`. The two diagonal entries of the flip-flop block
    /// differ by `Δ/2`, so an energy mismatch enters twice.
    pub fn detuning(&self) -> f64 {
        self.gamma + self.delta_nm + 2.0 * self.delta_e
    }

    pub fn theta(&self) -> f64 {
        (self.j * self.rho).atan2(self.detuning())
    }

    pub fn omega(&self) -> f64 {
        0.25 * self.detuning().hypot(self.j * self.rho)
    }

    fn ising_phase(&self, tau: f64) -> f64 {
        let dp = self.p_u - self.p_d;
        0.25 * self.j * dp * dp * tau
    }
}

/// How polarizations enter the Overhauser detuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningMode {
    /// Polarizations fixed at the applied field.
    #[default]
    Unperturbed,
    /// Each spin's polarizations re-evaluated at its locally shifted field.
    Perturbed,
}

/// `γ = (P_u − P_d)(B_A − B_B)` with fields in rad/s.
pub fn detuning_unperturbed(p_u: f64, p_d: f64, b_a: f64, b_b: f64) -> f64 {
    (p_u - p_d) * (b_a - b_b)
}

/// Overhauser detuning of a resonant pair on `line` at `field` (T), local
/// fields `b_a`, `b_b` given in rad/s.
pub fn pair_detuning(
    species: &DonorSpecies,
    line: &Line,
    field: f64,
    b_a: f64,
    b_b: f64,
    mode: DetuningMode,
) -> f64 {
    match mode {
        DetuningMode::Unperturbed => {
            let (p_u, p_d) = line.polarizations(species, field);
            detuning_unperturbed(p_u, p_d, b_a, b_b)
        }
        DetuningMode::Perturbed => {
            let shifted = |b: f64| {
                let (p_u, p_d) = line.polarizations(species, field + b / species.gamma_e);
                p_u - p_d
            };
            let a = if b_a == 0.0 { 0.0 } else { shifted(b_a) * b_a };
            a - shifted(b_b) * b_b
        }
    }
}

/// Coefficients of the echo operator `U(τ) σ_x U(τ) = A σ_x − iB − C σ_z`
/// in the flip-flop subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HahnCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HahnCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }
}

pub fn hahn_coefficients(params: &PairParams, tau: f64) -> HahnCoefficients {
    let theta = params.theta();
    let (s, c) = (params.omega() * tau).sin_cos();
    HahnCoefficients {
        a: s * s * (2.0 * theta).cos() + c * c,
        b: 2.0 * s * c * theta.sin(),
        c: s * s * (2.0 * theta).sin(),
    }
}

/// Initial product state of a resonant pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairInitial {
    Uu,
    Dd,
    Ud,
    Du,
}

impl PairInitial {
    pub const ALL: [PairInitial; 4] = [Self::Uu, Self::Dd, Self::Ud, Self::Du];

    fn triplet_like(self) -> bool {
        matches!(self, Self::Uu | Self::Dd)
    }
}

/// Echo amplitude `L±` of a resonant pair. Parallel initial states give `L⁺`,
/// antiparallel ones `L⁻`.
pub fn resonant_pair_coherence(params: &PairParams, tau: f64, initial: PairInitial) -> Complex<f64> {
    let h = hahn_coefficients(params, tau);
    let (s, c) = params.ising_phase(tau).sin_cos();
    let sign = if initial.triplet_like() { 1.0 } else { -1.0 };
    Complex::new(h.a * c - sign * h.b * s, -sign * h.c * s)
}

/// Average of [`resonant_pair_coherence`] over the four initial states.
pub fn thermal_pair_coherence(params: &PairParams, tau: f64) -> f64 {
    hahn_coefficients(params, tau).a * params.ising_phase(tau).cos()
}

/// Survival law for a neighbour that the pulses do not address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonResonantModel {
    /// `1 − sin²θ sin²(ωτ)`, which is `cos²(Jρτ/4)` at zero detuning.
    #[default]
    TwoLevel,
    /// `1 − 2 sin²θ sin²(ωτ)`, which is `cos(Jρτ/2)` at zero detuning.
    Cosine,
}

pub fn nonresonant_pair_coherence(params: &PairParams, tau: f64, model: NonResonantModel) -> f64 {
    let s = params.theta().sin();
    let w = (params.omega() * tau).sin();
    let flip = s * s * w * w;
    match model {
        NonResonantModel::TwoLevel => 1.0 - flip,
        NonResonantModel::Cosine => 1.0 - 2.0 * flip,
    }
}
