//! Brute-force evolution of a resonant pair in the 4-state space
//! `{uu, ud, du, dd}` of the two spins' `(u, d)` doublets, rotating frame.

use nalgebra::{Complex, Matrix4, SymmetricEigen, Vector4};

use crate::error::Result;
use crate::spin::{DonorSpecies, Line};

type C = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairState {
    Uu,
    Ud,
    Du,
    Dd,
    /// `(ud + du)/√2`
    T0,
    /// `(ud − du)/√2`
    S0,
}

impl PairState {
    pub fn vector(self) -> Vector4<C> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            Self::Uu => [1.0, 0.0, 0.0, 0.0],
            Self::Ud => [0.0, 1.0, 0.0, 0.0],
            Self::Du => [0.0, 0.0, 1.0, 0.0],
            Self::Dd => [0.0, 0.0, 0.0, 1.0],
            Self::T0 => [0.0, r, r, 0.0],
            Self::S0 => [0.0, r, -r, 0.0],
        };
        Vector4::from_iterator(v.into_iter().map(|x| C::new(x, 0.0)))
    }
}

/// Secular dipolar Hamiltonian `J[S_zS_z − ¼(S⁺S⁻ + S⁻S⁺)]` projected on the
/// pair space, with `⟨S_z⟩ = P/2` and flip-flop element `ρ`.
pub fn pair_hamiltonian(j: f64, rho: f64, p_u: f64, p_d: f64) -> Matrix4<f64> {
    let q = 0.25 * j;
    let mut h = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        q * p_u * p_u,
        q * p_u * p_d,
        q * p_u * p_d,
        q * p_d * p_d,
    ));
    h[(1, 2)] = -q * rho;
    h[(2, 1)] = -q * rho;
    h
}

fn propagator(h: &Matrix4<f64>, t: f64) -> Matrix4<C> {
    let eig = SymmetricEigen::new(*h);
    let v = eig.eigenvectors.map(|x| C::new(x, 0.0));
    let phases = Matrix4::from_diagonal(&eig.eigenvalues.map(|e| C::new(0.0, -e * t).exp()));
    v * phases * v.transpose()
}

/// `R_y(θ) ⊗ R_y(θ)` with `u` as spin up.
fn pulse(theta: f64) -> Matrix4<C> {
    let (s, c) = (theta / 2.0).sin_cos();
    let r = nalgebra::Matrix2::new(c, -s, s, c);
    let mut m = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    m[(2 * a + b, 2 * x + y)] = C::new(r[(a, x)] * r[(b, y)], 0.0);
                }
            }
        }
    }
    m
}

/// `U(τ) Y(π) U(τ)`: the refocusing block of the echo.
pub fn echo_propagator(j: f64, rho: f64, p_u: f64, p_d: f64, tau: f64) -> Matrix4<C> {
    let u = propagator(&pair_hamiltonian(j, rho, p_u, p_d), tau);
    u * pulse(std::f64::consts::PI) * u
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEvolution {
    pub state: Vector4<C>,
    /// `|⟨initial|final⟩|²`
    pub fidelity: f64,
}

fn finish(initial: &Vector4<C>, state: Vector4<C>) -> PairEvolution {
    let overlap = initial.dotc(&state);
    PairEvolution {
        state,
        fidelity: overlap.norm_sqr() / initial.norm_squared(),
    }
}

/// Full `(π/2)_y − τ − (π)_y − τ − (π/2)_y` sequence for a pair on `line` at
/// `field`.
pub fn drp_full_evolution(
    species: &DonorSpecies,
    field: f64,
    line: &Line,
    j: f64,
    tau: f64,
    initial: &Vector4<C>,
) -> Result<PairEvolution> {
    let t = line.at(species, field)?;
    let rho = crate::spin::flip_flop_element(&t.u, &t.d).rho;
    let half = pulse(std::f64::consts::FRAC_PI_2);
    let echo = echo_propagator(j, rho, t.u.polarization, t.d.polarization, tau);
    Ok(finish(initial, half * echo * half * initial))
}

/// Evolution for `t` without pulses.
pub fn free_evolution(j: f64, rho: f64, p_u: f64, p_d: f64, t: f64, initial: &Vector4<C>) -> PairEvolution {
    let u = propagator(&pair_hamiltonian(j, rho, p_u, p_d), t);
    finish(initial, u * initial)
}
