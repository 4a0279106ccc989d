use serde::{Deserialize, Serialize};

use super::levels::{zeeman_components, EigenLevel, Eigensystem, Transition, TransitionKind};

/// Channels with a matrix element at or below this are dropped.
pub const DEFAULT_RHO_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipFlop {
    /// `|⟨a|S⁺|b⟩|²` with `m_a = m_b + 1`.
    pub rho: f64,
    pub kind: TransitionKind,
    /// Signed `⟨a|S⁺|b⟩`.
    pub amplitude: f64,
}

/// Signed `⟨hi|S⁺|lo⟩` for `m_hi = m_lo + 1`.
fn s_plus(hi: &EigenLevel, lo: &EigenLevel) -> f64 {
    let (up_hi, _) = zeeman_components(hi.id, hi.beta);
    let (_, down_lo) = zeeman_components(lo.id, lo.beta);
    up_hi * down_lo
}

/// Flip-flop matrix element `ρ = ⟨u d|S⁺₁S⁻₂ + S⁻₁S⁺₂|d u⟩` of a level pair and
/// the class of the corresponding single-spin transition.
pub fn flip_flop_element(u: &EigenLevel, d: &EigenLevel) -> FlipFlop {
    let (hi, lo) = match u.id.two_m - d.id.two_m {
        2 => (u, d),
        -2 => (d, u),
        _ => {
            return FlipFlop {
                rho: 0.0,
                kind: TransitionKind::Disallowed,
                amplitude: 0.0,
            }
        }
    };
    let amplitude = s_plus(hi, lo);
    let kind = match (hi.id.effective_plus(), lo.id.effective_plus()) {
        (true, false) => TransitionKind::Allowed,
        (true, true) | (false, false) => TransitionKind::ForbiddenNmr,
        (false, true) => TransitionKind::ForbiddenFully,
    };
    FlipFlop {
        rho: amplitude * amplitude,
        kind,
        amplitude,
    }
}

/// One flip-flop pathway of the central spin (A) with a bath spin (B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairChannel {
    /// `(A, B)` before the flip-flop.
    pub initial: (EigenLevel, EigenLevel),
    /// `(A', B')` after it.
    pub final_: (EigenLevel, EigenLevel),
    /// `|⟨A'|S^∓|A⟩⟨B'|S^±|B⟩|`
    pub rho: f64,
    /// `E_A + E_B − E_A' − E_B'`, rad/s.
    pub delta_e: f64,
}

impl PairChannel {
    /// True for the energy-conserving exchange `(a, b) → (b, a)`.
    pub fn is_swap(&self) -> bool {
        self.initial.0.id == self.final_.1.id && self.initial.1.id == self.final_.0.id
    }
}

fn transfer_amplitude(from: &EigenLevel, to: &EigenLevel) -> f64 {
    match to.id.two_m - from.id.two_m {
        2 => s_plus(to, from),
        -2 => s_plus(from, to),
        _ => 0.0,
    }
}

/// All total-`m`-conserving `S⁺S⁻` channels between the central spin, in
/// either level of `central`, and a bath spin in `neighbor`.
pub fn enumerate_channels(
    system: &Eigensystem,
    central: &Transition,
    neighbor: &EigenLevel,
    threshold: f64,
) -> Vec<PairChannel> {
    let levels = system.levels();
    let mut out = Vec::new();
    for c in [&central.u, &central.d] {
        for a in levels.iter().filter(|a| (a.id.two_m - c.id.two_m).abs() == 2) {
            let amp_a = transfer_amplitude(c, a);
            if amp_a == 0.0 {
                continue;
            }
            let target = neighbor.id.two_m - (a.id.two_m - c.id.two_m);
            for j in levels.iter().filter(|j| j.id.two_m == target) {
                let rho = (amp_a * transfer_amplitude(neighbor, j)).abs();
                if rho > threshold {
                    let swap = a.id == neighbor.id && j.id == c.id;
                    out.push(PairChannel {
                        initial: (*c, *neighbor),
                        final_: (*a, *j),
                        rho,
                        delta_e: if swap {
                            0.0
                        } else {
                            c.energy + neighbor.energy - a.energy - j.energy
                        },
                    });
                }
            }
        }
    }
    out
}
