//! Donor electron–nuclear spin eigensystem.
//!
//! The donor Hamiltonian `ω₀(S_z − δ I_z) + A I·S` conserves the total
//! projection `m = m_s + m_I`. The two states with `|m| = I + 1/2` are pure
//! Zeeman states; every other `m` forms a doublet mixed by the hyperfine
//! flip-flop term, solved here in closed form. A dense diagonalization of the
//! full `2(2I+1)`-dimensional matrix is kept alongside as an oracle.

mod coupling;
mod levels;
pub mod oracle;
mod species;

pub use coupling::{enumerate_channels, flip_flop_element, FlipFlop, PairChannel, DEFAULT_RHO_THRESHOLD};
pub use levels::{
    eigensystem, level_energy, level_polarization, mixing_angle, polarization, Branch, EigenLevel,
    Eigensystem, LevelId, Line, MixingAngle, Transition, TransitionKind,
};
pub use species::DonorSpecies;
