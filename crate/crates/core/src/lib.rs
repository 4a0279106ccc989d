//! Hahn-echo decoherence of dipolar-coupled donor electron spins in silicon,
//! with emphasis on clock transitions of strongly mixed donors such as Si:Bi.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`]: donor electron–nuclear eigensystem, polarizations, transition
//!   catalog and flip-flop matrix elements, plus a dense-diagonalization oracle.
//! * [`field_points`]: clock transitions (CT) and dipolar refocusing points
//!   (DRP) located as roots in the applied field.
//! * [`pair_echo`]: exact two-spin Hahn-echo kernels and a four-state
//!   evolution oracle.
//! * [`bath`]: Monte-Carlo donor configurations, cluster-product coherence,
//!   ensemble averages, decay fits and closed-form estimators.

pub mod bath;
pub mod error;
pub mod field_points;
pub mod pair_echo;
pub mod roots;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
pub use spin::{
    Branch, DonorSpecies, EigenLevel, Eigensystem, LevelId, Line, PairChannel, Transition,
    TransitionKind,
};
