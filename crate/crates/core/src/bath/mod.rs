//! Monte-Carlo donor ensembles and the cluster-product echo.

mod coherence;
mod fit;
mod heuristics;
mod sample;

pub use coherence::{
    central_state, configuration_coherence, ensemble_average, realization, realization_rng, time_grid,
    CoherenceCurve, EchoTarget, GridKind, NEGLIGIBLE_MIXING,
};
pub use fit::{crossing_time, fit_decay, DecayFit, DecayModel, FIT_FLOOR};
pub use heuristics::{estimate_overhauser_width, heuristic_t2, HeuristicT2};
pub use sample::{
    cauchy, dipolar_coupling, sample_configuration, BathConfiguration, CentralState, Neighbor,
    NonMagneticShape, SampleSpec, Shell, CAUCHY_CLIP, MIN_SEPARATION,
};
