use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::{sample_configuration, BathConfiguration, CentralState, SampleSpec};
use crate::error::{Error, Result};
use crate::pair_echo::{
    nonresonant_pair_coherence, thermal_pair_coherence, DetuningMode, NonResonantModel, PairParams,
};
use crate::spin::{
    eigensystem, enumerate_channels, flip_flop_element, level_polarization, DonorSpecies, LevelId,
    Line, Transition, DEFAULT_RHO_THRESHOLD,
};

/// Channels whose flip probability `sin²θ` is below this are skipped.
pub const NEGLIGIBLE_MIXING: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
struct ChannelTerm {
    rho: f64,
    delta_e: f64,
    neighbor: LevelId,
    partner: LevelId,
    /// `P_i − P_j` at the working field.
    dp: f64,
}

/// A line at a working field, with the flip-flop channels of every bath state
/// tabulated for each assignment of the central spin.
#[derive(Debug, Clone)]
pub struct EchoTarget {
    pub species: DonorSpecies,
    pub line: Line,
    /// T
    pub field: f64,
    pub transition: Transition,
    pub rho: f64,
    channels: [Vec<Vec<ChannelTerm>>; 2],
}

impl EchoTarget {
    pub fn new(species: &DonorSpecies, line: Line, field: f64) -> Result<Self> {
        let sys = eigensystem(species, field)?;
        let transition = sys.transition_for(line)?;
        let rho = flip_flop_element(&transition.u, &transition.d).rho;
        let table = |central: LevelId| -> Vec<Vec<ChannelTerm>> {
            sys.levels()
                .iter()
                .map(|n| {
                    enumerate_channels(&sys, &transition, n, DEFAULT_RHO_THRESHOLD)
                        .into_iter()
                        .filter(|c| c.initial.0.id == central)
                        .map(|c| ChannelTerm {
                            rho: c.rho,
                            delta_e: c.delta_e,
                            neighbor: c.initial.1.id,
                            partner: c.final_.1.id,
                            dp: c.initial.1.polarization - c.final_.1.polarization,
                        })
                        .collect()
                })
                .collect()
        };
        let channels = [table(line.u), table(line.d)];
        Ok(Self {
            species: species.clone(),
            line,
            field,
            transition,
            rho,
            channels,
        })
    }

    /// Labels of `u` and `d` at the working field.
    pub fn resonant_labels(&self) -> (usize, usize) {
        (self.transition.u.index, self.transition.d.index)
    }

    fn polarization_gap_at(&self, a: LevelId, b: LevelId, local: f64) -> f64 {
        let f = self.field + local / self.species.gamma_e;
        level_polarization(&self.species, a, f) - level_polarization(&self.species, b, f)
    }
}

/// Echo coherence of one configuration on the total-time grid `times`
/// (`t = 2τ`).
pub fn configuration_coherence(
    target: &EchoTarget,
    config: &BathConfiguration,
    mode: DetuningMode,
    model: NonResonantModel,
    times: &[f64],
) -> Vec<f64> {
    let mut out = vec![1.0; times.len()];
    let (u, d) = target.resonant_labels();
    let (p_u, p_d) = (target.transition.u.polarization, target.transition.d.polarization);
    let table = match config.central {
        CentralState::U => &target.channels[0],
        CentralState::D => &target.channels[1],
    };
    for n in &config.neighbors {
        let delta_nm = config.central_delta_nm - n.delta_nm;
        if n.level == u || n.level == d {
            // The central donor's local field is the reference, B_A = 0.
            let dp = match mode {
                DetuningMode::Unperturbed => p_u - p_d,
                DetuningMode::Perturbed => target.polarization_gap_at(target.line.u, target.line.d, n.overhauser),
            };
            let params = PairParams {
                gamma: -dp * n.overhauser,
                delta_nm,
                ..PairParams::resonant(n.coupling, target.rho, p_u, p_d)
            };
            for (l, &t) in out.iter_mut().zip(times) {
                *l *= thermal_pair_coherence(&params, 0.5 * t);
            }
            continue;
        }
        for ch in &table[n.level - 1] {
            let dp = match mode {
                DetuningMode::Unperturbed => ch.dp,
                DetuningMode::Perturbed => target.polarization_gap_at(ch.neighbor, ch.partner, n.overhauser),
            };
            let params = PairParams {
                j: n.coupling,
                rho: ch.rho,
                p_u: 0.0,
                p_d: 0.0,
                gamma: dp * n.overhauser,
                delta_nm,
                delta_e: ch.delta_e,
            };
            if params.theta().sin().powi(2) < NEGLIGIBLE_MIXING {
                continue;
            }
            for (l, &t) in out.iter_mut().zip(times) {
                *l *= nonresonant_pair_coherence(&params, 0.5 * t, model);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCurve {
    /// Total echo time `2τ`, s.
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_used: usize,
}

/// Random stream of realization `index`, independent of scheduling.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Central-spin assignment of realization `index`: `u` and `d` alternate.
pub fn central_state(index: usize) -> CentralState {
    if index.is_multiple_of(2) {
        CentralState::U
    } else {
        CentralState::D
    }
}

pub fn realization(spec: &SampleSpec, target: &EchoTarget, index: usize) -> Result<BathConfiguration> {
    let mut rng = realization_rng(spec.seed, index as u64);
    sample_configuration(spec, &target.species, target.resonant_labels(), central_state(index), &mut rng)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be finite, non-negative and increasing".into()));
    }
    Ok(())
}

/// Mean and standard error of the echo over `spec.n_realizations`
/// configurations. Results do not depend on the rayon pool size.
pub fn ensemble_average(spec: &SampleSpec, target: &EchoTarget, times: &[f64]) -> Result<CoherenceCurve> {
    spec.validate()?;
    check_times(times)?;
    let curves: Vec<Vec<f64>> = (0..spec.n_realizations)
        .into_par_iter()
        .map(|k| {
            let config = realization(spec, target, k)?;
            Ok(configuration_coherence(
                target,
                &config,
                spec.detuning_mode,
                spec.nonresonant_model,
                times,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(reduce(times, &curves))
}

fn reduce(times: &[f64], curves: &[Vec<f64>]) -> CoherenceCurve {
    let n = curves.len();
    let mut mean = vec![0.0; times.len()];
    for c in curves {
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut stderr = vec![0.0; times.len()];
    if n > 1 {
        for c in curves {
            for ((s, v), m) in stderr.iter_mut().zip(c).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        stderr
            .iter_mut()
            .for_each(|s| *s = (*s / (n - 1) as f64).sqrt() / (n as f64).sqrt());
    }
    CoherenceCurve {
        times: times.to_vec(),
        mean,
        stderr,
        n_used: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    #[default]
    Linear,
    /// `t = 0` followed by log-spaced points over three decades up to `t_max`.
    Geometric,
}

pub fn time_grid(kind: GridKind, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) || n < 2 {
        return Err(Error::InvalidGrid(format!("t_max {t_max}, {n} points")));
    }
    Ok(match kind {
        GridKind::Linear => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
        GridKind::Geometric => {
            let mut g = vec![0.0];
            let m = n - 1;
            g.extend((0..m).map(|k| {
                let x = if m == 1 { 0.0 } else { -3.0 + 3.0 * k as f64 / (m - 1) as f64 };
                t_max * 10f64.powf(x)
            }));
            g
        }
    })
}
