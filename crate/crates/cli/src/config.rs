//! TOML scenario configuration. Every physical quantity carries its unit in
//! the key name: `_T`/`_G` fields, `_Hz`/`_MHz` cyclic frequencies, `_s`
//! times, `_m3` densities.
#![allow(non_snake_case)]

use serde::{Deserialize, Serialize};

use clockbath::bath::{GridKind, NonMagneticShape, SampleSpec, Shell};
use clockbath::field_points::ct_fields;
use clockbath::pair_echo::{DetuningMode, NonResonantModel};
use clockbath::units::{gauss_to_tesla, hz_to_rad, mhz_to_rad, GAMMA_E};
use clockbath::{DonorSpecies, Line};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Decay,
    DetuningSweep,
    FieldScan,
    Heuristics,
}

impl std::str::FromStr for Scenario {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decay" => Ok(Scenario::Decay),
            "detuning-sweep" => Ok(Scenario::DetuningSweep),
            "field-scan" => Ok(Scenario::FieldScan),
            "heuristics" => Ok(Scenario::Heuristics),
            other => Err(CliError::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub species: SpeciesConfig,
    #[serde(default)]
    pub line: LineConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub heuristics: HeuristicsConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    /// `Bi`, `As`, `P` or `Sb`; ignored when `hyperfine_MHz` is given.
    pub preset: Option<String>,
    pub name: Option<String>,
    pub hyperfine_MHz: Option<f64>,
    pub nuclear_spin: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineConfig {
    pub u: usize,
    pub d: usize,
    pub label_field_T: Option<f64>,
    pub label_field_G: Option<f64>,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self {
            u: 14,
            d: 7,
            label_field_T: None,
            label_field_G: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldAt {
    Ct,
    High,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub at: Option<FieldAt>,
    pub B_T: Option<f64>,
    pub B_G: Option<f64>,
    /// Working field of the high-field regime.
    pub high_T: Option<f64>,
    pub ct_search_min_T: Option<f64>,
    pub ct_search_max_T: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub density_m3: f64,
    pub resonant_fraction: Option<f64>,
    pub overhauser_halfwidth_Hz: Option<f64>,
    pub overhauser_halfwidth_MHz: Option<f64>,
    pub nonmagnetic_halfwidth_Hz: Option<f64>,
    pub nonmagnetic_halfwidth_MHz: Option<f64>,
    pub nonmagnetic_shape: NonMagneticShape,
    pub neighbor_count: Option<f64>,
    pub shell_radius_m: Option<f64>,
    pub n_realizations: usize,
    pub detuning_mode: DetuningMode,
    pub nonresonant_model: NonResonantModel,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            density_m3: 4.4e21,
            resonant_fraction: None,
            overhauser_halfwidth_Hz: None,
            overhauser_halfwidth_MHz: None,
            nonmagnetic_halfwidth_Hz: None,
            nonmagnetic_halfwidth_MHz: None,
            nonmagnetic_shape: NonMagneticShape::Lorentzian,
            neighbor_count: None,
            shell_radius_m: None,
            n_realizations: 1000,
            detuning_mode: DetuningMode::Unperturbed,
            nonresonant_model: NonResonantModel::TwoLevel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TMax {
    Seconds(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max_s: TMax,
    pub n_time: usize,
    pub grid: GridKind,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_max_s: TMax::Auto(AutoTag::Auto),
            n_time: 200,
            grid: GridKind::Linear,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default)]
    pub model: clockbath::bath::DecayModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub overhauser_halfwidths_Hz: Vec<f64>,
    pub perturbed_branch: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            overhauser_halfwidths_Hz: vec![0.0, 1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6],
            perturbed_branch: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub B_min_T: Option<f64>,
    pub B_max_T: Option<f64>,
    pub B_min_G: Option<f64>,
    pub B_max_G: Option<f64>,
    pub n_points: usize,
    /// `[u, d]` label pairs at the label field.
    pub lines: Vec<[usize; 2]>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            B_min_T: None,
            B_max_T: None,
            B_min_G: None,
            B_max_G: None,
            n_points: 601,
            lines: vec![[14, 7]],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicsConfig {
    /// When set, the donor Overhauser width is estimated and combined with it.
    pub si29_halfwidth_Hz: Option<f64>,
}

/// Default label field for resolving level indices, T.
pub const LABEL_FIELD: f64 = 0.1;
/// Default working field of the high-field regime, T.
pub const HIGH_FIELD: f64 = 3.0;

fn one_of(name: &str, pairs: &[(&str, Option<f64>)]) -> Result<Option<f64>> {
    let set: Vec<_> = pairs.iter().filter(|(_, v)| v.is_some()).collect();
    match set.len() {
        0 => Ok(None),
        1 => Ok(set[0].1),
        _ => Err(CliError::Config(format!(
            "{name}: give only one of {}",
            pairs.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn tesla(name: &str, t: Option<f64>, g: Option<f64>) -> Result<Option<f64>> {
    one_of(name, &[("_T", t), ("_G", g.map(gauss_to_tesla))])
}

fn angular(name: &str, hz: Option<f64>, mhz: Option<f64>) -> Result<Option<f64>> {
    one_of(name, &[("_Hz", hz.map(hz_to_rad)), ("_MHz", mhz.map(mhz_to_rad))])
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn species(&self) -> Result<DonorSpecies> {
        let s = &self.species;
        if let Some(a) = s.hyperfine_MHz {
            let (Some(i), Some(delta)) = (s.nuclear_spin, s.delta) else {
                return Err(CliError::Config(
                    "custom species needs hyperfine_MHz, nuclear_spin and delta".into(),
                ));
            };
            let name = s.name.clone().unwrap_or_else(|| "custom".into());
            return Ok(DonorSpecies::new(name, mhz_to_rad(a), i, delta, GAMMA_E)?);
        }
        let preset = s.preset.as_deref().unwrap_or("Bi");
        DonorSpecies::preset(preset).ok_or_else(|| CliError::Config(format!("unknown species preset `{preset}`")))
    }

    pub fn label_field(&self) -> Result<f64> {
        Ok(tesla("line.label_field", self.line.label_field_T, self.line.label_field_G)?.unwrap_or(LABEL_FIELD))
    }

    pub fn line(&self, species: &DonorSpecies) -> Result<Line> {
        self.line_for(species, self.line.u, self.line.d)
    }

    pub fn line_for(&self, species: &DonorSpecies, u: usize, d: usize) -> Result<Line> {
        Ok(Line::from_indices(species, u, d, self.label_field()?)?)
    }

    pub fn high_field(&self) -> f64 {
        self.field.high_T.unwrap_or(HIGH_FIELD)
    }

    pub fn ct_search(&self) -> (f64, f64) {
        (
            self.field.ct_search_min_T.unwrap_or(0.0),
            self.field.ct_search_max_T.unwrap_or(0.6),
        )
    }

    /// Lowest clock-transition field of `line` in the search window.
    pub fn ct_field(&self, species: &DonorSpecies, line: &Line) -> Result<f64> {
        let (lo, hi) = self.ct_search();
        ct_fields(species, line, lo, hi)?
            .first()
            .map(|p| p.field)
            .ok_or(CliError::NoClockTransition {
                u: self.line.u,
                d: self.line.d,
                lo,
                hi,
            })
    }

    /// Working field of the decay and heuristics scenarios, T.
    pub fn working_field(&self, species: &DonorSpecies, line: &Line) -> Result<f64> {
        let explicit = tesla("field.B", self.field.B_T, self.field.B_G)?;
        match (explicit, self.field.at) {
            (Some(_), Some(_)) => Err(CliError::Config("field: give either `at` or a field value".into())),
            (Some(b), None) => Ok(b),
            (None, Some(FieldAt::High)) => Ok(self.high_field()),
            (None, Some(FieldAt::Ct)) | (None, None) => self.ct_field(species, line),
        }
    }

    pub fn sample_spec(&self, seed: u64) -> Result<SampleSpec> {
        let s = &self.sample;
        let shell = match (s.neighbor_count, s.shell_radius_m) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("sample: give either neighbor_count or shell_radius_m".into()))
            }
            (Some(m), None) => Shell::NeighborCount(m),
            (None, Some(r)) => Shell::Radius(r),
            (None, None) => Shell::default(),
        };
        let spec = SampleSpec {
            density: s.density_m3,
            resonant_fraction: s.resonant_fraction,
            overhauser_halfwidth: angular(
                "sample.overhauser_halfwidth",
                s.overhauser_halfwidth_Hz,
                s.overhauser_halfwidth_MHz,
            )?
            .unwrap_or(0.0),
            nonmagnetic_halfwidth: angular(
                "sample.nonmagnetic_halfwidth",
                s.nonmagnetic_halfwidth_Hz,
                s.nonmagnetic_halfwidth_MHz,
            )?
            .unwrap_or(0.0),
            nonmagnetic_shape: s.nonmagnetic_shape,
            shell,
            n_realizations: s.n_realizations,
            seed,
            detuning_mode: s.detuning_mode,
            nonresonant_model: s.nonresonant_model,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn scan_range(&self) -> Result<(f64, f64)> {
        let lo = tesla("scan.B_min", self.scan.B_min_T, self.scan.B_min_G)?.unwrap_or(0.0);
        let hi = tesla("scan.B_max", self.scan.B_max_T, self.scan.B_max_G)?.unwrap_or(0.6);
        if !(lo >= 0.0 && hi >= lo) {
            return Err(CliError::Config(format!("scan range [{lo}, {hi}] T")));
        }
        Ok((lo, hi))
    }
}

/// Apply `key.path=value` to a parsed TOML table. Values are read as TOML
/// literals, falling back to plain strings.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut cur = table;
    for p in path {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
