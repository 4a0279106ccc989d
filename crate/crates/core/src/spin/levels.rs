use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::coupling::flip_flop_element;
use super::species::DonorSpecies;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    Unmixed,
}

/// Field-independent identity of an eigenstate: doublet branch and `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelId {
    pub branch: Branch,
    pub two_m: i32,
}

impl LevelId {
    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    /// Branch the state joins in the Zeeman limit (`+` for `m_s = +1/2`).
    pub(crate) fn effective_plus(&self) -> bool {
        match self.branch {
            Branch::Plus => true,
            Branch::Minus => false,
            Branch::Unmixed => self.two_m > 0,
        }
    }
}

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.branch {
            Branch::Plus => "+",
            Branch::Minus => "-",
            Branch::Unmixed => "0",
        };
        if self.two_m % 2 == 0 {
            write!(f, "|{b},{}>", self.two_m / 2)
        } else {
            write!(f, "|{b},{}/2>", self.two_m)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLevel {
    /// 1-based label in ascending energy at the evaluation field.
    pub index: usize,
    pub id: LevelId,
    /// rad/s
    pub energy: f64,
    pub beta: f64,
    /// `2⟨S_z⟩`, signed.
    pub polarization: f64,
}

impl EigenLevel {
    pub fn branch(&self) -> Branch {
        self.id.branch
    }

    pub fn m(&self) -> f64 {
        self.id.m()
    }

    pub fn two_m(&self) -> i32 {
        self.id.two_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    Allowed,
    ForbiddenNmr,
    ForbiddenFully,
    /// No `S±` matrix element: `|Δm| ≠ 1`.
    Disallowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub u: EigenLevel,
    pub d: EigenLevel,
    pub kind: TransitionKind,
    /// `E_u − E_d`, rad/s.
    pub frequency: f64,
}

impl Transition {
    pub fn new(u: EigenLevel, d: EigenLevel, field: f64) -> Result<Self> {
        let frequency = u.energy - d.energy;
        if frequency < 0.0 {
            return Err(Error::InvertedTransition {
                u: u.index,
                d: d.index,
                field_t: field,
            });
        }
        let kind = flip_flop_element(&u, &d).kind;
        Ok(Self { u, d, kind, frequency })
    }

    pub fn line(&self) -> Line {
        Line {
            u: self.u.id,
            d: self.d.id,
        }
    }
}

/// A transition identified by level identities rather than by field-dependent
/// labels, so it can be followed across a field scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    pub u: LevelId,
    pub d: LevelId,
}

impl Line {
    /// Resolve ascending-energy labels `u`, `d` at `label_field`.
    pub fn from_indices(species: &DonorSpecies, u: usize, d: usize, label_field: f64) -> Result<Self> {
        let sys = eigensystem(species, label_field)?;
        Ok(Self {
            u: sys.level(u)?.id,
            d: sys.level(d)?.id,
        })
    }

    pub fn polarizations(&self, species: &DonorSpecies, field: f64) -> (f64, f64) {
        (
            level_polarization(species, self.u, field),
            level_polarization(species, self.d, field),
        )
    }

    pub fn at(&self, species: &DonorSpecies, field: f64) -> Result<Transition> {
        eigensystem(species, field)?.transition_for(*self)
    }

    /// Flip-flop matrix element of the pair at `field`.
    pub fn rho(&self, species: &DonorSpecies, field: f64) -> f64 {
        let u = analytic_level(species, self.u, field);
        let d = analytic_level(species, self.d, field);
        flip_flop_element(&u, &d).rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub beta: f64,
    /// Set for the stretched states `|m| = I + 1/2`, where `β` is defined as 0.
    pub unmixed: bool,
}

fn check_m(species: &DonorSpecies, two_m: i32) -> Result<()> {
    let limit = species.two_i() + 1;
    if two_m.abs() > limit || (two_m + limit) % 2 != 0 {
        return Err(Error::InvalidSpecies(format!(
            "2m = {two_m} is not a valid projection for I = {}",
            species.nuclear_spin()
        )));
    }
    Ok(())
}

/// `β_m = atan2(√X_m, Z_m)`, written with both arguments scaled by `A` so the
/// `A → 0` and `B₀ → ∞` limits stay finite.
fn beta_raw(species: &DonorSpecies, two_m: i32, field: f64) -> f64 {
    let (az, ax) = scaled_zx(species, two_m, field);
    ax.atan2(az)
}

/// `(A Z_m, A √X_m)`
fn scaled_zx(species: &DonorSpecies, two_m: i32, field: f64) -> (f64, f64) {
    let a = species.hyperfine;
    let m = two_m as f64 / 2.0;
    let w0 = if field == 0.0 { 0.0 } else { species.omega0(field) };
    let az = a * m + w0 * (1.0 + species.delta);
    let ax = a * species.x_m(two_m).max(0.0).sqrt();
    (az, ax)
}

pub fn mixing_angle(species: &DonorSpecies, two_m: i32, field: f64) -> Result<MixingAngle> {
    check_m(species, two_m)?;
    if two_m.abs() == species.two_i() + 1 {
        return Ok(MixingAngle { beta: 0.0, unmixed: true });
    }
    Ok(MixingAngle {
        beta: beta_raw(species, two_m, field),
        unmixed: false,
    })
}

pub fn level_energy(species: &DonorSpecies, id: LevelId, field: f64) -> f64 {
    let a = species.hyperfine;
    let m = id.m();
    let w0 = if field == 0.0 { 0.0 } else { species.omega0(field) };
    let (az, ax) = scaled_zx(species, id.two_m, field);
    let base = -species.delta * w0 * m - a / 4.0;
    match id.branch {
        Branch::Plus => base + 0.5 * az.hypot(ax),
        Branch::Minus => base - 0.5 * az.hypot(ax),
        Branch::Unmixed => base + 0.5 * az * (id.two_m.signum() as f64),
    }
}

/// Signed polarization `2⟨S_z⟩` of a level; finite for `field = +∞`.
pub fn level_polarization(species: &DonorSpecies, id: LevelId, field: f64) -> f64 {
    match id.branch {
        Branch::Unmixed => id.two_m.signum() as f64,
        Branch::Plus => beta_raw(species, id.two_m, field).cos(),
        Branch::Minus => -beta_raw(species, id.two_m, field).cos(),
    }
}

/// Polarization of `level` re-evaluated at the locally shifted field
/// `field + shift` (both in tesla).
pub fn polarization(level: &EigenLevel, species: &DonorSpecies, field: f64, shift: f64) -> f64 {
    level_polarization(species, level.id, field + shift)
}

/// Zeeman-basis amplitudes `(⟨+1/2, m−1/2|ψ⟩, ⟨−1/2, m+1/2|ψ⟩)`.
pub(crate) fn zeeman_components(id: LevelId, beta: f64) -> (f64, f64) {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    match id.branch {
        Branch::Plus => (c, s),
        Branch::Minus => (-s, c),
        Branch::Unmixed if id.two_m > 0 => (1.0, 0.0),
        Branch::Unmixed => (0.0, 1.0),
    }
}

fn analytic_level(species: &DonorSpecies, id: LevelId, field: f64) -> EigenLevel {
    let beta = match id.branch {
        Branch::Unmixed => 0.0,
        _ => beta_raw(species, id.two_m, field),
    };
    EigenLevel {
        index: 0,
        id,
        energy: level_energy(species, id, field),
        beta,
        polarization: level_polarization(species, id, field),
    }
}

/// All `2(2I+1)` level identities in a fixed canonical order.
pub(crate) fn level_ids(species: &DonorSpecies) -> Vec<LevelId> {
    let top = species.two_i() + 1;
    let mut ids = vec![LevelId { branch: Branch::Unmixed, two_m: -top }];
    let mut m = -top + 2;
    while m < top {
        ids.push(LevelId { branch: Branch::Minus, two_m: m });
        ids.push(LevelId { branch: Branch::Plus, two_m: m });
        m += 2;
    }
    ids.push(LevelId { branch: Branch::Unmixed, two_m: top });
    ids
}

/// Eigenstates of one species at one field, sorted by ascending energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub species: DonorSpecies,
    pub field: f64,
    levels: Vec<EigenLevel>,
}

pub fn eigensystem(species: &DonorSpecies, field: f64) -> Result<Eigensystem> {
    if !(field.is_finite() && field >= 0.0) {
        return Err(Error::InvalidField(field));
    }
    let mut levels: Vec<EigenLevel> = level_ids(species)
        .into_iter()
        .map(|id| analytic_level(species, id, field))
        .collect();
    levels.sort_by(|a, b| {
        a.energy
            .partial_cmp(&b.energy)
            .unwrap_or(Ordering::Equal)
            .then(a.id.two_m.cmp(&b.id.two_m))
    });
    for (k, level) in levels.iter_mut().enumerate() {
        level.index = k + 1;
    }
    Ok(Eigensystem {
        species: species.clone(),
        field,
        levels,
    })
}

impl Eigensystem {
    pub fn levels(&self) -> &[EigenLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, index: usize) -> Result<&EigenLevel> {
        if index == 0 || index > self.levels.len() {
            return Err(Error::LevelIndex {
                index,
                count: self.levels.len(),
            });
        }
        Ok(&self.levels[index - 1])
    }

    pub fn find(&self, id: LevelId) -> Option<&EigenLevel> {
        self.levels.iter().find(|l| l.id == id)
    }

    pub fn transition(&self, u: usize, d: usize) -> Result<Transition> {
        Transition::new(*self.level(u)?, *self.level(d)?, self.field)
    }

    pub fn transition_for(&self, line: Line) -> Result<Transition> {
        let missing = || Error::InvalidSpecies(format!("line {}->{} not in species", line.u, line.d));
        let u = *self.find(line.u).ok_or_else(missing)?;
        let d = *self.find(line.d).ok_or_else(missing)?;
        Transition::new(u, d, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::gauss_to_tesla;
    use std::f64::consts::FRAC_PI_2;

    fn bi() -> DonorSpecies {
        DonorSpecies::bismuth()
    }

    #[test]
    fn counts_and_ordering() {
        let sys = eigensystem(&bi(), 0.1).unwrap();
        assert_eq!(sys.len(), 20);
        assert!(sys.levels().windows(2).all(|w| w[0].energy <= w[1].energy));
        assert_eq!(eigensystem(&DonorSpecies::arsenic(), 0.1).unwrap().len(), 8);
    }

    #[test]
    fn zero_field_multiplets() {
        let s = bi();
        let a = s.hyperfine;
        let sys = eigensystem(&s, 0.0).unwrap();
        let upper = sys.levels().iter().filter(|l| (l.energy - 2.25 * a).abs() < 1e-9 * a).count();
        let lower = sys.levels().iter().filter(|l| (l.energy + 2.75 * a).abs() < 1e-9 * a).count();
        assert_eq!((upper, lower), (11, 9));
    }

    #[test]
    fn null_hamiltonian() {
        let s = DonorSpecies::new("null", 0.0, 4.5, 2.488e-4, crate::units::GAMMA_E).unwrap();
        let sys = eigensystem(&s, 0.0).unwrap();
        assert!(sys.levels().iter().all(|l| l.energy == 0.0));
    }

    #[test]
    fn negative_field_rejected() {
        assert!(matches!(eigensystem(&bi(), -1e-3), Err(Error::InvalidField(_))));
    }

    #[test]
    fn bismuth_labels() {
        // Ascending labels in the mixing regime: 1..9 minus branch (m = 4..-4),
        // 10 the stretched m = -5 state, 11..19 plus branch, 20 stretched m = +5.
        let sys = eigensystem(&bi(), 0.08).unwrap();
        let id = |k: usize| sys.level(k).unwrap().id;
        assert_eq!(id(14), LevelId { branch: Branch::Plus, two_m: -2 });
        assert_eq!(id(7), LevelId { branch: Branch::Minus, two_m: -4 });
        assert_eq!(id(10), LevelId { branch: Branch::Unmixed, two_m: -10 });
        assert_eq!(id(11), LevelId { branch: Branch::Plus, two_m: -8 });
        assert_eq!(id(20), LevelId { branch: Branch::Unmixed, two_m: 10 });
    }

    #[test]
    fn mixing_angle_limits() {
        let s = bi();
        let b = mixing_angle(&s, 0, 0.0).unwrap();
        assert!((b.beta - FRAC_PI_2).abs() < 1e-15 && !b.unmixed);
        assert!(mixing_angle(&s, 8, 1e6).unwrap().beta < 1e-5);
        let st = mixing_angle(&s, 10, 0.3).unwrap();
        assert!(st.unmixed && st.beta == 0.0);
        assert!(mixing_angle(&s, 12, 0.3).is_err() && mixing_angle(&s, 3, 0.3).is_err());
        assert!(mixing_angle(&s, 2, 0.3).unwrap().beta > 0.0);
    }

    #[test]
    fn polarization_limits() {
        let s = bi();
        let sys = eigensystem(&s, 0.2).unwrap();
        for l in sys.levels() {
            let p_inf = level_polarization(&s, l.id, f64::INFINITY);
            let expected = if l.id.effective_plus() { 1.0 } else { -1.0 };
            assert_eq!(p_inf, expected);
            assert_eq!(polarization(l, &s, 0.2, 0.0), l.polarization);
        }
    }

    #[test]
    fn ct_polarizations_near_one_tenth() {
        let s = bi();
        let sys = eigensystem(&s, gauss_to_tesla(799.0)).unwrap();
        let pu = sys.level(14).unwrap().polarization;
        let pd = sys.level(7).unwrap().polarization;
        assert!((pu - 0.1).abs() < 0.02, "{pu}");
        assert!((pd - 0.1).abs() < 0.02, "{pd}");
    }

    #[test]
    fn doublet_polarizations_cancel() {
        let s = bi();
        for field in [0.0, 0.05, 0.3, 0.6] {
            let sys = eigensystem(&s, field).unwrap();
            for l in sys.levels().iter().filter(|l| l.branch() == Branch::Plus) {
                let partner = sys
                    .find(LevelId { branch: Branch::Minus, two_m: l.two_m() })
                    .unwrap();
                assert_eq!(l.polarization + partner.polarization, 0.0);
            }
        }
    }

    #[test]
    fn line_from_indices_round_trip() {
        let s = bi();
        let line = Line::from_indices(&s, 14, 7, 0.1).unwrap();
        let t = line.at(&s, 0.0799).unwrap();
        assert_eq!((t.u.index, t.d.index), (14, 7));
        assert_eq!(t.kind, TransitionKind::Allowed);
        assert!(t.frequency > 0.0);
    }
}
