//! Dense diagonalization of the donor Hamiltonian in the Zeeman product basis.
//!
//! Independent of the closed-form doublet solution; used to validate it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::species::DonorSpecies;

/// Zeeman basis state `|m_s, m_I⟩` stored as `(2 m_s, 2 m_I)`.
pub type ZeemanState = (i32, i32);

#[derive(Debug, Clone)]
pub struct FullSpectrum {
    /// Ascending eigenvalues, rad/s.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors as columns, same order as `energies`.
    pub vectors: DMatrix<f64>,
    pub basis: Vec<ZeemanState>,
}

/// An oracle eigenstate with definite total projection `m`.
#[derive(Debug, Clone)]
pub struct OracleState {
    pub energy: f64,
    pub two_m: i32,
    /// `⟨S_z⟩`
    pub sz: f64,
    pub vector: DVector<f64>,
}

pub fn zeeman_basis(species: &DonorSpecies) -> Vec<ZeemanState> {
    let two_i = species.two_i();
    let mut basis = Vec::with_capacity(species.level_count());
    for two_ms in [1, -1] {
        let mut two_mi = -two_i;
        while two_mi <= two_i {
            basis.push((two_ms, two_mi));
            two_mi += 2;
        }
    }
    basis
}

/// `ω₀(S_z − δ I_z) + A I·S` at the field `field + local_field_shift`.
pub fn hamiltonian_matrix(species: &DonorSpecies, field: f64, local_field_shift: f64) -> DMatrix<f64> {
    let basis = zeeman_basis(species);
    let n = basis.len();
    let w0 = species.omega0(field + local_field_shift);
    let a = species.hyperfine;
    let i = species.nuclear_spin();
    let mut h = DMatrix::zeros(n, n);
    for (k, &(two_ms, two_mi)) in basis.iter().enumerate() {
        let ms = two_ms as f64 / 2.0;
        let mi = two_mi as f64 / 2.0;
        h[(k, k)] = w0 * (ms - species.delta * mi) + a * ms * mi;
        // (A/2) I⁺S⁻ |+1/2, m_I⟩ = (A/2) √(I(I+1) − m_I(m_I+1)) |−1/2, m_I+1⟩
        if two_ms == 1 && two_mi < species.two_i() {
            let target = basis
                .iter()
                .position(|&s| s == (-1, two_mi + 2))
                .expect("partner state in basis");
            let v = 0.5 * a * (i * (i + 1.0) - mi * (mi + 1.0)).sqrt();
            h[(target, k)] = v;
            h[(k, target)] = v;
        }
    }
    h
}

pub fn diagonalize_full(species: &DonorSpecies, field: f64, local_field_shift: f64) -> FullSpectrum {
    let h = hamiltonian_matrix(species, field, local_field_shift);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    FullSpectrum {
        energies,
        vectors,
        basis: zeeman_basis(species),
    }
}

impl FullSpectrum {
    fn diagonal_expectation(&self, v: &DVector<f64>, f: impl Fn(ZeemanState) -> f64) -> f64 {
        self.basis
            .iter()
            .zip(v.iter())
            .map(|(&s, &c)| c * c * f(s))
            .sum()
    }

    /// Rotate each degenerate cluster onto eigenstates of total `M_z`, so that
    /// every returned state carries a definite `m`.
    pub fn resolve_m(&self) -> Vec<OracleState> {
        let n = self.energies.len();
        let scale = self.energies.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
        let tol = 1e-9 * scale;
        let mz = |(two_ms, two_mi): ZeemanState| (two_ms + two_mi) as f64 / 2.0;
        let mut out = Vec::with_capacity(n);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && self.energies[end] - self.energies[end - 1] < tol {
                end += 1;
            }
            let block = self.vectors.columns(start, end - start).into_owned();
            let rotated = if end - start == 1 {
                block
            } else {
                let mz_diag = DVector::from_iterator(n, self.basis.iter().map(|&s| mz(s)));
                let projected = block.transpose() * DMatrix::from_diagonal(&mz_diag) * &block;
                let eig = SymmetricEigen::new(projected);
                block * eig.eigenvectors
            };
            for (k, col) in rotated.column_iter().enumerate() {
                let v = col.into_owned();
                let m = self.diagonal_expectation(&v, mz);
                let sz = self.diagonal_expectation(&v, |(two_ms, _)| two_ms as f64 / 2.0);
                out.push(OracleState {
                    energy: self.energies[start + k],
                    two_m: (2.0 * m).round() as i32,
                    sz,
                    vector: v,
                });
            }
            start = end;
        }
        out
    }

    /// `⟨a|S⁺|b⟩` for two states expanded in this spectrum's basis.
    pub fn s_plus_element(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let mut acc = 0.0;
        for (k, &(two_ms, two_mi)) in self.basis.iter().enumerate() {
            if two_ms == -1 {
                let up = self
                    .basis
                    .iter()
                    .position(|&s| s == (1, two_mi))
                    .expect("partner state in basis");
                acc += a[up] * b[k];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{eigensystem, Branch};

    #[test]
    fn spectrum_matches_closed_form() {
        let s = DonorSpecies::bismuth();
        let full = diagonalize_full(&s, 0.0799, 0.0);
        let sys = eigensystem(&s, 0.0799).unwrap();
        for (e, l) in full.energies.iter().zip(sys.levels()) {
            assert!((e - l.energy).abs() <= 1e-10 * l.energy.abs().max(s.hyperfine));
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let s = DonorSpecies::bismuth();
        for field in [0.0, 0.0799, 0.4] {
            let v = diagonalize_full(&s, field, 0.0).vectors;
            let g = v.transpose() * &v;
            let err = (g - DMatrix::<f64>::identity(20, 20)).abs().max();
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let s = DonorSpecies::bismuth();
        let a = diagonalize_full(&s, 0.2, 0.0);
        let b = hamiltonian_matrix(&s, 0.2, 0.0);
        assert_eq!(b, hamiltonian_matrix(&s, 0.2, -0.0));
        let shifted = diagonalize_full(&s, 0.19, 0.01);
        for (x, y) in a.energies.iter().zip(&shifted.energies) {
            assert!((x - y).abs() < 1e-6 * s.hyperfine);
        }
    }

    #[test]
    fn zeeman_limit() {
        let s = DonorSpecies::arsenic();
        let full = diagonalize_full(&s, 1e4, 0.0);
        for col in full.vectors.column_iter() {
            let max = col.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            assert!(max > 1.0 - 1e-9);
        }
    }

    #[test]
    fn resolve_m_at_zero_field() {
        let s = DonorSpecies::bismuth();
        let states = diagonalize_full(&s, 0.0, 0.0).resolve_m();
        let mut upper: Vec<i32> = states.iter().skip(9).map(|st| st.two_m).collect();
        upper.sort();
        assert_eq!(upper, (-5..=5).map(|m| 2 * m).collect::<Vec<_>>());
        // F = 5 multiplet: ⟨S_z⟩ = m / 10.
        for st in states.iter().skip(9) {
            assert!((st.sz - st.two_m as f64 / 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_rho_matches_closed_form() {
        let s = DonorSpecies::bismuth();
        let field = 0.0799;
        let sys = eigensystem(&s, field).unwrap();
        let states = diagonalize_full(&s, field, 0.0).resolve_m();
        let u = &states[13];
        let d = &states[6];
        let amp = diagonalize_full(&s, field, 0.0).s_plus_element(&u.vector, &d.vector);
        let t = sys.transition(14, 7).unwrap();
        assert_eq!(t.u.branch(), Branch::Plus);
        let rho = crate::spin::flip_flop_element(&t.u, &t.d).rho;
        assert!((amp * amp - rho).abs() < 1e-12, "{} vs {rho}", amp * amp);
    }

    #[test]
    fn mixing_angle_from_eigenvector() {
        let s = DonorSpecies::bismuth();
        let field = 0.0799;
        let full = diagonalize_full(&s, field, 0.0);
        let states = full.resolve_m();
        let st = &states[13];
        assert_eq!(st.two_m, -2);
        let up = full.basis.iter().position(|&b| b == (1, -3)).unwrap();
        let down = full.basis.iter().position(|&b| b == (-1, -1)).unwrap();
        let beta = 2.0 * st.vector[down].abs().atan2(st.vector[up].abs());
        let analytic = crate::spin::mixing_angle(&s, -2, field).unwrap().beta;
        assert!((beta - analytic).abs() < 1e-9, "{beta} vs {analytic}");
    }

    proptest::proptest! {
        #[test]
        fn closed_form_agrees_with_dense(field in 0.0f64..1.0, sp in 0usize..4) {
            let s = [DonorSpecies::bismuth(), DonorSpecies::arsenic(),
                     DonorSpecies::phosphorus(), DonorSpecies::antimony()][sp].clone();
            let full = diagonalize_full(&s, field, 0.0);
            let states = full.resolve_m();
            let sys = eigensystem(&s, field).unwrap();
            for (st, l) in states.iter().zip(sys.levels()) {
                let scale = l.energy.abs().max(s.hyperfine);
                proptest::prop_assert!((st.energy - l.energy).abs() <= 1e-10 * scale);
                if field > 1e-3 {
                    proptest::prop_assert_eq!(st.two_m, l.two_m());
                    proptest::prop_assert!((2.0 * st.sz - l.polarization).abs() < 1e-9);
                }
            }
            if field > 1e-3 {
                for (a, la) in states.iter().zip(sys.levels()) {
                    for (b, lb) in states.iter().zip(sys.levels()) {
                        if la.two_m() == lb.two_m() + 2 {
                            let amp = full.s_plus_element(&a.vector, &b.vector);
                            let rho = crate::spin::flip_flop_element(la, lb).rho;
                            proptest::prop_assert!((amp * amp - rho).abs() < 1e-9);
                        }
                    }
                }
            }
        }

        #[test]
        fn doublet_weights_sum_to_one(field in 0.0f64..2.0, two_m in -4i32..=4) {
            let s = DonorSpecies::bismuth();
            let b = crate::spin::mixing_angle(&s, 2 * two_m, field).unwrap().beta;
            let (c, sn) = ((b / 2.0).cos(), (b / 2.0).sin());
            let total = c * c * c * c + 2.0 * c * c * sn * sn + sn * sn * sn * sn;
            proptest::prop_assert!((total - 1.0).abs() < 1e-14);
        }
    }
}
