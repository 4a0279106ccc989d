use clockbath::bath::{ensemble_average, fit_decay, heuristic_t2, time_grid, DecayModel, EchoTarget, GridKind, SampleSpec};
use clockbath::field_points::{ct_fields, drp_fields, phi};
use clockbath::pair_echo::{
    echo_propagator, free_evolution, resonant_pair_coherence, PairInitial, PairParams, PairState,
};
use clockbath::spin::oracle::diagonalize_full;
use clockbath::spin::eigensystem;
use clockbath::units::hz_to_rad;
use clockbath::{DonorSpecies, Line};

fn bi_14_7() -> (DonorSpecies, Line, f64) {
    let s = DonorSpecies::bismuth();
    let l = Line::from_indices(&s, 14, 7, 0.1).unwrap();
    let ct = ct_fields(&s, &l, 0.0, 0.6).unwrap()[0].field;
    (s, l, ct)
}

#[test]
fn ct_values_of_the_studied_line() {
    let (s, l, ct) = bi_14_7();
    let (pu, pd) = l.polarizations(&s, ct);
    assert!((pu - pd).abs() < 1e-6);
    assert!((pu - 0.1).abs() < 0.02, "{pu}");
    let rho = l.rho(&s, ct);
    assert!((rho - 0.25 * (1.0 + pu) * (1.0 - pd)).abs() < 1e-9);
    assert!((rho - 0.2475).abs() < 0.005, "{rho}");
    assert!((phi(&s, &l, ct) + 0.495).abs() < 0.01);

    // Same matrix element from the dense eigenvectors.
    let dense = diagonalize_full(&s, ct, 0.0).resolve_m();
    let t = l.at(&s, ct).unwrap();
    let pick = |idx: usize| &dense[idx - 1];
    let (u, d) = (pick(t.u.index), pick(t.d.index));
    assert_eq!((u.two_m, d.two_m), (t.u.two_m(), t.d.two_m()));
    let amp = diagonalize_full(&s, ct, 0.0).s_plus_element(&u.vector, &d.vector);
    assert!((amp * amp - rho).abs() < 1e-9);
}

#[test]
fn every_ct_line_has_a_drp_above_it() {
    for s in [DonorSpecies::bismuth(), DonorSpecies::antimony(), DonorSpecies::arsenic()] {
        let n = s.level_count();
        let sys = eigensystem(&s, 0.1).unwrap();
        let mut checked = 0;
        for u in 1..=n {
            for d in 1..=n {
                let (lu, ld) = (sys.level(u).unwrap(), sys.level(d).unwrap());
                if u <= d || lu.two_m() != ld.two_m() + 2 {
                    continue;
                }
                let l = Line::from_indices(&s, u, d, 0.1).unwrap();
                // Lines that become ESR-allowed at high field, where φ → 2.
                let (pu, pd) = l.polarizations(&s, 1e3);
                if pu < 0.99 || pd > -0.99 {
                    continue;
                }
                let cts = ct_fields(&s, &l, 0.0, 0.6).unwrap();
                let Some(ct) = cts.first() else { continue };
                let drps = drp_fields(&s, &l, ct.field, 3.0).unwrap();
                assert!(!drps.is_empty(), "{} {u}->{d}", s.name);
                checked += 1;
            }
        }
        assert!(checked > 0, "{}", s.name);
    }
}

#[test]
fn kernel_matches_direct_evolution_in_the_flip_flop_block() {
    // Without Ising term and detuning, an antiparallel pair only exchanges.
    for (j, rho, tau) in [(1e3, 0.25, 1e-3), (-4e4, 0.7, 2e-5), (250.0, 1.0, 0.03)] {
        let ev = free_evolution(j, rho, 0.0, 0.0, tau, &PairState::Ud.vector());
        let direct = ev.fidelity;
        let want = (j * rho * tau / 4.0).cos().powi(2);
        assert!((direct - want).abs() < 1e-12, "{direct} {want}");
        let echo = resonant_pair_coherence(&PairParams::resonant(j, rho, 0.0, 0.0), tau, PairInitial::Ud);
        assert!((echo.re - (j * rho * tau / 2.0).cos()).abs() < 1e-12);
    }
}

#[test]
fn heuristic_plateau_agrees_with_ensemble() {
    let (s, l, ct) = bi_14_7();
    let spec = SampleSpec {
        overhauser_halfwidth: hz_to_rad(5e4),
        n_realizations: 600,
        seed: 3,
        ..SampleSpec::default()
    };
    let target = EchoTarget::new(&s, l, ct).unwrap();
    let times = time_grid(GridKind::Linear, 0.09, 180).unwrap();
    let fit = fit_decay(&ensemble_average(&spec, &target, &times).unwrap(), DecayModel::Stretched).unwrap();
    let h = heuristic_t2(&s, &l, spec.density, spec.resonant_fraction_for(&s)).unwrap();
    assert!((fit.t2 / h.t2_m - 1.0).abs() < 0.3, "{} vs {}", fit.t2, h.t2_m);
}

#[test]
fn drp_echo_block_has_a_decoherence_free_subspace() {
    let (s, l, _) = bi_14_7();
    for p in drp_fields(&s, &l, 0.0, 0.6).unwrap() {
        let t = l.at(&s, p.field).unwrap();
        let rho = l.rho(&s, p.field);
        let (pu, pd) = (t.u.polarization, t.d.polarization);
        for j in [1e2, -3e3, 4e4] {
            for tau in [1e-6, 1e-4, 1e-3, 1e-2] {
                let m = echo_propagator(j, rho, pu, pd, tau);
                // Pulse alone.
                let y = echo_propagator(0.0, rho, pu, pd, tau);
                let phase = |st: PairState| {
                    let v = st.vector();
                    let z = (y * v).dotc(&(m * v));
                    assert!((z.norm() - 1.0).abs() < 1e-12);
                    z.arg()
                };
                let common = phase(PairState::S0);
                for st in [PairState::Uu, PairState::Dd] {
                    assert!((phase(st) - common).abs() < 1e-9, "{st:?}");
                }
                let rel = phase(PairState::T0) - common;
                let want = j * rho * tau;
                let diff = (rel - want).rem_euclid(2.0 * std::f64::consts::PI);
                assert!(diff.min(2.0 * std::f64::consts::PI - diff) < 1e-9, "{rel} vs {want}");
            }
        }
    }
}
