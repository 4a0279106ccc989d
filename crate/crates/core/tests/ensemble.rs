use clockbath::bath::{
    ensemble_average, fit_decay, time_grid, CoherenceCurve, DecayModel, EchoTarget, GridKind, SampleSpec, Shell,
};
use clockbath::field_points::ct_fields;
use clockbath::units::hz_to_rad;
use clockbath::{DonorSpecies, Line};

fn ct_target() -> EchoTarget {
    let s = DonorSpecies::bismuth();
    let l = Line::from_indices(&s, 14, 7, 0.1).unwrap();
    let ct = ct_fields(&s, &l, 0.0, 0.6).unwrap()[0].field;
    EchoTarget::new(&s, l, ct).unwrap()
}

fn spec(width_hz: f64, n: usize) -> SampleSpec {
    SampleSpec {
        overhauser_halfwidth: hz_to_rad(width_hz),
        n_realizations: n,
        seed: 17,
        ..SampleSpec::default()
    }
}

fn curve(spec: &SampleSpec, target: &EchoTarget) -> CoherenceCurve {
    ensemble_average(spec, target, &time_grid(GridKind::Linear, 0.1, 200).unwrap()).unwrap()
}

fn t2(spec: &SampleSpec, target: &EchoTarget) -> f64 {
    fit_decay(&curve(spec, target), DecayModel::Stretched).unwrap().t2
}

#[test]
fn ct_t2_rises_then_saturates() {
    let target = ct_target();
    let widths = [0.0, 1e3, 1e4, 5e4, 1e5, 1e6];
    let t: Vec<f64> = widths.iter().map(|&w| t2(&spec(w, 400), &target)).collect();
    // Common random numbers make the sequence monotone up to fit noise.
    for w in t.windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 1e-3), "{t:?}");
    }
    assert!(t[0] < 0.7 * t[3], "{t:?}");
    assert!((t[5] / t[3] - 1.0).abs() < 0.03, "{t:?}");
}

#[test]
fn coherence_bounded_and_stderr_scales() {
    let target = ct_target();
    let small = curve(&spec(1e4, 250), &target);
    let large = curve(&spec(1e4, 1000), &target);
    assert_eq!(small.mean[0], 1.0);
    assert!(large.mean.iter().all(|m| m.abs() <= 1.0));
    // Compare where the spread is well developed.
    let k = large.mean.iter().position(|&m| m < 0.4).unwrap();
    let ratio = small.stderr[k] / large.stderr[k];
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{ratio}");
}

#[test]
fn shell_radius_is_converged() {
    let target = ct_target();
    let base = spec(5e4, 600);
    let r = base.outer_radius();
    let wide = SampleSpec {
        shell: Shell::Radius(2.0 * r),
        ..base.clone()
    };
    let (a, b) = (t2(&base, &target), t2(&wide, &target));
    assert!((b / a - 1.0).abs() < 0.02, "{a} {b}");
}
