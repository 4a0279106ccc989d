use serde_json::{json, Value};

use clockbath::bath::{
    ensemble_average, estimate_overhauser_width, fit_decay, heuristic_t2, time_grid, CoherenceCurve, DecayFit,
    EchoTarget, SampleSpec, FIT_FLOOR,
};
use clockbath::field_points::{ct_fields, drp_fields, linear_grid, scan_table, to_gauss};
use clockbath::pair_echo::DetuningMode;
use clockbath::spin::eigensystem;
use clockbath::units::{hz_to_rad, rad_to_hz};
use clockbath::DonorSpecies;

use crate::config::{Config, TMax};
use crate::error::Result;
use crate::output::{float, opt_float, OutDir};

/// First probe time of the automatic time window, s.
pub const AUTO_START: f64 = 1e-4;
/// Realizations used by the automatic time-window probe.
pub const AUTO_PROBE: usize = 128;
/// Window used when the probe never decays, s.
pub const AUTO_FALLBACK: f64 = 1.0;
const AUTO_DOUBLINGS: usize = 40;
const AUTO_MARGIN: f64 = 1.5;

/// Time window reaching below the fit floor, from a doubling search on the
/// first realizations of the ensemble.
pub fn auto_t_max(spec: &SampleSpec, target: &EchoTarget) -> Result<f64> {
    let probe = SampleSpec {
        n_realizations: spec.n_realizations.min(AUTO_PROBE),
        ..spec.clone()
    };
    let mut t = AUTO_START;
    for _ in 0..AUTO_DOUBLINGS {
        if ensemble_average(&probe, target, &[0.0, t])?.mean[1] < FIT_FLOOR {
            return Ok(AUTO_MARGIN * t);
        }
        t *= 2.0;
    }
    Ok(AUTO_FALLBACK)
}

fn curve(config: &Config, spec: &SampleSpec, target: &EchoTarget) -> Result<CoherenceCurve> {
    let t_max = match config.time.t_max_s {
        TMax::Seconds(t) => t,
        TMax::Auto(_) => auto_t_max(spec, target)?,
    };
    let times = time_grid(config.time.grid, t_max, config.time.n_time)?;
    Ok(ensemble_average(spec, target, &times)?)
}

fn fit_json(fit: &std::result::Result<DecayFit, clockbath::Error>) -> Value {
    match fit {
        Ok(f) => json!({ "T2_s": f.t2, "stretch_n": f.stretch_n, "rmse": f.rmse, "fit_points": f.points }),
        Err(e) => json!({
            "T2_s": null, "stretch_n": null, "rmse": null,
            "error": { "code": e.code(), "message": e.to_string() },
        }),
    }
}

pub fn run_decay(config: &Config, seed: u64, out: &mut OutDir) -> Result<Value> {
    let species = config.species()?;
    let line = config.line(&species)?;
    let field = config.working_field(&species, &line)?;
    let spec = config.sample_spec(seed)?;
    let target = EchoTarget::new(&species, line, field)?;
    let c = curve(config, &spec, &target)?;
    out.csv(
        "decay_curve.csv",
        &["t_s", "coherence_mean", "coherence_stderr"],
        (0..c.times.len()).map(|k| vec![float(c.times[k]), float(c.mean[k]), float(c.stderr[k])]),
    )?;
    let mut summary = fit_json(&fit_decay(&c, config.fit.model));
    summary["seed"] = json!(seed);
    summary["B_T"] = json!(field);
    summary["n_realizations"] = json!(c.n_used);
    summary["t_max_s"] = json!(c.times.last());
    out.json("decay_summary.json", &summary)?;
    Ok(summary)
}

fn sweep_point(config: &Config, spec: &SampleSpec, target: &EchoTarget) -> Result<(f64, f64)> {
    let c = curve(config, spec, target)?;
    Ok(match fit_decay(&c, config.fit.model) {
        Ok(f) => (f.t2, f.stretch_n),
        Err(_) => (f64::NAN, f64::NAN),
    })
}

pub fn run_detuning_sweep(config: &Config, seed: u64, out: &mut OutDir) -> Result<Value> {
    let species = config.species()?;
    let line = config.line(&species)?;
    let ct = config.ct_field(&species, &line)?;
    let high = config.high_field();
    let base = config.sample_spec(seed)?;
    let ct_target = EchoTarget::new(&species, line, ct)?;
    let high_target = EchoTarget::new(&species, line, high)?;
    let perturbed = config.sweep.perturbed_branch;

    let mut header = vec!["w_OH_Hz", "T2_ct_s", "n_ct", "T2_high_s", "n_high"];
    if perturbed {
        header.extend(["T2_ct_perturbed_s", "n_ct_perturbed"]);
    }
    let mut rows = Vec::new();
    let (mut best_ct, mut high_sum, mut high_count) = (f64::NAN, 0.0, 0usize);
    for &w in &config.sweep.overhauser_halfwidths_Hz {
        let spec = SampleSpec {
            overhauser_halfwidth: hz_to_rad(w),
            ..base.clone()
        };
        spec.validate()?;
        let (t_ct, n_ct) = sweep_point(config, &spec, &ct_target)?;
        let (t_hi, n_hi) = sweep_point(config, &spec, &high_target)?;
        let mut row = vec![float(w), float(t_ct), float(n_ct), float(t_hi), float(n_hi)];
        if perturbed {
            let spec = SampleSpec {
                detuning_mode: DetuningMode::Perturbed,
                ..spec
            };
            let (t, n) = sweep_point(config, &spec, &ct_target)?;
            row.extend([float(t), float(n)]);
        }
        rows.push(row);
        best_ct = best_ct.max(t_ct);
        if t_hi.is_finite() {
            high_sum += t_hi;
            high_count += 1;
        }
    }
    out.csv("detuning_sweep.csv", &header, rows)?;
    let high_mean = if high_count > 0 { high_sum / high_count as f64 } else { f64::NAN };
    let ratio = best_ct / high_mean;
    Ok(json!({
        "B_ct_T": ct,
        "B_high_T": high,
        "points": config.sweep.overhauser_halfwidths_Hz.len(),
        "max_T2_ct_s": finite(best_ct),
        "mean_T2_high_s": finite(high_mean),
        "plateau_to_high_ratio": finite(ratio),
        "seed": seed,
    }))
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn run_field_scan(config: &Config, out: &mut OutDir) -> Result<Value> {
    let species = config.species()?;
    let (lo, hi) = config.scan_range()?;
    let labels = &config.scan.lines;
    let lines = labels
        .iter()
        .map(|&[u, d]| config.line_for(&species, u, d))
        .collect::<Result<Vec<_>>>()?;
    let grid = linear_grid(lo, hi, config.scan.n_points);

    let table = scan_table(&species, &lines, &grid)?;
    let n_lines = lines.len();
    out.csv(
        "field_scan.csv",
        &["B_T", "line_u", "line_d", "phi", "P_u", "P_d", "freq_Hz"],
        table.iter().enumerate().map(|(k, r)| {
            let [u, d] = labels[k % n_lines];
            vec![float(r.field), u.to_string(), d.to_string(), float(r.phi), float(r.p_u), float(r.p_d), float(r.frequency_hz)]
        }),
    )?;

    let mut points = Vec::new();
    for (&[u, d], line) in labels.iter().zip(&lines) {
        for p in ct_fields(&species, line, lo, hi)?.into_iter().chain(drp_fields(&species, line, lo, hi)?) {
            points.push((u, d, p));
        }
    }
    out.csv(
        "field_points.csv",
        &["kind", "line_u", "line_d", "B_T", "B_G", "residual", "oracle_fidelity"],
        points.iter().map(|(u, d, p)| {
            let kind = match p.kind {
                clockbath::field_points::FieldPointKind::Ct => "CT",
                clockbath::field_points::FieldPointKind::Drp => "DRP",
            };
            vec![
                kind.to_string(),
                u.to_string(),
                d.to_string(),
                float(p.field),
                float(to_gauss(p.field)),
                float(p.residual),
                opt_float(p.oracle_fidelity),
            ]
        }),
    )?;

    let mut level_rows = Vec::new();
    for &b in &grid {
        for l in eigensystem(&species, b)?.levels() {
            level_rows.push(vec![
                float(b),
                l.index.to_string(),
                l.id.two_m.to_string(),
                format!("{:?}", l.id.branch).to_lowercase(),
                float(rad_to_hz(l.energy)),
                float(l.polarization),
            ]);
        }
    }
    out.csv(
        "levels.csv",
        &["B_T", "level", "two_m", "branch", "energy_Hz", "polarization"],
        level_rows,
    )?;

    Ok(json!({
        "lines": n_lines,
        "grid_points": grid.len(),
        "points": points.iter().map(|(u, d, p)| json!({
            "kind": p.kind, "line_u": u, "line_d": d, "B_T": p.field,
            "residual": p.residual, "oracle_fidelity": p.oracle_fidelity,
        })).collect::<Vec<_>>(),
    }))
}

fn labeled(value: Option<f64>, unit: &str, formula: &str) -> Value {
    json!({ "value": value, "unit": unit, "formula": formula })
}

pub fn heuristics_json(config: &Config, species: &DonorSpecies, seed: u64) -> Result<Value> {
    let line = config.line(species)?;
    let spec = config.sample_spec(seed)?;
    let fraction = spec.resonant_fraction_for(species);
    let h = heuristic_t2(species, &line, spec.density, fraction)?;
    let mut v = json!({
        "density_m3": spec.density,
        "resonant_fraction": fraction,
        "line": [config.line.u, config.line.d],
        "B_ct_T": h.ct_field,
        "n_res": labeled(Some(h.n_res), "m^-3", "resonant_fraction * density"),
        "R_bar": labeled(Some(h.r_bar), "m", "(4 pi / 3) n_res R_bar^3 = 1"),
        "J_mean": labeled(Some(rad_to_hz(h.j_mean)), "Hz", "alpha / (2 R_bar^3) / 2pi, alpha = mu0/(4 pi) gamma_e^2 hbar"),
        "T2_M": labeled(Some(h.t2_m), "s", "12 / (pi alpha n_res)"),
        "enhancement": labeled(
            h.enhancement,
            "1",
            "(P_u(inf) - P_d(inf))^2 / [(1 + P_u(B_ct)) (1 - P_d(B_ct)) / 2]",
        ),
        "T2_ID": labeled(h.t2_id, "s", "T2_M / enhancement"),
    });
    if let Some(si) = config.heuristics.si29_halfwidth_Hz {
        let field = h.ct_field.unwrap_or_else(|| config.high_field());
        let w = estimate_overhauser_width(&spec, species, field, hz_to_rad(si))?;
        v["overhauser_halfwidth"] = labeled(
            Some(rad_to_hz(w)),
            "Hz",
            "median |sum_k J_k P_k / 2| / 2pi over realizations + si29_halfwidth",
        );
    }
    Ok(v)
}

pub fn run_heuristics(config: &Config, seed: u64, out: &mut OutDir) -> Result<Value> {
    let species = config.species()?;
    let v = heuristics_json(config, &species, seed)?;
    out.json("heuristics.json", &v)?;
    Ok(v)
}
