use std::collections::HashSet;
use std::fs;
use std::path::Path;

use nsflab::acontraction::DiagnosticsRecord;
use nsflab::lab::{self, run_scenario, simulate, sweep, PerturbationSpec, Property, ScenarioConfig};
use nsflab::nsf_solver::{make_initial_data, Grid};
use nsflab::par::Exec;
use nsflab::riemann::Amplitudes;
use nsflab::Error;

fn small(id: &str, dir: &Path) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::reference();
    cfg.id = id.into();
    cfg.grid = Grid::new(-100.0, 100.0, 1024).unwrap();
    cfg.t_end = 1.0;
    cfg.output_every = 20;
    cfg.output_dir = dir.to_path_buf();
    cfg
}

#[test]
fn zero_amplitude_run_passes_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("flat", dir.path());
    cfg.amplitudes = Amplitudes::new(0.0, 0.0, 0.0);
    cfg.perturbation = PerturbationSpec::none();
    let rep = run_scenario(&cfg).unwrap();
    assert!(rep.passed);
    for p in [Property::WeightBounds, Property::ShiftSublinearity, Property::EntropyDecay, Property::BoundShape] {
        assert!(rep.outcome(p).trivial, "{p:?}");
    }
    let d = rep.final_diagnostics;
    for (name, x) in DiagnosticsRecord::COLUMNS.iter().zip(d.values()).skip(1) {
        assert!(x.abs() < 1e-12, "{name} = {x}");
    }
}

#[test]
fn report_lists_every_property_once_and_files_exist() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("complete", dir.path());
    let rep = run_scenario(&cfg).unwrap();
    let seen: HashSet<Property> = rep.properties.iter().map(|o| o.property).collect();
    assert_eq!(rep.properties.len(), Property::ALL.len());
    assert_eq!(seen.len(), Property::ALL.len());
    for f in &rep.files {
        assert!(f.exists(), "{}", f.display());
    }
    let csv = fs::read_to_string(cfg.diagnostics_path()).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, DiagnosticsRecord::COLUMNS.join(","));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(cfg.report_path()).unwrap()).unwrap();
    assert_eq!(json["properties"].as_array().unwrap().len(), Property::ALL.len());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut ca = small("det", a.path());
    ca.perturbation.center_jitter = 3.0;
    ca.seed = 42;
    let mut cb = ca.clone();
    cb.output_dir = b.path().to_path_buf();
    run_scenario(&ca).unwrap();
    run_scenario(&cb).unwrap();
    assert_eq!(fs::read(ca.diagnostics_path()).unwrap(), fs::read(cb.diagnostics_path()).unwrap());

    let mut cc = ca.clone();
    cc.seed = 43;
    let other = simulate(&cc).unwrap();
    let same = simulate(&ca).unwrap();
    assert_ne!(other.records[0].e_rel, same.records[0].e_rel);
}

#[test]
fn positivity_break_is_a_clean_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("broken", dir.path());
    cfg.perturbation.amplitude = -1.5;
    let err = run_scenario(&cfg).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("initial data"), "{msg}");
    assert!(matches!(err.root(), Error::PositivityLoss { .. }), "{err:?}");
    assert!(!cfg.diagnostics_path().exists());
    assert!(!cfg.report_path().exists());
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("empty", dir.path());
    let out = sweep(&cfg, "perturbation.amplitude", &[]).unwrap();
    assert!(out.rows.is_empty());
    let text = fs::read_to_string(&out.summary_path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("id,value,passed,error"));
}

#[test]
fn unknown_sweep_axis_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("axis", dir.path());
    assert!(sweep(&cfg, "perturbation.nope", &[1.0]).is_err());
    assert!(sweep(&cfg, "id", &[1.0]).is_err());
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn entropy_scales_quadratically_with_the_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("quad", dir.path());
    // isolate the perturbation from the composite wave
    cfg.amplitudes = Amplitudes::new(0.0, 0.0, 0.0);
    cfg.t_end = 0.1;
    let out = sweep(&cfg, "perturbation.amplitude", &[1e-3, 1e-2]).unwrap();
    let e: Vec<f64> = out.rows.iter().map(|r| r.e_rel_initial).collect();
    let ratio = e[1] / e[0];
    assert!((ratio - 100.0).abs() <= 20.0, "ratio {ratio}");

    let mut cfg = small("quad_wave", dir.path());
    cfg.t_end = 0.1;
    let out = sweep(&cfg, "perturbation.amplitude", &[1e-3, 1e-2]).unwrap();
    let ratio = out.rows[1].e_rel_initial / out.rows[0].e_rel_initial;
    assert!((ratio - 100.0).abs() <= 20.0, "ratio on the wave {ratio}");
    assert_eq!(fs::read_to_string(&out.summary_path).unwrap().lines().count(), 3);
}

#[test]
fn sweep_records_per_run_errors_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("mixed", dir.path());
    let out = sweep(&cfg, "perturbation.amplitude", &[1e-3, -1.5]).unwrap();
    assert!(out.rows[0].error.is_empty());
    assert!(!out.rows[1].error.is_empty());
    assert!(out.reports[1].is_none());
}

#[test]
fn unperturbed_composite_stays_amplitude_close() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("bare", dir.path());
    cfg.grid = Grid::new(-150.0, 150.0, 1024).unwrap();
    cfg.perturbation = PerturbationSpec::none();
    cfg.t_end = 20.0;
    let sim = simulate(&cfg).unwrap();
    let delta0 = cfg.amplitudes.total();
    let worst = sim.records.iter().map(|r| r.supnorm).fold(0.0, f64::max);
    assert!(worst <= delta0, "sup deviation {worst} vs delta0 {delta0}");
}

#[test]
fn doubling_the_domain_leaves_diagnostics_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = small("dom", dir.path());
    a.grid = Grid::new(-60.0, 60.0, 801).unwrap();
    a.t_end = 3.0;
    let mut b = a.clone();
    // same spacing on twice the interval
    b.grid = Grid::new(-120.0, 120.0, 1601).unwrap();
    let (sa, sb) = (simulate(&a).unwrap(), simulate(&b).unwrap());
    assert_eq!(sa.steps, sb.steps);
    let (ra, rb) = (sa.records.last().unwrap(), sb.records.last().unwrap());
    for (name, (x, y)) in DiagnosticsRecord::COLUMNS.iter().zip(ra.values().iter().zip(rb.values())) {
        assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{name}: {x} vs {y}");
    }
    let fa = &sa.final_state.field;
    let fb = &sb.final_state.field;
    let off = 400;
    // middle half of the smaller domain
    let dev = (200..601)
        .map(|i| (fa.v()[i] - fb.v()[i + off]).abs().max((fa.theta()[i] - fb.theta()[i + off]).abs()))
        .fold(0.0, f64::max);
    assert!(dev <= 1e-6, "interior deviation {dev}");
}

#[test]
fn initial_data_mass_matches_composite() {
    let cfg = ScenarioConfig::reference();
    let wave = lab::build_wave(&cfg).unwrap();
    let pert = cfg.perturbation.realize(0);
    let f = make_initial_data(&wave, &cfg.grid, &pert, Exec::Sequential).unwrap();
    let bare = wave.sample(0.0, 0.0, 0.0, &cfg.grid, Exec::Sequential).unwrap();
    let dx = cfg.grid.dx();
    let added: f64 = f.v().iter().zip(bare.v()).map(|(a, b)| a - b).sum::<f64>() * dx;
    let expected: f64 = cfg.grid.nodes().iter().map(|&x| pert.profile(x)).sum::<f64>() * dx;
    assert!((added - expected).abs() < 1e-13, "{added} vs {expected}");
}
