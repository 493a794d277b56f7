//! Scenario configuration, the end-to-end pipeline, property evaluation,
//! sweeps and state persistence.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acontraction::{CoupledSystem, DiagnosticsRecord, SimState, TickChecks};
use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::nsf_solver::{make_initial_data, ComponentWeights, Field, Grid, Perturbation, SolverConfig};
use crate::par;
use crate::profiles::{CompositeWave, ProfileOptions};
use crate::riemann::{build_pattern, Amplitudes, ContactOrientation, WavePattern};

/// Environment variable naming the directory that relative output paths
/// are resolved against.
pub const OUTPUT_ROOT_ENV: &str = "NSFLAB_OUTPUT_ROOT";

/// Largest admissible deviation at the margin nodes.
pub const CONTAMINATION_LIMIT: f64 = 1e-6;
/// Allowed transient growth of the weighted relative entropy.
pub const ENTROPY_SLACK: f64 = 0.2;
/// Largest admissible observed constant of the integrated bound.
pub const BOUND_CONSTANT_LIMIT: f64 = 50.0;
/// Final shift speed allowed, relative to its running maximum.
pub const SHIFT_DECAY_FRACTION: f64 = 0.2;

/// Perturbation of the initial composite wave. The bump center is moved by a
/// seeded uniform draw from `[-center_jitter, center_jitter]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    pub center: f64,
    #[serde(default)]
    pub center_jitter: f64,
    pub width: f64,
    pub weights: ComponentWeights,
}

impl PerturbationSpec {
    pub fn none() -> Self {
        let p = Perturbation::none();
        PerturbationSpec {
            amplitude: 0.0,
            center: p.center,
            center_jitter: 0.0,
            width: p.width,
            weights: p.weights,
        }
    }

    /// The concrete perturbation for `seed`.
    pub fn realize(&self, seed: u64) -> Perturbation {
        let mut center = self.center;
        if self.center_jitter > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            center += rng.gen_range(-self.center_jitter..=self.center_jitter);
        }
        Perturbation {
            amplitude: self.amplitude,
            center,
            width: self.width,
            weights: self.weights,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub gas: GasParams,
    pub right_state: ThermoState,
    pub amplitudes: Amplitudes,
    #[serde(default)]
    pub contact_orientation: ContactOrientation,
    pub grid: Grid,
    #[serde(default)]
    pub solver: SolverConfig,
    pub perturbation: PerturbationSpec,
    pub t_end: f64,
    /// Diagnostics are recorded every this many steps, and at `t_end`.
    pub output_every: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    /// Reference gas and right state, `delta1 = delta3 = 0.1`,
    /// `deltaC = 0.05`, a bump of size `1e-2` in all three fields at the
    /// origin, 2048 nodes on `[-150, 150]`, `t_end = 20`.
    pub fn reference() -> Self {
        ScenarioConfig {
            id: "reference".into(),
            gas: GasParams::reference(),
            right_state: ThermoState::new(1.0, 0.0, 1.0).expect("valid state"),
            amplitudes: Amplitudes::new(0.1, 0.05, 0.1),
            contact_orientation: ContactOrientation::Expanding,
            grid: Grid::new(-150.0, 150.0, 2048).expect("valid grid"),
            solver: SolverConfig::default(),
            perturbation: PerturbationSpec {
                amplitude: 1e-2,
                center: 0.0,
                center_jitter: 0.0,
                width: 5.0,
                weights: ComponentWeights {
                    v: 1.0,
                    u: 1.0,
                    theta: 1.0,
                },
            },
            t_end: 20.0,
            output_every: 50,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let id_ok = !self.id.is_empty()
            && self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '='));
        if !id_ok {
            return Err(Error::Config(format!(
                "id {:?} must be non-empty and use only [A-Za-z0-9_.=-]",
                self.id
            )));
        }
        let a = &self.amplitudes;
        for (name, d) in [("delta1", a.delta1), ("deltaC", a.delta_c), ("delta3", a.delta3)] {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Config(format!("{name} = {d} must be nonnegative")));
            }
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.output_every < 1 {
            return Err(Error::Config("output_every must be at least 1".into()));
        }
        let p = &self.perturbation;
        if !(p.center_jitter.is_finite() && p.center_jitter >= 0.0) {
            return Err(Error::Config("center_jitter must be nonnegative".into()));
        }
        self.solver.validate()?;
        p.realize(self.seed).validate()?;
        Ok(())
    }

    /// The output directory with [`OUTPUT_ROOT_ENV`] applied.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if self.output_dir.is_absolute() {
            return self.output_dir.clone();
        }
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => PathBuf::from(root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }

    pub fn diagnostics_path(&self) -> PathBuf {
        self.resolved_output_dir().join(format!("{}_diagnostics.csv", self.id))
    }

    pub fn report_path(&self) -> PathBuf {
        self.resolved_output_dir().join(format!("{}_report.json", self.id))
    }
}

/// Everything a finished run produced, before any file is written.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub pattern: WavePattern,
    pub records: Vec<DiagnosticsRecord>,
    pub checks: Vec<TickChecks>,
    /// Weight extremes over every accepted step.
    pub a_range: (f64, f64),
    /// Smallest `v` and `theta` over the recorded states.
    pub min_v: f64,
    pub min_theta: f64,
    pub steps: usize,
    pub final_state: SimState,
}

/// Builds the pattern and the composite wave of a configuration.
pub fn build_wave(cfg: &ScenarioConfig) -> Result<CompositeWave> {
    let pattern = build_pattern(&cfg.right_state, cfg.amplitudes, cfg.contact_orientation, &cfg.gas)
        .map_err(|e| e.at("riemann pattern"))?;
    CompositeWave::new(&pattern, &cfg.gas, ProfileOptions::default()).map_err(|e| e.at("profiles"))
}

/// Runs the coupled evolution and records diagnostics; writes nothing.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Simulation> {
    cfg.validate().map_err(|e| e.at("config"))?;
    let wave = build_wave(cfg)?;
    let exec = cfg.solver.exec;
    let pert = cfg.perturbation.realize(cfg.seed);
    let field = make_initial_data(&wave, &cfg.grid, &pert, exec).map_err(|e| e.at("initial data"))?;
    let sys = CoupledSystem::new(&wave, cfg.solver).map_err(|e| e.at("coupled run"))?;
    let mut st = sys.start(field);

    let mut sim = Simulation {
        pattern: *wave.pattern(),
        records: Vec::new(),
        checks: Vec::new(),
        a_range: (f64::INFINITY, f64::NEG_INFINITY),
        min_v: f64::INFINITY,
        min_theta: f64::INFINITY,
        steps: 0,
        final_state: st.clone(),
    };
    let record = |sim: &mut Simulation, st: &SimState| -> Result<()> {
        let (rec, chk) = sys.diagnostics(st).map_err(|e| e.at("diagnostics"))?;
        sim.a_range = (sim.a_range.0.min(chk.a_min), sim.a_range.1.max(chk.a_max));
        sim.min_v = st.field.v().iter().cloned().fold(sim.min_v, f64::min);
        sim.min_theta = st.field.theta().iter().cloned().fold(sim.min_theta, f64::min);
        sim.records.push(rec);
        sim.checks.push(chk);
        Ok(())
    };
    record(&mut sim, &st)?;
    // stop once the remaining interval is below round-off of t_end
    let eps = 1e-12 * cfg.t_end.max(1.0);
    let mut since = 0;
    while st.field.t() < cfg.t_end - eps {
        let remaining = cfg.t_end - st.field.t();
        let info = sys
            .step_capped(&mut st, remaining)
            .map_err(|e| e.at("coupled run"))?;
        sim.steps += 1;
        since += 1;
        sim.a_range = (sim.a_range.0.min(info.a_range.0), sim.a_range.1.max(info.a_range.1));
        let done = st.field.t() >= cfg.t_end - eps;
        if since == cfg.output_every || done {
            record(&mut sim, &st)?;
            since = 0;
        }
    }
    sim.final_state = st;
    Ok(sim)
}

/// Properties evaluated on every run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    WeightBounds,
    CutoffPartition,
    ShiftLocality,
    WaveSeparation,
    ShiftSublinearity,
    EntropyDecay,
    BoundShape,
    BoundaryContamination,
    Positivity,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::WeightBounds,
        Property::CutoffPartition,
        Property::ShiftLocality,
        Property::WaveSeparation,
        Property::ShiftSublinearity,
        Property::EntropyDecay,
        Property::BoundShape,
        Property::BoundaryContamination,
        Property::Positivity,
    ];
}

/// Why a property failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FailReason {
    WeightOutOfRange { min: f64, max: f64 },
    PartitionDefect { t: f64, defect: f64 },
    CutoffOutOfRange { t: f64 },
    FarContributionTooLarge { t: f64, family: u8, value: f64, bound: f64 },
    SeparationBroken { t: f64, family: u8 },
    ShiftNotSettling { family: u8, final_speed: f64, max_speed: f64 },
    ShiftGrowingLinearly { family: u8, t: f64 },
    EntropyNotDecreased { initial: f64, last: f64 },
    EntropyOvershoot { initial: f64, max: f64 },
    BoundConstantTooLarge { k_obs: f64 },
    BoundaryContaminated { t: f64, deviation: f64 },
    NonPositive { min_v: f64, min_theta: f64 },
    NonFiniteDiagnostics { t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub passed: bool,
    /// Passed because the checked quantity is identically zero.
    pub trivial: bool,
    pub failures: Vec<FailReason>,
}

/// Scalar summaries of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub steps: usize,
    pub t_final: f64,
    pub delta0: f64,
    pub e_rel_initial: f64,
    pub e_rel_final: f64,
    pub e_rel_max: f64,
    /// `max_t LHS(t) / (E_rel(0) + sqrt(delta0))` of the integrated bound.
    pub k_obs: f64,
    /// `max_t LHS(t) / E_rel(0)`, without the amplitude term.
    pub k_obs_entropy_only: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub xdot_max: [f64; 2],
    pub xdot_final: [f64; 2],
    pub far_ratio_max: [f64; 2],
    pub contamination_max: f64,
    pub supnorm_initial: f64,
    pub supnorm_final: f64,
    pub min_v: f64,
    pub min_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub id: String,
    pub passed: bool,
    pub properties: Vec<PropertyOutcome>,
    pub metrics: RunMetrics,
    pub final_diagnostics: DiagnosticsRecord,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn outcome(&self, p: Property) -> &PropertyOutcome {
        self.properties
            .iter()
            .find(|o| o.property == p)
            .expect("every property is evaluated")
    }
}

fn outcome(property: Property, trivial: bool, failures: Vec<FailReason>) -> PropertyOutcome {
    PropertyOutcome {
        property,
        passed: failures.is_empty(),
        trivial: trivial && failures.is_empty(),
        failures,
    }
}

/// Evaluates every [`Property`] on a finished simulation.
pub fn evaluate(cfg: &ScenarioConfig, wave_far_bound: [f64; 2], sim: &Simulation) -> (Vec<PropertyOutcome>, RunMetrics) {
    let recs = &sim.records;
    let chks = &sim.checks;
    let pat = &sim.pattern;
    let delta = [pat.delta1, pat.delta3];
    let sigma = [pat.sigma1, pat.sigma3];
    let first = recs.first().copied().unwrap_or_default();
    let last = recs.last().copied().unwrap_or_default();
    let mut m = RunMetrics {
        steps: sim.steps,
        t_final: last.t,
        delta0: pat.amplitudes().total(),
        e_rel_initial: first.e_rel,
        e_rel_final: last.e_rel,
        a_min: sim.a_range.0,
        a_max: sim.a_range.1,
        supnorm_initial: first.supnorm,
        supnorm_final: last.supnorm,
        min_v: sim.min_v,
        min_theta: sim.min_theta,
        xdot_final: [last.xdot1.abs(), last.xdot3.abs()],
        ..Default::default()
    };
    let mut out = Vec::with_capacity(Property::ALL.len());

    let (lo, hi) = sim.a_range;
    let mut f = Vec::new();
    if !(lo >= 0.5 && hi <= 1.5) {
        f.push(FailReason::WeightOutOfRange { min: lo, max: hi });
    }
    out.push(outcome(Property::WeightBounds, delta == [0.0, 0.0], f));

    let mut f = Vec::new();
    for (r, c) in recs.iter().zip(chks) {
        if c.partition_defect != 0.0 {
            f.push(FailReason::PartitionDefect {
                t: r.t,
                defect: c.partition_defect,
            });
        }
        if !c.phi_in_range {
            f.push(FailReason::CutoffOutOfRange { t: r.t });
        }
    }
    out.push(outcome(Property::CutoffPartition, false, f));

    let mut f = Vec::new();
    for (r, c) in recs.iter().zip(chks) {
        for (k, factor) in wave_far_bound.iter().enumerate() {
            let bound = factor * c.far_scale[k] * (1.0 + 1e-9) + 1e-14;
            if bound > 0.0 {
                m.far_ratio_max[k] = m.far_ratio_max[k].max(c.far[k].abs() / bound);
            }
            if c.far[k].abs() > bound {
                f.push(FailReason::FarContributionTooLarge {
                    t: r.t,
                    family: if k == 0 { 1 } else { 3 },
                    value: c.far[k],
                    bound,
                });
            }
        }
    }
    let trivial = chks.iter().all(|c| c.far == [0.0, 0.0]);
    out.push(outcome(Property::ShiftLocality, trivial, f));

    let mut f = Vec::new();
    for r in recs.iter().filter(|r| r.t > 0.0) {
        let (t, s1, s3) = (r.t, sigma[0], sigma[1]);
        if !(r.x1 + s1 * t <= 0.5 * s1 * t && 0.5 * s1 * t < 0.0) {
            f.push(FailReason::SeparationBroken { t, family: 1 });
        }
        if !(0.0 < 0.5 * s3 * t && 0.5 * s3 * t <= r.x3 + s3 * t) {
            f.push(FailReason::SeparationBroken { t, family: 3 });
        }
    }
    out.push(outcome(Property::WaveSeparation, false, f));

    let mut f = Vec::new();
    let speeds = |r: &DiagnosticsRecord| [r.xdot1.abs(), r.xdot3.abs()];
    let shifts = |r: &DiagnosticsRecord| [r.x1.abs(), r.x3.abs()];
    for r in recs {
        let s = speeds(r);
        m.xdot_max = [m.xdot_max[0].max(s[0]), m.xdot_max[1].max(s[1])];
    }
    for k in 0..2 {
        let family = if k == 0 { 1 } else { 3 };
        if m.xdot_max[k] > 0.0 && m.xdot_final[k] > SHIFT_DECAY_FRACTION * m.xdot_max[k] {
            f.push(FailReason::ShiftNotSettling {
                family,
                final_speed: m.xdot_final[k],
                max_speed: m.xdot_max[k],
            });
        }
        let half: Vec<&DiagnosticsRecord> = recs.iter().filter(|r| r.t >= 0.5 * m.t_final && r.t > 0.0).collect();
        for w in half.windows(2) {
            let (a, b) = (shifts(w[0])[k] / w[0].t, shifts(w[1])[k] / w[1].t);
            if b > a * (1.0 + 1e-12) {
                f.push(FailReason::ShiftGrowingLinearly { family, t: w[1].t });
                break;
            }
        }
    }
    out.push(outcome(Property::ShiftSublinearity, m.xdot_max == [0.0, 0.0], f));

    let mut f = Vec::new();
    m.e_rel_max = recs.iter().map(|r| r.e_rel).fold(0.0, f64::max);
    let e0 = first.e_rel;
    let trivial = m.e_rel_max == 0.0;
    if !trivial {
        if !(last.e_rel < e0) {
            f.push(FailReason::EntropyNotDecreased {
                initial: e0,
                last: last.e_rel,
            });
        }
        if m.e_rel_max > e0 * (1.0 + ENTROPY_SLACK) {
            f.push(FailReason::EntropyOvershoot {
                initial: e0,
                max: m.e_rel_max,
            });
        }
    }
    out.push(outcome(Property::EntropyDecay, trivial, f));

    let mut f = Vec::new();
    let rate = |r: &DiagnosticsRecord| {
        delta[0] * r.xdot1 * r.xdot1 + delta[1] * r.xdot3 * r.xdot3 + r.g1s + r.g3s + r.du1 + r.dth1
    };
    let mut integral = 0.0;
    let mut lhs_max = first.e_rel;
    for w in recs.windows(2) {
        integral += 0.5 * (w[1].t - w[0].t) * (rate(&w[0]) + rate(&w[1]));
        lhs_max = lhs_max.max(w[1].e_rel + integral);
    }
    let denom = e0 + m.delta0.sqrt();
    m.k_obs = if denom > 0.0 { lhs_max / denom } else { 0.0 };
    m.k_obs_entropy_only = if e0 > 0.0 { lhs_max / e0 } else { 0.0 };
    let trivial = lhs_max == 0.0;
    if !(m.k_obs <= BOUND_CONSTANT_LIMIT) {
        f.push(FailReason::BoundConstantTooLarge { k_obs: m.k_obs });
    }
    out.push(outcome(Property::BoundShape, trivial, f));

    let mut f = Vec::new();
    for (r, c) in recs.iter().zip(chks) {
        m.contamination_max = m.contamination_max.max(c.contamination);
        if c.contamination > CONTAMINATION_LIMIT {
            f.push(FailReason::BoundaryContaminated {
                t: r.t,
                deviation: c.contamination,
            });
        }
    }
    out.push(outcome(Property::BoundaryContamination, false, f));

    let mut f = Vec::new();
    let floor = cfg.solver.positivity_floor;
    if !(sim.min_v > floor && sim.min_theta > floor) {
        f.push(FailReason::NonPositive {
            min_v: sim.min_v,
            min_theta: sim.min_theta,
        });
    }
    if let Some(r) = recs.iter().find(|r| !r.is_finite()) {
        f.push(FailReason::NonFiniteDiagnostics { t: r.t });
    }
    out.push(outcome(Property::Positivity, false, f));

    (out, m)
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Diagnostics rows in the fixed column order.
pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(DiagnosticsRecord::COLUMNS).map_err(csv_err)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// Runs a scenario, writes its diagnostics CSV and report JSON, and returns
/// the report. On error nothing is written.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    let sim = simulate(cfg)?;
    let wave = build_wave(cfg)?;
    let sys = CoupledSystem::new(&wave, cfg.solver)?;
    let (properties, metrics) = evaluate(cfg, sys.far_bound_factor(), &sim);
    let csv_path = cfg.diagnostics_path();
    let report_path = cfg.report_path();
    let report = RunReport {
        id: cfg.id.clone(),
        passed: properties.iter().all(|p| p.passed),
        properties,
        metrics,
        final_diagnostics: sim.records.last().copied().unwrap_or_default(),
        files: vec![csv_path.clone(), report_path.clone()],
    };
    let bytes = diagnostics_csv(&sim.records).map_err(|e| e.at("output"))?;
    write_atomic(&csv_path, &bytes).map_err(|e| e.at("output"))?;
    let json = serde_json::to_vec_pretty(&report)?;
    write_atomic(&report_path, &json).map_err(|e| e.at("output"))?;
    Ok(report)
}

/// Sets the scalar at dotted `axis` (e.g. `perturbation.amplitude`).
pub fn with_axis_value(base: &ScenarioConfig, axis: &str, value: f64) -> Result<ScenarioConfig> {
    let mut doc = serde_json::to_value(base)?;
    let mut node = &mut doc;
    for key in axis.split('.') {
        node = node
            .get_mut(key)
            .ok_or_else(|| Error::Config(format!("sweep axis {axis:?}: no field {key:?}")))?;
    }
    if !node.is_number() {
        return Err(Error::Config(format!("sweep axis {axis:?} is not a scalar number")));
    }
    *node = if node.is_u64() && value >= 0.0 && value.fract() == 0.0 {
        serde_json::Value::from(value as u64)
    } else {
        serde_json::Value::from(value)
    };
    let cfg: ScenarioConfig = serde_json::from_value(doc)?;
    cfg.validate()?;
    Ok(cfg)
}

/// One row of a sweep summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub id: String,
    pub value: f64,
    pub passed: bool,
    pub error: String,
    pub e_rel_initial: f64,
    pub e_rel_final: f64,
    pub k_obs: f64,
    pub xdot1_max: f64,
    pub xdot3_max: f64,
    pub supnorm_final: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub reports: Vec<Option<RunReport>>,
    pub summary_path: PathBuf,
}

/// Runs `base` once per value of `axis`, in parallel, and writes a summary
/// CSV. Per-run failures are recorded in their row.
pub fn sweep(base: &ScenarioConfig, axis: &str, values: &[f64]) -> Result<SweepOutcome> {
    base.validate()?;
    // reject a bad axis before any run
    with_axis_value(base, axis, lookup_axis(base, axis)?)?;
    let jobs: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    let results = par::map_slice(base.solver.exec, &jobs, |&(k, value)| {
        let id = format!("{}_{}_{k}", base.id, axis.replace('.', "-"));
        let run = with_axis_value(base, axis, value).and_then(|mut cfg| {
            cfg.id = id.clone();
            run_scenario(&cfg)
        });
        (id, value, run)
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    for (id, value, run) in results {
        match run {
            Ok(rep) => {
                let m = rep.metrics;
                rows.push(SweepRow {
                    id,
                    value,
                    passed: rep.passed,
                    error: String::new(),
                    e_rel_initial: m.e_rel_initial,
                    e_rel_final: m.e_rel_final,
                    k_obs: m.k_obs,
                    xdot1_max: m.xdot_max[0],
                    xdot3_max: m.xdot_max[1],
                    supnorm_final: m.supnorm_final,
                });
                reports.push(Some(rep));
            }
            Err(e) => {
                rows.push(SweepRow {
                    id,
                    value,
                    passed: false,
                    error: e.to_string(),
                    e_rel_initial: f64::NAN,
                    e_rel_final: f64::NAN,
                    k_obs: f64::NAN,
                    xdot1_max: f64::NAN,
                    xdot3_max: f64::NAN,
                    supnorm_final: f64::NAN,
                });
                reports.push(None);
            }
        }
    }
    let summary_path = base
        .resolved_output_dir()
        .join(format!("{}_sweep_{}.csv", base.id, axis.replace('.', "-")));
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "id",
            "value",
            "passed",
            "error",
            "e_rel_initial",
            "e_rel_final",
            "k_obs",
            "xdot1_max",
            "xdot3_max",
            "supnorm_final",
        ])
        .map_err(csv_err)?;
    }
    for r in &rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    write_atomic(&summary_path, &bytes).map_err(|e| e.at("output"))?;
    Ok(SweepOutcome {
        rows,
        reports,
        summary_path,
    })
}

fn lookup_axis(base: &ScenarioConfig, axis: &str) -> Result<f64> {
    let doc = serde_json::to_value(base)?;
    let mut node = &doc;
    for key in axis.split('.') {
        node = node
            .get(key)
            .ok_or_else(|| Error::Config(format!("sweep axis {axis:?}: no field {key:?}")))?;
    }
    node.as_f64()
        .ok_or_else(|| Error::Config(format!("sweep axis {axis:?} is not a scalar number")))
}

const STATE_MAGIC: &[u8; 8] = b"NSFSTATE";
/// Layout version written by [`export_state`].
pub const STATE_VERSION: u32 = 1;

/// Writes `f` as: magic, version (u32), x_min, x_max (f64), n (u64), t (f64),
/// then `v`, `u`, `theta` as little-endian f64 arrays.
pub fn export_state(f: &Field, path: &Path) -> Result<()> {
    let g = f.grid();
    let n = g.n();
    let mut buf = Vec::with_capacity(44 + 24 * n);
    buf.extend_from_slice(STATE_MAGIC);
    buf.extend_from_slice(&STATE_VERSION.to_le_bytes());
    buf.extend_from_slice(&g.x_min().to_le_bytes());
    buf.extend_from_slice(&g.x_max().to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&f.t().to_le_bytes());
    for arr in [f.v(), f.u(), f.theta()] {
        for x in arr {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    write_atomic(path, &buf)
}

/// Reads a file written by [`export_state`].
pub fn import_state(path: &Path) -> Result<Field> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_state(&bytes)
}

/// As [`import_state`], rejecting files whose grid differs from `expected`.
pub fn import_state_on(path: &Path, expected: &Grid) -> Result<Field> {
    let f = import_state(path)?;
    if f.grid() != expected {
        return Err(Error::StateFormat(format!(
            "grid mismatch: file has {:?}, expected {:?}",
            f.grid(),
            expected
        )));
    }
    Ok(f)
}

fn decode_state(bytes: &[u8]) -> Result<Field> {
    let mut pos = 0usize;
    let mut take = |k: usize| -> Result<&[u8]> {
        let s = bytes
            .get(pos..pos + k)
            .ok_or_else(|| Error::StateFormat(format!("truncated at byte {pos}")))?;
        pos += k;
        Ok(s)
    };
    if take(8)? != STATE_MAGIC {
        return Err(Error::StateFormat("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
    if version != STATE_VERSION {
        return Err(Error::StateVersion {
            found: version,
            expected: STATE_VERSION,
        });
    }
    let rd = |s: &[u8]| f64::from_le_bytes(s.try_into().expect("8 bytes"));
    let x_min = rd(take(8)?);
    let x_max = rd(take(8)?);
    let n = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let t = rd(take(8)?);
    let n = usize::try_from(n).map_err(|_| Error::StateFormat(format!("node count {n} too large")))?;
    let need = n
        .checked_mul(24)
        .ok_or_else(|| Error::StateFormat(format!("node count {n} too large")))?;
    let body = take(need)?;
    let grid = Grid::new(x_min, x_max, n).map_err(|e| Error::StateFormat(e.to_string()))?;
    let arr = |k: usize| -> Vec<f64> { body[8 * n * k..8 * n * (k + 1)].chunks_exact(8).map(rd).collect() };
    let (v, u, th) = (arr(0), arr(1), arr(2));
    if take(1).is_ok() {
        return Err(Error::StateFormat("trailing bytes".into()));
    }
    Field::new(grid, t, v, u, th).map_err(|e| Error::StateFormat(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: &str) -> ScenarioConfig {
        let mut c = ScenarioConfig::reference();
        c.id = id.into();
        c.grid = Grid::new(-60.0, 60.0, 256).unwrap();
        c.t_end = 0.5;
        c.output_every = 10;
        c
    }

    #[test]
    fn reference_config_round_trips_through_json() {
        let c = ScenarioConfig::reference();
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut doc = serde_json::to_value(ScenarioConfig::reference()).unwrap();
        doc["extra"] = serde_json::Value::from(1);
        assert!(ScenarioConfig::from_json(&doc.to_string()).is_err());
        let mut doc = serde_json::to_value(ScenarioConfig::reference()).unwrap();
        doc["grid"]["dx"] = serde_json::Value::from(1);
        assert!(ScenarioConfig::from_json(&doc.to_string()).is_err());
    }

    #[test]
    fn output_cadence_must_be_positive() {
        let mut c = ScenarioConfig::reference();
        c.output_every = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn jitter_is_seeded() {
        let mut p = ScenarioConfig::reference().perturbation;
        p.center_jitter = 3.0;
        assert_eq!(p.realize(7), p.realize(7));
        assert_ne!(p.realize(7).center, p.realize(8).center);
        assert!(p.realize(7).center.abs() <= 3.0);
    }

    #[test]
    fn axis_lookup() {
        let c = ScenarioConfig::reference();
        let d = with_axis_value(&c, "perturbation.amplitude", 1e-3).unwrap();
        assert_eq!(d.perturbation.amplitude, 1e-3);
        let d = with_axis_value(&c, "grid.n", 512.0).unwrap();
        assert_eq!(d.grid.n(), 512);
        assert!(with_axis_value(&c, "perturbation.nope", 1.0).is_err());
        assert!(with_axis_value(&c, "id", 1.0).is_err());
        assert!(with_axis_value(&c, "grid.n", 3.0).is_err());
    }

    #[test]
    fn every_property_once() {
        let sim = simulate(&small("p")).unwrap();
        let wave = build_wave(&small("p")).unwrap();
        let sys = CoupledSystem::new(&wave, SolverConfig::default()).unwrap();
        let (props, _) = evaluate(&small("p"), sys.far_bound_factor(), &sim);
        for p in Property::ALL {
            assert_eq!(props.iter().filter(|o| o.property == p).count(), 1);
        }
    }

    #[test]
    fn cadence_includes_final_time() {
        let c = small("c");
        let sim = simulate(&c).unwrap();
        assert_eq!(sim.records[0].t, 0.0);
        assert_eq!(sim.records.last().unwrap().t, c.t_end);
        let per = sim.steps.div_ceil(c.output_every);
        assert_eq!(sim.records.len(), per + 1);
    }

    #[test]
    fn state_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(-1.0, 2.0, 17).unwrap();
        let n = grid.n();
        let f = Field::new(
            grid,
            0.3,
            (0..n).map(|i| 1.0 + 0.1 * i as f64).collect(),
            (0..n).map(|i| (i as f64).sin()).collect(),
            (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect(),
        )
        .unwrap();
        let p = dir.path().join("s.bin");
        export_state(&f, &p).unwrap();
        assert_eq!(import_state(&p).unwrap(), f);
        let other = Grid::new(-1.0, 2.0, 18).unwrap();
        assert!(matches!(import_state_on(&p, &other), Err(Error::StateFormat(_))));

        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(import_state(&p), Err(Error::StateFormat(_))));

        let mut bad = bytes.clone();
        bad[8..12].copy_from_slice(&7u32.to_le_bytes());
        fs::write(&p, &bad).unwrap();
        let err = import_state(&p).unwrap_err();
        assert!(matches!(err, Error::StateVersion { found: 7, expected: 1 }));
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('1'));
    }
}
