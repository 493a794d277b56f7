//! Weights, cutoffs, the shift ODEs coupled to the PDE, and the measured
//! stability functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{weighted_relative_entropy_raw, GasParams};
use crate::nsf_solver::{self, check_positivity, FarField, Field, SolverConfig};
use crate::par;
use crate::profiles::{CompositeNode, CompositeWave};
use crate::riemann::WavePattern;

/// Shock shifts and their current velocities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftState {
    pub x1: f64,
    pub x3: f64,
    pub xdot1: f64,
    pub xdot3: f64,
}

/// Amplitudes and anchors of the weight functions
/// `a1 = 1 + (v1 - v_-)/sqrt(delta1)`, `a3 = 1 + (v3 - v^*)/sqrt(delta3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec {
    pub delta1: f64,
    pub delta3: f64,
    pub v_left: f64,
    pub v_mid_right: f64,
}

impl WeightSpec {
    pub fn new(p: &WavePattern) -> Self {
        WeightSpec {
            delta1: p.delta1,
            delta3: p.delta3,
            v_left: p.left.v(),
            v_mid_right: p.mid_right.v(),
        }
    }

    #[inline]
    pub fn a1(&self, v1: f64) -> f64 {
        if self.delta1 > 0.0 {
            1.0 + (v1 - self.v_left) / self.delta1.sqrt()
        } else {
            1.0
        }
    }

    #[inline]
    pub fn a3(&self, v3: f64) -> f64 {
        if self.delta3 > 0.0 {
            1.0 + (v3 - self.v_mid_right) / self.delta3.sqrt()
        } else {
            1.0
        }
    }

    /// `a = a1 + a3 - 1` at one composite node.
    #[inline]
    pub fn combined(&self, n: &CompositeNode) -> f64 {
        self.a1(n.shock1[0]) + self.a3(n.shock3[0]) - 1.0
    }

    /// `a_x` at one composite node.
    #[inline]
    pub fn combined_dx(&self, n: &CompositeNode) -> f64 {
        let mut d = 0.0;
        if self.delta1 > 0.0 {
            d += n.shock1[3] / self.delta1.sqrt();
        }
        if self.delta3 > 0.0 {
            d += n.shock3[3] / self.delta3.sqrt();
        }
        d
    }
}

/// The combined weight on `xs` for the given shifts and time.
pub fn weight_a(wave: &CompositeWave, x1: f64, x3: f64, t: f64, xs: &[f64], exec: par::Exec) -> Vec<f64> {
    let spec = WeightSpec::new(wave.pattern());
    wave.sample_nodes(x1, x3, t, xs, exec).iter().map(|n| spec.combined(n)).collect()
}

/// Breakpoints `((X1 + sigma1 t)/2, (X3 + sigma3 t)/2)` of the cutoffs.
pub fn breakpoints(shifts: &ShiftState, sigma1: f64, sigma3: f64, t: f64) -> (f64, f64) {
    (0.5 * (shifts.x1 + sigma1 * t), 0.5 * (shifts.x3 + sigma3 * t))
}

/// The cutoff pair `(phi1, phi3 = 1 - phi1)` on `xs`.
pub fn cutoffs(
    shifts: &ShiftState,
    sigma1: f64,
    sigma3: f64,
    t: f64,
    xs: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (b1, b3) = breakpoints(shifts, sigma1, sigma3, t);
    if b1 > b3 || (b1 == b3 && t > 0.0) {
        return Err(Error::SeparationViolated { t, left: b1, right: b3 });
    }
    let phi1: Vec<f64> = xs
        .iter()
        .map(|&x| {
            if x <= b1 {
                1.0
            } else if x >= b3 {
                0.0
            } else {
                (b3 - x) / (b3 - b1)
            }
        })
        .collect();
    let phi3 = phi1.iter().map(|p| 1.0 - p).collect();
    Ok((phi1, phi3))
}

/// Gains `M1, M3` of the shift equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftGains {
    pub m1: f64,
    pub m3: f64,
}

impl ShiftGains {
    /// `M = (3/2)(alpha/c^2)(1 + 2 kappa (gamma-1)^2 / (mu R gamma))` with
    /// `alpha = gamma (gamma+1) p / (2 c v^2)` and `c = sqrt(gamma p / v)`,
    /// evaluated at the state left of each shock.
    pub fn new(p: &WavePattern, g: &GasParams) -> Self {
        let gain = |v: f64, theta: f64| -> f64 {
            let pr = g.pressure(v, theta);
            let c = (g.gamma * pr / v).sqrt();
            let alpha = g.gamma * (g.gamma + 1.0) * pr / (2.0 * c * v * v);
            let k = 1.0 + 2.0 * g.kappa * (g.gamma - 1.0).powi(2) / (g.mu * g.r * g.gamma);
            1.5 * alpha / (c * c) * k
        };
        ShiftGains {
            m1: gain(p.left.v(), p.left.theta()),
            m3: gain(p.mid_right.v(), p.mid_right.theta()),
        }
    }
}

/// Shift velocities and the part of each quadrature taken beyond the
/// opposite cutoff breakpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShiftRates {
    pub xdot: [f64; 2],
    /// Contribution to `Xdot1` from `x > b3` and to `Xdot3` from `x < b1`.
    pub far: [f64; 2],
    /// Extremes of the weight over the grid.
    pub a_range: (f64, f64),
}

/// Trapezoidal rule on a uniform grid.
pub fn trapezoid(dx: f64, f: &[f64]) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => dx * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

/// Weighted trapezoid over the nodes satisfying `keep`.
fn trapezoid_masked(dx: f64, f: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let n = f.len();
    let mut s = 0.0;
    for (i, fi) in f.iter().enumerate() {
        if keep(i) {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            s += w * fi;
        }
    }
    dx * s
}

/// Evaluates the shift equations
/// `Xdot_i = -(M_i/delta_i) int a [u_i'(u - ubar) + v_i' (pbar/vbar)(v - vbar)
///           + R/(gamma-1) (theta_i'/thetabar)(theta - thetabar)] dx`.
pub fn shift_rates(
    u: &Field,
    nodes: &[CompositeNode],
    weights: &[f64],
    pattern: &WavePattern,
    gains: &ShiftGains,
    breaks: (f64, f64),
    g: &GasParams,
) -> ShiftRates {
    let grid = u.grid();
    let dx = grid.dx();
    let cr = g.r / (g.gamma - 1.0);
    let integrand = |w: &[f64; 6], i: usize| -> f64 {
        let n = &nodes[i];
        let pv = g.r * n.theta / (n.v * n.v);
        weights[i]
            * (w[4] * (u.u()[i] - n.u) + w[3] * pv * (u.v()[i] - n.v) + cr * (w[5] / n.theta) * (u.theta()[i] - n.theta))
    };
    let mut out = ShiftRates {
        a_range: weights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a))),
        ..Default::default()
    };
    let xs: Vec<f64> = grid.nodes();
    for (k, (delta, m)) in [(pattern.delta1, gains.m1), (pattern.delta3, gains.m3)].into_iter().enumerate() {
        if delta <= 0.0 {
            continue;
        }
        let f: Vec<f64> = (0..nodes.len())
            .map(|i| integrand(if k == 0 { &nodes[i].shock1 } else { &nodes[i].shock3 }, i))
            .collect();
        let total = trapezoid(dx, &f);
        let far = if k == 0 {
            trapezoid_masked(dx, &f, |i| xs[i] > breaks.1)
        } else {
            trapezoid_masked(dx, &f, |i| xs[i] < breaks.0)
        };
        out.xdot[k] = -(m / delta) * total;
        out.far[k] = -(m / delta) * far;
    }
    out
}

/// One recorded row of the stability functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "E_rel")]
    pub e_rel: f64,
    #[serde(rename = "G1S")]
    pub g1s: f64,
    #[serde(rename = "G3S")]
    pub g3s: f64,
    #[serde(rename = "Dv1")]
    pub dv1: f64,
    #[serde(rename = "Du1")]
    pub du1: f64,
    #[serde(rename = "Dth1")]
    pub dth1: f64,
    #[serde(rename = "Du2")]
    pub du2: f64,
    #[serde(rename = "Dth2")]
    pub dth2: f64,
    #[serde(rename = "X1")]
    pub x1: f64,
    #[serde(rename = "X3")]
    pub x3: f64,
    #[serde(rename = "Xdot1")]
    pub xdot1: f64,
    #[serde(rename = "Xdot3")]
    pub xdot3: f64,
    pub supnorm: f64,
    pub h1norm: f64,
    #[serde(rename = "Q1_l2")]
    pub q1_l2: f64,
    #[serde(rename = "Q2_l2")]
    pub q2_l2: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 17] = [
        "t", "E_rel", "G1S", "G3S", "Dv1", "Du1", "Dth1", "Du2", "Dth2", "X1", "X3", "Xdot1", "Xdot3", "supnorm",
        "h1norm", "Q1_l2", "Q2_l2",
    ];

    pub fn values(&self) -> [f64; 17] {
        [
            self.t, self.e_rel, self.g1s, self.g3s, self.dv1, self.du1, self.dth1, self.du2, self.dth2, self.x1,
            self.x3, self.xdot1, self.xdot3, self.supnorm, self.h1norm, self.q1_l2, self.q2_l2,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Centered first difference; one-sided at the ends.
pub fn diff1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (f[1] - f[0]) / dx
            } else if i + 1 == n {
                (f[n - 1] - f[n - 2]) / dx
            } else {
                (f[i + 1] - f[i - 1]) / (2.0 * dx)
            }
        })
        .collect()
}

/// Centered second difference; copied from the neighbour at the ends.
pub fn diff2(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut d: Vec<f64> = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dx * dx);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

fn sq_integral(dx: f64, f: &[f64]) -> f64 {
    let s: Vec<f64> = f.iter().map(|x| x * x).collect();
    trapezoid(dx, &s)
}

/// L2 norms of the residuals `(Q1, Q2)` of the composite wave, split into
/// the interaction and contact parts: `[[Q1^I, Q2^I], [Q1^C, Q2^C], [Q1, Q2]]`.
pub fn residual_norms(nodes: &[CompositeNode], dx: f64, g: &GasParams) -> [[f64; 2]; 3] {
    let n = nodes.len();
    let (mu, kappa, r) = (g.mu, g.kappa, g.r);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut q2_local = Vec::with_capacity(n);
    let mut q1c = Vec::with_capacity(n);
    let mut q2c = Vec::with_capacity(n);
    for nd in nodes {
        let (s1, s3, cw) = (&nd.shock1, &nd.shock3, &nd.contact);
        let pb = r * nd.theta / nd.v;
        let p1 = r * s1[2] / s1[0];
        let p3 = r * s3[2] / s3[0];
        let pc = r * cw.theta / cw.v;
        let (ux, thx) = (nd.ux(), nd.thx());
        a.push(pb - p1 - pc - p3);
        b.push(ux / nd.v - s1[4] / s1[0] - cw.ux / cw.v - s3[4] / s3[0]);
        c.push(thx / nd.v - s1[5] / s1[0] - cw.thx / cw.v - s3[5] / s3[0]);
        let flux = pb * ux - p1 * s1[4] - pc * cw.ux - p3 * s3[4];
        let visc = ux * ux / nd.v - s1[4] * s1[4] / s1[0] - cw.ux * cw.ux / cw.v - s3[4] * s3[4] / s3[0];
        q2_local.push(flux - mu * visc);
        q1c.push(cw.ut - mu * (cw.uxx / cw.v - cw.ux * cw.vx / (cw.v * cw.v)));
        q2c.push(-mu * cw.ux * cw.ux / cw.v);
    }
    let (da, db, dc) = (diff1(&a, dx), diff1(&b, dx), diff1(&c, dx));
    let q1i: Vec<f64> = (0..n).map(|i| da[i] - mu * db[i]).collect();
    let q2i: Vec<f64> = (0..n).map(|i| q2_local[i] - kappa * dc[i]).collect();
    let q1: Vec<f64> = (0..n).map(|i| q1i[i] + q1c[i]).collect();
    let q2: Vec<f64> = (0..n).map(|i| q2i[i] + q2c[i]).collect();
    let l2 = |f: &[f64]| sq_integral(dx, f).sqrt();
    [[l2(&q1i), l2(&q2i)], [l2(&q1c), l2(&q2c)], [l2(&q1), l2(&q2)]]
}

/// Auxiliary per-tick measurements used by the scenario properties.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TickChecks {
    pub a_min: f64,
    pub a_max: f64,
    /// Largest `|phi1 + phi3 - 1|`, and whether `0 <= phi_i <= 1` held.
    pub partition_defect: f64,
    pub phi_in_range: bool,
    pub far: [f64; 2],
    /// Size scale of the far contributions: `max|U - Ubar|` times the
    /// remaining profile variation beyond the opposite breakpoint.
    pub far_scale: [f64; 2],
    pub breaks: (f64, f64),
    pub contamination: f64,
}

/// What one coupled step did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// Weight extremes at the accepted state.
    pub a_range: (f64, f64),
}

/// The Field together with its shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub field: Field,
    pub shifts: ShiftState,
}

/// The PDE and the shift ODEs advanced together.
#[derive(Clone, Debug)]
pub struct CoupledSystem<'a> {
    wave: &'a CompositeWave,
    gas: GasParams,
    bc: FarField,
    spec: WeightSpec,
    gains: ShiftGains,
    cfg: SolverConfig,
}

impl<'a> CoupledSystem<'a> {
    pub fn new(wave: &'a CompositeWave, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let p = wave.pattern();
        Ok(CoupledSystem {
            wave,
            gas: *wave.gas(),
            bc: FarField {
                left: p.left,
                right: p.right,
            },
            spec: WeightSpec::new(p),
            gains: ShiftGains::new(p, wave.gas()),
            cfg,
        })
    }

    pub fn far_field(&self) -> &FarField {
        &self.bc
    }

    pub fn gains(&self) -> &ShiftGains {
        &self.gains
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn rates(&self, f: &Field, x1: f64, x3: f64) -> ShiftRates {
        let p = self.wave.pattern();
        let nodes = self.wave.sample_nodes(x1, x3, f.t(), &f.grid().nodes(), self.cfg.exec);
        let a: Vec<f64> = nodes.iter().map(|n| self.spec.combined(n)).collect();
        let s = ShiftState {
            x1,
            x3,
            ..Default::default()
        };
        let br = breakpoints(&s, p.sigma1, p.sigma3, f.t());
        shift_rates(f, &nodes, &a, p, &self.gains, br, &self.gas)
    }

    /// Wraps a field at zero shifts, with the shift velocities evaluated.
    pub fn start(&self, field: Field) -> SimState {
        let r = self.rates(&field, 0.0, 0.0);
        SimState {
            field,
            shifts: ShiftState {
                x1: 0.0,
                x3: 0.0,
                xdot1: r.xdot[0],
                xdot3: r.xdot[1],
            },
        }
    }

    /// One SSP-RK2 step of the field and the shifts with shared stages.
    pub fn step(&self, st: &mut SimState) -> Result<StepInfo> {
        self.step_capped(st, f64::INFINITY)
    }

    /// As [`step`](Self::step) with the time step limited to `max_dt`.
    pub fn step_capped(&self, st: &mut SimState, max_dt: f64) -> Result<StepInfo> {
        let g = &self.gas;
        let dt = nsf_solver::stable_dt(&st.field, g, &self.cfg).min(max_dt);
        let f0 = &st.field;
        let s0 = st.shifts;
        let f1 = nsf_solver::stage_one(f0, g, &self.bc, dt, self.cfg.exec);
        check_positivity(&f1, self.cfg.positivity_floor)?;
        let x1 = [s0.x1 + dt * s0.xdot1, s0.x3 + dt * s0.xdot3];
        let r1 = self.rates(&f1, x1[0], x1[1]);
        let f2 = nsf_solver::stage_two(f0, &f1, g, &self.bc, dt, self.cfg.exec);
        check_positivity(&f2, self.cfg.positivity_floor)?;
        let x2 = [
            0.5 * (s0.x1 + x1[0] + dt * r1.xdot[0]),
            0.5 * (s0.x3 + x1[1] + dt * r1.xdot[1]),
        ];
        let r2 = self.rates(&f2, x2[0], x2[1]);
        let shifts = ShiftState {
            x1: x2[0],
            x3: x2[1],
            xdot1: r2.xdot[0],
            xdot3: r2.xdot[1],
        };
        let p = self.wave.pattern();
        let (b1, b3) = breakpoints(&shifts, p.sigma1, p.sigma3, f2.t());
        if !(b1 < b3) {
            return Err(Error::SeparationViolated {
                t: f2.t(),
                left: b1,
                right: b3,
            });
        }
        st.field = f2;
        st.shifts = shifts;
        Ok(StepInfo { dt, a_range: r2.a_range })
    }

    /// All functionals at the current state.
    pub fn diagnostics(&self, st: &SimState) -> Result<(DiagnosticsRecord, TickChecks)> {
        let f = &st.field;
        let s = st.shifts;
        let g = &self.gas;
        let p = self.wave.pattern();
        let t = f.t();
        let xs = f.grid().nodes();
        let dx = f.grid().dx();
        let nodes = self.wave.sample_nodes(s.x1, s.x3, t, &xs, self.cfg.exec);
        let a: Vec<f64> = nodes.iter().map(|n| self.spec.combined(n)).collect();
        let (phi1, phi3) = cutoffs(&s, p.sigma1, p.sigma3, t, &xs)?;
        let n = xs.len();

        let dv: Vec<f64> = (0..n).map(|i| f.v()[i] - nodes[i].v).collect();
        let du: Vec<f64> = (0..n).map(|i| f.u()[i] - nodes[i].u).collect();
        let dth: Vec<f64> = (0..n).map(|i| f.theta()[i] - nodes[i].theta).collect();

        let ent: Vec<f64> = par::map_range(self.cfg.exec, n, |i| {
            let nd = &nodes[i];
            a[i] * weighted_relative_entropy_raw(f.v()[i], f.u()[i], f.theta()[i], nd.v, nd.u, nd.theta, g)
        });
        let sq = |i: usize| dv[i] * dv[i] + du[i] * du[i] + dth[i] * dth[i];
        let g1: Vec<f64> = (0..n).map(|i| nodes[i].shock1[3].abs() * phi1[i] * phi1[i] * sq(i)).collect();
        let g3: Vec<f64> = (0..n).map(|i| nodes[i].shock3[3].abs() * phi3[i] * phi3[i] * sq(i)).collect();
        let (dvx, dux, dthx) = (diff1(&dv, dx), diff1(&du, dx), diff1(&dth, dx));
        let (duxx, dthxx) = (diff2(&du, dx), diff2(&dth, dx));

        let supnorm = (0..n)
            .map(|i| dv[i].abs().max(du[i].abs()).max(dth[i].abs()))
            .fold(0.0, f64::max);
        let h1: Vec<f64> = (0..n)
            .map(|i| sq(i) + dvx[i] * dvx[i] + dux[i] * dux[i] + dthx[i] * dthx[i])
            .collect();
        let q = residual_norms(&nodes, dx, g);

        let rec = DiagnosticsRecord {
            t,
            e_rel: trapezoid(dx, &ent),
            g1s: trapezoid(dx, &g1),
            g3s: trapezoid(dx, &g3),
            dv1: sq_integral(dx, &dvx),
            du1: sq_integral(dx, &dux),
            dth1: sq_integral(dx, &dthx),
            du2: sq_integral(dx, &duxx),
            dth2: sq_integral(dx, &dthxx),
            x1: s.x1,
            x3: s.x3,
            xdot1: s.xdot1,
            xdot3: s.xdot3,
            supnorm,
            h1norm: trapezoid(dx, &h1).sqrt(),
            q1_l2: q[2][0],
            q2_l2: q[2][1],
        };

        let breaks = breakpoints(&s, p.sigma1, p.sigma3, t);
        let rates = shift_rates(f, &nodes, &a, p, &self.gains, breaks, g);
        // remaining variation of each profile beyond the opposite breakpoint
        let tail1 = match self.wave.shock1() {
            Some(pr) => (pr.eval(breaks.1 - p.sigma1 * t - s.x1).0 - p.mid_left.v()).abs(),
            None => 0.0,
        };
        let tail3 = match self.wave.shock3() {
            Some(pr) => (pr.eval(breaks.0 - p.sigma3 * t - s.x3).0 - p.mid_right.v()).abs(),
            None => 0.0,
        };
        let checks = TickChecks {
            a_min: a.iter().cloned().fold(f64::INFINITY, f64::min),
            a_max: a.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            partition_defect: (0..n).map(|i| (phi1[i] + phi3[i] - 1.0).abs()).fold(0.0, f64::max),
            phi_in_range: phi1.iter().chain(&phi3).all(|x| (0.0..=1.0).contains(x)),
            far: rates.far,
            far_scale: [supnorm * tail1, supnorm * tail3],
            breaks,
            contamination: nsf_solver::boundary_contamination(f, &self.bc),
        };
        Ok((rec, checks))
    }

    /// Bound on the far contribution to each shift velocity implied by the
    /// integrand: `(M/delta) max|a (...)| * tail * |U - Ubar|`.
    pub fn far_bound_factor(&self) -> [f64; 2] {
        let p = self.wave.pattern();
        let g = &self.gas;
        let cr = g.r / (g.gamma - 1.0);
        let states = [p.left, p.mid_left, p.mid_right, p.right];
        let pv = states.iter().map(|s| s.pressure(g) / s.v()).fold(0.0, f64::max);
        let th_min = states.iter().map(|s| s.theta()).fold(f64::INFINITY, f64::min);
        let k = |sigma: f64, m: f64, d: f64, kt: f64| -> f64 {
            if d > 0.0 {
                1.5 * (m / d) * (sigma.abs() + pv + cr * kt / th_min)
            } else {
                0.0
            }
        };
        let kt = |s: &crate::gas::ThermoState| (g.gamma - 1.0) * s.pressure(g) / g.r * 2.0;
        [
            k(p.sigma1, self.gains.m1, p.delta1, kt(&p.left)),
            k(p.sigma3, self.gains.m3, p.delta3, kt(&p.mid_right)),
        ]
    }
}

/// Both sides of `int_0^1 |f - mean f|^2 <= 1/2 int_0^1 y(1-y) |f'|^2` for the
/// piecewise-linear interpolant of samples on a uniform grid over `[0, 1]`.
/// All integrals are exact for that interpolant.
pub fn poincare_check(f: &[f64]) -> (f64, f64, bool) {
    let n = f.len();
    if n < 2 {
        return (0.0, 0.0, true);
    }
    let h = 1.0 / (n - 1) as f64;
    let base = f[0];
    let mean = base + (0..n - 1).map(|i| 0.5 * h * (f[i] + f[i + 1] - 2.0 * base)).sum::<f64>();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n - 1 {
        let (a, b) = (f[i] - mean, f[i + 1] - mean);
        lhs += h * (a * a + a * b + b * b) / 3.0;
        let slope = (f[i + 1] - f[i]) / h;
        let (y0, y1) = (i as f64 * h, (i + 1) as f64 * h);
        let w = (y1 * y1 - y0 * y0) / 2.0 - (y1 * y1 * y1 - y0 * y0 * y0) / 3.0;
        rhs += 0.5 * slope * slope * w;
    }
    (lhs, rhs, lhs <= rhs * (1.0 + 1e-8) + 1e-12)
}
