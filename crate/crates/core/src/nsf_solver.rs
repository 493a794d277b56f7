//! Method-of-lines integrator for the Lagrangian NSF system
//!
//! ```text
//! v_t = u_x
//! u_t = -p_x + (mu u_x / v)_x
//! E_t = -(p u)_x + (kappa theta_x / v)_x + (mu u u_x / v)_x
//! ```
//!
//! on a truncated line with constant far-field ghost states. Fluxes live on
//! half nodes, so interior sums of `(v, u, E)` change only through the two
//! boundary fluxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::par::{self, Exec};
use crate::profiles::CompositeWave;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawGrid")]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        Grid::new(r.x_min, r.x_max, r.n)
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < 16 {
            return Err(Error::InvalidGrid(format!("need at least 16 nodes, got {n}")));
        }
        Ok(Grid { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n).map(|i| self.x_min + dx * i as f64).collect()
    }

    /// Number of nodes in each outer 5% margin (at least one).
    pub fn margin(&self) -> usize {
        ((self.n as f64 * 0.05).floor() as usize).max(1)
    }
}

/// Specific volume, velocity and temperature on a grid at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    t: f64,
    v: Vec<f64>,
    u: Vec<f64>,
    theta: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, t: f64, v: Vec<f64>, u: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if v.len() != grid.n() || u.len() != grid.n() || theta.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "array lengths ({}, {}, {}) do not match {} nodes",
                v.len(),
                u.len(),
                theta.len(),
                grid.n()
            )));
        }
        for i in 0..grid.n() {
            if !(v[i] > 0.0 && theta[i] > 0.0 && u[i].is_finite() && v[i].is_finite() && theta[i].is_finite()) {
                return Err(Error::NonPhysicalState {
                    v: v[i],
                    theta: theta[i],
                });
            }
        }
        Ok(Field { grid, t, v, u, theta })
    }

    /// A constant field.
    pub fn uniform(grid: Grid, t: f64, s: &ThermoState) -> Self {
        let n = grid.n();
        Field {
            grid,
            t,
            v: vec![s.v(); n],
            u: vec![s.u(); n],
            theta: vec![s.theta(); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn total_energy(&self, g: &GasParams) -> Vec<f64> {
        self.u.iter().zip(&self.theta).map(|(&u, &th)| g.total_energy(u, th)).collect()
    }

    /// Builds a field from conservative variables without validation.
    fn from_conserved(grid: Grid, t: f64, q: Conserved, g: &GasParams) -> Self {
        let theta = q
            .e
            .iter()
            .zip(&q.u)
            .map(|(&e, &u)| g.temperature_from_energy(e, u))
            .collect();
        Field {
            grid,
            t,
            v: q.v,
            u: q.u,
            theta,
        }
    }

    fn conserved(&self, g: &GasParams) -> Conserved {
        Conserved {
            v: self.v.clone(),
            u: self.u.clone(),
            e: self.total_energy(g),
        }
    }
}

/// Far-field Dirichlet states used as ghost values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub left: ThermoState,
    pub right: ThermoState,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Smallest admissible `v` and `theta`.
    pub positivity_floor: f64,
    /// Overrides the CFL time step.
    pub fixed_dt: Option<f64>,
    pub exec: Exec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.4,
            positivity_floor: 1e-10,
            fixed_dt: None,
            exec: Exec::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidConfig(format!("cfl = {} must lie in (0, 1)", self.cfl)));
        }
        if !(self.positivity_floor >= 0.0) {
            return Err(Error::InvalidConfig("positivity_floor must be nonnegative".into()));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidConfig(format!("fixed_dt = {dt} must be positive")));
            }
        }
        Ok(())
    }
}

/// Time derivatives of the conservative variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Conserved {
    v: Vec<f64>,
    u: Vec<f64>,
    e: Vec<f64>,
}

#[inline]
fn state_at(f: &Field, bc: &FarField, i: isize) -> (f64, f64, f64) {
    if i < 0 {
        (bc.left.v(), bc.left.u(), bc.left.theta())
    } else if i as usize >= f.v.len() {
        (bc.right.v(), bc.right.u(), bc.right.theta())
    } else {
        let i = i as usize;
        (f.v[i], f.u[i], f.theta[i])
    }
}

/// Flux between two neighbouring states.
#[inline]
fn flux(a: (f64, f64, f64), b: (f64, f64, f64), dx: f64, g: &GasParams) -> [f64; 3] {
    let (va, ua, ta) = a;
    let (vb, ub, tb) = b;
    let pa = g.r * ta / va;
    let pb = g.r * tb / vb;
    let vm = 0.5 * (va + vb);
    let um = 0.5 * (ua + ub);
    let ux = (ub - ua) / dx;
    let tx = (tb - ta) / dx;
    [
        um,
        -0.5 * (pa + pb) + g.mu * ux / vm,
        -0.5 * (pa * ua + pb * ub) + g.kappa * tx / vm + g.mu * um * ux / vm,
    ]
}

/// Fluxes at the `n + 1` half nodes, the first between the left ghost and node 0.
fn half_node_fluxes(f: &Field, g: &GasParams, bc: &FarField, exec: Exec) -> Vec<[f64; 3]> {
    let dx = f.grid.dx();
    par::map_range(exec, f.v.len() + 1, |k| {
        let k = k as isize;
        flux(state_at(f, bc, k - 1), state_at(f, bc, k), dx, g)
    })
}

/// Semi-discrete right-hand side `(v_t, u_t, E_t)`.
pub fn nsf_rhs(f: &Field, g: &GasParams, bc: &FarField, exec: Exec) -> Rhs {
    let fl = half_node_fluxes(f, g, bc, exec);
    let dx = f.grid.dx();
    let d = |c: usize| -> Vec<f64> { (0..f.v.len()).map(|i| (fl[i + 1][c] - fl[i][c]) / dx).collect() };
    Rhs {
        v: d(0),
        u: d(1),
        e: d(2),
    }
}

/// Fluxes through the left and right boundary faces; the interior sum of
/// each conservative variable changes at rate `(right - left) / dx * dx`.
pub fn boundary_fluxes(f: &Field, g: &GasParams, bc: &FarField) -> ([f64; 3], [f64; 3]) {
    let dx = f.grid.dx();
    let n = f.v.len() as isize;
    (
        flux(state_at(f, bc, -1), state_at(f, bc, 0), dx, g),
        flux(state_at(f, bc, n - 1), state_at(f, bc, n), dx, g),
    )
}

/// CFL time step: `cfl * min(dx / max c, dx^2 min v / (2 max(mu, kappa (gamma-1)/R)))`.
pub fn stable_dt(f: &Field, g: &GasParams, cfg: &SolverConfig) -> f64 {
    if let Some(dt) = cfg.fixed_dt {
        return dt;
    }
    let dx = f.grid.dx();
    let mut c_max = 0.0f64;
    let mut v_min = f64::INFINITY;
    for i in 0..f.v.len() {
        c_max = c_max.max(g.sound_speed(f.v[i], f.theta[i]));
        v_min = v_min.min(f.v[i]);
    }
    let nu = g.mu.max(g.kappa * (g.gamma - 1.0) / g.r);
    cfg.cfl * (dx / c_max).min(dx * dx * v_min / (2.0 * nu))
}

fn euler(q: &Conserved, r: &Rhs, dt: f64) -> Conserved {
    let ax = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + dt * y).collect();
    Conserved {
        v: ax(&q.v, &r.v),
        u: ax(&q.u, &r.u),
        e: ax(&q.e, &r.e),
    }
}

fn average(a: &Conserved, b: &Conserved) -> Conserved {
    let av = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect();
    Conserved {
        v: av(&a.v, &b.v),
        u: av(&a.u, &b.u),
        e: av(&a.e, &b.e),
    }
}

/// Errors with the first node where `v` or `theta` fell below the floor.
pub fn check_positivity(f: &Field, floor: f64) -> Result<()> {
    for i in 0..f.v.len() {
        let (v, th) = (f.v[i], f.theta[i]);
        if !(v > floor && th > floor) || !f.u[i].is_finite() {
            return Err(Error::PositivityLoss {
                node: i,
                x: f.grid.x(i),
                t: f.t,
                v,
                theta: th,
            });
        }
    }
    Ok(())
}

/// First SSP-RK2 stage: `U + dt L(U)`.
pub(crate) fn stage_one(f: &Field, g: &GasParams, bc: &FarField, dt: f64, exec: Exec) -> Field {
    let q0 = f.conserved(g);
    let q1 = euler(&q0, &nsf_rhs(f, g, bc, exec), dt);
    Field::from_conserved(f.grid, f.t + dt, q1, g)
}

/// Second SSP-RK2 stage: `(U + (U1 + dt L(U1))) / 2`.
pub(crate) fn stage_two(f: &Field, f1: &Field, g: &GasParams, bc: &FarField, dt: f64, exec: Exec) -> Field {
    let q0 = f.conserved(g);
    let q2 = euler(&f1.conserved(g), &nsf_rhs(f1, g, bc, exec), dt);
    Field::from_conserved(f.grid, f.t + dt, average(&q0, &q2), g)
}

/// One SSP-RK2 step; returns the step taken.
pub fn step(f: &mut Field, g: &GasParams, bc: &FarField, cfg: &SolverConfig) -> Result<f64> {
    let dt = stable_dt(f, g, cfg);
    let f1 = stage_one(f, g, bc, dt, cfg.exec);
    check_positivity(&f1, cfg.positivity_floor)?;
    let f2 = stage_two(f, &f1, g, bc, dt, cfg.exec);
    check_positivity(&f2, cfg.positivity_floor)?;
    *f = f2;
    Ok(dt)
}

/// Largest deviation from the far-field states over the outer 5% margins.
pub fn boundary_contamination(f: &Field, bc: &FarField) -> f64 {
    let m = f.grid.margin();
    let n = f.v.len();
    let dev = |i: usize, s: &ThermoState| -> f64 {
        (f.v[i] - s.v())
            .abs()
            .max((f.u[i] - s.u()).abs())
            .max((f.theta[i] - s.theta()).abs())
    };
    let l = (0..m).map(|i| dev(i, &bc.left)).fold(0.0, f64::max);
    let r = (n - m..n).map(|i| dev(i, &bc.right)).fold(0.0, f64::max);
    l.max(r)
}

/// Per-component weights of the initial bump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentWeights {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

/// Compactly supported smooth perturbation `amplitude * w_k * b((x - center)/width)`,
/// `b(s) = exp(1 - 1/(1 - s^2))` on `|s| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub weights: ComponentWeights,
}

impl Perturbation {
    pub fn none() -> Self {
        Perturbation {
            amplitude: 0.0,
            center: 0.0,
            width: 1.0,
            weights: ComponentWeights {
                v: 0.0,
                u: 0.0,
                theta: 0.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidConfig(format!("perturbation width {} must be positive", self.width)));
        }
        if !(self.amplitude.is_finite() && self.center.is_finite()) {
            return Err(Error::InvalidConfig("perturbation amplitude and center must be finite".into()));
        }
        Ok(())
    }

    /// Bump value at `x` (before component weights).
    #[inline]
    pub fn profile(&self, x: f64) -> f64 {
        self.amplitude * bump((x - self.center) / self.width)
    }
}

/// `exp(1 - 1/(1 - s^2))` for `|s| < 1`, zero elsewhere.
#[inline]
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// The composite wave at `t = 0` with zero shifts, plus the perturbation.
pub fn make_initial_data(wave: &CompositeWave, grid: &Grid, pert: &Perturbation, exec: Exec) -> Result<Field> {
    pert.validate()?;
    let nodes = wave.sample_nodes(0.0, 0.0, 0.0, &grid.nodes(), exec);
    let w = pert.weights;
    let mut v = Vec::with_capacity(nodes.len());
    let mut u = Vec::with_capacity(nodes.len());
    let mut th = Vec::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        let b = pert.profile(grid.x(i));
        v.push(n.v + w.v * b);
        u.push(n.u + w.u * b);
        th.push(n.theta + w.theta * b);
    }
    let f = Field {
        grid: *grid,
        t: 0.0,
        v,
        u,
        theta: th,
    };
    check_positivity(&f, 0.0)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_bc() -> FarField {
        let s = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        FarField { left: s, right: s }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 0.0, 100).is_err());
        assert!(Grid::new(0.0, 1.0, 15).is_err());
        let g = Grid::new(0.0, 1.0, 11).err().unwrap();
        assert!(matches!(g, Error::InvalidGrid(_)));
        let g = Grid::new(-1.0, 1.0, 21).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!(serde_json::from_str::<Grid>(r#"{"x_min":0,"x_max":1,"n":20,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<Grid>(r#"{"x_min":2,"x_max":1,"n":20}"#).is_err());
    }

    #[test]
    fn constant_state_has_zero_rhs_and_is_preserved() {
        let gas = GasParams::reference();
        let bc = reference_bc();
        let grid = Grid::new(-5.0, 5.0, 64).unwrap();
        let mut f = Field::uniform(grid, 0.0, &bc.left);
        let r = nsf_rhs(&f, &gas, &bc, Exec::Sequential);
        assert!(r.v.iter().chain(&r.u).chain(&r.e).all(|x| *x == 0.0));
        let before = f.clone();
        step(&mut f, &gas, &bc, &SolverConfig::default()).unwrap();
        assert_eq!(f.v(), before.v());
        assert_eq!(f.u(), before.u());
        assert_eq!(f.theta(), before.theta());
    }

    #[test]
    fn policies_give_identical_steps() {
        let gas = GasParams::reference();
        let bc = reference_bc();
        let grid = Grid::new(-5.0, 5.0, 700).unwrap();
        let xs = grid.nodes();
        let f = Field::new(
            grid,
            0.0,
            xs.iter().map(|x| 1.0 + 0.1 * (-x * x).exp()).collect(),
            xs.iter().map(|x| 0.05 * (-x * x).exp()).collect(),
            vec![1.0; xs.len()],
        )
        .unwrap();
        let mut a = f.clone();
        let mut b = f;
        let cfg = SolverConfig::default();
        step(&mut a, &gas, &bc, &SolverConfig { exec: Exec::Sequential, ..cfg }).unwrap();
        step(&mut b, &gas, &bc, &SolverConfig { exec: Exec::Parallel, ..cfg }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positivity_loss_reports_node() {
        let grid = Grid::new(-1.0, 1.0, 32).unwrap();
        let mut th = vec![1.0; 32];
        th[10] = 1e-12;
        let f = Field::new(grid, 0.5, vec![1.0; 32], vec![0.0; 32], th).unwrap();
        match check_positivity(&f, 1e-10) {
            Err(Error::PositivityLoss { node, t, .. }) => {
                assert_eq!(node, 10);
                assert_eq!(t, 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert!(bump(0.5) > 0.0 && bump(0.5) < 1.0);
    }
}
