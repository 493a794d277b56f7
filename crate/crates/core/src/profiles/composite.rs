//! Superposition of the shifted shock profiles and the contact wave.

use super::contact::{solve_contact_wave, ContactOptions, ContactWave};
use super::shock::{solve_shock_profile, ShockProfile, ShockProfileOptions};
use crate::error::{Error, Result};
use crate::gas::GasParams;
use crate::nsf_solver::{Field, Grid};
use crate::par::{self, Exec};
use crate::riemann::WavePattern;

#[derive(Clone, Copy, Debug, Default)]
pub struct ProfileOptions {
    pub shock: ShockProfileOptions,
    pub contact: ContactOptions,
}

/// Contact-wave fields and the derivatives used by the diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContactNode {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub vx: f64,
    pub ux: f64,
    pub thx: f64,
    pub uxx: f64,
    pub ut: f64,
}

/// One grid node of the composite wave: the assembled state and the
/// per-wave values with first derivatives (`[v, u, theta, v', u', theta']`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompositeNode {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub shock1: [f64; 6],
    pub shock3: [f64; 6],
    pub contact: ContactNode,
}

impl CompositeNode {
    pub fn vx(&self) -> f64 {
        self.shock1[3] + self.contact.vx + self.shock3[3]
    }

    pub fn ux(&self) -> f64 {
        self.shock1[4] + self.contact.ux + self.shock3[4]
    }

    pub fn thx(&self) -> f64 {
        self.shock1[5] + self.contact.thx + self.shock3[5]
    }
}

/// The three waves of a pattern, ready for sampling.
#[derive(Clone, Debug)]
pub struct CompositeWave {
    pattern: WavePattern,
    gas: GasParams,
    shock1: Option<ShockProfile>,
    shock3: Option<ShockProfile>,
    contact: ContactWave,
}

impl CompositeWave {
    /// Builds the profiles of every non-degenerate wave of `pattern`.
    pub fn new(pattern: &WavePattern, g: &GasParams, opts: ProfileOptions) -> Result<Self> {
        let shock1 = if pattern.delta1 > 0.0 {
            Some(solve_shock_profile(&pattern.shock1(), g, opts.shock).map_err(|e| e.at("shock profile 1"))?)
        } else {
            None
        };
        let shock3 = if pattern.delta3 > 0.0 {
            Some(solve_shock_profile(&pattern.shock3(), g, opts.shock).map_err(|e| e.at("shock profile 3"))?)
        } else {
            None
        };
        let ml = &pattern.mid_left;
        let mr = &pattern.mid_right;
        let contact = solve_contact_wave(ml.theta(), mr.theta(), pattern.p_star(g), ml.u(), g, opts.contact)
            .map_err(|e| e.at("contact wave"))?;
        Ok(CompositeWave {
            pattern: *pattern,
            gas: *g,
            shock1,
            shock3,
            contact,
        })
    }

    pub fn pattern(&self) -> &WavePattern {
        &self.pattern
    }

    pub fn gas(&self) -> &GasParams {
        &self.gas
    }

    pub fn shock1(&self) -> Option<&ShockProfile> {
        self.shock1.as_ref()
    }

    pub fn shock3(&self) -> Option<&ShockProfile> {
        self.shock3.as_ref()
    }

    pub fn contact(&self) -> &ContactWave {
        &self.contact
    }

    fn shock_at(p: Option<&ShockProfile>, flat: (f64, f64, f64), xi: f64) -> [f64; 6] {
        match p {
            Some(p) => p.eval_with_derivs(xi),
            None => [flat.0, flat.1, flat.2, 0.0, 0.0, 0.0],
        }
    }

    /// Contact fields at `(t, x)`.
    #[inline]
    pub fn contact_at(&self, t: f64, x: f64) -> ContactNode {
        let g = &self.gas;
        let c = &self.contact;
        let ps = c.p_star();
        let s = (1.0 + t).sqrt();
        let xi = x / s;
        let pt = c.eval(xi);
        let cu = (g.gamma - 1.0) * g.kappa / (g.r * g.gamma);
        ContactNode {
            v: g.r * pt.theta / ps,
            u: c.u_star() + cu * pt.q / s,
            theta: pt.theta,
            vx: g.r * pt.dtheta / (ps * s),
            ux: cu * pt.dq / (s * s),
            thx: pt.dtheta / s,
            uxx: cu * pt.d2q / (s * s * s),
            ut: -0.5 * cu * (pt.q + xi * pt.dq) / (s * s * s),
        }
    }

    /// The composite wave at one point.
    #[inline]
    pub fn node(&self, x1: f64, x3: f64, t: f64, x: f64) -> CompositeNode {
        let pat = &self.pattern;
        let ml = &pat.mid_left;
        let mr = &pat.mid_right;
        let s1 = Self::shock_at(
            self.shock1.as_ref(),
            (ml.v(), ml.u(), ml.theta()),
            x - pat.sigma1 * t - x1,
        );
        let s3 = Self::shock_at(
            self.shock3.as_ref(),
            (mr.v(), mr.u(), mr.theta()),
            x - pat.sigma3 * t - x3,
        );
        let c = self.contact_at(t, x);
        CompositeNode {
            v: s1[0] + c.v + s3[0] - ml.v() - mr.v(),
            u: s1[1] + c.u + s3[1] - ml.u() - mr.u(),
            theta: s1[2] + c.theta + s3[2] - ml.theta() - mr.theta(),
            shock1: s1,
            shock3: s3,
            contact: c,
        }
    }

    /// Composite nodes at every point of `xs`.
    pub fn sample_nodes(&self, x1: f64, x3: f64, t: f64, xs: &[f64], exec: Exec) -> Vec<CompositeNode> {
        par::map_slice(exec, xs, |&x| self.node(x1, x3, t, x))
    }

    /// The assembled composite field on `grid`.
    pub fn sample(&self, x1: f64, x3: f64, t: f64, grid: &Grid, exec: Exec) -> Result<Field> {
        let nodes = self.sample_nodes(x1, x3, t, &grid.nodes(), exec);
        Field::new(
            *grid,
            t,
            nodes.iter().map(|n| n.v).collect(),
            nodes.iter().map(|n| n.u).collect(),
            nodes.iter().map(|n| n.theta).collect(),
        )
    }
}

/// `(v^D, u^D, theta^D)` of a contact wave on `grid` at time `t`.
pub fn sample_contact_fields(cw: &ContactWave, t: f64, grid: &Grid, g: &GasParams) -> Result<Field> {
    let cu = (g.gamma - 1.0) * g.kappa / (g.r * g.gamma);
    let s = (1.0 + t).sqrt();
    let xs = grid.nodes();
    let mut v = Vec::with_capacity(xs.len());
    let mut u = Vec::with_capacity(xs.len());
    let mut th = Vec::with_capacity(xs.len());
    for x in xs {
        let p = cw.eval(x / s);
        v.push(g.r * p.theta / cw.p_star());
        u.push(cw.u_star() + cu * p.q / s);
        th.push(p.theta);
    }
    Field::new(*grid, t, v, u, th).map_err(|e| match e {
        Error::NonPhysicalState { .. } => Error::ContactFailed("non-physical contact fields".into()),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::ThermoState;
    use crate::riemann::{build_pattern, Amplitudes, ContactOrientation};

    fn wave(d1: f64, dc: f64, d3: f64) -> CompositeWave {
        let g = GasParams::reference();
        let r = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        let pat = build_pattern(&r, Amplitudes::new(d1, dc, d3), ContactOrientation::Expanding, &g).unwrap();
        CompositeWave::new(&pat, &g, Default::default()).unwrap()
    }

    #[test]
    fn zero_amplitudes_give_the_right_state() {
        let w = wave(0.0, 0.0, 0.0);
        let grid = Grid::new(-10.0, 10.0, 33).unwrap();
        let f = w.sample(0.3, -0.2, 1.5, &grid, Exec::Sequential).unwrap();
        for i in 0..grid.n() {
            assert_eq!((f.v()[i], f.u()[i], f.theta()[i]), (1.0, 0.0, 1.0));
        }
    }

    #[test]
    fn far_field_limits() {
        let w = wave(0.1, 0.05, 0.1);
        let pat = *w.pattern();
        let left = w.node(0.0, 0.0, 0.0, -400.0);
        let right = w.node(0.0, 0.0, 0.0, 400.0);
        assert!((left.v - pat.left.v()).abs() < 1e-10);
        assert!((left.theta - pat.left.theta()).abs() < 1e-10);
        assert!((right.v - 1.0).abs() < 1e-10 && (right.u).abs() < 1e-10);
    }

    #[test]
    fn shift_translates_the_first_shock() {
        let w = wave(0.1, 0.05, 0.1);
        let d = 0.731;
        for k in 0..50 {
            let x = -30.0 + k as f64 * 0.61;
            let a = w.node(d, 0.0, 2.0, x).shock1;
            let b = w.node(0.0, 0.0, 2.0, x - d).shock1;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn contact_pressure_is_constant() {
        let w = wave(0.0, 0.05, 0.0);
        let g = GasParams::reference();
        let grid = Grid::new(-20.0, 20.0, 401).unwrap();
        let f = sample_contact_fields(w.contact(), 0.0, &grid, &g).unwrap();
        let ps = w.contact().p_star();
        for i in 0..grid.n() {
            assert!((g.pressure(f.v()[i], f.theta()[i]) - ps).abs() <= 4.0 * f64::EPSILON * ps);
        }
    }

    #[test]
    fn contact_velocity_decays_like_inverse_root_time() {
        let w = wave(0.0, 0.05, 0.0);
        let c = w.contact();
        let xi = 0.4;
        let base = |t: f64| w.contact_at(t, xi * (1.0 + t).sqrt()).u - c.u_star();
        let u0 = base(0.0);
        for t in [3.0f64, 15.0] {
            assert!((base(t) * (1.0 + t).sqrt() - u0).abs() < 1e-12 * u0.abs().max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn contact_derivatives_match_differences() {
        let w = wave(0.0, 0.05, 0.0);
        let (t, h) = (1.7, 1e-5);
        for k in -10..=10 {
            let x = 0.3 * k as f64;
            let c = w.contact_at(t, x);
            let fx = |x: f64| w.contact_at(t, x);
            assert!((c.ux - (fx(x + h).u - fx(x - h).u) / (2.0 * h)).abs() < 1e-7);
            assert!((c.uxx - (fx(x + h).ux - fx(x - h).ux) / (2.0 * h)).abs() < 1e-6);
            assert!((c.vx - (fx(x + h).v - fx(x - h).v) / (2.0 * h)).abs() < 1e-7);
            let ut = (w.contact_at(t + h, x).u - w.contact_at(t - h, x).u) / (2.0 * h);
            assert!((c.ut - ut).abs() < 1e-7);
        }
    }
}
