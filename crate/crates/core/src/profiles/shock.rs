//! Viscous shock profiles as heteroclinic orbits of the once-integrated
//! traveling-wave system in `(v, theta)`.
//!
//! With `xi = x - sigma t` and `u = u_l - sigma (v - v_l)`:
//!
//! ```text
//! -mu sigma v'/v  = sigma^2 (v - v_l) + p - p_l
//!  kappa theta'/v = -sigma (E - E_l) + p u - p_l u_l - mu u u'/v
//! ```
//!
//! One endpoint is a saddle and the other a node; the orbit is the saddle's
//! one-dimensional manifold, traced from the saddle into the node.

use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};
use crate::interp::UniformTable;
use crate::ode::{self, Tolerances};
use crate::riemann::{Family, ShockPair};

/// Construction controls for [`solve_shock_profile`].
#[derive(Clone, Copy, Debug)]
pub struct ShockProfileOptions {
    /// Residual bound on the returned tabulation.
    pub tol: f64,
    /// Table spacing in the traveling coordinate.
    pub h_tab: f64,
    /// Tail length on each side, in units of the endpoint decay length.
    pub span: f64,
}

impl Default for ShockProfileOptions {
    fn default() -> Self {
        ShockProfileOptions {
            tol: 1e-8,
            h_tab: 0.05,
            span: 30.0,
        }
    }
}

/// The right-hand side of the traveling-wave system for one shock.
#[derive(Clone, Copy, Debug)]
pub(crate) struct WaveOde {
    gas: GasParams,
    sigma: f64,
    v_l: f64,
    u_l: f64,
    p_l: f64,
    e_l: f64,
}

impl WaveOde {
    pub(crate) fn new(pair: &ShockPair, g: &GasParams) -> Self {
        WaveOde {
            gas: *g,
            sigma: pair.sigma,
            v_l: pair.left.v(),
            u_l: pair.left.u(),
            p_l: pair.left.pressure(g),
            e_l: pair.left.total_energy(g),
        }
    }

    #[inline]
    pub(crate) fn velocity(&self, v: f64) -> f64 {
        self.u_l - self.sigma * (v - self.v_l)
    }

    /// `(v', theta')`.
    #[inline]
    pub(crate) fn rhs(&self, v: f64, theta: f64) -> [f64; 2] {
        let g = &self.gas;
        let s = self.sigma;
        let u = self.velocity(v);
        let p = g.r * theta / v;
        let vp = -(v / (g.mu * s)) * (s * s * (v - self.v_l) + p - self.p_l);
        let up = -s * vp;
        let e = g.total_energy(u, theta);
        let thp = (v / g.kappa) * (-s * (e - self.e_l) + p * u - self.p_l * self.u_l - g.mu * u * up / v);
        [vp, thp]
    }

    /// `v''` along a solution, from the analytic partials of the `v'` equation.
    #[inline]
    pub(crate) fn v_second(&self, v: f64, vp: f64, thp: f64) -> f64 {
        let g = &self.gas;
        let s = self.sigma;
        -((s * s * (2.0 * v - self.v_l) - self.p_l) * vp + g.r * thp) / (g.mu * s)
    }

    fn jacobian(&self, v: f64, theta: f64) -> [[f64; 2]; 2] {
        let hv = 1e-6 * v.abs().max(1e-3);
        let ht = 1e-6 * theta.abs().max(1e-3);
        let fvp = self.rhs(v + hv, theta);
        let fvm = self.rhs(v - hv, theta);
        let ftp = self.rhs(v, theta + ht);
        let ftm = self.rhs(v, theta - ht);
        [
            [(fvp[0] - fvm[0]) / (2.0 * hv), (ftp[0] - ftm[0]) / (2.0 * ht)],
            [(fvp[1] - fvm[1]) / (2.0 * hv), (ftp[1] - ftm[1]) / (2.0 * ht)],
        ]
    }
}

#[derive(Clone, Copy, Debug)]
enum FixedPoint {
    /// Eigenvalues of opposite sign: `(lambda, eigvec)` each.
    Saddle {
        unstable: (f64, [f64; 2]),
        stable: (f64, [f64; 2]),
    },
    /// Real eigenvalues of equal sign, sorted by magnitude.
    Node { slow: f64, fast: f64 },
    Other,
}

fn classify(j: [[f64; 2]; 2]) -> FixedPoint {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return FixedPoint::Other;
    }
    let sq = disc.sqrt();
    let (l1, l2) = (0.5 * tr + sq, 0.5 * tr - sq);
    let eigvec = |lam: f64| -> [f64; 2] {
        let a = [j[0][1], lam - j[0][0]];
        let b = [lam - j[1][1], j[1][0]];
        let na = a[0].hypot(a[1]);
        let nb = b[0].hypot(b[1]);
        let e = if na >= nb { a } else { b };
        let n = e[0].hypot(e[1]);
        [e[0] / n, e[1] / n]
    };
    if det < 0.0 {
        FixedPoint::Saddle {
            unstable: (l1, eigvec(l1)),
            stable: (l2, eigvec(l2)),
        }
    } else if det > 0.0 {
        let (slow, fast) = if l1.abs() <= l2.abs() { (l1, l2) } else { (l2, l1) };
        FixedPoint::Node { slow, fast }
    } else {
        FixedPoint::Other
    }
}

/// Exponential approach to an endpoint: `end + w exp(rate (xi - anchor))`.
#[derive(Clone, Copy, Debug)]
struct Tail {
    anchor: f64,
    end: [f64; 2],
    w: [f64; 2],
    rate: f64,
}

impl Tail {
    #[inline]
    fn eval(&self, xi: f64) -> ([f64; 2], f64) {
        let e = (self.rate * (xi - self.anchor)).exp();
        ([self.end[0] + self.w[0] * e, self.end[1] + self.w[1] * e], e)
    }
}

/// Viscous shock profile, phase-fixed by `v(0) = (v_l + v_r)/2`.
///
/// A Hermite table covers the core of the layer; beyond it the linearized
/// tails are evaluated in closed form, so the profile is defined on all of
/// the line.
#[derive(Clone, Debug)]
pub struct ShockProfile {
    family: Family,
    sigma: f64,
    left: ThermoState,
    right: ThermoState,
    ode: WaveOde,
    v_tab: UniformTable,
    theta_tab: UniformTable,
    left_tail: Tail,
    right_tail: Tail,
    /// Extent of the exported tabulation.
    span: (f64, f64),
    residual: f64,
}

impl ShockProfile {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn left(&self) -> &ThermoState {
        &self.left
    }

    pub fn right(&self) -> &ThermoState {
        &self.right
    }

    /// `|v_r - v_l|`.
    pub fn amplitude(&self) -> f64 {
        (self.right.v() - self.left.v()).abs()
    }

    /// Linearized decay rates towards the left and right endpoints.
    pub fn decay_rates(&self) -> (f64, f64) {
        (self.left_tail.rate.abs(), self.right_tail.rate.abs())
    }

    /// Largest ODE residual over the tabulation.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Table spacing.
    pub fn step(&self) -> f64 {
        self.v_tab.step()
    }

    /// Tabulation nodes: the core table extended on both sides in equal steps
    /// to the tail span.
    pub fn xi_grid(&self) -> Vec<f64> {
        let h = self.v_tab.step();
        let x0 = self.v_tab.x0();
        let k_lo = ((x0 - self.span.0) / h).ceil() as i64;
        let k_hi = ((self.span.1 - x0) / h).floor() as i64;
        (-k_lo..=k_hi).map(|k| x0 + h * k as f64).collect()
    }

    pub fn xi_range(&self) -> (f64, f64) {
        self.span
    }

    pub fn v_tab(&self) -> Vec<f64> {
        self.xi_grid().into_iter().map(|xi| self.eval(xi).0).collect()
    }

    pub fn u_tab(&self) -> Vec<f64> {
        self.xi_grid().into_iter().map(|xi| self.eval(xi).1).collect()
    }

    pub fn theta_tab(&self) -> Vec<f64> {
        self.xi_grid().into_iter().map(|xi| self.eval(xi).2).collect()
    }

    /// `(v, u, theta)` at `xi`.
    #[inline]
    pub fn eval(&self, xi: f64) -> (f64, f64, f64) {
        let [v, _, th, ..] = self.eval_with_derivs(xi);
        (v, self.ode.velocity(v), th)
    }

    /// Values and first derivatives `[v, u, theta, v', u', theta']` at `xi`.
    #[inline]
    pub fn eval_with_derivs(&self, xi: f64) -> [f64; 6] {
        let (v, th, vp, thp) = if xi < self.v_tab.x0() {
            let ([v, th], e) = self.left_tail.eval(xi);
            let r = self.left_tail.rate * e;
            (v, th, r * self.left_tail.w[0], r * self.left_tail.w[1])
        } else if xi > self.v_tab.x_end() {
            let ([v, th], e) = self.right_tail.eval(xi);
            let r = self.right_tail.rate * e;
            (v, th, r * self.right_tail.w[0], r * self.right_tail.w[1])
        } else {
            let v = self.v_tab.eval(xi);
            let th = self.theta_tab.eval(xi);
            let [a, b] = self.ode.rhs(v, th);
            (v, th, a, b)
        };
        [v, self.ode.velocity(v), th, vp, -self.sigma * vp, thp]
    }

    /// `v''` at `xi`.
    pub fn v_second(&self, xi: f64) -> f64 {
        let tail = if xi < self.v_tab.x0() {
            Some(&self.left_tail)
        } else if xi > self.v_tab.x_end() {
            Some(&self.right_tail)
        } else {
            None
        };
        match tail {
            Some(t) => t.rate * t.rate * t.w[0] * t.eval(xi).1,
            None => {
                let [v, _, _, vp, _, thp] = self.eval_with_derivs(xi);
                self.ode.v_second(v, vp, thp)
            }
        }
    }

    /// Least-squares fit of `ln|v - v_end|` against `xi` on one tail,
    /// over tabulation nodes where the deviation lies in `[lo, hi]` times the
    /// amplitude. Returns `(rate, r_squared)`.
    pub fn tail_fit(&self, right_tail: bool, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let d = self.amplitude();
        let end = if right_tail { self.right.v() } else { self.left.v() };
        let pts: Vec<(f64, f64)> = self
            .xi_grid()
            .into_iter()
            .filter_map(|xi| {
                let dev = (self.eval(xi).0 - end).abs();
                let on_side = if right_tail { xi > 0.0 } else { xi < 0.0 };
                (on_side && dev >= lo * d && dev <= hi * d).then(|| (xi, dev.ln()))
            })
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let (slope, r2) = linear_fit(&pts);
        Some((slope.abs(), r2))
    }
}

/// Ordinary least squares `y = a + b x`; returns `(b, R^2)`.
pub(crate) fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (b, r2)
}

/// Relative depth, in units of the amplitude, at which the numerical core
/// hands over to the closed-form tail on the attracting side.
const NODE_HANDOVER: f64 = 1e-8;

/// Computes the viscous profile of `pair`.
pub fn solve_shock_profile(
    pair: &ShockPair,
    g: &GasParams,
    opts: ShockProfileOptions,
) -> Result<ShockProfile> {
    let delta = pair.amplitude();
    if delta == 0.0 || pair.left.distance(&pair.right) == 0.0 {
        return Err(Error::DegenerateShock);
    }
    let ode = WaveOde::new(pair, g);
    let (l, r) = (pair.left, pair.right);
    let kl = classify(ode.jacobian(l.v(), l.theta()));
    let kr = classify(ode.jacobian(r.v(), r.theta()));

    // saddle endpoint, eigenpair to follow, direction in xi, signed node rate
    let (saddle, node, lam, evec, dir, node_rate) = match (kl, kr) {
        (FixedPoint::Saddle { unstable, .. }, FixedPoint::Node { slow, fast }) if slow < 0.0 && fast < 0.0 => {
            (l, r, unstable.0, unstable.1, 1.0, slow)
        }
        (FixedPoint::Node { slow, fast }, FixedPoint::Saddle { stable, .. }) if slow > 0.0 && fast > 0.0 => {
            (r, l, stable.0, stable.1, -1.0, slow)
        }
        other => {
            return Err(Error::WrongStability(format!(
                "{:?}-shock with sigma = {}: endpoint types {:?}",
                pair.family, pair.sigma, other
            )))
        }
    };
    let h = opts.h_tab;

    // orient the eigenvector towards the node, normalized to unit v-component
    let toward = (node.v() - saddle.v()).signum();
    let scale = toward * evec[0].signum() / evec[0].abs();
    let e = [evec[0] * scale, evec[1] * scale];
    let eps = 1e-6 * delta;
    // integrate the deviation from the node so the tolerance is relative to it
    let nd = [node.v(), node.theta()];
    let z0 = [saddle.v() + eps * e[0] - nd[0], saddle.theta() + eps * e[1] - nd[1]];

    let v_mid = 0.5 * (l.v() + r.v());
    let v_lo = l.v().min(r.v()) - delta;
    let v_hi = l.v().max(r.v()) + delta;
    let handover = NODE_HANDOVER * delta;
    let tol = Tolerances {
        rtol: (opts.tol * 1e-4).max(1e-13),
        atol: 1e-16,
        h_max: 0.5 / lam.abs().min(node_rate.abs()).max(1e-12),
        max_steps: 2_000_000,
    };

    // march in s = dir * xi from the launch point
    let mut samples: Vec<[f64; 2]> = Vec::new();
    let mut center: Option<f64> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut escaped = false;
    let s_max = 40.0 * opts.span / lam.abs().min(node_rate.abs());
    let (_, _, stop) = ode::integrate(
        |_s, z: &[f64; 2]| {
            let f = ode.rhs(nd[0] + z[0], nd[1] + z[1]);
            [dir * f[0], dir * f[1]]
        },
        0.0,
        z0,
        s_max,
        tol,
        0.0,
        h,
        |_s, z| samples.push(*z),
        |s, z| {
            let y = [nd[0] + z[0], nd[1] + z[1]];
            if !(y[0] > v_lo && y[0] < v_hi && y[1] > 0.0) {
                escaped = true;
                return true;
            }
            if center.is_none() {
                if let Some((ps, pv)) = prev {
                    if (pv - v_mid) * (y[0] - v_mid) <= 0.0 && pv != y[0] {
                        center = Some(ps + (s - ps) * (v_mid - pv) / (y[0] - pv));
                    }
                }
                prev = Some((s, y[0]));
                return false;
            }
            z[0].abs().max(z[1].abs()) < 0.5 * handover
        },
    )?;
    if escaped {
        return Err(Error::NoConnection(format!(
            "{:?}-shock orbit left the admissible region",
            pair.family
        )));
    }
    if stop != ode::Stop::Event || center.is_none() {
        return Err(Error::NoConnection(format!(
            "{:?}-shock orbit did not reach the node within span {s_max}",
            pair.family
        )));
    }
    // the core ends at the first sample inside the handover depth
    let cut = samples
        .iter()
        .position(|z| z[0].abs().max(z[1].abs()) < handover)
        .ok_or_else(|| Error::NoConnection("orbit never reached the handover depth".into()))?;
    samples.truncate(cut + 1);
    let n = samples.len();
    if n < 8 {
        return Err(Error::NoConnection("layer too thin for the table spacing".into()));
    }

    // node rows in s = k h, k = 0..n-1; xi = dir * s
    let mut core: Vec<[f64; 2]> = samples.iter().map(|z| [nd[0] + z[0], nd[1] + z[1]]).collect();
    if dir < 0.0 {
        core.reverse();
    }
    let xi_first = if dir > 0.0 { 0.0 } else { -h * (n - 1) as f64 };
    let (vals_v, vals_t): (Vec<f64>, Vec<f64>) = core.iter().map(|y| (y[0], y[1])).unzip();
    let derivs: Vec<[f64; 2]> = core.iter().map(|y| ode.rhs(y[0], y[1])).collect();
    let dv: Vec<f64> = derivs.iter().map(|d| d[0]).collect();
    let dt: Vec<f64> = derivs.iter().map(|d| d[1]).collect();

    // phase: v(0) = v_mid
    let probe = UniformTable::new(xi_first, h, vals_v.clone(), dv.clone());
    let x0 = xi_first - refine_crossing(&probe, v_mid);
    let v_tab = UniformTable::new(x0, h, vals_v, dv);
    let theta_tab = UniformTable::new(x0, h, vals_t, dt);

    let z_last = samples[n - 1];
    let launch_tail = |anchor: f64| Tail {
        anchor,
        end: [saddle.v(), saddle.theta()],
        w: [eps * e[0], eps * e[1]],
        rate: lam,
    };
    let node_tail = |anchor: f64, z: [f64; 2]| Tail {
        anchor,
        end: nd,
        w: z,
        rate: node_rate,
    };
    let (left_tail, right_tail) = if dir > 0.0 {
        (launch_tail(v_tab.x0()), node_tail(v_tab.x_end(), z_last))
    } else {
        (node_tail(v_tab.x0(), z_last), launch_tail(v_tab.x_end()))
    };
    let span = (-opts.span / left_tail.rate.abs(), opts.span / right_tail.rate.abs());
    let span = (span.0.min(v_tab.x0()), span.1.max(v_tab.x_end()));
    let mut prof = ShockProfile {
        family: pair.family,
        sigma: pair.sigma,
        left: l,
        right: r,
        ode,
        v_tab,
        theta_tab,
        left_tail,
        right_tail,
        span,
        residual: 0.0,
    };
    let res = tabulation_residual(&prof);
    prof.residual = res;
    if !(res <= opts.tol) {
        return Err(Error::ProfileResidual {
            residual: res,
            tol: opts.tol,
        });
    }
    Ok(prof)
}

/// Offset of the `v = target` crossing relative to the table origin frame.
fn refine_crossing(t: &UniformTable, target: f64) -> f64 {
    let vals = t.values();
    let k = (0..vals.len() - 1)
        .find(|&i| (vals[i] - target) * (vals[i + 1] - target) <= 0.0)
        .unwrap_or(0);
    let (mut a, mut b) = (t.node(k), t.node(k + 1));
    let fa = t.eval(a) - target;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = t.eval(m) - target;
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Max over the tabulation of the mismatch between a sixth-order centered
/// difference of the profile and the ODE right-hand side.
fn tabulation_residual(p: &ShockProfile) -> f64 {
    let xs = p.xi_grid();
    let h = p.step();
    let rows: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| {
            let (v, _, th) = p.eval(x);
            (v, th)
        })
        .collect();
    let c = [1.0 / 60.0, -3.0 / 20.0, 3.0 / 4.0];
    let d6 = |f: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        (c[2] * (f(i + 1) - f(i - 1)) + c[1] * (f(i + 2) - f(i - 2)) + c[0] * (f(i + 3) - f(i - 3))) / h
    };
    let mut worst = 0.0f64;
    for i in 3..rows.len().saturating_sub(3) {
        let f = p.ode.rhs(rows[i].0, rows[i].1);
        let dv = d6(&|k| rows[k].0, i);
        let dt = d6(&|k| rows[k].1, i);
        worst = worst.max((dv - f[0]).abs()).max((dt - f[1]).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::{hugoniot_locus, Side};

    fn pair(family: Family, delta: f64) -> ShockPair {
        let g = GasParams::reference();
        let r = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        match family {
            Family::Three => {
                let h = hugoniot_locus(&r, 1.0 - delta, Family::Three, Side::Right, &g).unwrap();
                ShockPair {
                    family,
                    left: h.state,
                    right: r,
                    sigma: h.sigma,
                }
            }
            Family::One => {
                let h = hugoniot_locus(&r, 1.0 + delta, Family::One, Side::Right, &g).unwrap();
                ShockPair {
                    family,
                    left: h.state,
                    right: r,
                    sigma: h.sigma,
                }
            }
        }
    }

    #[test]
    fn degenerate_pair_is_rejected() {
        let g = GasParams::reference();
        let r = ThermoState::new(1.0, 0.0, 1.0).unwrap();
        let p = ShockPair {
            family: Family::One,
            left: r,
            right: r,
            sigma: -1.0,
        };
        assert!(matches!(
            solve_shock_profile(&p, &g, Default::default()),
            Err(Error::DegenerateShock)
        ));
    }

    #[test]
    fn wrong_family_sign_is_rejected() {
        let g = GasParams::reference();
        let mut p = pair(Family::Three, 0.1);
        p.sigma = -p.sigma;
        assert!(solve_shock_profile(&p, &g, Default::default()).is_err());
    }

    #[test]
    fn profile_basic_structure() {
        let g = GasParams::reference();
        for fam in [Family::One, Family::Three] {
            let p = pair(fam, 0.1);
            let prof = solve_shock_profile(&p, &g, Default::default()).unwrap();
            assert!(prof.residual() <= 1e-8, "{fam:?}: {}", prof.residual());
            // centering
            let (v0, _, _) = prof.eval(0.0);
            assert!((v0 - 0.5 * (p.left.v() + p.right.v())).abs() < 1e-12);
            // endpoint convergence
            let (a, b) = prof.xi_range();
            let d = p.amplitude();
            assert!((prof.eval(a).0 - p.left.v()).abs() <= 1e-8 * d);
            assert!((prof.eval(b).0 - p.right.v()).abs() <= 1e-8 * d);
            assert!((prof.eval(a).2 - p.left.theta()).abs() <= 1e-8 * d);
            assert!((prof.eval(b).2 - p.right.theta()).abs() <= 1e-8 * d);
            // velocity slaving
            for (v, u) in prof.v_tab().iter().zip(prof.u_tab()) {
                assert_eq!(u, p.left.u() - p.sigma * (v - p.left.v()));
            }
        }
    }

    #[test]
    fn classify_saddle_and_node() {
        match classify([[1.0, 0.0], [0.0, -2.0]]) {
            FixedPoint::Saddle { unstable, stable } => {
                assert_eq!(unstable.0, 1.0);
                assert_eq!(stable.0, -2.0);
                assert!((unstable.1[0].abs() - 1.0).abs() < 1e-15);
            }
            k => panic!("{k:?}"),
        }
        assert!(matches!(classify([[-1.0, 0.0], [0.0, -2.0]]), FixedPoint::Node { .. }));
        assert!(matches!(classify([[0.0, 1.0], [-1.0, 0.0]]), FixedPoint::Other));
    }
}
