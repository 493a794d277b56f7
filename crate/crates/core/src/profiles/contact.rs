//! Self-similar viscous contact wave.
//!
//! The temperature `Theta(xi)`, `xi = x / sqrt(1 + t)`, solves
//!
//! ```text
//! -xi/2 Theta' = a (Theta'/Theta)',   Theta(-inf) = theta_l,  Theta(+inf) = theta_r,
//! ```
//!
//! with `a = (gamma - 1) kappa p_star / (R^2 gamma)`. Writing `q = Theta'/Theta`
//! gives `Theta' = Theta q`, `q' = -xi Theta q / (2a)`. The profile is found by
//! shooting on `q(-L)` in log scale.

use crate::error::{Error, Result};
use crate::gas::GasParams;
use crate::interp::UniformTable;
use crate::ode::{self, Tolerances};

#[derive(Clone, Copy, Debug)]
pub struct ContactOptions {
    /// Tolerance on `|Theta(L) - theta_r|`, relative to the jump.
    pub tol: f64,
    /// Number of table intervals over `[-L, L]`.
    pub intervals: usize,
    /// Half-width in units of the diffusion length `sqrt(2a / min theta)`.
    pub half_width: f64,
}

impl Default for ContactOptions {
    fn default() -> Self {
        ContactOptions {
            tol: 1e-10,
            intervals: 4000,
            half_width: 12.0,
        }
    }
}

/// Pointwise contact data: `Theta` and `q` with two derivatives each.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContactPoint {
    pub theta: f64,
    pub dtheta: f64,
    pub d2theta: f64,
    pub q: f64,
    pub dq: f64,
    pub d2q: f64,
}

#[derive(Clone, Debug)]
pub struct ContactWave {
    theta_l: f64,
    theta_r: f64,
    p_star: f64,
    u_star: f64,
    diffusivity: f64,
    half_width: f64,
    theta_tab: UniformTable,
    q_tab: UniformTable,
}

impl ContactWave {
    pub fn theta_left(&self) -> f64 {
        self.theta_l
    }

    pub fn theta_right(&self) -> f64 {
        self.theta_r
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    /// The constant `a` of the similarity equation.
    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn xi_grid(&self) -> Vec<f64> {
        (0..self.theta_tab.len()).map(|i| self.theta_tab.node(i)).collect()
    }

    pub fn theta_tab(&self) -> &[f64] {
        self.theta_tab.values()
    }

    pub fn dtheta_tab(&self) -> Vec<f64> {
        self.theta_tab
            .values()
            .iter()
            .zip(self.q_tab.values())
            .map(|(t, q)| t * q)
            .collect()
    }

    /// `Theta` and `q` with derivatives at `xi`; outside `[-L, L]` the wave is
    /// flat.
    #[inline]
    pub fn eval(&self, xi: f64) -> ContactPoint {
        let th = self.theta_tab.eval(xi);
        if xi <= self.theta_tab.x0() || xi >= self.theta_tab.x_end() {
            return ContactPoint {
                theta: th,
                ..Default::default()
            };
        }
        let q = self.q_tab.eval(xi);
        let a2 = 2.0 * self.diffusivity;
        let dth = th * q;
        let dq = -xi * th * q / a2;
        let d2th = dth * q + th * dq;
        let d2q = -(th * q + xi * dth * q + xi * th * dq) / a2;
        ContactPoint {
            theta: th,
            dtheta: dth,
            d2theta: d2th,
            q,
            dq,
            d2q,
        }
    }

    /// `Theta(xi)` only.
    #[inline]
    pub fn theta(&self, xi: f64) -> f64 {
        self.theta_tab.eval(xi)
    }
}

/// Solves the contact similarity problem between `theta_l` and `theta_r`
/// at common pressure `p_star` and velocity `u_star`.
pub fn solve_contact_wave(
    theta_l: f64,
    theta_r: f64,
    p_star: f64,
    u_star: f64,
    g: &GasParams,
    opts: ContactOptions,
) -> Result<ContactWave> {
    if !(theta_l > 0.0 && theta_r > 0.0 && p_star > 0.0) {
        return Err(Error::ContactFailed(format!(
            "non-physical contact data theta = ({theta_l}, {theta_r}), p = {p_star}"
        )));
    }
    let jump = theta_r - theta_l;
    let a = g.contact_diffusivity(p_star);
    let big_l = opts.half_width * (2.0 * a / theta_l.min(theta_r)).sqrt();
    if jump == 0.0 {
        let flat = || UniformTable::new(-big_l, 2.0 * big_l, vec![theta_l; 2], vec![0.0; 2]);
        return Ok(ContactWave {
            theta_l,
            theta_r,
            p_star,
            u_star,
            diffusivity: a,
            half_width: big_l,
            theta_tab: flat(),
            q_tab: UniformTable::new(-big_l, 2.0 * big_l, vec![0.0; 2], vec![0.0; 2]),
        });
    }
    let sgn = jump.signum();
    let a2 = 2.0 * a;
    // y = (Theta, ln|q|)
    let rhs = move |xi: f64, y: &[f64; 2]| -> [f64; 2] {
        let q = sgn * y[1].exp();
        [y[0] * q, -xi * y[0] / a2]
    };
    let tol = Tolerances {
        rtol: 1e-13,
        atol: 1e-15,
        h_max: big_l / 50.0,
        max_steps: 1_000_000,
    };
    // Returns the signed overshoot past theta_r (positive = past target).
    let shoot = |ln_s: f64| -> f64 {
        let mut past = false;
        let res = ode::integrate(
            rhs,
            -big_l,
            [theta_l, ln_s],
            big_l,
            tol,
            -big_l,
            2.0 * big_l,
            |_, _| {},
            |_, y| {
                past = !((y[0] - theta_r) * sgn < 0.0) || !(y[0] > 0.0);
                past
            },
        );
        match res {
            Ok((_, y, ode::Stop::End)) => (y[0] - theta_r) * sgn,
            _ => f64::INFINITY,
        }
    };
    let (mut lo, mut hi) = (-700.0f64, 10.0f64);
    if shoot(hi) <= 0.0 {
        return Err(Error::ContactFailed("no overshooting bracket".into()));
    }
    if shoot(lo) >= 0.0 {
        return Err(Error::ContactFailed("no undershooting bracket".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if shoot(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let ln_s = lo;
    let miss = shoot(ln_s).abs();
    if !(miss <= opts.tol * jump.abs()) {
        return Err(Error::ContactFailed(format!(
            "endpoint mismatch {miss:e} exceeds {:e}",
            opts.tol * jump.abs()
        )));
    }

    let n = opts.intervals.max(16);
    let h = 2.0 * big_l / n as f64;
    let mut ys: Vec<[f64; 2]> = Vec::with_capacity(n + 1);
    ode::integrate(
        rhs,
        -big_l,
        [theta_l, ln_s],
        big_l + 0.5 * h,
        tol,
        -big_l,
        h,
        |_, y| ys.push(*y),
        |_, _| false,
    )?;
    ys.truncate(n + 1);
    if ys.len() != n + 1 {
        return Err(Error::ContactFailed("incomplete tabulation".into()));
    }
    let xi = |i: usize| -big_l + h * i as f64;
    let th: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let q: Vec<f64> = ys.iter().map(|y| sgn * y[1].exp()).collect();
    let dth: Vec<f64> = th.iter().zip(&q).map(|(t, q)| t * q).collect();
    let dq: Vec<f64> = (0..=n).map(|i| -xi(i) * th[i] * q[i] / a2).collect();
    let limit = 1e-6 * jump.abs();
    let edge = dth[0].abs().max(dth[n].abs());
    if edge > limit {
        return Err(Error::ContactDomainTooSmall { deriv: edge, limit });
    }
    Ok(ContactWave {
        theta_l,
        theta_r,
        p_star,
        u_star,
        diffusivity: a,
        half_width: big_l,
        theta_tab: UniformTable::new(-big_l, h, th, dth),
        q_tab: UniformTable::new(-big_l, h, q, dq),
    })
}
