//! Inviscid wave curves: 1-/3-shock Hugoniot loci, the 2-contact curve and
//! the two-shock + contact wave pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasParams, ThermoState};

/// Genuinely nonlinear characteristic family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "3")]
    Three,
}

impl Family {
    /// Sign of the shock speed, `-1` for the 1-family.
    pub fn speed_sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Three => 1.0,
        }
    }
}

/// Which endpoint of the shock the anchor state is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Orientation of the contact jump in specific volume.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactOrientation {
    /// `v_* < v^*`, hence `theta_* < theta^*` at equal pressure.
    #[default]
    Expanding,
    /// `v_* > v^*`.
    Compressing,
}

/// A state on a Hugoniot locus together with the shock speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HugoniotPoint {
    pub state: ThermoState,
    pub sigma: f64,
    /// Zero-strength shock; `sigma` is the characteristic speed.
    pub degenerate: bool,
}

/// A shock connecting `left` to `right` with speed `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockPair {
    pub family: Family,
    pub left: ThermoState,
    pub right: ThermoState,
    pub sigma: f64,
}

impl ShockPair {
    pub fn amplitude(&self) -> f64 {
        (self.left.v() - self.right.v()).abs()
    }
}

/// Rankine-Hugoniot residuals `[mass, momentum, energy]`.
pub fn rh_residuals(l: &ThermoState, r: &ThermoState, sigma: f64, g: &GasParams) -> [f64; 3] {
    let (pl, pr) = (l.pressure(g), r.pressure(g));
    let (el, er) = (l.total_energy(g), r.total_energy(g));
    [
        -sigma * (r.v() - l.v()) - (r.u() - l.u()),
        sigma * (r.u() - l.u()) - (pr - pl),
        -sigma * (er - el) + (pr * r.u() - pl * l.u()),
    ]
}

/// Point on the Hugoniot curve through `anchor` at specific volume `v_o`,
/// before any admissibility check: `(theta_o, d theta_o / d v_o)`.
fn hugoniot_temperature(anchor: &ThermoState, v_o: f64, g: &GasParams) -> (f64, f64) {
    let cv = g.cv();
    let p_a = anchor.pressure(g);
    let dv = v_o - anchor.v();
    let num = cv * anchor.theta() - 0.5 * p_a * dv;
    let den = cv + g.r * dv / (2.0 * v_o);
    let dnum = -0.5 * p_a;
    let dden = g.r * anchor.v() / (2.0 * v_o * v_o);
    (num / den, (dnum * den - num * dden) / (den * den))
}

/// Unchecked Hugoniot evaluation along a family.
///
/// Returns `(u_o, theta_o, p_o)` and their derivatives with respect to `v_o`;
/// `Err` only when the speed is undefined (`dp/dv >= 0`) or `theta_o <= 0`.
struct LocusEval {
    u: f64,
    theta: f64,
    p: f64,
    sigma: f64,
    du: f64,
    dp: f64,
}

fn locus_eval(anchor: &ThermoState, v_o: f64, family: Family, g: &GasParams) -> Result<LocusEval> {
    let (theta, dtheta) = hugoniot_temperature(anchor, v_o, g);
    if !(theta > 0.0) {
        return Err(Error::AmplitudeTooLarge(theta));
    }
    let p_a = anchor.pressure(g);
    let p = g.r * theta / v_o;
    let dp = g.r * (dtheta * v_o - theta) / (v_o * v_o);
    let dv = v_o - anchor.v();
    let sign = family.speed_sign();
    if dv.abs() < 1e-14 * anchor.v() {
        let c = anchor.sound_speed(g);
        let sigma = sign * c;
        return Ok(LocusEval {
            u: anchor.u(),
            theta: anchor.theta(),
            p: p_a,
            sigma,
            du: -sigma,
            dp,
        });
    }
    let slope = (p - p_a) / dv;
    if !(slope < 0.0) {
        return Err(Error::UndefinedSpeed(slope));
    }
    let s2 = -slope;
    let sigma = sign * s2.sqrt();
    // d(s2)/dv_o and then d(sigma)/dv_o
    let ds2 = -(dp * dv - (p - p_a)) / (dv * dv);
    let dsigma = sign * ds2 / (2.0 * s2.sqrt());
    Ok(LocusEval {
        u: anchor.u() - sigma * dv,
        theta,
        p,
        sigma,
        du: -sigma - dsigma * dv,
        dp,
    })
}

/// State on the `family` Hugoniot locus through `anchor` with volume `v_other`.
///
/// The Hugoniot relation `e_o - e_a + (p_o + p_a)(v_o - v_a)/2 = 0` is linear
/// in `theta_o` and is solved exactly; `u_o = u_a - sigma (v_o - v_a)`.
pub fn hugoniot_locus(
    anchor: &ThermoState,
    v_other: f64,
    family: Family,
    side: Side,
    g: &GasParams,
) -> Result<HugoniotPoint> {
    if !(v_other > 0.0) || !v_other.is_finite() {
        return Err(Error::NonPhysicalState {
            v: v_other,
            theta: anchor.theta(),
        });
    }
    let (v_l, v_r) = match side {
        Side::Left => (anchor.v(), v_other),
        Side::Right => (v_other, anchor.v()),
    };
    let degenerate = v_other == anchor.v();
    if !degenerate {
        let admissible = match family {
            Family::One => v_l > v_r,
            Family::Three => v_l < v_r,
        };
        if !admissible {
            return Err(Error::LaxViolation(format!(
                "{family:?}-shock requires {} but v_l = {v_l}, v_r = {v_r}",
                match family {
                    Family::One => "v_l > v_r",
                    Family::Three => "v_l < v_r",
                }
            )));
        }
    }
    if degenerate {
        return Ok(HugoniotPoint {
            state: *anchor,
            sigma: family.speed_sign() * anchor.sound_speed(g),
            degenerate: true,
        });
    }
    let ev = locus_eval(anchor, v_other, family, g)?;
    Ok(HugoniotPoint {
        state: ThermoState::new(v_other, ev.u, ev.theta)?,
        sigma: ev.sigma,
        degenerate: false,
    })
}

/// The state on the 2-contact curve through `anchor` with volume `v_other`.
pub fn contact_partner(anchor: &ThermoState, v_other: f64, _g: &GasParams) -> Result<ThermoState> {
    ThermoState::new(v_other, anchor.u(), anchor.theta() * v_other / anchor.v())
}

/// Amplitudes of the three waves, measured as specific-volume gaps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitudes {
    pub delta1: f64,
    #[serde(rename = "deltaC")]
    pub delta_c: f64,
    pub delta3: f64,
}

impl Amplitudes {
    pub fn new(delta1: f64, delta_c: f64, delta3: f64) -> Self {
        Amplitudes {
            delta1,
            delta_c,
            delta3,
        }
    }

    /// `delta_0 = delta1 + deltaC + delta3`.
    pub fn total(&self) -> f64 {
        self.delta1 + self.delta_c + self.delta3
    }
}

/// 1-shock, 2-contact, 3-shock wave pattern between `left` and `right`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WavePattern {
    pub left: ThermoState,
    pub mid_left: ThermoState,
    pub mid_right: ThermoState,
    pub right: ThermoState,
    pub sigma1: f64,
    pub sigma3: f64,
    pub delta1: f64,
    #[serde(rename = "deltaC")]
    pub delta_c: f64,
    pub delta3: f64,
}

impl WavePattern {
    pub fn shock1(&self) -> ShockPair {
        ShockPair {
            family: Family::One,
            left: self.left,
            right: self.mid_left,
            sigma: self.sigma1,
        }
    }

    pub fn shock3(&self) -> ShockPair {
        ShockPair {
            family: Family::Three,
            left: self.mid_right,
            right: self.right,
            sigma: self.sigma3,
        }
    }

    /// Common pressure across the contact.
    pub fn p_star(&self, g: &GasParams) -> f64 {
        self.mid_left.pressure(g)
    }

    pub fn amplitudes(&self) -> Amplitudes {
        Amplitudes::new(self.delta1, self.delta_c, self.delta3)
    }

    /// Checks every structural invariant; returns the largest RH residual.
    pub fn check_invariants(&self, g: &GasParams) -> Result<f64> {
        let mut worst = 0.0f64;
        for pair in [self.shock1(), self.shock3()] {
            for r in rh_residuals(&pair.left, &pair.right, pair.sigma, g) {
                worst = worst.max(r.abs());
            }
        }
        if worst > 1e-10 {
            return Err(Error::NoAdmissiblePattern(format!(
                "Rankine-Hugoniot residual {worst:e}"
            )));
        }
        if !(self.sigma1 < 0.0 && self.sigma3 > 0.0) {
            return Err(Error::LaxViolation("shock speeds must satisfy sigma1 < 0 < sigma3".into()));
        }
        if self.left.v() < self.mid_left.v() || self.mid_right.v() > self.right.v() {
            return Err(Error::LaxViolation("volume ordering of the shocks".into()));
        }
        let dp = (self.mid_left.pressure(g) - self.mid_right.pressure(g)).abs();
        if (self.mid_left.u() - self.mid_right.u()).abs() > 1e-12 || dp > 1e-12 {
            return Err(Error::NoAdmissiblePattern(
                "middle states are not on a common contact curve".into(),
            ));
        }
        Ok(worst)
    }
}

/// Builds the pattern from the right state and the three amplitudes.
pub fn build_pattern(
    right: &ThermoState,
    amps: Amplitudes,
    orientation: ContactOrientation,
    g: &GasParams,
) -> Result<WavePattern> {
    let Amplitudes {
        delta1,
        delta_c,
        delta3,
    } = amps;
    for (name, d) in [("delta1", delta1), ("deltaC", delta_c), ("delta3", delta3)] {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidConfig(format!("{name} = {d} must be nonnegative")));
        }
    }
    let h3 = hugoniot_locus(right, right.v() - delta3, Family::Three, Side::Right, g)?;
    let mid_right = h3.state;
    let v_star = match orientation {
        ContactOrientation::Expanding => mid_right.v() - delta_c,
        ContactOrientation::Compressing => mid_right.v() + delta_c,
    };
    let mid_left = contact_partner(&mid_right, v_star, g)?;
    let h1 = hugoniot_locus(&mid_left, mid_left.v() + delta1, Family::One, Side::Right, g)?;
    let pattern = WavePattern {
        left: h1.state,
        mid_left,
        mid_right,
        right: *right,
        sigma1: h1.sigma,
        sigma3: h3.sigma,
        delta1: (h1.state.v() - mid_left.v()).abs(),
        delta_c: (mid_right.v() - mid_left.v()).abs(),
        delta3: (right.v() - mid_right.v()).abs(),
    };
    pattern.check_invariants(g)?;
    Ok(pattern)
}

const NEWTON_MAX_ITER: usize = 50;

/// Finds the intermediate volumes `(v_*, v^*)` connecting `left` to `right`
/// by a damped Newton iteration on the velocity and pressure mismatch.
pub fn solve_pattern(left: &ThermoState, right: &ThermoState, g: &GasParams) -> Result<WavePattern> {
    let residual = |v1: f64, v3: f64| -> Result<([f64; 2], [[f64; 2]; 2])> {
        let a = locus_eval(left, v1, Family::One, g)?;
        let b = locus_eval(right, v3, Family::Three, g)?;
        Ok((
            [a.u - b.u, a.p - b.p],
            [[a.du, -b.du], [a.dp, -b.dp]],
        ))
    };
    let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());

    // Acoustic initial guess.
    let (c_l, c_r) = (left.sound_speed(g), right.sound_speed(g));
    let (p_l, p_r) = (left.pressure(g), right.pressure(g));
    // u_l + c_l d1 = u_r + c_r d3,  p_l - c_l^2 d1 = p_r + c_r^2 d3
    let det = c_l * c_r * c_r + c_r * c_l * c_l;
    let rhs0 = right.u() - left.u();
    let rhs1 = p_r - p_l;
    let d1 = (rhs0 * c_r * c_r + c_r * (-rhs1)) / det;
    let d3 = (c_l * (-rhs1) - c_l * c_l * rhs0) / det;
    let mut v1 = left.v() + d1;
    let mut v3 = right.v() - d3;
    if !(v1 > 0.0 && v3 > 0.0) {
        v1 = left.v();
        v3 = right.v();
    }

    let scale = 1.0 + p_l.abs().max(p_r.abs());
    let mut it = 0;
    let (mut r, mut jac) = residual(v1, v3)?;
    while norm(&r) > 1e-13 * scale {
        if it >= NEWTON_MAX_ITER {
            return Err(Error::NewtonDiverged {
                iterations: it,
                residual: norm(&r),
            });
        }
        it += 1;
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations: it,
                residual: norm(&r),
            });
        }
        let s1 = (r[0] * jac[1][1] - r[1] * jac[0][1]) / det;
        let s3 = (jac[0][0] * r[1] - jac[1][0] * r[0]) / det;
        let mut lambda = 1.0;
        loop {
            let (n1, n3) = (v1 - lambda * s1, v3 - lambda * s3);
            let trial = if n1 > 0.0 && n3 > 0.0 {
                residual(n1, n3).ok()
            } else {
                None
            };
            match trial {
                Some((nr, nj)) if norm(&nr) < norm(&r) || lambda < 1e-6 => {
                    v1 = n1;
                    v3 = n3;
                    r = nr;
                    jac = nj;
                    break;
                }
                _ if lambda < 1e-6 => {
                    return Err(Error::NewtonDiverged {
                        iterations: it,
                        residual: norm(&r),
                    })
                }
                _ => lambda *= 0.5,
            }
        }
    }

    let tol = 1e-10 * (left.v() + right.v());
    if v1 > left.v() + tol {
        return Err(Error::NoAdmissiblePattern(format!(
            "1-wave would be a rarefaction (v_* = {v1} > v_- = {})",
            left.v()
        )));
    }
    if v3 > right.v() + tol {
        return Err(Error::NoAdmissiblePattern(format!(
            "3-wave would be a rarefaction (v^* = {v3} > v_+ = {})",
            right.v()
        )));
    }
    let v1 = v1.min(left.v());
    let v3 = v3.min(right.v());
    let h3 = hugoniot_locus(right, v3, Family::Three, Side::Right, g)?;
    let mid_right = h3.state;
    let mid_left = contact_partner(&mid_right, v1, g)?;
    let h1 = hugoniot_locus(&mid_left, left.v(), Family::One, Side::Right, g)?;
    let pattern = WavePattern {
        left: *left,
        mid_left,
        mid_right,
        right: *right,
        sigma1: h1.sigma,
        sigma3: h3.sigma,
        delta1: (left.v() - mid_left.v()).abs(),
        delta_c: (mid_right.v() - mid_left.v()).abs(),
        delta3: (right.v() - mid_right.v()).abs(),
    };
    // Left state was reconstructed from mid_left; it must coincide with the input.
    if h1.state.distance(left) > 1e-8 {
        return Err(Error::NoAdmissiblePattern(format!(
            "reconstructed left state misses the input by {:e}",
            h1.state.distance(left)
        )));
    }
    pattern.check_invariants(g)?;
    Ok(pattern)
}
