//! Ideal polytropic gas thermodynamics and the relative entropy.
//!
//! Internal energy is `e = R theta / (gamma - 1)` with the additive constant
//! fixed to zero. States are plain values validated once at construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the gas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawGas")]
pub struct GasParams {
    #[serde(rename = "R")]
    pub r: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGas {
    #[serde(rename = "R")]
    r: f64,
    gamma: f64,
    mu: f64,
    kappa: f64,
}

impl TryFrom<RawGas> for GasParams {
    type Error = Error;

    fn try_from(raw: RawGas) -> Result<Self> {
        GasParams::new(raw.r, raw.gamma, raw.mu, raw.kappa)
    }
}

impl GasParams {
    pub fn new(r: f64, gamma: f64, mu: f64, kappa: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(r) {
            return Err(Error::InvalidGas(format!("R = {r} must be positive")));
        }
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidGas(format!("gamma = {gamma} must exceed 1")));
        }
        if !ok(mu) {
            return Err(Error::InvalidGas(format!("mu = {mu} must be positive")));
        }
        if !ok(kappa) {
            return Err(Error::InvalidGas(format!("kappa = {kappa} must be positive")));
        }
        Ok(GasParams {
            r,
            gamma,
            mu,
            kappa,
        })
    }

    /// `R = 1, gamma = 5/3, mu = kappa = 1`.
    pub fn reference() -> Self {
        GasParams {
            r: 1.0,
            gamma: 5.0 / 3.0,
            mu: 1.0,
            kappa: 1.0,
        }
    }

    /// Specific heat at constant volume, `R / (gamma - 1)`.
    #[inline]
    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }

    #[inline]
    pub fn pressure(&self, v: f64, theta: f64) -> f64 {
        debug_assert!(v > 0.0 && theta > 0.0);
        self.r * theta / v
    }

    #[inline]
    pub fn total_energy(&self, u: f64, theta: f64) -> f64 {
        self.cv() * theta + 0.5 * u * u
    }

    /// Temperature recovered from total energy and velocity.
    #[inline]
    pub fn temperature_from_energy(&self, energy: f64, u: f64) -> f64 {
        (energy - 0.5 * u * u) / self.cv()
    }

    /// Lagrangian sound speed `sqrt(gamma p / v)`.
    #[inline]
    pub fn sound_speed(&self, v: f64, theta: f64) -> f64 {
        (self.gamma * self.pressure(v, theta) / v).sqrt()
    }

    /// Coefficient of the contact-wave diffusion `(gamma-1) kappa p / (R^2 gamma)`.
    pub fn contact_diffusivity(&self, p_star: f64) -> f64 {
        (self.gamma - 1.0) * self.kappa * p_star / (self.r * self.r * self.gamma)
    }
}

/// Pointwise `(v, u, theta)` with `v > 0`, `theta > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawState")]
pub struct ThermoState {
    v: f64,
    u: f64,
    theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    v: f64,
    u: f64,
    theta: f64,
}

impl TryFrom<RawState> for ThermoState {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        ThermoState::new(raw.v, raw.u, raw.theta)
    }
}

impl ThermoState {
    pub fn new(v: f64, u: f64, theta: f64) -> Result<Self> {
        if !(v.is_finite() && v > 0.0 && theta.is_finite() && theta > 0.0 && u.is_finite()) {
            return Err(Error::NonPhysicalState { v, theta });
        }
        Ok(ThermoState { v, u, theta })
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.u
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn pressure(&self, g: &GasParams) -> f64 {
        pressure(self, g)
    }

    #[inline]
    pub fn total_energy(&self, g: &GasParams) -> f64 {
        total_energy(self, g)
    }

    #[inline]
    pub fn sound_speed(&self, g: &GasParams) -> f64 {
        g.sound_speed(self.v, self.theta)
    }

    /// Maximum componentwise distance.
    pub fn distance(&self, other: &ThermoState) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.theta - other.theta).abs())
    }
}

pub fn pressure(s: &ThermoState, g: &GasParams) -> f64 {
    g.pressure(s.v, s.theta)
}

pub fn total_energy(s: &ThermoState, g: &GasParams) -> f64 {
    g.total_energy(s.u, s.theta)
}

/// Partial derivatives `(dp/dv, dp/dtheta)`.
pub fn pressure_gradient(s: &ThermoState, g: &GasParams) -> (f64, f64) {
    (-g.r * s.theta / (s.v * s.v), g.r / s.v)
}

/// Partial derivatives `(dE/du, dE/dtheta)`; `E` does not depend on `v`.
pub fn energy_gradient(s: &ThermoState, g: &GasParams) -> (f64, f64) {
    (s.u, g.cv())
}

/// `Phi(z) = z - 1 - ln z`.
pub fn phi(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::PhiDomain(z));
    }
    Ok(phi_unchecked(z))
}

/// `Phi` without the domain check; for hot loops over validated fields.
///
/// Near `z = 1` the series `w^2/2 - w^3/3 + ...` is used to avoid
/// cancellation in `z - 1 - ln z`.
#[inline]
pub fn phi_unchecked(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let w = z - 1.0;
    if w.abs() < 1e-3 {
        let w2 = w * w;
        w2 * (0.5 - w / 3.0 + w2 / 4.0 - w2 * w / 5.0 + w2 * w2 / 6.0)
    } else {
        w - z.ln()
    }
}

/// `eta(U | Ubar) = R Phi(v/vbar) + R/(gamma-1) Phi(theta/thetabar) + (u-ubar)^2/(2 thetabar)`.
pub fn relative_entropy_density(s: &ThermoState, sbar: &ThermoState, g: &GasParams) -> f64 {
    weighted_relative_entropy_density(s, sbar, g) / sbar.theta
}

/// `thetabar * eta(U | Ubar)`.
pub fn weighted_relative_entropy_density(
    s: &ThermoState,
    sbar: &ThermoState,
    g: &GasParams,
) -> f64 {
    weighted_relative_entropy_raw(s.v, s.u, s.theta, sbar.v, sbar.u, sbar.theta, g)
}

#[inline]
pub(crate) fn weighted_relative_entropy_raw(
    v: f64,
    u: f64,
    theta: f64,
    vb: f64,
    ub: f64,
    thb: f64,
    g: &GasParams,
) -> f64 {
    let du = u - ub;
    g.r * thb * phi_unchecked(v / vb) + g.cv() * thb * phi_unchecked(theta / thb) + 0.5 * du * du
}
