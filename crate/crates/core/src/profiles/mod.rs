//! Viscous shock profiles, the viscous contact wave, and their superposition
//! into the composite wave.

mod composite;
mod contact;
mod shock;

pub use composite::{sample_contact_fields, CompositeNode, CompositeWave, ContactNode, ProfileOptions};
pub use contact::{solve_contact_wave, ContactOptions, ContactPoint, ContactWave};
pub use shock::{solve_shock_profile, ShockProfile, ShockProfileOptions};


use crate::gas::GasParams;

/// Maxima over the tabulation of the derivative-equivalence ratios of a
/// shock profile, each normalized by `delta |v'|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `|u' + sgn(sigma) c_l v'| / (delta |v'|)`, `c_l` the left sound speed.
    pub velocity: f64,
    /// `|theta' + ((gamma-1) p_l / R) v'| / (delta |v'|)`.
    pub temperature: f64,
    /// `|v''| / (delta |v'|)`.
    pub curvature: f64,
}

/// Evaluates the derivative-equivalence ratios on every table node with a
/// non-negligible slope.
pub fn verify_profile_equivalences(p: &ShockProfile, g: &GasParams) -> EquivalenceReport {
    let l = p.left();
    let c_l = l.sound_speed(g);
    let p_l = l.pressure(g);
    let k_th = (g.gamma - 1.0) * p_l / g.r;
    let sgn = p.sigma().signum();
    let delta = p.amplitude();
    let floor = 1e-280;
    let mut out = EquivalenceReport {
        velocity: 0.0,
        temperature: 0.0,
        curvature: 0.0,
    };
    for xi in p.xi_grid() {
        let [_, _, _, vp, up, thp] = p.eval_with_derivs(xi);
        if vp.abs() < floor {
            continue;
        }
        let den = delta * vp.abs();
        out.velocity = out.velocity.max((up + sgn * c_l * vp).abs() / den);
        out.temperature = out.temperature.max((thp + k_th * vp).abs() / den);
        out.curvature = out.curvature.max(p.v_second(xi).abs() / den);
    }
    out
}
