//! Adaptive Dormand-Prince 5(4) for small autonomous-in-form systems,
//! with continuous output sampled on a caller-supplied uniform grid.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output coefficients (Hairer & Wanner, DOPRI5 contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// Reached the end of the requested interval.
    End,
    /// The event callback requested a stop.
    Event,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` towards `x_end` (either direction).
///
/// `sample_at` is the first output abscissa and `sample_step` the signed
/// output spacing (same sign as the integration direction); every output
/// point inside the traversed interval is passed to `out(x, y)`. After each
/// accepted step `event(x, y)` may return `true` to stop early.
#[allow(clippy::too_many_arguments)]
pub fn integrate<const N: usize, F, O, Ev>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    tol: Tolerances,
    sample_at: f64,
    sample_step: f64,
    mut out: O,
    mut event: Ev,
) -> Result<(f64, [f64; N], Stop)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
    Ev: FnMut(f64, &[f64; N]) -> bool,
{
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    debug_assert!(sample_step * dir > 0.0);
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = (tol.h_max.min(1e-3 * (x_end - x0).abs().max(1e-12))) * dir;
    let mut k_sample = 0.0f64;
    while (sample_at + k_sample * sample_step - x) * dir < 0.0 {
        k_sample += 1.0;
    }
    let mut next_sample = sample_at + k_sample * sample_step;
    if (next_sample - x) * dir == 0.0 {
        out(x, &y);
        k_sample += 1.0;
        next_sample = sample_at + k_sample * sample_step;
    }
    let mut steps = 0usize;
    let mut fac_old: f64 = 1e-4;
    while (x_end - x) * dir > 0.0 {
        if steps >= tol.max_steps {
            return Err(Error::NoConnection(format!(
                "ODE step budget ({}) exhausted at x = {x}",
                tol.max_steps
            )));
        }
        steps += 1;
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h.abs() < 1e-14 {
                return Err(Error::NoConnection(format!("non-finite ODE state at x = {x}")));
            }
            continue;
        }
        if err <= 1.0 {
            // continuous extension coefficients
            let mut r1 = [0.0; N];
            let mut r2 = [0.0; N];
            let mut r3 = [0.0; N];
            let mut r4 = [0.0; N];
            let mut r5 = [0.0; N];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                r1[i] = y[i];
                r2[i] = dy;
                r3[i] = bspl;
                r4[i] = dy - h * k7[i] - bspl;
                r5[i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let x_new = x + h;
            // absorb rounding in the last output point of the interval
            let reach = if x_new == x_end {
                x_new + dir * 1e-9 * sample_step.abs()
            } else {
                x_new
            };
            while (next_sample - reach) * dir <= 0.0 {
                let s = (next_sample - x) / h;
                let s1 = 1.0 - s;
                let mut ys = [0.0; N];
                for i in 0..N {
                    ys[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
                }
                out(next_sample, &ys);
                k_sample += 1.0;
                next_sample = sample_at + k_sample * sample_step;
            }
            x = x_new;
            y = y_new;
            k1 = k7;
            if event(x, &y) {
                return Ok((x, y, Stop::Event));
            }
            let fac = (err.max(1e-10)).powf(0.17) / fac_old.powf(0.04) / 0.9;
            let fac = fac.clamp(0.1, 5.0);
            fac_old = err.max(1e-4);
            h = (h / fac).abs().min(tol.h_max) * dir;
        } else {
            let fac = (err.powf(0.2) / 0.9).clamp(1.0, 10.0);
            h /= fac;
        }
    }
    Ok((x, y, Stop::End))
}
