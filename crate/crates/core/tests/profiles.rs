use nsflab::gas::{GasParams, ThermoState};
use nsflab::profiles::{solve_contact_wave, solve_shock_profile, ShockProfileOptions};
use nsflab::riemann::{hugoniot_locus, Family, ShockPair, Side};

fn rest() -> ThermoState {
    ThermoState::new(1.0, 0.0, 1.0).unwrap()
}

fn one_shock(delta: f64) -> ShockPair {
    let g = GasParams::reference();
    let h = hugoniot_locus(&rest(), 1.0 + delta, Family::One, Side::Right, &g).unwrap();
    ShockPair {
        family: Family::One,
        left: h.state,
        right: rest(),
        sigma: h.sigma,
    }
}

#[test]
fn shock_speed_approaches_the_sound_speed_linearly() {
    let g = GasParams::reference();
    for k in 0..=30 {
        let delta = 1e-4 * (2000.0f64).powf(k as f64 / 30.0);
        let s = one_shock(delta);
        let c_left = (g.gamma * s.left.pressure(&g) / s.left.v()).sqrt();
        let ratio = (s.sigma + c_left).abs() / delta;
        assert!(ratio <= 5.0, "delta {delta}: ratio {ratio}");
    }
}

#[test]
fn jump_sizes_are_equivalent_to_the_volume_jump() {
    let mut bounds = (f64::INFINITY, 0.0f64);
    for delta in [1e-4, 1e-3, 1e-2, 0.1, 0.2] {
        let s = one_shock(delta);
        let dv = (s.right.v() - s.left.v()).abs();
        for r in [(s.right.u() - s.left.u()).abs() / dv, (s.right.theta() - s.left.theta()).abs() / dv] {
            bounds = (bounds.0.min(r), bounds.1.max(r));
        }
    }
    assert!(bounds.0 > 0.1 && bounds.1 < 10.0, "{bounds:?}");
}

#[test]
fn tighter_tolerance_changes_the_profile_by_little() {
    let g = GasParams::reference();
    let pair = one_shock(0.05);
    let base = ShockProfileOptions::default();
    let tight = ShockProfileOptions {
        tol: 0.5 * base.tol,
        ..base
    };
    let a = solve_shock_profile(&pair, &g, base).unwrap();
    let b = solve_shock_profile(&pair, &g, tight).unwrap();
    let dev = a
        .xi_grid()
        .into_iter()
        .map(|xi| {
            let (p, q) = (a.eval(xi), b.eval(xi));
            (p.0 - q.0).abs().max((p.1 - q.1).abs()).max((p.2 - q.2).abs())
        })
        .fold(0.0, f64::max);
    assert!(dev <= 10.0 * base.tol, "deviation {dev}");
}

#[test]
fn contact_tail_is_gaussian() {
    let g = GasParams::reference();
    let (tl, tr) = (0.9, 1.1);
    let p_star = 1.0;
    let c = solve_contact_wave(tl, tr, p_star, 0.0, &g, Default::default()).unwrap();
    let xs = c.xi_grid();
    let l = c.half_width();
    for right in [false, true] {
        let end = if right { tr } else { tl };
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .filter(|&&x| if right { x > l / 3.0 } else { x < -l / 3.0 })
            .filter_map(|&x| {
                let d = (c.theta(x) - end).abs();
                (d > 1e-12).then(|| (x * x, d.ln()))
            })
            .collect();
        let n = pts.len() as f64;
        assert!(n > 10.0);
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        let slope = sxy / sxx;
        let r2 = sxy * sxy / (sxx * syy);
        assert!(slope < 0.0 && r2 >= 0.99, "slope {slope}, R2 {r2}");
    }
}
