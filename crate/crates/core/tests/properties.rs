use proptest::prelude::*;

use nsflab::acontraction::{cutoffs, CoupledSystem, ShiftState, WeightSpec};
use nsflab::gas::{phi, relative_entropy_density, GasParams, ThermoState};
use nsflab::lab::{export_state, import_state};
use nsflab::nsf_solver::{make_initial_data, ComponentWeights, Field, Grid, Perturbation, SolverConfig};
use nsflab::par::Exec;
use nsflab::profiles::{CompositeWave, ProfileOptions};
use nsflab::riemann::{build_pattern, hugoniot_locus, rh_residuals, Amplitudes, ContactOrientation, Family, Side};

fn reference_wave(d1: f64, dc: f64, d3: f64) -> CompositeWave {
    let g = GasParams::reference();
    let r = ThermoState::new(1.0, 0.0, 1.0).unwrap();
    let pat = build_pattern(&r, Amplitudes::new(d1, dc, d3), ContactOrientation::Expanding, &g).unwrap();
    CompositeWave::new(&pat, &g, ProfileOptions::default()).unwrap()
}

fn initial_xdot(wave: &CompositeWave, pert: &Perturbation) -> [f64; 2] {
    let grid = Grid::new(-100.0, 100.0, 1024).unwrap();
    let f = make_initial_data(wave, &grid, pert, Exec::Sequential).unwrap();
    let sys = CoupledSystem::new(wave, SolverConfig::default()).unwrap();
    let s = sys.start(f).shifts;
    [s.xdot1, s.xdot3]
}

fn bump(amplitude: f64, center: f64, width: f64, w: [f64; 3]) -> Perturbation {
    Perturbation {
        amplitude,
        center,
        width,
        weights: ComponentWeights {
            v: w[0],
            u: w[1],
            theta: w[2],
        },
    }
}

proptest! {
    #[test]
    fn phi_is_nonnegative_and_vanishes_only_at_one(lz in -8.0f64..8.0) {
        let z = lz.exp();
        let p = phi(z).unwrap();
        prop_assert!(p >= 0.0);
        if (z - 1.0).abs() > 1e-3 {
            prop_assert!(p > 0.0);
        }
    }

    #[test]
    fn relative_entropy_is_nonnegative(
        v in 0.2f64..3.0, u in -2.0f64..2.0, th in 0.2f64..3.0,
        vb in 0.2f64..3.0, ub in -2.0f64..2.0, thb in 0.2f64..3.0,
    ) {
        let g = GasParams::reference();
        let s = ThermoState::new(v, u, th).unwrap();
        let sb = ThermoState::new(vb, ub, thb).unwrap();
        prop_assert!(relative_entropy_density(&s, &sb, &g) >= 0.0);
        prop_assert_eq!(relative_entropy_density(&sb, &sb, &g), 0.0);
    }

    #[test]
    fn hugoniot_points_satisfy_jump_conditions(
        v in 0.3f64..3.0, u in -2.0f64..2.0, th in 0.3f64..3.0,
        s in 1e-4f64..0.3, one in any::<bool>(), left in any::<bool>(),
    ) {
        let g = GasParams::reference();
        let anchor = ThermoState::new(v, u, th).unwrap();
        let family = if one { Family::One } else { Family::Three };
        let side = if left { Side::Left } else { Side::Right };
        let grows = one != left;
        let h = hugoniot_locus(&anchor, v * if grows { 1.0 + s } else { 1.0 - s }, family, side, &g).unwrap();
        let (l, r) = if left { (anchor, h.state) } else { (h.state, anchor) };
        let sigma2 = -(r.pressure(&g) - l.pressure(&g)) / (r.v() - l.v());
        prop_assert!(sigma2 > 0.0);
        prop_assert!((h.sigma * h.sigma - sigma2).abs() <= 1e-10 * sigma2);
        prop_assert_eq!(h.sigma.signum(), family.speed_sign());
        for res in rh_residuals(&l, &r, h.sigma, &g) {
            prop_assert!(res.abs() <= 1e-12, "residual {res}");
        }
    }

    #[test]
    fn cutoffs_partition_unity(
        x1 in -5.0f64..5.0, x3 in -5.0f64..5.0, t in 0.1f64..50.0,
        xs in prop::collection::vec(-200.0f64..200.0, 1..64),
    ) {
        let shifts = ShiftState { x1, x3, ..Default::default() };
        let (s1, s3) = (-1.4, 1.4);
        match cutoffs(&shifts, s1, s3, t, &xs) {
            Ok((p1, p3)) => {
                for i in 0..xs.len() {
                    prop_assert_eq!(p1[i] + p3[i], 1.0);
                    prop_assert!((0.0..=1.0).contains(&p1[i]) && (0.0..=1.0).contains(&p3[i]));
                }
            }
            Err(_) => prop_assert!(x1 + s1 * t >= x3 + s3 * t),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_stays_within_half_and_three_halves(
        d1 in 0.0f64..0.2, d3 in 0.0f64..0.2, x1 in -3.0f64..3.0, x3 in -3.0f64..3.0, t in 0.0f64..20.0,
    ) {
        let w = reference_wave(d1, 0.05, d3);
        let spec = WeightSpec::new(w.pattern());
        let xs: Vec<f64> = (0..801).map(|i| -100.0 + 0.25 * i as f64).collect();
        let lo = 1.0 - d1.sqrt() - 1e-12;
        let hi = 1.0 + d3.sqrt() + 1e-12;
        for n in w.sample_nodes(x1, x3, t, &xs, Exec::Sequential) {
            let a = spec.combined(&n);
            prop_assert!((0.5..=1.5).contains(&a) && (lo..=hi).contains(&a), "a = {a}");
        }
    }

    #[test]
    fn state_files_round_trip_bit_exactly(
        vals in prop::collection::vec((0.01f64..10.0, -5.0f64..5.0, 0.01f64..10.0), 16..64),
        t in 0.0f64..100.0, x0 in -50.0f64..0.0, len in 1.0f64..100.0,
    ) {
        let grid = Grid::new(x0, x0 + len, vals.len()).unwrap();
        let f = Field::new(
            grid,
            t,
            vals.iter().map(|p| p.0).collect(),
            vals.iter().map(|p| p.1).collect(),
            vals.iter().map(|p| p.2).collect(),
        ).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        export_state(&f, &path).unwrap();
        let back = import_state(&path).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(back.t().to_bits(), f.t().to_bits());
        for (a, b) in [(f.v(), back.v()), (f.u(), back.u()), (f.theta(), back.theta())] {
            prop_assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shift_speed_is_linear_in_the_perturbation(
        center in -20.0f64..20.0, width in 1.0f64..8.0,
        wv in -1.0f64..1.0, wu in -1.0f64..1.0, wt in -1.0f64..1.0,
    ) {
        let w = reference_wave(0.1, 0.05, 0.1);
        let eps = 1e-3;
        let one = initial_xdot(&w, &bump(eps, center, width, [wv, wu, wt]));
        let two = initial_xdot(&w, &bump(2.0 * eps, center, width, [wv, wu, wt]));
        let scale = one[0].abs().max(one[1].abs()).max(1e-12);
        for k in 0..2 {
            prop_assert!((two[k] - 2.0 * one[k]).abs() <= 1e-9 * scale, "{:?} {:?}", one, two);
        }
    }

    #[test]
    fn three_shock_response_decays_with_distance_to_the_left(
        center in -70.0f64..-40.0, width in 1.0f64..6.0,
    ) {
        let w = reference_wave(0.1, 0.05, 0.1);
        let rate = w.shock3().unwrap().decay_rates().0;
        let near = initial_xdot(&w, &bump(1e-2, center, width, [1.0, 1.0, 1.0]))[1];
        let far = initial_xdot(&w, &bump(1e-2, center - 10.0, width, [1.0, 1.0, 1.0]))[1];
        prop_assert!(far.abs() <= 1.5 * (-10.0 * rate).exp() * near.abs(), "{near} {far} rate {rate}");
    }
}
