use oftrl_core::dynamics::{run_dynamics, simulate, Algorithm, DynamicsConfig};
use oftrl_core::game::{make_a_delta, make_a_dxdy, MatrixGame};
use oftrl_core::hardness::{detect_phases_global, predict_bad_block};
use oftrl_core::metrics::{
    convergence_report, interval_regret, min_probability, social_dynamic_regret, squared_path_length, variation,
    Player,
};
use oftrl_core::verify::max_discrepancy;
use oftrl_core::Regularizer;
use proptest::prelude::*;

fn omwu(game: &MatrixGame, eta: f64, horizon: usize) -> oftrl_core::Trajectory {
    run_dynamics(game, &DynamicsConfig::omwu(eta, horizon).unwrap()).unwrap()
}

#[test]
fn identical_configs_give_identical_records() {
    let g = make_a_delta(0.05).unwrap();
    for cfg in [
        DynamicsConfig::omwu(0.1, 3000).unwrap(),
        DynamicsConfig::ogda(0.1, 3000).unwrap(),
        DynamicsConfig::new(Algorithm::Oomd, Regularizer::Tsallis { beta: 0.5 }, 0.1, 3000).unwrap(),
    ] {
        assert_eq!(run_dynamics(&g, &cfg).unwrap(), run_dynamics(&g, &cfg).unwrap());
    }
}

#[test]
fn entropy_survives_underflow() {
    let g = make_a_delta(1e-4).unwrap();
    let cfg = DynamicsConfig::omwu(0.1, 1_000_000).unwrap();
    let mut all_finite = true;
    let mut min_ln = f64::INFINITY;
    simulate(&g, &cfg, |s| {
        all_finite &= s.gap.is_finite()
            && s.x.probs().iter().chain(s.y.probs()).all(|p| p.is_finite())
            && s.x.is_valid()
            && s.y.is_valid();
        min_ln = min_ln.min(s.x.min_ln()).min(s.y.min_ln());
    })
    .unwrap();
    assert!(all_finite);
    assert!(min_ln.is_finite());
    assert!(min_ln / std::f64::consts::LN_10 < -200.0);
}

#[test]
fn ogda_average_gap_decays() {
    let traj = run_dynamics(&make_a_delta(0.1).unwrap(), &DynamicsConfig::ogda(0.1, 10_000).unwrap()).unwrap();
    let avg = |t: usize| traj.records[t - 1].gap_sum / t as f64;
    assert!(avg(10_000) <= avg(100));
}

#[test]
fn regret_inside_bad_block_is_large() {
    let traj = omwu(&make_a_delta(0.01).unwrap(), 0.1, 5000);
    let report = detect_phases_global(&traj, 0.01, 0.1).unwrap();
    let block = report.longest_run().unwrap();
    assert!(block.start < 5000 && block.end == 5000);
    assert!(social_dynamic_regret(&traj, 5000).unwrap() / 5000.0 >= 0.05);
}

#[test]
fn detected_block_respects_prediction() {
    let delta = 0.01;
    let traj = omwu(&make_a_delta(delta).unwrap(), 0.1, 20_000);
    let block = *detect_phases_global(&traj, delta, 0.1).unwrap().longest_run().unwrap();
    let p = predict_bad_block(Regularizer::Entropy, 0.1, delta, 0.5).unwrap();
    assert!((block.start as f64) <= p.t_upper + p.block_length);
    if p.block_length >= 1.0 {
        assert!(block.length() as f64 >= p.block_length);
    }
}

#[test]
fn interval_regret_does_not_grow_with_length() {
    let traj = omwu(&make_a_delta(0.1).unwrap(), 0.1, 60_000);
    let worst = |len: usize| {
        [1usize, 10, 100, 1000, 5000, 20_000, 50_000]
            .iter()
            .map(|&s| {
                interval_regret(&traj, (s, s + len - 1), Player::X).unwrap()
                    + interval_regret(&traj, (s, s + len - 1), Player::Y).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (short, long) = (worst(100), worst(10_000));
    assert!(long <= 2.0 * short, "interval regret {short} at 1e2 vs {long} at 1e4");
}

#[test]
fn variation_within_path_length_bound() {
    let traj = omwu(&make_a_delta(0.1).unwrap(), 0.1, 100_000);
    let path = squared_path_length(&traj).unwrap();
    for n in [100usize, 1000, 10_000, 100_000] {
        for s in [1usize, 1000] {
            if s + n - 1 > 100_000 {
                continue;
            }
            let v = variation(&traj, (s, s + n - 1)).unwrap();
            assert!(v <= 2.0 * (n as f64 * path).sqrt(), "V = {v} over {n} iterations");
        }
    }
}

#[test]
fn probability_floor_plateaus() {
    let g = make_a_delta(0.1).unwrap();
    let early = min_probability(&omwu(&g, 0.1, 10_000)).unwrap();
    let late = min_probability(&omwu(&g, 0.1, 1_000_000)).unwrap();
    assert!(early.value() > 0.0);
    assert_eq!(early, late);
}

#[test]
fn initial_phase_case_two_gap() {
    let g = make_a_dxdy(0.01, 0.3).unwrap();
    let traj = omwu(&g, 0.1, 100_000);
    let r = oftrl_core::hardness::detect_phases_initial(&traj, 0.01, 0.3, 0.1).unwrap();
    let tx = r.tx.unwrap();
    assert!(r.ty.unwrap() < r.tm.unwrap() && r.tm.unwrap() <= tx);
    assert!(traj.records[tx - 1].gap <= 0.02);
}

fn game_strategy(max_dim: usize) -> impl Strategy<Value = MatrixGame> {
    (2..=max_dim, 2..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0.0f64..=1.0, c), r)
            .prop_map(|rows| MatrixGame::new(rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_invariance(
        b1 in -1.0f64..=1.0,
        b2 in 0.01f64..=1.0,
        dx in 0.01f64..0.3,
        extra in 0.0f64..0.4,
    ) {
        let base = make_a_dxdy(dx, dx + extra).unwrap();
        let shifted = base.affine(b1, b2).unwrap();
        let a = omwu(&shifted, 0.1, 2000);
        let b = omwu(&base, 0.1 * b2, 2000);
        prop_assert!(max_discrepancy(&a, &b) <= 1e-9);
    }

    #[test]
    fn oftrl_and_oomd_coincide_on_random_games(
        game in game_strategy(4),
        reg_idx in 0usize..3,
    ) {
        let reg = oftrl_core::verify::LEGENDRE_REGULARIZERS[reg_idx];
        let a = run_dynamics(&game, &DynamicsConfig::new(Algorithm::Oftrl, reg, 0.1, 300).unwrap()).unwrap();
        let b = run_dynamics(&game, &DynamicsConfig::new(Algorithm::Oomd, reg, 0.1, 300).unwrap()).unwrap();
        prop_assert!(max_discrepancy(&a, &b) <= 1e-8);
    }

    #[test]
    fn regret_identity_and_report_ordering(
        game in game_strategy(4),
        reg_idx in 0usize..4,
        ogda in any::<bool>(),
    ) {
        let reg = oftrl_core::verify::ALL_REGULARIZERS[reg_idx];
        let cfg = if ogda {
            DynamicsConfig::ogda(0.1, 300).unwrap()
        } else {
            DynamicsConfig::new(Algorithm::Oftrl, reg, 0.1, 300).unwrap()
        };
        let traj = run_dynamics(&game, &cfg).unwrap();
        let regret = social_dynamic_regret(&traj, 300).unwrap();
        prop_assert!((regret - traj.summary.gap_sum).abs() <= 1e-9 * 300.0);
        let report = convergence_report(&traj);
        let max_gap = traj.records.iter().map(|r| r.gap).fold(0.0, f64::max);
        for (i, r) in traj.records.iter().enumerate() {
            prop_assert!(r.x.is_valid() && r.y.is_valid());
            prop_assert!(report.best_series[i].1 >= 0.0);
            prop_assert!(report.best_series[i].1 <= report.random_avg_series[i].1 + 1e-15);
            prop_assert!(report.random_avg_series[i].1 <= max_gap + 1e-15);
        }
    }

    #[test]
    fn scalar_path_matches_general(reg_idx in 0usize..4, delta in 0.01f64..0.49) {
        let reg = oftrl_core::verify::ALL_REGULARIZERS[reg_idx];
        let g = make_a_delta(delta).unwrap();
        let cfg = DynamicsConfig::new(Algorithm::Oftrl, reg, 0.1, 1000).unwrap();
        let a = run_dynamics(&g, &cfg).unwrap();
        let b = run_dynamics(&g, &cfg.with_scalar_2x2(true)).unwrap();
        prop_assert!(max_discrepancy(&a, &b) <= 1e-9);
    }
}
