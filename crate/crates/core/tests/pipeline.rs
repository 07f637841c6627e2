use elo_dyn::dynamics::{chain_step, coupled_step, elo_step, find_path_nd, CouplingState, MatchEvent, PathPlan};
use elo_dyn::montecarlo::{chain_rng, make_histogram, run_with_snapshots, InitialCondition};
use elo_dyn::verify::{reports_to_csv, run_suite, SuiteConfig, REPORT_HEADER};
use elo_dyn::{run_ensemble, EloParams, EnsembleConfig, Error, RatingVector};
use proptest::prelude::*;

const CONFIG: &str = "\
# three players, draws allowed
n_players = 3
k_factor = 0.2
link.kind = logistic
link.c = 0.5
score.kind = three_point
score.p_tie = 0.3
skills = 0.6, 0.0, -0.6
";

#[test]
fn config_to_ensemble_to_csv() {
    let params = EloParams::from_config_str(CONFIG).unwrap();
    assert_eq!(params.n_players(), 3);
    let cfg = EnsembleConfig::new(params, 5_000, 21);
    let a = run_ensemble(&cfg).unwrap();
    let b = run_ensemble(&cfg.clone().with_threads(Some(2))).unwrap();
    assert_eq!(a.to_csv(0), b.to_csv(0));
    // Stronger players sit higher on average.
    let m = &a.summary.mean;
    assert!(m[0] > m[1] && m[1] > m[2], "{m:?}");
    for x in a.samples() {
        assert!(x.iter().sum::<f64>().abs() < 1e-9);
    }
    let hist = make_histogram(&a.coordinate(0), 50).unwrap();
    assert_eq!(hist.counts.iter().sum::<u64>(), 5_000);
}

#[test]
fn config_errors_surface() {
    assert!(matches!(
        EloParams::from_config_str("n_players = 2\nk_factor = 3\nlink.c = 0.5\n"),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(EloParams::from_config_str("bogus = 1\n"), Err(Error::Config { .. })));
}

#[test]
fn single_steps_compose_into_chain() {
    let p = EloParams::logistic_binary(0.4, 0.5, &[0.5, -0.5]).unwrap();
    let x = RatingVector::zeros(2).unwrap();
    let mut rng = chain_rng(1, 0);
    let (next, ev) = chain_step(&x, &p, &mut rng).unwrap();
    assert_eq!(elo_step(&x, &ev, &p).unwrap(), next);
    let y = elo_step(&x, &MatchEvent::new(0, 1, 1.0).unwrap(), &p).unwrap();
    assert_eq!(y.as_slice(), &[0.4, -0.4]);
}

#[test]
fn coupling_from_identical_starts_stays_together() {
    let p = EloParams::logistic_binary(0.4, 0.5, &[0.0, 0.0, 0.0]).unwrap();
    let x = RatingVector::new(vec![1.0, 0.5, -1.5]).unwrap();
    let mut state = CouplingState::new(x.clone(), x).unwrap();
    let mut rng = chain_rng(3, 0);
    for _ in 0..1000 {
        state = coupled_step(state, &p, &mut rng).unwrap();
    }
    assert_eq!(state.distance(), 0.0);
    assert_eq!(state.x(), state.y());
}

#[test]
fn uniform_starts_forget_their_origin() {
    let p = EloParams::logistic_binary(0.4, 0.5, &[0.5, -0.5]).unwrap();
    let cfg = EnsembleConfig::new(p, 4_000, 8)
        .with_t_star(400)
        .with_initial(InitialCondition::Uniform { lo: -5.0, hi: 5.0 });
    let run = run_with_snapshots(&cfg, &[0]).unwrap();
    let start = run.coordinate_at(0, 0);
    assert!(start.iter().all(|v| v.abs() <= 5.0));
    let end = run.result.estimate(|x| x[0]);
    assert!((end.mean - 0.5).abs() < 0.1, "{end:?}");
}

#[test]
fn plan_file_round_trip_replays() {
    let p = EloParams::logistic_binary(0.3, 0.5, &[0.0; 4]).unwrap();
    let x = RatingVector::new(vec![1.0, -2.0, 0.5, 0.5]).unwrap();
    let plan = find_path_nd(&x, &[(-1.0, -0.99), (2.0, 2.01), (0.0, 0.01)], &p).unwrap();
    let parsed = PathPlan::from_text(&plan.to_text()).unwrap();
    let end = parsed.replay(&p).unwrap();
    assert!(parsed.contains(&end));
    assert!(parsed.log_probability(&p).unwrap() < 0.0);
}

#[test]
fn suite_report_is_well_formed() {
    let reports = run_suite(&SuiteConfig::new(9), &["norm_identities".into(), "zero_sum".into()]).unwrap();
    let csv = reports_to_csv(&["seed=9".into()], &reports);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[1], REPORT_HEADER);
    assert_eq!(lines.len(), 4);
    for row in &lines[2..] {
        assert_eq!(row.split(',').count(), 7, "{row}");
        assert!(row.contains(",true,"), "{row}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chains_conserve_zero_sum(seed in any::<u64>(), n in 2usize..7, k in 0.01f64..1.9) {
        let p = EloParams::logistic_binary(k, 0.5, &vec![0.0; n]).unwrap();
        let cfg = EnsembleConfig::new(p, 4, seed).with_t_star(2_000);
        let r = run_ensemble(&cfg).unwrap();
        for x in r.samples() {
            prop_assert!(x.iter().sum::<f64>().abs() <= 1e-9);
        }
    }
}
