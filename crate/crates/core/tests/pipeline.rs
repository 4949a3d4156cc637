use num_rational::Ratio;
use qsep::detect::{collision_attempt, Status, WalkMemory};
use qsep::gen::ScaleParams;
use qsep::harness::{enumerate_attempts, run_trials, tail_and_cycle, DetectorSpec, GeneratorSpec, TrialConfig};
use qsep::{CountedOracle, FunctionInstance};

/// 7 -> 0 -> 1 -> 2 -> 3 -> 1 and 6 -> 5 -> 4 -> 4.
fn rho() -> FunctionInstance {
    FunctionInstance::new(vec![1, 2, 3, 1, 4, 4, 5, 0]).unwrap()
}

#[test]
fn tails_and_cycles_by_hand() {
    let (tau, lambda) = tail_and_cycle(&rho());
    assert_eq!(tau, vec![1, 0, 0, 0, 0, 1, 2, 2]);
    assert_eq!(lambda, vec![3, 3, 3, 3, 1, 1, 1, 3]);
}

#[test]
fn attempt_table_by_hand() {
    // cap 4: starts 0, 5 and 6 reach their merge point in time; 7 needs 5 steps
    let e = enumerate_attempts(&rho(), 4);
    assert_eq!(e.successful_starts, 3);
    assert_eq!(e.total_queries, 4 + 3 * 3 + 1 + 2 + 3 + 4);
    assert_eq!(e.success_probability(), Ratio::new(3, 8));

    let e = enumerate_attempts(&rho(), 8);
    assert_eq!(e.successful_starts, 4);
    assert_eq!(e.total_queries, 4 + 3 * 3 + 1 + 2 + 3 + 5);
}

#[test]
fn live_walks_match_the_table() {
    let f = rho();
    for cap in 1..=6 {
        let e = enumerate_attempts(&f, cap);
        let (mut wins, mut total) = (0, 0);
        for start in 0..f.n() {
            let mut o = CountedOracle::function(&f);
            let r = collision_attempt(&mut o, start, cap).unwrap();
            if let Some(w) = r.witness {
                w.validate_function(&f).unwrap();
                wins += 1;
            }
            total += r.queries;
        }
        assert_eq!((wins, total), (e.successful_starts, e.total_queries), "cap {cap}");
    }
}

#[test]
fn trials_are_reproducible() {
    let cfg = TrialConfig {
        generator: GeneratorSpec::CollisionFn {
            n: 1 << 12,
            params: ScaleParams::new(2, 6),
        },
        detector: DetectorSpec::Multiscale {
            i_min: 2,
            i_max: 6,
            memory: WalkMemory::PerWalk,
        },
        trials: 24,
        seed: 11,
        budget: None,
        fresh_instance_per_trial: true,
        corrupt: false,
    };
    let a = run_trials(&cfg).unwrap();
    let b = run_trials(&cfg).unwrap();
    let key = |r: &qsep::harness::TrialRecord| (r.trial, r.seed, r.status, r.queries);
    assert_eq!(a.records.iter().map(key).collect::<Vec<_>>(), b.records.iter().map(key).collect::<Vec<_>>());
    assert!(a.records.iter().all(|r| r.status == Status::Found && r.valid));
}
