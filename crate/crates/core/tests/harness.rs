use std::collections::HashSet;

use betcraft::sim::csvio::stopping_rows;
use betcraft::sim::{
    child_seed, read_power, read_stopping, run_experiment, write_power, write_stopping, ExperimentConfig,
};

fn config(seed: u64) -> ExperimentConfig {
    let text = format!(
        r#"{{
        "name": "h",
        "n_max": 600,
        "n_trials": 24,
        "master_seed": {seed},
        "checkpoints": [10, 50, 100, 300, 600],
        "tests": [
            {{"test": "ks2"}},
            {{"test": "mmd", "strategy": "kt"}},
            {{"test": "hr_ks2"}},
            {{"test": "batch_ks2", "max_n": 300}}
        ],
        "scenarios": [
            {{"name": "shift", "x": {{"normal": {{"mu": 0, "sigma": 1}}}}, "y": {{"normal": {{"mu": 0.6, "sigma": 1}}}}}}
        ]
    }}"#
    );
    ExperimentConfig::from_json(&text).unwrap()
}

fn csv_bytes(cfg: &ExperimentConfig, jobs: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
    run_experiment(cfg, Some(jobs))
        .unwrap()
        .iter()
        .map(|c| {
            let mut p = Vec::new();
            let mut s = Vec::new();
            write_power(&c.points, &mut p).unwrap();
            write_stopping(&stopping_rows(c), &mut s).unwrap();
            (p, s)
        })
        .collect()
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = config(7);
    let one = csv_bytes(&cfg, 1);
    assert_eq!(one, csv_bytes(&cfg, 3));
    assert_eq!(one, csv_bytes(&cfg, 1));
    assert_ne!(one, csv_bytes(&config(8), 1));
}

#[test]
fn curves_are_monotone_and_consistent_with_stopping_times() {
    for curve in run_experiment(&config(3), Some(2)).unwrap() {
        assert!(curve.errors.is_empty(), "{:?}", curve.errors);
        assert_eq!(curve.completed(), 24);
        let fr: Vec<f64> = curve.points.iter().map(|p| p.reject_fraction).collect();
        assert!(fr.windows(2).all(|w| w[0] <= w[1]), "{}: {fr:?}", curve.test);

        let taus = curve.stopping_times();
        for p in &curve.points {
            let hits = taus.iter().filter(|t| t.is_some_and(|t| t <= p.n)).count();
            assert_eq!(p.reject_fraction, hits as f64 / 24.0, "{} at {}", curve.test, p.n);
            let q = p.reject_fraction;
            assert!((p.stderr - (q * (1.0 - q) / 24.0).sqrt()).abs() < 1e-15);
        }
        let censored = taus.iter().filter(|t| t.is_none()).count();
        assert_eq!(curve.censored(), censored);
        assert_eq!(curve.censor_rate(), censored as f64 / 24.0);
        for row in stopping_rows(&curve) {
            assert!(row.tau <= curve.horizon);
            if row.censored {
                assert_eq!(row.tau, curve.horizon);
            }
        }
    }
}

#[test]
fn batch_horizon_is_capped_by_max_n() {
    let curves = run_experiment(&config(3), Some(1)).unwrap();
    let batch = curves.iter().find(|c| c.test == "batch_ks2").unwrap();
    assert_eq!(batch.horizon, 300);
    assert_eq!(batch.points.last().unwrap().n, 300);
    // Batch stopping times are checkpoints.
    for t in batch.stopping_times().into_iter().flatten() {
        assert!([10, 50, 100, 300].contains(&t));
    }
}

#[test]
fn csv_round_trip() {
    for curve in run_experiment(&config(5), Some(1)).unwrap() {
        let mut p = Vec::new();
        write_power(&curve.points, &mut p).unwrap();
        assert_eq!(read_power(&p[..]).unwrap(), curve.points);
        let rows = stopping_rows(&curve);
        let mut s = Vec::new();
        write_stopping(&rows, &mut s).unwrap();
        assert_eq!(read_stopping(&s[..]).unwrap(), rows);
        assert!(!p.contains(&b'\r'));
    }
}

#[test]
fn child_seeds_do_not_collide() {
    let mut seen = HashSet::new();
    for master in [0u64, 1, 20240104, u64::MAX] {
        for trial in 0..20_000 {
            assert!(
                seen.insert(child_seed(master, trial)),
                "collision at {master}/{trial}"
            );
        }
    }
}

#[test]
fn child_seed_reference_values() {
    assert_eq!(child_seed(0, 0), 0xE220_A839_7B1D_CDAF);
    assert_eq!(child_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
}
