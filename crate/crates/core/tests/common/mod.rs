//! Helpers shared by the integration tests.
#![allow(dead_code)]

use betcraft::betting::{PayoffStrategy, SequentialTest};

/// A two-sample outcome `((x, y), probability)` for vector observations.
pub type VecOutcome = ((Vec<f64>, Vec<f64>), f64);

/// `E[K_{t+1} | history] - K_t` for a test whose next observation takes the
/// value `outcomes[i].0` with probability `outcomes[i].1`, relative to `K_t`.
pub fn one_step_drift<S>(test: &SequentialTest<S>, outcomes: &[(S::Obs, f64)]) -> f64
where
    S: PayoffStrategy + Clone,
    S::Obs: Clone,
{
    let now = test.wealth();
    let mut expected = 0.0;
    for (obs, p) in outcomes {
        let mut next = test.clone();
        next.observe(obs.clone()).expect("observation accepted");
        expected += p * next.wealth();
    }
    (expected - now) / now
}

/// All `(x, y)` pairs from independent draws of the same finite law.
pub fn iid_pairs(values: &[f64], pmf: &[f64]) -> Vec<((f64, f64), f64)> {
    let mut out = Vec::new();
    for (&x, &px) in values.iter().zip(pmf) {
        for (&y, &py) in values.iter().zip(pmf) {
            out.push(((x, y), px * py));
        }
    }
    out
}

/// Normalize positive weights into a pmf.
pub fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Inverse-CDF draw from a finite law given a uniform `u`.
pub fn pick(values: &[f64], pmf: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for (v, p) in values.iter().zip(pmf) {
        acc += p;
        if u < acc {
            return *v;
        }
    }
    *values.last().unwrap()
}
