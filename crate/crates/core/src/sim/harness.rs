//! Monte Carlo trial execution.
//!
//! Trial `i` of an experiment with master seed `s` draws from a ChaCha8
//! stream seeded with the `(i+1)`-th SplitMix64 output for state `s`:
//!
//! ```text
//! z = s + (i + 1)·0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30))·0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27))·0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! Seeds depend only on `(s, i)`, so results do not depend on how trials are
//! spread over threads. Every test in an experiment sees the same data for a
//! given trial index.
//!
//! For a sequential test the recorded rejection fraction at checkpoint `n` is
//! `#{τ_i <= n} / N`; a batch baseline is instead re-run on the first `n`
//! observations of each trial.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::betting::Status;
use crate::catalog::{Arity, TestSpec};
use crate::dist::Sampler;
use crate::error::{Error, Result};
use crate::observation::Observation;

use super::config::{ExperimentConfig, Scenario};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of the random stream for one trial.
pub fn child_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for trial `trial`.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, trial))
}

/// Draws the observations of one trial.
#[derive(Debug, Clone)]
pub struct DataStream {
    x: Sampler,
    y: Option<Sampler>,
    vectors: bool,
}

impl DataStream {
    /// Resolve the scenario's samplers (including any per-trial randomness).
    pub fn new(scenario: &Scenario, arity: Arity, rng: &mut ChaCha8Rng) -> Result<Self> {
        let x = scenario.x.sampler(rng)?;
        let y = match arity {
            Arity::One => None,
            Arity::Two => {
                let spec = scenario.y.as_ref().ok_or_else(|| {
                    Error::Config(format!("scenario `{}` has no `y` sample", scenario.name))
                })?;
                Some(spec.sampler(rng)?)
            }
        };
        let vectors = x.dim() > 1 || y.as_ref().is_some_and(|s| s.dim() > 1);
        Ok(Self { x, y, vectors })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Observation {
        match &self.y {
            None => Observation::Scalar(self.x.scalar(rng)),
            Some(y) if self.vectors => Observation::Vectors(self.x.point(rng), y.point(rng)),
            Some(y) => {
                let a = self.x.scalar(rng);
                Observation::Pair(a, y.scalar(rng))
            }
        }
    }
}

/// One (test, scenario) cell of an experiment.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub test: TestSpec,
    pub scenario: Scenario,
    pub alpha: f64,
    pub n_max: u64,
    pub n_trials: u64,
    pub checkpoints: Vec<u64>,
    pub master_seed: u64,
}

/// Result of one completed trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    /// First step at which the test rejected; `None` when censored.
    pub tau: Option<u64>,
    /// Rejection indicator at each checkpoint.
    pub rejected: Vec<bool>,
}

/// A trial that failed or panicked; it is left out of every statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialError {
    pub trial: u64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub reject_fraction: f64,
    /// Binomial standard error `sqrt(p(1-p)/N)`.
    pub stderr: f64,
}

/// Aggregated results of a [`TrialPlan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub test: String,
    pub scenario: String,
    /// Last step a trial could reach; censored trials are reported at it.
    pub horizon: u64,
    pub points: Vec<CurvePoint>,
    pub trials: Vec<TrialRecord>,
    pub errors: Vec<TrialError>,
}

impl PowerCurve {
    pub fn completed(&self) -> usize {
        self.trials.len()
    }

    pub fn stopping_times(&self) -> Vec<Option<u64>> {
        self.trials.iter().map(|t| t.tau).collect()
    }

    pub fn censored(&self) -> usize {
        self.trials.iter().filter(|t| t.tau.is_none()).count()
    }

    pub fn censor_rate(&self) -> f64 {
        self.censored() as f64 / self.completed().max(1) as f64
    }

    /// Mean stopping time over trials that rejected; censored trials are
    /// excluded and counted by [`PowerCurve::censored`].
    pub fn mean_tau(&self) -> Option<f64> {
        let taus: Vec<f64> = self
            .trials
            .iter()
            .filter_map(|t| t.tau)
            .map(|t| t as f64)
            .collect();
        (!taus.is_empty()).then(|| taus.iter().sum::<f64>() / taus.len() as f64)
    }

    /// Rejection fraction at the largest checkpoint not above `n`.
    pub fn power_at(&self, n: u64) -> Option<CurvePoint> {
        self.points.iter().rev().find(|p| p.n <= n).copied()
    }

    pub fn final_power(&self) -> Option<CurvePoint> {
        self.points.last().copied()
    }
}

impl TrialPlan {
    /// One plan per (scenario, test) pair, scenarios outermost.
    pub fn from_config(cfg: &ExperimentConfig) -> Vec<TrialPlan> {
        let checkpoints = cfg.resolved_checkpoints();
        cfg.scenarios
            .iter()
            .flat_map(|s| {
                cfg.tests.iter().map(|t| TrialPlan {
                    test: t.clone(),
                    scenario: s.clone(),
                    alpha: cfg.alpha,
                    n_max: cfg.n_max,
                    n_trials: cfg.n_trials,
                    checkpoints: checkpoints.clone(),
                    master_seed: cfg.master_seed,
                })
            })
            .collect()
    }

    /// Checkpoints a trial of this plan is scored at.
    pub fn effective_checkpoints(&self) -> Vec<u64> {
        match self.test.batch_max_n() {
            None => self.checkpoints.clone(),
            Some(max_n) => {
                let cap = max_n.min(self.n_max);
                let mut c: Vec<u64> = self.checkpoints.iter().copied().filter(|&n| n <= cap).collect();
                if c.is_empty() {
                    c.push(cap);
                }
                c
            }
        }
    }

    fn horizon(&self) -> u64 {
        match self.test.batch_max_n() {
            None => self.n_max,
            Some(_) => self.effective_checkpoints().last().copied().unwrap_or(0),
        }
    }

    /// Run trial `trial` to completion.
    pub fn run_trial(&self, trial: u64) -> Result<TrialRecord> {
        let checkpoints = self.effective_checkpoints();
        let mut rng = trial_rng(self.master_seed, trial);
        let stream = DataStream::new(&self.scenario, self.test.arity(), &mut rng)?;
        if self.test.is_batch() {
            let horizon = self.horizon() as usize;
            let data: Vec<Observation> = (0..horizon).map(|_| stream.draw(&mut rng)).collect();
            let mut rejected = Vec::with_capacity(checkpoints.len());
            for &n in &checkpoints {
                let r = self
                    .test
                    .evaluate_batch(&data[..n as usize], self.alpha, &mut rng)?;
                rejected.push(r.reject);
            }
            let tau = checkpoints
                .iter()
                .zip(&rejected)
                .find(|(_, &r)| r)
                .map(|(&n, _)| n);
            return Ok(TrialRecord { trial, tau, rejected });
        }
        let mut proc = self.test.build(self.alpha)?;
        let mut tau = None;
        for _ in 0..self.n_max {
            if let Status::Rejected { tau: t } = proc.observe(stream.draw(&mut rng))? {
                tau = Some(t);
                break;
            }
        }
        let rejected = checkpoints.iter().map(|&n| tau.is_some_and(|t| t <= n)).collect();
        Ok(TrialRecord { trial, tau, rejected })
    }

    /// Run every trial and aggregate. `jobs` bounds the worker threads;
    /// `None` uses the global pool. Output does not depend on `jobs`.
    pub fn run(&self, jobs: Option<usize>) -> Result<PowerCurve> {
        let work = || -> Vec<std::result::Result<TrialRecord, TrialError>> {
            (0..self.n_trials)
                .into_par_iter()
                .map(|i| {
                    let outcome = catch_unwind(AssertUnwindSafe(|| self.run_trial(i)));
                    let message = match outcome {
                        Ok(Ok(rec)) => return Ok(rec),
                        Ok(Err(e)) => e.to_string(),
                        Err(payload) => payload
                            .downcast_ref::<&str>()
                            .map(|s| s.to_string())
                            .or_else(|| payload.downcast_ref::<String>().cloned())
                            .unwrap_or_else(|| "panic".into()),
                    };
                    Err(TrialError { trial: i, message })
                })
                .collect()
        };
        let results = match jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                .install(work),
            None => work(),
        };
        let mut trials = Vec::new();
        let mut errors = Vec::new();
        for r in results {
            match r {
                Ok(t) => trials.push(t),
                Err(e) => errors.push(e),
            }
        }
        if trials.is_empty() {
            let first = errors.first().map(|e| e.message.clone()).unwrap_or_default();
            return Err(Error::Config(format!(
                "every trial of {} on `{}` failed; first error: {first}",
                self.test.label(),
                self.scenario.name
            )));
        }
        let checkpoints = self.effective_checkpoints();
        let total = trials.len() as f64;
        let points = checkpoints
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let hits = trials.iter().filter(|t| t.rejected[k]).count() as f64;
                let p = hits / total;
                CurvePoint {
                    n,
                    reject_fraction: p,
                    stderr: (p * (1.0 - p) / total).sqrt(),
                }
            })
            .collect();
        Ok(PowerCurve {
            test: self.test.label(),
            scenario: self.scenario.name.clone(),
            horizon: self.horizon(),
            points,
            trials,
            errors,
        })
    }
}

/// Run every (scenario, test) cell of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<PowerCurve>> {
    cfg.validate()?;
    TrialPlan::from_config(cfg).iter().map(|p| p.run(jobs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use rand::RngCore;

    fn plan(test: TestSpec, x: DistSpec, y: Option<DistSpec>) -> TrialPlan {
        TrialPlan {
            test,
            scenario: Scenario {
                name: "s".into(),
                x,
                y,
            },
            alpha: 0.05,
            n_max: 200,
            n_trials: 8,
            checkpoints: vec![10, 50, 200],
            master_seed: 7,
        }
    }

    #[test]
    fn child_seed_reference_values() {
        // SplitMix64 seeded at 0: the first two outputs.
        assert_eq!(child_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(child_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn trial_streams_differ() {
        let mut a = trial_rng(1, 0);
        let mut b = trial_rng(1, 1);
        let same = (0..100).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn curve_is_monotone_and_thread_independent() {
        let p = plan(
            TestSpec::Ks2 { band: None },
            DistSpec::Normal { mu: 0.0, sigma: 1.0 },
            Some(DistSpec::Normal { mu: 1.5, sigma: 1.0 }),
        );
        let one = p.run(Some(1)).unwrap();
        let two = p.run(Some(2)).unwrap();
        assert_eq!(one, two);
        assert!(one
            .points
            .windows(2)
            .all(|w| w[0].reject_fraction <= w[1].reject_fraction));
        assert!(one.final_power().unwrap().reject_fraction > 0.5);
    }

    #[test]
    fn batch_plans_stop_at_max_n() {
        let p = plan(
            TestSpec::BatchKs1 {
                target: DistSpec::Uniform { a: 0.0, b: 1.0 },
                max_n: 60,
            },
            DistSpec::Uniform { a: 0.0, b: 1.0 },
            None,
        );
        assert_eq!(p.effective_checkpoints(), vec![10, 50]);
        let curve = p.run(None).unwrap();
        assert_eq!(curve.horizon, 50);
        assert_eq!(curve.points.len(), 2);
    }

    #[test]
    fn failing_trials_are_recorded() {
        // Dominance needs [0, 1] data; every trial errors.
        let p = plan(
            TestSpec::Dominance {},
            DistSpec::Normal { mu: 5.0, sigma: 1.0 },
            Some(DistSpec::Normal { mu: 5.0, sigma: 1.0 }),
        );
        assert!(p.run(Some(1)).is_err());
    }
}
