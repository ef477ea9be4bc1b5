//! Named test configurations, shared by the CLI, the simulation harness and
//! the C API.
//!
//! A [`TestSpec`] either builds a [`SequentialProcedure`] that consumes one
//! observation at a time, or (for the batch baselines) evaluates a fixed
//! sample prefix with [`TestSpec::evaluate_batch`].

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    batch_chi2, batch_ks1, batch_ks2, batch_mmd, BaselineResult, BrMmd, KsBoundary, MrMmd, SequentialKs1,
    SequentialKs2,
};
use crate::betting::{PayoffStrategy, SequentialTest};
use crate::candidate::Slack;
use crate::dist::{DistSpec, TargetCdf};
use crate::error::{Error, Result};
use crate::extensions::{DominancePlugin, SymmetryPlugin};
use crate::observation::Observation;
use crate::one_sample::{Chi2Mode, Chi2Strategy, ExpWeightsKs, Ks1Plugin, DEFAULT_GRID_CAP};
use crate::procedure::SequentialProcedure;
use crate::two_sample::{GaussianKernel, Ks2Plugin, KtMmd, MmdPlugin};

/// Payoff-selection rule for tests that offer more than one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Plugin,
    /// Exponential weights over a grid of KS witnesses.
    Ew,
    /// Projected gradient steps on the simplex.
    Pgd,
    /// Krichevsky-Trofimov coin betting.
    Kt,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plugin" => Ok(Strategy::Plugin),
            "ew" => Ok(Strategy::Ew),
            "pgd" => Ok(Strategy::Pgd),
            "kt" => Ok(Strategy::Kt),
            _ => Err(Error::Config(format!("unknown strategy `{s}`"))),
        }
    }
}

fn default_bandwidth() -> f64 {
    1.0
}

fn default_batch_max_n() -> u64 {
    400
}

fn default_n_boot() -> usize {
    200
}

/// A test and its parameters. Serialized with a `"test"` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestSpec {
    /// Betting KS goodness of fit.
    Ks1 {
        target: DistSpec,
        #[serde(default)]
        strategy: Strategy,
        /// Near-max band multiplier for the plug-in choice; argmax if absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        band: Option<f64>,
    },
    /// Betting χ² goodness of fit on symbols `0..pmf.len()`.
    Chi2 {
        pmf: Vec<f64>,
        #[serde(default)]
        strategy: Strategy,
    },
    Ks2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        band: Option<f64>,
    },
    Mmd {
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
        #[serde(default)]
        strategy: Strategy,
    },
    Dominance {},
    Symmetry {},
    HrKs1 {
        target: DistSpec,
    },
    DrKs1 {
        target: DistSpec,
    },
    HrKs2 {},
    DrKs2 {},
    MrMmd {
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
    },
    BrMmd {
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
    },
    BatchKs1 {
        target: DistSpec,
        #[serde(default = "default_batch_max_n")]
        max_n: u64,
    },
    BatchKs2 {
        #[serde(default = "default_batch_max_n")]
        max_n: u64,
    },
    BatchChi2 {
        pmf: Vec<f64>,
        #[serde(default = "default_batch_max_n")]
        max_n: u64,
    },
    BatchMmd {
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
        #[serde(default = "default_n_boot")]
        n_boot: usize,
        #[serde(default = "default_batch_max_n")]
        max_n: u64,
    },
}

/// How many samples a test consumes per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    One,
    Two,
}

fn slack(band: Option<f64>) -> Result<Slack> {
    match band {
        None => Ok(Slack::Argmax),
        Some(c) if c >= 0.0 && c.is_finite() => Ok(Slack::Band(c)),
        Some(c) => Err(Error::Config(format!(
            "band must be a finite nonnegative number, got {c}"
        ))),
    }
}

fn only(strategy: Strategy, allowed: &[Strategy], test: &str) -> Result<()> {
    if allowed.contains(&strategy) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "strategy `{}` is not available for {test}",
            serde_json::to_string(&strategy)
                .unwrap_or_default()
                .trim_matches('"')
        )))
    }
}

fn boxed<S>(strategy: S, alpha: f64) -> Result<Box<dyn SequentialProcedure>>
where
    SequentialTest<S>: SequentialProcedure + 'static,
    S: PayoffStrategy,
{
    Ok(Box::new(SequentialTest::new(strategy, alpha)?))
}

fn pmf_check(pmf: &[f64]) -> Result<()> {
    DistSpec::Discrete {
        support: None,
        pmf: pmf.to_vec(),
    }
    .validate()
}

impl TestSpec {
    /// Short identifier used in file names and reports.
    pub fn label(&self) -> String {
        let with = |base: &str, s: &Strategy| match s {
            Strategy::Plugin => base.to_string(),
            Strategy::Ew => format!("{base}_ew"),
            Strategy::Pgd => format!("{base}_pgd"),
            Strategy::Kt => format!("{base}_kt"),
        };
        match self {
            TestSpec::Ks1 { strategy, .. } => with("ks1", strategy),
            TestSpec::Chi2 { strategy, .. } => with("chi2", strategy),
            TestSpec::Ks2 { .. } => "ks2".into(),
            TestSpec::Mmd { strategy, .. } => with("mmd", strategy),
            TestSpec::Dominance {} => "dominance".into(),
            TestSpec::Symmetry {} => "symmetry".into(),
            TestSpec::HrKs1 { .. } => "hr_ks1".into(),
            TestSpec::DrKs1 { .. } => "dr_ks1".into(),
            TestSpec::HrKs2 {} => "hr_ks2".into(),
            TestSpec::DrKs2 {} => "dr_ks2".into(),
            TestSpec::MrMmd { .. } => "mr_mmd".into(),
            TestSpec::BrMmd { .. } => "br_mmd".into(),
            TestSpec::BatchKs1 { .. } => "batch_ks1".into(),
            TestSpec::BatchKs2 { .. } => "batch_ks2".into(),
            TestSpec::BatchChi2 { .. } => "batch_chi2".into(),
            TestSpec::BatchMmd { .. } => "batch_mmd".into(),
        }
    }

    pub fn arity(&self) -> Arity {
        match self {
            TestSpec::Ks1 { .. }
            | TestSpec::Chi2 { .. }
            | TestSpec::Symmetry {}
            | TestSpec::HrKs1 { .. }
            | TestSpec::DrKs1 { .. }
            | TestSpec::BatchKs1 { .. }
            | TestSpec::BatchChi2 { .. } => Arity::One,
            _ => Arity::Two,
        }
    }

    pub fn is_batch(&self) -> bool {
        self.batch_max_n().is_some()
    }

    /// Largest sample size a batch baseline is evaluated at.
    pub fn batch_max_n(&self) -> Option<u64> {
        match self {
            TestSpec::BatchKs1 { max_n, .. }
            | TestSpec::BatchKs2 { max_n }
            | TestSpec::BatchChi2 { max_n, .. }
            | TestSpec::BatchMmd { max_n, .. } => Some(*max_n),
            _ => None,
        }
    }

    /// Parameter checks that do not need a build.
    pub fn validate(&self) -> Result<()> {
        if self.is_batch() {
            if self.batch_max_n() == Some(0) {
                return Err(Error::Config("max_n must be positive".into()));
            }
            if let TestSpec::BatchMmd {
                bandwidth, n_boot, ..
            } = self
            {
                GaussianKernel::new(*bandwidth)?;
                if *n_boot == 0 {
                    return Err(Error::Config("n_boot must be positive".into()));
                }
            }
            if let TestSpec::BatchKs1 { target, .. } = self {
                TargetCdf::from_spec(target)?;
            }
            if let TestSpec::BatchChi2 { pmf, .. } = self {
                pmf_check(pmf)?;
            }
            return Ok(());
        }
        self.build(0.05).map(|_| ())
    }

    /// Build the sequential procedure. Fails for batch baselines.
    pub fn build(&self, alpha: f64) -> Result<Box<dyn SequentialProcedure>> {
        match self {
            TestSpec::Ks1 {
                target,
                strategy,
                band,
            } => {
                only(*strategy, &[Strategy::Plugin, Strategy::Ew], "ks1")?;
                let target = TargetCdf::from_spec(target)?;
                match strategy {
                    Strategy::Ew => {
                        if band.is_some() {
                            return Err(Error::Config("band applies to the plug-in strategy".into()));
                        }
                        boxed(ExpWeightsKs::new(&target)?, alpha)
                    }
                    _ => boxed(
                        Ks1Plugin::with_options(target, DEFAULT_GRID_CAP, slack(*band)?),
                        alpha,
                    ),
                }
            }
            TestSpec::Chi2 { pmf, strategy } => {
                only(*strategy, &[Strategy::Plugin, Strategy::Pgd], "chi2")?;
                pmf_check(pmf)?;
                let mode = match strategy {
                    Strategy::Pgd => Chi2Mode::Pgd,
                    _ => Chi2Mode::Plugin,
                };
                boxed(Chi2Strategy::new(pmf.clone(), mode)?, alpha)
            }
            TestSpec::Ks2 { band } => boxed(Ks2Plugin::with_options(DEFAULT_GRID_CAP, slack(*band)?), alpha),
            TestSpec::Mmd { bandwidth, strategy } => {
                only(*strategy, &[Strategy::Plugin, Strategy::Kt], "mmd")?;
                let kernel = GaussianKernel::new(*bandwidth)?;
                match strategy {
                    Strategy::Kt => boxed(KtMmd::new(kernel), alpha),
                    _ => boxed(MmdPlugin::new(kernel), alpha),
                }
            }
            TestSpec::Dominance {} => boxed(DominancePlugin::new(), alpha),
            TestSpec::Symmetry {} => boxed(SymmetryPlugin::new(), alpha),
            TestSpec::HrKs1 { target } => Ok(Box::new(SequentialKs1::new(
                TargetCdf::from_spec(target)?,
                KsBoundary::HowardRamdas,
                alpha,
            )?)),
            TestSpec::DrKs1 { target } => Ok(Box::new(SequentialKs1::new(
                TargetCdf::from_spec(target)?,
                KsBoundary::DarlingRobbins,
                alpha,
            )?)),
            TestSpec::HrKs2 {} => Ok(Box::new(SequentialKs2::new(KsBoundary::HowardRamdas, alpha)?)),
            TestSpec::DrKs2 {} => Ok(Box::new(SequentialKs2::new(KsBoundary::DarlingRobbins, alpha)?)),
            TestSpec::MrMmd { bandwidth } => {
                Ok(Box::new(MrMmd::new(GaussianKernel::new(*bandwidth)?, alpha)?))
            }
            TestSpec::BrMmd { bandwidth } => {
                Ok(Box::new(BrMmd::new(GaussianKernel::new(*bandwidth)?, alpha)?))
            }
            _ => Err(Error::Config(format!(
                "{} is a batch test; evaluate it on a fixed sample",
                self.label()
            ))),
        }
    }

    /// Run a batch baseline on the observations `obs` (all of one kind).
    pub fn evaluate_batch(
        &self,
        obs: &[Observation],
        alpha: f64,
        rng: &mut dyn RngCore,
    ) -> Result<BaselineResult> {
        match self {
            TestSpec::BatchKs1 { target, .. } => {
                let mut xs = scalars(obs)?;
                xs.sort_by(f64::total_cmp);
                batch_ks1(&xs, &TargetCdf::from_spec(target)?, alpha)
            }
            TestSpec::BatchChi2 { pmf, .. } => {
                let mut counts = vec![0u64; pmf.len()];
                for y in scalars(obs)? {
                    let ok = y >= 0.0 && y.fract() == 0.0 && (y as usize) < pmf.len();
                    if !ok {
                        // Impossible under the null.
                        return Ok(BaselineResult::batch(f64::INFINITY, 0.0));
                    }
                    counts[y as usize] += 1;
                }
                batch_chi2(&counts, pmf, alpha)
            }
            TestSpec::BatchKs2 { .. } => {
                let (mut xs, mut ys): (Vec<f64>, Vec<f64>) = pairs(obs)?
                    .into_iter()
                    .map(|(x, y)| {
                        if x.len() == 1 && y.len() == 1 {
                            Ok((x[0], y[0]))
                        } else {
                            Err(Error::WrongObservation("batch KS2 needs scalar pairs".into()))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .unzip();
                xs.sort_by(f64::total_cmp);
                ys.sort_by(f64::total_cmp);
                batch_ks2(&xs, &ys, alpha)
            }
            TestSpec::BatchMmd {
                bandwidth, n_boot, ..
            } => {
                let (xs, ys): (Vec<Vec<f64>>, Vec<Vec<f64>>) = pairs(obs)?.into_iter().unzip();
                batch_mmd(&xs, &ys, &GaussianKernel::new(*bandwidth)?, alpha, *n_boot, rng)
            }
            _ => Err(Error::Config(format!("{} is not a batch test", self.label()))),
        }
    }
}

fn scalars(obs: &[Observation]) -> Result<Vec<f64>> {
    obs.iter()
        .map(|o| match o {
            Observation::Scalar(v) => Ok(*v),
            other => Err(Error::WrongObservation(format!(
                "expected a scalar, got {}",
                other.kind()
            ))),
        })
        .collect()
}

fn pairs(obs: &[Observation]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    obs.iter()
        .map(|o| match o {
            Observation::Pair(x, y) => Ok((vec![*x], vec![*y])),
            Observation::Vectors(x, y) => Ok((x.clone(), y.clone())),
            other => Err(Error::WrongObservation(format!(
                "expected a pair, got {}",
                other.kind()
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let spec: TestSpec = serde_json::from_str(r#"{"test":"mmd","strategy":"kt"}"#).unwrap();
        assert_eq!(
            spec,
            TestSpec::Mmd {
                bandwidth: 1.0,
                strategy: Strategy::Kt
            }
        );
        assert_eq!(spec.label(), "mmd_kt");
        let back: TestSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<TestSpec>(r#"{"test":"ks2","bogus":1}"#).is_err());
        assert!(serde_json::from_str::<TestSpec>(r#"{"test":"nope"}"#).is_err());
    }

    #[test]
    fn strategy_compatibility() {
        let bad = TestSpec::Ks1 {
            target: DistSpec::Uniform { a: 0.0, b: 1.0 },
            strategy: Strategy::Kt,
            band: None,
        };
        assert!(bad.validate().is_err());
        let ok = TestSpec::Chi2 {
            pmf: vec![0.5, 0.5],
            strategy: Strategy::Pgd,
        };
        ok.validate().unwrap();
    }

    #[test]
    fn batch_specs_do_not_build() {
        let spec = TestSpec::BatchKs2 { max_n: 10 };
        assert!(spec.is_batch());
        assert!(spec.build(0.05).is_err());
        spec.validate().unwrap();
    }

    #[test]
    fn chi2_batch_flags_foreign_symbols() {
        let spec = TestSpec::BatchChi2 {
            pmf: vec![0.5, 0.5],
            max_n: 10,
        };
        let mut rng = rand::rng();
        let r = spec
            .evaluate_batch(
                &[Observation::Scalar(0.0), Observation::Scalar(7.0)],
                0.05,
                &mut rng,
            )
            .unwrap();
        assert!(r.reject);
    }
}
