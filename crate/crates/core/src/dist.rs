//! Synthetic data distributions and the target CDFs used by one-sample tests.

use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Description of a data-generating distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum DistSpec {
    #[serde(rename = "normal")]
    Normal { mu: f64, sigma: f64 },
    /// Multivariate normal with identity covariance.
    #[serde(rename = "mvnormal")]
    MvNormal { mean: Vec<f64> },
    #[serde(rename = "uniform")]
    Uniform { a: f64, b: f64 },
    /// Beta on `[0, 1]` with shapes `a, b > 0`.
    #[serde(rename = "beta")]
    Beta { a: f64, b: f64 },
    /// Finite distribution; symbols default to `0, 1, ..., m-1`.
    #[serde(rename = "discrete")]
    Discrete {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<Vec<f64>>,
        pmf: Vec<f64>,
    },
    /// Piecewise-constant density: `densities[k]` on `[breakpoints[k], breakpoints[k+1])`.
    #[serde(rename = "piecewise")]
    Piecewise {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
    },
    /// Uniform on `m` symbols with `j` symbols raised by `eps` and `j` others
    /// lowered by `eps`, the subsets drawn afresh per trial.
    #[serde(rename = "q_j_eps")]
    QJEps { m: usize, j: usize, eps: f64 },
}

impl DistSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Distribution(msg));
        match self {
            DistSpec::Normal { mu, sigma } => {
                if !(mu.is_finite() && *sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!(
                        "normal needs finite mu and sigma > 0, got ({mu}, {sigma})"
                    ));
                }
            }
            DistSpec::MvNormal { mean } => {
                if mean.is_empty() || mean.iter().any(|m| !m.is_finite()) {
                    return bad("mvnormal needs a nonempty finite mean".into());
                }
            }
            DistSpec::Uniform { a, b } => {
                if !(a < b && a.is_finite() && b.is_finite()) {
                    return bad(format!("uniform needs a < b, got ({a}, {b})"));
                }
            }
            DistSpec::Beta { a, b } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("beta needs positive finite shapes, got ({a}, {b})"));
                }
            }
            DistSpec::Discrete { support, pmf } => {
                check_pmf(pmf)?;
                if let Some(s) = support {
                    if s.len() != pmf.len() {
                        return bad(format!("{} support points for {} masses", s.len(), pmf.len()));
                    }
                    let mut sorted = s.clone();
                    sorted.sort_by(f64::total_cmp);
                    if sorted.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|v| !v.is_finite()) {
                        return bad("support points must be finite and distinct".into());
                    }
                }
            }
            DistSpec::Piecewise {
                breakpoints,
                densities,
            } => {
                if breakpoints.len() < 2 || densities.len() + 1 != breakpoints.len() {
                    return bad("piecewise needs k+1 breakpoints for k densities".into());
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("breakpoints must be strictly increasing".into());
                }
                if densities.iter().any(|d| !(*d >= 0.0)) {
                    return bad("densities must be nonnegative".into());
                }
                let mass: f64 = piece_masses(breakpoints, densities).iter().sum();
                if (mass - 1.0).abs() > 1e-9 {
                    return bad(format!("densities integrate to {mass}, not 1"));
                }
            }
            DistSpec::QJEps { m, j, eps } => {
                if *m < 2 || *j == 0 || *j > m / 2 {
                    return bad(format!(
                        "q_j_eps needs m >= 2 and 1 <= j <= m/2, got m={m}, j={j}"
                    ));
                }
                if !(*eps > 0.0 && *eps < 1.0 / *m as f64) {
                    return bad(format!("q_j_eps needs 0 < eps < 1/m, got {eps}"));
                }
            }
        }
        Ok(())
    }

    /// Dimension of one draw.
    pub fn dim(&self) -> usize {
        match self {
            DistSpec::MvNormal { mean } => mean.len(),
            _ => 1,
        }
    }

    /// Resolve any per-trial randomness and precompute sampling tables.
    pub fn sampler<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sampler> {
        self.validate()?;
        Ok(match self {
            DistSpec::Normal { mu, sigma } => Sampler::Normal {
                mu: *mu,
                sigma: *sigma,
            },
            DistSpec::MvNormal { mean } => Sampler::MvNormal { mean: mean.clone() },
            DistSpec::Uniform { a, b } => Sampler::Uniform { a: *a, b: *b },
            DistSpec::Beta { a, b } => {
                Sampler::Beta(BetaDist::new(*a, *b).map_err(|e| Error::Distribution(e.to_string()))?)
            }
            DistSpec::Discrete { support, pmf } => Sampler::discrete(support.as_deref(), pmf),
            DistSpec::Piecewise {
                breakpoints,
                densities,
            } => {
                let masses = piece_masses(breakpoints, densities);
                Sampler::Piecewise {
                    breakpoints: breakpoints.clone(),
                    cumulative: cumulative(&masses),
                }
            }
            DistSpec::QJEps { m, j, eps } => match make_q_j_eps(*m, *j, *eps, rng)? {
                DistSpec::Discrete { support, pmf } => Sampler::discrete(support.as_deref(), &pmf),
                _ => unreachable!("make_q_j_eps returns a discrete spec"),
            },
        })
    }
}

fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() || pmf.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::Distribution("pmf must be nonempty and nonnegative".into()));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Distribution(format!("pmf sums to {total}, not 1")));
    }
    Ok(())
}

fn piece_masses(breakpoints: &[f64], densities: &[f64]) -> Vec<f64> {
    breakpoints
        .windows(2)
        .zip(densities)
        .map(|(w, d)| (w[1] - w[0]) * d)
        .collect()
}

fn cumulative(masses: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = masses
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

/// Alternative for the finite-alphabet experiments: uniform `p` on `m`
/// symbols, `q = p + eps` on a random `j`-set and `q = p - eps` on a disjoint
/// random `j`-set.
pub fn make_q_j_eps<R: Rng + ?Sized>(m: usize, j: usize, eps: f64, rng: &mut R) -> Result<DistSpec> {
    DistSpec::QJEps { m, j, eps }.validate()?;
    let base = 1.0 / m as f64;
    let mut pmf = vec![base; m];
    // First j of the draw are raised, the next j lowered.
    let chosen = sample_indices(rng, m, 2 * j);
    for (k, idx) in chosen.iter().enumerate() {
        pmf[idx] += if k < j { eps } else { -eps };
    }
    Ok(DistSpec::Discrete { support: None, pmf })
}

/// A ready-to-draw distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Normal {
        mu: f64,
        sigma: f64,
    },
    MvNormal {
        mean: Vec<f64>,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Beta(BetaDist<f64>),
    Discrete {
        values: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl Sampler {
    fn discrete(support: Option<&[f64]>, pmf: &[f64]) -> Self {
        let values = match support {
            Some(s) => s.to_vec(),
            None => (0..pmf.len()).map(|k| k as f64).collect(),
        };
        Sampler::Discrete {
            values,
            cumulative: cumulative(pmf),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Sampler::MvNormal { mean } => mean.len(),
            _ => 1,
        }
    }

    /// One scalar draw; multivariate samplers return their first coordinate.
    pub fn scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Normal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            Sampler::MvNormal { mean } => {
                let z: f64 = StandardNormal.sample(rng);
                mean[0] + z
            }
            Sampler::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Sampler::Beta(d) => d.sample(rng),
            Sampler::Discrete { values, cumulative } => {
                let u: f64 = rng.random();
                values[first_above(cumulative, u)]
            }
            Sampler::Piecewise {
                breakpoints,
                cumulative,
            } => {
                let u: f64 = rng.random();
                let k = first_above(cumulative, u);
                let lo_mass = if k == 0 { 0.0 } else { cumulative[k - 1] };
                let frac = (u - lo_mass) / (cumulative[k] - lo_mass);
                breakpoints[k] + frac * (breakpoints[k + 1] - breakpoints[k])
            }
        }
    }

    /// One draw written into `out` (cleared first).
    pub fn point_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Sampler::MvNormal { mean } => out.extend(mean.iter().map(|m| {
                let z: f64 = StandardNormal.sample(rng);
                m + z
            })),
            _ => out.push(self.scalar(rng)),
        }
    }

    pub fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        self.point_into(rng, &mut v);
        v
    }
}

/// First index whose cumulative mass exceeds `u` (zero-mass cells are skipped).
fn first_above(cumulative: &[f64], u: f64) -> usize {
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

/// Known null distribution of a one-sample test, exposing `F_P` and its left limit.
#[derive(Debug, Clone)]
pub enum TargetCdf {
    Normal(Normal),
    Uniform {
        a: f64,
        b: f64,
    },
    Beta(Beta),
    Discrete {
        values: Vec<f64>,
        pmf: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl TargetCdf {
    pub fn from_spec(spec: &DistSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            DistSpec::Normal { mu, sigma } => {
                TargetCdf::Normal(Normal::new(*mu, *sigma).map_err(|e| Error::Distribution(e.to_string()))?)
            }
            DistSpec::Uniform { a, b } => TargetCdf::Uniform { a: *a, b: *b },
            DistSpec::Beta { a, b } => {
                TargetCdf::Beta(Beta::new(*a, *b).map_err(|e| Error::Distribution(e.to_string()))?)
            }
            DistSpec::Discrete { support, pmf } => {
                let values: Vec<f64> = match support {
                    Some(s) => s.clone(),
                    None => (0..pmf.len()).map(|k| k as f64).collect(),
                };
                let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(pmf.iter().copied()).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let (values, pmf): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                let cumulative = cumulative(&pmf);
                TargetCdf::Discrete {
                    values,
                    pmf,
                    cumulative,
                }
            }
            DistSpec::Piecewise {
                breakpoints,
                densities,
            } => TargetCdf::Piecewise {
                cumulative: cumulative(&piece_masses(breakpoints, densities)),
                breakpoints: breakpoints.clone(),
                densities: densities.clone(),
            },
            DistSpec::MvNormal { .. } | DistSpec::QJEps { .. } => {
                return Err(Error::Distribution(
                    "target must be a known univariate distribution".into(),
                ))
            }
        })
    }

    pub fn uniform01() -> Self {
        TargetCdf::Uniform { a: 0.0, b: 1.0 }
    }

    /// `F_P(x) = P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            TargetCdf::Normal(n) => n.cdf(x),
            TargetCdf::Beta(d) => d.cdf(x),
            TargetCdf::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            TargetCdf::Discrete {
                values, cumulative, ..
            } => {
                let k = values.partition_point(|&v| v <= x);
                if k == 0 {
                    0.0
                } else {
                    cumulative[k - 1]
                }
            }
            TargetCdf::Piecewise {
                breakpoints,
                densities,
                cumulative,
            } => {
                if x <= breakpoints[0] {
                    return 0.0;
                }
                if x >= breakpoints[breakpoints.len() - 1] {
                    return 1.0;
                }
                let k = breakpoints.partition_point(|&b| b <= x) - 1;
                let below = if k == 0 { 0.0 } else { cumulative[k - 1] };
                below + densities[k] * (x - breakpoints[k])
            }
        }
    }

    /// `F_P(x-) = P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self {
            TargetCdf::Discrete {
                values, cumulative, ..
            } => {
                let k = values.partition_point(|&v| v < x);
                if k == 0 {
                    0.0
                } else {
                    cumulative[k - 1]
                }
            }
            _ => self.cdf(x),
        }
    }

    /// Generalised inverse `inf{x : F_P(x) >= p}` for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            TargetCdf::Normal(n) => n.inverse_cdf(p),
            TargetCdf::Beta(d) => d.inverse_cdf(p),
            TargetCdf::Uniform { a, b } => a + p * (b - a),
            TargetCdf::Discrete {
                values, cumulative, ..
            } => values[cumulative.partition_point(|&c| c < p).min(values.len() - 1)],
            TargetCdf::Piecewise {
                breakpoints,
                densities,
                cumulative,
            } => {
                let k = cumulative.partition_point(|&c| c < p).min(densities.len() - 1);
                let below = if k == 0 { 0.0 } else { cumulative[k - 1] };
                if densities[k] == 0.0 {
                    breakpoints[k]
                } else {
                    breakpoints[k] + (p - below) / densities[k]
                }
            }
        }
    }

    /// Support points for finite targets.
    pub fn atoms(&self) -> Option<(&[f64], &[f64])> {
        match self {
            TargetCdf::Discrete { values, pmf, .. } => Some((values, pmf)),
            _ => None,
        }
    }

    /// Evaluation points for the exponential-weights KS strategy: an even
    /// grid on a bounded support, quantile midpoints otherwise, the atoms of
    /// a finite target.
    pub fn expert_grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        match self {
            TargetCdf::Uniform { a, b } => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            TargetCdf::Discrete { values, .. } => values.clone(),
            _ => (0..n)
                .map(|k| self.quantile((k as f64 + 0.5) / n as f64))
                .collect(),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    /// Mini-language: `uniform:a,b`, `normal:mu,sigma`, `discrete:p1,p2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Distribution(format!("expected <kind>:<params>, got `{s}`")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Distribution(format!("bad number in `{s}`: {e}")))?;
        let spec = match (kind.trim(), nums.as_slice()) {
            ("uniform", [a, b]) => DistSpec::Uniform { a: *a, b: *b },
            ("normal", [mu, sigma]) => DistSpec::Normal {
                mu: *mu,
                sigma: *sigma,
            },
            ("discrete", pmf) if !pmf.is_empty() => DistSpec::Discrete {
                support: None,
                pmf: pmf.to_vec(),
            },
            _ => {
                return Err(Error::Distribution(format!(
                    "unknown target `{s}`; use uniform:a,b | normal:mu,sigma | discrete:p1,p2,..."
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_density() -> DistSpec {
        DistSpec::Piecewise {
            breakpoints: vec![-1.0, 0.0, 1.0],
            densities: vec![0.2, 0.8],
        }
    }

    #[test]
    fn uniform_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = DistSpec::Uniform { a: 0.0, b: 1.0 }.sampler(&mut rng).unwrap();
        let mean: f64 = (0..100_000).map(|_| s.scalar(&mut rng)).sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn piecewise_mass_on_positive_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = example_density().sampler(&mut rng).unwrap();
        let pos = (0..10_000).filter(|_| s.scalar(&mut rng) >= 0.0).count();
        let frac = pos as f64 / 1e4;
        assert!((frac - 0.8).abs() < 0.02, "{frac}");
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let spec = DistSpec::Normal { mu: 1.0, sigma: 2.0 };
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = spec.sampler(&mut rng).unwrap();
            (0..50).map(|_| s.scalar(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn q_j_eps_is_a_valid_perturbation() {
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let DistSpec::Discrete { pmf, .. } = make_q_j_eps(10, 2, 0.004, &mut rng).unwrap() else {
                panic!()
            };
            let total: f64 = pmf.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            let changed = pmf.iter().filter(|p| (*p - 0.1).abs() > 1e-12).count();
            assert_eq!(changed, 4);
            let min = pmf.iter().copied().fold(1.0, f64::min);
            assert!((min - 0.096).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_two_one_is_sqrt_of_uniform() {
        let spec: DistSpec = serde_json::from_str(r#"{"beta":{"a":2.0,"b":1.0}}"#).unwrap();
        let target = TargetCdf::from_spec(&spec).unwrap();
        // P(sqrt(U) <= x) = x².
        for x in [0.1, 0.5, 0.9] {
            assert!((target.cdf(x) - x * x).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = spec.sampler(&mut rng).unwrap();
        let mean = (0..100_000).map(|_| s.scalar(&mut rng)).sum::<f64>() / 1e5;
        assert!((mean - 2.0 / 3.0).abs() < 0.005, "{mean}");
        assert!(DistSpec::Beta { a: 0.0, b: 1.0 }.validate().is_err());
    }

    #[test]
    fn q_j_eps_tiny_eps_is_nearly_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let DistSpec::Discrete { pmf, .. } = make_q_j_eps(10, 5, 1e-15, &mut rng).unwrap() else {
            panic!()
        };
        assert!(pmf.iter().all(|p| (p - 0.1).abs() < 1e-14));
    }

    #[test]
    fn q_j_eps_preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(make_q_j_eps(10, 6, 0.01, &mut rng).is_err());
        assert!(make_q_j_eps(10, 2, 0.1, &mut rng).is_err());
        assert!(make_q_j_eps(10, 2, 0.0, &mut rng).is_err());
    }

    #[test]
    fn validation() {
        assert!(DistSpec::Normal { mu: 0.0, sigma: 0.0 }.validate().is_err());
        assert!(DistSpec::Discrete {
            support: None,
            pmf: vec![0.5, 0.6]
        }
        .validate()
        .is_err());
        assert!(DistSpec::Piecewise {
            breakpoints: vec![0.0, 1.0],
            densities: vec![0.5]
        }
        .validate()
        .is_err());
        assert!(example_density().validate().is_ok());
    }

    #[test]
    fn target_mini_language() {
        assert_eq!(
            "uniform:0,1".parse::<DistSpec>().unwrap(),
            DistSpec::Uniform { a: 0.0, b: 1.0 }
        );
        assert_eq!(
            "normal:0.5,2".parse::<DistSpec>().unwrap(),
            DistSpec::Normal { mu: 0.5, sigma: 2.0 }
        );
        assert_eq!(
            "discrete:0.25,0.75".parse::<DistSpec>().unwrap(),
            DistSpec::Discrete {
                support: None,
                pmf: vec![0.25, 0.75]
            }
        );
        assert!("uniform:1".parse::<DistSpec>().is_err());
        assert!("gamma:1,2".parse::<DistSpec>().is_err());
        assert!("discrete:0.2,0.2".parse::<DistSpec>().is_err());
    }

    #[test]
    fn json_shape() {
        let s: DistSpec = serde_json::from_str(r#"{"mvnormal": {"mean": [0.5, 0.5]}}"#).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(serde_json::from_str::<DistSpec>(r#"{"normal": {"mu": 0, "sigma": 1, "x": 2}}"#).is_err());
    }

    #[test]
    fn target_cdfs() {
        let d = TargetCdf::from_spec(&DistSpec::Discrete {
            support: Some(vec![2.0, 0.0, 1.0]),
            pmf: vec![0.5, 0.25, 0.25],
        })
        .unwrap();
        assert_eq!(d.cdf(-0.5), 0.0);
        assert_eq!(d.cdf(0.0), 0.25);
        assert_eq!(d.cdf_left(0.0), 0.0);
        assert_eq!(d.cdf(1.5), 0.5);
        assert_eq!(d.cdf_left(2.0), 0.5);
        assert_eq!(d.cdf(2.0), 1.0);
        assert_eq!(d.quantile(0.3), 1.0);

        let p = TargetCdf::from_spec(&example_density()).unwrap();
        assert!((p.cdf(0.0) - 0.2).abs() < 1e-12);
        assert!((p.cdf(0.5) - 0.6).abs() < 1e-12);
        assert!((p.quantile(0.6) - 0.5).abs() < 1e-12);

        let n = TargetCdf::from_spec(&DistSpec::Normal { mu: 0.0, sigma: 1.0 }).unwrap();
        assert!((n.cdf(0.0) - 0.5).abs() < 1e-15);
        let grid = n.expert_grid(512);
        assert_eq!(grid.len(), 512);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
}
