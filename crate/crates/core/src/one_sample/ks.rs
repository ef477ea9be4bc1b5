//! Plug-in one-sample KS strategy.
//!
//! With `F̂_{t-1}` the empirical CDF of the first `t-1` observations, the
//! strategy scores every candidate point by `Ĝ_t(u) = |F̂_{t-1}(u) - F_P(u)|`,
//! takes `u_t` as the leftmost point whose score is within the slack of the
//! best, and bets
//!
//! ```text
//!     f_t(y) = 1{y <= u_t} - F_P(u_t),
//! ```
//!
//! which has mean zero under `P` for every `u_t`. The sign of the deviation
//! is left to the two-sided bet grid.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::candidate::{first_near_max, CandidateGrid, Slack};
use crate::dist::TargetCdf;
use crate::error::{Error, Result};

/// Maximum number of candidate points.
pub const DEFAULT_GRID_CAP: usize = 5000;

/// Band multiplier matching the one-sample confidence width `2ΔF_t`.
pub const KS1_BAND: f64 = 2.0;

/// `1{y <= u} - F_P(u)`.
pub fn ks1_payoff(y: f64, u: f64, target: &TargetCdf) -> f64 {
    let ind = if y <= u { 1.0 } else { 0.0 };
    ind - target.cdf(u)
}

/// Plug-in KS strategy against a known target CDF.
#[derive(Debug, Clone)]
pub struct Ks1Plugin {
    target: TargetCdf,
    slack: Slack,
    samples: Vec<f64>,
    grid: CandidateGrid,
    target_on_grid: Vec<f64>,
    counts: Vec<u32>,
    scores: Vec<f64>,
    current_u: Option<f64>,
}

impl Ks1Plugin {
    pub fn new(target: TargetCdf) -> Self {
        Self::with_options(target, DEFAULT_GRID_CAP, Slack::default())
    }

    pub fn with_options(target: TargetCdf, grid_cap: usize, slack: Slack) -> Self {
        Self {
            target,
            slack,
            samples: Vec::new(),
            grid: CandidateGrid::new(grid_cap),
            target_on_grid: Vec::new(),
            counts: Vec::new(),
            scores: Vec::new(),
            current_u: None,
        }
    }

    pub fn target(&self) -> &TargetCdf {
        &self.target
    }

    pub fn candidates(&self) -> &[f64] {
        self.grid.points()
    }

    /// Number of observations absorbed so far.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `u_t` for the round `t = len() + 1`; `None` before any observation.
    pub fn select_u(&self) -> Option<f64> {
        self.current_u
    }

    /// `u_t` with the round index given explicitly (it only sets the slack).
    pub fn select_u_at(&mut self, t: u64) -> Option<f64> {
        if self.samples.is_empty() {
            return None;
        }
        let n = self.samples.len() as f64;
        self.scores.clear();
        let mut below = 0u32;
        for (c, fp) in self.counts.iter().zip(&self.target_on_grid) {
            below += c;
            self.scores.push((below as f64 / n - fp).abs());
        }
        let k = first_near_max(&self.scores, self.slack.width(t));
        Some(self.grid.points()[k])
    }

    fn absorb(&mut self, x: f64) {
        self.samples.push(x);
        if self.grid.covers(x) {
            let k = self.grid.bin(x);
            self.counts[k] += 1;
        } else {
            let (lo, hi) = match (self.grid.points().first(), self.grid.points().last()) {
                (Some(&lo), Some(&hi)) => (lo.min(x), hi.max(x)),
                _ => (x, x),
            };
            self.grid.rebuild(lo, hi);
            self.target_on_grid.clear();
            let target = &self.target;
            self.target_on_grid
                .extend(self.grid.points().iter().map(|&u| target.cdf(u)));
            self.grid.histogram(&self.samples, &mut self.counts);
        }
    }
}

impl PayoffStrategy for Ks1Plugin {
    type Obs = f64;

    fn side(&self) -> BetSide {
        BetSide::TwoSided
    }

    fn payoff(&mut self, y: &f64) -> Result<Payoff> {
        if y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        Ok(Payoff::Single(match self.current_u {
            None => 0.0,
            Some(u) => ks1_payoff(*y, u, &self.target),
        }))
    }

    fn observe(&mut self, x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        self.absorb(x);
        let t = self.samples.len() as u64 + 1;
        self.current_u = self.select_u_at(t);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::delta_f;

    fn brute_u(samples: &[f64], target: &TargetCdf, cap: usize, slack: f64) -> f64 {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let grid: Vec<f64> = if lo == hi {
            vec![hi]
        } else {
            (0..cap)
                .map(|k| {
                    if k == cap - 1 {
                        hi
                    } else {
                        lo + (hi - lo) / (cap - 1) as f64 * k as f64
                    }
                })
                .collect()
        };
        let n = samples.len() as f64;
        let g: Vec<f64> = grid
            .iter()
            .map(|&u| (samples.iter().filter(|&&s| s <= u).count() as f64 / n - target.cdf(u)).abs())
            .collect();
        let best = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        grid[g.iter().position(|&v| v >= best - slack).unwrap()]
    }

    #[test]
    fn payoff_examples() {
        let p = TargetCdf::uniform01();
        assert!((ks1_payoff(0.2, 0.5, &p) - 0.5).abs() < 1e-15);
        assert!((ks1_payoff(0.9, 0.5, &p) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn first_round_is_a_null_bet() {
        let mut s = Ks1Plugin::new(TargetCdf::uniform01());
        assert_eq!(s.payoff(&0.3).unwrap(), Payoff::Single(0.0));
    }

    #[test]
    fn wide_band_takes_leftmost_point() {
        let mut s = Ks1Plugin::with_options(TargetCdf::uniform01(), 100, Slack::Band(KS1_BAND));
        s.observe(0.4).unwrap();
        // 2ΔF_2 > 1 >= Ĝ*, so every candidate qualifies.
        assert!(2.0 * delta_f(2) > 1.0);
        assert_eq!(s.select_u(), Some(0.4));
        s.observe(0.9).unwrap();
        assert_eq!(s.select_u(), Some(0.4));
    }

    #[test]
    fn argmax_example() {
        let mut s = Ks1Plugin::with_options(TargetCdf::uniform01(), 5000, Slack::Argmax);
        for x in [0.1, 0.2, 0.3] {
            s.observe(x).unwrap();
        }
        let u = s.select_u().unwrap();
        assert_eq!(u, 0.3);
        assert!((s.scores.last().unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn null_configuration_takes_min_point() {
        let target = TargetCdf::from_spec(&crate::dist::DistSpec::Discrete {
            support: Some(vec![0.0, 1.0]),
            pmf: vec![0.5, 0.5],
        })
        .unwrap();
        let mut s = Ks1Plugin::with_options(target, 11, Slack::Argmax);
        s.observe(0.0).unwrap();
        s.observe(1.0).unwrap();
        // F̂ = F_P at every candidate.
        assert_eq!(s.select_u(), Some(0.0));
    }

    #[test]
    fn incremental_grid_matches_brute_force() {
        let target = TargetCdf::from_spec(&crate::dist::DistSpec::Normal { mu: 0.0, sigma: 1.0 }).unwrap();
        for slack in [Slack::Argmax, Slack::Band(KS1_BAND)] {
            let mut s = Ks1Plugin::with_options(target.clone(), 37, slack);
            let mut seen = Vec::new();
            for i in 0..300 {
                let x = ((i as f64 * 0.754_877_666).fract() - 0.4) * 3.0;
                s.observe(x).unwrap();
                seen.push(x);
                let t = seen.len() as u64 + 1;
                let want = brute_u(&seen, &target, 37, slack.width(t));
                assert_eq!(s.select_u(), Some(want), "step {i}");
            }
        }
    }
}
