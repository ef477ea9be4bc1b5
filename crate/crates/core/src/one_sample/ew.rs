//! Exponential-weights KS strategy.
//!
//! Instead of committing to one evaluation point, two forecasters keep
//! distributions over a fixed grid of points `u`. After observing `X_t`
//! each point earns the reward `r_t(u) = 1{X_t <= u} - F_P(u)`:
//!
//! ```text
//!     π⁺_{t+1}(u) ∝ π⁺_t(u) exp( η_t r_t(u)),
//!     π⁻_{t+1}(u) ∝ π⁻_t(u) exp(-η_t r_t(u)),     η_t = 1/sqrt(t),
//! ```
//!
//! and the round's payoffs are `f⁺(y) = E_{π⁺}[1{y <= u} - F_P(u)]` and
//! `f⁻(y) = E_{π⁻}[F_P(u) - 1{y <= u}]`, each played on a one-sided
//! mixture and averaged into a hedged wealth.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::dist::TargetCdf;
use crate::error::{invalid, Error, Result};

/// Default number of expert points.
pub const DEFAULT_EXPERTS: usize = 512;

/// Step sizes for the weight updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSchedule {
    /// `η = 1/sqrt(t)` for the update with the `t`-th observation.
    InvSqrt,
    Constant(f64),
}

impl EtaSchedule {
    pub fn eta(self, t: u64) -> f64 {
        match self {
            EtaSchedule::InvSqrt => 1.0 / (t.max(1) as f64).sqrt(),
            EtaSchedule::Constant(e) => e,
        }
    }
}

/// Normalised weights over the experts plus the tail sums the payoff needs.
#[derive(Debug, Clone)]
struct Forecaster {
    weights: Vec<f64>,
    /// `tail[k] = Σ_{j >= k} π(u_j)`.
    tail: Vec<f64>,
    /// `E_π[F_P(u)]`.
    mean_cdf: f64,
}

impl Forecaster {
    fn uniform(n: usize, fp: &[f64]) -> Self {
        let mut f = Self {
            weights: vec![1.0 / n as f64; n],
            tail: vec![0.0; n],
            mean_cdf: 0.0,
        };
        f.refresh(fp);
        f
    }

    fn set_from_scores(&mut self, scores: &[f64], sign: f64, fp: &[f64]) {
        let top = scores.iter().map(|s| sign * s).fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (w, s) in self.weights.iter_mut().zip(scores) {
            *w = (sign * s - top).exp();
            total += *w;
        }
        for w in &mut self.weights {
            *w /= total;
        }
        self.refresh(fp);
    }

    fn refresh(&mut self, fp: &[f64]) {
        let mut acc = 0.0;
        for k in (0..self.weights.len()).rev() {
            acc += self.weights[k];
            self.tail[k] = acc;
        }
        self.mean_cdf = self.weights.iter().zip(fp).map(|(w, f)| w * f).sum();
    }

    /// `E_π[1{y <= u}] = Σ_{u_k >= y} π(u_k)`.
    fn mass_above(&self, grid: &[f64], y: f64) -> f64 {
        let k = grid.partition_point(|&u| u < y);
        self.tail.get(k).copied().unwrap_or(0.0)
    }
}

/// Hedged exponential-weights strategy.
#[derive(Debug, Clone)]
pub struct ExpWeightsKs {
    grid: Vec<f64>,
    target_on_grid: Vec<f64>,
    scores: Vec<f64>,
    eta: EtaSchedule,
    plus: Forecaster,
    minus: Forecaster,
    t: u64,
}

impl ExpWeightsKs {
    /// Expert grid chosen from the target (see [`TargetCdf::expert_grid`]).
    pub fn new(target: &TargetCdf) -> Result<Self> {
        Self::with_grid(target, target.expert_grid(DEFAULT_EXPERTS), EtaSchedule::InvSqrt)
    }

    pub fn with_grid(target: &TargetCdf, grid: Vec<f64>, eta: EtaSchedule) -> Result<Self> {
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid(
                "grid",
                "expert points must be nonempty and strictly increasing",
            ));
        }
        if let EtaSchedule::Constant(e) = eta {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(invalid("eta", format!("must be finite and >= 0, got {e}")));
            }
        }
        let target_on_grid: Vec<f64> = grid.iter().map(|&u| target.cdf(u)).collect();
        let n = grid.len();
        Ok(Self {
            plus: Forecaster::uniform(n, &target_on_grid),
            minus: Forecaster::uniform(n, &target_on_grid),
            scores: vec![0.0; n],
            grid,
            target_on_grid,
            eta,
            t: 0,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn plus_weights(&self) -> &[f64] {
        &self.plus.weights
    }

    pub fn minus_weights(&self) -> &[f64] {
        &self.minus.weights
    }

    /// `(f⁺(y), f⁻(y))` under the current weights.
    pub fn payoffs(&self, y: f64) -> (f64, f64) {
        let fp = self.plus.mass_above(&self.grid, y) - self.plus.mean_cdf;
        let fm = self.minus.mean_cdf - self.minus.mass_above(&self.grid, y);
        (fp.clamp(-1.0, 1.0), fm.clamp(-1.0, 1.0))
    }

    /// Absorb one observation into both forecasters.
    pub fn update(&mut self, x: f64) {
        self.t += 1;
        let eta = self.eta.eta(self.t);
        if eta != 0.0 {
            for ((s, &u), &f) in self.scores.iter_mut().zip(&self.grid).zip(&self.target_on_grid) {
                let ind = if x <= u { 1.0 } else { 0.0 };
                *s += eta * (ind - f);
            }
        }
        self.plus.set_from_scores(&self.scores, 1.0, &self.target_on_grid);
        self.minus
            .set_from_scores(&self.scores, -1.0, &self.target_on_grid);
    }
}

impl PayoffStrategy for ExpWeightsKs {
    type Obs = f64;

    fn side(&self) -> BetSide {
        BetSide::Hedged
    }

    fn payoff(&mut self, y: &f64) -> Result<Payoff> {
        if y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        let (plus, minus) = self.payoffs(*y);
        Ok(Payoff::Hedged { plus, minus })
    }

    fn observe(&mut self, x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        self.update(x);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_payoff() {
        let p = TargetCdf::uniform01();
        let ew = ExpWeightsKs::with_grid(&p, vec![0.0, 0.5, 1.0], EtaSchedule::InvSqrt).unwrap();
        let (fp, fm) = ew.payoffs(0.25);
        assert!((fp - 1.0 / 6.0).abs() < 1e-15);
        assert!((fm + 1.0 / 6.0).abs() < 1e-15);
        let (fp, _) = ew.payoffs(2.0);
        assert!((fp + 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_eta_keeps_uniform_weights() {
        let p = TargetCdf::uniform01();
        let grid: Vec<f64> = (0..11).map(|k| k as f64 / 10.0).collect();
        let mut ew = ExpWeightsKs::with_grid(&p, grid, EtaSchedule::Constant(0.0)).unwrap();
        for x in [0.1, 0.7, 0.3] {
            ew.update(x);
        }
        assert!(ew.plus_weights().iter().all(|w| (w - 1.0 / 11.0).abs() < 1e-15));
        assert_eq!(ew.plus_weights(), ew.minus_weights());
    }

    #[test]
    fn one_update_matches_direct_weights() {
        let p = TargetCdf::uniform01();
        let grid: Vec<f64> = (0..21).map(|k| k as f64 / 20.0).collect();
        let mut ew = ExpWeightsKs::with_grid(&p, grid.clone(), EtaSchedule::Constant(0.7)).unwrap();
        ew.update(0.0);
        let raw: Vec<f64> = grid.iter().map(|u| (0.7 * (1.0 - u)).exp()).collect();
        let z: f64 = raw.iter().sum();
        for (w, r) in ew.plus_weights().iter().zip(&raw) {
            assert!((w - r / z).abs() < 1e-15);
        }
        let best = ew
            .plus_weights()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(best, 0);
        assert_ne!(ew.plus_weights(), ew.minus_weights());
    }

    #[test]
    fn weights_stay_normalised() {
        let p = TargetCdf::uniform01();
        let mut ew = ExpWeightsKs::new(&p).unwrap();
        for i in 0..2000 {
            ew.update((i as f64 * 0.618_033_988_7).fract().powi(2));
            let s: f64 = ew.plus_weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            let s: f64 = ew.minus_weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
