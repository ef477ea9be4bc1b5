use crate::error::{Error, Result};

/// Number of bet fractions in the default mixtures.
pub const DEFAULT_GRID_POINTS: usize = 100;
/// Largest |λ| of the default two-sided grid.
pub const TWO_SIDED_LIMIT: f64 = 0.9;
/// Top of the default one-sided grid; λ = 1 itself is excluded so a payoff of
/// -1 can never zero the wealth.
pub const ONE_SIDED_TOP: f64 = 1.0 - 1e-3;

/// A discrete mixture over constant bet fractions.
///
/// Points are strictly increasing and every |λ| < 1; weights are a pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct BetGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl BetGrid {
    /// `n_points` equally spaced bets from `lo` to `hi` inclusive, uniform weights.
    pub fn uniform(n_points: usize, lo: f64, hi: f64) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        if !(lo > -1.0 && hi < 1.0) {
            return Err(Error::InvalidGrid(format!(
                "bets must lie strictly inside (-1, 1), got [{lo}, {hi}]"
            )));
        }
        if lo > hi || (n_points > 1 && lo == hi) {
            return Err(Error::InvalidGrid(format!(
                "need lo < hi for {n_points} points, got [{lo}, {hi}]"
            )));
        }
        let points = if n_points == 1 {
            vec![lo]
        } else {
            let step = (hi - lo) / (n_points - 1) as f64;
            (0..n_points)
                .map(|i| {
                    if i + 1 == n_points {
                        hi
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect()
        };
        let w = 1.0 / n_points as f64;
        Self::new(points, vec![w; n_points])
    }

    /// Arbitrary grid; weights are checked, not renormalised.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidGrid(format!(
                "{} points with {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(bad) = points.iter().find(|l| !(l.abs() < 1.0)) {
            return Err(Error::InvalidGrid(format!("bet {bad} outside (-1, 1)")));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidGrid("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    /// The 100-point grid on [-0.9, 0.9] used by two-sided tests.
    pub fn two_sided() -> Self {
        Self::uniform(DEFAULT_GRID_POINTS, -TWO_SIDED_LIMIT, TWO_SIDED_LIMIT)
            .expect("default two-sided grid is valid")
    }

    /// The 100-point grid on [0, 1 - 1e-3] used by one-sided tests.
    pub fn one_sided() -> Self {
        Self::uniform(DEFAULT_GRID_POINTS, 0.0, ONE_SIDED_TOP).expect("default one-sided grid is valid")
    }

    /// The single bet λ = 1, for strategies that size their own bets and
    /// guarantee |payoff| < 1. This is the only grid allowed to hold |λ| = 1.
    pub(crate) fn passthrough() -> Self {
        Self {
            points: vec![1.0],
            weights: vec![1.0],
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
