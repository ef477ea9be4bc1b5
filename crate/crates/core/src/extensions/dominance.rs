//! Second-order stochastic dominance on `[0, 1]`.
//!
//! With `g_z(x) = 1{x <= z}(z - x)`, `E[g_z(X)]` is the twice-integrated CDF
//! `I_2 F(z)`. The strategy takes `z_t` maximising
//! `(1/t) Σ g_z(X_i) - (1/t) Σ g_z(Y_i)` over a fixed grid and bets
//! `f_t(x, y) = g_{z_t}(x) - g_{z_t}(y)`, which lies in `[-1, 1]` on the unit
//! interval and has mean zero when `X` and `Y` share a distribution.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::candidate::CandidateGrid;
use crate::error::{invalid, Error, Result};

/// Default number of `z` points on `[0, 1]`.
pub const DEFAULT_Z_POINTS: usize = 1001;

/// `g_z(x) = 1{x <= z}(z - x)`.
pub fn dominance_witness(x: f64, z: f64) -> f64 {
    if x <= z {
        z - x
    } else {
        0.0
    }
}

/// `g_z(x) - g_z(y)`.
pub fn dominance_payoff(x: f64, y: f64, z: f64) -> f64 {
    dominance_witness(x, z) - dominance_witness(y, z)
}

/// `k`-fold integrated empirical CDF, `I_k F̂(z) = mean((z - X)_+^{k-1}) / (k-1)!`.
pub fn integrated_cdf(samples: &[f64], z: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "order must be at least 1"));
    }
    if samples.is_empty() {
        return Ok(0.0);
    }
    let fact: f64 = (1..k).map(f64::from).product();
    let total: f64 = samples
        .iter()
        .filter(|&&x| x <= z)
        .map(|&x| (z - x).powi(k as i32 - 1))
        .sum();
    Ok(total / (fact * samples.len() as f64))
}

#[derive(Debug, Clone, Default)]
struct BinStats {
    counts: Vec<u32>,
    sums: Vec<f64>,
}

impl BinStats {
    fn add(&mut self, k: usize, v: f64) {
        self.counts[k] += 1;
        self.sums[k] += v;
    }
}

/// Plug-in dominance strategy.
#[derive(Debug, Clone)]
pub struct DominancePlugin {
    grid: CandidateGrid,
    xs: BinStats,
    ys: BinStats,
    n: u64,
    current_z: Option<f64>,
}

impl Default for DominancePlugin {
    fn default() -> Self {
        Self::new()
    }
}

impl DominancePlugin {
    pub fn new() -> Self {
        Self::with_points(DEFAULT_Z_POINTS)
    }

    pub fn with_points(points: usize) -> Self {
        let mut grid = CandidateGrid::new(points.max(2));
        grid.rebuild(0.0, 1.0);
        let len = grid.points().len();
        let empty = || BinStats {
            counts: vec![0; len],
            sums: vec![0.0; len],
        };
        Self {
            xs: empty(),
            ys: empty(),
            grid,
            n: 0,
            current_z: None,
        }
    }

    pub fn grid(&self) -> &[f64] {
        self.grid.points()
    }

    /// `z_t` for the next round; `None` before any observation.
    pub fn select_z(&self) -> Option<f64> {
        self.current_z
    }

    /// Criterion values on the grid.
    pub fn criterion(&self) -> Vec<f64> {
        let n = self.n.max(1) as f64;
        let (mut nx, mut ny, mut sx, mut sy) = (0u32, 0u32, 0.0, 0.0);
        let mut out = Vec::with_capacity(self.grid.points().len());
        for (k, &z) in self.grid.points().iter().enumerate() {
            nx += self.xs.counts[k];
            ny += self.ys.counts[k];
            sx += self.xs.sums[k];
            sy += self.ys.sums[k];
            out.push(((z * nx as f64 - sx) - (z * ny as f64 - sy)) / n);
        }
        out
    }

    fn check(v: f64) -> Result<()> {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(Error::WrongObservation(format!(
                "dominance test needs observations in [0, 1], got {v}"
            )))
        }
    }
}

impl PayoffStrategy for DominancePlugin {
    type Obs = (f64, f64);

    fn side(&self) -> BetSide {
        BetSide::OneSided
    }

    fn payoff(&mut self, &(x, y): &(f64, f64)) -> Result<Payoff> {
        Self::check(x)?;
        Self::check(y)?;
        Ok(Payoff::Single(match self.current_z {
            None => 0.0,
            Some(z) => dominance_payoff(x, y, z),
        }))
    }

    fn observe(&mut self, (x, y): (f64, f64)) -> Result<()> {
        Self::check(x)?;
        Self::check(y)?;
        let (kx, ky) = (self.grid.bin(x), self.grid.bin(y));
        self.xs.add(kx, x);
        self.ys.add(ky, y);
        self.n += 1;
        let crit = self.criterion();
        let best = crit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let k = crit.iter().position(|&c| c >= best).unwrap_or(0);
        self.current_z = Some(self.grid.points()[k]);
        Ok(())
    }
}
