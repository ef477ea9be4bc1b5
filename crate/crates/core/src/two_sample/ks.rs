//! Plug-in two-sample KS strategy.
//!
//! Scores `Ĝ_t(u) = |F̂_{Q,t-1}(u) - F̂_{P,t-1}(u)|` on a grid spanning the
//! pooled sample, picks the leftmost near-maximiser `u_t` and bets
//! `f_t(x, y) = 1{y <= u_t} - 1{x <= u_t}`, which is mean zero whenever
//! `X` and `Y` share a distribution.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::candidate::{first_near_max, CandidateGrid, Slack};
use crate::error::{Error, Result};
use crate::one_sample::DEFAULT_GRID_CAP;

/// Band multiplier matching the two-sample confidence width `4ΔF_t`.
pub const KS2_BAND: f64 = 4.0;

/// `1{y <= u} - 1{x <= u}`.
pub fn ks2_payoff(x: f64, y: f64, u: f64) -> f64 {
    let ind = |v: f64| if v <= u { 1.0 } else { 0.0 };
    ind(y) - ind(x)
}

#[derive(Debug, Clone)]
pub struct Ks2Plugin {
    slack: Slack,
    xs: Vec<f64>,
    ys: Vec<f64>,
    grid: CandidateGrid,
    counts_x: Vec<u32>,
    counts_y: Vec<u32>,
    scores: Vec<f64>,
    current_u: Option<f64>,
}

impl Default for Ks2Plugin {
    fn default() -> Self {
        Self::new()
    }
}

impl Ks2Plugin {
    pub fn new() -> Self {
        Self::with_options(DEFAULT_GRID_CAP, Slack::default())
    }

    pub fn with_options(grid_cap: usize, slack: Slack) -> Self {
        Self {
            slack,
            xs: Vec::new(),
            ys: Vec::new(),
            grid: CandidateGrid::new(grid_cap),
            counts_x: Vec::new(),
            counts_y: Vec::new(),
            scores: Vec::new(),
            current_u: None,
        }
    }

    pub fn candidates(&self) -> &[f64] {
        self.grid.points()
    }

    /// `u_t` for the next round; `None` before any observation.
    pub fn select_u(&self) -> Option<f64> {
        self.current_u
    }

    fn select_u_at(&mut self, t: u64) -> Option<f64> {
        if self.xs.is_empty() {
            return None;
        }
        let n = self.xs.len() as f64;
        self.scores.clear();
        let (mut cx, mut cy) = (0u32, 0u32);
        for (a, b) in self.counts_x.iter().zip(&self.counts_y) {
            cx += a;
            cy += b;
            self.scores.push((cy as f64 - cx as f64).abs() / n);
        }
        let k = first_near_max(&self.scores, self.slack.width(t));
        Some(self.grid.points()[k])
    }

    fn absorb(&mut self, x: f64, y: f64) {
        self.xs.push(x);
        self.ys.push(y);
        if self.grid.covers(x) && self.grid.covers(y) {
            let (kx, ky) = (self.grid.bin(x), self.grid.bin(y));
            self.counts_x[kx] += 1;
            self.counts_y[ky] += 1;
        } else {
            let (lo, hi) = match (self.grid.points().first(), self.grid.points().last()) {
                (Some(&lo), Some(&hi)) => (lo.min(x).min(y), hi.max(x).max(y)),
                _ => (x.min(y), x.max(y)),
            };
            self.grid.rebuild(lo, hi);
            self.grid.histogram(&self.xs, &mut self.counts_x);
            self.grid.histogram(&self.ys, &mut self.counts_y);
        }
    }
}

impl PayoffStrategy for Ks2Plugin {
    type Obs = (f64, f64);

    fn side(&self) -> BetSide {
        BetSide::TwoSided
    }

    fn payoff(&mut self, &(x, y): &(f64, f64)) -> Result<Payoff> {
        if x.is_nan() || y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        Ok(Payoff::Single(match self.current_u {
            None => 0.0,
            Some(u) => ks2_payoff(x, y, u),
        }))
    }

    fn observe(&mut self, (x, y): (f64, f64)) -> Result<()> {
        if x.is_nan() || y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        self.absorb(x, y);
        let t = self.xs.len() as u64 + 1;
        self.current_u = self.select_u_at(t);
        Ok(())
    }
}
