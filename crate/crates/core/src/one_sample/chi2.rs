//! χ² betting strategies on a finite alphabet `{0, ..., m-1}`.
//!
//! The χ² divergence has the variational witness `q(x)/p(x) - 1`, which has
//! mean zero under `p` and lies in `[-1, C_P]` with `C_P = 1/min p - 1`.
//! Both strategies bet
//!
//! ```text
//!     f_t(x) = (q_t(x)/p(x) - 1) / C_P
//! ```
//!
//! for a predictable estimate `q_t`: the empirical frequencies of the past
//! (plug-in), or projected gradient ascent on the linear rewards
//! `<q, e_{X_s}/p> / C_P`:
//!
//! ```text
//!     q_1 = uniform,   q_{t+1} = Π_Δ( q_t + sqrt(m/(t+1)) e_{X_t} / (C_P p(X_t)) ).
//! ```
//!
//! A symbol outside the alphabet is impossible under `p` and rejects at once.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::error::{invalid, Result};
use crate::one_sample::simplex::project_simplex;

/// How `q_t` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chi2Mode {
    Plugin,
    Pgd,
}

/// `C_P = 1/min p - 1`.
pub fn chi2_scale(p: &[f64]) -> f64 {
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    1.0 / min - 1.0
}

/// `(q(x)/p(x) - 1) / C_P`, clamped against rounding.
pub fn chi2_witness(q: &[f64], p: &[f64], c_p: f64, x: usize) -> f64 {
    ((q[x] / p[x] - 1.0) / c_p).clamp(-1.0, 1.0)
}

/// One projected-gradient step producing `q_t` from `q_{t-1}` after
/// observing symbol `x`.
pub fn chi2_pgd_update(q: &[f64], p: &[f64], c_p: f64, x: usize, t: u64) -> Vec<f64> {
    let m = q.len() as f64;
    let step = (m / t as f64).sqrt() / (c_p * p[x]);
    let mut v = q.to_vec();
    v[x] += step;
    project_simplex(&v)
}

/// χ² goodness-of-fit strategy.
#[derive(Debug, Clone)]
pub struct Chi2Strategy {
    p: Vec<f64>,
    c_p: f64,
    mode: Chi2Mode,
    counts: Vec<u64>,
    n: u64,
    q: Vec<f64>,
}

impl Chi2Strategy {
    pub fn new(p: Vec<f64>, mode: Chi2Mode) -> Result<Self> {
        if p.len() < 2 {
            return Err(invalid("p", "needs at least two symbols"));
        }
        if p.iter().any(|&v| !(v > 0.0)) {
            return Err(invalid("p", "every symbol needs positive mass"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("p", format!("sums to {total}, not 1")));
        }
        let m = p.len();
        Ok(Self {
            c_p: chi2_scale(&p),
            q: vec![1.0 / m as f64; m],
            counts: vec![0; m],
            p,
            mode,
            n: 0,
        })
    }

    pub fn scale(&self) -> f64 {
        self.c_p
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The estimate `q_t` used for the next payoff.
    pub fn estimate(&self) -> Vec<f64> {
        match self.mode {
            Chi2Mode::Pgd => self.q.clone(),
            Chi2Mode::Plugin if self.n == 0 => self.p.clone(),
            Chi2Mode::Plugin => self.counts.iter().map(|&c| c as f64 / self.n as f64).collect(),
        }
    }

    /// Alphabet index of `y`, if it is one.
    pub fn symbol(&self, y: f64) -> Option<usize> {
        let in_range = y >= 0.0 && y < self.p.len() as f64 && y.fract() == 0.0;
        in_range.then_some(y as usize)
    }

    /// Payoff at symbol `x`; `None` when `x` is outside the alphabet.
    pub fn payoff_at(&self, x: usize) -> Option<f64> {
        if x >= self.p.len() {
            return None;
        }
        Some(match self.mode {
            Chi2Mode::Pgd => chi2_witness(&self.q, &self.p, self.c_p, x),
            Chi2Mode::Plugin if self.n == 0 => 0.0,
            Chi2Mode::Plugin => {
                let qx = self.counts[x] as f64 / self.n as f64;
                ((qx / self.p[x] - 1.0) / self.c_p).clamp(-1.0, 1.0)
            }
        })
    }
}

impl PayoffStrategy for Chi2Strategy {
    type Obs = f64;

    fn side(&self) -> BetSide {
        BetSide::OneSided
    }

    fn payoff(&mut self, y: &f64) -> Result<Payoff> {
        Ok(match self.symbol(*y).and_then(|x| self.payoff_at(x)) {
            Some(f) => Payoff::Single(f),
            None => Payoff::Reject,
        })
    }

    fn observe(&mut self, y: f64) -> Result<()> {
        // An impossible symbol has already ended the test.
        let Some(x) = self.symbol(y) else {
            return Ok(());
        };
        self.counts[x] += 1;
        self.n += 1;
        if self.mode == Chi2Mode::Pgd {
            self.q = chi2_pgd_update(&self.q, &self.p, self.c_p, x, self.n + 1);
        }
        Ok(())
    }
}
