//! Plug-in kernel MMD strategy.
//!
//! With `h_t(z) = Σ_{i<t} K(X_i, z) - K(Y_i, z)` the unnormalised
//! difference of the empirical mean embeddings and
//! `S_t = Σ_{i,j<t} K(X_i,X_j) + K(Y_i,Y_j) - 2K(X_i,Y_j) = ||h_t||²_K`,
//! the witness `ĝ_t = h_t / sqrt(S_t)` has unit RKHS norm and the bet is
//!
//! ```text
//!     f_t(x, y) = (ĝ_t(x) - ĝ_t(y)) / (2B),
//! ```
//!
//! bounded by one through Cauchy-Schwarz. The three Gram sums are updated
//! in `O(t)` per round, so a run of length `n` costs `O(n²)` kernel calls.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::error::{Error, Result};
use crate::two_sample::kernel::GaussianKernel;

/// Relative size below which `||h_t||²` counts as zero.
const DEGENERATE_REL: f64 = 1e-10;

/// Kernel sums of a candidate pair against the history.
#[derive(Debug, Clone, PartialEq)]
struct PairSums {
    x: Vec<f64>,
    y: Vec<f64>,
    /// `Σ K(X_i, x)`, `Σ K(Y_i, x)`, `Σ K(X_i, y)`, `Σ K(Y_i, y)`.
    kx_x: f64,
    ky_x: f64,
    kx_y: f64,
    ky_y: f64,
}

/// Paired history with incrementally maintained Gram sums.
#[derive(Debug, Clone)]
pub struct MmdHistory {
    kernel: GaussianKernel,
    dim: Option<usize>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    n: usize,
    sxx: f64,
    syy: f64,
    sxy: f64,
    pending: Option<PairSums>,
}

impl MmdHistory {
    pub fn new(kernel: GaussianKernel) -> Self {
        Self {
            kernel,
            dim: None,
            xs: Vec::new(),
            ys: Vec::new(),
            n: 0,
            sxx: 0.0,
            syy: 0.0,
            sxy: 0.0,
            pending: None,
        }
    }

    pub fn kernel(&self) -> &GaussianKernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(Σ K(X_i,X_j), Σ K(Y_i,Y_j), Σ K(X_i,Y_j))` over the history.
    pub fn gram_sums(&self) -> (f64, f64, f64) {
        (self.sxx, self.syy, self.sxy)
    }

    /// `||h_t||²_K`, clamped at zero.
    pub fn squared_norm(&self) -> f64 {
        (self.sxx + self.syy - 2.0 * self.sxy).max(0.0)
    }

    /// Biased squared MMD of the history.
    pub fn mmd_squared(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.squared_norm() / (self.n * self.n) as f64
    }

    /// Whether the witness is undefined (no history or coinciding embeddings).
    pub fn degenerate(&self) -> bool {
        let scale = (self.sxx + self.syy).max(1.0);
        self.squared_norm() <= DEGENERATE_REL * scale
    }

    fn check_dim(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::WrongObservation("empty observation vector".into()));
        }
        if let Some(d) = self.dim {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::WrongObservation("non-finite coordinate".into()));
        }
        Ok(())
    }

    fn sums_for(&mut self, x: &[f64], y: &[f64]) -> Result<&PairSums> {
        self.check_dim(x, y)?;
        let fresh = match &self.pending {
            Some(p) => p.x != x || p.y != y,
            None => true,
        };
        if fresh {
            let d = x.len();
            let (kx_x, kx_y) = self.kernel.row_sums(&self.xs, d, x, y);
            let (ky_x, ky_y) = self.kernel.row_sums(&self.ys, d, x, y);
            self.pending = Some(PairSums {
                x: x.to_vec(),
                y: y.to_vec(),
                kx_x,
                ky_x,
                kx_y,
                ky_y,
            });
        }
        Ok(self.pending.as_ref().expect("just filled"))
    }

    /// `h_t(x) - h_t(y)`, unnormalised.
    pub fn witness_gap(&mut self, x: &[f64], y: &[f64]) -> Result<f64> {
        let s = self.sums_for(x, y)?;
        Ok((s.kx_x - s.ky_x) - (s.kx_y - s.ky_y))
    }

    /// `ĝ_t(z)`; `None` when degenerate.
    pub fn witness(&self, z: &[f64]) -> Result<Option<f64>> {
        if let Some(d) = self.dim {
            if d != z.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: z.len(),
                });
            }
        }
        if self.degenerate() {
            return Ok(None);
        }
        let (a, b) = self.kernel.row_sums(&self.xs, z.len(), z, z);
        let (c, _) = self.kernel.row_sums(&self.ys, z.len(), z, z);
        debug_assert_eq!(a, b);
        Ok(Some((a - c) / self.squared_norm().sqrt()))
    }

    /// `(ĝ_t(x) - ĝ_t(y)) / (2B)`, zero when degenerate.
    pub fn plugin_payoff(&mut self, x: &[f64], y: &[f64]) -> Result<f64> {
        let gap = self.witness_gap(x, y)?;
        if self.degenerate() {
            return Ok(0.0);
        }
        let b = self.kernel.bound();
        Ok((gap / (2.0 * b * self.squared_norm().sqrt())).clamp(-1.0, 1.0))
    }

    /// Append a pair, reusing the kernel sums of the last evaluation.
    pub fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        let s = self.sums_for(x, y)?.clone();
        let k = &self.kernel;
        self.sxx += 2.0 * s.kx_x + k.eval_unchecked(x, x);
        self.syy += 2.0 * s.ky_y + k.eval_unchecked(y, y);
        self.sxy += s.kx_y + s.ky_x + k.eval_unchecked(x, y);
        self.xs.extend_from_slice(x);
        self.ys.extend_from_slice(y);
        self.dim = Some(x.len());
        self.n += 1;
        self.pending = None;
        Ok(())
    }

    /// Gram sums recomputed from scratch.
    pub fn recompute_gram_sums(&self) -> (f64, f64, f64) {
        let Some(d) = self.dim else {
            return (0.0, 0.0, 0.0);
        };
        let total = |a: &[f64], b: &[f64]| {
            let mut s = 0.0;
            for u in a.chunks_exact(d) {
                for v in b.chunks_exact(d) {
                    s += self.kernel.eval_unchecked(u, v);
                }
            }
            s
        };
        (
            total(&self.xs, &self.xs),
            total(&self.ys, &self.ys),
            total(&self.xs, &self.ys),
        )
    }
}

/// Plug-in witness strategy on a one-sided bet grid.
#[derive(Debug, Clone)]
pub struct MmdPlugin {
    history: MmdHistory,
}

impl MmdPlugin {
    pub fn new(kernel: GaussianKernel) -> Self {
        Self {
            history: MmdHistory::new(kernel),
        }
    }

    pub fn history(&self) -> &MmdHistory {
        &self.history
    }
}

impl PayoffStrategy for MmdPlugin {
    type Obs = (Vec<f64>, Vec<f64>);

    fn side(&self) -> BetSide {
        BetSide::OneSided
    }

    fn payoff(&mut self, (x, y): &(Vec<f64>, Vec<f64>)) -> Result<Payoff> {
        Ok(Payoff::Single(self.history.plugin_payoff(x, y)?))
    }

    fn observe(&mut self, (x, y): (Vec<f64>, Vec<f64>)) -> Result<()> {
        self.history.push(&x, &y)
    }
}
