//! Threshold-crossing sequential baselines.
//!
//! - KS boundaries: reject once `sqrt(t) d_KS` reaches a time-varying
//!   boundary `τ_t`. The Howard-Ramdas boundary is
//!   `0.85 sqrt(lnln(1 + ln t) + 0.8 ln(1612/α))` (two-sample:
//!   `1.70 sqrt(lnln(1 + ln t) + 0.8 ln(3224/α))`); the Darling-Robbins one
//!   is `sqrt((t+1)/t² · 2 ln t + ln(4√2/α))` (two-sample: twice that form
//!   with `8√2`).
//! - MR: reject once the biased MMD reaches
//!   `√2 B + 4B sqrt((2/t)(ln ℓ(log₂ t) + ln(1/α)))`.
//! - BR: split the stream into blocks of two pairs, form
//!   `h = K(X₁,X₂) + K(Y₁,Y₂) - K(X₁,Y₂) - K(X₂,Y₁)`, and reject once
//!   `T = Σ h` reaches `1.1 (ln(1/α) + sqrt(2V lnln(V/α)))` with `V = Σ h²`.
//!   The iterated logarithm multiplies the variance term, as in a
//!   law-of-the-iterated-logarithm boundary; adding it instead leaves the
//!   boundary at `O(sqrt V)` and the null rejection rate over `10⁴` steps
//!   near 0.27.
//!
//! Iterated logarithms clamp their inner argument below at `e`.
//!
//! Statistics that cost `O(t)` to recompute are checked lazily: a new
//! observation moves an empirical-measure distance by at most
//! `(1 - d_{t-1})/t`-ish, so `d_t <= ((t-1) d_{t-1} + c)/t` bounds it, and the
//! exact value is needed only when that bound reaches the threshold.

use std::f64::consts::{E, SQRT_2};

use crate::betting::Status;
use crate::dist::TargetCdf;
use crate::error::{invalid, Error, Result};
use crate::observation::{FromObservation, Observation};
use crate::procedure::SequentialProcedure;
use crate::two_sample::GaussianKernel;

use super::batch::ks_distance_two_sorted;

fn lnln(x: f64) -> f64 {
    x.max(E).ln().ln()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// `0.8 ln(1612/α)`.
pub fn hr_constant(alpha: f64) -> f64 {
    0.8 * (1612.0 / alpha).ln()
}

/// Howard-Ramdas boundary for `sqrt(t) d_KS` (one sample).
pub fn hr_threshold_1s(t: u64, alpha: f64) -> f64 {
    0.85 * (lnln(1.0 + (t.max(1) as f64).ln()) + hr_constant(alpha)).sqrt()
}

/// Howard-Ramdas boundary for `sqrt(t) d_KS` (two samples).
pub fn hr_threshold_2s(t: u64, alpha: f64) -> f64 {
    1.70 * (lnln(1.0 + (t.max(1) as f64).ln()) + hr_constant(alpha / 2.0)).sqrt()
}

fn dr_form(t: u64, log_const: f64) -> f64 {
    let t = t.max(1) as f64;
    ((t + 1.0) / (t * t) * 2.0 * t.ln() + log_const).sqrt()
}

/// Darling-Robbins boundary for `sqrt(t) d_KS` (one sample).
pub fn dr_threshold_1s(t: u64, alpha: f64) -> f64 {
    dr_form(t, (4.0 * SQRT_2 / alpha).ln())
}

/// Darling-Robbins boundary for `sqrt(t) d_KS` (two samples).
pub fn dr_threshold_2s(t: u64, alpha: f64) -> f64 {
    2.0 * dr_form(t, (8.0 * SQRT_2 / alpha).ln())
}

/// Default `ℓ(x) = (1 + x)²` for the MR boundary.
pub fn default_ell(x: f64) -> f64 {
    (1.0 + x) * (1.0 + x)
}

/// MR boundary on the biased MMD.
pub fn mr_mmd_threshold(t: u64, alpha: f64, b: f64, ell: fn(f64) -> f64) -> f64 {
    let t = t.max(1) as f64;
    let inner = (2.0 / t) * (ell(t.log2()).ln() + (1.0 / alpha).ln());
    SQRT_2 * b + 4.0 * b * inner.max(0.0).sqrt()
}

/// BR boundary on the block sum `T` given `V = Σ h²`.
pub fn br_threshold(v: f64, alpha: f64) -> f64 {
    1.1 * ((1.0 / alpha).ln() + (2.0 * v * lnln(v / alpha)).sqrt())
}

/// Which KS boundary to monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsBoundary {
    HowardRamdas,
    DarlingRobbins,
}

impl KsBoundary {
    fn one_sample(self, t: u64, alpha: f64) -> f64 {
        match self {
            KsBoundary::HowardRamdas => hr_threshold_1s(t, alpha),
            KsBoundary::DarlingRobbins => dr_threshold_1s(t, alpha),
        }
    }

    fn two_sample(self, t: u64, alpha: f64) -> f64 {
        match self {
            KsBoundary::HowardRamdas => hr_threshold_2s(t, alpha),
            KsBoundary::DarlingRobbins => dr_threshold_2s(t, alpha),
        }
    }
}

/// Upper bound on a distance after one more round, given a bound before it
/// and the largest possible one-round contribution `jump`.
fn grow_bound(prev: f64, t: u64, jump: f64) -> f64 {
    let t = t as f64;
    ((t - 1.0) * prev + jump) / t
}

/// One-sample sequential KS with a time-varying boundary.
#[derive(Debug, Clone)]
pub struct SequentialKs1 {
    target: TargetCdf,
    boundary: KsBoundary,
    alpha: f64,
    /// Sorted `(x, F(x), F(x-))`.
    points: Vec<(f64, f64, f64)>,
    bound: f64,
    tau: Option<u64>,
}

impl SequentialKs1 {
    pub fn new(target: TargetCdf, boundary: KsBoundary, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            target,
            boundary,
            alpha,
            points: Vec::new(),
            bound: 0.0,
            tau: None,
        })
    }

    /// Exact `d_KS` of the sample so far.
    pub fn distance(&self) -> f64 {
        let n = self.points.len();
        let nf = n as f64;
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < n {
            let (v, f, fl) = self.points[i];
            let mut j = i + 1;
            while j < n && self.points[j].0 == v {
                j += 1;
            }
            d = d.max((j as f64 / nf - f).abs()).max((i as f64 / nf - fl).abs());
            i = j;
        }
        d
    }

    fn absorb(&mut self, x: f64) -> Result<Status> {
        if x.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        if let Some(tau) = self.tau {
            return Ok(Status::Rejected { tau });
        }
        let k = self.points.partition_point(|p| p.0 <= x);
        self.points
            .insert(k, (x, self.target.cdf(x), self.target.cdf_left(x)));
        let t = self.points.len() as u64;
        let limit = self.boundary.one_sample(t, self.alpha) / (t as f64).sqrt();
        self.bound = grow_bound(self.bound, t, 1.0).min(1.0);
        if self.bound >= limit {
            self.bound = self.distance();
            if self.bound >= limit {
                self.tau = Some(t);
                return Ok(Status::Rejected { tau: t });
            }
        }
        Ok(Status::Continue)
    }
}

impl SequentialProcedure for SequentialKs1 {
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        self.absorb(f64::from_observation(obs)?)
    }

    fn steps(&self) -> u64 {
        self.points.len() as u64
    }

    fn stopping_time(&self) -> Option<u64> {
        self.tau
    }

    fn statistic(&self) -> f64 {
        self.distance()
    }
}

/// Two-sample sequential KS with a time-varying boundary.
#[derive(Debug, Clone)]
pub struct SequentialKs2 {
    boundary: KsBoundary,
    alpha: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    bound: f64,
    tau: Option<u64>,
}

impl SequentialKs2 {
    pub fn new(boundary: KsBoundary, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            boundary,
            alpha,
            xs: Vec::new(),
            ys: Vec::new(),
            bound: 0.0,
            tau: None,
        })
    }

    pub fn distance(&self) -> f64 {
        ks_distance_two_sorted(&self.xs, &self.ys)
    }

    fn absorb(&mut self, x: f64, y: f64) -> Result<Status> {
        if x.is_nan() || y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        if let Some(tau) = self.tau {
            return Ok(Status::Rejected { tau });
        }
        let k = self.xs.partition_point(|&v| v <= x);
        self.xs.insert(k, x);
        let k = self.ys.partition_point(|&v| v <= y);
        self.ys.insert(k, y);
        let t = self.xs.len() as u64;
        // Paired samples of size t: the statistic is sqrt(t/2) d_KS.
        let limit = self.boundary.two_sample(t, self.alpha) / (t as f64).sqrt();
        self.bound = grow_bound(self.bound, t, 1.0).min(1.0);
        if self.bound >= limit {
            self.bound = self.distance();
            if self.bound >= limit {
                self.tau = Some(t);
                return Ok(Status::Rejected { tau: t });
            }
        }
        Ok(Status::Continue)
    }
}

impl SequentialProcedure for SequentialKs2 {
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        let (x, y) = <(f64, f64)>::from_observation(obs)?;
        self.absorb(x, y)
    }

    fn steps(&self) -> u64 {
        self.xs.len() as u64
    }

    fn stopping_time(&self) -> Option<u64> {
        self.tau
    }

    fn statistic(&self) -> f64 {
        self.distance()
    }
}

/// Flat paired history for the kernel baselines.
#[derive(Debug, Clone, Default)]
struct PairStore {
    dim: Option<usize>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairStore {
    fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        match self.dim {
            Some(d) if d != x.len() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                })
            }
            _ => self.dim = Some(x.len()),
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::WrongObservation("non-finite coordinate".into()));
        }
        self.xs.extend_from_slice(x);
        self.ys.extend_from_slice(y);
        Ok(())
    }

    fn len(&self) -> usize {
        self.dim.map_or(0, |d| self.xs.len() / d)
    }

    fn row<'a>(&self, side: &'a [f64], i: usize) -> &'a [f64] {
        let d = self.dim.unwrap_or(1);
        &side[i * d..(i + 1) * d]
    }
}

/// MR sequential MMD test.
#[derive(Debug, Clone)]
pub struct MrMmd {
    kernel: GaussianKernel,
    alpha: f64,
    ell: fn(f64) -> f64,
    store: PairStore,
    bound: f64,
    tau: Option<u64>,
}

impl MrMmd {
    pub fn new(kernel: GaussianKernel, alpha: f64) -> Result<Self> {
        Self::with_ell(kernel, alpha, default_ell)
    }

    pub fn with_ell(kernel: GaussianKernel, alpha: f64, ell: fn(f64) -> f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kernel,
            alpha,
            ell,
            store: PairStore::default(),
            bound: 0.0,
            tau: None,
        })
    }

    /// Exact biased MMD of the history, `O(t²)`.
    pub fn distance(&self) -> f64 {
        let n = self.store.len();
        if n == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let (xi, yi) = (
                self.store.row(&self.store.xs, i),
                self.store.row(&self.store.ys, i),
            );
            for j in 0..n {
                let (xj, yj) = (
                    self.store.row(&self.store.xs, j),
                    self.store.row(&self.store.ys, j),
                );
                acc += self.kernel.eval_unchecked(xi, xj) + self.kernel.eval_unchecked(yi, yj)
                    - 2.0 * self.kernel.eval_unchecked(xi, yj);
            }
        }
        (acc.max(0.0)).sqrt() / n as f64
    }

    fn absorb(&mut self, x: &[f64], y: &[f64]) -> Result<Status> {
        if let Some(tau) = self.tau {
            return Ok(Status::Rejected { tau });
        }
        self.store.push(x, y)?;
        let t = self.store.len() as u64;
        let k = &self.kernel;
        // ||φ(x) - φ(y)||, the most one pair can move the embedding gap.
        let jump = (k.eval_unchecked(x, x) + k.eval_unchecked(y, y) - 2.0 * k.eval_unchecked(x, y))
            .max(0.0)
            .sqrt();
        let limit = mr_mmd_threshold(t, self.alpha, k.bound(), self.ell);
        self.bound = grow_bound(self.bound, t, jump);
        if self.bound >= limit {
            self.bound = self.distance();
            if self.bound >= limit {
                self.tau = Some(t);
                return Ok(Status::Rejected { tau: t });
            }
        }
        Ok(Status::Continue)
    }
}

impl SequentialProcedure for MrMmd {
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        let (x, y) = <(Vec<f64>, Vec<f64>)>::from_observation(obs)?;
        self.absorb(&x, &y)
    }

    fn steps(&self) -> u64 {
        self.store.len() as u64
    }

    fn stopping_time(&self) -> Option<u64> {
        self.tau
    }

    fn statistic(&self) -> f64 {
        self.distance()
    }
}

/// BR block-statistic sequential MMD test.
#[derive(Debug, Clone)]
pub struct BrMmd {
    kernel: GaussianKernel,
    alpha: f64,
    held: Option<(Vec<f64>, Vec<f64>)>,
    steps: u64,
    sum: f64,
    sum_sq: f64,
    tau: Option<u64>,
}

impl BrMmd {
    pub fn new(kernel: GaussianKernel, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kernel,
            alpha,
            held: None,
            steps: 0,
            sum: 0.0,
            sum_sq: 0.0,
            tau: None,
        })
    }

    /// `(T, V)` over completed blocks.
    pub fn sums(&self) -> (f64, f64) {
        (self.sum, self.sum_sq)
    }

    fn absorb(&mut self, x: Vec<f64>, y: Vec<f64>) -> Result<Status> {
        if let Some(tau) = self.tau {
            return Ok(Status::Rejected { tau });
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        self.steps += 1;
        let Some((x1, y1)) = self.held.take() else {
            self.held = Some((x, y));
            return Ok(Status::Continue);
        };
        if x1.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x1.len(),
                got: x.len(),
            });
        }
        let k = &self.kernel;
        let h = k.eval_unchecked(&x1, &x) + k.eval_unchecked(&y1, &y)
            - k.eval_unchecked(&x1, &y)
            - k.eval_unchecked(&x, &y1);
        self.sum += h;
        self.sum_sq += h * h;
        if self.sum >= br_threshold(self.sum_sq, self.alpha) {
            self.tau = Some(self.steps);
            return Ok(Status::Rejected { tau: self.steps });
        }
        Ok(Status::Continue)
    }
}

impl SequentialProcedure for BrMmd {
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        let (x, y) = <(Vec<f64>, Vec<f64>)>::from_observation(obs)?;
        self.absorb(x, y)
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn stopping_time(&self) -> Option<u64> {
        self.tau
    }

    fn statistic(&self) -> f64 {
        self.sum
    }
}
