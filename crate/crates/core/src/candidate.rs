//! Evaluation grid for the KS-type plug-in strategies.
//!
//! The grid is `cap` equally spaced points spanning the observed range.
//! Samples are binned against it, bin `k` holding values in
//! `(g_{k-1}, g_k]`, so the empirical CDF at every grid point is a prefix
//! sum. The grid, and with it the binning, is rebuilt only when a new
//! extreme arrives.

#[derive(Debug, Clone)]
pub(crate) struct CandidateGrid {
    cap: usize,
    points: Vec<f64>,
}

impl CandidateGrid {
    pub(crate) fn new(cap: usize) -> Self {
        Self {
            cap: cap.max(1),
            points: Vec::new(),
        }
    }

    pub(crate) fn points(&self) -> &[f64] {
        &self.points
    }

    pub(crate) fn covers(&self, v: f64) -> bool {
        match (self.points.first(), self.points.last()) {
            (Some(&lo), Some(&hi)) => v >= lo && v <= hi,
            _ => false,
        }
    }

    /// Re-space the grid over `[lo, hi]`; a single point when they coincide.
    pub(crate) fn rebuild(&mut self, lo: f64, hi: f64) {
        self.points.clear();
        if lo == hi || self.cap == 1 {
            self.points.push(hi);
            return;
        }
        let n = self.cap;
        let h = (hi - lo) / (n - 1) as f64;
        self.points.extend((0..n).map(|k| lo + h * k as f64));
        self.points[n - 1] = hi;
    }

    /// Index of the first grid point `>= v`, clamped to the last point.
    pub(crate) fn bin(&self, v: f64) -> usize {
        let n = self.points.len();
        if n <= 1 {
            return 0;
        }
        let lo = self.points[0];
        let h = (self.points[n - 1] - lo) / (n - 1) as f64;
        let mut k = ((v - lo) / h).ceil().clamp(0.0, (n - 1) as f64) as usize;
        while k > 0 && v <= self.points[k - 1] {
            k -= 1;
        }
        while k < n - 1 && v > self.points[k] {
            k += 1;
        }
        k
    }

    /// Bin counts of `values` against the current grid.
    pub(crate) fn histogram(&self, values: &[f64], counts: &mut Vec<u32>) {
        counts.clear();
        counts.resize(self.points.len(), 0);
        for &v in values {
            counts[self.bin(v)] += 1;
        }
    }
}

/// Smallest index whose score is within `slack` of the maximum.
pub(crate) fn first_near_max(scores: &[f64], slack: f64) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = best - slack;
    scores.iter().position(|&g| g >= cut).unwrap_or(0)
}

/// `ΔF_t = sqrt(2 ln t / t)`, the width of the selection band.
pub fn delta_f(t: u64) -> f64 {
    if t <= 1 {
        return f64::INFINITY;
    }
    let t = t as f64;
    (2.0 * t.ln() / t).sqrt()
}

/// How far below the best grid score a candidate may sit and still be chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Slack {
    /// Pick the leftmost maximiser.
    #[default]
    Argmax,
    /// Accept any point within `multiplier · ΔF_t` of the maximum.
    Band(f64),
}

impl Slack {
    pub(crate) fn width(self, t: u64) -> f64 {
        match self {
            Slack::Argmax => 0.0,
            Slack::Band(c) => c * delta_f(t),
        }
    }
}
