//! Symmetry about zero.
//!
//! With `g_z(y) = 1{y <= z} - 1{y >= -z}` for `z >= 0`,
//! `E[g_z(Y)] = F(z) + F(-z-) - 1`, which vanishes for every `z` exactly
//! when the law of `Y` is symmetric. The strategy picks `z_t` maximising
//! `|mean g_z|` over a grid on `[0, max |Y_i|]` and bets `f_t = g_{z_t}` on a
//! two-sided grid.

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::candidate::{first_near_max, CandidateGrid};
use crate::error::{Error, Result};

/// Default cap on the number of `z` points.
pub const DEFAULT_SYMMETRY_POINTS: usize = 1000;

/// `1{y <= z} - 1{y >= -z}`.
pub fn symmetry_payoff(y: f64, z: f64) -> f64 {
    let a = if y <= z { 1.0 } else { 0.0 };
    let b = if y >= -z { 1.0 } else { 0.0 };
    a - b
}

/// Plug-in symmetry strategy.
#[derive(Debug, Clone)]
pub struct SymmetryPlugin {
    grid: CandidateGrid,
    magnitudes: Vec<f64>,
    signs: Vec<i8>,
    pos: Vec<u32>,
    neg: Vec<u32>,
    n_pos: u32,
    n_neg: u32,
    current_z: Option<f64>,
}

impl Default for SymmetryPlugin {
    fn default() -> Self {
        Self::new()
    }
}

impl SymmetryPlugin {
    pub fn new() -> Self {
        Self::with_points(DEFAULT_SYMMETRY_POINTS)
    }

    pub fn with_points(points: usize) -> Self {
        Self {
            grid: CandidateGrid::new(points),
            magnitudes: Vec::new(),
            signs: Vec::new(),
            pos: Vec::new(),
            neg: Vec::new(),
            n_pos: 0,
            n_neg: 0,
            current_z: None,
        }
    }

    pub fn grid(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn select_z(&self) -> Option<f64> {
        self.current_z
    }

    /// `mean g_z` at every grid point.
    pub fn criterion(&self) -> Vec<f64> {
        let n = self.magnitudes.len().max(1) as f64;
        let (mut p, mut q) = (0u32, 0u32);
        self.pos
            .iter()
            .zip(&self.neg)
            .map(|(a, b)| {
                p += a;
                q += b;
                // Positive draws count -1 until z reaches them, negative ones +1.
                ((p as f64 - self.n_pos as f64) - (q as f64 - self.n_neg as f64)) / n
            })
            .collect()
    }

    fn rebin(&mut self) {
        let len = self.grid.points().len();
        self.pos = vec![0; len];
        self.neg = vec![0; len];
        for (&m, &s) in self.magnitudes.iter().zip(&self.signs) {
            let k = self.grid.bin(m);
            match s {
                1 => self.pos[k] += 1,
                -1 => self.neg[k] += 1,
                _ => {}
            }
        }
    }
}

impl PayoffStrategy for SymmetryPlugin {
    type Obs = f64;

    fn side(&self) -> BetSide {
        BetSide::TwoSided
    }

    fn payoff(&mut self, y: &f64) -> Result<Payoff> {
        if y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        Ok(Payoff::Single(match self.current_z {
            None => 0.0,
            Some(z) => symmetry_payoff(*y, z),
        }))
    }

    fn observe(&mut self, y: f64) -> Result<()> {
        if y.is_nan() {
            return Err(Error::WrongObservation("NaN observation".into()));
        }
        let m = y.abs();
        let s = if y > 0.0 {
            1
        } else if y < 0.0 {
            -1
        } else {
            0
        };
        self.magnitudes.push(m);
        self.signs.push(s);
        if s > 0 {
            self.n_pos += 1;
        } else if s < 0 {
            self.n_neg += 1;
        }
        if self.grid.covers(m) {
            let k = self.grid.bin(m);
            match s {
                1 => self.pos[k] += 1,
                -1 => self.neg[k] += 1,
                _ => {}
            }
        } else {
            let hi = self.grid.points().last().copied().unwrap_or(0.0).max(m);
            self.grid.rebuild(0.0, hi);
            self.rebin();
        }
        let scores: Vec<f64> = self.criterion().iter().map(|c| c.abs()).collect();
        let k = first_near_max(&scores, 0.0);
        self.current_z = Some(self.grid.points()[k]);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(sample: &[f64], z: f64) -> f64 {
        sample.iter().map(|&y| symmetry_payoff(y, z)).sum::<f64>() / sample.len() as f64
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(symmetry_payoff(0.0, 1.0), 0.0);
        assert_eq!(symmetry_payoff(2.0, 1.0), -1.0);
        assert_eq!(symmetry_payoff(-2.0, 1.0), 1.0);
    }

    #[test]
    fn antithetic_sample_is_balanced() {
        let mut s = SymmetryPlugin::with_points(101);
        s.observe(-0.7).unwrap();
        s.observe(0.7).unwrap();
        assert!(s.criterion().iter().all(|&c| c == 0.0));
        assert_eq!(s.select_z(), Some(0.0));
    }

    #[test]
    fn positive_sample_saturates() {
        let mut s = SymmetryPlugin::with_points(101);
        for y in [0.5, 1.0, 2.0] {
            s.observe(y).unwrap();
        }
        let crit = s.criterion();
        assert_eq!(*crit.last().unwrap(), 0.0);
        // Below every draw, all three count -1.
        assert_eq!(crit[0], -1.0);
        assert_eq!(s.select_z(), Some(0.0));
    }

    #[test]
    fn criterion_matches_brute_force() {
        let mut s = SymmetryPlugin::with_points(53);
        let mut seen = Vec::new();
        for i in 0..200 {
            let y = ((i as f64 * 0.618_033_988_7).fract() - 0.3) * (1.0 + i as f64 / 50.0);
            s.observe(y).unwrap();
            seen.push(y);
            for (&z, &c) in s.grid().iter().zip(&s.criterion()) {
                assert!((c - brute(&seen, z)).abs() < 1e-12, "i={i} z={z}");
            }
        }
    }
}
