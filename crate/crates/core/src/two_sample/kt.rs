//! Krichevsky-Trofimov betting along the MMD witness direction.
//!
//! Each round contributes the vector `c_t = (φ(X_t) - φ(Y_t)) / (2B)` with
//! `||c_t||_K <= 1`. With `θ_{t-1} = Σ_{i<t} c_i`, the KT bettor stakes a
//! fraction `v_t` of its wealth `W_{t-1}` in the direction `θ/||θ||`:
//!
//! ```text
//!     V_t(x) = 2^t Γ((t+1+x)/2) Γ((t+1-x)/2) / (π t!),
//!     v_t = (V_t(||θ||+1) - V_t(||θ||-1)) / (V_t(||θ||+1) + V_t(||θ||-1)),
//!     W_t = W_{t-1} (1 + v_t <θ/||θ||, c_t>).
//! ```
//!
//! The round's payoff handed to the engine is the factor
//! `v_t <θ/||θ||, c_t>`, which equals `v_t` times the plug-in MMD payoff; the
//! engine runs it at full stake so its wealth is `W_t`. The Γ-ratio
//! simplifies to `v_t = ||θ|| / t`, a convenient cross-check.

use statrs::function::gamma::ln_gamma;

use crate::betting::{BetSide, Payoff, PayoffStrategy};
use crate::error::{Error, Result};
use crate::two_sample::kernel::GaussianKernel;
use crate::two_sample::mmd::MmdHistory;

/// `ln V_t(x)` for `|x| < t + 1`.
pub fn kt_log_potential(t: u64, x: f64) -> Result<f64> {
    let tf = t as f64;
    if !(x.abs() < tf + 1.0) {
        return Err(Error::Domain(format!("KT potential V_{t} undefined at {x}")));
    }
    Ok(
        tf * std::f64::consts::LN_2 - std::f64::consts::PI.ln() - ln_gamma(tf + 1.0)
            + ln_gamma((tf + 1.0 + x) / 2.0)
            + ln_gamma((tf + 1.0 - x) / 2.0),
    )
}

/// KT bet fraction `v_t` at `||θ_{t-1}|| = norm`, via `tanh` of half the
/// log-potential gap.
pub fn kt_fraction(t: u64, norm: f64) -> Result<f64> {
    if norm == 0.0 {
        return Ok(0.0);
    }
    let hi = kt_log_potential(t, norm + 1.0)?;
    let lo = kt_log_potential(t, norm - 1.0)?;
    Ok((0.5 * (hi - lo)).tanh())
}

/// KT strategy sized by its own bettor.
#[derive(Debug, Clone)]
pub struct KtMmd {
    history: MmdHistory,
    log_bettor_wealth: f64,
    last_payoff: Option<f64>,
}

impl KtMmd {
    pub fn new(kernel: GaussianKernel) -> Self {
        Self {
            history: MmdHistory::new(kernel),
            log_bettor_wealth: 0.0,
            last_payoff: None,
        }
    }

    pub fn history(&self) -> &MmdHistory {
        &self.history
    }

    /// `||θ_{t-1}||` for the coming round.
    pub fn theta_norm(&self) -> f64 {
        self.history.squared_norm().sqrt() / (2.0 * self.history.kernel().bound())
    }

    /// `v_t` for the coming round.
    pub fn fraction(&self) -> Result<f64> {
        if self.history.degenerate() {
            return Ok(0.0);
        }
        kt_fraction(self.history.len() as u64 + 1, self.theta_norm())
    }

    /// The bettor's wealth `W_{t-1} = 1 + Σ_{i<t} g_i(X_i) - g_i(Y_i)`.
    pub fn bettor_wealth(&self) -> f64 {
        self.log_bettor_wealth.exp()
    }

    /// Payoff factor `v_t <θ/||θ||, c_t>` at `(x, y)`.
    pub fn payoff_at(&mut self, x: &[f64], y: &[f64]) -> Result<f64> {
        let direction = self.history.plugin_payoff(x, y)?;
        let v = self.fraction()?;
        Ok((v * direction).clamp(-1.0, 1.0))
    }
}

impl PayoffStrategy for KtMmd {
    type Obs = (Vec<f64>, Vec<f64>);

    fn side(&self) -> BetSide {
        BetSide::SelfSized
    }

    fn payoff(&mut self, (x, y): &(Vec<f64>, Vec<f64>)) -> Result<Payoff> {
        let f = self.payoff_at(x, y)?;
        self.last_payoff = Some(f);
        Ok(Payoff::Single(f))
    }

    fn observe(&mut self, (x, y): (Vec<f64>, Vec<f64>)) -> Result<()> {
        let f = match self.last_payoff.take() {
            Some(f) => f,
            None => self.payoff_at(&x, &y)?,
        };
        self.log_bettor_wealth += f.ln_1p();
        self.history.push(&x, &y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_values() {
        assert!((kt_log_potential(0, 0.0).unwrap().exp() - 1.0).abs() < 1e-12);
        assert!((kt_log_potential(1, 0.0).unwrap().exp() - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!((kt_log_potential(2, 0.0).unwrap().exp() - 0.5).abs() < 1e-12);
        assert!(kt_log_potential(3, 4.0).is_err());
        for (t, x) in [(5, 1.3), (40, 17.2), (7, 0.01)] {
            let a = kt_log_potential(t, x).unwrap();
            let b = kt_log_potential(t, -x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fraction_is_norm_over_t() {
        for (t, norm) in [(2u64, 0.3), (10, 4.5), (1000, 37.0), (5000, 4998.5)] {
            let v = kt_fraction(t, norm).unwrap();
            assert!((v - norm / t as f64).abs() < 1e-9, "{t} {norm} {v}");
        }
        assert_eq!(kt_fraction(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn second_round_matches_scalar_kt() {
        let mut kt = KtMmd::new(GaussianKernel::new(1.0).unwrap());
        kt.observe((vec![0.0], vec![2.0])).unwrap();
        let e2 = (-2.0f64).exp();
        let norm1 = (2.0 - 2.0 * e2).sqrt();
        // Scalar KT coin betting stakes the fraction (Σ_{i<t} c_i) / t.
        let theta = norm1 / 2.0;
        let v2 = theta / 2.0;
        assert!((kt.fraction().unwrap() - v2).abs() < 1e-12);
        // The coin of round two is the projection of c_2 onto θ/||θ||.
        let (x, y) = (0.5, 1.0);
        let coin = {
            let k = |a: f64, b: f64| (-(a - b) * (a - b) / 2.0).exp();
            ((k(0.0, x) - k(2.0, x)) - (k(0.0, y) - k(2.0, y))) / (2.0 * norm1)
        };
        let f = kt.payoff_at(&[x], &[y]).unwrap();
        assert!((f - v2 * coin).abs() < 1e-12);
    }

    #[test]
    fn bettor_never_goes_broke() {
        let mut kt = KtMmd::new(GaussianKernel::new(1.0).unwrap());
        for i in 0..500 {
            let a = (i as f64 * 0.618_033_988_7).fract();
            let b = (i as f64 * 0.414_213_562_3).fract() + 0.5;
            let f = kt.payoff_at(&[a], &[b]).unwrap();
            assert!(f > -1.0);
            kt.observe((vec![a], vec![b])).unwrap();
            assert!(kt.bettor_wealth() > 0.0);
        }
        assert!(kt.bettor_wealth() > 1.0);
    }
}
