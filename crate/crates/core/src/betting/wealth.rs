use super::grid::BetGrid;
use crate::error::{Error, Result};

/// Reject rule of Ville's inequality: stop once wealth reaches 1/alpha.
pub fn should_stop(wealth: f64, alpha: f64) -> bool {
    wealth >= 1.0 / alpha
}

/// `log(sum_i w_i exp(a_i) / sum_i w_i)`, shifted by the largest `a_i`.
pub(crate) fn log_sum_exp_weighted(log_values: &[f64], weights: &[f64]) -> f64 {
    let max = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (v, w) in log_values.iter().zip(weights) {
        num += w * (v - max).exp();
        den += w;
    }
    max + (num / den).ln()
}

/// Wealth of a mixture of constant bets, one log-wealth accumulator per bet.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthState {
    grid: BetGrid,
    log_wealth: Vec<f64>,
    step: u64,
    payoff_sum: f64,
}

impl WealthState {
    pub fn new(grid: BetGrid) -> Self {
        let log_wealth = vec![0.0; grid.len()];
        Self {
            grid,
            log_wealth,
            step: 0,
            payoff_sum: 0.0,
        }
    }

    /// Settle one round: every bet λ_i multiplies its wealth by `1 + λ_i * payoff`.
    pub fn update(&mut self, payoff: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&payoff) {
            return Err(Error::PayoffOutOfRange { value: payoff });
        }
        for (lw, &lambda) in self.log_wealth.iter_mut().zip(self.grid.points()) {
            let growth = lambda * payoff;
            if growth <= -1.0 {
                return Err(Error::Bankrupt { lambda, payoff });
            }
            *lw += growth.ln_1p();
        }
        self.step += 1;
        self.payoff_sum += payoff;
        Ok(())
    }

    /// Natural log of the mixture wealth.
    pub fn log_wealth(&self) -> f64 {
        log_sum_exp_weighted(&self.log_wealth, self.grid.weights())
    }

    /// Mixture wealth `sum_i ν_i K^{λ_i}`; saturates at `f64::MAX` when the
    /// log-wealth is beyond the representable range.
    pub fn wealth(&self) -> f64 {
        self.log_wealth().exp().min(f64::MAX)
    }

    /// Per-bet log-wealths, aligned with `grid().points()`.
    pub fn per_bet_log_wealth(&self) -> &[f64] {
        &self.log_wealth
    }

    pub fn grid(&self) -> &BetGrid {
        &self.grid
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn payoff_sum(&self) -> f64 {
        self.payoff_sum
    }
}

/// Two one-sided wealth processes mixed with a fixed weight, for strategies
/// that bet on both signs of a deviation with separate payoff functions.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgedWealthState {
    plus: WealthState,
    minus: WealthState,
    mix_weight: f64,
}

impl HedgedWealthState {
    pub fn new(grid: BetGrid, mix_weight: f64) -> Result<Self> {
        if !(mix_weight > 0.0 && mix_weight < 1.0) {
            return Err(crate::error::invalid("mix_weight", "must lie in (0, 1)"));
        }
        Ok(Self {
            plus: WealthState::new(grid.clone()),
            minus: WealthState::new(grid),
            mix_weight,
        })
    }

    /// Equal-weight hedge.
    pub fn balanced(grid: BetGrid) -> Self {
        Self::new(grid, 0.5).expect("1/2 is a valid mix weight")
    }

    pub fn update(&mut self, payoff_plus: f64, payoff_minus: f64) -> Result<()> {
        // Validate both before touching either leg.
        for p in [payoff_plus, payoff_minus] {
            if !(-1.0..=1.0).contains(&p) {
                return Err(Error::PayoffOutOfRange { value: p });
            }
        }
        self.plus.update(payoff_plus)?;
        self.minus.update(payoff_minus)
    }

    pub fn log_wealth(&self) -> f64 {
        log_sum_exp_weighted(
            &[self.plus.log_wealth(), self.minus.log_wealth()],
            &[self.mix_weight, 1.0 - self.mix_weight],
        )
    }

    pub fn wealth(&self) -> f64 {
        self.log_wealth().exp().min(f64::MAX)
    }

    pub fn plus(&self) -> &WealthState {
        &self.plus
    }

    pub fn minus(&self) -> &WealthState {
        &self.minus
    }

    pub fn mix_weight(&self) -> f64 {
        self.mix_weight
    }
}
