use super::grid::BetGrid;
use super::wealth::{should_stop, HedgedWealthState, WealthState};
use crate::error::{invalid, Error, Result};

/// Which mixture of bets the engine should run for a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetSide {
    /// The payoff may drift either way: bets on [-0.9, 0.9].
    TwoSided,
    /// The payoff drifts upward under the alternative: bets on [0, 1).
    OneSided,
    /// Two payoff legs, each on a one-sided mixture, averaged 50/50.
    Hedged,
    /// The strategy sizes its own bets; its payoff is the full wealth factor.
    SelfSized,
}

impl BetSide {
    pub fn default_grid(self) -> BetGrid {
        match self {
            BetSide::TwoSided => BetGrid::two_sided(),
            BetSide::OneSided | BetSide::Hedged => BetGrid::one_sided(),
            BetSide::SelfSized => BetGrid::passthrough(),
        }
    }
}

/// Value of the round's payoff function at the revealed observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    Single(f64),
    Hedged {
        plus: f64,
        minus: f64,
    },
    /// The observation is impossible under the null; reject at once.
    Reject,
}

/// A predictable payoff generator.
///
/// `payoff` evaluates the function chosen from the observations passed to
/// `observe` so far; it must not learn from its argument. Under the null the
/// payoff has conditional mean zero and lies in [-1, 1].
pub trait PayoffStrategy {
    type Obs;

    fn side(&self) -> BetSide;

    /// Evaluate this round's payoff function at `obs`. Implementations may
    /// cache work keyed on `obs` for the following `observe` call.
    fn payoff(&mut self, obs: &Self::Obs) -> Result<Payoff>;

    /// Append `obs` to the history.
    fn observe(&mut self, obs: Self::Obs) -> Result<()>;
}

impl<S: PayoffStrategy + ?Sized> PayoffStrategy for Box<S> {
    type Obs = S::Obs;

    fn side(&self) -> BetSide {
        (**self).side()
    }

    fn payoff(&mut self, obs: &Self::Obs) -> Result<Payoff> {
        (**self).payoff(obs)
    }

    fn observe(&mut self, obs: Self::Obs) -> Result<()> {
        (**self).observe(obs)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum WealthProcess {
    Mixture(WealthState),
    Hedged(HedgedWealthState),
}

/// Outcome of one call to [`SequentialTest::observe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Continue,
    Rejected { tau: u64 },
}

/// Result of a run that either rejected or reached its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    /// Stopping time; `None` when the run was censored.
    pub tau: Option<u64>,
    pub rejected: bool,
    /// Observations consumed.
    pub steps: u64,
    pub final_wealth: f64,
    pub trajectory: Option<Vec<(u64, f64)>>,
}

/// Couples a payoff strategy with a mixture wealth process and Ville's stopping rule.
#[derive(Debug, Clone)]
pub struct SequentialTest<S> {
    strategy: S,
    wealth: WealthProcess,
    alpha: f64,
    step: u64,
    tau: Option<u64>,
    forced_reject: bool,
    trajectory: Option<Vec<(u64, f64)>>,
}

impl<S: PayoffStrategy> SequentialTest<S> {
    /// Test with the strategy's default bet grid.
    pub fn new(strategy: S, alpha: f64) -> Result<Self> {
        let grid = strategy.side().default_grid();
        Self::build(strategy, grid, alpha)
    }

    /// Test with a caller-chosen bet grid (ignored for self-sized strategies).
    pub fn with_grid(strategy: S, grid: BetGrid, alpha: f64) -> Result<Self> {
        let grid = match strategy.side() {
            BetSide::SelfSized => BetGrid::passthrough(),
            _ => grid,
        };
        Self::build(strategy, grid, alpha)
    }

    fn build(strategy: S, grid: BetGrid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        let wealth = match strategy.side() {
            BetSide::Hedged => WealthProcess::Hedged(HedgedWealthState::balanced(grid)),
            _ => WealthProcess::Mixture(WealthState::new(grid)),
        };
        Ok(Self {
            strategy,
            wealth,
            alpha,
            step: 0,
            tau: None,
            forced_reject: false,
            trajectory: None,
        })
    }

    /// Keep `(step, wealth)` after every round.
    pub fn record_trajectory(mut self) -> Self {
        self.trajectory = Some(vec![(0, 1.0)]);
        self
    }

    /// Play one round. Once rejected the test is frozen and further
    /// observations are ignored.
    pub fn observe(&mut self, obs: S::Obs) -> Result<Status> {
        if let Some(tau) = self.tau {
            return Ok(Status::Rejected { tau });
        }
        let payoff = self.strategy.payoff(&obs)?;
        match (payoff, &mut self.wealth) {
            (Payoff::Single(f), WealthProcess::Mixture(w)) => w.update(f)?,
            (Payoff::Hedged { plus, minus }, WealthProcess::Hedged(w)) => w.update(plus, minus)?,
            (Payoff::Reject, _) => self.forced_reject = true,
            (p, _) => {
                return Err(Error::WrongObservation(format!(
                    "strategy emitted {p:?}, which does not match its declared bet side"
                )))
            }
        }
        self.strategy.observe(obs)?;
        self.step += 1;
        let w = self.wealth();
        if let Some(t) = self.trajectory.as_mut() {
            t.push((self.step, w));
        }
        if should_stop(w, self.alpha) {
            self.tau = Some(self.step);
            return Ok(Status::Rejected { tau: self.step });
        }
        Ok(Status::Continue)
    }

    /// Current wealth; `+inf` after an impossible-under-the-null observation.
    pub fn wealth(&self) -> f64 {
        if self.forced_reject {
            return f64::INFINITY;
        }
        match &self.wealth {
            WealthProcess::Mixture(w) => w.wealth(),
            WealthProcess::Hedged(w) => w.wealth(),
        }
    }

    pub fn log_wealth(&self) -> f64 {
        if self.forced_reject {
            return f64::INFINITY;
        }
        match &self.wealth {
            WealthProcess::Mixture(w) => w.log_wealth(),
            WealthProcess::Hedged(w) => w.log_wealth(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn stopping_time(&self) -> Option<u64> {
        self.tau
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn strategy(&self) -> &S {
        &self.strategy
    }

    pub fn into_outcome(self) -> TestOutcome {
        TestOutcome {
            tau: self.tau,
            rejected: self.tau.is_some(),
            steps: self.step,
            final_wealth: self.wealth(),
            trajectory: self.trajectory,
        }
    }
}

/// Run `strategy` over at most `n_max` observations of `stream`.
pub fn run_sequential<S, I>(
    strategy: S,
    stream: I,
    alpha: f64,
    n_max: u64,
    record_trajectory: bool,
) -> Result<TestOutcome>
where
    S: PayoffStrategy,
    I: IntoIterator<Item = S::Obs>,
{
    let mut test = SequentialTest::new(strategy, alpha)?;
    if record_trajectory {
        test = test.record_trajectory();
    }
    for obs in stream.into_iter().take(n_max as usize) {
        if let Status::Rejected { .. } = test.observe(obs)? {
            break;
        }
    }
    Ok(test.into_outcome())
}

/// The same payoff function every round. Mostly useful for illustrations
/// with a hand-picked payoff and bet.
#[derive(Debug, Clone)]
pub struct FixedPayoff<F> {
    f: F,
    side: BetSide,
}

impl<F: Fn(f64) -> f64> FixedPayoff<F> {
    pub fn new(f: F, side: BetSide) -> Self {
        Self { f, side }
    }
}

impl<F: Fn(f64) -> f64> PayoffStrategy for FixedPayoff<F> {
    type Obs = f64;

    fn side(&self) -> BetSide {
        self.side
    }

    fn payoff(&mut self, obs: &f64) -> Result<Payoff> {
        Ok(Payoff::Single((self.f)(*obs)))
    }

    fn observe(&mut self, _obs: f64) -> Result<()> {
        Ok(())
    }
}
