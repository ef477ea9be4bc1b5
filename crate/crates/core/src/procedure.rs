//! Type-erased sequential procedures, so betting tests and threshold
//! baselines can be driven by the same loop.

use crate::betting::{PayoffStrategy, SequentialTest, Status};
use crate::error::Result;
use crate::observation::{FromObservation, Observation};

/// A test that consumes one observation at a time and may stop.
pub trait SequentialProcedure: Send {
    /// Feed one observation. After a rejection further calls return the
    /// same `Rejected` status.
    fn observe(&mut self, obs: Observation) -> Result<Status>;

    fn steps(&self) -> u64;

    fn stopping_time(&self) -> Option<u64>;

    /// Wealth for betting tests; the monitored statistic for baselines.
    fn statistic(&self) -> f64;
}

impl<S> SequentialProcedure for SequentialTest<S>
where
    S: PayoffStrategy + Send,
    S::Obs: FromObservation,
{
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        if let Some(tau) = SequentialTest::stopping_time(self) {
            return Ok(Status::Rejected { tau });
        }
        SequentialTest::observe(self, S::Obs::from_observation(obs)?)
    }

    fn steps(&self) -> u64 {
        SequentialTest::steps(self)
    }

    fn stopping_time(&self) -> Option<u64> {
        SequentialTest::stopping_time(self)
    }

    fn statistic(&self) -> f64 {
        self.wealth()
    }
}

impl<P: SequentialProcedure + ?Sized> SequentialProcedure for Box<P> {
    fn observe(&mut self, obs: Observation) -> Result<Status> {
        (**self).observe(obs)
    }

    fn steps(&self) -> u64 {
        (**self).steps()
    }

    fn stopping_time(&self) -> Option<u64> {
        (**self).stopping_time()
    }

    fn statistic(&self) -> f64 {
        (**self).statistic()
    }
}
