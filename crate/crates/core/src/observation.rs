//! Observations as they arrive from a stream, and conversions into the
//! per-strategy types.

use crate::error::{Error, Result};

/// One round of data.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// One-sample tests.
    Scalar(f64),
    /// Paired univariate draws `(x, y)`.
    Pair(f64, f64),
    /// Paired multivariate draws.
    Vectors(Vec<f64>, Vec<f64>),
}

impl Observation {
    pub fn kind(&self) -> &'static str {
        match self {
            Observation::Scalar(_) => "scalar",
            Observation::Pair(..) => "pair",
            Observation::Vectors(..) => "vector pair",
        }
    }
}

/// Conversion from a stream observation into a strategy's own type.
pub trait FromObservation: Sized {
    fn from_observation(obs: Observation) -> Result<Self>;
}

fn mismatch(want: &str, got: &Observation) -> Error {
    Error::WrongObservation(format!("expected a {want}, got a {}", got.kind()))
}

impl FromObservation for f64 {
    fn from_observation(obs: Observation) -> Result<Self> {
        match obs {
            Observation::Scalar(v) => Ok(v),
            other => Err(mismatch("scalar", &other)),
        }
    }
}

impl FromObservation for (f64, f64) {
    fn from_observation(obs: Observation) -> Result<Self> {
        match obs {
            Observation::Pair(x, y) => Ok((x, y)),
            Observation::Vectors(x, y) if x.len() == 1 && y.len() == 1 => Ok((x[0], y[0])),
            other => Err(mismatch("univariate pair", &other)),
        }
    }
}

impl FromObservation for (Vec<f64>, Vec<f64>) {
    fn from_observation(obs: Observation) -> Result<Self> {
        match obs {
            Observation::Pair(x, y) => Ok((vec![x], vec![y])),
            Observation::Vectors(x, y) => Ok((x, y)),
            other => Err(mismatch("pair", &other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(f64::from_observation(Observation::Scalar(1.5)).unwrap(), 1.5);
        assert!(f64::from_observation(Observation::Pair(1.0, 2.0)).is_err());
        assert_eq!(
            <(f64, f64)>::from_observation(Observation::Vectors(vec![1.0], vec![2.0])).unwrap(),
            (1.0, 2.0)
        );
        assert!(
            <(f64, f64)>::from_observation(Observation::Vectors(vec![1.0, 2.0], vec![2.0, 3.0])).is_err()
        );
        assert_eq!(
            <(Vec<f64>, Vec<f64>)>::from_observation(Observation::Pair(1.0, 2.0)).unwrap(),
            (vec![1.0], vec![2.0])
        );
    }
}
