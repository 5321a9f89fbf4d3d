//! Log-distance path-loss model.
//!
//! `RSSI(d) = RSSI(d0) - 10 n log10(d / d0) + noise`, and its inverse for
//! turning a received strength back into a distance. Noise draws are supplied
//! by the caller so that every random number comes from one seeded stream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("invalid path-loss model: {0}")]
    InvalidModel(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathLossModel {
    /// Received strength at the reference distance, dBm.
    pub rssi_d0: f64,
    /// Reference distance, meters.
    pub d0: f64,
    /// Path-loss exponent.
    pub n_exp: f64,
    /// Standard deviation of the Gaussian noise term, dB.
    pub sigma: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            rssi_d0: -40.0,
            d0: 1.0,
            n_exp: 2.0,
            sigma: 0.0,
        }
    }
}

impl PathLossModel {
    pub fn new(rssi_d0: f64, d0: f64, n_exp: f64, sigma: f64) -> Result<Self, RadioError> {
        let model = Self {
            rssi_d0,
            d0,
            n_exp,
            sigma,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if !self.rssi_d0.is_finite() {
            return Err(RadioError::InvalidModel("rssi_d0 must be finite"));
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(RadioError::InvalidModel("d0 must be positive"));
        }
        if !(self.n_exp > 0.0 && self.n_exp.is_finite()) {
            return Err(RadioError::InvalidModel(
                "path-loss exponent must be positive",
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(RadioError::InvalidModel("sigma must be non-negative"));
        }
        Ok(())
    }

    /// Received strength in dBm at distance `d`, plus an externally drawn
    /// noise sample in dB.
    pub fn rssi_at(&self, d: f64, noise_draw: f64) -> Result<f64, RadioError> {
        if d.is_nan() || d <= 0.0 {
            return Err(RadioError::NonPositiveDistance(d));
        }
        Ok(self.rssi_d0 - 10.0 * self.n_exp * (d / self.d0).log10() + noise_draw)
    }

    /// Distance implied by a received strength. Always strictly positive.
    pub fn estimate_distance(&self, rssi: f64) -> f64 {
        self.d0 * 10f64.powf((self.rssi_d0 - rssi) / (10.0 * self.n_exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model() -> PathLossModel {
        PathLossModel::new(-40.0, 1.0, 2.0, 0.0).unwrap()
    }

    #[test]
    fn rssi_examples() {
        let m = model();
        assert_eq!(m.rssi_at(1.0, 0.0).unwrap(), -40.0);
        assert!((m.rssi_at(10.0, 0.0).unwrap() + 60.0).abs() < 1e-12);
        assert!((m.rssi_at(100.0, 0.0).unwrap() + 80.0).abs() < 1e-12);
        assert!((m.rssi_at(10.0, 1.5).unwrap() + 58.5).abs() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let m = model();
        assert_eq!(m.estimate_distance(-40.0), 1.0);
        assert!((m.estimate_distance(-60.0) - 10.0).abs() < 1e-12);
        // 10^(30/20)
        assert!((m.estimate_distance(-70.0) - 31.622_776_601_683_793).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            model().rssi_at(0.0, 0.0),
            Err(RadioError::NonPositiveDistance(0.0))
        );
        assert!(model().rssi_at(-1.0, 0.0).is_err());
        assert!(PathLossModel::new(-40.0, 0.0, 2.0, 0.0).is_err());
        assert!(PathLossModel::new(-40.0, 1.0, -2.0, 0.0).is_err());
        assert!(PathLossModel::new(-40.0, 1.0, 2.0, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn noise_free_round_trip(d in 0.1..100.0f64) {
            let m = model();
            let back = m.estimate_distance(m.rssi_at(d, 0.0).unwrap());
            prop_assert!(((back - d) / d).abs() <= 1e-9);
        }

        #[test]
        fn monotone(d in 0.1..100.0f64, step in 1e-3..10.0f64) {
            let m = model();
            prop_assert!(m.rssi_at(d + step, 0.0).unwrap() < m.rssi_at(d, 0.0).unwrap());
            let r = m.rssi_at(d, 0.0).unwrap();
            prop_assert!(m.estimate_distance(r - step) > m.estimate_distance(r));
        }
    }
}
