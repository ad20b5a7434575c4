use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter point of a model: interaction parameters `theta_x` (dimension
/// 1 for Ising, 2 for ERGM) and the observation coupling `theta_y`
/// (ignored when the field is observed directly).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub theta_x: Vec<f64>,
    pub theta_y: f64,
}

impl ParamPoint {
    pub fn new(theta_x: Vec<f64>, theta_y: f64) -> Result<Self> {
        let p = Self { theta_x, theta_y };
        if !p.is_finite() {
            return Err(Error::NonFinite("parameter point".into()));
        }
        Ok(p)
    }

    pub fn is_finite(&self) -> bool {
        self.theta_x.iter().all(|v| v.is_finite()) && self.theta_y.is_finite()
    }

    /// Flattens the free components: `theta_x` entries, then `theta_y`
    /// when the model carries an observation coupling.
    pub fn to_free(&self, with_noise: bool) -> Vec<f64> {
        let mut v = self.theta_x.clone();
        if with_noise {
            v.push(self.theta_y);
        }
        v
    }

    pub fn from_free(free: &[f64], theta_x_dim: usize, with_noise: bool) -> Result<Self> {
        let expected = theta_x_dim + usize::from(with_noise);
        if free.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: free.len() });
        }
        let theta_x = free[..theta_x_dim].to_vec();
        let theta_y = if with_noise { free[theta_x_dim] } else { 0.0 };
        ParamPoint::new(theta_x, theta_y)
    }
}

/// Prior on one free parameter component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentPrior {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, variance: f64 },
}

impl ComponentPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ComponentPrior::Uniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidConfig(format!("uniform prior needs lo < hi, got [{lo}, {hi}]")));
                }
            }
            ComponentPrior::Gaussian { variance, mean } => {
                if !(variance > 0.0) || !mean.is_finite() || !variance.is_finite() {
                    return Err(Error::InvalidConfig(format!("gaussian prior needs variance > 0, got {variance}")));
                }
            }
        }
        Ok(())
    }

    pub fn log_density(&self, v: f64) -> f64 {
        match *self {
            ComponentPrior::Uniform { lo, hi } => {
                if v < lo || v > hi {
                    f64::NEG_INFINITY
                } else {
                    -(hi - lo).ln()
                }
            }
            ComponentPrior::Gaussian { mean, variance } => {
                let d = v - mean;
                -0.5 * (d * d / variance + variance.ln() + (2.0 * std::f64::consts::PI).ln())
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            ComponentPrior::Uniform { lo, hi } => rng.random_range(lo..hi),
            ComponentPrior::Gaussian { mean, variance } => {
                Normal::new(mean, variance.sqrt()).unwrap().sample(rng)
            }
        }
    }
}

/// Independent per-component prior over the free parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub components: Vec<ComponentPrior>,
}

impl PriorSpec {
    pub fn new(components: Vec<ComponentPrior>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Joint log density; `-inf` outside the support.
    pub fn log_density(&self, free: &[f64]) -> f64 {
        debug_assert_eq!(free.len(), self.components.len());
        self.components
            .iter()
            .zip(free)
            .map(|(c, &v)| c.log_density(v))
            .sum()
    }

    pub fn in_support(&self, free: &[f64]) -> bool {
        self.log_density(free) > f64::NEG_INFINITY
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_density() {
        let p = ComponentPrior::Uniform { lo: 0.0, hi: 3.0 };
        assert!((p.log_density(1.0) - (1.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(p.log_density(-0.1), f64::NEG_INFINITY);
        assert_eq!(p.log_density(3.1), f64::NEG_INFINITY);
    }

    #[test]
    fn gaussian_prior_integrates_against_known_value() {
        let p = ComponentPrior::Gaussian { mean: 0.0, variance: 30.0 };
        // density at the mean: 1/sqrt(2*pi*30)
        let expect = -(0.5 * (2.0 * std::f64::consts::PI * 30.0).ln());
        assert!((p.log_density(0.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn free_vector_round_trip() {
        let p = ParamPoint::new(vec![0.3, -1.2], 2.5).unwrap();
        let free = p.to_free(true);
        assert_eq!(free, vec![0.3, -1.2, 2.5]);
        let q = ParamPoint::from_free(&free, 2, true).unwrap();
        assert_eq!(p, q);
        let direct = ParamPoint::from_free(&[0.3, -1.2], 2, false).unwrap();
        assert_eq!(direct.theta_y, 0.0);
    }

    #[test]
    fn prior_spec_validates() {
        assert!(PriorSpec::new(vec![ComponentPrior::Uniform { lo: 2.0, hi: 1.0 }]).is_err());
        assert!(PriorSpec::new(vec![ComponentPrior::Gaussian { mean: 0.0, variance: 0.0 }]).is_err());
    }
}
