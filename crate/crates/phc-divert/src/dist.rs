//! Service-time distributions.
//!
//! Everything is sampled by mapping one uniform draw through the inverse
//! CDF. Keeping the transform pure (`sample_with`) separates "what number
//! does `u` become" from "which stream produced `u`", which is what lets
//! tests pin the sampling contract without touching an RNG.

use serde::{Deserialize, Serialize};

use crate::kernel::RandomStream;

/// Invalid distribution parameters.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("exponential mean must be positive and finite, got {0}")]
    BadExponentialMean(f64),
    #[error("uniform bounds must satisfy 0 <= min <= max and be finite, got [{min}, {max}]")]
    BadUniformBounds { min: f64, max: f64 },
    #[error("deterministic value must be non-negative and finite, got {0}")]
    BadDeterministicValue(f64),
}

/// A non-negative service-time (or inter-arrival) distribution, in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServiceDistribution {
    Exponential { mean: f64 },
    Uniform { min: f64, max: f64 },
    Deterministic { value: f64 },
}

impl ServiceDistribution {
    pub fn validate(&self) -> Result<(), DistError> {
        match *self {
            ServiceDistribution::Exponential { mean } => {
                if mean > 0.0 && mean.is_finite() {
                    Ok(())
                } else {
                    Err(DistError::BadExponentialMean(mean))
                }
            }
            ServiceDistribution::Uniform { min, max } => {
                if min >= 0.0 && min <= max && max.is_finite() {
                    Ok(())
                } else {
                    Err(DistError::BadUniformBounds { min, max })
                }
            }
            ServiceDistribution::Deterministic { value } => {
                if value >= 0.0 && value.is_finite() {
                    Ok(())
                } else {
                    Err(DistError::BadDeterministicValue(value))
                }
            }
        }
    }

    #[must_use]
    pub fn mean(&self) -> f64 {
        match *self {
            ServiceDistribution::Exponential { mean } => mean,
            ServiceDistribution::Uniform { min, max } => (min + max) / 2.0,
            ServiceDistribution::Deterministic { value } => value,
        }
    }

    #[must_use]
    pub fn variance(&self) -> f64 {
        match *self {
            ServiceDistribution::Exponential { mean } => mean * mean,
            ServiceDistribution::Uniform { min, max } => (max - min) * (max - min) / 12.0,
            ServiceDistribution::Deterministic { .. } => 0.0,
        }
    }

    /// Second raw moment E[S^2] = Var(S) + E[S]^2.
    #[must_use]
    pub fn second_moment(&self) -> f64 {
        self.variance() + self.mean() * self.mean()
    }

    /// Squared coefficient of variation Var(S) / E[S]^2; zero when the mean
    /// is zero (only possible for degenerate zero-length services).
    #[must_use]
    pub fn scv(&self) -> f64 {
        let m = self.mean();
        if m == 0.0 {
            0.0
        } else {
            self.variance() / (m * m)
        }
    }

    /// `Some((min, max))` when the support is bounded, `None` for the
    /// exponential. Predictors that reason about elapsed service age need
    /// the bounds.
    #[must_use]
    pub fn bounded_support(&self) -> Option<(f64, f64)> {
        match *self {
            ServiceDistribution::Exponential { .. } => None,
            ServiceDistribution::Uniform { min, max } => Some((min, max)),
            ServiceDistribution::Deterministic { value } => Some((value, value)),
        }
    }

    /// Inverse CDF. `u` must lie in `[0, 1)`; the deterministic case ignores
    /// it.
    #[must_use]
    pub fn sample_with(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u), "u={u} outside [0,1)");
        match *self {
            ServiceDistribution::Exponential { mean } => -mean * (1.0 - u).ln(),
            ServiceDistribution::Uniform { min, max } => min + (max - min) * u,
            ServiceDistribution::Deterministic { value } => value,
        }
    }

    /// Draws from `stream`. Deterministic values consume no uniform: there
    /// is nothing random to synchronize.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            ServiceDistribution::Deterministic { value } => value,
            _ => self.sample_with(stream.next_uniform()),
        }
    }
}

impl std::fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            ServiceDistribution::Exponential { mean } => write!(f, "exp(mean={mean})"),
            ServiceDistribution::Uniform { min, max } => write!(f, "uniform({min}, {max})"),
            ServiceDistribution::Deterministic { value } => write!(f, "det({value})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson quadrature of `f` over `[a, b]`. Exact for cubics,
    /// so it is an independent oracle for uniform-density moments.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            let x = a + h * i as f64;
            acc += if i % 2 == 0 { 2.0 * f(x) } else { 4.0 * f(x) };
        }
        acc * h / 3.0
    }

    #[test]
    fn uniform_moments_match_quadrature_oracle() {
        let (a, b) = (360.0, 600.0);
        let d = ServiceDistribution::Uniform { min: a, max: b };
        let pdf = 1.0 / (b - a);
        let m1 = simpson(|x| x * pdf, a, b, 64);
        let m2 = simpson(|x| x * x * pdf, a, b, 64);
        assert!((d.mean() - m1).abs() < 1e-9, "mean {} vs oracle {m1}", d.mean());
        assert!(
            (d.second_moment() - m2).abs() < 1e-6,
            "E[S^2] {} vs oracle {m2}",
            d.second_moment()
        );
        // Frozen values for the labour-service distribution.
        assert_eq!(d.mean(), 480.0);
        assert_eq!(d.variance(), 4800.0);
        assert_eq!(d.second_moment(), 235_200.0);
        assert!((d.scv() - 1.0 / 48.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_moments() {
        let d = ServiceDistribution::Exponential { mean: 720.0 };
        assert_eq!(d.mean(), 720.0);
        assert_eq!(d.variance(), 720.0 * 720.0);
        assert_eq!(d.second_moment(), 2.0 * 720.0 * 720.0);
        assert_eq!(d.scv(), 1.0);
    }

    #[test]
    fn inverse_cdf_worked_values() {
        let exp = ServiceDistribution::Exponential { mean: 1.0 };
        assert_eq!(exp.sample_with(0.0), 0.0);
        assert!((exp.sample_with(1.0 - (-1.0f64).exp()) - 1.0).abs() < 1e-12);

        let uni = ServiceDistribution::Uniform { min: 10.0, max: 20.0 };
        assert_eq!(uni.sample_with(0.0), 10.0);
        assert_eq!(uni.sample_with(0.25), 12.5);

        let det = ServiceDistribution::Deterministic { value: 10.0 };
        assert_eq!(det.sample_with(0.7), 10.0);
    }

    #[test]
    fn million_draw_sampling_check() {
        let n = 1_000_000u32;

        // Exponential: sample mean within 5 sigma of 720.
        let d = ServiceDistribution::Exponential { mean: 720.0 };
        let mut s = RandomStream::from_seed(11);
        let mean: f64 = (0..n).map(|_| d.sample(&mut s)).sum::<f64>() / f64::from(n);
        let sigma = 720.0 / f64::from(n).sqrt();
        assert!((mean - 720.0).abs() < 5.0 * sigma, "exp mean {mean}");

        // Uniform: every draw inside [min, max), mean within 5 sigma.
        let d = ServiceDistribution::Uniform { min: 360.0, max: 600.0 };
        let mut s = RandomStream::from_seed(12);
        let mut sum = 0.0;
        for _ in 0..n {
            let x = d.sample(&mut s);
            assert!((360.0..600.0).contains(&x));
            sum += x;
        }
        let mean = sum / f64::from(n);
        let sigma = 4800.0f64.sqrt() / f64::from(n).sqrt();
        assert!((mean - 480.0).abs() < 5.0 * sigma, "uniform mean {mean}");

        // Deterministic: always the constant, and no uniforms consumed.
        let d = ServiceDistribution::Deterministic { value: 10.0 };
        let mut s = RandomStream::from_seed(13);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut s), 10.0);
        }
        assert_eq!(s.draws(), 0);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ServiceDistribution::Exponential { mean: 0.0 }.validate().is_err());
        assert!(ServiceDistribution::Exponential { mean: -3.0 }.validate().is_err());
        assert!(ServiceDistribution::Uniform { min: -1.0, max: 5.0 }.validate().is_err());
        assert!(ServiceDistribution::Uniform { min: 6.0, max: 5.0 }.validate().is_err());
        assert!(ServiceDistribution::Deterministic { value: -0.1 }.validate().is_err());
        assert!(ServiceDistribution::Uniform { min: 360.0, max: 600.0 }.validate().is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let d = ServiceDistribution::Uniform { min: 360.0, max: 600.0 };
        let toml_text = toml::to_string(&d).unwrap();
        assert_eq!(toml::from_str::<ServiceDistribution>(&toml_text).unwrap(), d);
        let parsed: ServiceDistribution =
            serde_json::from_str(r#"{"kind":"exponential","mean":1440.0}"#).unwrap();
        assert_eq!(parsed, ServiceDistribution::Exponential { mean: 1440.0 });
    }
}
