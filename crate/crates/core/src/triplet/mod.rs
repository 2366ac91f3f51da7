//! Lévy–Khintchine triplets `[a, R, M]` on the real line and their
//! exponents, convolution algebra and measure validation.

mod exponent;
mod grid;
mod measure;

pub use exponent::{compensated_kernel, levy_exponent, CharExponent, Provenance};
pub use grid::{log_nodes, GridDensity, Interpolation};
pub use measure::{
    validate_measure, Atom, LevyMeasure, NamedDensity, ValidationReport, GRID_INNER_MASS_LIMIT,
};

use num_complex::Complex64;

use crate::error::{domain, Result};

/// An infinitely divisible law on ℝ given by its shift `a`, Gaussian
/// variance `R` and Lévy measure `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet {
    shift: f64,
    gaussian_variance: f64,
    measure: LevyMeasure,
}

impl LevyTriplet {
    pub fn new(shift: f64, gaussian_variance: f64, measure: LevyMeasure) -> Result<Self> {
        if !shift.is_finite() {
            return Err(domain(format!("shift must be finite, got {shift}")));
        }
        if !(gaussian_variance >= 0.0 && gaussian_variance.is_finite()) {
            return Err(domain(format!(
                "Gaussian variance must be finite and nonnegative, got {gaussian_variance}"
            )));
        }
        Ok(Self {
            shift,
            gaussian_variance,
            measure,
        })
    }

    /// The point mass at zero, `[0, 0, 0]`.
    pub fn degenerate() -> Self {
        Self {
            shift: 0.0,
            gaussian_variance: 0.0,
            measure: LevyMeasure::zero(),
        }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn gaussian_variance(&self) -> f64 {
        self.gaussian_variance
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    pub fn exponent(&self) -> CharExponent {
        levy_exponent(self)
    }

    pub(crate) fn exponent_at(&self, y: f64) -> Complex64 {
        Complex64::new(-0.5 * self.gaussian_variance * y * y, self.shift * y)
            + self.measure.jump_exponent(y)
    }

    /// Triplet of the convolution `self * other`.
    pub fn convolve(&self, other: &LevyTriplet) -> LevyTriplet {
        LevyTriplet {
            shift: self.shift + other.shift,
            gaussian_variance: self.gaussian_variance + other.gaussian_variance,
            measure: self.measure.sum(&other.measure),
        }
    }

    /// Triplet of the convolution power ν^{*c}, c > 0.
    pub fn convolution_power(&self, c: f64) -> Result<LevyTriplet> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("convolution power needs c > 0, got {c}")));
        }
        Ok(LevyTriplet {
            shift: c * self.shift,
            gaussian_variance: c * self.gaussian_variance,
            measure: self.measure.scaled(c),
        })
    }

    /// Triplet of `self * δ_{x0}`.
    pub fn shift_delta(&self, x0: f64) -> LevyTriplet {
        LevyTriplet {
            shift: self.shift + x0,
            ..self.clone()
        }
    }
}

pub fn convolve(t1: &LevyTriplet, t2: &LevyTriplet) -> LevyTriplet {
    t1.convolve(t2)
}

pub fn convolution_power(t: &LevyTriplet, c: f64) -> Result<LevyTriplet> {
    t.convolution_power(c)
}

pub fn shift_delta(t: &LevyTriplet, x0: f64) -> LevyTriplet {
    t.shift_delta(x0)
}

/// b_{M,β} = ∫_{|x|>1} x |x|^{-1-β} M(dx).
pub fn truncated_mean(m: &LevyMeasure, beta: f64) -> Result<f64> {
    m.truncated_mean(beta)
}
