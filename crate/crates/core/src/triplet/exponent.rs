use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::LevyTriplet;
use crate::error::Result;

/// e^{iyx} - 1 - iyx 1_{[-1,1]}(x), evaluated without cancellation for small
/// |yx|.
pub fn compensated_kernel(y: f64, x: f64) -> Complex64 {
    let z = y * x;
    let half = (0.5 * z).sin();
    let re = -2.0 * half * half;
    let im = if x.abs() <= 1.0 {
        if z.abs() < 0.1 {
            let z2 = z * z;
            // sin z - z
            -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)))
        } else {
            z.sin() - z
        }
    } else {
        z.sin()
    };
    Complex64::new(re, im)
}

/// Where a [`CharExponent`]'s values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    AnalyticFromTriplet,
    QuadratureComposed,
    ClosedForm,
}

type ExponentFn = dyn Fn(f64) -> Result<Complex64> + Send + Sync;

/// A Lévy exponent y ↦ Φ(y), the logarithm of a characteristic function.
#[derive(Clone)]
pub struct CharExponent {
    eval: Arc<ExponentFn>,
    provenance: Provenance,
}

impl fmt::Debug for CharExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharExponent")
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl CharExponent {
    pub fn new<F>(provenance: Provenance, f: F) -> Self
    where
        F: Fn(f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            provenance,
        }
    }

    pub fn zero() -> Self {
        Self::new(Provenance::ClosedForm, |_| Ok(Complex64::new(0.0, 0.0)))
    }

    pub fn eval(&self, y: f64) -> Result<Complex64> {
        (self.eval)(y)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// c·Φ, the exponent of the convolution power ν^{*c}.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::new(self.provenance, move |y| Ok(inner.eval(y)? * c))
    }

    /// Φ₁ + Φ₂, the exponent of a convolution.
    pub fn plus(&self, other: &CharExponent) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let provenance = if a.provenance == b.provenance {
            a.provenance
        } else {
            Provenance::QuadratureComposed
        };
        Self::new(provenance, move |y| Ok(a.eval(y)? + b.eval(y)?))
    }

    /// Φ(y) + i·x₀·y, the exponent after convolving with δ_{x₀}.
    pub fn shifted(&self, x0: f64) -> Self {
        let inner = self.clone();
        Self::new(self.provenance, move |y| {
            Ok(inner.eval(y)? + Complex64::new(0.0, x0 * y))
        })
    }

    /// exp(Φ(y)).
    pub fn characteristic_function(&self, y: f64) -> Result<Complex64> {
        Ok(self.eval(y)?.exp())
    }
}

/// Φ(y) = i a y - R y²/2 + ∫ (e^{iyx} - 1 - iyx 1_{[-1,1]}(x)) M(dx).
pub fn levy_exponent(t: &LevyTriplet) -> CharExponent {
    let t = Arc::new(t.clone());
    CharExponent::new(Provenance::AnalyticFromTriplet, move |y| {
        Ok(t.exponent_at(y))
    })
}
