//! The mappings J^β, their compositions J^α∘J^β and the time changes
//! that turn a composition into a single random integral.

mod pushforward;
mod time_change;

pub use pushforward::{
    pushforward_density_exp, pushforward_density_quadrature, pushforward_measure,
    pushforward_measure_with, DEFAULT_RESOLUTION, EXP_OUTER, INNER_FRACTION,
};
pub use time_change::{time_change_limit_check, time_change_r, TimeChange, TimeChangeKind};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::numerics::{try_quad, QuadOptions};
use crate::triplet::{CharExponent, LevyTriplet, Provenance};

/// Quadrature settings for exponents built by integration.
pub fn exponent_quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
        split_lower_endpoint: true,
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// J^β on triplets: a^{(β)} = β/(β+1)(a + b_{M,β}), R^{(β)} = β/(2+β) R and
/// the measure pushforward.
pub fn apply_j_triplet(beta: f64, t: &LevyTriplet) -> Result<LevyTriplet> {
    check_positive("β", beta)?;
    let b = t.measure().truncated_mean(beta)?;
    LevyTriplet::new(
        beta / (beta + 1.0) * (t.shift() + b),
        beta / (2.0 + beta) * t.gaussian_variance(),
        pushforward_measure(beta, t.measure())?,
    )
}

/// J^β on exponents: y ↦ ∫₀¹ Φ(uy) β u^{β−1} du.
pub fn apply_j_exponent(beta: f64, phi: &CharExponent) -> Result<CharExponent> {
    apply_j_exponent_with(beta, phi, exponent_quad_options())
}

pub fn apply_j_exponent_with(
    beta: f64,
    phi: &CharExponent,
    opts: QuadOptions,
) -> Result<CharExponent> {
    check_positive("β", beta)?;
    let phi = phi.clone();
    Ok(CharExponent::new(
        Provenance::QuadratureComposed,
        move |y| {
            if y == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let f = |u: f64| -> Result<Complex64> {
                if u == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(phi.eval(u * y)? * (beta * u.powf(beta - 1.0)))
            };
            Ok(try_quad(f, 0.0, 1.0, &opts)?.value)
        },
    ))
}

/// J^α∘J^β on triplets. Distinct parameters use the closed forms with the
/// measure β/(β−α) M^{(α)} − α/(β−α) M^{(β)}; equal parameters apply J^β
/// twice.
pub fn compose_j_triplet(alpha: f64, beta: f64, t: &LevyTriplet) -> Result<LevyTriplet> {
    check_positive("α", alpha)?;
    check_positive("β", beta)?;
    if alpha == beta {
        return apply_j_triplet(beta, &apply_j_triplet(beta, t)?);
    }
    let (alpha, beta) = (alpha.min(beta), alpha.max(beta));
    let shift = compose_shift_forms(alpha, beta, t)?.displayed;
    let variance = alpha / (2.0 + alpha) * beta / (2.0 + beta) * t.gaussian_variance();
    let measure = pushforward::combined_images(alpha, beta, t.measure(), DEFAULT_RESOLUTION)?;
    LevyTriplet::new(shift, variance, measure)
}

/// The composed shift written two ways; they agree algebraically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftForms {
    /// αβ/((1+α)(1+β)) a + αβ/(β−α) [b_α/(α+1) − b_β/(β+1)]
    pub displayed: f64,
    /// β/(β−α) a^{(α)} − α/(β−α) a^{(β)}
    pub combination: f64,
}

pub fn compose_shift_forms(alpha: f64, beta: f64, t: &LevyTriplet) -> Result<ShiftForms> {
    if alpha == beta {
        return Err(domain("shift closed form needs α ≠ β"));
    }
    let m = t.measure();
    let (ba, bb) = (m.truncated_mean(alpha)?, m.truncated_mean(beta)?);
    let a = t.shift();
    let displayed = alpha * beta / ((1.0 + alpha) * (1.0 + beta)) * a
        + alpha * beta / (beta - alpha) * (ba / (alpha + 1.0) - bb / (beta + 1.0));
    let a_alpha = alpha / (alpha + 1.0) * (a + ba);
    let a_beta = beta / (beta + 1.0) * (a + bb);
    let combination = (beta * a_alpha - alpha * a_beta) / (beta - alpha);
    Ok(ShiftForms {
        displayed,
        combination,
    })
}

/// J^α∘J^β on exponents: y ↦ ∫₀¹ Φ(uy) r'_(α,β)(u) du.
pub fn compose_j_exponent(alpha: f64, beta: f64, phi: &CharExponent) -> Result<CharExponent> {
    compose_j_exponent_with(alpha, beta, phi, exponent_quad_options())
}

pub fn compose_j_exponent_with(
    alpha: f64,
    beta: f64,
    phi: &CharExponent,
    opts: QuadOptions,
) -> Result<CharExponent> {
    let r = time_change_r(alpha, beta)?;
    Ok(time_changed_exponent(phi, Arc::new(|u| u), r, opts))
}

fn time_changed_exponent(
    phi: &CharExponent,
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    r: TimeChange,
    opts: QuadOptions,
) -> CharExponent {
    let phi = phi.clone();
    CharExponent::new(Provenance::QuadratureComposed, move |y| {
        if y == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let f = |u: f64| -> Result<Complex64> {
            let d = r.derivative(u);
            if u == 0.0 || d == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(phi.eval(h(u) * y)? * d)
        };
        Ok(try_quad(f, 0.0, 1.0, &opts)?.value)
    })
}

/// (β−α) Φ_{αβ}(y) − β Φ_α(y) + α Φ_β(y), each from quadrature; zero in
/// exact arithmetic.
pub fn factorization_residual(
    alpha: f64,
    beta: f64,
    phi: &CharExponent,
    y: f64,
) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha < beta) {
        return Err(domain(format!(
            "factorization needs 0 < α < β, got ({alpha}, {beta})"
        )));
    }
    let both = compose_j_exponent(alpha, beta, phi)?.eval(y)?;
    let ja = apply_j_exponent(alpha, phi)?.eval(y)?;
    let jb = apply_j_exponent(beta, phi)?.eval(y)?;
    Ok(both * (beta - alpha) - ja * beta + jb * alpha)
}

/// ρ = J^α(ν^{*(1−α/β)}) * ν^{*(α/β)}, which satisfies J^β(ρ) = J^α(ν).
pub fn factorization_factor(alpha: f64, beta: f64, nu: &LevyTriplet) -> Result<LevyTriplet> {
    if !(alpha > 0.0 && alpha < beta) {
        return Err(domain(format!(
            "the factorization needs 0 < α < β strictly, got ({alpha}, {beta})"
        )));
    }
    let mapped = apply_j_triplet(alpha, &nu.convolution_power(1.0 - alpha / beta)?)?;
    Ok(mapped.convolve(&nu.convolution_power(alpha / beta)?))
}

/// y ↦ ∫₀¹ Φ((1 − √(1−t))^{1/α} y) dt, the inverse-time-change form of
/// J^α∘J^{2α}.
pub fn inverse_time_change_exponent(alpha: f64, phi: &CharExponent) -> Result<CharExponent> {
    check_positive("α", alpha)?;
    let phi = phi.clone();
    let opts = exponent_quad_options();
    Ok(CharExponent::new(
        Provenance::QuadratureComposed,
        move |y| {
            if y == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let f = |t: f64| phi.eval((-(0.5 * (-t).ln_1p()).exp_m1()).powf(1.0 / alpha) * y);
            Ok(try_quad(f, 0.0, 1.0, &opts)?.value)
        },
    ))
}

/// ∫ h(t) dY(r(t)) over (0, 1] for a Lévy process Y with law `driver` at
/// time one.
#[derive(Clone)]
pub struct RandomIntegralSpec {
    integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    time_change: TimeChange,
    driver: LevyTriplet,
}

impl fmt::Debug for RandomIntegralSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RandomIntegralSpec")
            .field("time_change", &self.time_change)
            .field("driver", &self.driver)
            .finish_non_exhaustive()
    }
}

impl RandomIntegralSpec {
    pub fn new<H>(integrand: H, time_change: TimeChange, driver: LevyTriplet) -> Self
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            integrand: Arc::new(integrand),
            time_change,
            driver,
        }
    }

    /// ∫₀¹ t^{1/β} dY(t), whose law is J^β of the driver.
    pub fn j_beta(beta: f64, driver: LevyTriplet) -> Result<Self> {
        check_positive("β", beta)?;
        Ok(Self::new(
            move |t| t.powf(1.0 / beta),
            TimeChange::identity(),
            driver,
        ))
    }

    /// ∫₀¹ u dY(r_(α,β)(u)), whose law is J^α∘J^β of the driver.
    pub fn composition(alpha: f64, beta: f64, driver: LevyTriplet) -> Result<Self> {
        Ok(Self::new(|u| u, time_change_r(alpha, beta)?, driver))
    }

    pub fn integrand(&self, t: f64) -> f64 {
        (self.integrand)(t)
    }

    pub fn time_change(&self) -> &TimeChange {
        &self.time_change
    }

    pub fn driver(&self) -> &LevyTriplet {
        &self.driver
    }
}

/// y ↦ ∫₀¹ Φ(h(s) y) dr(s) with Φ the driver's exponent.
pub fn random_integral_exponent(spec: &RandomIntegralSpec) -> CharExponent {
    time_changed_exponent(
        &spec.driver.exponent(),
        spec.integrand.clone(),
        spec.time_change,
        exponent_quad_options(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::{Atom, LevyMeasure, NamedDensity};
    use approx::assert_relative_eq;

    fn gaussian(r: f64) -> LevyTriplet {
        LevyTriplet::new(0.0, r, LevyMeasure::zero()).unwrap()
    }

    fn atom_driver() -> LevyTriplet {
        LevyTriplet::new(
            0.3,
            0.7,
            LevyMeasure::from_atoms(vec![Atom::new(1.5, 2.0)]).unwrap(),
        )
        .unwrap()
    }

    fn close(a: &CharExponent, b: &CharExponent, ys: &[f64], tol: f64) {
        for &y in ys {
            let (u, v) = (a.eval(y).unwrap(), b.eval(y).unwrap());
            assert!((u - v).norm() < tol, "y = {y}: {u} vs {v}");
        }
    }

    const YS: [f64; 9] = [0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0, -5.0, 5.0];

    #[test]
    fn triplet_examples() {
        let g = apply_j_triplet(2.0, &gaussian(1.0)).unwrap();
        assert_relative_eq!(g.gaussian_variance(), 0.5);
        let s = apply_j_triplet(
            1.0,
            &LevyTriplet::new(1.0, 0.0, LevyMeasure::zero()).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(s.shift(), 0.5);
        let st = LevyTriplet::new(
            0.0,
            0.0,
            LevyMeasure::from_named(NamedDensity::stable_power(0.5, 1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let out = apply_j_triplet(1.0, &st).unwrap();
        assert_eq!(
            out.measure().named(),
            &[NamedDensity::stable_power(0.5, 2.0 / 3.0, 0.0)]
        );
    }

    #[test]
    fn exponent_examples() {
        let gauss = gaussian(1.0).exponent();
        let j = apply_j_exponent(2.0, &gauss).unwrap();
        assert_relative_eq!(j.eval(3.0).unwrap().re, -9.0 / 4.0, epsilon = 1e-12);
        let shift = LevyTriplet::new(0.8, 0.0, LevyMeasure::zero())
            .unwrap()
            .exponent();
        assert_relative_eq!(
            apply_j_exponent(1.0, &shift).unwrap().eval(2.0).unwrap().im,
            0.8,
            epsilon = 1e-12
        );
        assert_eq!(
            apply_j_exponent(1.0, &CharExponent::zero())
                .unwrap()
                .eval(4.0)
                .unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            compose_j_exponent(1.0, 2.0, &CharExponent::zero())
                .unwrap()
                .eval(4.0)
                .unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn composed_gaussian_matches_triplet_route() {
        let t = gaussian(1.0);
        let c = compose_j_triplet(1.0, 2.0, &t).unwrap();
        assert_relative_eq!(c.gaussian_variance(), 1.0 / 6.0, epsilon = 1e-15);
        let e = compose_j_exponent(1.0, 2.0, &t.exponent()).unwrap();
        close(&e, &c.exponent(), &YS, 1e-9);
    }

    #[test]
    fn composed_shift_without_jumps() {
        let t = LevyTriplet::new(6.0, 0.0, LevyMeasure::zero()).unwrap();
        assert_relative_eq!(
            compose_j_triplet(1.0, 2.0, &t).unwrap().shift(),
            2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn closed_form_matches_sequential_application() {
        let t = atom_driver();
        let closed = compose_j_triplet(1.0, 2.0, &t).unwrap();
        let seq = apply_j_triplet(1.0, &apply_j_triplet(2.0, &t).unwrap()).unwrap();
        close(&closed.exponent(), &seq.exponent(), &YS, 1e-8);
        let forms = compose_shift_forms(1.0, 2.0, &t).unwrap();
        assert_relative_eq!(forms.displayed, forms.combination, max_relative = 1e-14);
    }

    #[test]
    fn exponent_route_matches_triplet_route() {
        let t = atom_driver();
        for &(a, b) in &[(1.0, 2.0), (0.5, 1.5), (1.0, 1.0)] {
            let tri = compose_j_triplet(a, b, &t).unwrap().exponent();
            let ex = compose_j_exponent(a, b, &t.exponent()).unwrap();
            close(&tri, &ex, &YS, 1e-8);
        }
    }

    #[test]
    fn commutativity() {
        let phi = atom_driver().exponent();
        let a = compose_j_exponent(0.7, 1.9, &phi).unwrap();
        let b = compose_j_exponent(1.9, 0.7, &phi).unwrap();
        close(&a, &b, &YS, 0.0 + 1e-15);
    }

    #[test]
    fn factorization_examples() {
        let g = gaussian(1.0).exponent();
        assert_eq!(
            factorization_residual(1.0, 2.0, &g, 0.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(factorization_residual(1.0, 2.0, &g, 1.0).unwrap().norm() < 1e-9);
        let p = LevyTriplet::new(
            0.0,
            0.0,
            LevyMeasure::from_atoms(vec![Atom::new(1.0, 1.0)]).unwrap(),
        )
        .unwrap()
        .exponent();
        for &y in &[-3.0, -1.0, 1.0, 3.0] {
            assert!(factorization_residual(0.5, 1.5, &p, y).unwrap().norm() < 1e-8);
        }
        assert!(factorization_residual(2.0, 1.0, &g, 1.0).is_err());
    }

    #[test]
    fn factorization_factor_gaussian_chain() {
        let rho = factorization_factor(1.0, 2.0, &gaussian(1.0)).unwrap();
        assert_relative_eq!(rho.gaussian_variance(), 2.0 / 3.0, epsilon = 1e-15);
        let lhs = apply_j_triplet(2.0, &rho).unwrap();
        assert_relative_eq!(lhs.gaussian_variance(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(factorization_factor(1.0, 1.0, &gaussian(1.0)).is_err());
    }

    #[test]
    fn factorization_factor_atom_driver() {
        let nu = LevyTriplet::new(
            0.0,
            0.0,
            LevyMeasure::from_atoms(vec![Atom::new(1.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let rho = factorization_factor(0.5, 1.5, &nu).unwrap();
        let lhs = apply_j_triplet(1.5, &rho).unwrap().exponent();
        let rhs = apply_j_triplet(0.5, &nu).unwrap().exponent();
        close(&lhs, &rhs, &YS, 1e-8);
    }

    #[test]
    fn inverse_form_matches_time_change_form() {
        let phi = atom_driver().exponent();
        for &alpha in &[0.5, 1.0, 1.5] {
            let inv = inverse_time_change_exponent(alpha, &phi).unwrap();
            let fwd = compose_j_exponent(alpha, 2.0 * alpha, &phi).unwrap();
            close(&inv, &fwd, &YS, 1e-8);
        }
    }

    #[test]
    fn random_integral_specs() {
        let t = atom_driver();
        let j = random_integral_exponent(&RandomIntegralSpec::j_beta(1.5, t.clone()).unwrap());
        close(
            &j,
            &apply_j_exponent(1.5, &t.exponent()).unwrap(),
            &YS,
            1e-8,
        );
        let c = random_integral_exponent(
            &RandomIntegralSpec::composition(0.5, 1.5, t.clone()).unwrap(),
        );
        close(
            &c,
            &compose_j_exponent(0.5, 1.5, &t.exponent()).unwrap(),
            &YS,
            1e-14,
        );
    }
}
