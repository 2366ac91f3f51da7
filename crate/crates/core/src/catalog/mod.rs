//! Named laws: stable, exponential, Gaussian and compound Poisson, with the
//! closed forms for their images under the mappings.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::mapping::pushforward_density_exp;
use crate::triplet::{Atom, CharExponent, LevyMeasure, LevyTriplet, NamedDensity, Provenance};

/// A strictly p-stable law on ℝ with spectral masses `gamma_plus` at +1 and
/// `gamma_minus` at −1. For p = 1 and γ̄ ≠ 0 the law is stable but not
/// strictly stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSpec {
    pub p: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub shift: f64,
}

impl StableSpec {
    pub fn new(p: f64, gamma_plus: f64, gamma_minus: f64, shift: f64) -> Result<Self> {
        if !(p > 0.0 && p < 2.0) {
            return Err(domain(format!("stable index must lie in (0, 2), got {p}")));
        }
        if !(gamma_plus >= 0.0 && gamma_minus >= 0.0 && gamma_plus + gamma_minus > 0.0) {
            return Err(domain(format!(
                "spectral masses must be nonnegative with a positive sum, got ({gamma_plus}, {gamma_minus})"
            )));
        }
        if !shift.is_finite() {
            return Err(domain("stable shift must be finite"));
        }
        Ok(Self {
            p,
            gamma_plus,
            gamma_minus,
            shift,
        })
    }

    /// γ̄ = γ₊ − γ₋.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_plus - self.gamma_minus
    }
}

/// [a, 0, M_p] with M_p(dx) = γ₊ x^{−p−1} dx on (0, ∞) plus the mirrored part.
pub fn stable_triplet(s: &StableSpec) -> Result<LevyTriplet> {
    let s = StableSpec::new(s.p, s.gamma_plus, s.gamma_minus, s.shift)?;
    LevyTriplet::new(
        s.shift,
        0.0,
        LevyMeasure::from_named(NamedDensity::stable_power(s.p, s.gamma_plus, s.gamma_minus))?,
    )
}

/// J^α∘J^β(σ_p) = σ_p^{*c} * δ_{x0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableComposeResult {
    pub power_c: f64,
    pub x0: f64,
}

pub fn stable_compose_closed_form(
    alpha: f64,
    beta: f64,
    s: &StableSpec,
) -> Result<StableComposeResult> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(domain(format!("need α, β > 0, got ({alpha}, {beta})")));
    }
    let p = s.p;
    let power_c = alpha * beta / ((alpha + p) * (beta + p));
    let x0 = alpha * beta * (alpha + beta + p + 1.0)
        / ((alpha + 1.0) * (beta + 1.0) * (alpha + p) * (beta + p))
        * ((p - 1.0) * s.shift + s.gamma_bar());
    Ok(StableComposeResult { power_c, x0 })
}

/// y ↦ c Φ_{σ_p}(y) + i x0 y.
pub fn stable_closed_form_exponent(alpha: f64, beta: f64, s: &StableSpec) -> Result<CharExponent> {
    let r = stable_compose_closed_form(alpha, beta, s)?;
    let phi = stable_triplet(s)?.exponent();
    Ok(CharExponent::new(Provenance::ClosedForm, move |y| {
        Ok(phi.eval(y)? * r.power_c + Complex64::new(0.0, r.x0 * y))
    }))
}

/// [(1 − e^{−λ})/λ, 0, e^{−λx}/x dx], the exponential law with mean 1/λ.
pub fn exponential_triplet(lambda: f64) -> Result<LevyTriplet> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!(
            "exponential rate must be positive, got {lambda}"
        )));
    }
    LevyTriplet::new(
        -(-lambda).exp_m1() / lambda,
        0.0,
        LevyMeasure::from_named(NamedDensity::exponential_tail(lambda))?,
    )
}

/// Density of J^β applied to the exponential Lévy measure:
/// λβ(λx)^{β−1} Γ(−β, λx).
pub fn exp_pushforward_density(beta: f64, lambda: f64, x: f64) -> Result<f64> {
    pushforward_density_exp(beta, lambda, x)
}

/// Density of J^α∘J^β applied to the exponential Lévy measure:
/// αβλ/(β−α) [(λx)^{α−1} Γ(−α, λx) − (λx)^{β−1} Γ(−β, λx)].
pub fn exp_composed_density(alpha: f64, beta: f64, lambda: f64, x: f64) -> Result<f64> {
    if alpha == beta {
        return Err(domain(
            "the two-gamma density needs α ≠ β; apply the mapping twice for equal parameters",
        ));
    }
    let fa = pushforward_density_exp(alpha, lambda, x)? / alpha;
    let fb = pushforward_density_exp(beta, lambda, x)? / beta;
    Ok(alpha * beta / (beta - alpha) * (fa - fb))
}

/// [a, σ², 0].
pub fn gaussian_triplet(a: f64, variance: f64) -> Result<LevyTriplet> {
    LevyTriplet::new(a, variance, LevyMeasure::zero())
}

/// [0, 0, Σ mass δ_x].
pub fn compound_poisson_triplet(atoms: Vec<Atom>) -> Result<LevyTriplet> {
    LevyTriplet::new(0.0, 0.0, LevyMeasure::from_atoms(atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{apply_j_triplet, compose_j_triplet, pushforward_measure};
    use crate::numerics::incomplete_gamma_upper;
    use approx::assert_relative_eq;

    #[test]
    fn stable_examples() {
        let s = StableSpec::new(0.5, 1.0, 0.0, 0.0).unwrap();
        let t = stable_triplet(&s).unwrap();
        assert_relative_eq!(t.measure().density(4.0), 4f64.powf(-1.5));
        assert_eq!(t.measure().density(-4.0), 0.0);
        assert_relative_eq!(
            t.measure().truncated_mean(1.0).unwrap(),
            1.0 / 1.5,
            epsilon = 1e-15
        );
        assert!(stable_triplet(&StableSpec::new(1.9, 1.0, 1.0, 0.0).unwrap()).is_ok());
        assert!(StableSpec::new(2.0, 1.0, 0.0, 0.0).is_err());
        assert!(StableSpec::new(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let s = StableSpec::new(0.5, 1.0, 0.0, 0.0).unwrap();
        let r = stable_compose_closed_form(1.0, 2.0, &s).unwrap();
        assert_relative_eq!(r.power_c, 2.0 / (1.5 * 2.5), epsilon = 1e-15);
        let sym = StableSpec::new(0.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(stable_compose_closed_form(1.0, 2.0, &sym).unwrap().x0, 0.0);
    }

    #[test]
    fn closed_form_matches_pipeline_triplet() {
        for &(a, b) in &[(1.0, 2.0), (0.5, 1.5), (2.0, 2.0)] {
            for &p in &[0.5, 1.0, 1.5] {
                let s = StableSpec::new(p, 1.3, 0.3, 0.3).unwrap();
                let r = stable_compose_closed_form(a, b, &s).unwrap();
                let t = compose_j_triplet(a, b, &stable_triplet(&s).unwrap()).unwrap();
                assert_relative_eq!(t.shift(), r.power_c * s.shift + r.x0, max_relative = 1e-13);
                let NamedDensity::StablePower {
                    p: q,
                    c_plus,
                    c_minus,
                } = t.measure().named()[0]
                else {
                    panic!("stable component lost");
                };
                assert_eq!(q, p);
                assert_relative_eq!(c_plus, 1.3 * r.power_c, max_relative = 1e-15);
                assert_relative_eq!(c_minus, 0.3 * r.power_c, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn exponential_exponent() {
        let t = exponential_triplet(1.0).unwrap();
        let v = t.exponent().eval(1.0).unwrap();
        assert_relative_eq!(v.re, -0.5 * 2f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(v.im, std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
        assert_eq!(t.exponent().eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
        // mean: −i Φ'(0) = 1/λ
        let lam = 2.5;
        let e = exponential_triplet(lam).unwrap().exponent();
        let h = 1e-5;
        let d = (e.eval(h).unwrap() - e.eval(-h).unwrap()) / (2.0 * h);
        assert_relative_eq!(d.im, 1.0 / lam, max_relative = 1e-8);
        assert!(exponential_triplet(0.0).is_err());
    }

    #[test]
    fn exponential_densities() {
        assert_relative_eq!(
            exp_pushforward_density(1.0, 1.0, 1.0).unwrap(),
            0.148_495_506_775_922_05,
            max_relative = 1e-12
        );
        assert!(exp_pushforward_density(1.0, 1.0, 10.0).unwrap() < (-10.0f64).exp());
        let g1 = incomplete_gamma_upper(-1.0, 1.0).unwrap();
        let g2 = incomplete_gamma_upper(-2.0, 1.0).unwrap();
        let v = exp_composed_density(1.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 * (g1 - g2), max_relative = 1e-14);
        assert_relative_eq!(v, 0.077_607_079_156_323_82, max_relative = 1e-12);
        assert_relative_eq!(
            v,
            exp_composed_density(2.0, 1.0, 1.0, 1.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(exp_composed_density(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn exponential_densities_match_pushforward_grids() {
        let e = exponential_triplet(1.3).unwrap();
        let once = pushforward_measure(1.5, e.measure()).unwrap();
        let twice = apply_j_triplet(1.0, &apply_j_triplet(2.0, &e).unwrap()).unwrap();
        for &x in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            assert_relative_eq!(
                once.density(x),
                exp_pushforward_density(1.5, 1.3, x).unwrap(),
                max_relative = 1e-8
            );
            assert_relative_eq!(
                twice.measure().density(x),
                exp_composed_density(1.0, 2.0, 1.3, x).unwrap(),
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn helper_constructors() {
        assert_eq!(
            gaussian_triplet(0.0, 1.0)
                .unwrap()
                .exponent()
                .eval(2.0)
                .unwrap(),
            Complex64::new(-2.0, 0.0)
        );
        let cp = compound_poisson_triplet(vec![Atom::new(1.0, 1.0)]).unwrap();
        let v = cp.exponent().eval(std::f64::consts::PI).unwrap();
        assert_relative_eq!(v.re, -2.0, epsilon = 1e-14);
        assert_relative_eq!(v.im, -std::f64::consts::PI, epsilon = 1e-14);
        assert_eq!(
            gaussian_triplet(0.0, 0.0)
                .unwrap()
                .exponent()
                .eval(3.0)
                .unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }
}
