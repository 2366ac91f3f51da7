use std::f64::consts::PI;

use num_complex::Complex64;

use super::exponent::compensated_kernel;
use super::grid::GridDensity;
use crate::error::{LevyError, Result};
use crate::numerics::{gamma, incomplete_gamma_upper, EULER_GAMMA};

/// A point mass of the Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(x: f64, mass: f64) -> Self {
        Self { x, mass }
    }
}

/// Analytic Lévy densities with closed-form exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedDensity {
    /// `weight · e^{-λx} / x` on `(0, ∞)`.
    ExponentialTail { lambda: f64, weight: f64 },
    /// `c_plus · x^{-p-1}` on `(0, ∞)` and `c_minus · |x|^{-p-1}` on `(-∞, 0)`.
    StablePower { p: f64, c_plus: f64, c_minus: f64 },
}

impl NamedDensity {
    pub fn exponential_tail(lambda: f64) -> Self {
        NamedDensity::ExponentialTail {
            lambda,
            weight: 1.0,
        }
    }

    pub fn stable_power(p: f64, c_plus: f64, c_minus: f64) -> Self {
        NamedDensity::StablePower { p, c_plus, c_minus }
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    out.push(format!("exponential tail needs λ > 0, got {lambda}"));
                }
                if !(weight >= 0.0 && weight.is_finite()) {
                    out.push(format!(
                        "exponential tail weight must be nonnegative, got {weight}"
                    ));
                }
            }
            NamedDensity::StablePower { p, c_plus, c_minus } => {
                if !(p > 0.0 && p < 2.0) {
                    out.push(format!(
                        "stable power exponent must lie in (0, 2), got p = {p}; ∫ min(1, x²) x^(-p-1) dx diverges"
                    ));
                }
                if !(c_plus >= 0.0 && c_minus >= 0.0 && c_plus.is_finite() && c_minus.is_finite()) {
                    out.push(format!(
                        "stable power weights must be nonnegative, got ({c_plus}, {c_minus})"
                    ));
                }
            }
        }
        out
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => {
                if x > 0.0 {
                    weight * (-lambda * x).exp() / x
                } else {
                    0.0
                }
            }
            NamedDensity::StablePower { p, c_plus, c_minus } => {
                if x > 0.0 {
                    c_plus * x.powf(-p - 1.0)
                } else if x < 0.0 {
                    c_minus * (-x).powf(-p - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed-form ∫ (e^{iyx} - 1 - iyx 1_{|x|≤1}) ρ(x) dx.
    pub fn exponent(&self, y: f64) -> Complex64 {
        if y == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => {
                let log_term = -Complex64::new(1.0, -y / lambda).ln();
                let compensator = Complex64::new(0.0, y * (1.0 - (-lambda).exp()) / lambda);
                (log_term - compensator) * weight
            }
            NamedDensity::StablePower { p, c_plus, c_minus } => {
                one_sided_stable(p, y) * c_plus + one_sided_stable(p, -y) * c_minus
            }
        }
    }

    /// ∫_{|x|>1} x |x|^{-1-β} ρ(x) dx.
    pub fn truncated_mean(&self, beta: f64) -> Result<f64> {
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => {
                Ok(weight * lambda.powf(beta) * incomplete_gamma_upper(-beta, lambda)?)
            }
            NamedDensity::StablePower { p, c_plus, c_minus } => Ok((c_plus - c_minus) / (beta + p)),
        }
    }

    /// ∫ min(1, x²) ρ(x) dx.
    pub fn min_square_integral(&self) -> Result<f64> {
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => {
                let inner = (1.0 - (-lambda).exp() * (1.0 + lambda)) / (lambda * lambda);
                Ok(weight * (inner + incomplete_gamma_upper(0.0, lambda)?))
            }
            NamedDensity::StablePower { p, c_plus, c_minus } => {
                Ok((c_plus + c_minus) * (1.0 / (2.0 - p) + 1.0 / p))
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            NamedDensity::ExponentialTail { lambda, weight } => NamedDensity::ExponentialTail {
                lambda,
                weight: weight * c,
            },
            NamedDensity::StablePower { p, c_plus, c_minus } => NamedDensity::StablePower {
                p,
                c_plus: c_plus * c,
                c_minus: c_minus * c,
            },
        }
    }
}

/// ∫₀^∞ (e^{iyx} - 1 - iyx 1_{x≤1}) x^{-p-1} dx.
fn one_sided_stable(p: f64, y: f64) -> Complex64 {
    if y == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let ay = y.abs();
    if p == 1.0 {
        return Complex64::new(-0.5 * PI * ay, y * (1.0 - EULER_GAMMA - ay.ln()));
    }
    let phase = -0.5 * PI * p * y.signum();
    let scale = gamma(-p) * ay.powf(p);
    Complex64::from_polar(scale, phase) - Complex64::new(0.0, y / (1.0 - p))
}

/// Outcome of checking the Lévy-measure integrability condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// ∫ min(1, x²) M(dx), as far as it could be evaluated.
    pub integral: f64,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty() && self.integral.is_finite()
    }
}

/// Largest tolerated ∫₀^{inner} x² m dx implied by a grid's innermost node.
pub const GRID_INNER_MASS_LIMIT: f64 = 1e-6;

/// Checks atoms, grid densities and analytic families against
/// ∫ min(1, x²) M(dx) < ∞.
pub fn validate_measure(
    atoms: &[Atom],
    grids: &[GridDensity],
    named: &[NamedDensity],
) -> ValidationReport {
    let mut problems = Vec::new();
    let mut integral = 0.0;

    for a in atoms {
        if !a.x.is_finite() || a.x == 0.0 {
            problems.push(format!(
                "atom location must be finite and nonzero, got {}",
                a.x
            ));
        }
        if !(a.mass > 0.0 && a.mass.is_finite()) {
            problems.push(format!(
                "atom at {} must carry positive mass, got {}",
                a.x, a.mass
            ));
        }
        integral += a.mass * a.x.abs().min(1.0).powi(2);
    }

    for g in grids {
        let inner = g.inner();
        let edge_mass = inner.powi(3) * g.abs_values()[0] / 3.0;
        if edge_mass > GRID_INNER_MASS_LIMIT {
            problems.push(format!(
                "grid starting at |x| = {inner} leaves an unevaluated inner mass ≈ {edge_mass:.3e} > {GRID_INNER_MASS_LIMIT:e}"
            ));
        }
        integral += g.integrate_real(|x| x.abs().min(1.0).powi(2), &[1.0]);
    }

    for n in named {
        let p = n.problems();
        if p.is_empty() {
            match n.min_square_integral() {
                Ok(v) => integral += v,
                Err(e) => problems.push(e.to_string()),
            }
        } else {
            integral = f64::INFINITY;
            problems.extend(p);
        }
    }

    ValidationReport { integral, problems }
}

/// A Lévy measure on ℝ \ {0}, kept as a formal sum of components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevyMeasure {
    atoms: Vec<Atom>,
    grids: Vec<GridDensity>,
    named: Vec<NamedDensity>,
}

impl LevyMeasure {
    pub fn new(
        atoms: Vec<Atom>,
        grids: Vec<GridDensity>,
        named: Vec<NamedDensity>,
    ) -> Result<Self> {
        let report = validate_measure(&atoms, &grids, &named);
        if !report.is_valid() {
            return Err(LevyError::InvalidMeasure(report.problems.join("; ")));
        }
        Ok(Self {
            atoms,
            grids,
            named,
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, Vec::new(), Vec::new())
    }

    pub fn from_named(named: NamedDensity) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), vec![named])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn grids(&self) -> &[GridDensity] {
        &self.grids
    }

    pub fn named(&self) -> &[NamedDensity] {
        &self.named
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.grids.is_empty() && self.named.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_measure(&self.atoms, &self.grids, &self.named)
    }

    /// Density of the absolutely continuous part at `x` (atoms excluded).
    pub fn density(&self, x: f64) -> f64 {
        self.grids.iter().map(|g| g.eval(x)).sum::<f64>()
            + self.named.iter().map(|n| n.density(x)).sum::<f64>()
    }

    /// Jump part of the exponent, ∫ (e^{iyx} - 1 - iyx 1_{[-1,1]}(x)) M(dx).
    pub fn jump_exponent(&self, y: f64) -> Complex64 {
        if y == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut total: Complex64 = self
            .atoms
            .iter()
            .map(|a| compensated_kernel(y, a.x) * a.mass)
            .sum();
        total += self.named.iter().map(|n| n.exponent(y)).sum::<Complex64>();
        for g in &self.grids {
            total += g.integrate(|x| compensated_kernel(y, x), &[1.0]);
        }
        total
    }

    /// b_{M,β} = ∫_{|x|>1} x |x|^{-1-β} M(dx).
    pub fn truncated_mean(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return Err(crate::error::domain(format!(
                "truncated mean needs β > 0, got {beta}"
            )));
        }
        let kernel = |x: f64| {
            if x.abs() > 1.0 {
                x * x.abs().powf(-1.0 - beta)
            } else {
                0.0
            }
        };
        let mut total: f64 = self.atoms.iter().map(|a| a.mass * kernel(a.x)).sum();
        for g in &self.grids {
            total += g.integrate_real(kernel, &[1.0]);
        }
        for n in &self.named {
            total += n.truncated_mean(beta)?;
        }
        if !total.is_finite() {
            return Err(LevyError::Consistency(format!(
                "truncated mean for β = {beta} is not finite"
            )));
        }
        Ok(total)
    }

    /// Total mass, when finite (atoms and grids only).
    pub fn total_mass(&self) -> Option<f64> {
        if !self.named.is_empty() {
            return None;
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let grids: f64 = self
            .grids
            .iter()
            .map(|g| g.integrate_real(|_| 1.0, &[]))
            .sum();
        Some(atoms + grids)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.x, a.mass * c))
                .collect(),
            grids: self.grids.iter().map(|g| g.scaled(c)).collect(),
            named: self.named.iter().map(|n| n.scaled(c)).collect(),
        }
    }

    /// Formal sum of two measures.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.atoms.extend_from_slice(&other.atoms);
        out.grids.extend(other.grids.iter().cloned());
        out.named.extend_from_slice(&other.named);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_quad_with, QuadOptions};
    use crate::triplet::grid::Interpolation;
    use approx::assert_relative_eq;

    /// Brute-force ∫₀^∞ (e^{iyx} - 1 - iyx 1_{x≤1}) ρ(x) dx: adaptive on
    /// (0, 1], fixed chunks on (1, L], and `tail(L)` for the remainder.
    fn quad_one_sided<F: Fn(f64) -> f64, T: Fn(f64) -> Complex64>(
        rho: F,
        y: f64,
        big_l: f64,
        tail: T,
    ) -> Complex64 {
        let opts = QuadOptions {
            abs_tol: 1e-13,
            max_subdivisions: 20_000,
            ..QuadOptions::default()
        };
        let mut total = adaptive_quad_with(|x| compensated_kernel(y, x) * rho(x), 0.0, 1.0, &opts)
            .unwrap()
            .value;
        let chunk = 0.5;
        let mut lo = 1.0;
        let chunk_opts = QuadOptions {
            split_lower_endpoint: false,
            ..opts
        };
        while lo < big_l {
            let hi = (lo + chunk).min(big_l);
            total += adaptive_quad_with(|x| compensated_kernel(y, x) * rho(x), lo, hi, &chunk_opts)
                .unwrap()
                .value;
            lo = hi;
        }
        total + tail(big_l)
    }

    /// ∫_L^∞ (e^{iyx} - 1) x^{-q} dx to two asymptotic terms.
    fn power_tail(q: f64, y: f64, l: f64) -> Complex64 {
        let e = Complex64::new(0.0, y * l).exp();
        let iy = Complex64::new(0.0, y);
        let osc = -e * l.powf(-q) / iy * (1.0 + q / (iy * l) + q * (q + 1.0) / (iy * l * iy * l));
        osc - l.powf(1.0 - q) / (q - 1.0)
    }

    #[test]
    fn exponential_tail_exponent_matches_quadrature() {
        let n = NamedDensity::ExponentialTail {
            lambda: 1.3,
            weight: 0.7,
        };
        for &y in &[-2.0, 0.4, 3.0] {
            let q = quad_one_sided(|x| n.density(x), y, 60.0, |_| Complex64::new(0.0, 0.0));
            assert!(
                (n.exponent(y) - q).norm() < 1e-8,
                "y={y}: {} vs {q}",
                n.exponent(y)
            );
        }
    }

    #[test]
    fn stable_exponent_matches_quadrature() {
        for &p in &[0.5, 1.0, 1.5] {
            let n = NamedDensity::stable_power(p, 1.0, 0.0);
            for &y in &[-1.5, 0.8] {
                let q = quad_one_sided(|x| n.density(x), y, 400.0, |l| power_tail(p + 1.0, y, l));
                assert!(
                    (n.exponent(y) - q).norm() < 1e-8,
                    "p={p} y={y}: {} vs {q}",
                    n.exponent(y)
                );
            }
        }
        let both = NamedDensity::stable_power(0.5, 1.0, 2.0);
        let y = 1.1;
        let expect = one_sided_stable(0.5, y) + one_sided_stable(0.5, -y) * 2.0;
        assert!((both.exponent(y) - expect).norm() < 1e-15);
    }

    #[test]
    fn truncated_mean_examples() {
        let m = LevyMeasure::from_atoms(vec![Atom::new(2.0, 3.0)]).unwrap();
        assert_relative_eq!(m.truncated_mean(1.0).unwrap(), 1.5, epsilon = 1e-15);

        let s = NamedDensity::stable_power(0.5, 1.5, 0.0);
        assert_relative_eq!(s.truncated_mean(1.0).unwrap(), 1.0, epsilon = 1e-15);

        let e = NamedDensity::exponential_tail(1.0);
        let b = e.truncated_mean(1.0).unwrap();
        assert_relative_eq!(b, 0.148_495_506_775_922_05, max_relative = 1e-12);
        // quadrature oracle ∫₁^∞ x^{-2} e^{-x} dx, x = 1/t
        let q = crate::numerics::adaptive_quad(
            |t| Complex64::new(if t == 0.0 { 0.0 } else { (-1.0 / t).exp() }, 0.0),
            0.0,
            1.0,
            1e-13,
        )
        .unwrap();
        assert_relative_eq!(b, q.value.re, max_relative = 1e-10);
    }

    #[test]
    fn atoms_at_unit_distance_are_compensated() {
        let m = LevyMeasure::from_atoms(vec![Atom::new(1.0, 1.0), Atom::new(-1.0, 1.0)]).unwrap();
        assert_eq!(m.truncated_mean(0.5).unwrap(), 0.0);
        let y = std::f64::consts::PI;
        let phi = LevyMeasure::from_atoms(vec![Atom::new(1.0, 1.0)])
            .unwrap()
            .jump_exponent(y);
        assert_relative_eq!(phi.re, -2.0, epsilon = 1e-14);
        assert_relative_eq!(phi.im, -y, epsilon = 1e-14);
    }

    #[test]
    fn validation_examples() {
        let r = validate_measure(&[Atom::new(1.0, 2.5)], &[], &[]);
        assert!(r.is_valid());
        assert_relative_eq!(r.integral, 2.5);

        assert!(
            validate_measure(&[], &[], &[NamedDensity::stable_power(1.999, 1.0, 0.0)]).is_valid()
        );
        assert!(
            !validate_measure(&[], &[], &[NamedDensity::stable_power(2.0, 1.0, 0.0)]).is_valid()
        );
        assert!(!validate_measure(&[Atom::new(0.0, 1.0)], &[], &[]).is_valid());
        assert!(!validate_measure(&[Atom::new(1.0, 0.0)], &[], &[]).is_valid());
        assert!(!validate_measure(&[], &[], &[NamedDensity::exponential_tail(-1.0)]).is_valid());
        assert!(LevyMeasure::from_named(NamedDensity::stable_power(2.5, 1.0, 1.0)).is_err());
    }

    #[test]
    fn closed_form_min_square_integrals_match_quadrature() {
        let opts = QuadOptions {
            abs_tol: 1e-12,
            ..QuadOptions::default()
        };
        let e = NamedDensity::ExponentialTail {
            lambda: 0.7,
            weight: 2.0,
        };
        let head = adaptive_quad_with(
            |x| Complex64::new(x * x * e.density(x), 0.0),
            0.0,
            1.0,
            &opts,
        )
        .unwrap();
        let tail = adaptive_quad_with(
            |t| {
                Complex64::new(
                    if t == 0.0 {
                        0.0
                    } else {
                        e.density(1.0 / t) / (t * t)
                    },
                    0.0,
                )
            },
            0.0,
            1.0,
            &opts,
        )
        .unwrap();
        assert_relative_eq!(
            e.min_square_integral().unwrap(),
            head.value.re + tail.value.re,
            max_relative = 1e-10
        );

        let s = NamedDensity::stable_power(0.5, 1.0, 3.0);
        assert_relative_eq!(
            s.min_square_integral().unwrap(),
            4.0 * (1.0 / 1.5 + 2.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn grid_min_square_integral_matches_riemann_sum() {
        let g = GridDensity::new(
            vec![1e-3, 0.2, 0.7, 1.4, 3.0],
            vec![2.0, 2.0, 1.0, 0.5, 0.1],
            Interpolation::Linear,
        )
        .unwrap();
        let r = validate_measure(&[], std::slice::from_ref(&g), &[]);
        let n = 400_000;
        let (lo, hi) = (1e-3, 3.0);
        let h = (hi - lo) / n as f64;
        let riemann: f64 = (0..n)
            .map(|k| {
                let x = lo + (k as f64 + 0.5) * h;
                x.min(1.0).powi(2) * g.eval(x) * h
            })
            .sum();
        assert!(r.is_valid());
        assert_relative_eq!(r.integral, riemann, max_relative = 1e-4);
    }

    #[test]
    fn grid_with_heavy_inner_edge_is_rejected() {
        let g = GridDensity::new(vec![0.5, 1.0], vec![100.0, 1.0], Interpolation::Linear).unwrap();
        let r = validate_measure(&[], &[g], &[]);
        assert!(!r.is_valid());
    }
}
