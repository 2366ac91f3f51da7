use crate::error::{domain, LevyError, Result};
use crate::numerics::{incomplete_gamma_upper, GL8};
use crate::triplet::{log_nodes, Atom, GridDensity, LevyMeasure, NamedDensity};

/// Nodes per sign in a materialized pushforward density.
pub const DEFAULT_RESOLUTION: usize = 2048;
/// Pushforward grids start at this fraction of their outer edge.
pub const INNER_FRACTION: f64 = 1e-6;
/// Exponential tails are sampled out to `EXP_OUTER / λ`.
pub const EXP_OUTER: f64 = 50.0;

/// λβ(λx)^{β−1} Γ(−β, λx), the image of e^{−λx}/x under J^β.
pub fn pushforward_density_exp(beta: f64, lambda: f64, x: f64) -> Result<f64> {
    if !(beta > 0.0 && lambda > 0.0 && x > 0.0) {
        return Err(domain(format!(
            "exponential pushforward density needs β, λ, x > 0, got ({beta}, {lambda}, {x})"
        )));
    }
    let z = lambda * x;
    Ok(lambda * beta * z.powf(beta - 1.0) * incomplete_gamma_upper(-beta, z)?)
}

/// One output component per input component, in order: atoms, grids,
/// exponential tails become grids; stable powers stay analytic.
pub(crate) struct Images {
    pub grids: Vec<GridDensity>,
    pub stable: Vec<NamedDensity>,
}

pub(crate) fn component_images(beta: f64, m: &LevyMeasure, n: usize) -> Result<Images> {
    let mut grids = Vec::with_capacity(m.atoms().len() + m.grids().len());
    for a in m.atoms() {
        grids.push(atom_image(beta, a, n)?);
    }
    for g in m.grids() {
        grids.push(grid_image(beta, g, n)?);
    }
    let mut stable = Vec::new();
    for named in m.named() {
        match *named {
            NamedDensity::ExponentialTail { lambda, weight } => {
                grids.push(GridDensity::from_fn_log(
                    1.0,
                    INNER_FRACTION / lambda,
                    EXP_OUTER / lambda,
                    n,
                    |x| Ok(weight * pushforward_density_exp(beta, lambda, x)?),
                )?);
            }
            NamedDensity::StablePower { p, .. } => stable.push(named.scaled(beta / (beta + p))),
        }
    }
    Ok(Images { grids, stable })
}

/// Image of the point mass `w δ_{x0}`: density w β s^{β−1}/|x0| at s·x0.
fn atom_image(beta: f64, a: &Atom, n: usize) -> Result<GridDensity> {
    let outer = a.x.abs();
    GridDensity::from_fn_log(a.x.signum(), INNER_FRACTION * outer, outer, n, |x| {
        Ok(a.mass * beta * (x / outer).powf(beta - 1.0) / outer)
    })
}

/// m^{(β)}(w) = β ∫₀¹ s^{β−2} m(w/s) ds for a grid density m.
///
/// With τ = log w this is F(τ) = β ∫_τ^∞ e^{(β−1)(τ−v)} m(e^v) dv, computed
/// by a backward sweep over the merged input and output nodes.
fn grid_image(beta: f64, g: &GridDensity, n: usize) -> Result<GridDensity> {
    let outer = g.outer();
    let inner = g.inner().min(INNER_FRACTION * outer);
    let out_abs = log_nodes(inner, outer, n)?;
    let out_log: Vec<f64> = out_abs.iter().map(|a| a.ln()).collect();
    let in_log = g.log_nodes();

    // merged breakpoints, remembering which ones are output nodes
    let mut pts: Vec<(f64, Option<usize>)> = Vec::with_capacity(in_log.len() + out_log.len());
    let (mut i, mut j) = (0, 0);
    while i < in_log.len() || j < out_log.len() {
        let take_out = i == in_log.len() || (j < out_log.len() && out_log[j] <= in_log[i]);
        if take_out {
            if i < in_log.len()
                && (in_log[i] - out_log[j]).abs() <= 1e-13 * (1.0 + out_log[j].abs())
            {
                i += 1;
            }
            pts.push((out_log[j], Some(j)));
            j += 1;
        } else {
            pts.push((in_log[i], None));
            i += 1;
        }
    }

    let kappa = beta - 1.0;
    let (lo_in, hi_in) = (in_log[0], in_log[in_log.len() - 1]);
    let mut values = vec![0.0; out_abs.len()];
    let mut f = 0.0;
    if let Some(k) = pts[pts.len() - 1].1 {
        values[k] = 0.0;
    }
    for w in (0..pts.len() - 1).rev() {
        let (v0, v1) = (pts[w].0, pts[w + 1].0);
        let mut panel = 0.0;
        let mid = 0.5 * (v0 + v1);
        if mid > lo_in && mid < hi_in {
            let p = in_log
                .partition_point(|&v| v <= mid)
                .saturating_sub(1)
                .min(in_log.len() - 2);
            for (v, weight) in GL8.mapped(v0, v1) {
                panel += weight * (kappa * (v0 - v)).exp() * g.panel_value(p, v, v.exp());
            }
        }
        f = (-kappa * (v1 - v0)).exp() * f + panel;
        if let Some(k) = pts[w].1 {
            values[k] = beta * f;
        }
    }
    GridDensity::from_abs(
        g.sign(),
        out_abs,
        values,
        crate::triplet::Interpolation::LogLagrange,
    )
}

/// M^{(β)}(A) = ∫₀¹ M(t^{−1/β} A) dt, with non-analytic parts materialized
/// on [`DEFAULT_RESOLUTION`]-point logarithmic grids.
pub fn pushforward_measure(beta: f64, m: &LevyMeasure) -> Result<LevyMeasure> {
    pushforward_measure_with(beta, m, DEFAULT_RESOLUTION)
}

pub fn pushforward_measure_with(
    beta: f64,
    m: &LevyMeasure,
    resolution: usize,
) -> Result<LevyMeasure> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(format!("J^β needs β > 0, got {beta}")));
    }
    let images = component_images(beta, m, resolution)?;
    LevyMeasure::new(Vec::new(), images.grids, images.stable)
}

/// β ∫₀¹ s^{β−2} m(w/s) ds for the density `m` of the absolutely
/// continuous part, by adaptive quadrature. Slow; meant as a reference.
pub fn pushforward_density_quadrature<F: Fn(f64) -> f64>(beta: f64, m: F, w: f64) -> Result<f64> {
    if !(beta > 0.0) || w == 0.0 {
        return Err(domain(format!(
            "reference pushforward needs β > 0 and w ≠ 0, got ({beta}, {w})"
        )));
    }
    let opts = crate::numerics::QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
        split_lower_endpoint: true,
    };
    let f = |s: f64| {
        let v = if s == 0.0 {
            0.0
        } else {
            s.powf(beta - 2.0) * m(w / s)
        };
        num_complex::Complex64::new(if v.is_finite() { v } else { 0.0 }, 0.0)
    };
    Ok(beta
        * crate::numerics::adaptive_quad_with(f, 0.0, 1.0, &opts)?
            .value
            .re)
}

/// β/(β−α)·M^{(α)} − α/(β−α)·M^{(β)}, evaluated nodewise. A value below
/// −1e-9 relative to the terms is reported as an error.
pub(crate) fn combined_images(
    alpha: f64,
    beta: f64,
    m: &LevyMeasure,
    n: usize,
) -> Result<LevyMeasure> {
    let ia = component_images(alpha, m, n)?;
    let ib = component_images(beta, m, n)?;
    let (ca, cb) = (beta / (beta - alpha), alpha / (beta - alpha));
    let mut grids = Vec::with_capacity(ia.grids.len());
    for (ga, gb) in ia.grids.iter().zip(&ib.grids) {
        debug_assert_eq!(ga.abs_nodes(), gb.abs_nodes());
        let mut values = Vec::with_capacity(ga.len());
        for (k, (&va, &vb)) in ga.abs_values().iter().zip(gb.abs_values()).enumerate() {
            let v = ca * va - cb * vb;
            if v < -1e-9 * (ca * va).abs().max((cb * vb).abs()) {
                return Err(LevyError::Consistency(format!(
                    "composed density is negative ({v:e}) at |x| = {}",
                    ga.abs_nodes()[k]
                )));
            }
            values.push(v.max(0.0));
        }
        grids.push(GridDensity::from_abs(
            ga.sign(),
            ga.abs_nodes().to_vec(),
            values,
            ga.interpolation(),
        )?);
    }
    let stable = m
        .named()
        .iter()
        .filter_map(|named| match *named {
            NamedDensity::StablePower { p, .. } => {
                Some(named.scaled(alpha * beta / ((alpha + p) * (beta + p))))
            }
            NamedDensity::ExponentialTail { .. } => None,
        })
        .collect();
    LevyMeasure::new(Vec::new(), grids, stable)
}
