use num_complex::Complex64;
use rayon::prelude::*;

use super::{corpus, y_grid, Check, CorpusDriver, VerifyOptions};
use crate::catalog::{
    exp_composed_density, exp_pushforward_density, exponential_triplet,
    stable_closed_form_exponent, stable_compose_closed_form, stable_triplet, StableSpec,
};
use crate::error::Result;
use crate::mapping::{
    apply_j_exponent, apply_j_exponent_with, apply_j_triplet, compose_j_exponent,
    compose_j_triplet, compose_shift_forms, exponent_quad_options, factorization_factor,
    factorization_residual, pushforward_density_quadrature, pushforward_measure,
    random_integral_exponent, time_change_limit_check, time_change_r, RandomIntegralSpec,
};
use crate::numerics::{adaptive_quad_with, incomplete_gamma_upper, monotone_inverse, QuadOptions};
use crate::simulate::{
    cf_distance, empirical_cf, sample_nested_composition, sample_random_integral, SimConfig,
};
use crate::triplet::CharExponent;

const PAIRS: [(f64, f64); 3] = [(0.5, 1.5), (1.0, 2.0), (2.0, 3.0)];

fn sup_diff(a: &CharExponent, b: &CharExponent, ys: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &y in ys {
        worst = worst.max((a.eval(y)? - b.eval(y)?).norm());
    }
    Ok(worst)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Largest relative gap between two densities on `xs`, with values below
/// 1e-9 of the reference maximum compared absolutely at that scale.
fn density_gap<F: Fn(f64) -> Result<f64>, G: Fn(f64) -> Result<f64>>(
    f: F,
    g: G,
    xs: &[f64],
) -> Result<f64> {
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        pairs.push((f(x)?, g(x)?));
    }
    let scale = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let floor = 1e-9 * scale;
    Ok(pairs
        .iter()
        .map(|&(a, b)| {
            let d = (a - b).abs();
            if d == 0.0 {
                0.0
            } else {
                d / b.abs().max(floor).max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max))
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi / lo).ln() * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// 32 points per side, log-spaced in 0.01 ≤ |x| ≤ 4.
fn density_x_grid() -> Vec<f64> {
    let side = log_points(0.01, 4.0, 32);
    side.iter()
        .rev()
        .map(|x| -x)
        .chain(side.iter().copied())
        .collect()
}

fn jobs(pairs: &[(f64, f64)]) -> Vec<(CorpusDriver, (f64, f64))> {
    corpus()
        .into_iter()
        .flat_map(|d| pairs.iter().map(move |&p| (d.clone(), p)))
        .collect()
}

pub(super) fn factorization(o: &VerifyOptions) -> Vec<Check> {
    let ys = y_grid();
    let tol = o.tolerances.identity;
    jobs(&PAIRS)
        .par_iter()
        .map(|(d, (a, b))| {
            let phi = d.triplet.exponent();
            let r = (|| {
                let mut worst: f64 = 0.0;
                for &y in &ys {
                    worst = worst.max(factorization_residual(*a, *b, &phi, y)?.norm());
                }
                Ok(worst)
            })();
            Check::from_result(format!("factorization/{}/({a},{b})", d.name), tol, r)
        })
        .collect()
}

pub(super) fn commutativity(o: &VerifyOptions) -> Vec<Check> {
    let ys = y_grid();
    let tol = o.tolerances.identity;
    jobs(&PAIRS)
        .par_iter()
        .flat_map(|(d, (a, b))| {
            let phi = d.triplet.exponent();
            let r_form = (|| {
                sup_diff(
                    &compose_j_exponent(*a, *b, &phi)?,
                    &compose_j_exponent(*b, *a, &phi)?,
                    &ys,
                )
            })();
            let nested = (|| {
                let q = QuadOptions {
                    abs_tol: 1e-11,
                    rel_tol: 1e-11,
                    ..exponent_quad_options()
                };
                let ab = apply_j_exponent_with(*a, &apply_j_exponent_with(*b, &phi, q)?, q)?;
                let ba = apply_j_exponent_with(*b, &apply_j_exponent_with(*a, &phi, q)?, q)?;
                sup_diff(&ab, &ba, &ys)
            })();
            vec![
                Check::from_result(
                    format!("commutativity/{}/({a},{b})/time-change", d.name),
                    tol,
                    r_form,
                ),
                Check::from_result(
                    format!("commutativity/{}/({a},{b})/nested", d.name),
                    tol,
                    nested,
                ),
            ]
        })
        .collect()
}

pub(super) fn prop3(o: &VerifyOptions) -> Vec<Check> {
    let t = o.tolerances;
    let xs = density_x_grid();
    let route_ys = [0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0, -5.0, 5.0];
    let mut all_pairs = PAIRS.to_vec();
    all_pairs.push((1.0, 1.0));
    jobs(&all_pairs)
        .par_iter()
        .flat_map(|(d, (a, b))| {
            let (a, b) = (*a, *b);
            let name = |what: &str| format!("prop3/{}/({a},{b})/{what}", d.name);
            let tr = &d.triplet;
            let closed = match compose_j_triplet(a, b, tr) {
                Ok(c) => c,
                Err(e) => return vec![Check::errored(name("compose"), t.parameter, &e)],
            };
            let mut out = Vec::new();
            out.push(Check::from_result(
                name("routes"),
                t.identity,
                compose_j_exponent(a, b, &tr.exponent())
                    .and_then(|e| sup_diff(&closed.exponent(), &e, &route_ys)),
            ));
            if a == b {
                return out;
            }
            let seq = apply_j_triplet(b, tr).and_then(|m| apply_j_triplet(a, &m));
            let rev = apply_j_triplet(a, tr).and_then(|m| apply_j_triplet(b, &m));
            match (&seq, &rev) {
                (Ok(seq), Ok(rev)) => {
                    out.push(Check::below(
                        name("shift"),
                        rel(closed.shift(), seq.shift()),
                        t.parameter,
                    ));
                    out.push(Check::below(
                        name("variance"),
                        rel(closed.gaussian_variance(), seq.gaussian_variance()),
                        t.parameter,
                    ));
                    out.push(Check::from_result(
                        name("density"),
                        t.density,
                        density_gap(
                            |x| Ok(closed.measure().density(x)),
                            |x| Ok(seq.measure().density(x)),
                            &xs,
                        ),
                    ));
                    out.push(Check::from_result(
                        name("order"),
                        t.density,
                        density_gap(
                            |x| Ok(rev.measure().density(x)),
                            |x| Ok(seq.measure().density(x)),
                            &xs,
                        )
                        .map(|g| g.max(rel(rev.shift(), seq.shift()))),
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    out.push(Check::errored(name("sequential"), t.parameter, e))
                }
            }
            let (ca, cb) = (b / (b - a), a / (b - a));
            out.push(Check::from_result(
                name("linear-shift"),
                t.parameter,
                compose_shift_forms(a, b, tr).map(|f| rel(f.displayed, f.combination)),
            ));
            let r = tr.gaussian_variance();
            out.push(Check::below(
                name("linear-variance"),
                rel(
                    closed.gaussian_variance(),
                    ca * a / (2.0 + a) * r - cb * b / (2.0 + b) * r,
                ),
                t.parameter,
            ));
            let lin = (|| {
                let ma = pushforward_measure(a, tr.measure())?;
                let mb = pushforward_measure(b, tr.measure())?;
                density_gap(
                    |x| Ok(closed.measure().density(x)),
                    |x| Ok(ca * ma.density(x) - cb * mb.density(x)),
                    &xs,
                )
            })();
            out.push(Check::from_result(name("linear-density"), t.density, lin));
            out
        })
        .collect()
}

pub(super) fn stable(o: &VerifyOptions) -> Vec<Check> {
    let tol = o.tolerances.closed_form;
    let ys = [-3.0, -1.0, -0.5, 0.5, 1.0, 3.0];
    let mut cases = Vec::new();
    for &p in &[0.5, 1.5] {
        for &(a, b) in &[(1.0, 2.0), (0.5, 1.5), (2.0, 2.0)] {
            for &(shift, gbar) in &[(0.0, 1.0), (0.3, 1.0), (1.0, 0.0)] {
                cases.push((p, a, b, shift, gbar));
            }
        }
    }
    cases
        .par_iter()
        .flat_map(|&(p, a, b, shift, gbar)| {
            let name = |what: &str| format!("stable/p={p}/({a},{b})/a={shift},gbar={gbar}/{what}");
            let (gp, gm) = if gbar == 0.0 { (0.5, 0.5) } else { (gbar, 0.0) };
            let r = (|| {
                let s = StableSpec::new(p, gp, gm, shift)?;
                let closed = stable_closed_form_exponent(a, b, &s)?;
                let t = stable_triplet(&s)?;
                let tri = sup_diff(&compose_j_triplet(a, b, &t)?.exponent(), &closed, &ys)?;
                let quad = sup_diff(&compose_j_exponent(a, b, &t.exponent())?, &closed, &ys)?;
                let c = stable_compose_closed_form(a, b, &s)?;
                Ok((tri, quad, c))
            })();
            match r {
                Ok((tri, quad, c)) => {
                    let note = format!("c={:.6} x0={:.6}", c.power_c, c.x0);
                    vec![
                        Check::below(name("triplet"), tri, tol).with_note(note.clone()),
                        Check::below(name("quadrature"), quad, tol).with_note(note),
                    ]
                }
                Err(e) => vec![Check::errored(name("pipeline"), tol, &e)],
            }
        })
        .collect()
}

/// ∫₀^∞ min(1, x²) f(x) dx by quadrature, the tail via x = 1/t.
fn min_square_by_quadrature<F: Fn(f64) -> Result<f64>>(f: F) -> Result<f64> {
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
        ..QuadOptions::default()
    };
    let wrap = |v: Result<f64>| v.map(|v| Complex64::new(v, 0.0));
    let head = crate::numerics::try_quad(
        |x| {
            wrap(if x == 0.0 {
                Ok(0.0)
            } else {
                f(x).map(|v| x * x * v)
            })
        },
        0.0,
        1.0,
        &opts,
    )?;
    let tail = crate::numerics::try_quad(
        |t| {
            wrap(if t == 0.0 {
                Ok(0.0)
            } else {
                f(1.0 / t).map(|v| v / (t * t))
            })
        },
        0.0,
        1.0,
        &opts,
    )?;
    Ok(head.value.re + tail.value.re)
}

pub(super) fn exponential(o: &VerifyOptions) -> Vec<Check> {
    let t = o.tolerances;
    let xs = log_points(0.1, 5.0, 25);
    let mut cases: Vec<(f64, Option<f64>, f64)> = Vec::new();
    for &lambda in &[1.0, 2.5] {
        for &beta in &[0.5, 1.0, 1.5, 2.0] {
            cases.push((lambda, None, beta));
        }
        for &(a, b) in &[(1.0, 2.0), (0.5, 1.5)] {
            cases.push((lambda, Some(a), b));
        }
    }
    cases
        .par_iter()
        .flat_map(|&(lambda, alpha, beta)| {
            let e = exponential_triplet(lambda).expect("positive rate");
            let m = move |x: f64| {
                if x > 0.0 {
                    (-lambda * x).exp() / x
                } else {
                    0.0
                }
            };
            match alpha {
                None => {
                    let name = |w: &str| format!("exponential/lambda={lambda}/J^{beta}/{w}");
                    let closed = |x: f64| exp_pushforward_density(beta, lambda, x);
                    let grid = pushforward_measure(beta, e.measure());
                    vec![
                        Check::from_result(
                            name("quadrature"),
                            t.density,
                            density_gap(
                                closed,
                                |x| pushforward_density_quadrature(beta, m, x),
                                &xs,
                            ),
                        ),
                        Check::from_result(
                            name("grid"),
                            t.density,
                            grid.clone()
                                .and_then(|g| density_gap(|x| Ok(g.density(x)), closed, &xs)),
                        ),
                        Check::from_result(
                            name("mass"),
                            t.mass,
                            grid.and_then(|g| {
                                Ok(rel(
                                    g.validate().integral,
                                    min_square_by_quadrature(closed)?,
                                ))
                            }),
                        ),
                    ]
                }
                Some(a) => {
                    let name = |w: &str| format!("exponential/lambda={lambda}/({a},{beta})/{w}");
                    let closed = |x: f64| exp_composed_density(a, beta, lambda, x);
                    let seq =
                        apply_j_triplet(beta, &e).and_then(|inner| apply_j_triplet(a, &inner));
                    let inner_closed =
                        move |x: f64| exp_pushforward_density(beta, lambda, x).unwrap_or(f64::NAN);
                    vec![
                        Check::from_result(
                            name("sequential"),
                            t.density,
                            seq.clone().and_then(|s| {
                                density_gap(|x| Ok(s.measure().density(x)), closed, &xs)
                            }),
                        ),
                        Check::from_result(
                            name("quadrature"),
                            t.density,
                            density_gap(
                                closed,
                                |x| pushforward_density_quadrature(a, inner_closed, x),
                                &xs,
                            ),
                        ),
                        Check::from_result(
                            name("mass"),
                            t.mass,
                            seq.and_then(|s| {
                                Ok(rel(
                                    s.measure().validate().integral,
                                    min_square_by_quadrature(closed)?,
                                ))
                            }),
                        ),
                    ]
                }
            }
        })
        .collect()
}

pub(super) fn limit(o: &VerifyOptions) -> Vec<Check> {
    let ys = y_grid();
    let betas = [1.0, 10.0, 100.0, 1000.0];
    corpus()
        .par_iter()
        .map(|d| {
            let name = format!("limit/{}", d.name);
            let phi = d.triplet.exponent();
            let r: Result<Vec<f64>> = betas
                .iter()
                .map(|&b| sup_diff(&apply_j_exponent(b, &phi)?, &phi, &ys))
                .collect();
            match r {
                Ok(v) => {
                    let decreasing = v.windows(2).all(|w| w[1] < w[0]);
                    let mut c = Check::below(name, v[3], o.tolerances.limit).with_note(format!(
                        "beta=1,10,100,1000: {:.3e} {:.3e} {:.3e} {:.3e}{}",
                        v[0],
                        v[1],
                        v[2],
                        v[3],
                        if decreasing { "" } else { " NOT DECREASING" }
                    ));
                    c.passed &= decreasing;
                    c
                }
                Err(e) => Check::errored(name, o.tolerances.limit, &e),
            }
        })
        .collect()
}

pub(super) fn corollary2(o: &VerifyOptions) -> Vec<Check> {
    let ys = y_grid();
    let tol = o.tolerances.identity;
    let mut out: Vec<Check> = corpus()
        .par_iter()
        .map(|d| {
            let r = (|| {
                let lhs = apply_j_triplet(1.5, &d.triplet.convolution_power(2.0)?)?.exponent();
                let rhs = apply_j_triplet(1.5, &d.triplet)?.exponent().scaled(2.0);
                sup_diff(&lhs, &rhs, &ys)
            })();
            Check::from_result(format!("power/{}/beta=1.5,c=2", d.name), tol, r)
        })
        .collect();
    out.extend(
        jobs(&[(0.5, 1.5), (1.0, 2.0)])
            .par_iter()
            .map(|(d, (a, b))| {
                let r = (|| {
                    let rho = factorization_factor(*a, *b, &d.triplet)?;
                    let lhs = apply_j_triplet(*b, &rho)?.exponent();
                    let rhs = apply_j_triplet(*a, &d.triplet)?.exponent();
                    sup_diff(&lhs, &rhs, &ys)
                })();
                Check::from_result(format!("corollary2/{}/({a},{b})", d.name), tol, r)
            })
            .collect::<Vec<_>>(),
    );
    out
}

pub(super) fn montecarlo(o: &VerifyOptions) -> Vec<Check> {
    let tol = o.tolerances.monte_carlo;
    let ys = y_grid();
    let cfg = SimConfig {
        n_samples: o.mc_samples,
        n_steps: o.mc_steps,
        seed: o.seed,
        ..SimConfig::default()
    };
    let drivers: Vec<CorpusDriver> = corpus()
        .into_iter()
        .filter(|d| matches!(d.name, "atom" | "mixed" | "gaussian" | "exponential"))
        .collect();
    let mut out = Vec::new();
    for d in &drivers {
        let specs = [
            ("J^1.5", RandomIntegralSpec::j_beta(1.5, d.triplet.clone())),
            (
                "J^0.5oJ^1.5",
                RandomIntegralSpec::composition(0.5, 1.5, d.triplet.clone()),
            ),
        ];
        for (label, spec) in specs {
            let name = format!("montecarlo/{}/{label}", d.name);
            let r = (|| {
                let spec = spec?;
                let s = sample_random_integral(&spec, &cfg)?;
                let e = empirical_cf(&s, &ys)?;
                Ok((
                    cf_distance(&e, &random_integral_exponent(&spec))?,
                    e.max_std_error(),
                ))
            })();
            out.push(match r {
                Ok((dist, se)) => {
                    Check::below(name, dist, tol).with_note(format!("max std error {se:.2e}"))
                }
                Err(e) => Check::errored(name, tol, &e),
            });
        }
    }

    let atom = &drivers[0].triplet;
    let r = (|| {
        let spec = RandomIntegralSpec::composition(0.5, 1.5, atom.clone())?;
        let direct = sample_random_integral(&spec, &cfg)?;
        let nested = sample_nested_composition(0.5, 1.5, atom, &cfg, 64, 64)?;
        let (a, b) = (empirical_cf(&direct, &ys)?, empirical_cf(&nested, &ys)?);
        let gap = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max);
        let analytic = cf_distance(&b, &compose_j_exponent(0.5, 1.5, &atom.exponent())?)?;
        Ok((gap, analytic))
    })();
    match r {
        Ok((gap, analytic)) => {
            out.push(Check::below(
                "montecarlo/atom/nested-vs-time-change",
                gap,
                tol,
            ));
            out.push(Check::below(
                "montecarlo/atom/nested-vs-analytic",
                analytic,
                tol,
            ));
        }
        Err(e) => out.push(Check::errored("montecarlo/atom/nested", tol, &e)),
    }

    let r = (|| {
        let spec = RandomIntegralSpec::j_beta(1.5, atom.clone())?;
        let a = sample_random_integral(&spec, &cfg)?;
        let b = sample_random_integral(
            &spec,
            &SimConfig {
                parallel: false,
                ..cfg
            },
        )?;
        let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
        Ok(if same { 0.0 } else { 1.0 })
    })();
    out.push(
        Check::from_result("montecarlo/determinism".to_string(), 0.5, r)
            .with_note("rerun with the same seed, serial vs parallel blocks; 0 = bit-identical"),
    );
    out
}

pub(super) fn special(o: &VerifyOptions) -> Vec<Check> {
    let tol = o.tolerances.special;
    let mut out = Vec::new();
    let lattice = (|| {
        let mut worst: f64 = 0.0;
        for &c in &[-2.5, -1.5, -0.5, 0.5] {
            for &x in &[0.1f64, 1.0, 5.0] {
                let lhs = incomplete_gamma_upper(c + 1.0, x)?;
                let rhs = c * incomplete_gamma_upper(c, x)? + x.powf(c) * (-x).exp();
                worst = worst.max(rel(lhs, rhs));
            }
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        "special/recurrence-lattice".to_string(),
        tol,
        lattice,
    ));

    let oracle = (|| {
        // ∫₁^∞ e^{−u}/u du with u = 1/t
        let opts = QuadOptions {
            abs_tol: 1e-14,
            ..QuadOptions::default()
        };
        let q = adaptive_quad_with(
            |t| Complex64::new(if t == 0.0 { 0.0 } else { (-1.0 / t).exp() / t }, 0.0),
            0.0,
            1.0,
            &opts,
        )?;
        Ok((incomplete_gamma_upper(0.0, 1.0)? - q.value.re).abs())
    })();
    out.push(Check::from_result(
        "special/gamma(0,1)-vs-quadrature".to_string(),
        tol,
        oracle,
    ));

    let examples = (|| {
        let g0 = incomplete_gamma_upper(0.0, 1.0)?;
        let g1 = incomplete_gamma_upper(-1.0, 1.0)?;
        let g2 = incomplete_gamma_upper(-2.0, 1.0)?;
        let e = (-1.0f64).exp();
        Ok(rel(g1, e - g0).max(rel(g2, (e - g1) / 2.0)))
    })();
    out.push(Check::from_result(
        "special/negative-integer-orders".to_string(),
        tol,
        examples,
    ));
    out
}

pub(super) fn timechange(_o: &VerifyOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for &eps in &[1e-3, 1e-6] {
        out.push(Check::from_result(
            format!("timechange/limit/beta=1,eps={eps:e}"),
            10.0 * eps,
            time_change_limit_check(1.0, eps),
        ));
    }
    let r = (|| {
        let (a, b) = (time_change_r(1.0, 2.0)?, time_change_r(2.0, 1.0)?);
        let sym = (1..10)
            .map(|k| (a.eval(k as f64 / 10.0) - b.eval(k as f64 / 10.0)).abs())
            .fold(0.0, f64::max);
        Ok(sym.max((a.eval(0.5) - 0.75).abs()))
    })();
    out.push(Check::from_result(
        "timechange/symmetry-and-example".to_string(),
        1e-15,
        r,
    ));
    let r = (|| {
        let e = time_change_r(1.0, 1.0)?;
        Ok((e.eval(0.5) - 0.5 * (1.0 - 0.5f64.ln())).abs())
    })();
    out.push(Check::from_result(
        "timechange/equal-pair-example".to_string(),
        1e-15,
        r,
    ));
    let r = (|| {
        let t = time_change_r(0.7, 1.4)?;
        let mut worst: f64 = 0.0;
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            let numeric = monotone_inverse(|u| t.eval(u), s, 1e-15)?;
            worst = worst.max((t.inverse(s)? - numeric).abs());
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        "timechange/closed-form-inverse".to_string(),
        1e-10,
        r,
    ));
    out
}
