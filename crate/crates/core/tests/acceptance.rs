//! Acceptance criteria. Each criterion runs the matching verify suite and a
//! set of cross-checks against oracles written here from first principles,
//! then prints one PASS/FAIL line with its runtime against the budget.

use std::time::{Duration, Instant};

use levymap::catalog::{
    exp_composed_density, exp_pushforward_density, exponential_triplet, stable_compose_closed_form,
    stable_triplet, StableSpec,
};
use levymap::mapping::{
    apply_j_exponent, apply_j_triplet, compose_j_exponent, compose_j_triplet, factorization_factor,
    time_change_r, RandomIntegralSpec,
};
use levymap::numerics::incomplete_gamma_upper;
use levymap::simulate::{sample_random_integral, SimConfig};
use levymap::triplet::{Atom, LevyMeasure, LevyTriplet};
use levymap::verify::{run_suite, Suite, VerifyOptions};
use num_complex::Complex64;

type C = Complex64;

// ---- oracles ----

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite five-point Gauss–Legendre over `panels` equal panels.
fn gl<F: Fn(f64) -> C>(f: F, lo: f64, hi: f64, panels: usize) -> C {
    let h = (hi - lo) / panels as f64;
    let mut s = C::new(0.0, 0.0);
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        for (t, w) in GL5 {
            s += f(mid + 0.5 * h * t) * w;
        }
    }
    s * (0.5 * h)
}

fn gl_real<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    gl(|x| C::new(f(x), 0.0), lo, hi, panels).re
}

/// Driver [0.3, 0.7, 2δ_{1.5} + δ_{−0.6}] and its exponent written out by hand.
fn mixed_driver() -> LevyTriplet {
    LevyTriplet::new(
        0.3,
        0.7,
        LevyMeasure::from_atoms(vec![Atom::new(1.5, 2.0), Atom::new(-0.6, 1.0)]).unwrap(),
    )
    .unwrap()
}

fn mixed_phi(y: f64) -> C {
    let i = C::i();
    i * 0.3 * y - 0.35 * y * y
        + 2.0 * ((i * 1.5 * y).exp() - 1.0)
        + ((i * -0.6 * y).exp() - 1.0 - i * y * -0.6)
}

/// ∫₀¹ φ(uy) β u^{β−1} du after u = e^{−t}.
fn j_oracle<F: Fn(f64) -> C>(beta: f64, phi: F, y: f64, panels: usize) -> C {
    gl(
        |t| phi((-t).exp() * y) * (beta * (-beta * t).exp()),
        0.0,
        40.0 / beta,
        panels,
    )
}

/// Γ(c, z) by quadrature after u = z e^t.
fn upper_gamma_oracle(c: f64, z: f64) -> f64 {
    let top = (60.0 / z).ln().max(0.0) + 2.0;
    z.powf(c) * gl_real(|t| (c * t - z * t.exp()).exp(), 0.0, top, 4000)
}

fn exp_density_oracle(beta: f64, lambda: f64, x: f64) -> f64 {
    lambda * beta * (lambda * x).powf(beta - 1.0) * upper_gamma_oracle(-beta, lambda * x)
}

/// Panel count giving four panels per unit of the truncated range.
fn nested(beta: f64) -> usize {
    (160.0 / beta).ceil() as usize
}

fn y_grid() -> Vec<f64> {
    (0..41).map(|k| -5.0 + 0.25 * k as f64).collect()
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi / lo).ln() * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

// ---- harness ----

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        if residual.is_nan() || residual >= tol {
            self.failures.push(format!(
                "{} residual {residual:.3e} >= {tol:.1e}",
                name.into()
            ));
        }
    }

    fn suite(&mut self, suite: Suite, opts: &VerifyOptions) {
        let report = run_suite(suite, opts);
        for c in report.checks.iter().filter(|c| !c.passed) {
            self.failures.push(c.line());
        }
    }
}

fn criterion(n: usize, title: &str, budget: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    if elapsed > budget {
        out.failures.push(format!(
            "runtime {:.2}s exceeds {:.0}s",
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        ));
    }
    let ok = out.failures.is_empty();
    println!(
        "{} criterion {n:>2} {title:<44} {:>7.2}s / {:>4.0}s",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    for f in &out.failures {
        println!("       {f}");
    }
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const PAIRS: [(f64, f64); 3] = [(0.5, 1.5), (1.0, 2.0), (2.0, 3.0)];

fn main() {
    let opts = VerifyOptions::default();
    let ys = y_grid();
    let mut results = Vec::new();

    results.push(criterion(1, "factorization identity", secs(30), |o| {
        o.suite(Suite::Factorization, &opts);
        let phi = mixed_driver().exponent();
        for (a, b) in PAIRS {
            let composed = compose_j_exponent(a, b, &phi).unwrap();
            let worst = ys
                .iter()
                .map(|&y| {
                    let lhs = composed.eval(y).unwrap() * (b - a);
                    let rhs =
                        j_oracle(a, mixed_phi, y, 400) * b - j_oracle(b, mixed_phi, y, 400) * a;
                    (lhs - rhs).norm()
                })
                .fold(0.0, f64::max);
            o.check(format!("mixed ({a},{b}) against oracle J"), worst, 1e-8);
        }
    }));

    results.push(criterion(
        2,
        "commutativity of compositions",
        secs(30),
        |o| {
            o.suite(Suite::Commutativity, &opts);
            let phi = mixed_driver().exponent();
            for (a, b) in PAIRS {
                let lib_ab = compose_j_exponent(a, b, &phi).unwrap();
                let lib_ba = compose_j_exponent(b, a, &phi).unwrap();
                let mut worst: f64 = 0.0;
                for &y in ys.iter().step_by(8) {
                    let nested_ab =
                        j_oracle(a, |z| j_oracle(b, mixed_phi, z, nested(b)), y, nested(a));
                    let nested_ba =
                        j_oracle(b, |z| j_oracle(a, mixed_phi, z, nested(a)), y, nested(b));
                    worst = worst
                        .max((lib_ab.eval(y).unwrap() - nested_ab).norm())
                        .max((lib_ba.eval(y).unwrap() - nested_ba).norm())
                        .max((nested_ab - nested_ba).norm());
                }
                o.check(
                    format!("mixed ({a},{b}) nested oracle both orders"),
                    worst,
                    1e-8,
                );
            }
        },
    ));

    results.push(criterion(
        3,
        "composed triplet closed forms",
        secs(30),
        |o| {
            o.suite(Suite::Prop3, &opts);
            let (x0, w) = (1.5, 2.0);
            let atom = LevyTriplet::new(
                0.0,
                0.0,
                LevyMeasure::from_atoms(vec![Atom::new(x0, w)]).unwrap(),
            )
            .unwrap();
            let mixed = mixed_driver();
            for (a, b) in PAIRS {
                let composed = compose_j_triplet(a, b, &atom).unwrap();
                let a1 = b / (b + 1.0) * w * x0.powf(-b);
                let b_alpha = w * b * x0.powf(-b) * (x0.powf(b - a) - 1.0) / (b - a);
                let shift = a / (a + 1.0) * (a1 + b_alpha);
                o.check(
                    format!("atom ({a},{b}) shift"),
                    rel(composed.shift(), shift),
                    1e-10,
                );
                let xs = log_points(0.01, 1.4, 64);
                let worst = xs
                    .iter()
                    .map(|&x| {
                        let s = x / x0;
                        let exact =
                            w * a * b / ((b - a) * x0) * (s.powf(a - 1.0) - s.powf(b - 1.0));
                        rel(composed.measure().density(x), exact)
                    })
                    .fold(0.0, f64::max);
                o.check(format!("atom ({a},{b}) density"), worst, 1e-6);
                let v = compose_j_triplet(a, b, &mixed).unwrap().gaussian_variance();
                o.check(
                    format!("mixed ({a},{b}) variance"),
                    rel(v, 0.7 * a / (2.0 + a) * b / (2.0 + b)),
                    1e-10,
                );
            }
        },
    ));

    results.push(criterion(4, "stable closed form", secs(60), |o| {
        o.suite(Suite::Stable, &opts);
        for p in [0.5, 1.5] {
            for (a, b) in [(1.0, 2.0), (0.5, 1.5), (2.0, 2.0)] {
                for (shift, gbar) in [(0.0, 1.0), (0.3, 1.0), (1.0, 0.0)] {
                    let (gp, gm) = if gbar == 0.0 { (0.5, 0.5) } else { (gbar, 0.0) };
                    let s = StableSpec::new(p, gp, gm, shift).unwrap();
                    let c = a * b / ((a + p) * (b + p));
                    // J^β then J^α: b_γ of c₊x^{−p−1} on |x| > 1 is γ̄/(γ+p).
                    let a1 = b / (b + 1.0) * (shift + gbar / (b + p));
                    let a2 = a / (a + 1.0) * (a1 + b / (b + p) * gbar / (a + p));
                    let x0 = a2 - c * shift;
                    let lib = stable_compose_closed_form(a, b, &s).unwrap();
                    let tag = format!("p={p} ({a},{b}) a={shift} gbar={gbar}");
                    o.check(format!("{tag} c"), rel(lib.power_c, c), 1e-12);
                    o.check(format!("{tag} x0"), (lib.x0 - x0).abs(), 1e-6);
                    let sigma = stable_triplet(&s).unwrap().exponent();
                    let pipeline = compose_j_triplet(a, b, &stable_triplet(&s).unwrap())
                        .unwrap()
                        .exponent();
                    let worst = ys
                        .iter()
                        .map(|&y| {
                            let expect = sigma.eval(y).unwrap() * c + C::new(0.0, x0 * y);
                            (pipeline.eval(y).unwrap() - expect).norm()
                        })
                        .fold(0.0, f64::max);
                    o.check(format!("{tag} exponent"), worst, 1e-6);
                }
            }
        }
    }));

    results.push(criterion(
        5,
        "exponential example densities",
        secs(30),
        |o| {
            o.suite(Suite::Exponential, &opts);
            let xs = log_points(0.1, 5.0, 25);
            for lambda in [1.0, 2.5] {
                let e = exponential_triplet(lambda).unwrap();
                for beta in [0.5, 1.0, 1.5, 2.0] {
                    let grid = apply_j_triplet(beta, &e).unwrap();
                    let worst = xs
                        .iter()
                        .map(|&x| {
                            let exact = exp_density_oracle(beta, lambda, x);
                            rel(exp_pushforward_density(beta, lambda, x).unwrap(), exact)
                                .max(rel(grid.measure().density(x), exact))
                        })
                        .fold(0.0, f64::max);
                    o.check(format!("lambda={lambda} J^{beta}"), worst, 1e-6);
                }
                for (a, b) in [(1.0, 2.0), (0.5, 1.5)] {
                    let sequential = apply_j_triplet(a, &apply_j_triplet(b, &e).unwrap()).unwrap();
                    let worst = xs
                        .iter()
                        .map(|&x| {
                            let exact = a * b / (b - a)
                                * (exp_density_oracle(a, lambda, x) / a
                                    - exp_density_oracle(b, lambda, x) / b);
                            rel(exp_composed_density(a, b, lambda, x).unwrap(), exact)
                                .max(rel(sequential.measure().density(x), exact))
                        })
                        .fold(0.0, f64::max);
                    o.check(format!("lambda={lambda} J^{a}oJ^{b}"), worst, 1e-6);
                }
            }
            let v = exp_composed_density(1.0, 2.0, 1.0, 1.0).unwrap();
            // high-precision evaluation of 2[Γ(−1,1) − Γ(−2,1)]
            o.check(
                "composed density at x=1",
                rel(v, 0.077_607_079_156_323_8),
                1e-12,
            );
            // the rounded published value differs in the sixth digit
            o.check(
                "composed density at x=1 vs 0.077608",
                (v - 0.077608).abs(),
                1e-6,
            );
        },
    ));

    results.push(criterion(
        6,
        "convolution power and factor construction",
        secs(15),
        |o| {
            o.suite(Suite::Corollary2, &opts);
            let nu = mixed_driver();
            for beta in [0.5, 1.5, 3.0] {
                for c in [0.25, 2.0] {
                    let lhs = apply_j_triplet(beta, &nu.convolution_power(c).unwrap())
                        .unwrap()
                        .exponent();
                    let worst = ys
                        .iter()
                        .map(|&y| {
                            (lhs.eval(y).unwrap() - j_oracle(beta, mixed_phi, y, 400) * c).norm()
                        })
                        .fold(0.0, f64::max);
                    o.check(format!("J^{beta}(nu^*{c})"), worst, 1e-8);
                }
            }
            for (a, b) in [(0.5, 1.5), (1.0, 2.0)] {
                let built = apply_j_triplet(b, &factorization_factor(a, b, &nu).unwrap())
                    .unwrap()
                    .exponent();
                let worst = ys
                    .iter()
                    .map(|&y| (built.eval(y).unwrap() - j_oracle(a, mixed_phi, y, 400)).norm())
                    .fold(0.0, f64::max);
                o.check(format!("factor construction ({a},{b})"), worst, 1e-8);
            }
        },
    ));

    results.push(criterion(7, "convergence as beta grows", secs(15), |o| {
        o.suite(Suite::Limit, &opts);
        let phi = mixed_driver().exponent();
        let ys5: Vec<f64> = (0..101).map(|k| -5.0 + 0.1 * k as f64).collect();
        let mut prev = f64::INFINITY;
        for beta in [1.0, 10.0, 100.0, 1000.0] {
            let lib = apply_j_exponent(beta, &phi).unwrap();
            let mut sup: f64 = 0.0;
            for &y in &ys5 {
                let oracle = j_oracle(beta, mixed_phi, y, 400);
                o.check(
                    format!("J^{beta} at y={y:.1}"),
                    (lib.eval(y).unwrap() - oracle).norm(),
                    1e-8,
                );
                sup = sup.max((oracle - mixed_phi(y)).norm());
            }
            o.check(
                format!("strict decrease at beta={beta}"),
                if sup < prev { 0.0 } else { 1.0 },
                0.5,
            );
            prev = sup;
        }
        o.check("distance at beta=1000", prev, 0.05);
    }));

    results.push(criterion(8, "time change limit", secs(1), |o| {
        o.suite(Suite::Timechange, &opts);
        let beta = 1.0;
        let equal = |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                u.powf(beta) * (1.0 - beta * u.ln())
            }
        };
        let lib_equal = time_change_r(beta, beta).unwrap();
        for eps in [1e-3, 1e-6] {
            let a = beta - eps;
            let lib = time_change_r(a, beta).unwrap();
            let mut sup: f64 = 0.0;
            for k in 0..=1000 {
                let u = k as f64 / 1000.0;
                let direct = (beta * u.powf(a) - a * u.powf(beta)) / (beta - a);
                o.check(
                    format!("r({a},{beta}) at u={u}"),
                    (lib.eval(u) - direct).abs(),
                    1e-9,
                );
                o.check(
                    format!("r({beta},{beta}) at u={u}"),
                    (lib_equal.eval(u) - equal(u)).abs(),
                    1e-14,
                );
                sup = sup.max((lib.eval(u) - equal(u)).abs());
            }
            o.check(format!("limit eps={eps}"), sup, 10.0 * eps);
        }
    }));

    results.push(criterion(
        9,
        "Monte Carlo against analytic exponents",
        secs(120),
        |o| {
            o.suite(Suite::Montecarlo, &opts);
            let driver = mixed_driver();
            let spec = RandomIntegralSpec::composition(0.5, 1.5, driver).unwrap();
            let cfg = SimConfig {
                n_samples: 20_000,
                n_steps: 512,
                seed: opts.seed,
                ..SimConfig::default()
            };
            let first = sample_random_integral(&spec, &cfg).unwrap();
            let again = sample_random_integral(&spec, &cfg).unwrap();
            let serial = sample_random_integral(
                &spec,
                &SimConfig {
                    parallel: false,
                    ..cfg
                },
            )
            .unwrap();
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            let identical = bits(&first) == bits(&again) && bits(&first) == bits(&serial);
            o.check(
                "byte-identical reruns",
                if identical { 0.0 } else { 1.0 },
                0.5,
            );
            let n = first.len() as f64;
            let analytic = compose_j_exponent(0.5, 1.5, &mixed_driver().exponent()).unwrap();
            let worst = ys
                .iter()
                .map(|&y| {
                    let emp = first.iter().map(|&x| (C::i() * y * x).exp()).sum::<C>() / n;
                    (emp - analytic.characteristic_function(y).unwrap()).norm()
                })
                .fold(0.0, f64::max);
            o.check("mixed J^0.5oJ^1.5 empirical", worst, 0.05);
        },
    ));

    results.push(criterion(10, "incomplete gamma", secs(1), |o| {
        o.suite(Suite::Special, &opts);
        for c in [-2.5, -1.5, -0.5, 0.5] {
            for x in [0.1, 1.0, 5.0] {
                let lhs = incomplete_gamma_upper(c + 1.0, x).unwrap();
                let rhs = c * incomplete_gamma_upper(c, x).unwrap() + x.powf(c) * (-x).exp();
                o.check(format!("recurrence c={c} x={x}"), rel(lhs, rhs), 1e-9);
                o.check(
                    format!("oracle c={c} x={x}"),
                    rel(
                        incomplete_gamma_upper(c, x).unwrap(),
                        upper_gamma_oracle(c, x),
                    ),
                    1e-9,
                );
            }
        }
        let g01 = incomplete_gamma_upper(0.0, 1.0).unwrap();
        o.check(
            "Gamma(0,1) vs quadrature",
            (g01 - upper_gamma_oracle(0.0, 1.0)).abs(),
            1e-9,
        );
        o.check(
            "Gamma(0,1) vs E1(1)",
            (g01 - 0.219_383_934_395_520_27).abs(),
            1e-12,
        );
        let gm1 = incomplete_gamma_upper(-1.0, 1.0).unwrap();
        o.check("Gamma(-1,1)", (gm1 - ((-1.0f64).exp() - g01)).abs(), 1e-12);
    }));

    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
