use crate::error::{domain, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

const CF_EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Complete gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Upper incomplete gamma Γ(c, x) = ∫ₓ^∞ u^{c-1} e^{-u} du for any real `c`
/// and `x > 0`.
pub fn incomplete_gamma_upper(c: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("incomplete gamma needs x > 0, got {x}")));
    }
    if !c.is_finite() {
        return Err(domain(format!(
            "incomplete gamma needs finite order, got {c}"
        )));
    }

    if x >= 1.0 {
        if c > 1.0 && x < c + 1.0 {
            return Ok(gamma(c) - lower_series(c, x));
        }
        return Ok(continued_fraction(c, x));
    }

    if c >= 1.0 {
        return Ok(gamma(c) - lower_series(c, x));
    }
    if c > 0.0 {
        return Ok(small_order(c, x));
    }

    // c <= 0, x < 1: recur downward from c0 = c - floor(c) ∈ [0, 1). For
    // x < 1 each step shrinks the propagated relative error by x / |c|.
    let steps = (-c.floor()) as i64;
    let c0 = c - c.floor();
    let mut g = small_order(c0, x);
    let ex = (-x).exp();
    let mut order = c0;
    for _ in 0..steps {
        order -= 1.0;
        g = (g - x.powf(order) * ex) / order;
    }
    Ok(g)
}

/// Lower incomplete gamma γ(c, x) by its power series, c > 0.
fn lower_series(c: f64, x: f64) -> f64 {
    let mut term = 1.0 / c;
    let mut sum = term;
    let mut a = c;
    for _ in 0..1000 {
        a += 1.0;
        term *= x / a;
        sum += term;
        if term.abs() < sum.abs() * CF_EPS {
            break;
        }
    }
    sum * (-x + c * x.ln()).exp()
}

/// Legendre continued fraction (modified Lentz), any real order.
fn continued_fraction(c: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - c;
    let mut cc = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - c);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        cc = b + an / cc;
        if cc.abs() < FPMIN {
            cc = FPMIN;
        }
        d = 1.0 / d;
        let del = d * cc;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    (-x + c * x.ln()).exp() * h
}

/// Γ(c, x) for c ∈ [0, 1), x < 1, written as
/// (Γ(1+c) - 1)/c - (x^c - 1)/c - Σ_{n≥1} (-1)^n x^{c+n} / (n! (c+n))
/// so that nothing cancels as c → 0; at c = 0 this is E₁(x).
fn small_order(c: f64, x: f64) -> f64 {
    let lx = x.ln();
    let head = gamma1_minus_one_over(c) - if c == 0.0 { lx } else { (c * lx).exp_m1() / c };
    let xc = if c == 0.0 { 1.0 } else { (c * lx).exp() };
    let mut sum = 0.0;
    let mut pow = 1.0;
    for n in 1..200 {
        pow *= -x / n as f64;
        let term = pow / (c + n as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    head - xc * sum
}

/// (Γ(1+c) - 1)/c, continuous at c = 0 where it equals -γ.
fn gamma1_minus_one_over(c: f64) -> f64 {
    if c.abs() >= 0.2 {
        return (gamma(1.0 + c) - 1.0) / c;
    }
    // ln Γ(1+c) = -γc + Σ_{k≥2} (-1)^k ζ(k) c^k / k
    let mut lg = -EULER_GAMMA * c;
    let mut ck = -c;
    for k in 2..40 {
        ck *= -c;
        let term = zeta(k) * ck / k as f64;
        lg += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    if c == 0.0 {
        return -EULER_GAMMA;
    }
    lg.exp_m1() / c
}

fn zeta(k: usize) -> f64 {
    const ODD: [f64; 4] = [
        1.202_056_903_159_594_3,
        1.036_927_755_143_369_9,
        1.008_349_277_381_922_8,
        1.002_008_392_826_082_2,
    ];
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    match k {
        2 => pi2 / 6.0,
        4 => pi2 * pi2 / 90.0,
        6 => pi2.powi(3) / 945.0,
        8 => pi2.powi(4) / 9450.0,
        10 => pi2.powi(5) / 93555.0,
        3 | 5 | 7 | 9 => ODD[(k - 3) / 2],
        _ => (1..=40).map(|n| (n as f64).powi(-(k as i32))).sum(),
    }
}
