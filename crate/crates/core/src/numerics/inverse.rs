use crate::error::{domain, Result};

/// Inverts a continuous strictly increasing map of `[0, 1]` by bisection,
/// returning `u` with `|r(u) - t| <= tol`.
pub fn monotone_inverse<R: Fn(f64) -> f64>(r: R, t: f64, tol: f64) -> Result<f64> {
    let (r0, r1) = (r(0.0), r(1.0));
    if !(t >= r0 && t <= r1) {
        return Err(domain(format!("{t} is outside the range [{r0}, {r1}]")));
    }
    if !(tol > 0.0) {
        return Err(domain("inversion tolerance must be positive"));
    }
    if (r0 - t).abs() <= tol {
        return Ok(0.0);
    }
    if (r1 - t).abs() <= tol {
        return Ok(1.0);
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = r(mid);
        if (v - t).abs() <= tol {
            return Ok(mid);
        }
        if v < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(mid)
}
