use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{LevyError, Result};

// 21-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 10-point Gauss weights for the odd-indexed abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_328_534,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Split off `[lo, lo + 1e-8 (hi - lo)]` before adapting so that an
    /// integrable singularity at `lo` is isolated in its own panel.
    pub split_lower_endpoint: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: super::DEFAULT_TOL,
            rel_tol: 0.0,
            max_subdivisions: 4000,
            split_lower_endpoint: true,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            ..Self::default()
        }
    }
}

struct Segment {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    res_abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut res_abs = WGK[10] * f_center.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let scale = half.abs();
    let value = kronrod * half;
    res_abs *= scale;
    res_asc *= scale;

    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment {
        lo,
        hi,
        value,
        error,
        res_abs,
    }
}

/// Adaptive Gauss–Kronrod integration of a complex integrand over `[lo, hi]`
/// to absolute tolerance `tol`.
pub fn adaptive_quad<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult> {
    adaptive_quad_with(f, lo, hi, &QuadOptions::with_tol(tol))
}

pub fn adaptive_quad_with<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(crate::error::domain(format!(
            "quadrature needs finite lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0) {
        return Err(crate::error::domain(
            "quadrature tolerance must be positive",
        ));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    if opts.split_lower_endpoint {
        let mid = lo + 1e-8 * (hi - lo);
        heap.push(gk21(&f, lo, mid));
        heap.push(gk21(&f, mid, hi));
        evaluations += 42;
    } else {
        heap.push(gk21(&f, lo, hi));
        evaluations += 21;
    }

    let totals = |heap: &BinaryHeap<Segment>| {
        heap.iter()
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, a), s| {
                (v + s.value, e + s.error, a + s.res_abs)
            })
    };

    // running sums, refreshed from the heap before any decision is final
    let (mut value, mut error, mut res_abs) = totals(&heap);
    let mut subdivisions = 0usize;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target || error <= 50.0 * f64::EPSILON * res_abs {
            (value, error, res_abs) = totals(&heap);
            let target = opts.abs_tol.max(opts.rel_tol * value.norm());
            if error <= target || error <= 50.0 * f64::EPSILON * res_abs {
                return Ok(QuadResult {
                    value,
                    error_estimate: error,
                    evaluations,
                });
            }
        }

        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let too_narrow = !(worst.lo < mid && mid < worst.hi);
        if subdivisions >= opts.max_subdivisions || too_narrow {
            heap.push(worst);
            let (value, error, _) = totals(&heap);
            return Err(LevyError::QuadratureFailure {
                partial: value,
                error_estimate: error,
                evaluations,
            });
        }
        let left = gk21(&f, worst.lo, mid);
        let right = gk21(&f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        res_abs += left.res_abs + right.res_abs - worst.res_abs;
        heap.push(left);
        heap.push(right);
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Integrates a fallible integrand; the first error raised by `f` aborts
/// the integration and is returned instead of the quadrature result.
pub fn try_quad<F>(f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let failure: RefCell<Option<LevyError>> = RefCell::new(None);
    let wrapped = |x: f64| {
        if failure.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match f(x) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let out = adaptive_quad_with(wrapped, lo, hi, opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out
}
