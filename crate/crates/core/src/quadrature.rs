//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of decreasing error estimate until the
//! summed estimate falls below `max(abs_tol, rel_tol * |I|)`. Error estimates
//! use the QUADPACK rescaling of the Gauss/Kronrod difference.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol,
            max_intervals: 4000,
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::relative(1e-10)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Summed error estimate over all intervals.
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Single 15-point Kronrod rule on `[a, b]` with its error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                tol,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to avoid the drift of the running updates.
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult {
        value,
        error,
        intervals: heap.len(),
    })
}

/// Integrates `f` over `[a, inf)` via `x = a + t/(1-t)`, `t` in `[0, 1)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate(
        |t: f64| {
            let one_minus = 1.0 - t;
            if one_minus <= 0.0 {
                return 0.0;
            }
            let x = a + t / one_minus;
            f(x) / (one_minus * one_minus)
        },
        0.0,
        1.0,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_in_one_rule() {
        // Kronrod 15 integrates degree 22 exactly.
        let (v, _) = gk15(&|x: f64| x.powi(20), 0.0, 1.0);
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrals() {
        let r = integrate(|x: f64| x.sin(), 0.0, PI, QuadOptions::relative(1e-12)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.error <= 1e-12 * 2.0);

        let r = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, QuadOptions::relative(1e-12)).unwrap();
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-12);

        let r = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), 0.0, QuadOptions::relative(1e-12)).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularity_handled_adaptively() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::relative(1e-9)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }
}
