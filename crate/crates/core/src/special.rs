//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! For `x <= 2` the ascending series (A&S 9.6.13, 9.6.11) is summed
//! directly. For `x > 2` Steed's continued fraction (Temme's CF2) yields the
//! exponentially scaled values `e^x·K_ν(x)` without overflow, which is what
//! the quasiparticle model needs at large `ħω/2kT`.
//! Both branches are accurate to a few ulp over `[1e-3, 700]`.

use core::f64::consts::PI;

use libm::{exp, log, sqrt};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 500;

/// `K0(x)` for `x > 0`. Returns `+inf` at 0 and NaN for negative input.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k_series(x).0
    } else {
        k_scaled_cf(x).0 * exp(-x)
    }
}

/// `K1(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k_series(x).1
    } else {
        k_scaled_cf(x).1 * exp(-x)
    }
}

/// Exponentially scaled `e^x·K0(x)`.
pub fn bessel_k0e(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k_series(x).0 * exp(x)
    } else {
        k_scaled_cf(x).0
    }
}

/// Exponentially scaled `e^x·K1(x)`.
pub fn bessel_k1e(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k_series(x).1 * exp(x)
    } else {
        k_scaled_cf(x).1
    }
}

fn k_series(x: f64) -> (f64, f64) {
    if x.is_nan() || x < 0.0 {
        return (f64::NAN, f64::NAN);
    }
    if x == 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let y = 0.25 * x * x;
    let ln_half = log(0.5 * x);

    // term_k = y^k / (k!)^2 for I0, y^k / (k!(k+1)!) for I1
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut i0 = 1.0;
    let mut i1 = 1.0;
    let mut harmonic = 0.0;
    let mut k0_tail = 0.0;
    // psi(k+1) + psi(k+2) = -2γ + H_k + H_{k+1}
    let mut k1_tail = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t0;
        i1 += t1;
        k0_tail += harmonic * t0;
        k1_tail += (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0)) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(ln_half + EULER_GAMMA) * i0 + k0_tail;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

/// Steed's algorithm for order 0; returns `(e^x·K0, e^x·K1)`.
fn k_scaled_cf(x: f64) -> (f64, f64) {
    if x.is_infinite() {
        return (0.0, 0.0);
    }
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let h = a1 * h;
    let k0 = sqrt(PI / (2.0 * x)) / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // (x, K0, K1, e^x K0, e^x K1) from 30-digit reference arithmetic.
    const TABLE: [(f64, f64, f64, f64, f64); 12] = [
        (
            1e-3,
            7.023_688_800_562_381_3,
            999.996_238_156_085_57,
            7.030_716_002_378_251_5,
            1_000.996_734_559_068_5,
        ),
        (
            0.1,
            2.427_069_024_702_016_6,
            9.853_844_780_870_606_1,
            2.682_326_102_262_894_4,
            10.890_182_683_049_697,
        ),
        (
            0.5,
            0.924_419_071_227_665_86,
            1.656_441_120_003_300_9,
            1.524_109_385_773_909_5,
            2.731_009_708_211_785_7,
        ),
        (
            1.0,
            0.421_024_438_240_708_33,
            0.601_907_230_197_234_57,
            1.144_463_079_806_895,
            1.636_153_486_263_258_2,
        ),
        (
            1.9999,
            0.113_907_860_256_893_62,
            0.139_884_265_831_691_02,
            0.841_587_406_598_602_83,
            1.033_509_331_487_225_3,
        ),
        (
            2.0,
            0.113_893_872_749_533_44,
            0.139_865_881_816_522_43,
            0.841_568_215_070_771_42,
            1.033_476_847_068_688_6,
        ),
        (
            2.5,
            0.062_347_553_200_366_186,
            0.073_890_816_347_747_064,
            0.759_548_690_328_099_58,
            0.900_174_423_907_878_09,
        ),
        (
            5.0,
            0.003_691_098_334_042_594_3,
            0.004_044_613_445_452_164_2,
            0.547_807_564_313_518_99,
            0.600_273_858_788_312_58,
        ),
        (
            10.0,
            1.778_006_231_616_765_2e-5,
            1.864_877_345_382_558_5e-5,
            0.391_631_934_436_598_67,
            0.410_766_570_595_788_75,
        ),
        (
            50.0,
            3.410_167_749_789_495_5e-23,
            3.444_102_226_717_555_6e-23,
            0.176_807_155_857_429_34,
            0.178_566_558_558_815_57,
        ),
        (
            200.0,
            1.225_681_979_776_533_5e-88,
            1.228_742_373_472_985_8e-88,
            0.088_567_458_339_296_658,
            0.088_788_601_585_003_68,
        ),
        (
            700.0,
            4.669_776_431_685_376_9e-306,
            4.673_110_796_707_966_1e-306,
            0.047_362_369_454_613_572,
            0.047_396_187_653_494_544,
        ),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn matches_reference_table() {
        for &(x, k0, k1, k0e, k1e) in &TABLE {
            assert!(rel(bessel_k0(x), k0) < 1e-13, "K0({x}) = {}", bessel_k0(x));
            assert!(rel(bessel_k1(x), k1) < 1e-13, "K1({x}) = {}", bessel_k1(x));
            assert!(rel(bessel_k0e(x), k0e) < 1e-13, "K0e({x})");
            assert!(rel(bessel_k1e(x), k1e) < 1e-13, "K1e({x})");
        }
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let lo = k_series(SERIES_LIMIT);
        let hi = k_scaled_cf(SERIES_LIMIT);
        let e = exp(SERIES_LIMIT);
        assert!(rel(lo.0 * e, hi.0) < 1e-14);
        assert!(rel(lo.1 * e, hi.1) < 1e-14);
    }

    #[test]
    fn k0_derivative_is_minus_k1() {
        for &x in &[0.01, 0.3, 1.5, 3.0, 12.0] {
            let h = 1e-6 * x;
            let d = (bessel_k0(x + h) - bessel_k0(x - h)) / (2.0 * h);
            assert!(rel(-d, bessel_k1(x)) < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn edge_values() {
        assert!(bessel_k0(0.0).is_infinite());
        assert!(bessel_k0(-1.0).is_nan());
        assert_eq!(bessel_k0e(f64::INFINITY), 0.0);
    }
}
