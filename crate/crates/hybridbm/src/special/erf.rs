use crate::error::{Error, Result};
use std::f64::consts::PI;

// Cody's rational Chebyshev approximations for erf/erfc (CALERF).
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const ERF_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_376e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const ERF_D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_5e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_7e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const ERF_P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_6e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const ERF_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_5e0,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

/// Complementary error function, relative accuracy a few ulps for x > 0.
pub fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let result = if ax <= 0.46875 {
        let y = ax * ax;
        let mut num = ERF_A[4] * y;
        let mut den = y;
        for i in 0..3 {
            num = (num + ERF_A[i]) * y;
            den = (den + ERF_B[i]) * y;
        }
        return 1.0 - x * (num + ERF_A[3]) / (den + ERF_B[3]);
    } else if ax <= 4.0 {
        let y = ax;
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        exp_mx2(ax) * (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let ysq = 1.0 / (ax * ax);
        let mut num = ERF_P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + ERF_P[i]) * ysq;
            den = (den + ERF_Q[i]) * ysq;
        }
        let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
        exp_mx2(ax) * (1.0 / PI.sqrt() - r) / ax
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

// exp(-x^2) split to avoid the rounding of x*x dominating the result.
fn exp_mx2(x: f64) -> f64 {
    let xh = (x * 16.0).trunc() / 16.0;
    (-xh * xh).exp() * (-(x - xh) * (x + xh)).exp()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

// Acklam's rational approximation, then Newton refinement on normal_cdf.
const INV_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const INV_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const INV_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const INV_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];

/// Standard normal quantile (inverse CDF) for `u` in (0, 1).
pub fn normal_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("quantile needs u in (0,1), got {u}")));
    }
    const P_LOW: f64 = 0.02425;
    let mut x = if u < P_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((INV_C[0] * q + INV_C[1]) * q + INV_C[2]) * q + INV_C[3]) * q + INV_C[4]) * q
            + INV_C[5])
            / ((((INV_D[0] * q + INV_D[1]) * q + INV_D[2]) * q + INV_D[3]) * q + 1.0)
    } else if u <= 1.0 - P_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((INV_A[0] * r + INV_A[1]) * r + INV_A[2]) * r + INV_A[3]) * r + INV_A[4]) * r
            + INV_A[5])
            * q
            / (((((INV_B[0] * r + INV_B[1]) * r + INV_B[2]) * r + INV_B[3]) * r + INV_B[4]) * r
                + 1.0)
    } else {
        let q = (-2.0 * (1.0 - u).ln()).sqrt();
        -(((((INV_C[0] * q + INV_C[1]) * q + INV_C[2]) * q + INV_C[3]) * q + INV_C[4]) * q
            + INV_C[5])
            / ((((INV_D[0] * q + INV_D[1]) * q + INV_D[2]) * q + INV_D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        x -= (normal_cdf(x) - u) / pdf;
    }
    Ok(x)
}

/// `ln P(Z > k)` for the standard normal, valid far beyond the underflow
/// threshold of the linear-scale tail (k up to several hundred).
pub fn normal_tail_log(k: f64) -> f64 {
    if k < 8.0 {
        return (0.5 * erfc(k / std::f64::consts::SQRT_2)).ln();
    }
    // asymptotic series Q(k) ~ phi(k)/k * sum_n (-1)^n (2n-1)!!/k^{2n},
    // truncated at its smallest term
    let k2 = k * k;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut n = 0u32;
    loop {
        let next = term * (2.0 * n as f64 + 1.0) / k2;
        if next >= term.abs() || next < 1e-17 {
            break;
        }
        n += 1;
        term = next;
        sum += if n % 2 == 0 { term } else { -term };
        if n > 200 {
            break;
        }
    }
    -0.5 * k2 - k.ln() - 0.5 * (2.0 * PI).ln() + sum.ln()
}
