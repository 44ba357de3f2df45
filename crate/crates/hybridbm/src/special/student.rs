use super::erf::normal_quantile;
use super::gamma::log_gamma_real;
use crate::error::{Error, Result};
use std::f64::consts::PI;

// Regularized incomplete beta I_x(a,b) by the standard continued fraction
// (modified Lentz), with the symmetry switch at x = (a+1)/(a+b+2).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = log_gamma_real(a + b).unwrap() - log_gamma_real(a).unwrap()
        - log_gamma_real(b).unwrap()
        + a * x.ln()
        + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

/// CDF of the standard Student-t with `nu` degrees of freedom.
pub fn student_cdf(x: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("student_cdf needs nu > 0, got {nu}")));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// One-sided upper tail `P(T > k)` of the standard Student-t.
pub fn student_tail(k: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("student_tail needs nu > 0, got {nu}")));
    }
    if k == 0.0 {
        return Ok(0.5);
    }
    let half = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + k * k));
    Ok(if k > 0.0 { half } else { 1.0 - half })
}

/// Quantile of the standard Student-t. Closed forms for `nu` in {1, 2, 4};
/// root-finding on the CDF otherwise.
pub fn student_quantile(u: f64, nu: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("quantile needs u in (0,1), got {u}")));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("student_quantile needs nu > 0, got {nu}")));
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    if nu == 1.0 {
        return Ok((PI * (u - 0.5)).tan());
    }
    if nu == 2.0 {
        return Ok((2.0 * u - 1.0) / (2.0 * u * (1.0 - u)).sqrt());
    }
    if nu == 4.0 {
        let alpha = 4.0 * u * (1.0 - u);
        let sq = alpha.sqrt();
        let q = 2.0 * ((sq.acos() / 3.0).cos() / sq - 1.0).sqrt();
        return Ok(if u > 0.5 { q } else { -q });
    }
    // bisection from a normal-quantile based bracket; CDF is strictly monotone
    let z = normal_quantile(u)?;
    let (mut lo, mut hi) = if u > 0.5 {
        let mut hi = (z * 2.0).max(2.0);
        while student_cdf(hi, nu)? < u {
            hi *= 2.0;
            if hi > 1e300 {
                break;
            }
        }
        (0.0, hi)
    } else {
        let mut lo = (z * 2.0).min(-2.0);
        while student_cdf(lo, nu)? > u {
            lo *= 2.0;
            if lo < -1e300 {
                break;
            }
        }
        (lo, 0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if student_cdf(mid, nu)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn closed_form_quantiles() {
        assert_eq!(student_quantile(0.5, 7.3).unwrap(), 0.0);
        assert_relative_eq!(student_quantile(0.75, 1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(student_quantile(0.9, 2.0).unwrap(), 1.885_618_083_164_127, max_relative = 1e-12);
        // t-table spot checks
        assert_relative_eq!(student_quantile(0.975, 4.0).unwrap(), 2.776_445_105_198, max_relative = 1e-9);
        assert_relative_eq!(student_quantile(0.95, 10.0).unwrap(), 1.812_461_122_811_4, max_relative = 1e-7);
    }

    #[test]
    fn cdf_quantile_inverse() {
        for &nu in &[0.7, 1.0, 2.0, 3.5, 4.0, 12.0] {
            for &u in &[0.01, 0.2, 0.5, 0.77, 0.99] {
                let q = student_quantile(u, nu).unwrap();
                assert_abs_diff_eq!(student_cdf(q, nu).unwrap(), u, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn normal_limit() {
        for &u in &[0.01, 0.1, 0.9, 0.99] {
            let t = student_quantile(u, 1e6).unwrap();
            let z = normal_quantile(u).unwrap();
            assert_abs_diff_eq!(t, z, epsilon = 1e-3);
        }
    }

    #[test]
    fn tails() {
        assert_eq!(student_tail(0.0, 4.0).unwrap(), 0.5);
        // P(T_4 > 25): dominant term 3/25^4
        let p = student_tail(25.0, 4.0).unwrap();
        assert_relative_eq!(p, 7.583e-6, max_relative = 1e-2);
        // symmetry
        let a = student_tail(1.3, 3.0).unwrap();
        let b = student_tail(-1.3, 3.0).unwrap();
        assert_abs_diff_eq!(a + b, 1.0, epsilon = 1e-14);
        assert!(student_tail(2.0, 0.0).is_err());
    }
}
