use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos, g = 7, n = 9 (Godfrey's coefficients). Relative accuracy is a
// few ulps over the right half plane.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    // Requires Re(z) > 0.5.
    let mut sum = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + (i as f64 - 1.0));
    }
    let t = z + LANCZOS_G - 0.5;
    0.5 * (2.0 * PI).ln() + (z - 0.5) * t.ln() - t + sum.ln()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        // reflection keeps the Lanczos argument away from the poles
        let refl = (PI / (PI * x).sin()).ln();
        return Ok(refl - lanczos_log_gamma(Complex64::new(1.0 - x, 0.0)).re);
    }
    Ok(lanczos_log_gamma(Complex64::new(x, 0.0)).re)
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(log_gamma_real(x)?.exp())
}

/// `Gamma(x)` for any real `x` away from the poles (signed result).
pub fn gamma_real_any(x: f64) -> Result<f64> {
    if x > 0.0 {
        return gamma_real(x);
    }
    if x == x.floor() {
        return Err(Error::GammaPole(x));
    }
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    Ok(PI / ((PI * x).sin() * gamma_real(1.0 - x)?))
}

/// `|Gamma(re + i im)|`.
pub fn gamma_abs_complex(re: f64, im: f64) -> Result<f64> {
    if im == 0.0 {
        if re <= 0.0 && re == re.floor() {
            return Err(Error::GammaPole(re));
        }
        if re > 0.0 {
            return Ok(log_gamma_real(re)?.exp());
        }
    }
    let z = Complex64::new(re, im);
    if re >= 0.5 {
        Ok(lanczos_log_gamma(z).re.exp())
    } else {
        // |Gamma(z)| = pi / (|sin(pi z)| |Gamma(1-z)|)
        let s = (PI * z).sin().norm();
        if s == 0.0 {
            return Err(Error::GammaPole(re));
        }
        Ok(PI / s / lanczos_log_gamma(Complex64::new(1.0, 0.0) - z).re.exp())
    }
}
