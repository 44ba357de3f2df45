use crate::error::{Error, Result};

/// Arguments of the Gauss hypergeometric function. The model only ever
/// needs `z = -w^2` in [-1, 0] plus modest positive arguments for the
/// Legendre cross-checks.
#[derive(Debug, Clone, Copy)]
pub struct Hyp2F1Args {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl Hyp2F1Args {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

// Plain power series; requires |z| < 1 or a terminating parameter.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    for n in 0..10_000u32 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / (c + nf) * z / (nf + 1.0);
        if term == 0.0 {
            return Ok(sum + comp);
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && n > 3 {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConvergent(format!(
        "2F1({a},{b};{c};{z}) did not converge in 10000 terms"
    )))
}

/// Gauss hypergeometric function for the restricted argument range used by
/// the transform machinery: `-1 <= z <= 0.75`.
///
/// Terminating cases (`a` or `b` a non-positive integer) are summed as the
/// exact polynomial. For `z < -0.5` the Pfaff transformation
/// `2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))` moves the argument
/// into (0, 1/2] to keep convergence fast, including at `z = -1`.
pub fn hyp2f1(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1: c = {c} is a non-positive integer")));
    }
    if b == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    // polynomial short-circuit (valid for any z)
    if is_nonpositive_integer(b) || is_nonpositive_integer(a) {
        let (a, b) = if is_nonpositive_integer(b) { (a, b) } else { (b, a) };
        let k = (-b) as usize;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for n in 0..k {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / (c + nf) * z / (nf + 1.0);
            sum += term;
        }
        return Ok(sum);
    }
    if !(-1.0..=0.75).contains(&z) {
        return Err(Error::SeriesNotConvergent(format!(
            "2F1 argument {z} outside supported range [-1, 0.75]"
        )));
    }
    if z >= -0.5 {
        series(a, b, c, z)
    } else {
        let zp = z / (z - 1.0);
        Ok((1.0 - z).powf(-a) * series(a, c - b, c, zp)?)
    }
}
