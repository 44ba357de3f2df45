use super::gamma::gamma_real_any;
use super::hyp2f1::{hyp2f1, Hyp2F1Args};
use crate::error::{Error, Result};

/// Associated Legendre function of the first kind `P_L^M(q)` for real
/// degree/order and `-1 < q < 1`, via the hypergeometric representation
///
/// `P_L^M(q) = 1/Gamma(1-M) ((1+q)/(1-q))^(M/2) 2F1(-L, L+1; 1-M; (1-q)/2)`.
///
/// Used to cross-check the Legendre form of the density transform against
/// the hypergeometric form.
pub fn assoc_legendre(l: f64, m: f64, q: f64) -> Result<f64> {
    if !(-1.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("assoc_legendre needs |q| < 1, got {q}")));
    }
    if m >= 1.0 && m == m.floor() && m > l {
        // integer order above degree: identically zero
        return Ok(0.0);
    }
    let g = gamma_real_any(1.0 - m)?;
    let factor = ((1.0 + q) / (1.0 - q)).powf(0.5 * m);
    let f = hyp2f1(Hyp2F1Args::new(-l, l + 1.0, 1.0 - m, 0.5 * (1.0 - q)))?;
    Ok(factor * f / g)
}
