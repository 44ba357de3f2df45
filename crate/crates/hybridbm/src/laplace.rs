//! Laplace-in-time transform of the symmetric-case density, its
//! hypergeometric and Legendre representations, closed special cases, and
//! numerical inversion back to time-domain densities.

use crate::error::{Error, Result};
use crate::model::{stable_asinh, ModelParams};
use crate::special::{assoc_legendre, gamma_real, hyp2f1, Hyp2F1Args};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

/// Derived transform-space quantities at one (x, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    pub p: f64,
    /// `s = 2p / sigma2^2`.
    pub s: f64,
    /// Indicial root `gamma = sqrt(s + nu^2/4) - nu/2`.
    pub gamma: f64,
    /// `w = e^{-u}` in (0, 1]; 1 iff x = 0.
    pub w: f64,
    /// `u = asinh(sigma2 |x| / sigma1)`.
    pub u: f64,
    /// Legendre degree `L = nu/2`.
    pub legendre_l: f64,
    /// Legendre order squared `M^2 = s + nu^2/4`.
    pub legendre_m2: f64,
}

impl TransformPoint {
    pub fn new(x: f64, p: f64, params: &ModelParams) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Precondition(format!("p must be positive, got {p}")));
        }
        let nu = params.nu()?;
        let s = 2.0 * p / (params.sigma2 * params.sigma2);
        let u = stable_asinh(params.sigma2 * x.abs() / params.sigma1);
        Ok(Self {
            p,
            s,
            gamma: indicial_gamma(nu, s),
            w: (-u).exp(),
            u,
            legendre_l: 0.5 * nu,
            legendre_m2: s + 0.25 * nu * nu,
        })
    }
}

/// The root `gamma = sqrt(s + nu^2/4) - nu/2` of `g^2 + nu g - s = 0`,
/// written to avoid cancellation for large positive nu.
pub fn indicial_gamma(nu: f64, s: f64) -> f64 {
    let root = (s + 0.25 * nu * nu).sqrt();
    if nu > 0.0 {
        s / (root + 0.5 * nu)
    } else {
        root - 0.5 * nu
    }
}

fn require_symmetric(params: &ModelParams) -> Result<f64> {
    if params.mu1 != 0.0 || params.rho != 0.0 {
        return Err(Error::Precondition(
            "transform defined only for mu1 = 0, rho = 0".into(),
        ));
    }
    params.nu()
}

/// Laplace transform of the density,
///
/// `f~(x,p) = 2^{g-1} w^g G(g/2) G((g+nu+1)/2) 2F1(g, -nu/2; g+nu/2+1; -w^2)
///            / (sqrt(pi) sigma1 sigma2 (cosh u)^{nu+1} G(g+nu/2+1))`.
///
/// Even in x. Negative nu dispatches to the better-adapted representation.
pub fn transform_density(x: f64, p: f64, params: &ModelParams) -> Result<f64> {
    let nu = require_symmetric(params)?;
    if nu < 0.0 {
        return transform_density_negative_nu(x, p, params);
    }
    let tp = TransformPoint::new(x, p, params)?;
    let g = tp.gamma;
    let f = hyp2f1(Hyp2F1Args::new(g, -0.5 * nu, g + 0.5 * nu + 1.0, -tp.w * tp.w))?;
    let num = 2.0f64.powf(g - 1.0)
        * tp.w.powf(g)
        * gamma_real(0.5 * g)?
        * gamma_real(0.5 * (g + nu + 1.0))?;
    let den = PI.sqrt()
        * params.sigma1
        * params.sigma2
        * tp.u.cosh().powf(nu + 1.0)
        * gamma_real(g + 0.5 * nu + 1.0)?;
    Ok(num * f / den)
}

/// The nu < 0 representation,
///
/// `f~ = 2^{g+nu} w^{g+nu+1} G(g/2) G((g+nu+1)/2)
///       2F1(nu/2+1, g+nu+1; g+nu/2+1; -w^2)
///       / (sqrt(pi) sigma1 sigma2 G(g+nu/2+1))`.
pub fn transform_density_negative_nu(x: f64, p: f64, params: &ModelParams) -> Result<f64> {
    let nu = require_symmetric(params)?;
    let tp = TransformPoint::new(x, p, params)?;
    let g = tp.gamma;
    let f = hyp2f1(Hyp2F1Args::new(
        0.5 * nu + 1.0,
        g + nu + 1.0,
        g + 0.5 * nu + 1.0,
        -tp.w * tp.w,
    ))?;
    let num = 2.0f64.powf(g + nu)
        * tp.w.powf(g + nu + 1.0)
        * gamma_real(0.5 * g)?
        * gamma_real(0.5 * (g + nu + 1.0))?;
    let den = PI.sqrt() * params.sigma1 * params.sigma2 * gamma_real(g + 0.5 * nu + 1.0)?;
    Ok(num * f / den)
}

/// Normalization slope `Omega(nu, g) = 2^{1-g} sqrt(pi) G(g+nu/2+1) /
/// (G(g/2) G((g+nu+1)/2))`; equals `d/dw [w^g 2F1(g,-nu/2;g+nu/2+1;-w^2)]`
/// at w = 1.
pub fn omega_normalizer(nu: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Precondition("gamma must be positive".into()));
    }
    Ok(2.0f64.powf(1.0 - gamma) * PI.sqrt() * gamma_real(gamma + 0.5 * nu + 1.0)?
        / (gamma_real(0.5 * gamma)? * gamma_real(0.5 * (gamma + nu + 1.0))?))
}

/// Legendre-function representation,
///
/// `f~ = 2^{g-1+nu/2}/(sqrt(pi) sigma1 sigma2) G(g/2) G((g+nu+1)/2)
///       (cosh u)^{-(nu/2+1)} P_{nu/2}^{-nu/2-g}(|tanh u|)`.
pub fn transform_density_legendre(x: f64, p: f64, params: &ModelParams) -> Result<f64> {
    let nu = require_symmetric(params)?;
    let tp = TransformPoint::new(x, p, params)?;
    let g = tp.gamma;
    let q = tp.u.tanh().abs();
    let leg = assoc_legendre(0.5 * nu, -0.5 * nu - g, q)?;
    Ok(2.0f64.powf(g - 1.0 + 0.5 * nu) / (PI.sqrt() * params.sigma1 * params.sigma2)
        * gamma_real(0.5 * g)?
        * gamma_real(0.5 * (g + nu + 1.0))?
        * tp.u.cosh().powf(-(0.5 * nu + 1.0))
        * leg)
}

/// Frobenius coefficients a_0..a_kmax of the transform series, from
/// `a_{k+2} (k+2)(k+2+2g+nu) = -a_k (k-nu)(k+2g)` with a_0 = 1, a_1 = 0.
/// The even-k partial sums in w reproduce the hypergeometric factor.
pub fn series_recurrence_coeffs(nu: f64, gamma: f64, k_max: usize) -> Result<Vec<f64>> {
    if k_max > 200 {
        return Err(Error::Precondition("k_max must be at most 200".into()));
    }
    let mut a = vec![0.0f64; k_max + 1];
    a[0] = 1.0;
    for k in 0..k_max.saturating_sub(1) {
        let kf = k as f64;
        let den = (kf + 2.0) * (kf + 2.0 + 2.0 * gamma + nu);
        if den == 0.0 {
            return Err(Error::Domain(format!(
                "recurrence denominator vanishes at k = {k} (degenerate parameters)"
            )));
        }
        a[k + 2] = -a[k] * (kf - nu) * (kf + 2.0 * gamma) / den;
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    GaverStehfest,
    TalbotFixed,
}

// double-double accumulation helpers
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Stehfest weights for an even `order`, computed in exact integer
/// arithmetic per term.
fn stehfest_coeffs(order: usize) -> Result<Vec<f64>> {
    if order == 0 || order % 2 != 0 || order > 24 {
        return Err(Error::Precondition("Stehfest order must be even and at most 24".into()));
    }
    let m = order / 2;
    let fact = |n: usize| -> u128 { (1..=n as u128).product::<u128>().max(1) };
    let mut zeta = Vec::with_capacity(order);
    for k in 1..=order {
        let mut sum = 0.0f64;
        let j_lo = k.div_ceil(2);
        let j_hi = k.min(m);
        for j in j_lo..=j_hi {
            let num = (j as u128).pow(m as u32) * fact(2 * j);
            let den = fact(m - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
            sum += num as f64 / den as f64;
        }
        let sign = if (k + m) % 2 == 0 { 1.0 } else { -1.0 };
        zeta.push(sign * sum);
    }
    Ok(zeta)
}

/// Gaver-Stehfest inversion, `f(t) ~ (ln 2 / t) sum_k zeta_k f~(k ln2/t)`,
/// with compensated (double-double) accumulation of the alternating sum.
pub fn gaver_stehfest<F>(ftilde: F, t: f64, order: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let zeta = stehfest_coeffs(order)?;
    let scale = LN_2 / t;
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for (k, &z) in zeta.iter().enumerate() {
        let v = ftilde((k + 1) as f64 * scale)?;
        let (p, pe) = two_prod(z, v);
        let (s, se) = two_sum(hi, p);
        hi = s;
        lo += se + pe;
    }
    let out = scale * (hi + lo);
    if !out.is_finite() {
        return Err(Error::SeriesNotConvergent(
            "Gaver-Stehfest sum did not produce a finite value".into(),
        ));
    }
    Ok(out)
}

/// Closed-form transform for the even-integer special cases, evaluated at
/// complex p (used by the Talbot contour).
fn closed_transform_complex(
    x: f64,
    p: Complex64,
    params: &ModelParams,
    nu_int: i64,
) -> Result<Complex64> {
    let s2 = params.sigma2;
    let s1 = params.sigma1;
    let s = 2.0 * p / (s2 * s2);
    let u = stable_asinh(s2 * x.abs() / s1);
    let wp = |e: Complex64| (-u * e).exp();
    let hyp = (s1 * s1 + s2 * s2 * x * x).sqrt();
    let quarter = 0.25 * (nu_int * nu_int) as f64;
    let root = (s + quarter).sqrt();
    Ok(match nu_int {
        0 => {
            let g = root;
            wp(g) / (g * s2 * hyp)
        }
        2 => {
            let g = root - 1.0;
            s1 * s1 / (2.0 * s2 * hyp.powi(3)) * (wp(g) / g + wp(g + 2.0) / (g + 2.0))
        }
        4 => {
            let g = root - 2.0;
            s1.powi(4) / (4.0 * s2 * hyp.powi(5))
                * ((g + 3.0) * wp(g) / (g * (g + 2.0))
                    + 2.0 * wp(g + 2.0) / (g + 2.0)
                    + (g + 1.0) * wp(g + 4.0) / ((g + 2.0) * (g + 4.0)))
        }
        -2 => wp(root) / (s1 * s2 * root),
        -4 => {
            let g = root + 2.0;
            (wp(g - 1.0) / (g - 1.0) + wp(g - 3.0) / (g - 3.0)) / (2.0 * s1 * s2)
        }
        -6 => {
            let g = root + 3.0;
            ((g - 2.0) * wp(g - 5.0) / ((g - 5.0) * (g - 3.0))
                + 2.0 * wp(g - 3.0) / (g - 3.0)
                + (g - 4.0) * wp(g - 1.0) / ((g - 3.0) * (g - 1.0)))
                / (4.0 * s1 * s2)
        }
        _ => {
            return Err(Error::Precondition(format!(
                "no closed transform for nu = {nu_int}; TalbotFixed supports nu in {{0, 2, 4, -2, -4, -6}}"
            )))
        }
    })
}

/// Fixed-Talbot inversion on the closed-form transforms.
/// Fixed Talbot inversion (Abate-Valko, M = 32) for a transform that can be
/// evaluated at complex p.
pub fn talbot_fixed_generic<F>(ftilde: F, t: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let m = 32usize;
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (r * t).exp() * ftilde(Complex64::new(r, 0.0))?.re;
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let sk = r * theta * Complex64::new(cot, 1.0);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (sk * t).exp() * ftilde(sk)? * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    let out = r / m as f64 * sum;
    if !out.is_finite() {
        return Err(Error::SeriesNotConvergent("Talbot sum not finite".into()));
    }
    Ok(out)
}

fn talbot_fixed(x: f64, t: f64, params: &ModelParams, nu_int: i64) -> Result<f64> {
    talbot_fixed_generic(|p| closed_transform_complex(x, p, params, nu_int), t)
}

/// Invert the transform to the time-domain density f(x, t). Small negative
/// values from the acceleration are clipped to 0.
pub fn invert_transform(
    x: f64,
    t: f64,
    params: &ModelParams,
    method: InversionMethod,
) -> Result<f64> {
    let nu = require_symmetric(params)?;
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let raw = match method {
        InversionMethod::GaverStehfest => {
            // order 18: order 16 truncation error breaches the 1e-4 relative
            // target near the short-time tail, order 20 is noise-dominated
            gaver_stehfest(|p| transform_density(x, p, params), t, 18)?
        }
        InversionMethod::TalbotFixed => {
            let nu_int = nu.round() as i64;
            if (nu - nu_int as f64).abs() > 1e-9 {
                return Err(Error::Precondition(
                    "TalbotFixed requires an even-integer nu with a closed transform".into(),
                ));
            }
            talbot_fixed(x, t, params, nu_int)?
        }
    };
    Ok(raw.max(0.0))
}
