//! Time-domain and equilibrium densities: Gaussian, the nu = 0 closed
//! form, the nu = 2 chameleon family, the nu = -2 bimodal family, the
//! Student equilibrium and the Pearson Type IV skew-Student equilibrium,
//! plus CDF utilities built on them.

use crate::error::{Error, Result};
use crate::laplace::{invert_transform, InversionMethod};
use crate::model::{stable_asinh, ModelParams};
use crate::quad::{adaptive_simpson, trapezoid};
use crate::special::{gamma_abs_complex, gamma_real, normal_cdf};
use std::f64::consts::PI;

const NU_TOL: f64 = 1e-9;

fn require_symmetric_nu(params: &ModelParams, want: f64) -> Result<()> {
    if params.mu1 != 0.0 || params.rho != 0.0 {
        return Err(Error::Precondition("density requires mu1 = 0, rho = 0".into()));
    }
    let nu = params.nu()?;
    if (nu - want).abs() > NU_TOL {
        return Err(Error::Precondition(format!(
            "density defined for nu = {want}, got nu = {nu}"
        )));
    }
    Ok(())
}

/// Pure arithmetic (sigma2 = 0) Gaussian density.
pub fn gaussian_density(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    if params.sigma2 != 0.0 {
        return Err(Error::Precondition("gaussian_density requires sigma2 = 0".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let v = params.sigma1 * params.sigma1 * t;
    let d = x - params.mu1 * t;
    Ok((-d * d / (2.0 * v)).exp() / (2.0 * PI * v).sqrt())
}

/// The nu = 0 density
/// `f = exp(-u^2 / (2 sigma2^2 t)) / sqrt(2 pi t (sigma1^2 + sigma2^2 x^2))`
/// with `u = asinh(sigma2 x / sigma1)`. Osculates the Gaussian at the
/// origin.
pub fn nu0_density(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    require_symmetric_nu(params, 0.0)?;
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let u = stable_asinh(params.sigma2 * x / params.sigma1);
    let s22 = params.sigma2 * params.sigma2;
    Ok((-u * u / (2.0 * s22 * t)).exp()
        / (2.0 * PI * t * (params.sigma1 * params.sigma1 + s22 * x * x)).sqrt())
}

/// The nu = 2 "chameleon" density: Gaussian at small t, scaled Student-2 at
/// large t, variance exactly `sigma1^2 t` throughout.
pub fn chameleon_density(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    require_symmetric_nu(params, 2.0)?;
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let (s1, s2) = (params.sigma1, params.sigma2);
    let s22 = s2 * s2;
    let u = stable_asinh(s2 * x / s1).abs();
    let hyp2 = s1 * s1 + s22 * x * x;
    let term1 = s1 * (-u * u / (2.0 * t * s22) - 0.5 * t * s22).exp() / ((2.0 * PI * t).sqrt() * hyp2);
    let term2 = s2 * s1 * s1 / (2.0 * hyp2.powf(1.5))
        * (normal_cdf((u + t * s22) / (t.sqrt() * s2)) - normal_cdf((u - t * s22) / (t.sqrt() * s2)));
    Ok(term1 + term2)
}

/// The nu = -2 bimodal density in x-space,
/// `f = exp(-sigma2^2 t / 2 - u^2 / (2 sigma2^2 t)) / (sigma1 sqrt(2 pi t))`.
pub fn bimodal_density_numinus2(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    require_symmetric_nu(params, -2.0)?;
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let s22 = params.sigma2 * params.sigma2;
    let u = stable_asinh(params.sigma2 * x / params.sigma1);
    Ok((-0.5 * s22 * t - u * u / (2.0 * s22 * t)).exp() / (params.sigma1 * (2.0 * PI * t).sqrt()))
}

/// The nu = -2 density in u-space: the equal-weight mixture
/// `(1/2)[N(u; tau, tau) + N(u; -tau, tau)]`, bimodal iff tau > 1.
pub fn bimodal_density_u(u: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Precondition("tau must be positive".into()));
    }
    let norm = 1.0 / (2.0 * PI * tau).sqrt();
    let g = |mean: f64| norm * (-(u - mean) * (u - mean) / (2.0 * tau)).exp();
    Ok(0.5 * (g(tau) + g(-tau)))
}

/// Student equilibrium of the mean-reverting symmetric model: standard
/// Student with `nu` degrees of freedom scaled by
/// `sigma1 / sqrt(sigma2^2 + 2 mu2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentEquilibrium {
    pub nu: f64,
    pub scale: f64,
}

impl StudentEquilibrium {
    pub fn density(&self, x: f64) -> f64 {
        let (nu, s) = (self.nu, self.scale);
        let norm = (gamma_real(0.5 * (nu + 1.0)).unwrap())
            / (s * (nu * PI).sqrt() * gamma_real(0.5 * nu).unwrap());
        norm * (1.0 + x * x / (nu * s * s)).powf(-0.5 * (nu + 1.0))
    }
}

pub fn student_equilibrium(params: &ModelParams) -> Result<StudentEquilibrium> {
    if params.mu1 != 0.0 || params.rho != 0.0 {
        return Err(Error::Precondition("equilibrium requires mu1 = 0, rho = 0".into()));
    }
    let nu = params.nu()?;
    if !(params.mu2 > 0.0) {
        return Err(Error::Precondition("no normalizable Student equilibrium".into()));
    }
    Ok(StudentEquilibrium {
        nu,
        scale: params.sigma1 / (params.sigma2 * params.sigma2 + 2.0 * params.mu2).sqrt(),
    })
}

/// Pearson Type IV parameters derived from the model, or constructed
/// directly for a given (nu, nu2) study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonIVParams {
    pub a: f64,
    pub lambda: f64,
    pub m: f64,
    pub nu: f64,
    pub nu2: f64,
    pub k: f64,
}

fn pearson4_norm(a: f64, nu: f64, nu2: f64) -> Result<f64> {
    // k = G((nu+1)/2) / (a sqrt(pi) G(nu/2)) * |G((nu+1+i nu2)/2) / G((nu+1)/2)|^2
    let gh = gamma_real(0.5 * (nu + 1.0))?;
    let ratio = gamma_abs_complex(0.5 * (nu + 1.0), 0.5 * nu2)? / gh;
    Ok(gh / (a * PI.sqrt() * gamma_real(0.5 * nu)?) * ratio * ratio)
}

/// Direct construction from (a, lambda, nu, nu2).
pub fn pearson4_from(a: f64, lambda: f64, nu: f64, nu2: f64) -> Result<PearsonIVParams> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter("scale a must be positive".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::Precondition("nu must be positive for normalizability".into()));
    }
    Ok(PearsonIVParams {
        a,
        lambda,
        m: 0.5 * (nu + 1.0),
        nu,
        nu2,
        k: pearson4_norm(a, nu, nu2)?,
    })
}

/// Parameter map from the model: `a = (sigma1/sigma2) sqrt(1-rho^2)`,
/// `lambda = -rho sigma1/sigma2`, `m = 1 + mu2/sigma2^2`,
/// `nu2 = 2(mu1 sigma2 + rho sigma1 mu2) / (sigma1 sigma2^2 sqrt(1-rho^2))`.
pub fn pearson4_params(params: &ModelParams) -> Result<PearsonIVParams> {
    if params.rho.abs() >= 1.0 {
        return Err(Error::Precondition("|rho| = 1 degenerates the Pearson scale".into()));
    }
    let nu = params.nu()?;
    if !(nu > 0.0) {
        return Err(Error::Precondition("nu must be positive for normalizability".into()));
    }
    let root = (1.0 - params.rho * params.rho).sqrt();
    let a = params.sigma1 / params.sigma2 * root;
    let lambda = -params.rho * params.sigma1 / params.sigma2;
    let nu2 = 2.0 * (params.mu1 * params.sigma2 + params.rho * params.sigma1 * params.mu2)
        / (params.sigma1 * params.sigma2 * params.sigma2 * root);
    Ok(PearsonIVParams {
        a,
        lambda,
        m: 1.0 + params.mu2 / (params.sigma2 * params.sigma2),
        nu,
        nu2,
        k: pearson4_norm(a, nu, nu2)?,
    })
}

/// `f(x) = k [1 + ((x-lambda)/a)^2]^{-(nu+1)/2} exp[-nu2 arctan((x-lambda)/a)]`.
pub fn pearson4_density(x: f64, p4: &PearsonIVParams) -> f64 {
    let y = (x - p4.lambda) / p4.a;
    p4.k * (1.0 + y * y).powf(-0.5 * (p4.nu + 1.0)) * (-p4.nu2 * y.atan()).exp()
}

/// Closed-form Pearson IV moments, each present only above its nu
/// threshold (> 1, 2, 3, 4 respectively).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pearson4Moments {
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

pub fn pearson4_moments(p4: &PearsonIVParams) -> Pearson4Moments {
    let (a, l, nu, nu2) = (p4.a, p4.lambda, p4.nu, p4.nu2);
    let r2 = (nu - 1.0) * (nu - 1.0) + nu2 * nu2;
    let mut m = Pearson4Moments::default();
    if nu > 1.0 {
        m.mean = Some(l - a * nu2 / (nu - 1.0));
    }
    if nu > 2.0 {
        m.variance = Some(a * a * r2 / ((nu - 1.0) * (nu - 1.0) * (nu - 2.0)));
    }
    if nu > 3.0 {
        m.skewness = Some(-4.0 * nu2 / (nu - 3.0) * ((nu - 2.0) / r2).sqrt());
    }
    if nu > 4.0 {
        m.excess_kurtosis = Some(
            (6.0 * (nu - 3.0) * (nu - 1.0) * (nu - 1.0) + 6.0 * (5.0 * nu - 11.0) * nu2 * nu2)
                / ((nu - 4.0) * (nu - 3.0) * r2),
        );
    }
    m
}

/// Density families evaluable on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    Nu0,
    Chameleon,
    BimodalNuMinus2,
    Student,
    PearsonIV,
    TransformInverted,
}

/// A tabulated density; `t = None` marks an equilibrium curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub x_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub t: Option<f64>,
    pub family: Family,
}

impl DensityCurve {
    pub fn mass(&self) -> f64 {
        trapezoid(&self.x_grid, &self.f_values)
    }
}

/// Pointwise density dispatch. `t` is ignored by the equilibrium families.
pub fn density_value(family: Family, x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    match family {
        Family::Gaussian => gaussian_density(x, t, params),
        Family::Nu0 => nu0_density(x, t, params),
        Family::Chameleon => chameleon_density(x, t, params),
        Family::BimodalNuMinus2 => bimodal_density_numinus2(x, t, params),
        Family::Student => Ok(student_equilibrium(params)?.density(x)),
        Family::PearsonIV => Ok(pearson4_density(x, &pearson4_params(params)?)),
        Family::TransformInverted => invert_transform(x, t, params, InversionMethod::GaverStehfest),
    }
}

/// Tabulate a family on a grid.
pub fn density_curve(
    family: Family,
    x_grid: &[f64],
    t: f64,
    params: &ModelParams,
) -> Result<DensityCurve> {
    let f_values = x_grid
        .iter()
        .map(|&x| density_value(family, x, t, params))
        .collect::<Result<Vec<_>>>()?;
    let t = match family {
        Family::Student | Family::PearsonIV => None,
        _ => Some(t),
    };
    Ok(DensityCurve { x_grid: x_grid.to_vec(), f_values, t, family })
}

/// CDF: closed form for Gaussian, nu = 0 and the bimodal mixture;
/// quadrature from a scanned left cutoff otherwise.
pub fn density_cdf(family: Family, x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    match family {
        Family::Gaussian => {
            if params.sigma2 != 0.0 {
                return Err(Error::Precondition("gaussian CDF requires sigma2 = 0".into()));
            }
            Ok(normal_cdf((x - params.mu1 * t) / (params.sigma1 * t.sqrt())))
        }
        Family::Nu0 => {
            require_symmetric_nu(params, 0.0)?;
            let u = stable_asinh(params.sigma2 * x / params.sigma1);
            Ok(normal_cdf(u / (params.sigma2 * t.sqrt())))
        }
        Family::BimodalNuMinus2 => {
            require_symmetric_nu(params, -2.0)?;
            let tau = params.sigma2 * params.sigma2 * t;
            let u = stable_asinh(params.sigma2 * x / params.sigma1);
            Ok(0.5 * (normal_cdf((u - tau) / tau.sqrt()) + normal_cdf((u + tau) / tau.sqrt())))
        }
        _ => {
            let f = |y: f64| density_value(family, y, t, params).unwrap_or(0.0);
            let center = if family == Family::PearsonIV {
                pearson4_params(params)?.lambda
            } else {
                0.0
            };
            let scale = params.sigma1 / params.sigma2.max(1e-3);
            let mut cut = scale.max(1.0);
            for _ in 0..200 {
                if f(center - cut) < 1e-14 {
                    break;
                }
                cut *= 1.5;
            }
            let lo = center - cut;
            if x <= lo {
                return Ok(0.0);
            }
            Ok(adaptive_simpson(f, lo, x, 1e-10).clamp(0.0, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_density;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sym(nu: f64) -> ModelParams {
        ModelParams::symmetric_with_nu(nu, 1.0, 1.0).unwrap()
    }

    #[test]
    fn gaussian_examples() {
        let p = ModelParams::new(0.5, 0.0, 1.0, 0.0, 0.0).unwrap();
        // peak at x = mu1 t
        let t = 2.0;
        assert_relative_eq!(
            gaussian_density(0.5 * t, t, &p).unwrap(),
            1.0 / (2.0 * PI * t).sqrt(),
            max_relative = 1e-14
        );
        let p0 = ModelParams::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(gaussian_density(0.0, 1.0, &p0).unwrap(), 0.398_942_280_401_432_7, max_relative = 1e-9);
        let mass = integrate_density(|x| gaussian_density(x, 1.0, &p).unwrap(), 0.5, 1.0, 1e-12, 1e-16);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        assert!(gaussian_density(0.0, 1.0, &sym(0.0)).is_err());
    }

    #[test]
    fn nu0_examples() {
        let p = sym(0.0);
        // peak identical to the Gaussian peak
        assert_relative_eq!(
            nu0_density(0.0, 1.0, &p).unwrap(),
            1.0 / (2.0 * PI).sqrt(),
            max_relative = 1e-14
        );
        // x = 1, t = 1: exp(-asinh(1)^2/2)/sqrt(4 pi)
        let u = 1.0f64.asinh();
        let expect = (-0.5 * u * u).exp() / (4.0 * PI).sqrt();
        assert_relative_eq!(nu0_density(1.0, 1.0, &p).unwrap(), expect, max_relative = 1e-13);
        assert_abs_diff_eq!(expect, 0.191, epsilon = 5e-4);
        let mass = integrate_density(|x| nu0_density(x, 1.0, &p).unwrap(), 0.0, 2.0, 1e-12, 1e-16);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
        assert!(nu0_density(0.0, 1.0, &sym(1.0)).is_err());
    }

    #[test]
    fn chameleon_variance_is_sigma1_sq_t() {
        for &(s2, t) in &[(0.5f64, 1.0f64), (1.0, 0.5), (2.0, 5.0)] {
            let p = ModelParams::symmetric_with_nu(2.0, 1.0, s2).unwrap();
            let var = integrate_density(
                |x| x * x * chameleon_density(x, t, &p).unwrap(),
                0.0,
                5.0 * t.sqrt(),
                1e-10,
                1e-18,
            );
            assert_relative_eq!(var, t, max_relative = 1e-6);
            let mass = integrate_density(|x| chameleon_density(x, t, &p).unwrap(), 0.0, t.sqrt(), 1e-11, 1e-16);
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn chameleon_limits() {
        let p = sym(2.0);
        // large t: scaled Student-2 pointwise
        for &x in &[0.0f64, 0.7, 2.0] {
            let limit = 0.5 / (1.0 + x * x).powf(1.5);
            assert_relative_eq!(chameleon_density(x, 2000.0, &p).unwrap(), limit, max_relative = 1e-2);
        }
        // small t: standard-Gaussian-in-scale ratio at the origin
        let t = 1e-4;
        let ratio = chameleon_density(0.0, t, &p).unwrap() * (2.0 * PI * t).sqrt();
        assert_abs_diff_eq!(ratio, 1.0, epsilon = 1e-3);
        assert!(chameleon_density(0.0, 1.0, &sym(0.0)).is_err());
    }

    #[test]
    fn bimodal_examples() {
        let p = sym(-2.0);
        let (t, tau) = (2.0, 2.0);
        // u-space origin value
        assert_relative_eq!(
            bimodal_density_u(0.0, tau).unwrap(),
            (-0.5 * tau).exp() / (2.0 * PI * tau).sqrt(),
            max_relative = 1e-14
        );
        // Jacobian consistency: f_x(x) = f_u(u) du/dx
        for &x in &[0.0f64, 0.4, 1.5, 4.0] {
            let u = x.asinh();
            let dudx = 1.0 / (1.0 + x * x).sqrt();
            assert_relative_eq!(
                bimodal_density_numinus2(x, t, &p).unwrap(),
                bimodal_density_u(u, tau).unwrap() * dudx,
                max_relative = 1e-12
            );
        }
        // mass in x-space
        let mass = integrate_density(|x| bimodal_density_numinus2(x, t, &p).unwrap(), 0.0, 5.0, 1e-11, 1e-16);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-7);
        assert!(bimodal_density_numinus2(0.0, 1.0, &sym(2.0)).is_err());
    }

    #[test]
    fn bimodality_onset_at_tau_one() {
        // two local maxima iff tau > 1: compare the origin against nearby
        // points (maxima of the mixture sit at tanh(u) = u/tau)
        let probe = |tau: f64| {
            let f0 = bimodal_density_u(0.0, tau).unwrap();
            let grid: Vec<f64> = (1..200).map(|i| i as f64 * 0.02).collect();
            grid.iter().any(|&u| bimodal_density_u(u, tau).unwrap() > f0)
        };
        assert!(!probe(0.5));
        assert!(!probe(0.99));
        assert!(probe(1.01));
        assert!(probe(4.0));
    }

    #[test]
    fn student_equilibrium_examples() {
        let p = sym(3.0); // mu2 = 1
        let eq = student_equilibrium(&p).unwrap();
        assert_relative_eq!(eq.nu, 3.0, max_relative = 1e-14);
        assert_relative_eq!(eq.scale, 1.0 / 3.0f64.sqrt(), max_relative = 1e-14);
        let mass = integrate_density(|x| eq.density(x), 0.0, 1.0, 1e-10, 1e-15);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-7);
        // no equilibrium without mean reversion
        assert!(student_equilibrium(&sym(0.0)).is_err());
        assert!(student_equilibrium(&sym(1.0)).is_err());
    }

    #[test]
    fn student_large_nu_near_gaussian() {
        let p = ModelParams::symmetric_with_nu(200.0, 1.0, 1.0).unwrap();
        let eq = student_equilibrium(&p).unwrap();
        // matched Gaussian: same variance nu s^2/(nu-2)
        let var = eq.nu * eq.scale * eq.scale / (eq.nu - 2.0);
        let g = |x: f64| (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt();
        let kl = integrate_density(
            |x| {
                let f = eq.density(x);
                if f > 0.0 { f * (f / g(x)).ln() } else { 0.0 }
            },
            0.0,
            var.sqrt(),
            1e-10,
            1e-18,
        );
        assert!(kl.abs() < 1e-3, "KL = {kl}");
    }

    #[test]
    fn pearson4_reduces_to_student() {
        let p = sym(3.0);
        let p4 = pearson4_params(&p).unwrap();
        assert_eq!(p4.nu2, 0.0);
        assert_eq!(p4.lambda, 0.0);
        let eq = student_equilibrium(&p).unwrap();
        for &x in &[0.0, 0.5, 2.0, -1.3] {
            assert_relative_eq!(pearson4_density(x, &p4), eq.density(x), max_relative = 1e-12);
        }
        // k at nu2 = 0
        let expect = gamma_real(2.0).unwrap() / (p4.a * PI.sqrt() * gamma_real(1.5).unwrap());
        assert_relative_eq!(p4.k, expect, max_relative = 1e-12);
    }

    #[test]
    fn pearson4_mass_grid() {
        for &nu in &[3.0, 5.0] {
            for &nu2 in &[-1.0, 0.0, 2.0] {
                let p4 = pearson4_from(1.0, 0.0, nu, nu2).unwrap();
                let mass = integrate_density(|x| pearson4_density(x, &p4), p4.lambda, 3.0, 1e-11, 1e-16);
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
            }
        }
        assert!(pearson4_from(1.0, 0.0, -1.0, 0.0).is_err());
        let degenerate = ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(pearson4_params(&degenerate).is_err());
    }

    #[test]
    fn pearson4_moment_examples() {
        let p4 = pearson4_from(1.0, 0.0, 5.0, 1.0).unwrap();
        let m = pearson4_moments(&p4);
        assert_relative_eq!(m.mean.unwrap(), -0.25, max_relative = 1e-14);
        // nu2 = 0: zero skew, excess kurtosis 6/(nu-4)
        let p4 = pearson4_from(1.0, 0.0, 5.0, 0.0).unwrap();
        let m = pearson4_moments(&p4);
        assert_eq!(m.skewness.unwrap(), 0.0);
        assert_abs_diff_eq!(m.excess_kurtosis.unwrap(), 6.0, epsilon = 1e-10);
        // threshold gating
        let m = pearson4_moments(&pearson4_from(1.0, 0.0, 2.5, 0.5).unwrap());
        assert!(m.mean.is_some());
        assert!(m.variance.is_some());
        assert!(m.skewness.is_none());
        assert!(m.excess_kurtosis.is_none());
    }

    #[test]
    fn cdf_examples() {
        let p = sym(0.0);
        assert_relative_eq!(density_cdf(Family::Nu0, 0.0, 1.0, &p).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(
            density_cdf(Family::Nu0, 1.0f64.sinh(), 1.0, &p).unwrap(),
            normal_cdf(1.0),
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(normal_cdf(1.0), 0.841_344_7, epsilon = 1e-7);
        // chameleon CDF by quadrature
        let p2 = sym(2.0);
        let c = density_cdf(Family::Chameleon, 60.0, 1.0, &p2).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-6);
        assert_relative_eq!(density_cdf(Family::Chameleon, 0.0, 1.0, &p2).unwrap(), 0.5, max_relative = 1e-7);
        // bimodal mixture CDF
        let pm = sym(-2.0);
        assert_relative_eq!(
            density_cdf(Family::BimodalNuMinus2, 0.0, 1.0, &pm).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        // gaussian CDF
        let pg = ModelParams::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(density_cdf(Family::Gaussian, 0.0, 1.0, &pg).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn curves_have_unit_mass() {
        // the nu = 0 family has lognormal-like tails in x; +-100 keeps the
        // truncated mass below 1e-7
        let grid: Vec<f64> = (-10000..=10000).map(|i| i as f64 * 0.01).collect();
        for (family, params) in [
            (Family::Nu0, sym(0.0)),
            (Family::Chameleon, sym(2.0)),
            (Family::BimodalNuMinus2, sym(-2.0)),
            (Family::Student, sym(5.0)),
        ] {
            let curve = density_curve(family, &grid, 1.0, &params).unwrap();
            assert!(curve.f_values.iter().all(|&f| f >= 0.0));
            assert_abs_diff_eq!(curve.mass(), 1.0, epsilon = 1e-4);
            // even symmetry by construction
            let n = grid.len();
            for i in 0..n / 2 {
                assert_eq!(curve.f_values[i], curve.f_values[n - 1 - i]);
            }
        }
    }
}
