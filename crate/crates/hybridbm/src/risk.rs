//! VaR calculators and tail-event diagnostics: Gaussian and hyperbolic
//! signed VaR, standardized tail probabilities, and the variance-explosion
//! report.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::moments::{sigma_event_equivalent, variance_closed_form, variance_explosion_factor};
use crate::special::{normal_quantile, normal_tail_log, student_tail};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarModel {
    GaussianVar,
    HyperbolicVar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarRequest {
    /// Percentile point in (0, 1).
    pub u0: f64,
    pub t: f64,
    pub params: ModelParams,
    pub model: VarModel,
}

impl VarRequest {
    pub fn new(u0: f64, t: f64, params: ModelParams, model: VarModel) -> Result<Self> {
        if !(u0 > 0.0 && u0 < 1.0) {
            return Err(Error::Precondition(format!("u0 must lie in (0,1), got {u0}")));
        }
        if !(t > 0.0) {
            return Err(Error::Precondition("t must be positive".into()));
        }
        Ok(Self { u0, t, params, model })
    }
}

/// Signed Gaussian VaR, `sigma1 sqrt(t) Q(u0)`.
pub fn gaussian_var(req: &VarRequest) -> Result<f64> {
    if req.model != VarModel::GaussianVar {
        return Err(Error::Precondition("request is not GaussianVar".into()));
    }
    Ok(req.params.sigma1 * req.t.sqrt() * normal_quantile(req.u0)?)
}

/// Signed hyperbolic VaR for the nu = 0 market,
/// `(sigma1/sigma2) sinh(sigma2 sqrt(t) Q(u0))`.
pub fn hyperbolic_var(req: &VarRequest) -> Result<f64> {
    if req.model != VarModel::HyperbolicVar {
        return Err(Error::Precondition("request is not HyperbolicVar".into()));
    }
    if params_sigma2(req) == 0.0 {
        return Err(Error::Precondition(
            "sigma2 = 0 has no hyperbolic VaR; use gaussian_var".into(),
        ));
    }
    let p = &req.params;
    Ok(p.sigma1 / p.sigma2 * (p.sigma2 * req.t.sqrt() * normal_quantile(req.u0)?).sinh())
}

fn params_sigma2(req: &VarRequest) -> f64 {
    req.params.sigma2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailFamily {
    Gaussian,
    StudentNu,
}

/// One-sided standardized tail probability P(X > k). The Gaussian branch
/// works in log space so it never underflows for k up to 40.
pub fn tail_probability(k_sigma: f64, family: TailFamily, nu: Option<f64>) -> Result<f64> {
    if k_sigma < 0.0 {
        return Err(Error::Precondition("k must be non-negative".into()));
    }
    match family {
        TailFamily::Gaussian => Ok(normal_tail_log(k_sigma).exp()),
        TailFamily::StudentNu => {
            let nu = nu.ok_or_else(|| Error::Precondition("StudentNu requires nu".into()))?;
            if !(nu > 0.0) {
                return Err(Error::Precondition("nu must be positive".into()));
            }
            student_tail(k_sigma, nu)
        }
    }
}

/// Log10 of the Gaussian tail probability, usable far below underflow.
pub fn tail_probability_log10(k_sigma: f64) -> f64 {
    normal_tail_log(k_sigma) / std::f64::consts::LN_10
}

/// One row of the explosion diagnostic table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosionRow {
    pub t: f64,
    pub variance: f64,
    pub explosion_factor: f64,
    /// What a 25-sigma event (naive variance) really is.
    pub k_equivalent_25: f64,
}

/// Tabulate variance, explosion factor and the 25-sigma equivalence over a
/// time grid. Requires the symmetric (rho = 0, mu1 = 0) model.
pub fn explosion_report(params: &ModelParams, t_grid: &[f64]) -> Result<Vec<ExplosionRow>> {
    t_grid
        .iter()
        .map(|&t| {
            let variance = if t == 0.0 { 0.0 } else { variance_closed_form(params, t)? };
            let ve = variance_explosion_factor(params, t)?;
            Ok(ExplosionRow {
                t,
                variance,
                explosion_factor: ve,
                k_equivalent_25: if t == 0.0 { 25.0 } else { sigma_event_equivalent(25.0, params, t)? },
            })
        })
        .collect()
}

/// Experimental: u-space mixture quantile VaR for the nu = -2
/// momentum-dominated market. Interprets the drift-corrected hyperbolic
/// idea through the known bimodal density; not the standard estimator.
pub fn experimental_bimodal_var(req: &VarRequest) -> Result<f64> {
    let p = &req.params;
    let nu = p.nu()?;
    if (nu + 2.0).abs() > 1e-9 || p.mu1 != 0.0 || p.rho != 0.0 {
        return Err(Error::Precondition(
            "experimental mixture VaR defined only for the symmetric nu = -2 market".into(),
        ));
    }
    let tau = p.sigma2 * p.sigma2 * req.t;
    let st = tau.sqrt();
    let cdf = |u: f64| {
        0.5 * (crate::special::normal_cdf((u - tau) / st) + crate::special::normal_cdf((u + tau) / st))
    };
    // bisection for the u-space mixture quantile
    let mut lo = -(tau + 10.0 * st);
    let mut hi = tau + 10.0 * st;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < req.u0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    Ok(p.sigma1 / p.sigma2 * u.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn req(u0: f64, t: f64, params: ModelParams, model: VarModel) -> VarRequest {
        VarRequest::new(u0, t, params, model).unwrap()
    }

    fn sym(nu: f64, sigma1: f64, sigma2: f64) -> ModelParams {
        ModelParams::symmetric_with_nu(nu, sigma1, sigma2).unwrap()
    }

    #[test]
    fn gaussian_var_examples() {
        let p = ModelParams::new(0.0, 0.0, 0.2, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            gaussian_var(&req(0.5, 1.0, p, VarModel::GaussianVar)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let v = gaussian_var(&req(0.01, 1.0, p, VarModel::GaussianVar)).unwrap();
        assert_abs_diff_eq!(v, -0.46527, epsilon = 1e-4);
        // doubling sigma1 doubles |sVaR|
        let p2 = ModelParams::new(0.0, 0.0, 0.4, 0.0, 0.0).unwrap();
        let v2 = gaussian_var(&req(0.01, 1.0, p2, VarModel::GaussianVar)).unwrap();
        assert_relative_eq!(v2, 2.0 * v, max_relative = 1e-12);
        assert!(VarRequest::new(0.0, 1.0, p, VarModel::GaussianVar).is_err());
        assert!(VarRequest::new(1.0, 1.0, p, VarModel::GaussianVar).is_err());
    }

    #[test]
    fn hyperbolic_var_examples() {
        let p = sym(0.0, 0.2, 1.0);
        let v = hyperbolic_var(&req(0.01, 1.0, p, VarModel::HyperbolicVar)).unwrap();
        assert_abs_diff_eq!(v, 0.2 * (-2.326_347_874_040_841f64).sinh(), epsilon = 1e-9);
        assert_abs_diff_eq!(v, -1.0142, epsilon = 1e-3);
        // sigma2 -> 0 limit approaches gaussian
        let ps = sym(0.0, 0.2, 1e-4);
        let vh = hyperbolic_var(&req(0.01, 1.0, ps, VarModel::HyperbolicVar)).unwrap();
        let pg = ModelParams::new(0.0, ps.mu2, 0.2, 0.0, 0.0).unwrap();
        let vg = gaussian_var(&req(0.01, 1.0, pg, VarModel::GaussianVar)).unwrap();
        assert_relative_eq!(vh, vg, max_relative = 1e-6);
        // sigma2 = 0 rejected
        let p0 = ModelParams::new(0.0, 0.0, 0.2, 0.0, 0.0).unwrap();
        assert!(hyperbolic_var(&req(0.01, 1.0, p0, VarModel::HyperbolicVar)).is_err());
    }

    #[test]
    fn hyperbolic_var_dominates_and_is_odd() {
        let p = sym(0.0, 0.2, 1.0);
        for &u0 in &[0.01, 0.05, 0.25, 0.4, 0.6, 0.95] {
            let h = hyperbolic_var(&req(u0, 1.0, p, VarModel::HyperbolicVar)).unwrap();
            let g = gaussian_var(&req(u0, 1.0, p, VarModel::GaussianVar)).unwrap();
            assert!(h.abs() >= g.abs() - 1e-12);
            // odd under u0 -> 1 - u0
            let h_mirror = hyperbolic_var(&req(1.0 - u0, 1.0, p, VarModel::HyperbolicVar)).unwrap();
            assert_abs_diff_eq!(h_mirror, -h, epsilon = 1e-9);
        }
        // monotone in u0
        let mut last = f64::NEG_INFINITY;
        for i in 1..40 {
            let u0 = i as f64 / 40.0;
            let h = hyperbolic_var(&req(u0, 1.0, p, VarModel::HyperbolicVar)).unwrap();
            assert!(h > last);
            last = h;
        }
    }

    #[test]
    fn tail_probabilities() {
        // headline numbers
        let g = tail_probability(25.0, TailFamily::Gaussian, None).unwrap();
        let lg = tail_probability_log10(25.0);
        assert!((lg - (-138.0 + 6.0f64.log10())).abs() < 0.3, "log10 = {lg}");
        assert!(g < 1e-130);
        let s = tail_probability(25.0, TailFamily::StudentNu, Some(4.0)).unwrap();
        assert!(s > 2e-6 && s < 8e-6, "P = {s}");
        // k = 0 -> one half
        assert_relative_eq!(tail_probability(0.0, TailFamily::Gaussian, None).unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(
            tail_probability(0.0, TailFamily::StudentNu, Some(3.0)).unwrap(),
            0.5,
            max_relative = 1e-10
        );
        assert!(tail_probability(1.0, TailFamily::StudentNu, None).is_err());
    }

    #[test]
    fn gaussian_tail_monotone_no_underflow() {
        let mut last = 0.0f64;
        for i in 1..=40 {
            let l = normal_tail_log(i as f64);
            assert!(l.is_finite());
            assert!(l < last);
            last = l;
        }
    }

    #[test]
    fn explosion_report_rows() {
        // nu = 0, sigma2 = 1: alpha = 2, threshold time alpha t = 6.4746
        let p = sym(0.0, 1.0, 1.0);
        let t_star = 6.4746 / 2.0;
        let rows = explosion_report(&p, &[0.0, 1e-9, t_star]).unwrap();
        assert_eq!(rows[0].explosion_factor, 1.0);
        assert_eq!(rows[0].k_equivalent_25, 25.0);
        assert_abs_diff_eq!(rows[1].explosion_factor, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rows[2].explosion_factor, 100.0, epsilon = 0.1);
        assert_abs_diff_eq!(rows[2].k_equivalent_25, 2.5, epsilon = 0.002);
        // nu = 4 long horizon: V_E -> 0
        let p4 = sym(4.0, 1.0, 1.0);
        let rows = explosion_report(&p4, &[500.0]).unwrap();
        assert!(rows[0].explosion_factor < 1e-2);
        // asymmetric params rejected
        let bad = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(explosion_report(&bad, &[1.0]).is_err());
    }

    #[test]
    fn experimental_mixture_var() {
        let p = sym(-2.0, 1.0, 1.0);
        let r = req(0.5, 1.0, p, VarModel::HyperbolicVar);
        // median of the symmetric mixture is 0
        assert_abs_diff_eq!(experimental_bimodal_var(&r).unwrap(), 0.0, epsilon = 1e-9);
        // quantile consistency with the mixture CDF
        let r = req(0.1, 2.0, p, VarModel::HyperbolicVar);
        let v = experimental_bimodal_var(&r).unwrap();
        let c = crate::densities::density_cdf(
            crate::densities::Family::BimodalNuMinus2,
            v,
            2.0,
            &p,
        )
        .unwrap();
        assert_abs_diff_eq!(c, 0.1, epsilon = 1e-8);
        // only the nu = -2 market
        assert!(experimental_bimodal_var(&req(0.1, 1.0, sym(2.0, 1.0, 1.0), VarModel::HyperbolicVar)).is_err());
    }
}
