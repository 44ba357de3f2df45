//! Model parameters, derived quantities, coordinate maps and the
//! market-state classifier.

use crate::error::{Error, Result};

/// Parameters of the hybrid SDE
/// `dX = (mu1 - mu2 X) dt + sigma1 dW1 + sigma2 X dW2`, `corr(W1,W2) = rho`.
///
/// `sigma2 = 0` is allowed (pure arithmetic OU/Gaussian submodel) but the
/// `nu`-dependent operations reject it with [`Error::NuUndefined`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Fundamental drift, per unit time.
    pub mu1: f64,
    /// Technical mean-reversion rate, per unit time.
    pub mu2: f64,
    /// Fundamental volatility, per sqrt-time. Must be positive.
    pub sigma1: f64,
    /// Technical volatility, per sqrt-time. Must be non-negative.
    pub sigma2: f64,
    /// Correlation of the two Brownian motions, in [-1, 1].
    pub rho: f64,
}

impl ModelParams {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        if !(sigma1 > 0.0) || !sigma1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma1 must be positive, got {sigma1}"
            )));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be non-negative, got {sigma2}"
            )));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [-1, 1], got {rho}"
            )));
        }
        if !mu1.is_finite() || !mu2.is_finite() {
            return Err(Error::InvalidParameter("non-finite drift".into()));
        }
        Ok(Self { mu1, mu2, sigma1, sigma2, rho })
    }

    /// Symmetric (`mu1 = 0`, `rho = 0`) parameter set with the given `nu`,
    /// using `mu2 = sigma2^2 (nu - 1) / 2`.
    pub fn symmetric_with_nu(nu: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::NuUndefined);
        }
        Self::new(0.0, sigma2 * sigma2 * (nu - 1.0) / 2.0, sigma1, sigma2, 0.0)
    }

    /// Degrees of freedom `nu = 1 + 2 mu2 / sigma2^2`.
    pub fn nu(&self) -> Result<f64> {
        derive_nu(self)
    }
}

/// `nu = 1 + 2 mu2 / sigma2^2`. Errors when `sigma2 = 0`.
pub fn derive_nu(params: &ModelParams) -> Result<f64> {
    if params.sigma2 == 0.0 {
        return Err(Error::NuUndefined);
    }
    Ok(1.0 + 2.0 * params.mu2 / (params.sigma2 * params.sigma2))
}

/// Variance regime, a pure function of `nu` with the boundary `nu = 2`
/// classified by exact comparison on the computed double.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `nu < 2`: the variance grows exponentially.
    VarianceExplosive,
    /// `nu = 2`: the variance stays exactly `sigma1^2 t` (chameleon family).
    GaussianVarianceBoundary,
    /// `nu > 2`: the variance tends to a constant (Student equilibrium).
    VarianceStable,
}

/// Market state as characterized by the triple (`nu`, `sigma2`,
/// `sigma2/sigma1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    pub nu: f64,
    pub regime: Regime,
    /// `nu < 0`: momentum-dominated, bimodal densities possible.
    pub momentum_dominated: bool,
    /// `sigma2` sets the time-scale (`tau = sigma2^2 t`).
    pub timescale: f64,
    /// `sigma2 / sigma1` sets the price scale of the feedback.
    pub price_scale: f64,
}

/// Classify the market per the `nu` trichotomy.
pub fn classify_market(params: &ModelParams) -> Result<MarketState> {
    let nu = derive_nu(params)?;
    let regime = if nu < 2.0 {
        Regime::VarianceExplosive
    } else if nu == 2.0 {
        Regime::GaussianVarianceBoundary
    } else {
        Regime::VarianceStable
    };
    Ok(MarketState {
        nu,
        regime,
        momentum_dominated: nu < 0.0,
        timescale: params.sigma2,
        price_scale: params.sigma2 / params.sigma1,
    })
}

/// Hyperbolic OU coordinates: `x = (sigma1/sigma2) sinh(sigma2 z)`,
/// `u = sigma2 z = asinh(sigma2 x / sigma1)`, `tau = sigma2^2 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicCoords {
    pub z: f64,
    pub u: f64,
    pub tau: f64,
}

/// Map `x` (at time `t`) to hyperbolic coordinates. Requires `sigma2 > 0`.
pub fn to_hyperbolic(x: f64, t: f64, params: &ModelParams) -> Result<HyperbolicCoords> {
    if params.sigma2 == 0.0 {
        return Err(Error::NuUndefined);
    }
    let u = stable_asinh(params.sigma2 * x / params.sigma1);
    Ok(HyperbolicCoords {
        z: u / params.sigma2,
        u,
        tau: params.sigma2 * params.sigma2 * t,
    })
}

/// Inverse map: `x = (sigma1/sigma2) sinh(sigma2 z)`.
pub fn from_hyperbolic(z: f64, params: &ModelParams) -> Result<f64> {
    if params.sigma2 == 0.0 {
        return Err(Error::NuUndefined);
    }
    Ok(params.sigma1 / params.sigma2 * (params.sigma2 * z).sinh())
}

/// asinh that stays accurate for large |argument| (log form, no overflow
/// from squaring until y^2 itself overflows).
pub fn stable_asinh(y: f64) -> f64 {
    // f64::asinh is already log-based and well behaved; route through it,
    // guarding the |y| > sqrt(MAX) regime explicitly.
    if y.abs() > 1e150 {
        y.signum() * (y.abs().ln() + std::f64::consts::LN_2)
    } else {
        y.asinh()
    }
}
