//! Hybrid arithmetic-geometric Brownian motion model of asset returns with
//! price feedback.
//!
//! The log-return follows
//!
//! ```text
//! dX = (mu1 - mu2 X) dt + sigma1 dW1 + sigma2 X dW2,   corr(W1, W2) = rho
//! ```
//!
//! mixing an additive (arithmetic) noise term and a multiplicative
//! (geometric) one. The crate provides:
//!
//! - [`model`]: parameters, derived quantities (`nu = 1 + 2 mu2/sigma2^2`),
//!   hyperbolic coordinates and the market-state classifier;
//! - [`micro`]: the discrete compound-Poisson trade-arrival model and its
//!   mapping onto the SDE parameters;
//! - [`sde`]: Monte Carlo path simulation by several schemes;
//! - [`moments`]: moment ODEs, the closed-form variance and the variance
//!   explosion factor;
//! - [`laplace`]: the Laplace-in-time transform of the density, its
//!   hypergeometric / Legendre / series representations, and numerical
//!   inversion (Gaver-Stehfest, fixed Talbot);
//! - [`densities`]: closed-form time-domain and equilibrium densities
//!   (Gaussian, nu=0, chameleon, bimodal nu=-2, Student, Pearson IV);
//! - [`risk`]: Gaussian and hyperbolic VaR, tail probabilities and
//!   variance-explosion diagnostics;
//! - [`special`]: the self-contained special-function kernel.

pub mod densities;
pub mod error;
pub mod laplace;
pub mod micro;
pub mod model;
pub mod moments;
pub mod quad;
pub mod risk;
pub mod sde;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use model::{HyperbolicCoords, MarketState, ModelParams, Regime};
