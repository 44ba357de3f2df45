//! Monte Carlo simulation of the hybrid SDE: Euler-Maruyama in X-space,
//! Euler in hyperbolic-OU coordinates, the exact integrating-factor
//! representation and the conditionally Gaussian representation.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    HyperbolicEuler,
    IntegratingFactor,
    ConditionalGaussian,
}

/// Simulated paths on a common time grid. Paths that blow up are frozen at
/// the last finite value and flagged with their explosion time.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub times: Vec<f64>,
    /// n_paths x n_times.
    pub paths: Vec<Vec<f64>>,
    pub scheme: Scheme,
    pub seed: u64,
    pub params: ModelParams,
    /// Explosion time per path, if any.
    pub exploded: Vec<Option<f64>>,
}

impl PathEnsemble {
    /// Marginal samples at time index `idx`.
    pub fn marginal(&self, idx: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[idx]).collect()
    }

    pub fn n_exploded(&self) -> usize {
        self.exploded.iter().filter(|e| e.is_some()).count()
    }
}

/// Conditional law of X_t given the feedback noise path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalGaussianState {
    pub m: f64,
    pub v: f64,
}

pub const EXPLOSION_THRESHOLD: f64 = 1e12;

/// Recommended Euler step: `1e-3 min(1, 1/sigma2^2)`.
pub fn default_dt(params: &ModelParams) -> f64 {
    let s22 = params.sigma2 * params.sigma2;
    1e-3 * if s22 > 1.0 { 1.0 / s22 } else { 1.0 }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64 + 1);
    rng
}

fn check_times(times: &[f64], dt: f64) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::Precondition("times must start at 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("times must be strictly increasing".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Precondition("dt must be positive".into()));
    }
    let min_gap = times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if dt > min_gap * (1.0 + 1e-12) {
        return Err(Error::Precondition("dt exceeds the minimum grid spacing".into()));
    }
    Ok(())
}

/// Direct Euler-Maruyama on
/// `dX = (mu1 - mu2 X) dt + sigma1 dW1 + sigma2 X dW2`.
pub fn simulate_euler(
    params: &ModelParams,
    times: &[f64],
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<PathEnsemble> {
    check_times(times, dt)?;
    if n_paths == 0 {
        return Err(Error::Precondition("n_paths must be positive".into()));
    }
    let p = *params;
    let rho_c = (1.0 - p.rho * p.rho).sqrt();
    let results: Vec<(Vec<f64>, Option<f64>)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut x = 0.0f64;
            let mut out = Vec::with_capacity(times.len());
            out.push(0.0);
            let mut exploded = None;
            for w in times.windows(2) {
                let (a, b) = (w[0], w[1]);
                let m = ((b - a) / dt).ceil().max(1.0) as usize;
                let h = (b - a) / m as f64;
                let sh = h.sqrt();
                for k in 0..m {
                    if exploded.is_some() {
                        break;
                    }
                    let z1: f64 = StandardNormal.sample(&mut rng);
                    let zp: f64 = StandardNormal.sample(&mut rng);
                    let dw1 = sh * z1;
                    let dw2 = p.rho * dw1 + rho_c * sh * zp;
                    let next =
                        x + (p.mu1 - p.mu2 * x) * h + p.sigma1 * dw1 + p.sigma2 * x * dw2;
                    if !next.is_finite() || next.abs() > EXPLOSION_THRESHOLD {
                        exploded = Some(a + (k + 1) as f64 * h);
                    } else {
                        x = next;
                    }
                }
                out.push(x);
            }
            (out, exploded)
        })
        .collect();
    let (paths, exploded) = results.into_iter().unzip();
    Ok(PathEnsemble {
        times: times.to_vec(),
        paths,
        scheme: Scheme::Euler,
        seed,
        params: p,
        exploded,
    })
}

/// Euler on the hyperbolic-OU reduction
/// `dZ = -(nu/2) tanh(Z) dtau + dW_tau`, `tau = sigma2^2 t`, mapped back
/// through `X = (sigma1/sigma2) sinh(Z)`. Valid only for the symmetric
/// case. The tanh drift is globally Lipschitz, which makes this the
/// accuracy-recommended scheme when it applies.
pub fn simulate_hyperbolic(
    params: &ModelParams,
    times: &[f64],
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<PathEnsemble> {
    if params.mu1 != 0.0 || params.rho != 0.0 {
        return Err(Error::Precondition(
            "hyperbolic reduction valid only for symmetric case".into(),
        ));
    }
    let nu = params.nu()?;
    check_times(times, dt)?;
    if n_paths == 0 {
        return Err(Error::Precondition("n_paths must be positive".into()));
    }
    let p = *params;
    let s22 = p.sigma2 * p.sigma2;
    let results: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut z = 0.0f64;
            let mut out = Vec::with_capacity(times.len());
            out.push(0.0);
            for w in times.windows(2) {
                let (a, b) = (w[0], w[1]);
                let m = ((b - a) / dt).ceil().max(1.0) as usize;
                let h_tau = s22 * (b - a) / m as f64;
                let sh = h_tau.sqrt();
                for _ in 0..m {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    z += -0.5 * nu * z.tanh() * h_tau + sh * g;
                }
                // z here is the dimensionless u = sigma2 Z
                out.push(p.sigma1 / p.sigma2 * z.sinh());
            }
            out
        })
        .collect();
    let n = results.len();
    Ok(PathEnsemble {
        times: times.to_vec(),
        paths: results,
        scheme: Scheme::HyperbolicEuler,
        seed,
        params: p,
        exploded: vec![None; n],
    })
}

/// Sample X_t at a single horizon from the exact solution
/// `X_t = int_0^t ((mu1 - rho sigma1 sigma2) du + sigma1 dW1_u)
///        exp[sigma2 W2_u - (nu/2) sigma2^2 u]`
/// with a left-point rule. The paper's time reversal is distributional, so
/// the Brownian motions are sampled forward directly.
pub fn simulate_integrating_factor(
    params: &ModelParams,
    t: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    if n_steps < 10 {
        return Err(Error::Precondition("n_steps must be at least 10".into()));
    }
    if n_paths == 0 {
        return Err(Error::Precondition("n_paths must be positive".into()));
    }
    let p = *params;
    let h = t / n_steps as f64;
    let sh = h.sqrt();
    let rho_c = (1.0 - p.rho * p.rho).sqrt();
    // (nu/2) sigma2^2 = sigma2^2/2 + mu2, well defined even for sigma2 = 0
    let decay = 0.5 * p.sigma2 * p.sigma2 + p.mu2;
    let drift = (p.mu1 - p.rho * p.sigma1 * p.sigma2) * h;
    Ok((0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut w2 = 0.0f64;
            let mut acc = 0.0f64;
            for k in 0..n_steps {
                let u = k as f64 * h;
                let factor = (p.sigma2 * w2 - decay * u).exp();
                let z1: f64 = StandardNormal.sample(&mut rng);
                let zp: f64 = StandardNormal.sample(&mut rng);
                let dw1 = sh * z1;
                let dw2 = p.rho * dw1 + rho_c * sh * zp;
                acc += factor * (drift + p.sigma1 * dw1);
                w2 += dw2;
            }
            acc
        })
        .collect())
}

/// The conditional law (m, v) of X_t given a feedback-noise path, computed
/// by trapezoid over the discretized W2.
fn conditional_state(params: &ModelParams, t: f64, n_steps: usize, rng: &mut ChaCha8Rng) -> ConditionalGaussianState {
    let p = params;
    let h = t / n_steps as f64;
    let sh = h.sqrt();
    let decay_m = 0.5 * p.sigma2 * p.sigma2 + p.mu2; // (nu/2) sigma2^2
    let decay_v = p.sigma2 * p.sigma2 + 2.0 * p.mu2; // nu sigma2^2
    let mut w2 = 0.0f64;
    let mut gm_prev = 1.0f64;
    let mut gv_prev = 1.0f64;
    let mut m = 0.0f64;
    let mut v = 0.0f64;
    for k in 1..=n_steps {
        let g: f64 = StandardNormal.sample(rng);
        w2 += sh * g;
        let u = k as f64 * h;
        let gm = (p.sigma2 * w2 - decay_m * u).exp();
        let gv = (2.0 * p.sigma2 * w2 - decay_v * u).exp();
        m += 0.5 * h * (gm_prev + gm);
        v += 0.5 * h * (gv_prev + gv);
        gm_prev = gm;
        gv_prev = gv;
    }
    ConditionalGaussianState {
        m: p.mu1 * m,
        v: p.sigma1 * p.sigma1 * v,
    }
}

/// Draw X_t ~ Normal(m, v) with (m, v) the conditional moments given the
/// feedback path. Requires rho = 0.
pub fn simulate_conditional_gaussian(
    params: &ModelParams,
    t: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if params.rho != 0.0 {
        return Err(Error::Precondition(
            "conditional representation requires zero correlation".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    if n_steps < 10 {
        return Err(Error::Precondition("n_steps must be at least 10".into()));
    }
    if n_paths == 0 {
        return Err(Error::Precondition("n_paths must be positive".into()));
    }
    let p = *params;
    Ok((0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let state = conditional_state(&p, t, n_steps, &mut rng);
            let g: f64 = StandardNormal.sample(&mut rng);
            state.m + state.v.sqrt() * g
        })
        .collect())
}
