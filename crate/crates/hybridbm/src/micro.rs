//! Discrete trade-arrival model: fundamental and technical traders with
//! compound-Poisson order flow, the discrete return evolution, and the
//! mapping onto the continuum SDE parameters.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Order-size (lots per order) distribution, parameterized to hit the
/// first two moments `(nbar, E[N^2])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderSizeDist {
    /// Every order is exactly `n` lots.
    Deterministic(u64),
    /// Geometric on {1, 2, ...} with the given mean.
    Geometric { mean: f64 },
    /// `1 + Poisson(mean - 1)`.
    ShiftedPoisson { mean: f64 },
}

impl OrderSizeDist {
    pub fn mean(&self) -> f64 {
        match *self {
            OrderSizeDist::Deterministic(n) => n as f64,
            OrderSizeDist::Geometric { mean } => mean,
            OrderSizeDist::ShiftedPoisson { mean } => mean,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            OrderSizeDist::Deterministic(n) => (n * n) as f64,
            // p = 1/mean on {1,2,...}: E[N^2] = (2-p)/p^2
            OrderSizeDist::Geometric { mean } => 2.0 * mean * mean - mean,
            // Var = mean - 1
            OrderSizeDist::ShiftedPoisson { mean } => (mean - 1.0) + mean * mean,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            OrderSizeDist::Deterministic(n) => n,
            OrderSizeDist::Geometric { mean } => {
                let p = 1.0 / mean;
                let u: f64 = rng.gen_range(1e-300..1.0);
                (u.ln() / (1.0 - p).ln()).ceil().max(1.0) as u64
            }
            OrderSizeDist::ShiftedPoisson { mean } => {
                if mean <= 1.0 {
                    1
                } else {
                    1 + Poisson::new(mean - 1.0).unwrap().sample(rng) as u64
                }
            }
        }
    }
}

/// Parameters of the discrete trade-arrival model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrostructureParams {
    /// Fundamental buy arrival rate (trades per unit time).
    pub lambda_buy: f64,
    /// Fundamental sell arrival rate.
    pub lambda_sell: f64,
    /// Technical linearization slope `mu` (net rate `-mu x`).
    pub mu_slope: f64,
    /// Lot size `L` in shares.
    pub lot_size: u64,
    /// Mean lots per order `E[N]`.
    pub nbar: f64,
    /// Second moment `E[N^2]`.
    pub n2: f64,
    /// Return impact per share.
    pub omega: f64,
    pub order_size_dist: OrderSizeDist,
}

impl MicrostructureParams {
    pub fn new(
        lambda_buy: f64,
        lambda_sell: f64,
        mu_slope: f64,
        lot_size: u64,
        omega: f64,
        order_size_dist: OrderSizeDist,
    ) -> Result<Self> {
        if lambda_buy < 0.0 || lambda_sell < 0.0 {
            return Err(Error::InvalidParameter("negative arrival rate".into()));
        }
        if lot_size == 0 {
            return Err(Error::InvalidParameter("lot_size must be positive".into()));
        }
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter("omega must be positive".into()));
        }
        let nbar = order_size_dist.mean();
        let n2 = order_size_dist.second_moment();
        if !(nbar > 0.0) || n2 < nbar * nbar {
            return Err(Error::InvalidParameter(format!(
                "order size moments invalid: nbar={nbar}, n2={n2}"
            )));
        }
        Ok(Self { lambda_buy, lambda_sell, mu_slope, lot_size, nbar, n2, omega, order_size_dist })
    }

    /// Return impact of one lot, `alpha = L omega`.
    pub fn alpha(&self) -> f64 {
        self.lot_size as f64 * self.omega
    }
}

/// One sampled increment's net order flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeFlowSample {
    /// Net fundamental shares `M_F`.
    pub m_fundamental: i64,
    /// Net technical shares `M_T`.
    pub m_technical: i64,
    pub dt: f64,
    pub x_before: f64,
}

/// Mean and variance of the net fundamental flow `M_F` over `dt`:
/// `E = L (lb - ls) dt nbar`, `Var = L^2 (lb + ls) dt E[N^2]`.
pub fn flow_moments_fundamental(params: &MicrostructureParams, dt: f64) -> (f64, f64) {
    let l = params.lot_size as f64;
    let mean = l * (params.lambda_buy - params.lambda_sell) * dt * params.nbar;
    let var = l * l * (params.lambda_buy + params.lambda_sell) * dt * params.n2;
    (mean, var)
}

/// Mean and variance of the net technical flow `M_T` at return level `x`:
/// `E = -L mu x dt nbar`, `Var = L^2 |mu x| dt E[N^2]` (magnitude of the
/// net rate drives the fluctuation size).
pub fn flow_moments_technical(params: &MicrostructureParams, x: f64, dt: f64) -> (f64, f64) {
    let l = params.lot_size as f64;
    let mean = -l * params.mu_slope * x * dt * params.nbar;
    let var = l * l * (params.mu_slope * x).abs() * dt * params.n2;
    (mean, var)
}

fn poisson_count<R: Rng + ?Sized>(rate_dt: f64, rng: &mut R) -> u64 {
    if rate_dt <= 0.0 {
        return 0;
    }
    Poisson::new(rate_dt).unwrap().sample(rng) as u64
}

fn compound_sum<R: Rng + ?Sized>(count: u64, dist: &OrderSizeDist, rng: &mut R) -> i64 {
    let mut total = 0i64;
    for _ in 0..count {
        total += dist.sample(rng) as i64;
    }
    total
}

fn sample_increment_with<R: Rng + ?Sized>(
    params: &MicrostructureParams,
    x: f64,
    dt: f64,
    rng: &mut R,
) -> (f64, TradeFlowSample) {
    let dist = &params.order_size_dist;
    let buys = poisson_count(params.lambda_buy * dt, rng);
    let sells = poisson_count(params.lambda_sell * dt, rng);
    let l = params.lot_size as i64;
    let m_fund = l * (compound_sum(buys, dist, rng) - compound_sum(sells, dist, rng));
    // single perfectly-correlated technical stream: rate |mu x|, direction
    // -sign(mu x)
    let net_rate = params.mu_slope * x;
    let tech = poisson_count(net_rate.abs() * dt, rng);
    let m_tech = -net_rate.signum() as i64 * l * compound_sum(tech, dist, rng);
    let dx = params.omega * (m_fund + m_tech) as f64;
    (dx, TradeFlowSample { m_fundamental: m_fund, m_technical: m_tech, dt, x_before: x })
}

/// Draw one return increment `dx = omega (M_F + M_T)` at level `x`.
/// Deterministic given the seed.
pub fn sample_increment(
    params: &MicrostructureParams,
    x: f64,
    dt: f64,
    seed: u64,
) -> Result<(f64, TradeFlowSample)> {
    if !(dt > 0.0) {
        return Err(Error::Precondition("dt must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_increment_with(params, x, dt, &mut rng))
}

/// Iterate the discrete evolution from `x = 0`, returning the `(t, x)` path.
pub fn simulate_discrete_path(
    params: &MicrostructureParams,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if !(dt > 0.0 && dt < horizon) {
        return Err(Error::Precondition("need 0 < dt < horizon".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (horizon / dt).round() as usize;
    let mut path = Vec::with_capacity(steps + 1);
    let mut x = 0.0f64;
    path.push((0.0, x));
    for i in 1..=steps {
        let (dx, _) = sample_increment_with(params, x, dt, &mut rng);
        x += dx;
        path.push((i as f64 * dt, x));
    }
    Ok(path)
}

/// Map the discrete model onto the SDE parameters:
/// `mu1 = alpha nbar (lb - ls)`, `mu2 = alpha mu nbar`,
/// `sigma1 = alpha sqrt((lb + ls) E[N^2])`, `sigma2 = alpha sqrt(mu E[N^2])`.
pub fn map_to_sde(params: &MicrostructureParams) -> Result<ModelParams> {
    if params.mu_slope < 0.0 {
        return Err(Error::Precondition(
            "sigma2 imaginary under the mapping for mu < 0; specify sigma2 directly for momentum-dominated runs"
                .into(),
        ));
    }
    let alpha = params.alpha();
    let mu1 = alpha * params.nbar * (params.lambda_buy - params.lambda_sell);
    let mu2 = alpha * params.mu_slope * params.nbar;
    let sigma1 = alpha * ((params.lambda_buy + params.lambda_sell) * params.n2).sqrt();
    let sigma2 = alpha * (params.mu_slope * params.n2).sqrt();
    ModelParams::new(mu1, mu2, sigma1, sigma2, 0.0)
}
