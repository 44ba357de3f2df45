//! Moment dynamics: the sequential linear ODE family for e_n = E[X_t^n],
//! the closed-form mean and variance, the variance-explosion factor and
//! the k-sigma equivalence diagnostic.

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Moments e_0..e_n at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub order: usize,
    /// e_0..e_order; e_0 is always 1.
    pub values: Vec<f64>,
    pub t: f64,
    pub params: ModelParams,
}

pub const MAX_MOMENT_ORDER: usize = 12;

/// `(1 - e^{-a}) / a`, continuous through a = 0.
fn phi(a: f64) -> f64 {
    if a.abs() < 1e-8 {
        1.0 - 0.5 * a + a * a / 6.0
    } else {
        -(-a).exp_m1() / a
    }
}

/// Closed-form first moment: `e1 = x0 e^{-mu2 t} + (mu1/mu2)(1 - e^{-mu2 t})`,
/// with the mu2 = 0 limit `x0 + mu1 t`.
pub fn e1_closed_form(params: &ModelParams, t: f64, x0: f64) -> f64 {
    x0 * (-params.mu2 * t).exp() + params.mu1 * t * phi(params.mu2 * t)
}

/// Decay coefficient of the e_n equation: `c_n = mu2 n - (1/2) n(n-1) sigma2^2`.
fn decay_coeff(params: &ModelParams, n: usize) -> f64 {
    let n = n as f64;
    params.mu2 * n - 0.5 * n * (n - 1.0) * params.sigma2 * params.sigma2
}

/// Forcing of the e_n equation from the two lower moments:
/// `F_n = (1/2) n(n-1) sigma1^2 e_{n-2} + (mu1 n + n(n-1) rho sigma1 sigma2) e_{n-1}`.
fn forcing(params: &ModelParams, n: usize, e_nm2: f64, e_nm1: f64) -> f64 {
    let nf = n as f64;
    0.5 * nf * (nf - 1.0) * params.sigma1 * params.sigma1 * e_nm2
        + (params.mu1 * nf + nf * (nf - 1.0) * params.rho * params.sigma1 * params.sigma2) * e_nm1
}

/// Solve the sequential moment ODEs on `t_grid` (which must start at 0 and
/// be sorted). Each e_n is advanced by exact variation of constants with
/// Simpson quadrature of the forcing on a fine internal grid; midpoint
/// forcing values come from Hermite interpolation of the lower moments
/// (their derivatives are known from the ODEs themselves).
pub fn moment_odes_solve(
    params: &ModelParams,
    order: usize,
    t_grid: &[f64],
    x0: f64,
) -> Result<Vec<MomentVector>> {
    if order == 0 || order > MAX_MOMENT_ORDER {
        return Err(Error::Precondition(format!(
            "order must be in 1..={MAX_MOMENT_ORDER}"
        )));
    }
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(Error::Precondition("t_grid must start at 0".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("t_grid must be sorted".into()));
    }

    // fine grid: subdivide each requested interval so requested times land
    // exactly on nodes
    let t_max = *t_grid.last().unwrap();
    let target = (t_max / 4000.0).max(1e-12);
    let mut nodes = vec![0.0f64];
    let mut out_idx = vec![0usize];
    for w in t_grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a {
            out_idx.push(*out_idx.last().unwrap());
            continue;
        }
        let m = ((b - a) / target).ceil().max(1.0) as usize;
        for k in 1..=m {
            nodes.push(a + (b - a) * k as f64 / m as f64);
        }
        *nodes.last_mut().unwrap() = b;
        out_idx.push(nodes.len() - 1);
    }

    let nn = nodes.len();
    // table[n][j] = e_n(nodes[j])
    let mut table = vec![vec![0.0f64; nn]; order + 1];
    table[0] = vec![1.0; nn];
    if order >= 1 {
        for j in 0..nn {
            table[1][j] = e1_closed_form(params, nodes[j], x0);
        }
    }

    for n in 2..=order {
        let c = decay_coeff(params, n);
        table[n][0] = x0.powi(n as i32);
        for j in 0..nn - 1 {
            let (ta, tb) = (nodes[j], nodes[j + 1]);
            let h = tb - ta;
            let fa = forcing(params, n, table[n - 2][j], table[n - 1][j]);
            let fb = forcing(params, n, table[n - 2][j + 1], table[n - 1][j + 1]);
            // Hermite midpoint of each lower moment from value + ODE slope
            let mid = |m: usize| -> f64 {
                if m == 0 {
                    return 1.0;
                }
                let (ya, yb) = (table[m][j], table[m][j + 1]);
                let slope = |y: f64, i: usize| {
                    let lower2 = if m >= 2 { table[m - 2][i] } else { 0.0 };
                    let lower1 = if m == 1 { 1.0 } else { table[m - 1][i] };
                    forcing(params, m, lower2, lower1) - decay_coeff(params, m) * y
                };
                let (da, db) = (slope(ya, j), slope(yb, j + 1));
                0.5 * (ya + yb) + 0.125 * h * (da - db)
            };
            let fmid = if n == 2 {
                // forcing of e_2 uses e_0, e_1: both closed form
                forcing(params, n, 1.0, e1_closed_form(params, ta + 0.5 * h, x0))
            } else {
                forcing(params, n, mid(n - 2), mid(n - 1))
            };
            // Simpson on g(s) = e^{-c (tb - s)} F(s)
            let g0 = (-c * h).exp() * fa;
            let gm = (-c * 0.5 * h).exp() * fmid;
            table[n][j + 1] = (-c * h).exp() * table[n][j] + h / 6.0 * (g0 + 4.0 * gm + fb);
        }
    }

    Ok(out_idx
        .iter()
        .zip(t_grid)
        .map(|(&j, &t)| MomentVector {
            order,
            values: (0..=order).map(|n| table[n][j]).collect(),
            t,
            params: *params,
        })
        .collect())
}

/// Closed-form variance for rho = 0, mu1 = 0:
/// `V = sigma1^2 / (sigma2^2 (nu - 2)) [1 - e^{-sigma2^2 (nu - 2) t}]`,
/// with the nu = 2 limit `sigma1^2 t`.
pub fn variance_closed_form(params: &ModelParams, t: f64) -> Result<f64> {
    if params.rho != 0.0 || params.mu1 != 0.0 {
        return Err(Error::Precondition(
            "closed form valid only for rho=0=mu1".into(),
        ));
    }
    if params.sigma2 <= 0.0 {
        return Err(Error::Precondition("closed form requires sigma2 > 0".into()));
    }
    // sigma2^2 (nu - 2) = 2 mu2 - sigma2^2
    let a = (2.0 * params.mu2 - params.sigma2 * params.sigma2) * t;
    Ok(params.sigma1 * params.sigma1 * t * phi(a))
}

/// `V_E(t) = V(t) / (sigma1^2 t)`, the variance explosion factor. Returns 1
/// at t = 0. The general (rho or mu1 nonzero) case is routed through the
/// moment ODEs from x0 = 0.
pub fn variance_explosion_factor(params: &ModelParams, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    if params.rho == 0.0 && params.mu1 == 0.0 && params.sigma2 > 0.0 {
        let a = (2.0 * params.mu2 - params.sigma2 * params.sigma2) * t;
        return Ok(phi(a));
    }
    let mv = moment_odes_solve(params, 2, &[0.0, t], 0.0)?;
    let e1 = mv[1].values[1];
    let e2 = mv[1].values[2];
    Ok((e2 - e1 * e1) / (params.sigma1 * params.sigma1 * t))
}

/// A k-sigma event against the naive variance `sigma1^2 t` is a
/// `k / sqrt(V_E)`-sigma event against the true variance.
pub fn sigma_event_equivalent(k: f64, params: &ModelParams, t: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let ve = variance_explosion_factor(params, t)?;
    if !(ve > 0.0) {
        return Err(Error::Precondition("V_E must be positive".into()));
    }
    Ok(k / ve.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn symmetric(nu: f64) -> ModelParams {
        ModelParams::symmetric_with_nu(nu, 1.0, 1.0).unwrap()
    }

    #[test]
    fn e1_examples() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 0.5, 0.0).unwrap();
        let mv = moment_odes_solve(&p, 2, &[0.0, 1.0], 0.0).unwrap();
        assert_relative_eq!(mv[1].values[1], 1.0 - (-1.0f64).exp(), max_relative = 1e-12);
        // settles to mu1/mu2
        assert_relative_eq!(e1_closed_form(&p, 200.0, 3.0), 1.0, max_relative = 1e-12);
        // mu2 = 0 limit: x0 + mu1 t
        let p0 = ModelParams::new(2.0, 0.0, 1.0, 0.5, 0.0).unwrap();
        assert_relative_eq!(e1_closed_form(&p0, 3.0, 1.0), 7.0, max_relative = 1e-12);
    }

    #[test]
    fn arithmetic_bm_second_moment() {
        // sigma2=0, mu2=0, x0=0: e2 = sigma1^2 t + mu1^2 t^2
        let p = ModelParams::new(0.5, 0.0, 2.0, 0.0, 0.0).unwrap();
        let grid = [0.0, 0.5, 1.0, 2.0];
        let mv = moment_odes_solve(&p, 2, &grid, 0.0).unwrap();
        for v in &mv {
            let expect = 4.0 * v.t + 0.25 * v.t * v.t;
            assert_abs_diff_eq!(v.values[2], expect, epsilon = 1e-9 * (1.0 + expect));
        }
    }

    #[test]
    fn variance_closed_form_examples() {
        // nu=2 limit
        let p = symmetric(2.0);
        assert_relative_eq!(variance_closed_form(&p, 3.0).unwrap(), 3.0, max_relative = 1e-10);
        // nu=4: (1/2)(1 - e^{-2})
        let p = symmetric(4.0);
        assert_relative_eq!(
            variance_closed_form(&p, 1.0).unwrap(),
            0.5 * (1.0 - (-2.0f64).exp()),
            max_relative = 1e-12
        );
        // nu=0: (e^2 - 1)/2
        let p = symmetric(0.0);
        assert_relative_eq!(
            variance_closed_form(&p, 1.0).unwrap(),
            (2.0f64.exp() - 1.0) / 2.0,
            max_relative = 1e-12
        );
        // precondition violations
        let bad = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(variance_closed_form(&bad, 1.0).is_err());
        let bad = ModelParams::new(0.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(variance_closed_form(&bad, 1.0).is_err());
    }

    #[test]
    fn ode_matches_closed_variance() {
        for nu in [-2.0, 0.0, 1.0, 2.0, 3.0, 4.0] {
            let p = symmetric(nu);
            let grid = [0.0, 0.1, 1.0, 5.0];
            let mv = moment_odes_solve(&p, 2, &grid, 0.0).unwrap();
            for v in mv.iter().skip(1) {
                let closed = variance_closed_form(&p, v.t).unwrap();
                assert_relative_eq!(v.values[2], closed, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn odd_moments_vanish_symmetric() {
        let p = symmetric(3.0);
        let mv = moment_odes_solve(&p, 5, &[0.0, 0.5, 2.0], 0.0).unwrap();
        for v in &mv {
            assert!(v.values[1].abs() < 1e-12);
            assert!(v.values[3].abs() < 1e-12);
            assert!(v.values[5].abs() < 1e-12);
            assert_eq!(v.values[0], 1.0);
        }
    }

    #[test]
    fn e2_nondecreasing_and_variance_nonneg() {
        let p = ModelParams::new(0.0, 0.5, 1.0, 0.8, 0.3).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let mv = moment_odes_solve(&p, 2, &grid, 0.0).unwrap();
        for w in mv.windows(2) {
            assert!(w[1].values[2] >= w[0].values[2] - 1e-12);
        }
        for v in &mv {
            assert!(v.values[2] >= v.values[1] * v.values[1] - 1e-12);
        }
    }

    #[test]
    fn explosion_factor_examples() {
        let p = symmetric(4.0);
        assert_eq!(variance_explosion_factor(&p, 0.0).unwrap(), 1.0);
        // nu > 2: tends to zero
        assert!(variance_explosion_factor(&p, 500.0).unwrap() < 1e-2);
        // alpha t = 6.4746 with alpha = sigma2^2 (2 - nu): pick nu = 0,
        // sigma2 = 1, t = 6.4746/2
        let p = symmetric(0.0);
        let t = 6.4746 / 2.0;
        let ve = variance_explosion_factor(&p, t).unwrap();
        assert_abs_diff_eq!(ve, 100.0, epsilon = 0.1);
        assert_abs_diff_eq!(sigma_event_equivalent(25.0, &p, t).unwrap(), 2.5, epsilon = 0.002);
    }

    #[test]
    fn sigma_event_scaling() {
        // V_E = 1 at t -> 0: k unchanged
        let p = symmetric(3.0);
        assert_relative_eq!(
            sigma_event_equivalent(7.0, &p, 1e-12).unwrap(),
            7.0,
            max_relative = 1e-9
        );
        // pick t with V_E = 4: phi(a) = 4 has a < 0 solution; just verify
        // square-root scaling directly through the two calls
        let p = symmetric(0.0);
        let t = 1.7;
        let ve = variance_explosion_factor(&p, t).unwrap();
        let k = 10.0;
        assert_relative_eq!(
            sigma_event_equivalent(k, &p, t).unwrap(),
            k / ve.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn general_case_routes_through_ode() {
        let p = ModelParams::new(0.3, 1.0, 1.0, 0.7, -0.2).unwrap();
        let ve = variance_explosion_factor(&p, 1.0).unwrap();
        assert!(ve.is_finite() && ve > 0.0);
        let mv = moment_odes_solve(&p, 2, &[0.0, 1.0], 0.0).unwrap();
        let var = mv[1].values[2] - mv[1].values[1] * mv[1].values[1];
        assert_relative_eq!(ve, var / 1.0, max_relative = 1e-12);
    }

    #[test]
    fn order_cap() {
        let p = symmetric(3.0);
        assert!(moment_odes_solve(&p, 13, &[0.0, 1.0], 0.0).is_err());
        assert!(moment_odes_solve(&p, 0, &[0.0, 1.0], 0.0).is_err());
        assert!(moment_odes_solve(&p, 2, &[0.5, 1.0], 0.0).is_err());
        assert!(moment_odes_solve(&p, 12, &[0.0, 0.5], 0.0).is_ok());
    }
}
