//! Adaptive Simpson quadrature used by the density mass checks, CDFs and
//! transform normalization tests.

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_step(&f, a, b, fa, fb, fm, simpson(a, b, fa, fm, fb), tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Integrate a density-like function over the whole line: finds a cutoff
/// where |f| stays below `floor`, then integrates [-cut, cut] adaptively.
pub fn integrate_density<F: Fn(f64) -> f64>(f: F, center: f64, scale: f64, tol: f64, floor: f64) -> f64 {
    let scale = scale.max(1e-12);
    // Dyadic panels outward from the center keep the peak resolved even when
    // the tail stretches many orders of magnitude past `scale`. Expansion
    // stops only when both the endpoint value and the panel's own
    // contribution are negligible: a pointwise floor alone can discard real
    // mass from very slowly decaying tails.
    let panel_tol = tol / 100.0;
    let mut total = 0.0;
    for sign in [-1.0f64, 1.0] {
        let mut a = 0.0f64;
        let mut b = scale;
        let mut quiet = 0u32;
        for _ in 0..500 {
            let v = adaptive_simpson(|y| f(center + sign * y), a, b, panel_tol);
            total += v;
            if v.abs() < tol && f(center + sign * b).abs() < floor {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            a = b;
            b *= 2.0;
            if b > 1e280 {
                break;
            }
        }
    }
    total
}

/// Trapezoid rule over tabulated (x, y) values.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
