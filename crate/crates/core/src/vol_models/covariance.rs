//! Joint covariance of the Volterra process `Z_t = int_0^t (t-s)^{H-1/2} dW'_s`
//! on a grid and the increments of `W'`.

use super::linalg::SymMatrix;
use super::TimeGrid;
use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_ORDER};

/// Covariance of `(Z_{t_1}, ..., Z_{t_n}, dW'_1, ..., dW'_n)`, a `2n x 2n`
/// matrix.
pub fn bergomi_joint_covariance(grid: &TimeGrid, hurst: f64) -> Result<SymMatrix> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::input("Hurst exponent must lie in (0, 1)"));
    }
    grid.validate()?;
    let rule = GaussLegendre::new(DEFAULT_ORDER);
    let n = grid.n_steps;
    let a = hurst - 0.5;
    let dt = grid.dt();
    let mut cov = SymMatrix::zeros(2 * n);

    for i in 1..=n {
        let ti = grid.node(i);
        for j in i..=n {
            let tj = grid.node(j);
            cov.set(i - 1, j - 1, volterra_covariance(&rule, ti, tj, a));
        }
        for j in 1..=n {
            cov.set(i - 1, n + j - 1, cross_covariance(grid, i, j, a));
        }
    }
    for j in 0..n {
        cov.set(n + j, n + j, dt);
    }
    Ok(cov)
}

/// `Cov(Z_s, Z_t) = int_0^{s^t} (s-u)^a (t-u)^a du` by panelled Gauss-Legendre.
///
/// With `w = min(s,t) - u` and `delta = |t - s|` the integrand is
/// `w^a (w + delta)^a`. The first panel `[0, min(delta, m)]` absorbs `w^a`
/// through `w = L s^{1/(a+1)}`; the rest of `[0, m]` is covered by panels
/// that double in length so each stays at least its own width away from the
/// singularity at `-delta`.
pub fn volterra_covariance(rule: &GaussLegendre, s: f64, t: f64, a: f64) -> f64 {
    let m = s.min(t);
    if m <= 0.0 {
        return 0.0;
    }
    let delta = (t - s).abs();
    if delta == 0.0 {
        // w = m s^{1/(2a+1)} turns w^{2a} dw into a constant
        let e = 2.0 * a + 1.0;
        let weight: f64 = rule.unit_interval().map(|(_, w)| w).sum();
        return libm::pow(m, e) / e * weight;
    }

    let p = 1.0 / (a + 1.0);
    let first = delta.min(m);
    let mut total = libm::pow(first, a + 1.0)
        * p
        * rule
            .unit_interval()
            .map(|(x, w)| w * libm::pow(first * libm::pow(x, p) + delta, a))
            .sum::<f64>();

    let mut lo = first;
    while lo < m {
        let hi = (2.0 * lo).min(m);
        total += rule.integrate(lo, hi, |w| libm::pow(w, a) * libm::pow(w + delta, a));
        lo = hi;
    }
    total
}

// Cov(Z_{t_i}, dW'_j) for 1-based i, j.
fn cross_covariance(grid: &TimeGrid, i: usize, j: usize, a: f64) -> f64 {
    let ti = grid.node(i);
    let left = grid.node(j - 1);
    if left >= ti {
        return 0.0;
    }
    let right = grid.node(j).min(ti);
    let e = a + 1.0;
    (libm::pow(ti - left, e) - libm::pow(ti - right, e)) / e
}
