//! Short-maturity limits of the ATM implied volatility level and skew.

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_ORDER};
use crate::vol_models::{malliavin_kernel, ModelParams};

/// Limit of `T^{exponent} dI/dk` at the money as `T -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkewLimit {
    pub value: f64,
    /// `max(1/2 - H, 0)`.
    pub scaling_exponent: f64,
}

impl SkewLimit {
    /// Finite-maturity skew implied by the limit, `value * T^{-exponent}`.
    pub fn skew_at(&self, maturity: f64) -> f64 {
        self.value * libm::pow(maturity, -self.scaling_exponent)
    }
}

/// ATM level limit: the spot volatility `sigma0`.
pub fn atm_level_limit(model: &ModelParams) -> f64 {
    model.sigma0()
}

pub fn skew_limit(model: &ModelParams) -> SkewLimit {
    let flat = |value| SkewLimit {
        value,
        scaling_exponent: 0.0,
    };
    match *model {
        ModelParams::ConstVol { .. } => flat(0.0),
        ModelParams::Sabr { alpha, rho, .. } => flat(0.5 * rho * alpha),
        ModelParams::Bergomi { v, hurst, rho, .. } => {
            if hurst > 0.5 {
                flat(0.0)
            } else if hurst == 0.5 {
                flat(0.25 * rho * v)
            } else {
                SkewLimit {
                    value: 2.0 * rho * v * libm::sqrt(2.0 * hurst)
                        / (3.0 + 4.0 * hurst * (2.0 + hurst)),
                    scaling_exponent: 0.5 - hurst,
                }
            }
        }
    }
}

/// `rho / (sigma0 T^2) int_0^T int_r^T E(D_r^{W'} sigma_u) du dr` at finite `T`.
///
/// Kernels are treated as `(u - r)^a s(r, u)` with `s` smooth; the
/// substitutions `u = r + (T - r) x^{1/(a+1)}` and
/// `T - r = T y^{1/(a+2)}` absorb both endpoint powers, leaving a 64 x 64
/// Gauss-Legendre product rule on a smooth integrand.
pub fn skew_integral(model: &ModelParams, maturity: f64) -> Result<f64> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::input("maturity must be positive"));
    }
    model.validate()?;
    let rho = model.rho();
    if rho == 0.0 || matches!(model, ModelParams::ConstVol { .. }) {
        return Ok(0.0);
    }
    let a = model.hurst() - 0.5;
    // s(r, u) = kernel / (u - r)^a, evaluated away from the diagonal
    let smooth = |r: f64, u: f64| -> f64 {
        match *model {
            ModelParams::Bergomi {
                sigma0, v, hurst, ..
            } => {
                libm::exp(-v * v * libm::pow(u, 2.0 * hurst) / 8.0)
                    * 0.5
                    * sigma0
                    * v
                    * libm::sqrt(2.0 * hurst)
            }
            _ => malliavin_kernel(model, r, u).unwrap_or(0.0),
        }
    };

    let rule = GaussLegendre::new(DEFAULT_ORDER);
    let p_inner = 1.0 / (a + 1.0);
    let p_outer = 1.0 / (a + 2.0);
    let mut outer = 0.0;
    for (y, wy) in rule.unit_interval() {
        let w = maturity * libm::pow(y, p_outer);
        let r = maturity - w;
        let mut inner = 0.0;
        for (x, wx) in rule.unit_interval() {
            let u = r + w * libm::pow(x, p_inner);
            inner += wx * smooth(r, u);
        }
        outer += wy * inner;
    }
    // int_0^T (T-r)^{a+1}/(a+1) J(r) dr = T^{a+2}/((a+1)(a+2)) int_0^1 J dy
    let double = libm::pow(maturity, a + 2.0) / ((a + 1.0) * (a + 2.0)) * outer;
    Ok(rho / (model.sigma0() * maturity * maturity) * double)
}

/// First-order smile around the money:
/// `I(k) ~ I(k*) + dI/dk(k*) (k - k*)`.
pub fn approx_smile(level: f64, skew: f64, k_star: f64, k: f64) -> f64 {
    let sigma = level + skew * (k - k_star);
    if sigma <= 0.0 {
        log::warn!("linear smile is non-positive ({sigma}) at log-strike {k}");
    }
    sigma
}
