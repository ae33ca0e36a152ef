//! Black-Scholes valuation of the inverse (coin-settled) European call.
//!
//! Prices are expressed as a fraction of one unit of the underlying, so they
//! live in `[0, 1]`. Rates are zero throughout.

use core::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::special::{erfc, half_exp_erfc, norm_cdf, INV_SQRT_2PI};

/// Inputs to the closed-form price.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BsPoint {
    /// Time to maturity `T - t` in years.
    pub tau: f64,
    /// Log-spot.
    pub x: f64,
    /// Log-strike.
    pub k: f64,
    pub sigma: f64,
}

impl BsPoint {
    pub fn new(tau: f64, x: f64, k: f64, sigma: f64) -> Result<Self> {
        let p = Self { tau, x, k, sigma };
        p.validate()?;
        Ok(p)
    }

    /// At-the-money point (`k = x`).
    pub fn atm(tau: f64, x: f64, sigma: f64) -> Result<Self> {
        Self::new(tau, x, x, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite()
            && self.x.is_finite()
            && self.k.is_finite()
            && self.sigma.is_finite())
        {
            return Err(Error::input("Black-Scholes inputs must be finite"));
        }
        if self.tau < 0.0 {
            return Err(Error::input("time to maturity must be non-negative"));
        }
        if self.sigma <= 0.0 {
            return Err(Error::input("volatility must be positive"));
        }
        Ok(())
    }
}

/// Payoff of the inverse call per unit of underlying, `(1 - e^{k-x})+`.
#[inline]
pub fn payoff(x: f64, k: f64) -> f64 {
    if x > k {
        -libm::expm1(k - x)
    } else {
        0.0
    }
}

/// `N(d2) - e^{sigma^2 tau} e^{k-x} N(d1)`, or the payoff when `tau = 0`.
pub fn bs_price(p: &BsPoint) -> Result<f64> {
    p.validate()?;
    if p.tau == 0.0 {
        return Ok(payoff(p.x, p.k));
    }
    let y = p.sigma * libm::sqrt(p.tau);
    let d2 = (p.x - p.k) / y - 0.5 * y;
    let d1 = d2 - y;
    let price = norm_cdf(d2) - half_exp_erfc(y * y + p.k - p.x, -d1 / SQRT_2);
    Ok(price.clamp(0.0, 1.0))
}

/// ATM price as a function of total volatility `y = sigma sqrt(T)`:
/// `(erfc(y/(2 sqrt 2)) - e^{y^2} erfc(3y/(2 sqrt 2)))/2`.
pub fn atm_price(y: f64) -> f64 {
    let a = y / (2.0 * SQRT_2);
    (0.5 * erfc(a) - half_exp_erfc(y * y, 3.0 * a)).max(0.0)
}

/// Derivative of [`atm_price`] in `y`.
///
/// Positive on `[0, y*)` and negative beyond the turning point.
pub fn vega_kernel(y: f64) -> f64 {
    -2.0 * y * half_exp_erfc(y * y, 3.0 * y / (2.0 * SQRT_2))
        + libm::exp(-y * y / 8.0) * INV_SQRT_2PI
}

/// `E(e^{k*-X_T} 1{X_T >= k*})` for lognormal `X_T` with total volatility `y`.
///
/// Equals `-dBS/dk` at the money.
pub fn atm_digital(y: f64) -> f64 {
    half_exp_erfc(y * y, 3.0 * y / (2.0 * SQRT_2))
}

fn check_positive(maturity: f64, sigma: f64) -> Result<()> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::input("maturity must be positive"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::input("volatility must be positive"));
    }
    Ok(())
}

/// ATM vega `dBS/dsigma = g(sigma sqrt T) sqrt T`.
pub fn atm_vega(maturity: f64, sigma: f64) -> Result<f64> {
    check_positive(maturity, sigma)?;
    let sqrt_t = libm::sqrt(maturity);
    Ok(vega_kernel(sigma * sqrt_t) * sqrt_t)
}

/// ATM strike sensitivity `dBS/dk` at `k = x`.
///
/// Mathematically `BS - erfc(sigma sqrt T / (2 sqrt 2))/2`; evaluated through
/// the equivalent `-e^{y^2} N(d1)` to avoid the cancellation between the two
/// terms. The value does not depend on the level of `x`.
pub fn atm_dk(maturity: f64, x: f64, sigma: f64) -> Result<f64> {
    check_positive(maturity, sigma)?;
    if !x.is_finite() {
        return Err(Error::input("log-spot must be finite"));
    }
    Ok(-atm_digital(sigma * libm::sqrt(maturity)))
}
