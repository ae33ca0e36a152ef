//! ATM implied volatility for inverse calls.
//!
//! The ATM price `m(y)`, `y = sigma sqrt T`, rises from 0 to a maximum at the
//! turning point `y*` and falls afterwards, so it is only invertible on
//! `[0, y*]`. The solver works on `[0, safety_factor * y*]`.

#[cfg(target_has_atomic = "64")]
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::inverse_bs::{atm_price, vega_kernel};
use crate::roots::{brent, BrentOptions};
use crate::special::INV_SQRT_2PI;

pub const DEFAULT_SAFETY_FACTOR: f64 = 0.95;

/// Lower end of the volatility bracket.
pub const SIGMA_LO: f64 = 1e-8;

/// Invertible region of the ATM price map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneDomain {
    pub y_star: f64,
    pub safety_factor: f64,
}

impl MonotoneDomain {
    pub fn new(safety_factor: f64) -> Result<Self> {
        if !(safety_factor > 0.0 && safety_factor < 1.0) {
            return Err(Error::input("safety factor must lie in (0, 1)"));
        }
        Ok(Self {
            y_star: turning_point()?,
            safety_factor,
        })
    }

    /// Largest admissible total volatility.
    pub fn y_max(&self) -> f64 {
        self.safety_factor * self.y_star
    }

    /// Prices at or above this are refused.
    pub fn price_cap(&self) -> f64 {
        atm_price(self.y_max())
    }
}

impl Default for MonotoneDomain {
    fn default() -> Self {
        Self::new(DEFAULT_SAFETY_FACTOR).expect("turning point of the ATM price map")
    }
}

// 0 doubles as "not computed yet"; y* is strictly positive.
#[cfg(target_has_atomic = "64")]
static TURNING_POINT: AtomicU64 = AtomicU64::new(0);

/// Unique positive root `y*` of the ATM vega kernel.
///
/// Cached where 64-bit atomics exist; concurrent first callers may both run
/// the root finder but always store the same bits.
#[cfg(target_has_atomic = "64")]
pub fn turning_point() -> Result<f64> {
    let bits = TURNING_POINT.load(Ordering::Acquire);
    if bits != 0 {
        return Ok(f64::from_bits(bits));
    }
    let y = solve_turning_point()?;
    TURNING_POINT.store(y.to_bits(), Ordering::Release);
    Ok(y)
}

/// Unique positive root `y*` of the ATM vega kernel.
#[cfg(not(target_has_atomic = "64"))]
pub fn turning_point() -> Result<f64> {
    solve_turning_point()
}

fn solve_turning_point() -> Result<f64> {
    let opts = BrentOptions {
        x_tol: 1e-16,
        f_tol: 0.0,
        max_iter: 200,
    };
    Ok(brent(vega_kernel, 0.0, 4.0, opts)?.x)
}

/// ATM implied volatility with the default domain.
pub fn implied_vol_atm(price: f64, maturity: f64) -> Result<f64> {
    implied_vol_atm_in(
        &MonotoneDomain::default(),
        price,
        maturity,
        BrentOptions::default(),
    )
}

/// ATM implied volatility on an explicit domain with explicit tolerances.
pub fn implied_vol_atm_in(
    domain: &MonotoneDomain,
    price: f64,
    maturity: f64,
    opts: BrentOptions,
) -> Result<f64> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::input("maturity must be positive"));
    }
    let cap = domain.price_cap();
    if !price.is_finite() || price <= 0.0 || price >= cap {
        return Err(Error::Domain { price, cap });
    }
    let sqrt_t = libm::sqrt(maturity);
    let lo = SIGMA_LO;
    let hi = domain.y_max() / sqrt_t;
    let f = |sigma: f64| atm_price(sigma * sqrt_t) - price;
    if f(lo) >= 0.0 {
        // below the bracket m is linear in y to O(y^2)
        return Ok(price / INV_SQRT_2PI / sqrt_t);
    }
    Ok(brent(f, lo, hi, opts)?.x)
}
