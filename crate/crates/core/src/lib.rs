//! Pricing, implied volatility and short-maturity asymptotics for Inverse and
//! Quanto-Inverse European calls under stochastic volatility.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the companion `invvol` crate.
//!
//! Module map:
//!
//! - [`inverse_bs`]: closed-form Black-Scholes price of an inverse call and
//!   the at-the-money partial derivatives.
//! - [`iv_solver`]: ATM implied volatility on the monotone branch.
//! - [`vol_models`]: constant, SABR (beta = 1) and fractional Bergomi
//!   volatility paths together with their Malliavin kernels.
//! - [`mc`]: antithetic Monte Carlo engine, prices, and the ATM level and skew
//!   estimators.
//! - [`asymptotics`]: short-maturity level and skew limits.
//! - [`market`]: delta-bucketed quotes, the risk-reversal skew proxy and the
//!   power-law term-structure fit.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod inverse_bs;
pub mod iv_solver;
pub mod market;
pub mod mc;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod vol_models;

pub use error::{Error, Result};
