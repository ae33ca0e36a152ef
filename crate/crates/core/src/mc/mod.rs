//! Monte Carlo valuation of inverse calls and the ATM implied-volatility
//! level and skew estimators.
//!
//! Price, digital term and implied volatility share one simulation pass so
//! the skew estimator sees common random numbers.

mod engine;
mod moments;

use alloc::vec::Vec;

pub use engine::{Executor, McEngine, Sequential, TerminalSample, Workspace, CHUNK_SIZE};
pub use moments::Moments;

use crate::error::{Error, Result};
use crate::inverse_bs::{atm_dk, atm_vega, payoff};
use crate::iv_solver::implied_vol_atm;
use crate::vol_models::ModelParams;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_PATHS: usize = 200_000;
pub const DEFAULT_STEPS: usize = 50;

/// Vega below which the skew estimator refuses to divide.
pub const MIN_VEGA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum OptionKind {
    /// Payoff `((S_T - K)/S_T)+` in units of the underlying.
    Inverse,
    /// Inverse payoff converted at the fixed rate `rate`.
    QuantoInverse { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptionSpec {
    pub spot: f64,
    pub strike: f64,
    /// Years.
    pub maturity: f64,
    pub kind: OptionKind,
}

impl OptionSpec {
    pub fn inverse(spot: f64, strike: f64, maturity: f64) -> Self {
        Self {
            spot,
            strike,
            maturity,
            kind: OptionKind::Inverse,
        }
    }

    pub fn atm(spot: f64, maturity: f64) -> Self {
        Self::inverse(spot, spot, maturity)
    }

    pub fn with_kind(self, kind: OptionKind) -> Self {
        Self { kind, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.spot) || !pos(self.strike) || !pos(self.maturity) {
            return Err(Error::input("spot, strike and maturity must be positive"));
        }
        if let OptionKind::QuantoInverse { rate } = self.kind {
            if !pos(rate) {
                return Err(Error::input("quanto rate must be positive"));
            }
        }
        Ok(())
    }

    pub fn log_spot(&self) -> f64 {
        libm::log(self.spot)
    }

    pub fn log_strike(&self) -> f64 {
        libm::log(self.strike)
    }

    /// Conversion factor applied to the inverse payoff.
    pub fn payoff_scale(&self) -> f64 {
        match self.kind {
            OptionKind::Inverse => 1.0,
            OptionKind::QuantoInverse { rate } => rate,
        }
    }

    pub fn is_atm(&self) -> bool {
        (self.strike - self.spot).abs() <= 1e-12 * self.spot
    }

    fn require_atm(&self) -> Result<()> {
        if self.is_atm() {
            Ok(())
        } else {
            Err(Error::NotAtTheMoney {
                spot: self.spot,
                strike: self.strike,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Simulated trajectories, antithetic mirrors included.
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_paths: DEFAULT_PATHS,
            n_steps: DEFAULT_STEPS,
            seed: DEFAULT_SEED,
            antithetic: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::input("need at least two paths"));
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return Err(Error::input("antithetic sampling needs an even path count"));
        }
        if self.n_steps == 0 {
            return Err(Error::input("need at least one time step"));
        }
        Ok(())
    }

    /// Independent samples (pairs under antithetic sampling).
    pub fn n_samples(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

/// Sample mean with its standard error. Under antithetic sampling `n` counts
/// pairs and the error comes from the pair averages.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl McEstimate {
    fn from_moments<const M: usize>(m: &Moments<M>, k: usize) -> Self {
        Self {
            mean: m.mean()[k],
            stderr: m.stderr(k),
            n: m.count(),
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            mean: factor * self.mean,
            stderr: factor * self.stderr,
            n: self.n,
        }
    }
}

/// All terminal log-prices, in sample order.
pub fn simulate_terminal_logprice(
    model: &ModelParams,
    spec: &OptionSpec,
    cfg: &SimConfig,
) -> Result<Vec<TerminalSample>> {
    let engine = McEngine::new(model, spec, cfg)?;
    let mut ws = engine.workspace();
    Ok((0..engine.n_samples())
        .map(|i| engine.terminal(i, &mut ws))
        .collect())
}

/// Price in units of the underlying (times the quanto rate, if any).
pub fn price_option<E: Executor>(
    model: &ModelParams,
    spec: &OptionSpec,
    cfg: &SimConfig,
    exec: &E,
) -> Result<McEstimate> {
    let engine = McEngine::new(model, spec, cfg)?;
    let k = spec.log_strike();
    let m = exec.run(&engine, &|x| [payoff(x, k)]);
    Ok(McEstimate::from_moments(&m, 0).scaled(spec.payoff_scale()))
}

#[inline]
fn digital(x: f64, k: f64) -> f64 {
    if x >= k {
        libm::exp(k - x)
    } else {
        0.0
    }
}

/// `E(e^{k*-X_T} 1{X_T >= k*})` with `k* = ln S0`; the strike field is not
/// used.
pub fn digital_term<E: Executor>(
    model: &ModelParams,
    spec: &OptionSpec,
    cfg: &SimConfig,
    exec: &E,
) -> Result<McEstimate> {
    let engine = McEngine::new(model, spec, cfg)?;
    let k = engine.log_spot();
    let m = exec.run(&engine, &|x| [digital(x, k)]);
    Ok(McEstimate::from_moments(&m, 0))
}

/// ATM implied volatility from a Monte Carlo price.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtmIvEstimate {
    pub sigma: f64,
    /// Delta-method error, `price stderr / vega`.
    pub stderr: f64,
    /// Inverse (unscaled) price the volatility was implied from.
    pub price: McEstimate,
}

/// ATM implied volatility. Quanto specs are inverted on the unscaled inverse
/// price since the rate cancels.
pub fn atm_iv_mc<E: Executor>(
    model: &ModelParams,
    spec: &OptionSpec,
    cfg: &SimConfig,
    exec: &E,
) -> Result<AtmIvEstimate> {
    spec.require_atm()?;
    let engine = McEngine::new(model, spec, cfg)?;
    let k = engine.log_spot();
    let m = exec.run(&engine, &|x| [payoff(x, k)]);
    let price = McEstimate::from_moments(&m, 0);
    let sigma = implied_vol_atm(price.mean, spec.maturity)?;
    let vega = atm_vega(spec.maturity, sigma)?;
    Ok(AtmIvEstimate {
        sigma,
        stderr: price.stderr / vega,
        price,
    })
}

/// Skew from the ATM implied volatility and the digital expectation:
///
/// `(-dBS/dk(I) - E(e^{k*-X_T} 1{X_T >= k*})) / dBS/dsigma(I)`.
pub fn skew_estimator(maturity: f64, implied_vol: f64, digital: f64) -> Result<f64> {
    let vega = atm_vega(maturity, implied_vol)?;
    if vega.abs() < MIN_VEGA {
        return Err(Error::DegenerateVega(vega));
    }
    let dk = atm_dk(maturity, 0.0, implied_vol)?;
    Ok((-dk - digital) / vega)
}

/// Skew estimator fed with an ATM price instead of an implied volatility.
pub fn skew_from_prices(maturity: f64, price: f64, digital: f64) -> Result<f64> {
    skew_estimator(maturity, implied_vol_atm(price, maturity)?, digital)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtmSkewEstimate {
    pub skew: f64,
    /// Delta-method error using the joint covariance of price and digital.
    pub stderr: f64,
    pub iv: AtmIvEstimate,
    pub digital: McEstimate,
}

/// ATM skew `dI/dk` without finite differences in strike.
pub fn atm_skew_mc<E: Executor>(
    model: &ModelParams,
    spec: &OptionSpec,
    cfg: &SimConfig,
    exec: &E,
) -> Result<AtmSkewEstimate> {
    spec.require_atm()?;
    let engine = McEngine::new(model, spec, cfg)?;
    let k = engine.log_spot();
    let m = exec.run(&engine, &|x| [payoff(x, k), digital(x, k)]);
    let [price_mean, digital_mean] = m.mean();
    let t = spec.maturity;

    let sigma = implied_vol_atm(price_mean, t)?;
    let vega = atm_vega(t, sigma)?;
    let skew = skew_estimator(t, sigma, digital_mean)?;

    // d skew / d price by central difference through the inversion
    let h = 1e-6 * price_mean;
    let d_price = (skew_from_prices(t, price_mean + h, digital_mean)?
        - skew_from_prices(t, price_mean - h, digital_mean)?)
        / (2.0 * h);
    let d_digital = -1.0 / vega;
    let stderr = m.linear_stderr(&[d_price, d_digital]);

    let price = McEstimate::from_moments(&m, 0);
    Ok(AtmSkewEstimate {
        skew,
        stderr,
        iv: AtmIvEstimate {
            sigma,
            stderr: price.stderr / vega,
            price,
        },
        digital: McEstimate::from_moments(&m, 1),
    })
}
