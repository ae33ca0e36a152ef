//! Delta-bucketed implied volatility quotes and the power-law fit of the ATM
//! skew term structure.
//!
//! The skew proxy `(IV_put25 - IV_call25) / IV_call50` is a normalised risk
//! reversal. It is used as a stand-in for `dI/dk`, not a literal derivative.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuoteRow {
    pub maturity_years: f64,
    pub iv_put_d25: f64,
    pub iv_call_d25: f64,
    pub iv_call_d50: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkewPoint {
    pub maturity_years: f64,
    pub skew: f64,
}

/// `skew(T) = c T^alpha` with implied Hurst exponent `alpha + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLawFit {
    pub c: f64,
    pub alpha: f64,
    pub h_implied: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub fn eval(&self, maturity: f64) -> f64 {
        self.c * libm::pow(maturity, self.alpha)
    }
}

/// Checks every row and returns them sorted by maturity.
pub fn validate_quotes(mut rows: Vec<QuoteRow>) -> Result<Vec<QuoteRow>> {
    for (i, r) in rows.iter().enumerate() {
        let fields = [r.maturity_years, r.iv_put_d25, r.iv_call_d25, r.iv_call_d50];
        if fields.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Validation(format!(
                "row {}: maturity and volatilities must be positive",
                i + 1
            )));
        }
    }
    rows.sort_by(|a, b| a.maturity_years.total_cmp(&b.maturity_years));
    if let Some(w) = rows
        .windows(2)
        .find(|w| w[0].maturity_years == w[1].maturity_years)
    {
        return Err(Error::Validation(format!(
            "duplicate maturity {}",
            w[0].maturity_years
        )));
    }
    Ok(rows)
}

pub fn delta_skew(row: &QuoteRow) -> Result<SkewPoint> {
    if row.iv_call_d50 == 0.0 {
        return Err(Error::DivisionByZero(
            "delta skew (50-delta call volatility)",
        ));
    }
    Ok(SkewPoint {
        maturity_years: row.maturity_years,
        skew: (row.iv_put_d25 - row.iv_call_d25) / row.iv_call_d50,
    })
}

/// Ordinary least squares of `ln|skew|` on `ln T`.
pub fn fit_power_law(points: &[SkewPoint]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    if points
        .iter()
        .any(|p| !(p.maturity_years.is_finite() && p.maturity_years > 0.0))
    {
        return Err(Error::Validation("maturities must be positive".into()));
    }
    let positive = points[0].skew > 0.0;
    if points
        .iter()
        .any(|p| !p.skew.is_finite() || p.skew == 0.0 || (p.skew > 0.0) != positive)
    {
        return Err(Error::Sign);
    }

    // canonical order so the result does not depend on input order
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (libm::log(p.maturity_years), libm::log(p.skew.abs())))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("all maturities are equal".into()));
    }
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;

    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - intercept - alpha * p.0;
            e * e
        })
        .sum();
    let tiny = f64::EPSILON * (1.0 + my.abs());
    let flat = ss_tot <= n * tiny * tiny;
    let r_squared = if !flat {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        // constant data: a flat line is an exact fit
        1.0
    };

    let sign = if positive { 1.0 } else { -1.0 };
    Ok(PowerLawFit {
        c: sign * libm::exp(intercept),
        alpha,
        h_implied: alpha + 0.5,
        r_squared,
    })
}
