//! Complementary error function helpers.
//!
//! Every inverse-option formula is written in terms of `erfc`, so the normal
//! CDF is derived from it rather than the other way round.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1/sqrt(2*pi)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Above this argument `exp(x^2)` is close to overflowing, switch to the
/// asymptotic series for `erfcx`.
const ERFCX_ASYMPTOTIC: f64 = 26.0;

/// Exponents beyond which `exp(a) * erfc(z)` is evaluated in log space.
const LOG_GUARD: f64 = 30.0;

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`.
///
/// Negative arguments fall back to the unscaled product, which is only
/// finite for moderate `|x|`.
pub fn erfcx(x: f64) -> f64 {
    if x < ERFCX_ASYMPTOTIC {
        return libm::exp(x * x) * libm::erfc(x);
    }
    // erfc(x) ~ exp(-x^2)/(x sqrt(pi)) * sum (-1)^n (2n-1)!! / (2x^2)^n
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..8 {
        term *= -((2 * n - 1) as f64) * inv;
        sum += term;
    }
    sum / (x * libm::sqrt(PI))
}

/// Standard normal CDF, `N(d) = erfc(-d/sqrt 2)/2`.
#[inline]
pub fn norm_cdf(d: f64) -> f64 {
    0.5 * libm::erfc(-d * FRAC_1_SQRT_2)
}

/// `exp(a) * erfc(z) / 2` without intermediate overflow.
///
/// When `a` is large and `z` positive the product is formed as
/// `exp(a - z^2) * erfcx(z) / 2`.
pub fn half_exp_erfc(a: f64, z: f64) -> f64 {
    if a > LOG_GUARD && z > 0.0 {
        0.5 * libm::exp(a - z * z) * erfcx(z)
    } else {
        0.5 * libm::exp(a) * libm::erfc(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // erf by composite Simpson on exp(-t^2), independent of libm::erfc.
    fn erfc_simpson(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        1.0 - 2.0 / PI.sqrt() * s * h / 3.0
    }

    // Lentz continued fraction for erfc, valid for x > ~2.
    fn erfc_cf(x: f64) -> f64 {
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / (f * PI.sqrt())
    }

    #[test]
    fn erfc_matches_simpson_oracle() {
        for i in 0..=40 {
            let x = i as f64 * 0.05;
            let want = erfc_simpson(x);
            assert!(
                (erfc(x) - want).abs() < 1e-13,
                "x={x} got {} want {want}",
                erfc(x)
            );
        }
    }

    #[test]
    fn erfcx_matches_continued_fraction() {
        for &x in &[
            3.0f64, 5.0, 10.0, 19.0, 25.0, 25.9999, 26.0, 30.0, 100.0, 1e4,
        ] {
            let want = if x < 20.0 {
                (x * x).exp() * erfc_cf(x)
            } else {
                let u = 1.0 / (x * x);
                (1.0 - 0.5 * u + 0.75 * u.powi(2) - 1.875 * u.powi(3) + 6.5625 * u.powi(4)
                    - 29.53125 * u.powi(5))
                    / (x * PI.sqrt())
            };
            let got = erfcx(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "x={x} got {got} want {want}"
            );
        }
    }

    #[test]
    fn half_exp_erfc_is_continuous_across_guard() {
        let z = 6.0;
        let below = half_exp_erfc(LOG_GUARD, z);
        let above = half_exp_erfc(LOG_GUARD + 1e-14, z);
        assert!(((below - above) / below).abs() < 1e-12);
        // huge exponent that would overflow exp(a) on its own
        let v = half_exp_erfc(800.0, 30.0);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn norm_cdf_symmetry() {
        for &d in &[0.0, 0.3, 1.0, 2.5, 6.0] {
            assert!((norm_cdf(d) + norm_cdf(-d) - 1.0).abs() < 1e-15);
        }
        assert_eq!(norm_cdf(0.0), 0.5);
    }
}
