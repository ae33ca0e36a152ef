//! Volatility dynamics: constant, SABR with beta = 1, and fractional Bergomi.
//!
//! Each model turns a vector of i.i.d. standard normals into left-endpoint
//! volatilities `sigma_i = sigma(t_i)`, `i = 0..n-1`, and increments `dW_i`
//! of the price driver `W = rho W' + sqrt(1 - rho^2) B`.
//!
//! Gaussian layout per path (`n` steps):
//!
//! | model    | `[0, n)` | `[n, 2n)` | `[2n, 3n)` |
//! |----------|----------|-----------|------------|
//! | ConstVol | `dW`     |           |            |
//! | SABR     | `dW'`    | `dB`      |            |
//! | Bergomi  | joint `(dW', Z)` via Cholesky || `dB` |
//!
//! Every output is linear in the Gaussians up to the final exponential, so
//! negating the input negates `dW` and the log-volatility driver.

mod covariance;
mod linalg;

use alloc::vec;
use alloc::vec::Vec;

pub use covariance::{bergomi_joint_covariance, volterra_covariance};
pub use linalg::{cholesky_psd, cholesky_with_jitter, LowerTriangular, SymMatrix};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum ModelParams {
    ConstVol {
        sigma0: f64,
    },
    /// `sigma_t = sigma0 exp(alpha W'_t - alpha^2 t / 2)`.
    Sabr {
        sigma0: f64,
        alpha: f64,
        rho: f64,
    },
    /// `sigma_t^2 = sigma0^2 exp(v sqrt(2H) Z_t - v^2 t^{2H} / 2)`.
    Bergomi {
        sigma0: f64,
        v: f64,
        hurst: f64,
        rho: f64,
    },
}

impl ModelParams {
    pub fn sigma0(&self) -> f64 {
        match *self {
            ModelParams::ConstVol { sigma0 }
            | ModelParams::Sabr { sigma0, .. }
            | ModelParams::Bergomi { sigma0, .. } => sigma0,
        }
    }

    /// Spot-vol correlation; zero for constant volatility.
    pub fn rho(&self) -> f64 {
        match *self {
            ModelParams::ConstVol { .. } => 0.0,
            ModelParams::Sabr { rho, .. } | ModelParams::Bergomi { rho, .. } => rho,
        }
    }

    /// Hurst exponent of the volatility driver (SABR counts as 1/2).
    pub fn hurst(&self) -> f64 {
        match *self {
            ModelParams::Bergomi { hurst, .. } => hurst,
            _ => 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.sigma0()) {
            return Err(Error::input("sigma0 must be positive"));
        }
        match *self {
            ModelParams::ConstVol { .. } => {}
            ModelParams::Sabr { alpha, rho, .. } => {
                if !finite_pos(alpha) {
                    return Err(Error::input("alpha must be positive"));
                }
                check_rho(rho)?;
            }
            ModelParams::Bergomi { v, hurst, rho, .. } => {
                if !finite_pos(v) {
                    return Err(Error::input("vol-of-vol v must be positive"));
                }
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(Error::input("Hurst exponent must lie in (0, 1)"));
                }
                check_rho(rho)?;
            }
        }
        Ok(())
    }

    /// Number of standard normals one path consumes on an `n_steps` grid.
    pub fn noise_dim(&self, n_steps: usize) -> usize {
        match self {
            ModelParams::ConstVol { .. } => n_steps,
            ModelParams::Sabr { .. } => 2 * n_steps,
            ModelParams::Bergomi { .. } => 3 * n_steps,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::input("correlation must lie in [-1, 1]"));
    }
    Ok(())
}

/// Uniform grid `t_i = i T / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub maturity: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(maturity: f64, n_steps: usize) -> Result<Self> {
        let g = Self { maturity, n_steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.maturity.is_finite() && self.maturity > 0.0) {
            return Err(Error::input("maturity must be positive"));
        }
        if self.n_steps == 0 {
            return Err(Error::input("grid needs at least one step"));
        }
        Ok(())
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.maturity / self.n_steps as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.maturity
        } else {
            i as f64 * self.dt()
        }
    }
}

/// `E(D_r^{W'} sigma_u)` for `r <= u`.
pub fn malliavin_kernel(model: &ModelParams, r: f64, u: f64) -> Result<f64> {
    if !(r.is_finite() && u.is_finite()) || r < 0.0 {
        return Err(Error::input("kernel times must be finite and non-negative"));
    }
    if r > u {
        return Err(Error::input("kernel requires r <= u"));
    }
    Ok(match *model {
        ModelParams::ConstVol { .. } => 0.0,
        ModelParams::Sabr { sigma0, alpha, .. } => alpha * sigma0,
        ModelParams::Bergomi {
            sigma0, v, hurst, ..
        } => {
            libm::exp(-v * v * libm::pow(u, 2.0 * hurst) / 8.0)
                * 0.5
                * sigma0
                * v
                * libm::sqrt(2.0 * hurst)
                * libm::pow(u - r, hurst - 0.5)
        }
    })
}

/// Volatility and price-driver increments of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct VolPath {
    /// `sigma(t_i)`, `i = 0..n-1`.
    pub sigma: Vec<f64>,
    /// `W(t_{i+1}) - W(t_i)`.
    pub dw: Vec<f64>,
}

/// Gaussian part of a path before exponentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearNoise {
    /// Log-volatility driver at the left endpoints: `W'_{t_i}` for SABR,
    /// `Z_{t_i}` for Bergomi, unused for constant volatility.
    pub driver: Vec<f64>,
    pub dw: Vec<f64>,
    scratch: Vec<f64>,
}

impl LinearNoise {
    pub fn new(n_steps: usize) -> Self {
        Self {
            driver: vec![0.0; n_steps],
            dw: vec![0.0; n_steps],
            scratch: vec![0.0; 2 * n_steps],
        }
    }
}

/// Precomputed per-grid state for one model.
///
/// `sigma_i = sigma0 exp(scale * driver_i + drift_i)`.
#[derive(Debug, Clone)]
pub struct PathGenerator {
    model: ModelParams,
    grid: TimeGrid,
    sqrt_dt: f64,
    rho_bar: f64,
    scale: f64,
    drift: Vec<f64>,
    // Cholesky factor ordered (dW'_1..dW'_n, Z_{t_1}..Z_{t_n}).
    factor: Option<LowerTriangular>,
}

impl PathGenerator {
    pub fn new(model: &ModelParams, grid: &TimeGrid) -> Result<Self> {
        model.validate()?;
        grid.validate()?;
        let n = grid.n_steps;
        let times: Vec<f64> = (0..n).map(|i| grid.node(i)).collect();
        let rho = model.rho();
        let (scale, drift, factor) = match *model {
            ModelParams::ConstVol { .. } => (0.0, vec![0.0; n], None),
            ModelParams::Sabr { alpha, .. } => {
                let drift = times.iter().map(|t| -0.5 * alpha * alpha * t).collect();
                (alpha, drift, None)
            }
            ModelParams::Bergomi { v, hurst, .. } => {
                let cov = bergomi_joint_covariance(grid, hurst)?;
                let perm: Vec<usize> = (n..2 * n).chain(0..n).collect();
                let factor = cholesky_with_jitter(&cov.permuted(&perm))?;
                let drift = times
                    .iter()
                    .map(|t| -0.25 * v * v * libm::pow(*t, 2.0 * hurst))
                    .collect();
                (0.5 * v * libm::sqrt(2.0 * hurst), drift, Some(factor))
            }
        };
        Ok(Self {
            model: *model,
            grid: *grid,
            sqrt_dt: libm::sqrt(grid.dt()),
            rho_bar: libm::sqrt((1.0 - rho * rho).max(0.0)),
            scale,
            drift,
            factor,
        })
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn noise_dim(&self) -> usize {
        self.model.noise_dim(self.grid.n_steps)
    }

    /// Whether `sigma` depends on the noise at all.
    pub fn is_stochastic(&self) -> bool {
        self.scale != 0.0
    }

    /// Maps Gaussians to the linear driver and `dW`.
    pub fn linear(&self, gaussians: &[f64], out: &mut LinearNoise) {
        let n = self.grid.n_steps;
        assert!(
            gaussians.len() >= self.noise_dim(),
            "not enough gaussians for this model"
        );
        let h = self.sqrt_dt;
        let rho = self.model.rho();
        match self.model {
            ModelParams::ConstVol { .. } => {
                for (dw, g) in out.dw.iter_mut().zip(&gaussians[..n]) {
                    *dw = h * g;
                }
                out.driver.fill(0.0);
            }
            ModelParams::Sabr { .. } => {
                let mut w = 0.0;
                for i in 0..n {
                    out.driver[i] = w;
                    let dwp = h * gaussians[i];
                    w += dwp;
                    out.dw[i] = rho * dwp + self.rho_bar * h * gaussians[n + i];
                }
            }
            ModelParams::Bergomi { .. } => {
                let factor = self.factor.as_ref().expect("Bergomi factor");
                factor.mul_vec(&gaussians[..2 * n], &mut out.scratch);
                // scratch = (dW'_1..dW'_n, Z_{t_1}..Z_{t_n}); Z_{t_0} = 0
                out.driver[0] = 0.0;
                out.driver[1..n].copy_from_slice(&out.scratch[n..2 * n - 1]);
                for i in 0..n {
                    out.dw[i] = rho * out.scratch[i] + self.rho_bar * h * gaussians[2 * n + i];
                }
            }
        }
    }

    /// `sigma(t_i)` for a driver value (pass a negated driver for the
    /// antithetic path).
    #[inline]
    pub fn sigma_at(&self, i: usize, driver: f64) -> f64 {
        if self.scale == 0.0 {
            self.model.sigma0()
        } else {
            self.model.sigma0() * libm::exp(self.scale * driver + self.drift[i])
        }
    }

    pub fn path(&self, gaussians: &[f64]) -> VolPath {
        let mut lin = LinearNoise::new(self.grid.n_steps);
        self.linear(gaussians, &mut lin);
        VolPath {
            sigma: (0..self.grid.n_steps)
                .map(|i| self.sigma_at(i, lin.driver[i]))
                .collect(),
            dw: lin.dw,
        }
    }
}

/// One path of volatilities and price-driver increments.
pub fn simulate_vol_and_noise(
    model: &ModelParams,
    grid: &TimeGrid,
    gaussians: &[f64],
) -> Result<VolPath> {
    let generator = PathGenerator::new(model, grid)?;
    if gaussians.len() != generator.noise_dim() {
        return Err(Error::input(
            "gaussian vector length does not match the model",
        ));
    }
    Ok(generator.path(gaussians))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    }

    const SABR: ModelParams = ModelParams::Sabr {
        sigma0: 0.3,
        alpha: 0.3,
        rho: -0.3,
    };
    const BERGOMI: ModelParams = ModelParams::Bergomi {
        sigma0: 0.3,
        v: 0.5,
        hurst: 0.4,
        rho: -0.3,
    };

    #[test]
    fn const_vol_ignores_noise() {
        let g = TimeGrid::new(0.01, 10).unwrap();
        let m = ModelParams::ConstVol { sigma0: 0.3 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = simulate_vol_and_noise(&m, &g, &normals(&mut rng, 10)).unwrap();
        assert!(p.sigma.iter().all(|&s| s == 0.3));
    }

    #[test]
    fn kernel_values() {
        let c = ModelParams::ConstVol { sigma0: 0.3 };
        assert_eq!(malliavin_kernel(&c, 0.0, 1.0).unwrap(), 0.0);
        let s = ModelParams::Sabr {
            sigma0: 0.3,
            alpha: 0.3,
            rho: 0.1,
        };
        assert!((malliavin_kernel(&s, 0.2, 0.9).unwrap() - 0.09).abs() < 1e-16);
        let b = ModelParams::Bergomi {
            sigma0: 0.3,
            v: 0.5,
            hurst: 0.4,
            rho: 0.0,
        };
        // direct 40-digit evaluation
        let k = malliavin_kernel(&b, 0.0, 0.001).unwrap();
        assert!((k - 0.133_829_614_500_341_22).abs() < 1e-15);
        assert!(malliavin_kernel(&b, 0.5, 0.4).is_err());
    }

    #[test]
    fn validation() {
        assert!(ModelParams::Sabr {
            sigma0: 0.3,
            alpha: 0.0,
            rho: 0.0
        }
        .validate()
        .is_err());
        assert!(ModelParams::Sabr {
            sigma0: 0.3,
            alpha: 0.1,
            rho: 1.1
        }
        .validate()
        .is_err());
        assert!(ModelParams::Bergomi {
            sigma0: 0.3,
            v: 0.5,
            hurst: 1.0,
            rho: 0.0
        }
        .validate()
        .is_err());
        assert!(ModelParams::ConstVol { sigma0: -1.0 }.validate().is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn bergomi_half_matches_direct_lognormal() {
        let g = TimeGrid::new(0.001, 50).unwrap();
        let (s0, v) = (0.4, 0.7);
        let m = ModelParams::Bergomi {
            sigma0: s0,
            v,
            hurst: 0.5,
            rho: 0.2,
        };
        let gen = PathGenerator::new(&m, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = normals(&mut rng, gen.noise_dim());
            let p = gen.path(&z);
            let mut w = 0.0;
            for (i, zi) in z.iter().take(50).enumerate() {
                let t = g.node(i);
                let direct = (s0 * s0 * (v * w - 0.5 * v * v * t).exp()).sqrt();
                assert!((p.sigma[i] - direct).abs() < 1e-12, "i={i}");
                w += g.dt().sqrt() * zi;
            }
        }
    }

    #[test]
    fn negated_gaussians_negate_drivers() {
        let g = TimeGrid::new(0.001, 20).unwrap();
        for m in [SABR, BERGOMI] {
            let gen = PathGenerator::new(&m, &g).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let z = normals(&mut rng, gen.noise_dim());
            let neg: Vec<f64> = z.iter().map(|x| -x).collect();
            let mut a = LinearNoise::new(20);
            let mut b = LinearNoise::new(20);
            gen.linear(&z, &mut a);
            gen.linear(&neg, &mut b);
            for i in 0..20 {
                assert_eq!(a.dw[i], -b.dw[i]);
                assert_eq!(a.driver[i], -b.driver[i]);
                assert_eq!(gen.sigma_at(i, -a.driver[i]), gen.sigma_at(i, b.driver[i]));
            }
        }
    }

    #[test]
    fn sabr_vol_is_martingale() {
        let g = TimeGrid::new(1.0, 5).unwrap();
        let gen = PathGenerator::new(&SABR, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut sums = [0.0; 5];
        let mut sq = [0.0; 5];
        for _ in 0..n {
            let p = gen.path(&normals(&mut rng, gen.noise_dim()));
            for i in 0..5 {
                sums[i] += p.sigma[i];
                sq[i] += p.sigma[i] * p.sigma[i];
            }
        }
        for i in 0..5 {
            let mean = sums[i] / n as f64;
            let se = ((sq[i] / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
            assert!(
                (mean - 0.3).abs() < 3.0 * se + 1e-12,
                "i={i} mean={mean} se={se}"
            );
        }
    }

    #[test]
    fn bergomi_variance_is_martingale() {
        let g = TimeGrid::new(0.5, 8).unwrap();
        let m = ModelParams::Bergomi {
            sigma0: 0.3,
            v: 1.0,
            hurst: 0.3,
            rho: -0.5,
        };
        let gen = PathGenerator::new(&m, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100_000;
        let mut sums = [0.0; 8];
        let mut sq = [0.0; 8];
        for _ in 0..n {
            let p = gen.path(&normals(&mut rng, gen.noise_dim()));
            for i in 0..8 {
                let v2 = p.sigma[i] * p.sigma[i];
                sums[i] += v2;
                sq[i] += v2 * v2;
            }
        }
        for i in 0..8 {
            let mean = sums[i] / n as f64;
            let se = ((sq[i] / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
            assert!(
                (mean - 0.09).abs() < 3.0 * se + 1e-12,
                "i={i} mean={mean} se={se}"
            );
        }
    }

    #[test]
    fn price_driver_increments_have_dt_variance() {
        let g = TimeGrid::new(0.01, 4).unwrap();
        let gen = PathGenerator::new(&BERGOMI, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut sq = 0.0;
        for _ in 0..n {
            let p = gen.path(&normals(&mut rng, gen.noise_dim()));
            sq += p.dw[2] * p.dw[2];
        }
        let var = sq / n as f64;
        // relative standard error of a chi-square mean is sqrt(2/n) ~ 0.0045
        assert!((var / g.dt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn wrong_gaussian_length_rejected() {
        let g = TimeGrid::new(0.01, 4).unwrap();
        assert!(simulate_vol_and_noise(&SABR, &g, &[0.0; 7]).is_err());
    }
}
