use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use super::moments::Moments;
use super::{OptionSpec, SimConfig};
use crate::error::Result;
use crate::vol_models::{LinearNoise, ModelParams, PathGenerator, TimeGrid};

/// Samples per work unit. Chunk boundaries depend only on the sample count,
/// which keeps reductions independent of the number of threads.
pub const CHUNK_SIZE: usize = 1024;

/// Terminal log-price of one sample and, with antithetic sampling, of its
/// mirrored path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalSample {
    pub x: f64,
    pub antithetic: Option<f64>,
}

/// Per-thread scratch buffers.
#[derive(Debug, Clone)]
pub struct Workspace {
    gaussians: Vec<f64>,
    noise: LinearNoise,
}

/// Log-Euler simulation of `dX = sigma dW - sigma^2 dt / 2` with
/// left-endpoint volatility.
///
/// Sample `i` draws its Gaussians from ChaCha8 stream `i` under a key derived
/// from the seed, so any subset of samples can be regenerated on its own.
#[derive(Debug, Clone)]
pub struct McEngine {
    generator: PathGenerator,
    x0: f64,
    dt: f64,
    n_samples: usize,
    antithetic: bool,
    key: [u8; 32],
}

impl McEngine {
    pub fn new(model: &ModelParams, spec: &OptionSpec, cfg: &SimConfig) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        let grid = TimeGrid::new(spec.maturity, cfg.n_steps)?;
        let generator = PathGenerator::new(model, &grid)?;
        let key = ChaCha8Rng::seed_from_u64(cfg.seed).get_seed();
        Ok(Self {
            generator,
            x0: spec.log_spot(),
            dt: grid.dt(),
            n_samples: cfg.n_samples(),
            antithetic: cfg.antithetic,
            key,
        })
    }

    pub fn generator(&self) -> &PathGenerator {
        &self.generator
    }

    pub fn log_spot(&self) -> f64 {
        self.x0
    }

    /// Independent samples: antithetic pairs, or single paths.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn antithetic(&self) -> bool {
        self.antithetic
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            gaussians: vec![0.0; self.generator.noise_dim()],
            noise: LinearNoise::new(self.generator.grid().n_steps),
        }
    }

    pub fn chunks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.n_samples)
            .step_by(CHUNK_SIZE)
            .map(move |lo| lo..(lo + CHUNK_SIZE).min(self.n_samples))
    }

    /// Fills the Gaussians of sample `index`.
    pub fn gaussians(&self, index: usize, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index as u64);
        for g in out.iter_mut() {
            *g = StandardNormal.sample(&mut rng);
        }
    }

    pub fn terminal(&self, index: usize, ws: &mut Workspace) -> TerminalSample {
        self.gaussians(index, &mut ws.gaussians);
        self.terminal_from(&mut ws.noise, &ws.gaussians)
    }

    /// Terminal sample for caller-supplied Gaussians.
    pub fn terminal_for(&self, gaussians: &[f64]) -> TerminalSample {
        let mut noise = LinearNoise::new(self.generator.grid().n_steps);
        self.terminal_from(&mut noise, gaussians)
    }

    fn terminal_from(&self, noise: &mut LinearNoise, gaussians: &[f64]) -> TerminalSample {
        self.generator.linear(gaussians, noise);
        let x = self.walk(noise, 1.0);
        let antithetic = self.antithetic.then(|| self.walk(noise, -1.0));
        TerminalSample { x, antithetic }
    }

    fn walk(&self, noise: &LinearNoise, sign: f64) -> f64 {
        let gen = &self.generator;
        let mut x = self.x0;
        if gen.is_stochastic() {
            for (i, (d, dw)) in noise.driver.iter().zip(&noise.dw).enumerate() {
                let s = gen.sigma_at(i, sign * d);
                x += s * (sign * dw) - 0.5 * s * s * self.dt;
            }
        } else {
            let s = gen.sigma_at(0, 0.0);
            let drift = 0.5 * s * s * self.dt;
            for dw in &noise.dw {
                x += s * (sign * dw) - drift;
            }
        }
        x
    }

    /// Moments of `f(X_T)` (pair-averaged under antithetic sampling) over
    /// the given sample range.
    pub fn accumulate<const M: usize, F>(&self, range: Range<usize>, f: &F) -> Moments<M>
    where
        F: Fn(f64) -> [f64; M],
    {
        let mut ws = self.workspace();
        let mut acc = Moments::new();
        for i in range {
            let t = self.terminal(i, &mut ws);
            let mut v = f(t.x);
            if let Some(xa) = t.antithetic {
                let va = f(xa);
                for k in 0..M {
                    v[k] = 0.5 * (v[k] + va[k]);
                }
            }
            acc.push(v);
        }
        acc
    }
}

/// Strategy for evaluating the chunks of an engine.
///
/// Implementations must merge per-chunk moments in chunk order.
pub trait Executor {
    fn run<const M: usize, F>(&self, engine: &McEngine, f: &F) -> Moments<M>
    where
        F: Fn(f64) -> [f64; M] + Sync;
}

/// Single-threaded evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<const M: usize, F>(&self, engine: &McEngine, f: &F) -> Moments<M>
    where
        F: Fn(f64) -> [f64; M] + Sync,
    {
        let mut total = Moments::new();
        for chunk in engine.chunks() {
            total.merge(&engine.accumulate(chunk, f));
        }
        total
    }
}
