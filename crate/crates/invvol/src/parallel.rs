use std::sync::Arc;

use invvol_core::mc::{Executor, McEngine, Moments};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "INVVOL_THREADS";

/// Rayon-backed executor. Chunks are evaluated in parallel and merged in
/// chunk order, so results match [`invvol_core::mc::Sequential`] bit for bit.
#[derive(Debug, Clone, Default)]
pub struct Parallel {
    pool: Option<Arc<ThreadPool>>,
}

impl Parallel {
    /// Uses rayon's global pool.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_threads(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
        Ok(Self {
            pool: Some(Arc::new(pool)),
        })
    }

    /// Honours `INVVOL_THREADS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let n = v.trim().parse::<usize>().map_err(|_| {
                    Error::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))
                })?;
                Self::with_threads(n)
            }
            Err(_) => Ok(Self::new()),
        }
    }

    fn eval<const M: usize, F>(engine: &McEngine, f: &F) -> Moments<M>
    where
        F: Fn(f64) -> [f64; M] + Sync,
    {
        let chunks: Vec<_> = engine.chunks().collect();
        let parts: Vec<Moments<M>> = chunks
            .into_par_iter()
            .map(|range| engine.accumulate(range, f))
            .collect();
        let mut total = Moments::new();
        for p in &parts {
            total.merge(p);
        }
        total
    }
}

impl Executor for Parallel {
    fn run<const M: usize, F>(&self, engine: &McEngine, f: &F) -> Moments<M>
    where
        F: Fn(f64) -> [f64; M] + Sync,
    {
        match &self.pool {
            Some(pool) => pool.install(|| Self::eval(engine, f)),
            None => Self::eval(engine, f),
        }
    }
}
