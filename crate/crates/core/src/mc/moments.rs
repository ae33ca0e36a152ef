//! Streaming mean and covariance of small fixed-size sample vectors.

/// Running first and second moments of `M`-dimensional samples.
///
/// Uses Welford updates within a chunk and the pairwise (Chan et al.)
/// combination across chunks, so merging chunks in a fixed order gives
/// bit-identical results regardless of how the chunks were scheduled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<const M: usize> {
    n: u64,
    mean: [f64; M],
    // sum of centred cross products
    m2: [[f64; M]; M],
}

impl<const M: usize> Default for Moments<M> {
    fn default() -> Self {
        Self::new()
    }
}

#[allow(clippy::needless_range_loop)]
impl<const M: usize> Moments<M> {
    pub const fn new() -> Self {
        Self {
            n: 0,
            mean: [0.0; M],
            m2: [[0.0; M]; M],
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, x: [f64; M]) {
        self.n += 1;
        let n = self.n as f64;
        let mut delta = [0.0; M];
        for k in 0..M {
            delta[k] = x[k] - self.mean[k];
            self.mean[k] += delta[k] / n;
        }
        for i in 0..M {
            let after = x[i] - self.mean[i];
            for j in 0..M {
                self.m2[i][j] += delta[j] * after;
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let mut delta = [0.0; M];
        for k in 0..M {
            delta[k] = other.mean[k] - self.mean[k];
        }
        for i in 0..M {
            for j in 0..M {
                self.m2[i][j] += other.m2[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for k in 0..M {
            self.mean[k] += delta[k] * nb / n;
        }
        self.n += other.n;
    }

    pub fn mean(&self) -> [f64; M] {
        self.mean
    }

    /// Unbiased sample covariance of components `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        // symmetrise the accumulated products
        0.5 * (self.m2[i][j] + self.m2[j][i]) / (self.n - 1) as f64
    }

    /// Standard error of `sum_k w_k mean_k`.
    pub fn linear_stderr(&self, weights: &[f64; M]) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut var = 0.0;
        for i in 0..M {
            for j in 0..M {
                var += weights[i] * weights[j] * self.covariance(i, j);
            }
        }
        libm::sqrt(var.max(0.0) / self.n as f64)
    }

    pub fn stderr(&self, k: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        libm::sqrt(self.covariance(k, k).max(0.0) / self.n as f64)
    }
}
