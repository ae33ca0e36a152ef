use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Symmetric reordering `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i * self.dim + j] = self.get(perm[i], perm[j]);
            }
        }
        out
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }
}

/// Packed lower-triangular factor `L` with `A = L L^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    // row i occupies [i(i+1)/2, i(i+1)/2 + i]
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }

    /// `out = L g`.
    pub fn mul_vec(&self, g: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.row(i).iter().zip(g).map(|(l, x)| l * x).sum();
        }
    }
}

/// Relative size below which a pivot is treated as an exact zero.
const ZERO_PIVOT_RTOL: f64 = 1e-12;

/// Cholesky factorization for positive-semidefinite matrices.
///
/// Pivots within `1e-12 * A[j][j]` of zero are set to zero and their column
/// left empty, so rank-deficient covariances factor exactly. A clearly
/// negative pivot is an error.
pub fn cholesky_psd(a: &SymMatrix) -> Result<LowerTriangular> {
    let n = a.dim();
    let mut l = LowerTriangular {
        dim: n,
        data: vec![0.0; n * (n + 1) / 2],
    };
    for j in 0..n {
        let rj = j * (j + 1) / 2;
        let ajj = a.get(j, j);
        let s: f64 = l.data[rj..rj + j].iter().map(|v| v * v).sum();
        let pivot = ajj - s;
        let tol = ZERO_PIVOT_RTOL * ajj.abs();
        if pivot < -tol || !pivot.is_finite() {
            return Err(Error::Factorization { index: j, pivot });
        }
        if pivot <= tol {
            // column j stays zero
            continue;
        }
        let d = libm::sqrt(pivot);
        l.data[rj + j] = d;
        for i in j + 1..n {
            let ri = i * (i + 1) / 2;
            let dot: f64 = (0..j).map(|k| l.data[ri + k] * l.data[rj + k]).sum();
            l.data[ri + j] = (a.get(i, j) - dot) / d;
        }
    }
    Ok(l)
}

/// [`cholesky_psd`], retried once with `1e-12 * trace / n` added to the
/// diagonal if the first attempt fails.
pub fn cholesky_with_jitter(a: &SymMatrix) -> Result<LowerTriangular> {
    match cholesky_psd(a) {
        Ok(l) => Ok(l),
        Err(_) => {
            let n = a.dim();
            let jitter = 1e-12 * a.trace() / n.max(1) as f64;
            let mut b = a.clone();
            for i in 0..n {
                let v = b.get(i, i) + jitter;
                b.set(i, i, v);
            }
            cholesky_psd(&b)
        }
    }
}
