//! Up-looking sparse LDLᵀ with a static nested-dissection ordering.
//!
//! No pivoting: the factorization exists for every symmetric permutation of a
//! quasi-definite matrix `[[H, Bᵀ], [B, -C]]` with `H`, `C` positive definite,
//! which is exactly the structure of the stabilized saddle system. A zero or
//! non-finite pivot is reported as a singularity.

use super::matrix::{norm2, SparseMatrix};
use super::ordering::nested_dissection;
use crate::error::LinalgError;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

const NONE: usize = usize::MAX;

/// Factorization `P A Pᵀ = L D Lᵀ` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    d: Vec<f64>,
}

impl Ldlt {
    pub fn factor(a: &SparseMatrix) -> Result<Self, LinalgError> {
        let perm = nested_dissection(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &SparseMatrix, perm: Vec<usize>) -> Result<Self, LinalgError> {
        let n = a.n_rows();
        if a.n_cols() != n || perm.len() != n {
            return Err(LinalgError::Dimension(format!("LDLᵀ needs a square matrix, got {}x{}", n, a.n_cols())));
        }
        let mut pinv = vec![NONE; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }

        // upper triangle of P A Pᵀ by columns: column k holds rows i <= k
        let (row_ptr, col_idx, values) = (a.row_ptr(), a.col_idx(), a.values());
        let mut c_ptr = vec![0usize; n + 1];
        for k in 0..n {
            let old = perm[k];
            let cnt = col_idx[row_ptr[old]..row_ptr[old + 1]].iter().filter(|&&j| pinv[j] <= k).count();
            c_ptr[k + 1] = c_ptr[k] + cnt;
        }
        let mut c_idx = vec![0usize; c_ptr[n]];
        let mut c_val = vec![0.0; c_ptr[n]];
        for k in 0..n {
            let old = perm[k];
            let mut p = c_ptr[k];
            for q in row_ptr[old]..row_ptr[old + 1] {
                let i = pinv[col_idx[q]];
                if i <= k {
                    c_idx[p] = i;
                    c_val[p] = values[q];
                    p += 1;
                }
            }
        }

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut l_nz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for &i0 in &c_idx[c_ptr[k]..c_ptr[k + 1]] {
                let mut i = i0;
                while i < k && flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    l_nz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut l_ptr = vec![0usize; n + 1];
        for k in 0..n {
            l_ptr[k + 1] = l_ptr[k] + l_nz[k];
        }

        // numeric
        let nnz = l_ptr[n];
        let mut l_idx = vec![0usize; nnz];
        let mut l_val = vec![0.0; nnz];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        flag.iter_mut().for_each(|f| *f = NONE);
        l_nz.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for p in c_ptr[k]..c_ptr[k + 1] {
                let mut i = c_idx[p];
                y[i] += c_val[p];
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut dk = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = l_ptr[i];
                let end = start + l_nz[i];
                for p in start..end {
                    y[l_idx[p]] -= l_val[p] * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                l_idx[end] = k;
                l_val[end] = lki;
                l_nz[i] += 1;
            }
            if dk == 0.0 || !dk.is_finite() {
                return Err(LinalgError::Singular { index: perm[k] });
            }
            d[k] = dk;
        }
        Ok(Ldlt { n, perm, l_ptr, l_idx, l_val, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored off-diagonal entries of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len()
    }

    /// Number of negative pivots (the inertia's negative count).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::Dimension(format!("rhs of length {} for order {}", b.len(), self.n)));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                    x[self.l_idx[p]] -= self.l_val[p] * xj;
                }
            }
        }
        for (xj, dj) in x.iter_mut().zip(&self.d) {
            *xj /= dj;
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                s -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = s;
        }
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        Ok(out)
    }
}

fn residual(k: &SparseMatrix, x: &[f64], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let kx = k.matvec(x)?;
    Ok(b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect())
}

/// Solves `K x = b` and certifies
/// `‖Kx − b‖₂ ≤ rel_tol·(‖K‖_max‖x‖₂ + ‖b‖₂)`, applying one step of iterative
/// refinement when the first solve misses.
pub fn solve_direct(k: &SparseMatrix, b: &[f64], rel_tol: f64) -> Result<Vec<f64>, LinalgError> {
    if k.n_rows() != k.n_cols() || b.len() != k.n_rows() {
        return Err(LinalgError::Dimension(format!(
            "system {}x{} with rhs of length {}",
            k.n_rows(),
            k.n_cols(),
            b.len()
        )));
    }
    if let Some(i) = b.iter().position(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite(i));
    }
    let f = Ldlt::factor(k)?;
    let kmax = k.max_abs();
    let bnorm = norm2(b);
    let mut x = f.solve(b)?;
    let mut r = residual(k, &x, b)?;
    let bound = |x: &[f64]| rel_tol * (kmax * norm2(x) + bnorm);
    if norm2(&r) <= bound(&x) {
        return Ok(x);
    }
    let dx = f.solve(&r)?;
    x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
    r = residual(k, &x, b)?;
    let achieved = norm2(&r);
    let tolerance = bound(&x);
    if achieved <= tolerance && x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(LinalgError::Residual { achieved, tolerance })
    }
}
