use std::fmt::Write as _;

use crate::error::LinalgError;

/// `(row, col, value)` contribution; duplicates are summed on compression.
pub type Triplet = (usize, usize, f64);

/// CSR matrix with strictly increasing column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix { n_rows, n_cols, row_ptr: vec![0; n_rows + 1], col_idx: vec![], values: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()).expect("identity")
    }

    /// Compresses triplets. Entries at the same position are summed in the
    /// order they were pushed, so symmetric insertion yields exact symmetry.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<Triplet>) -> Result<Self, LinalgError> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= n_rows || *j >= n_cols) {
            return Err(LinalgError::Dimension(format!("entry ({i}, {j}) outside {n_rows}x{n_cols}")));
        }
        if let Some(k) = triplets.iter().position(|t| !t.2.is_finite()) {
            return Err(LinalgError::NonFinite(k));
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 2);
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix { n_rows, n_cols, row_ptr, col_idx, values })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut t = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(LinalgError::Dimension("ragged dense input".into()));
            }
            t.extend(r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(rows.len(), n_cols, t)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.iter() {
            col_idx[next[j]] = i;
            values[next[j]] = v;
            next[j] += 1;
        }
        SparseMatrix { n_rows: self.n_cols, n_cols: self.n_rows, row_ptr: counts, col_idx, values }
    }

    /// Largest `|A_ij - A_ji|`; zero for exactly symmetric matrices.
    pub fn symmetry_defect(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        self.iter().fold(0.0, |m, (i, j, v)| m.max((v - self.get(j, i)).abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() == 0.0
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.n_cols {
            return Err(LinalgError::Dimension(format!("matvec: {} columns, vector of {}", self.n_cols, x.len())));
        }
        Ok((0..self.n_rows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect())
    }

    pub fn transpose_matvec(&self, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if y.len() != self.n_rows {
            return Err(LinalgError::Dimension(format!("transpose_matvec: {} rows, vector of {}", self.n_rows, y.len())));
        }
        let mut out = vec![0.0; self.n_cols];
        for (i, j, v) in self.iter() {
            out[j] += v * y[i];
        }
        Ok(out)
    }

    /// `yᵀ A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> Result<f64, LinalgError> {
        if y.len() != self.n_rows {
            return Err(LinalgError::Dimension(format!("bilinear: {} rows, vector of {}", self.n_rows, y.len())));
        }
        Ok(dot(y, &self.matvec(x)?))
    }

    /// `αA + βB` on identical shapes. Each entry is `α·a + β·b` in that order,
    /// so sums of symmetric matrices stay exactly symmetric.
    pub fn add_scaled(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Result<SparseMatrix, LinalgError> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(LinalgError::Dimension("add_scaled: shape mismatch".into()));
        }
        let mut row_ptr = vec![0; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        for i in 0..self.n_rows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja == jb {
                    col_idx.push(ja);
                    values.push(alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                } else if ja < jb {
                    col_idx.push(ja);
                    values.push(alpha * va[p] + beta * 0.0);
                    p += 1;
                } else {
                    col_idx.push(jb);
                    values.push(alpha * 0.0 + beta * vb[q]);
                    q += 1;
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(SparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_ptr, col_idx, values })
    }

    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= alpha);
        m
    }

    /// Coordinate text dump `i j value`, sorted by `(i, j)`.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for (i, j, v) in self.iter() {
            let _ = writeln!(s, "{i} {j} {v:e}");
        }
        s
    }

    pub(crate) fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }
    pub(crate) fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }
    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Saddle matrix `[[S, Bᵀ], [B, -A0]]` with `S` N×N, `B` M×N and `A0` M×M.
pub fn compose_saddle(s: &SparseMatrix, b: &SparseMatrix, a0: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
    let n = s.n_rows;
    let m = a0.n_rows;
    if s.n_cols != n || a0.n_cols != m || b.n_rows != m || b.n_cols != n {
        return Err(LinalgError::Dimension(format!(
            "saddle blocks S {}x{}, B {}x{}, A0 {}x{}",
            s.n_rows, s.n_cols, b.n_rows, b.n_cols, a0.n_rows, a0.n_cols
        )));
    }
    let bt = b.transpose();
    let mut row_ptr = Vec::with_capacity(n + m + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::with_capacity(s.nnz() + 2 * b.nnz() + a0.nnz());
    let mut values = Vec::with_capacity(col_idx.capacity());
    for i in 0..n {
        let (c, v) = s.row(i);
        col_idx.extend_from_slice(c);
        values.extend_from_slice(v);
        let (c, v) = bt.row(i);
        col_idx.extend(c.iter().map(|j| j + n));
        values.extend_from_slice(v);
        row_ptr.push(col_idx.len());
    }
    for i in 0..m {
        let (c, v) = b.row(i);
        col_idx.extend_from_slice(c);
        values.extend_from_slice(v);
        let (c, v) = a0.row(i);
        col_idx.extend(c.iter().map(|j| j + n));
        values.extend(v.iter().map(|x| -x));
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix { n_rows: n + m, n_cols: n + m, row_ptr, col_idx, values })
}
