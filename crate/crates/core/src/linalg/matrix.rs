use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute symmetry tolerance (times scale) accepted when loading a matrix from rows.
pub const LOAD_SYMMETRY_TOL: f64 = 1e-12;

/// Dense real symmetric matrix, row-major.
///
/// Both triangles are always stored and are bitwise equal: every constructor
/// evaluates one value per unordered pair `{i, j}` and writes it twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

/// On-disk layout: `{"dim": n, "entries": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixFile> for SymMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        if file.entries.len() != file.dim {
            return Err(Error::schema(
                "entries",
                format!("expected {} rows, found {}", file.dim, file.entries.len()),
            ));
        }
        SymMatrix::from_rows(&file.entries)
    }
}

impl From<SymMatrix> for MatrixFile {
    fn from(m: SymMatrix) -> Self {
        MatrixFile {
            dim: m.dim,
            entries: (0..m.dim).map(|i| m.row(i).to_vec()).collect(),
        }
    }
}

impl SymMatrix {
    /// Builds a matrix by evaluating `f(i, j)` once for every `i <= j`.
    ///
    /// Panics if `dim == 0`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim > 0, "SymMatrix dimension must be at least 1");
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        SymMatrix { dim, entries }
    }

    /// Loads a matrix from explicit rows, checking squareness, finiteness and
    /// symmetry to `LOAD_SYMMETRY_TOL * scale`. The upper triangle is kept.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty("matrix has no rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::schema(
                    format!("entries[{i}]"),
                    format!("expected {dim} columns, found {}", row.len()),
                ));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("entries[{i}][{j}]"),
                    });
                }
            }
        }
        let max_abs = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = LOAD_SYMMETRY_TOL * max_abs.max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let diff = (rows[i][j] - rows[j][i]).abs();
                if diff > tol {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
            }
        }
        Ok(SymMatrix::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix::from_fn(dim, |_, _| 0.0)
    }

    pub fn ones(dim: usize) -> Self {
        SymMatrix::from_fn(dim, |_, _| 1.0)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entry with a floor of 1; the reference magnitude for tolerances.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.entries.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite {
                context: format!("matrix entry ({},{})", k / self.dim, k % self.dim),
            }),
        }
    }

    /// Principal submatrix on the given (distinct, in-range) indices.
    pub fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(indices.len(), |i, j| self.get(indices[i], indices[j]))
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix::from_fn(self.dim, |i, j| c * self.get(i, j))
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.same_dim(other)?;
        Ok(SymMatrix::from_fn(self.dim, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.same_dim(other)?;
        Ok(SymMatrix::from_fn(self.dim, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    /// Elementwise `max |self - other|`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `max |self - other| / max(max|self|, max|other|)`, zero when both vanish.
    pub fn relative_diff(&self, other: &SymMatrix) -> Result<f64> {
        let diff = self.max_abs_diff(other)?;
        let denom = self.max_abs().max(other.max_abs());
        Ok(if denom == 0.0 { diff } else { diff / denom })
    }

    fn same_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Returns `D M D` with `D = diag(weights)`.
///
/// Congruence by an invertible diagonal preserves inertia, hence PSD status.
pub fn congruence(m: &SymMatrix, weights: &[f64]) -> Result<SymMatrix> {
    if weights.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: weights.len(),
        });
    }
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| **w == 0.0 || !w.is_finite())
    {
        return Err(Error::InvalidWeight { index, value });
    }
    Ok(SymMatrix::from_fn(m.dim(), |i, j| {
        weights[i] * m.get(i, j) * weights[j]
    }))
}

/// Row-major product of two square `n x n` arrays.
pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub(crate) fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_writes_both_triangles_from_one_call() {
        let mut calls = 0;
        let m = SymMatrix::from_fn(3, |i, j| {
            calls += 1;
            (i * 10 + j) as f64
        });
        assert_eq!(calls, 6);
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(2, 0), 2.0);
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1, .. }));
    }

    #[test]
    fn from_rows_accepts_roundoff_asymmetry() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-15, 1.0]]).unwrap();
        assert_eq!(m.get(1, 0), 2.0);
    }

    #[test]
    fn from_rows_rejects_ragged_and_nan() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(matches!(
            SymMatrix::from_rows(&[vec![f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
        assert!(SymMatrix::from_rows(&[]).is_err());
    }

    #[test]
    fn json_layout() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.5], vec![2.5, 3.0]]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"dim":2,"entries":[[1.0,2.5],[2.5,3.0]]}"#);
        let back: SymMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SymMatrix>(r#"{"dim":3,"entries":[[1.0]]}"#).is_err());
    }

    #[test]
    fn congruence_examples() {
        let d = congruence(&SymMatrix::identity(2), &[2.0, 3.0]).unwrap();
        assert_eq!(d, SymMatrix::from_diagonal(&[4.0, 9.0]));

        let m = SymMatrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 7.0]]).unwrap();
        assert_eq!(congruence(&m, &[1.0, 1.0]).unwrap(), m);

        assert!(matches!(
            congruence(&m, &[1.0, 0.0]),
            Err(Error::InvalidWeight { index: 1, .. })
        ));
        assert!(congruence(&m, &[1.0]).is_err());
    }
}
