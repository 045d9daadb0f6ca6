//! Dense symmetric linear algebra.

mod det;
mod eigen;
mod matrix;
mod psd;

pub use det::{det_sign, DetSign, Sign};
pub use eigen::{eigenvalues, sym_eigen, SymEigen, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL};
pub use matrix::{congruence, MatrixFile, SymMatrix, LOAD_SYMMETRY_TOL};
pub use psd::{psd_verdict, PsdStatus, PsdVerdict, DEFAULT_TOLERANCE};

pub(crate) use matrix::{matmul, transpose};
pub(crate) use psd::check_tolerance;

use crate::error::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Number of eigenvalues with `|lambda| > rel_tol * max |lambda|`; zero for the zero matrix.
pub fn numerical_rank(m: &SymMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Precondition(format!(
            "rank tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    let ev = eigenvalues(m)?;
    let top = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if top == 0.0 {
        return Ok(0);
    }
    Ok(ev.iter().filter(|v| v.abs() > rel_tol * top).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&SymMatrix::ones(4), DEFAULT_RANK_TOL).unwrap(), 1);
        assert_eq!(numerical_rank(&SymMatrix::identity(3), DEFAULT_RANK_TOL).unwrap(), 3);
        assert_eq!(numerical_rank(&SymMatrix::zeros(3), DEFAULT_RANK_TOL).unwrap(), 0);
        let x = [0.5, 1.0, 2.0, 3.5];
        let gram = SymMatrix::from_fn(4, |i, j| 0.7 + x[i] * x[j]);
        assert_eq!(numerical_rank(&gram, DEFAULT_RANK_TOL).unwrap(), 2);
        assert!(numerical_rank(&gram, 1.0).is_err());
    }
}
