//! The Lyapunov-type equation `A X + X A = g(A) B + B g(A)`.
//!
//! In the eigenbasis of `A = Q diag(lambda) Q^T` the equation decouples:
//! `X~_ij = (g(lambda_i) + g(lambda_j)) / (lambda_i + lambda_j) * B~_ij` with
//! `B~ = Q^T B Q`. For diagonal `A` and all-ones `B` the solution is exactly
//! the anti-Löwner matrix of `g` at the diagonal of `A`.

use serde::{Deserialize, Serialize};

use crate::builders::divided_sum;
use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::linalg::{check_tolerance, matmul, psd_verdict, sym_eigen, transpose, PsdVerdict, SymEigen, SymMatrix};

/// Validated problem data; `A` is symmetric positive definite with spectrum in `g`'s domain.
#[derive(Debug, Clone)]
pub struct LyapunovProblem {
    a: SymMatrix,
    b: SymMatrix,
    g: FunctionSpec,
    eigen: SymEigen,
}

/// `{"A": matrix, "B": matrix, "g": function spec}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: SymMatrix,
    #[serde(rename = "B")]
    pub b: SymMatrix,
    pub g: FunctionSpec,
}

impl LyapunovProblem {
    pub fn new(a: SymMatrix, b: SymMatrix, g: FunctionSpec) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        b.check_finite()?;
        let eigen = sym_eigen(&a)?;
        if eigen.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: eigen.min(),
            });
        }
        let domain = g.domain();
        if let Some(&bad) = eigen.values.iter().find(|v| !domain.contains(**v)) {
            return Err(Error::OutsideDomain {
                x: bad,
                a: domain.a(),
                b: domain.b(),
            });
        }
        Ok(LyapunovProblem { a, b, g, eigen })
    }

    pub fn from_file(file: ProblemFile) -> Result<Self> {
        LyapunovProblem::new(file.a, file.b, file.g)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| Error::schema("$", e.to_string()))?;
        LyapunovProblem::from_file(file)
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn g(&self) -> &FunctionSpec {
        &self.g
    }

    /// `g(A) B + B g(A)`.
    pub fn rhs(&self) -> Result<SymMatrix> {
        let ga = matrix_function(&self.a, &self.g)?;
        Ok(anticommutator(&ga, &self.b))
    }

    /// `||A X + X A - g(A) B - B g(A)||_F / max(1, ||g(A) B + B g(A)||_F)`.
    pub fn relative_residual(&self, x: &SymMatrix) -> Result<f64> {
        let rhs = self.rhs()?;
        let lhs = anticommutator(&self.a, x);
        Ok(lhs.sub(&rhs)?.frobenius_norm() / rhs.frobenius_norm().max(1.0))
    }
}

/// `P S + S P` for symmetric `P`, `S`; symmetric by construction.
fn anticommutator(p: &SymMatrix, s: &SymMatrix) -> SymMatrix {
    let n = p.dim();
    let ps = matmul(p.as_slice(), s.as_slice(), n);
    SymMatrix::from_fn(n, |i, j| ps[i * n + j] + ps[j * n + i])
}

pub fn solve(p: &LyapunovProblem) -> Result<SymMatrix> {
    let n = p.a.dim();
    if p.a.is_diagonal() {
        let d = p.a.diagonal();
        let gd = d.iter().map(|&x| p.g.evaluate(x)).collect::<Result<Vec<_>>>()?;
        return Ok(SymMatrix::from_fn(n, |i, j| {
            divided_sum(gd[i], gd[j], d[i], d[j]) * p.b.get(i, j)
        }));
    }
    let q = p.eigen.orthogonal();
    let qt = transpose(q, n);
    let lambda = &p.eigen.values;
    let gl = lambda.iter().map(|&x| p.g.evaluate(x)).collect::<Result<Vec<_>>>()?;
    let b_rot = matmul(&matmul(&qt, p.b.as_slice(), n), q, n);
    let mut x_rot = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // b_rot is symmetric up to roundoff; use the upper triangle for both.
            let (r, c) = if i <= j { (i, j) } else { (j, i) };
            x_rot[i * n + j] = divided_sum(gl[i], gl[j], lambda[i], lambda[j]) * b_rot[r * n + c];
        }
    }
    let x = matmul(&matmul(q, &x_rot, n), &qt, n);
    Ok(SymMatrix::from_fn(n, |i, j| x[i * n + j]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub solution: SymMatrix,
    pub residual: f64,
    pub verdict: PsdVerdict,
    /// `min eigenvalue > tolerance * scale`.
    pub positive_definite: bool,
}

pub fn certify(p: &LyapunovProblem, tolerance: f64) -> Result<Certificate> {
    check_tolerance(tolerance)?;
    let solution = solve(p)?;
    let residual = p.relative_residual(&solution)?;
    let verdict = psd_verdict(&solution, tolerance)?;
    Ok(Certificate {
        positive_definite: verdict.is_positive_definite(),
        solution,
        residual,
        verdict,
    })
}

/// `f(A) = Q f(Lambda) Q^T`.
pub fn matrix_function(a: &SymMatrix, f: &FunctionSpec) -> Result<SymMatrix> {
    let e = sym_eigen(a)?;
    let fl = e.values.iter().map(|&l| f.evaluate(l)).collect::<Result<Vec<_>>>()?;
    let mut k = 0;
    Ok(e.map_spectrum(|_| {
        let v = fl[k];
        k += 1;
        v
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{anti_loewner, Grid};
    use crate::linalg::PsdStatus;

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(d)
    }

    #[test]
    fn diagonal_identity_case() {
        let p = LyapunovProblem::new(diag(&[1.0, 2.0]), SymMatrix::identity(2), FunctionSpec::identity()).unwrap();
        assert_eq!(solve(&p).unwrap(), SymMatrix::identity(2));
    }

    #[test]
    fn diagonal_all_ones_is_anti_loewner_bitwise() {
        let x = [0.3, 1.7, 2.2, 9.0];
        let g = FunctionSpec::log1p();
        let p = LyapunovProblem::new(diag(&x), SymMatrix::ones(4), g.clone()).unwrap();
        let k = anti_loewner(&g, &Grid::positive(x.to_vec()).unwrap()).unwrap();
        assert_eq!(solve(&p).unwrap(), k);
    }

    #[test]
    fn squared_function_gives_indefinite_solution() {
        let p = LyapunovProblem::new(diag(&[1.0, 3.0]), SymMatrix::ones(2), FunctionSpec::power(2.0).unwrap()).unwrap();
        let c = certify(&p, 1e-9).unwrap();
        assert_eq!(c.solution.to_rows(), vec![vec![1.0, 2.5], vec![2.5, 3.0]]);
        assert_eq!(c.verdict.status, PsdStatus::NotPsd);
        assert!(c.residual < 1e-15);
    }

    #[test]
    fn general_a_residual() {
        let a = SymMatrix::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, -0.2], vec![0.5, -0.2, 2.0]]).unwrap();
        let b = SymMatrix::from_rows(&[vec![1.0, 0.3, 0.0], vec![0.3, 2.0, 0.4], vec![0.0, 0.4, 1.5]]).unwrap();
        let p = LyapunovProblem::new(a, b, FunctionSpec::power(0.5).unwrap()).unwrap();
        let x = solve(&p).unwrap();
        assert!(p.relative_residual(&x).unwrap() < 1e-13);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            LyapunovProblem::new(diag(&[1.0, -1.0]), SymMatrix::ones(2), FunctionSpec::identity()),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            LyapunovProblem::new(diag(&[1.0, 2.0]), SymMatrix::ones(3), FunctionSpec::identity()),
            Err(Error::DimensionMismatch { .. })
        ));
        let g = FunctionSpec::identity()
            .with_domain(crate::functions::Interval::new(0.0, 1.5).unwrap())
            .unwrap();
        assert!(matches!(
            LyapunovProblem::new(diag(&[1.0, 2.0]), SymMatrix::ones(2), g),
            Err(Error::OutsideDomain { x, .. }) if x == 2.0
        ));
    }

    #[test]
    fn matrix_function_examples() {
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let id = matrix_function(&a, &FunctionSpec::identity()).unwrap();
        assert!(id.max_abs_diff(&a).unwrap() < 1e-14);
        let c = matrix_function(&a, &FunctionSpec::constant(2.5).unwrap()).unwrap();
        assert!(c.max_abs_diff(&SymMatrix::identity(2).scaled(2.5)).unwrap() < 1e-14);
        let sq = matrix_function(&a, &FunctionSpec::power(2.0).unwrap()).unwrap();
        // direct product oracle
        let prod = matmul(a.as_slice(), a.as_slice(), 2);
        assert_eq!(prod, vec![5.0, 4.0, 4.0, 5.0]);
        for (got, want) in sq.as_slice().iter().zip(&prod) {
            assert!((got - want).abs() < 1e-13);
        }
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            matrix_function(&bad, &FunctionSpec::power(0.5).unwrap()),
            Err(Error::OutsideDomain { x, .. }) if (x + 1.0).abs() < 1e-14
        ));
    }

    #[test]
    fn problem_file_format() {
        let text = r#"{"A":{"dim":2,"entries":[[1,0],[0,3]]},"B":{"dim":2,"entries":[[1,1],[1,1]]},"g":{"kind":"power","p":2}}"#;
        let p = LyapunovProblem::from_json_str(text).unwrap();
        assert_eq!(solve(&p).unwrap().get(0, 1), 2.5);
        let bad = r#"{"A":{"dim":2,"entries":[[1,0],[0,3]]},"B":{"dim":1,"entries":[[1]]},"g":{"kind":"identity"}}"#;
        assert!(matches!(LyapunovProblem::from_json_str(bad), Err(Error::DimensionMismatch { .. })));
    }
}
