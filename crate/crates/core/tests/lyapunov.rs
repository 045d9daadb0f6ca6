use alw_core::analysis::{random_al_rep, trial_rng};
use alw_core::functions::FunctionSpec;
use alw_core::linalg::{psd_verdict, sym_eigen, SymMatrix};
use alw_core::lyapunov::{certify, matrix_function, solve, LyapunovProblem};
use rand::Rng;
use rand_distr::StandardNormal;

fn normal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n * n).map(|_| rng.sample(StandardNormal)).collect()
}

fn random_pd(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let m = normal(rng, n);
    SymMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum::<f64>() / n as f64 + if i == j { 0.2 } else { 0.0 }
    })
}

fn random_sym(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let z = normal(rng, n);
    SymMatrix::from_fn(n, |i, j| 0.5 * (z[i * n + j] + z[j * n + i]))
}

/// Row-major orthogonal matrix: eigenvectors of a random symmetric matrix.
fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    sym_eigen(&random_sym(rng, n)).unwrap().orthogonal().to_vec()
}

/// `Q^T M Q`.
fn conjugate(m: &SymMatrix, q: &[f64]) -> SymMatrix {
    let n = m.dim();
    SymMatrix::from_fn(n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += q[k * n + i] * m.get(k, l) * q[l * n + j];
            }
        }
        acc
    })
}

#[test]
fn residual_bound_on_random_instances() {
    for t in 0..100 {
        let mut rng = trial_rng(21, t);
        let n = rng.random_range(1..=16);
        let p = LyapunovProblem::new(random_pd(&mut rng, n), random_sym(&mut rng, n), random_al_rep(&mut rng)).unwrap();
        let x = solve(&p).unwrap();
        assert!(p.relative_residual(&x).unwrap() <= 1e-10, "instance {t}");
    }
}

#[test]
fn basis_invariance() {
    for t in 0..30 {
        let mut rng = trial_rng(22, t);
        let n = rng.random_range(2..=8);
        let (a, b) = (random_pd(&mut rng, n), random_sym(&mut rng, n));
        let g = random_al_rep(&mut rng);
        let q = random_orthogonal(&mut rng, n);
        let x = solve(&LyapunovProblem::new(a.clone(), b.clone(), g.clone()).unwrap()).unwrap();
        let xq = solve(&LyapunovProblem::new(conjugate(&a, &q), conjugate(&b, &q), g).unwrap()).unwrap();
        let rel = conjugate(&x, &q).relative_diff(&xq).unwrap();
        assert!(rel <= 1e-9, "instance {t}: {rel:e}");
    }
}

#[test]
fn anti_loewner_g_with_psd_b_certifies_psd() {
    for t in 0..40 {
        let mut rng = trial_rng(23, t);
        let n = rng.random_range(1..=8);
        let w = normal(&mut rng, n);
        let b = SymMatrix::from_fn(n, |i, j| (0..n).map(|k| w[k * n + i] * w[k * n + j]).sum());
        let p = LyapunovProblem::new(random_pd(&mut rng, n), b, random_al_rep(&mut rng)).unwrap();
        assert!(certify(&p, 1e-9).unwrap().verdict.is_psd(), "instance {t}");
    }
}

#[test]
fn identity_with_all_ones_is_all_ones() {
    let mut rng = trial_rng(24, 0);
    let p = LyapunovProblem::new(random_pd(&mut rng, 5), SymMatrix::ones(5), FunctionSpec::identity()).unwrap();
    let c = certify(&p, 1e-9).unwrap();
    assert!(c.solution.relative_diff(&SymMatrix::ones(5)).unwrap() < 1e-12);
    assert!(c.verdict.is_psd() && !c.positive_definite);
}

#[test]
fn matrix_function_commutes() {
    for t in 0..30 {
        let mut rng = trial_rng(25, t);
        let n = rng.random_range(1..=10);
        let a = random_pd(&mut rng, n);
        let fa = matrix_function(&a, &FunctionSpec::log1p()).unwrap();
        let ab: Vec<f64> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (0..n).map(|l| a.get(i, l) * fa.get(l, j) - fa.get(i, l) * a.get(l, j)).sum()
            })
            .collect();
        let worst = ab.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(worst <= 1e-10 * a.scale().max(fa.scale()), "instance {t}");
        assert!(psd_verdict(&fa, 1e-9).unwrap().is_psd());
    }
}
