//! Randomized invariants of the linear algebra, function and builder layers.

use alw_core::builders::{anti_loewner, loewner, signed_matrix, theorem2_blocks, Grid, SignVector, default_epsilon};
use alw_core::functions::{Atom, FunctionSpec, IntegralRep, Interval};
use alw_core::linalg::{congruence, det_sign, eigenvalues, psd_verdict, sym_eigen, Sign, SymMatrix};
use proptest::prelude::*;

fn sym_matrix(max_dim: usize) -> impl Strategy<Value = SymMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0_f64, n * n)
            .prop_map(move |v| SymMatrix::from_fn(n, |i, j| v[i * n + j] + v[j * n + i]))
    })
}

/// Sorted, well-separated positive points in `(0, 10)`.
fn grid(max_n: usize) -> impl Strategy<Value = Grid> {
    prop::collection::vec(-4.0..2.3_f64, 1..=max_n).prop_filter_map("distinct points", |logs| {
        let mut pts: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        pts.sort_by(f64::total_cmp);
        if pts.windows(2).any(|w| w[1] - w[0] < 1e-3 * w[1]) {
            return None;
        }
        Grid::new(pts, Interval::new(0.0, 10.0).unwrap()).ok()
    })
}

fn al_rep() -> impl Strategy<Value = FunctionSpec> {
    (0.0..5.0_f64, 0.0..5.0_f64, prop::collection::vec((0.0..50.0_f64, 0.01..5.0_f64), 0..4)).prop_map(
        |(alpha, beta, atoms)| {
            let atoms = atoms.into_iter().map(|(t, w)| Atom { t, w }).collect();
            let rep = IntegralRep::new(alpha, beta + 0.01, atoms).unwrap();
            FunctionSpec::al_rep(rep)
        },
    )
}

fn catalog() -> Vec<FunctionSpec> {
    let mut v = alw_core::analysis::full_catalog(3);
    v.push(FunctionSpec::power(-0.5).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigen_trace_reconstruction_and_det_sign(m in sym_matrix(8)) {
        let e = sym_eigen(&m).unwrap();
        let n = m.dim() as f64;
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - m.trace()).abs() <= 1e-10 * m.scale() * n);
        let recon = e.reconstruct().sub(&m).unwrap().frobenius_norm();
        prop_assert!(recon <= 1e-12 * m.frobenius_norm().max(1.0) * n);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let d = det_sign(&m, 1e-9).unwrap();
        if d.sign != Sign::Zero {
            let product_sign = e.values.iter().fold(1.0, |p, v| p * v.signum());
            prop_assert_eq!(d.sign.as_f64(), product_sign);
        }
    }

    #[test]
    fn congruence_preserves_verdict(m in sym_matrix(6), w in prop::collection::vec(0.2..5.0_f64, 6), flip in prop::collection::vec(any::<bool>(), 6)) {
        let n = m.dim();
        let weights: Vec<f64> = (0..n).map(|i| if flip[i] { -w[i] } else { w[i] }).collect();
        let before = psd_verdict(&m, 1e-9).unwrap();
        let after = psd_verdict(&congruence(&m, &weights).unwrap(), 1e-9).unwrap();
        if !before.marginal && !after.marginal {
            prop_assert_eq!(before.status, after.status);
        }
    }

    #[test]
    fn psd_matrices_have_psd_principal_submatrices(v in prop::collection::vec(-3.0..3.0_f64, 1..=24), mask in 1u32..64) {
        // Gram matrix W^T W is PSD by construction.
        let n = 1 + v.len() % 6;
        let rows = v.len() / n;
        let m = SymMatrix::from_fn(n, |i, j| (0..rows).map(|k| v[k * n + i] * v[k * n + j]).sum());
        prop_assume!(psd_verdict(&m, 1e-9).unwrap().is_psd());
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!idx.is_empty());
        let sub = psd_verdict(&m.principal_submatrix(&idx), 1e-9).unwrap();
        prop_assert!(sub.is_psd());
    }

    #[test]
    fn derivatives_match_central_differences(u in 0.0..1.0_f64) {
        for f in catalog() {
            let d = f.domain();
            let (a, b) = (d.a(), d.b().min(20.0));
            let x = a + (b - a) * (0.02 + 0.96 * u);
            let h = 1e-6 * x.abs().max(1.0);
            let fd = (f.evaluate(x + h).unwrap() - f.evaluate(x - h).unwrap()) / (2.0 * h);
            let exact = f.derivative(x).unwrap();
            let scale = exact.abs().max(f.evaluate(x).unwrap().abs() / x).max(1e-3);
            prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{}: fd {fd} exact {exact} at {x}", f.label());
        }
    }

    #[test]
    fn al_rep_is_homogeneous_and_positive(f in al_rep(), c in 0.01..100.0_f64, x in 1e-3..50.0_f64) {
        let alw_core::functions::FunctionKind::AlRep(r) = f.kind() else { unreachable!() };
        let scaled = FunctionSpec::al_rep(r.scaled(c).unwrap());
        let (v, vs) = (f.evaluate(x).unwrap(), scaled.evaluate(x).unwrap());
        prop_assert!(v > 0.0);
        prop_assert!((vs - c * v).abs() <= 1e-13 * c * v);
    }

    #[test]
    fn builders_are_exactly_symmetric(f in al_rep(), g in grid(8)) {
        for m in [anti_loewner(&f, &g).unwrap(), loewner(&f, &g).unwrap()] {
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                }
            }
        }
    }

    #[test]
    fn reciprocal_closure_is_a_congruence(f in al_rep(), g in grid(8)) {
        let k = anti_loewner(&f, &g).unwrap();
        let k_inv = anti_loewner(&FunctionSpec::inverse_of(f.clone()), &g).unwrap();
        let d: Vec<f64> = g.points().iter().map(|&x| f.evaluate(x).unwrap()).collect();
        let rebuilt = congruence(&k_inv, &d).unwrap();
        for (a, b) in k.as_slice().iter().zip(rebuilt.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn global_sign_flip_is_invisible(f in al_rep(), g in grid(7), mask in any::<u64>()) {
        let s = SignVector::from_mask(g.len(), mask);
        prop_assert_eq!(signed_matrix(&f, &g, &s).unwrap(), signed_matrix(&f, &g, &s.negated()).unwrap());
    }

    #[test]
    fn k_prime_is_anti_loewner_on_extended_grid(f in al_rep(), g in grid(5), frac in 0.1..1.0_f64) {
        let b = theorem2_blocks(&f, &g, default_epsilon(&g) * frac).unwrap();
        prop_assert_eq!(&b.k_prime, &anti_loewner(&f, &b.extended).unwrap());
        let n = g.len();
        let idx: Vec<usize> = (0..n).collect();
        prop_assert_eq!(b.k_prime.principal_submatrix(&idx), b.k_double_prime.principal_submatrix(&idx));
    }

    #[test]
    fn table_reproduces_knots(v in prop::collection::vec(0.1..10.0_f64, 4..10)) {
        let knots: Vec<f64> = (0..v.len()).map(|i| 1.0 + i as f64).collect();
        let t = alw_core::functions::TableSpec::new(knots.clone(), v.clone()).unwrap();
        for (k, y) in knots.iter().zip(&v) {
            prop_assert_eq!(t.evaluate(*k).unwrap(), *y);
        }
    }

    #[test]
    fn eigenvalues_of_scaled_identity(n in 1usize..10, c in -5.0..5.0_f64) {
        let ev = eigenvalues(&SymMatrix::identity(n).scaled(c)).unwrap();
        prop_assert!(ev.iter().all(|&v| v == c));
    }
}
