//! Matrix monotonicity straight from the definition `A <= B => f(A) <= f(B)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, Interval};
use crate::linalg::{eigenvalues, psd_verdict, SymMatrix};
use crate::lyapunov::matrix_function;

use super::classify::{start, ClassificationReport, Outcome, Property, Witness};
use super::sampling::{log_uniform, trial_rng};
use super::TrialConfig;

/// Fraction of the interval kept free at each end of the mapped spectrum.
const SPECTRUM_MARGIN: f64 = 0.05;
const MAX_RESAMPLES: usize = 100;

fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n * n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `A` symmetrized Gaussian, `B = A + (cW)^T (cW)` with `c` log-uniform in
/// `[0.01, 1]`, then both mapped by the same increasing affine map so their
/// joint spectrum fills `interval` up to a 5% margin at each end.
fn sample_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, interval: &Interval) -> Result<(SymMatrix, SymMatrix)> {
    let (a, b) = (interval.a(), interval.b());
    let lo = a + SPECTRUM_MARGIN * (b - a);
    let hi = b - SPECTRUM_MARGIN * (b - a);
    for _ in 0..MAX_RESAMPLES {
        let z = normal_matrix(rng, n);
        let am = SymMatrix::from_fn(n, |i, j| 0.5 * (z[i * n + j] + z[j * n + i]));
        let c = log_uniform(rng, 0.01, 1.0);
        let w = normal_matrix(rng, n);
        let bm = SymMatrix::from_fn(n, |i, j| {
            am.get(i, j) + c * c * (0..n).map(|k| w[k * n + i] * w[k * n + j]).sum::<f64>()
        });
        let s_lo = eigenvalues(&am)?[0];
        let s_hi = *eigenvalues(&bm)?.last().expect("non-empty spectrum");
        if !(s_hi - s_lo > 1e-12 * s_hi.abs().max(s_lo.abs()).max(1.0)) {
            continue;
        }
        let alpha = (hi - lo) / (s_hi - s_lo);
        let map = |m: &SymMatrix| {
            SymMatrix::from_fn(n, |i, j| {
                alpha * m.get(i, j) + if i == j { lo - alpha * s_lo } else { 0.0 }
            })
        };
        let (am, bm) = (map(&am), map(&bm));
        let inside = |m: &SymMatrix| -> Result<bool> {
            Ok(eigenvalues(m)?.iter().all(|&l| interval.contains(l)))
        };
        if inside(&am)? && inside(&bm)? {
            return Ok((am, bm));
        }
    }
    Err(Error::Precondition(format!(
        "could not generate a matrix pair with spectrum inside {interval}"
    )))
}

/// Searches for `A <= B` with `f(B) - f(A)` not PSD.
pub fn direct_monotonicity_probe(f: &FunctionSpec, order: usize, cfg: &TrialConfig) -> Result<ClassificationReport> {
    let mut report = start(Property::MatrixMonotoneOrderN, f, order, cfg)?;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let (a, b) = sample_pair(&mut rng, order, &report.interval)?;
        let diff = matrix_function(&b, f)?.sub(&matrix_function(&a, f)?)?;
        let v = psd_verdict(&diff, cfg.tolerance)?;
        report.trials_run = t + 1;
        if !v.is_psd() {
            report.outcome = Outcome::Refuted;
            report.witness = Some(Witness {
                grid: None,
                matrix: diff,
                min_eigenvalue: v.min_eigenvalue,
                a: Some(a),
                b: Some(b),
            });
            break;
        }
        if v.marginal {
            report.marginal_skipped += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TrialConfig {
        TrialConfig::with_seed(3).trials(200)
    }

    #[test]
    fn pairs_are_ordered_and_inside() {
        let iv = Interval::new(0.0, 10.0).unwrap();
        let mut rng = trial_rng(1, 1);
        for _ in 0..20 {
            let (a, b) = sample_pair(&mut rng, 4, &iv).unwrap();
            assert!(psd_verdict(&b.sub(&a).unwrap(), 1e-9).unwrap().is_psd());
            for m in [&a, &b] {
                let e = eigenvalues(m).unwrap();
                assert!(e[0] >= 0.5 - 1e-9 && *e.last().unwrap() <= 9.5 + 1e-9);
            }
        }
    }

    #[test]
    fn identity_never_refuted() {
        let r = direct_monotonicity_probe(&FunctionSpec::identity(), 3, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::NoCounterexampleFound);
    }

    #[test]
    fn square_refuted_and_witness_reverifies() {
        let r = direct_monotonicity_probe(&FunctionSpec::power(2.0).unwrap(), 2, &cfg()).unwrap();
        assert!(r.is_refuted());
        assert!(r.reverify().unwrap());
    }

    #[test]
    fn sqrt_not_refuted() {
        let r = direct_monotonicity_probe(&FunctionSpec::power(0.5).unwrap(), 3, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::NoCounterexampleFound);
    }
}
