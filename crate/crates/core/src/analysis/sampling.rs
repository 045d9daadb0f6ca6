use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::Grid;
use crate::error::{Error, Result};
use crate::functions::{Atom, FunctionSpec, IntegralRep, Interval};

/// Relative distance kept from both interval endpoints when sampling.
pub const ENDPOINT_MARGIN: f64 = 1e-6;

const MAX_RESAMPLES: usize = 1000;

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `exp(U(ln lo, ln hi))`; requires `0 < lo <= hi`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo > 0.0 && lo <= hi);
    if lo == hi {
        return lo;
    }
    rng.random_range(lo.ln()..hi.ln()).exp().clamp(lo, hi)
}

/// `interval ∩ domain`, which must be bounded.
pub fn sampling_interval(interval: &Interval, domain: &Interval) -> Result<Interval> {
    let iv = interval.intersect(domain)?;
    if !iv.is_bounded() {
        return Err(Error::Precondition(format!("sampling interval {iv} must be bounded")));
    }
    Ok(iv)
}

fn bounds(interval: &Interval) -> Result<(f64, f64)> {
    if !interval.is_bounded() {
        return Err(Error::Precondition(format!("sampling interval {interval} must be bounded")));
    }
    let (a, b) = (interval.a(), interval.b());
    let m = ENDPOINT_MARGIN * (b - a);
    Ok((a + m, b - m))
}

/// `n` sorted log-uniform points in `interval`, resampled until distinct.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, n: usize, interval: &Interval) -> Result<Grid> {
    let (lo, hi) = bounds(interval)?;
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let mut pts: Vec<f64> = (0..n).map(|_| log_uniform(rng, lo, hi)).collect();
        pts.sort_by(f64::total_cmp);
        match Grid::new(pts, *interval) {
            Ok(g) => return Ok(g),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Empty("grid has no points".into())))
}

/// Positive values, log-uniform in `[0.1, 10]`.
pub fn random_positive_values<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, 0.1, 10.0)).collect()
}

/// A random non-trivial anti-Löwner integral representation on `(0, inf)`.
///
/// `alpha` and `beta` are each zero with probability 1/2, otherwise
/// log-uniform in `[0.01, 10]`; up to four atoms with `t` in `{0} ∪ [0.01, 100]`
/// and `w` in `[0.01, 10]`.
pub fn random_al_rep<R: Rng + ?Sized>(rng: &mut R) -> FunctionSpec {
    let coef = |rng: &mut R| {
        if rng.random_bool(0.5) {
            0.0
        } else {
            log_uniform(rng, 0.01, 10.0)
        }
    };
    let alpha = coef(rng);
    let mut beta = coef(rng);
    let count = rng.random_range(0..=4);
    let atoms: Vec<Atom> = (0..count)
        .map(|_| {
            let t = if rng.random_bool(0.1) {
                0.0
            } else {
                log_uniform(rng, 0.01, 100.0)
            };
            Atom {
                t,
                w: log_uniform(rng, 0.01, 10.0),
            }
        })
        .collect();
    if alpha == 0.0 && atoms.is_empty() && beta == 0.0 {
        beta = 1.0;
    }
    FunctionSpec::al_rep(IntegralRep::new(alpha, beta, atoms).expect("generated parameters are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(42, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(42, 3).random()).collect();
        assert_eq!(a, b);
        let x: u64 = trial_rng(42, 3).random();
        let y: u64 = trial_rng(42, 4).random();
        assert_ne!(x, y);
    }

    #[test]
    fn grids_respect_margins() {
        let iv = Interval::new(0.0, 10.0).unwrap();
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let g = random_grid(&mut rng, 6, &iv).unwrap();
            assert_eq!(g.len(), 6);
            for w in g.points().windows(2) {
                assert!(w[0] < w[1]);
            }
            assert!(g.points()[0] >= 1e-5 && g.max_point() <= 10.0 - 1e-5);
        }
        assert!(random_grid(&mut rng, 2, &Interval::positive()).is_err());
    }

    #[test]
    fn al_reps_are_positive() {
        let mut rng = trial_rng(9, 0);
        for _ in 0..50 {
            let g = random_al_rep(&mut rng);
            assert!(!g.is_trivial_rep());
            for x in [1e-3, 0.5, 3.0, 40.0] {
                assert!(g.evaluate(x).unwrap() > 0.0);
            }
        }
    }
}
