//! Counterexample search: a function is refuted at order `N` by a single
//! matrix that is certainly not PSD. Absence of a counterexample is
//! statistical evidence only.

use serde::{Deserialize, Serialize};

use crate::builders::{anti_loewner, loewner, Grid};
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, Interval};
use crate::linalg::{psd_verdict, SymMatrix};
use crate::lyapunov::matrix_function;

use super::sampling::{log_uniform, random_grid, sampling_interval, trial_rng};
use super::{check_order, TrialConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Property {
    AntiLoewnerOrderN,
    MatrixMonotoneOrderN,
    MatrixMonotoneDecreasingOrderN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Refuted,
    NoCounterexampleFound,
}

/// The matrix that refutes the property, with what is needed to rebuild it.
///
/// Grid-based searches store the grid; the direct probe stores the pair
/// `A <= B` and `matrix = f(B) - f(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    pub matrix: SymMatrix,
    pub min_eigenvalue: f64,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<SymMatrix>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<SymMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub property: Property,
    pub order: usize,
    pub outcome: Outcome,
    pub function: FunctionSpec,
    pub interval: Interval,
    pub tolerance: f64,
    pub trials_run: usize,
    pub marginal_skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl ClassificationReport {
    pub fn is_refuted(&self) -> bool {
        self.outcome == Outcome::Refuted
    }

    /// Rebuilds the witness matrix from the stored function and grid (or
    /// matrix pair) and confirms it is NOT_PSD. `Ok(false)` without a witness.
    pub fn reverify(&self) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(false);
        };
        let rebuilt = match (&w.grid, &w.a, &w.b) {
            (_, Some(a), Some(b)) => {
                matrix_function(b, &self.function)?.sub(&matrix_function(a, &self.function)?)?
            }
            (Some(grid), _, _) => self.build(grid)?,
            _ => return Err(Error::Precondition("witness has neither a grid nor a matrix pair".into())),
        };
        let stored = psd_verdict(&w.matrix, self.tolerance)?;
        let fresh = psd_verdict(&rebuilt, self.tolerance)?;
        Ok(!stored.is_psd() && !fresh.is_psd())
    }

    fn build(&self, grid: &Grid) -> Result<SymMatrix> {
        match self.property {
            Property::AntiLoewnerOrderN => anti_loewner(&self.function, grid),
            Property::MatrixMonotoneOrderN => loewner(&self.function, grid),
            Property::MatrixMonotoneDecreasingOrderN => Ok(loewner(&self.function, grid)?.scaled(-1.0)),
        }
    }
}

/// Stream reserved for the positivity pre-check.
const PRECHECK_STREAM: u64 = u64::MAX;
const PRECHECK_POINTS: usize = 64;

/// Searches for `N`-point grids whose anti-Löwner matrix is not PSD.
///
/// `g` is first sampled at single points: a non-positive value is itself a
/// `1 x 1` counterexample `[g(x) / x]`.
pub fn classify_anti_loewner(g: &FunctionSpec, order: usize, cfg: &TrialConfig) -> Result<ClassificationReport> {
    let mut report = start(Property::AntiLoewnerOrderN, g, order, cfg)?;
    if let Some(w) = scalar_precheck(&report.interval, cfg, |grid| anti_loewner(g, grid))? {
        report.outcome = Outcome::Refuted;
        report.witness = Some(w);
        return Ok(report);
    }
    search(report, cfg, |grid| anti_loewner(g, grid))
}

fn scalar_precheck(
    interval: &Interval,
    cfg: &TrialConfig,
    build: impl Fn(&Grid) -> Result<SymMatrix>,
) -> Result<Option<Witness>> {
    let mut rng = trial_rng(cfg.seed, PRECHECK_STREAM);
    let (a, b) = (interval.a(), interval.b());
    let margin = super::ENDPOINT_MARGIN * (b - a);
    for _ in 0..PRECHECK_POINTS {
        let x = log_uniform(&mut rng, a + margin, b - margin);
        let grid = Grid::new(vec![x], *interval)?;
        let m = build(&grid)?;
        let v = psd_verdict(&m, cfg.tolerance)?;
        if !v.is_psd() {
            return Ok(Some(Witness {
                grid: Some(grid),
                matrix: m,
                min_eigenvalue: v.min_eigenvalue,
                a: None,
                b: None,
            }));
        }
    }
    Ok(None)
}

/// Searches for `N`-point grids whose Löwner matrix `L_f` (or `-L_f` when
/// decreasing) is not PSD.
pub fn classify_matrix_monotone(
    f: &FunctionSpec,
    order: usize,
    direction: Direction,
    cfg: &TrialConfig,
) -> Result<ClassificationReport> {
    let (property, sign) = match direction {
        Direction::Increasing => (Property::MatrixMonotoneOrderN, 1.0),
        Direction::Decreasing => (Property::MatrixMonotoneDecreasingOrderN, -1.0),
    };
    let report = start(property, f, order, cfg)?;
    search(report, cfg, |grid| Ok(loewner(f, grid)?.scaled(sign)))
}

pub(crate) fn start(
    property: Property,
    f: &FunctionSpec,
    order: usize,
    cfg: &TrialConfig,
) -> Result<ClassificationReport> {
    cfg.validate()?;
    check_order(order)?;
    Ok(ClassificationReport {
        property,
        order,
        outcome: Outcome::NoCounterexampleFound,
        function: f.clone(),
        interval: sampling_interval(&cfg.interval, &f.domain())?,
        tolerance: cfg.tolerance,
        trials_run: 0,
        marginal_skipped: 0,
        witness: None,
        seed: cfg.seed,
    })
}

fn search(
    mut report: ClassificationReport,
    cfg: &TrialConfig,
    build: impl Fn(&Grid) -> Result<SymMatrix>,
) -> Result<ClassificationReport> {
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let grid = random_grid(&mut rng, report.order, &report.interval)?;
        let m = build(&grid)?;
        let v = psd_verdict(&m, cfg.tolerance)?;
        report.trials_run = t + 1;
        if !v.is_psd() {
            report.outcome = Outcome::Refuted;
            report.witness = Some(Witness {
                grid: Some(grid),
                matrix: m,
                min_eigenvalue: v.min_eigenvalue,
                a: None,
                b: None,
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
    use crate::functions::{sqrt_transform, SqrtDirection};

    fn cfg() -> TrialConfig {
        TrialConfig::with_seed(5).trials(200)
    }

    #[test]
    fn sqrt_is_anti_loewner_order_4() {
        let r = classify_anti_loewner(&FunctionSpec::power(0.5).unwrap(), 4, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::NoCounterexampleFound);
        assert_eq!(r.trials_run, 200);
        assert!(r.witness.is_none());
    }

    #[test]
    fn square_is_refuted_with_reverifiable_witness() {
        let r = classify_anti_loewner(&FunctionSpec::power(2.0).unwrap(), 2, &cfg()).unwrap();
        assert!(r.is_refuted());
        let w = r.witness.as_ref().unwrap();
        assert!(w.min_eigenvalue < -r.tolerance * w.matrix.scale());
        assert!(r.reverify().unwrap());
        let text = serde_json::to_string(&r).unwrap();
        let back: ClassificationReport = serde_json::from_str(&text).unwrap();
        assert!(back.reverify().unwrap());
    }

    #[test]
    fn known_witness_for_square() {
        // det [[1, 2.5], [2.5, 3]] = -3.25
        let grid = Grid::new(vec![1.0, 3.0], Interval::new(0.0, 10.0).unwrap()).unwrap();
        let m = anti_loewner(&FunctionSpec::power(2.0).unwrap(), &grid).unwrap();
        let d = crate::linalg::det_sign(&m, 1e-9).unwrap();
        assert!((d.value() + 3.25).abs() < 1e-12);
        assert!(!psd_verdict(&m, 1e-9).unwrap().is_psd());
    }

    #[test]
    fn constant_gives_cauchy_matrix() {
        let r = classify_anti_loewner(&FunctionSpec::constant(1.0).unwrap(), 3, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::NoCounterexampleFound);
    }

    #[test]
    fn scalar_precheck_catches_negative_values() {
        let iv = Interval::new(0.0, 10.0).unwrap();
        let w = scalar_precheck(&iv, &cfg(), |g| Ok(SymMatrix::from_fn(1, |_, _| -g.points()[0])))
            .unwrap()
            .unwrap();
        assert_eq!(w.matrix.dim(), 1);
        assert!(w.min_eigenvalue < 0.0);
        let zero = FunctionSpec::constant(0.0).unwrap();
        assert!(!classify_anti_loewner(&zero, 3, &cfg()).unwrap().is_refuted());
    }

    #[test]
    fn matrix_monotone_examples() {
        let c = cfg();
        let sqrt = FunctionSpec::power(0.5).unwrap();
        assert!(!classify_matrix_monotone(&sqrt, 4, Direction::Increasing, &c).unwrap().is_refuted());
        let recip = FunctionSpec::reciprocal();
        assert!(!classify_matrix_monotone(&recip, 3, Direction::Decreasing, &c).unwrap().is_refuted());
        let sq = FunctionSpec::power(2.0).unwrap();
        let r = classify_matrix_monotone(&sq, 2, Direction::Increasing, &c).unwrap();
        assert!(r.is_refuted());
        assert!(r.reverify().unwrap());
        // x^2 is increasing at order 1 on a positive interval
        assert!(!classify_matrix_monotone(&sq, 1, Direction::Increasing, &c).unwrap().is_refuted());
    }

    #[test]
    fn sqrt_transform_of_anti_loewner_is_monotone() {
        let c = cfg().interval(Interval::new(0.0, 100.0).unwrap());
        let h = sqrt_transform(&FunctionSpec::log1p(), SqrtDirection::TimesSqrt);
        assert!(!classify_matrix_monotone(&h, 3, Direction::Increasing, &c).unwrap().is_refuted());
    }

    #[test]
    fn rejects_bad_orders_and_unbounded_intervals() {
        let g = FunctionSpec::identity();
        assert!(classify_anti_loewner(&g, 0, &cfg()).is_err());
        let unbounded = cfg().interval(Interval::positive());
        assert!(classify_anti_loewner(&g, 2, &unbounded).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let g = FunctionSpec::power(3.0).unwrap();
        let a = classify_anti_loewner(&g, 3, &cfg()).unwrap();
        let b = classify_anti_loewner(&g, 3, &cfg()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
