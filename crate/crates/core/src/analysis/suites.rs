//! Randomized suites aggregating the single-instance checks into reports.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::builders::{default_epsilon, SignVector};
use crate::error::{Error, Result};
use crate::functions::{sqrt_transform, FunctionSpec, SqrtDirection};

use super::catalog::{anti_loewner_catalog, full_catalog, non_anti_loewner_catalog};
use super::classify::{classify_anti_loewner, classify_matrix_monotone, ClassificationReport, Direction};
use super::probe::direct_monotonicity_probe;
use super::prop1::{sign_vectors, verify_prop1, verify_prop1_factorization, SignSearch};
use super::sampling::{log_uniform, random_grid, random_positive_values, sampling_interval, trial_rng, ENDPOINT_MARGIN};
use super::theorems::{verify_continuity_bound, verify_thm1_identities, verify_thm2, Thm2Agreement};
use super::TrialConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    Prop1,
    Prop1Factorization,
    Thm1,
    Thm2,
    Continuity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuiteOutcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RecordStatus {
    Pass,
    Fail,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    pub n: usize,
    pub status: RecordStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    /// Instance size, or the largest size drawn.
    pub order: usize,
    pub outcome: SuiteOutcome,
    pub trials_run: usize,
    pub marginal_skipped: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_max: Option<f64>,
    /// Named maxima of secondary residuals.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maxima: BTreeMap<String, f64>,
    pub seed: u64,
    pub tolerance: f64,
    pub records: Vec<InstanceRecord>,
}

impl VerificationReport {
    fn new(suite: Suite, order: usize, cfg: &TrialConfig) -> Self {
        VerificationReport {
            suite,
            order,
            outcome: SuiteOutcome::Pass,
            trials_run: 0,
            marginal_skipped: 0,
            failures: 0,
            residual_max: None,
            maxima: BTreeMap::new(),
            seed: cfg.seed,
            tolerance: cfg.tolerance,
            records: Vec::new(),
        }
    }

    fn push(&mut self, record: InstanceRecord) {
        self.trials_run += 1;
        match record.status {
            RecordStatus::Fail => {
                self.failures += 1;
                self.outcome = SuiteOutcome::Fail;
            }
            RecordStatus::Marginal => self.marginal_skipped += 1,
            RecordStatus::Pass => {}
        }
        self.records.push(record);
    }

    fn track(&mut self, name: &str, value: f64) {
        let e = self.maxima.entry(name.to_string()).or_insert(0.0);
        *e = e.max(value);
    }

    fn track_residual(&mut self, value: f64) {
        self.residual_max = Some(self.residual_max.unwrap_or(0.0).max(value));
    }

    pub fn passed(&self) -> bool {
        self.outcome == SuiteOutcome::Pass
    }

    /// `marginal_skipped / trials_run`.
    pub fn marginal_rate(&self) -> f64 {
        if self.trials_run == 0 {
            0.0
        } else {
            self.marginal_skipped as f64 / self.trials_run as f64
        }
    }
}

fn stream(function: usize, trial: usize) -> u64 {
    ((function as u64) << 32) | trial as u64
}

fn status(pass: bool, marginal: bool) -> RecordStatus {
    match (pass, marginal) {
        (false, _) => RecordStatus::Fail,
        (true, true) => RecordStatus::Marginal,
        (true, false) => RecordStatus::Pass,
    }
}

/// Random positive `(g, x)` instances of size `n`; every tested sign vector
/// must give the same determinant sign.
pub fn prop1_suite(n: usize, cfg: &TrialConfig, search: SignSearch) -> Result<VerificationReport> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    if search == SignSearch::Exhaustive && n > cfg.max_order {
        return Err(Error::Precondition(format!(
            "N = {n} exceeds the exhaustive enumeration cap {}; use sampled sign vectors",
            cfg.max_order
        )));
    }
    let mut report = VerificationReport::new(Suite::Prop1, n, cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let grid = random_grid(&mut rng, n, &cfg.interval)?;
        let g = random_positive_values(&mut rng, n);
        let signs = sign_vectors(n, search, &mut rng)?;
        let c = verify_prop1(&g, &grid, &signs, cfg.tolerance)?;
        let detail = (!c.passed() || c.marginal)
            .then(|| format!("pos={} neg={} zero={}", c.counts.pos, c.counts.neg, c.counts.zero));
        report.push(InstanceRecord {
            index: t,
            function: None,
            n,
            status: status(c.passed(), c.marginal),
            metric: Some(c.counts.zero as f64),
            detail,
        });
    }
    let rate = report.marginal_rate();
    report.track("marginal_rate", rate);
    Ok(report)
}

/// Partial-elimination checks on random instances with `2 <= N <= max_n`
/// and random signs.
pub fn prop1_factorization_suite(max_n: usize, cfg: &TrialConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    if max_n < 2 {
        return Err(Error::Precondition("factorization suite needs N >= 2".into()));
    }
    let mut report = VerificationReport::new(Suite::Prop1Factorization, max_n, cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let n = rng.random_range(2..=max_n);
        let grid = random_grid(&mut rng, n, &cfg.interval)?;
        let g = random_positive_values(&mut rng, n);
        let s = SignVector::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())?;
        let c = verify_prop1_factorization(&g, &grid, &s, cfg.tolerance)?;
        report.track("first_column", c.first_column_residual);
        report.track("eq3", c.eq3_residual);
        report.track("y_invariance", c.y_invariance_residual);
        if !c.det_marginal {
            report.track("det_identity", c.det_identity_residual);
        }
        report.track_residual(c.eq3_residual);
        report.push(InstanceRecord {
            index: t,
            function: None,
            n,
            status: status(c.passed, c.det_marginal),
            metric: Some(c.eq3_residual),
            detail: None,
        });
    }
    Ok(report)
}

/// Sum and difference identities for every function on `trials` grids of size `1..=max_n`.
pub fn thm1_suite(functions: &[FunctionSpec], max_n: usize, cfg: &TrialConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    check_max_n(max_n)?;
    let mut report = VerificationReport::new(Suite::Thm1, max_n, cfg);
    for (fi, f) in functions.iter().enumerate() {
        let iv = sampling_interval(&cfg.interval, &f.domain())?;
        for t in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, stream(fi, t));
            let n = rng.random_range(1..=max_n);
            let grid = random_grid(&mut rng, n, &iv)?;
            let c = verify_thm1_identities(f, &grid)?;
            report.track("sum", c.sum_residual);
            report.track("difference", c.difference_residual);
            report.track("chain_rule", c.chain_rule_residual);
            report.track_residual(c.residual);
            report.push(InstanceRecord {
                index: report.records.len(),
                function: Some(f.label()),
                n,
                status: status(c.passed, false),
                metric: Some(c.residual),
                detail: None,
            });
        }
    }
    Ok(report)
}

/// `K'` versus `K''` verdicts on random `(grid, eps)`; `eps` is the default
/// epsilon times a log-uniform factor in `[0.1, 1]`.
pub fn thm2_suite(functions: &[FunctionSpec], max_n: usize, cfg: &TrialConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    check_max_n(max_n)?;
    let mut report = VerificationReport::new(Suite::Thm2, max_n, cfg);
    for (fi, f) in functions.iter().enumerate() {
        let iv = sampling_interval(&cfg.interval, &f.domain())?;
        for t in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, stream(fi, t));
            let n = rng.random_range(1..=max_n);
            let grid = random_grid(&mut rng, n, &iv)?;
            let eps = default_epsilon(&grid) * log_uniform(&mut rng, 0.1, 1.0);
            let c = verify_thm2(f, &grid, Some(eps), cfg.tolerance)?;
            let st = match c.agreement {
                Thm2Agreement::Agree => RecordStatus::Pass,
                Thm2Agreement::Disagree => RecordStatus::Fail,
                Thm2Agreement::Marginal => RecordStatus::Marginal,
            };
            let detail = (st != RecordStatus::Pass).then(|| {
                format!(
                    "K' min eig {:e}, K'' min eig {:e}, eps {:e}",
                    c.k_prime.min_eigenvalue, c.k_double_prime.min_eigenvalue, c.epsilon
                )
            });
            report.push(InstanceRecord {
                index: report.records.len(),
                function: Some(f.label()),
                n,
                status: st,
                metric: Some(c.k_prime.min_eigenvalue / c.k_prime.scale),
                detail,
            });
        }
    }
    Ok(report)
}

/// Continuity bound on random `(x, eps)` with `eps` log-uniform in
/// `[1e-3 x, min(x, (b - x) / 2)]`.
pub fn continuity_suite(functions: &[FunctionSpec], cfg: &TrialConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = VerificationReport::new(Suite::Continuity, 2, cfg);
    for (fi, f) in functions.iter().enumerate() {
        let iv = sampling_interval(&cfg.interval, &f.domain())?;
        let (a, b) = (iv.a(), iv.b());
        let m = ENDPOINT_MARGIN * (b - a);
        for t in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, stream(fi, t));
            let x = log_uniform(&mut rng, a + m, b - 2.0 * m);
            let hi = x.min((b - x) / 2.0);
            let eps = log_uniform(&mut rng, (1e-3 * x).min(hi), hi);
            let c = verify_continuity_bound(f, x, &[eps], cfg.tolerance)?.remove(0);
            report.track_residual(c.det_residual);
            let marginal = c.verdict.is_psd() && c.bound_holds.is_none();
            report.push(InstanceRecord {
                index: report.records.len(),
                function: Some(f.label()),
                n: 2,
                status: status(c.passed, marginal),
                metric: Some(c.quotient / c.bound),
                detail: (!c.passed).then(|| format!("x {} eps {:e}", c.x, c.epsilon)),
            });
        }
    }
    Ok(report)
}

fn check_max_n(max_n: usize) -> Result<()> {
    if max_n == 0 || max_n > super::MAX_ORDER {
        return Err(Error::Precondition(format!(
            "grid size must be in 1..={}, got {max_n}",
            super::MAX_ORDER
        )));
    }
    Ok(())
}

/// Output of [`battery`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub seed: u64,
    pub verification: Vec<VerificationReport>,
    pub classification: Vec<ClassificationReport>,
}

impl Battery {
    pub fn passed(&self) -> bool {
        self.verification.iter().all(VerificationReport::passed)
    }
}

/// Every suite plus a few classifications at modest trial counts.
pub fn battery(seed: u64) -> Result<Battery> {
    let cfg = TrialConfig::with_seed(seed);
    let anti = anti_loewner_catalog(seed, 3);
    let mut thm2_fns = anti.clone();
    thm2_fns.extend(non_anti_loewner_catalog());
    let verification = vec![
        prop1_suite(5, &cfg.trials(50), SignSearch::Exhaustive)?,
        prop1_factorization_suite(6, &cfg.trials(50))?,
        thm1_suite(&full_catalog(seed), 6, &cfg.trials(20))?,
        thm2_suite(&thm2_fns, 4, &cfg.trials(40))?,
        continuity_suite(&anti, &cfg.trials(50))?,
    ];
    let c = cfg.trials(100);
    let squared = cfg.trials(100).interval(cfg.interval.squared());
    let sqrt = FunctionSpec::power(0.5)?;
    let square = FunctionSpec::power(2.0)?;
    let classification = vec![
        classify_anti_loewner(&sqrt, 4, &c)?,
        classify_anti_loewner(&square, 2, &c)?,
        classify_matrix_monotone(&sqrt_transform(&FunctionSpec::log1p(), SqrtDirection::TimesSqrt), 3, Direction::Increasing, &squared)?,
        classify_matrix_monotone(&sqrt_transform(&FunctionSpec::log1p(), SqrtDirection::OverSqrt), 3, Direction::Decreasing, &squared)?,
        classify_matrix_monotone(&FunctionSpec::reciprocal(), 3, Direction::Decreasing, &c)?,
        direct_monotonicity_probe(&square, 2, &cfg.trials(50))?,
        direct_monotonicity_probe(&sqrt, 3, &cfg.trials(50))?,
    ];
    Ok(Battery {
        seed,
        verification,
        classification,
    })
}
