//! Numerical verification of the positivity results and randomized
//! counterexample search for classifying functions by order.
//!
//! Every trial draws its randomness from `(seed, trial index)` alone, so a
//! report depends only on its inputs and never on execution order.

mod catalog;
mod classify;
mod probe;
mod prop1;
mod sampling;
mod suites;
mod theorems;

pub use catalog::{anti_loewner_catalog, full_catalog, non_anti_loewner_catalog, sqrt_table};
pub use classify::{
    classify_anti_loewner, classify_matrix_monotone, ClassificationReport, Direction, Outcome,
    Property, Witness,
};
pub use probe::direct_monotonicity_probe;
pub use prop1::{
    sign_vectors, verify_prop1, verify_prop1_factorization, FactorizationCheck, Prop1Check,
    SignCounts, SignSearch, DET_IDENTITY_TOL, EQ3_TOL, Y_INVARIANCE_TOL,
};
pub use sampling::{
    log_uniform, random_al_rep, random_grid, random_positive_values, sampling_interval, trial_rng,
    ENDPOINT_MARGIN,
};
pub use suites::{
    battery, continuity_suite, prop1_factorization_suite, prop1_suite, thm1_suite, thm2_suite,
    Battery, InstanceRecord, RecordStatus, Suite, SuiteOutcome, VerificationReport,
};
pub use theorems::{
    verify_continuity_bound, verify_thm1_identities, verify_thm2, ContinuityCheck, Thm1Check,
    Thm2Agreement, Thm2Check, THM1_TOL, THM2_MAX_RETRIES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::Interval;
use crate::linalg::{check_tolerance, DEFAULT_TOLERANCE};

/// Largest size for which all `2^N` sign vectors are enumerated.
pub const EXHAUSTIVE_SIGN_CAP: usize = 12;
/// Largest order accepted by the search routines.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    /// Cap on exhaustive sign enumeration; at most [`EXHAUSTIVE_SIGN_CAP`].
    pub max_order: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Sampling interval; must be bounded.
    pub interval: Interval,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 200,
            max_order: EXHAUSTIVE_SIGN_CAP,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            interval: Interval::new(0.0, 10.0).expect("valid interval"),
        }
    }
}

impl TrialConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrialConfig {
            seed,
            ..TrialConfig::default()
        }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn interval(mut self, interval: Interval) -> Self {
        self.interval = interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if !(2..=EXHAUSTIVE_SIGN_CAP).contains(&self.max_order) {
            return Err(Error::Precondition(format!(
                "max_order must be in 2..={EXHAUSTIVE_SIGN_CAP}, got {}",
                self.max_order
            )));
        }
        check_tolerance(self.tolerance)?;
        if !self.interval.is_bounded() {
            return Err(Error::Precondition(format!(
                "sampling interval {} must be bounded",
                self.interval
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Precondition(format!(
            "order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(())
}
