use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::eigenvalues;
use crate::linalg::matrix::SymMatrix;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PsdStatus {
    Psd,
    NotPsd,
}

/// Tolerance-qualified positive semidefiniteness classification.
///
/// The threshold is `tolerance * scale` with `scale = max(1, max |m_ij|)`.
/// `Psd` means `min_eigenvalue >= -threshold`, so numerically zero
/// eigenvalues are allowed. A verdict is *marginal* when
/// `|min_eigenvalue| <= threshold`: the sign of the smallest eigenvalue is
/// not resolved and sign-based comparisons must not rely on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub status: PsdStatus,
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub marginal: bool,
}

impl PsdVerdict {
    pub fn from_min_eigenvalue(min_eigenvalue: f64, scale: f64, tolerance: f64) -> Self {
        let threshold = tolerance * scale;
        let status = if min_eigenvalue >= -threshold {
            PsdStatus::Psd
        } else {
            PsdStatus::NotPsd
        };
        PsdVerdict {
            status,
            min_eigenvalue,
            scale,
            tolerance,
            marginal: min_eigenvalue.abs() <= threshold,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.tolerance * self.scale
    }

    pub fn is_psd(&self) -> bool {
        self.status == PsdStatus::Psd
    }

    /// Strict margin: `min_eigenvalue > +threshold`.
    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > self.threshold()
    }
}

pub(crate) fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "tolerance must be positive and finite, got {tolerance}"
        )))
    }
}

pub fn psd_verdict(m: &SymMatrix, tolerance: f64) -> Result<PsdVerdict> {
    check_tolerance(tolerance)?;
    let ev = eigenvalues(m)?;
    Ok(PsdVerdict::from_min_eigenvalue(ev[0], m.scale(), tolerance))
}
