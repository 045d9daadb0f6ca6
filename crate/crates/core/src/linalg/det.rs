//! Determinant sign via symmetric-pivoted LDL^T (Bunch-Kaufman).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::eigen::eigenvalues;
use crate::linalg::matrix::SymMatrix;
use crate::linalg::psd::check_tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sign {
    Pos,
    Neg,
    Zero,
}

impl Sign {
    fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Pos
        } else if v < 0.0 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
            Sign::Zero => 0.0,
        }
    }
}

/// Sign and magnitude of a determinant.
///
/// `sign` is `Zero` when some pivot of the factorization (for a 2x2 pivot
/// block, its smaller eigenvalue magnitude) is at most `tolerance * scale`,
/// `scale` being the largest absolute entry. The determinant's sign is the
/// product of the pivot signs, so it is only resolved when every pivot is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetSign {
    pub sign: Sign,
    /// Sign of the computed product before the tolerance test.
    pub computed_sign: Sign,
    /// `ln |det|`; `-inf` for an exactly singular matrix.
    pub log_abs_det: f64,
    /// Smallest pivot magnitude divided by `scale`.
    pub min_relative_pivot: f64,
}

impl DetSign {
    /// `computed_sign * exp(log_abs_det)`.
    pub fn value(&self) -> f64 {
        self.computed_sign.as_f64() * self.log_abs_det.exp()
    }
}

const BK_ALPHA: f64 = 0.640_388_203_202_208; // (1 + sqrt(17)) / 8

pub fn det_sign(m: &SymMatrix, tolerance: f64) -> Result<DetSign> {
    check_tolerance(tolerance)?;
    m.check_finite()?;
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(DetSign {
            sign: Sign::Zero,
            computed_sign: Sign::Zero,
            log_abs_det: f64::NEG_INFINITY,
            min_relative_pivot: 0.0,
        });
    }
    let (computed_sign, log_abs_det, min_pivot) = match bunch_kaufman(m) {
        Some(f) => f,
        None => eigen_product(m)?,
    };
    let min_relative_pivot = min_pivot / scale;
    let sign = if min_relative_pivot <= tolerance {
        Sign::Zero
    } else {
        computed_sign
    };
    Ok(DetSign {
        sign,
        computed_sign,
        log_abs_det,
        min_relative_pivot,
    })
}

/// Fallback when the pivot search meets an all-zero column.
fn eigen_product(m: &SymMatrix) -> Result<(Sign, f64, f64)> {
    let ev = eigenvalues(m)?;
    let mut sign = Sign::Pos;
    let mut log_abs = 0.0;
    let mut min_abs = f64::INFINITY;
    for &l in &ev {
        sign = sign.times(Sign::of(l));
        log_abs += l.abs().ln();
        min_abs = min_abs.min(l.abs());
    }
    Ok((sign, log_abs, min_abs))
}

/// Returns `(sign, ln|det|, smallest pivot magnitude)`, or `None` on a zero pivot column.
fn bunch_kaufman(m: &SymMatrix) -> Option<(Sign, f64, f64)> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut sign = Sign::Pos;
    let mut log_abs = 0.0;
    let mut min_pivot = f64::INFINITY;
    let idx = |i: usize, j: usize| i * n + j;

    let mut k = 0;
    while k < n {
        let akk = a[idx(k, k)].abs();
        let (mut r, mut lambda) = (k, 0.0_f64);
        for i in (k + 1)..n {
            if a[idx(i, k)].abs() > lambda {
                lambda = a[idx(i, k)].abs();
                r = i;
            }
        }
        if akk == 0.0 && lambda == 0.0 {
            return None;
        }

        let two_by_two = if akk >= BK_ALPHA * lambda {
            false
        } else {
            let mut sigma = 0.0_f64;
            for j in k..n {
                if j != r {
                    sigma = sigma.max(a[idx(j, r)].abs());
                }
            }
            if akk * sigma >= BK_ALPHA * lambda * lambda {
                false
            } else if a[idx(r, r)].abs() >= BK_ALPHA * sigma {
                symmetric_swap(&mut a, n, k, r);
                false
            } else {
                symmetric_swap(&mut a, n, k + 1, r);
                true
            }
        };

        if !two_by_two {
            let d = a[idx(k, k)];
            sign = sign.times(Sign::of(d));
            log_abs += d.abs().ln();
            min_pivot = min_pivot.min(d.abs());
            for i in (k + 1)..n {
                let lik = a[idx(i, k)] / d;
                for j in (k + 1)..n {
                    a[idx(i, j)] -= lik * a[idx(k, j)];
                }
            }
            k += 1;
        } else {
            let p = a[idx(k, k)];
            let b = a[idx(k, k + 1)];
            let c = a[idx(k + 1, k + 1)];
            let det = p * c - b * b;
            let half_sum = 0.5 * (p + c);
            let radius = (0.25 * (p - c) * (p - c) + b * b).sqrt();
            let big = half_sum.abs() + radius;
            sign = sign.times(Sign::of(det));
            log_abs += det.abs().ln();
            min_pivot = min_pivot.min(det.abs() / big);
            for i in (k + 2)..n {
                let u = a[idx(i, k)];
                let w = a[idx(i, k + 1)];
                // [u w] E^{-1}
                let l0 = (u * c - w * b) / det;
                let l1 = (w * p - u * b) / det;
                for j in (k + 2)..n {
                    a[idx(i, j)] -= l0 * a[idx(k, j)] + l1 * a[idx(k + 1, j)];
                }
            }
            k += 2;
        }
    }
    Some((sign, log_abs, min_pivot))
}

fn symmetric_swap(a: &mut [f64], n: usize, p: usize, q: usize) {
    if p == q {
        return;
    }
    for j in 0..n {
        a.swap(p * n + j, q * n + j);
    }
    for i in 0..n {
        a.swap(i * n + p, i * n + q);
    }
}
