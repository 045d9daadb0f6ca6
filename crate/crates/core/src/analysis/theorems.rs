use serde::{Deserialize, Serialize};

use crate::builders::{anti_loewner, default_epsilon, loewner, theorem2_blocks, Grid};
use crate::error::{Error, Result};
use crate::functions::{sqrt_transform, FunctionSpec, SqrtDirection};
use crate::linalg::{congruence, det_sign, psd_verdict, PsdStatus, PsdVerdict};

/// Relative tolerance of the `K + L` and `K - L` identities.
pub const THM1_TOL: f64 = 1e-11;
/// Relative tolerance of the continuity-proof determinant formula.
pub const CONTINUITY_DET_TOL: f64 = 1e-12;
/// Number of times epsilon is halved after a marginal comparison.
pub const THM2_MAX_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Thm2Agreement {
    Agree,
    Disagree,
    /// Verdicts differ but the PSD one is within tolerance of singular.
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm2Check {
    pub n: usize,
    pub epsilon: f64,
    pub retries: usize,
    pub k_prime: PsdVerdict,
    pub k_double_prime: PsdVerdict,
    pub agreement: Thm2Agreement,
}

/// Agreement of two verdicts whose matrices have the same inertia in exact
/// arithmetic. A difference only counts when the PSD side is resolved.
fn compare(p: &PsdVerdict, q: &PsdVerdict) -> Thm2Agreement {
    if p.status == q.status {
        return Thm2Agreement::Agree;
    }
    let psd_side = if p.status == PsdStatus::Psd { p } else { q };
    if psd_side.marginal {
        Thm2Agreement::Marginal
    } else {
        Thm2Agreement::Disagree
    }
}

/// Compares PSD verdicts of `K'` and `K''`. `epsilon` defaults to
/// `min(delta / 4, (b - max y) / 2)` and is halved on a marginal comparison.
///
/// `g` must be positive at all `2n` points.
pub fn verify_thm2(g: &FunctionSpec, grid: &Grid, epsilon: Option<f64>, tolerance: f64) -> Result<Thm2Check> {
    let mut eps = epsilon.unwrap_or_else(|| default_epsilon(grid));
    let mut retries = 0;
    loop {
        let blocks = theorem2_blocks(g, grid, eps)?;
        for &x in blocks.extended.points() {
            let v = g.evaluate(x)?;
            if v <= 0.0 {
                return Err(Error::Precondition(format!(
                    "the block comparison requires positive g; g({x}) = {v}"
                )));
            }
        }
        let vp = psd_verdict(&blocks.k_prime, tolerance)?;
        let vpp = psd_verdict(&blocks.k_double_prime, tolerance)?;
        let agreement = compare(&vp, &vpp);
        if agreement != Thm2Agreement::Marginal || retries == THM2_MAX_RETRIES {
            return Ok(Thm2Check {
                n: grid.len(),
                epsilon: eps,
                retries,
                k_prime: vp,
                k_double_prime: vpp,
                agreement,
            });
        }
        eps /= 2.0;
        retries += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm1Check {
    pub n: usize,
    /// `max |K + L - 2 L_h1(x^2)|`, relative to `max(|K|, |L|)`.
    pub sum_residual: f64,
    /// `max |K - L + 2 D L_h2(x^2) D|`, same normalization.
    pub difference_residual: f64,
    /// Derivative of `h1` at `x_i^2` against `(g'(x_i) x_i + g(x_i)) / (2 x_i)`.
    pub chain_rule_residual: f64,
    pub residual: f64,
    pub passed: bool,
}

/// `h1(x) = g(sqrt x) sqrt x` and `h2(x) = g(sqrt x) / sqrt x` at the squared points:
/// `K + L = 2 L_h1` and `K - L = -2 D L_h2 D` with `D = diag(x_i)`.
pub fn verify_thm1_identities(g: &FunctionSpec, grid: &Grid) -> Result<Thm1Check> {
    let k = anti_loewner(g, grid)?;
    let l = loewner(g, grid)?;
    let sq = grid.squared()?;
    let h1 = sqrt_transform(g, SqrtDirection::TimesSqrt);
    let h2 = sqrt_transform(g, SqrtDirection::OverSqrt);
    let rhs_sum = loewner(&h1, &sq)?.scaled(2.0);
    let rhs_diff = congruence(&loewner(&h2, &sq)?, grid.points())?.scaled(-2.0);
    let norm = k.max_abs().max(l.max_abs()).max(f64::MIN_POSITIVE);
    let sum_residual = k.add(&l)?.max_abs_diff(&rhs_sum)? / norm;
    let difference_residual = k.sub(&l)?.max_abs_diff(&rhs_diff)? / norm;
    let mut chain = 0.0_f64;
    for &x in grid.points() {
        let expected = (g.derivative(x)? * x + g.evaluate(x)?) / (2.0 * x);
        chain = chain.max((h1.derivative(x * x)? - expected).abs());
    }
    // K + L has entries of size up to 2 * norm; its diagonal is 4 h1'(x^2).
    let chain_rule_residual = 4.0 * chain / norm;
    let residual = sum_residual.max(difference_residual).max(chain_rule_residual);
    Ok(Thm1Check {
        n: grid.len(),
        sum_residual,
        difference_residual,
        chain_rule_residual,
        residual,
        passed: residual <= THM1_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCheck {
    pub x: f64,
    pub epsilon: f64,
    /// `|g(x + eps) - g(x)| / eps`.
    pub quotient: f64,
    /// `g(x) / x`.
    pub bound: f64,
    pub verdict: PsdVerdict,
    pub det_built: f64,
    pub det_formula: f64,
    /// `|det_built - det_formula| / max(|t1|, |t2|)` for the two terms of the formula.
    pub det_residual: f64,
    /// `None` when the matrix is not PSD or marginal, so the bound is not implied.
    pub bound_holds: Option<bool>,
    pub passed: bool,
}

/// For each `eps`: the `2 x 2` anti-Löwner matrix at `{x, x + eps}`, its
/// determinant against `g(x) g(x+eps) / (x (x+eps)) - (g(x) + g(x+eps))^2 / (2x + eps)^2`,
/// and, when it is PSD, the quotient bound `|g(x+eps) - g(x)| / eps <= g(x) / x`.
pub fn verify_continuity_bound(
    g: &FunctionSpec,
    x: f64,
    epsilons: &[f64],
    tolerance: f64,
) -> Result<Vec<ContinuityCheck>> {
    let g1 = g.evaluate(x)?;
    let bound = g1 / x;
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::Precondition(format!("epsilon must be positive, got {eps}")));
            }
            let grid = Grid::new(vec![x, x + eps], g.domain())?;
            let g2 = g.evaluate(x + eps)?;
            let m = anti_loewner(g, &grid)?;
            let verdict = psd_verdict(&m, tolerance)?;
            let det_built = det_sign(&m, tolerance)?.value();
            let t1 = g1 * g2 / (x * (x + eps));
            let t2 = (g1 + g2) * (g1 + g2) / ((2.0 * x + eps) * (2.0 * x + eps));
            let det_formula = t1 - t2;
            let det_residual = (det_built - det_formula).abs() / t1.abs().max(t2.abs()).max(f64::MIN_POSITIVE);
            let quotient = (g2 - g1).abs() / eps;
            let bound_holds = (verdict.is_psd() && !verdict.marginal).then(|| {
                // rounding in the difference quotient is of order eps_mach * |g| / eps
                let slack = tolerance * bound + 4.0 * f64::EPSILON * (g1.abs() + g2.abs()) / eps;
                quotient <= bound + slack
            });
            Ok(ContinuityCheck {
                x,
                epsilon: eps,
                quotient,
                bound,
                verdict,
                det_built,
                det_formula,
                det_residual,
                passed: det_residual <= CONTINUITY_DET_TOL && bound_holds != Some(false),
                bound_holds,
            })
        })
        .collect()
}
