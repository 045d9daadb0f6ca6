//! Matrix families built from a function and a grid of sample points.
//!
//! * Löwner matrix `L_f = ((f(x_i) - f(x_j)) / (x_i - x_j))`, diagonal `f'(x_i)`.
//! * anti-Löwner matrix `K_g = ((g(x_i) + g(x_j)) / (x_i + x_j))`.
//! * signed matrix `Z = ((s_i g_i + s_j g_j) / (s_i x_i + s_j x_j))`, `s_i = ±1`.
//! * the `2n x 2n` pair `K'`, `K''` on the shifted grid `(y, y + eps)`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, Interval};
use crate::linalg::SymMatrix;

/// Points closer than this times their own magnitude are rejected as coincident.
pub const COINCIDENCE_REL_TOL: f64 = 1e-10;

/// Distinct sample points strictly inside an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct Grid {
    points: Vec<f64>,
    interval: Interval,
    min_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub points: Vec<f64>,
    pub interval: Interval,
}

impl TryFrom<GridFile> for Grid {
    type Error = Error;
    fn try_from(f: GridFile) -> Result<Grid> {
        Grid::new(f.points, f.interval)
    }
}

impl From<Grid> for GridFile {
    fn from(g: Grid) -> GridFile {
        GridFile {
            points: g.points,
            interval: g.interval,
        }
    }
}

impl Grid {
    pub fn new(points: Vec<f64>, interval: Interval) -> Result<Grid> {
        if points.is_empty() {
            return Err(Error::Empty("grid has no points".into()));
        }
        for (i, &x) in points.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("points[{i}]"),
                });
            }
            if !interval.contains(x) {
                return Err(Error::Construction(format!(
                    "points[{i}] = {x} is not strictly inside {interval}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
        for w in order.windows(2) {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            let gap = points[w[1]] - points[w[0]];
            let scale = points[i].abs().max(points[j].abs());
            if gap <= COINCIDENCE_REL_TOL * scale {
                return Err(Error::Construction(format!(
                    "points[{i}] = {} and points[{j}] = {} are numerically coincident (gap {gap:e})",
                    points[i], points[j]
                )));
            }
        }
        let (min_gap, _) = min_gap(&points);
        Ok(Grid {
            points,
            interval,
            min_gap,
        })
    }

    /// Grid on `(0, inf)`.
    pub fn positive(points: Vec<f64>) -> Result<Grid> {
        Grid::new(points, Interval::positive())
    }

    /// `{"points": [...], "interval": [a, b | "inf"]}`; `interval` falls back to `default`.
    pub fn from_json_str(text: &str, default: Interval) -> Result<Grid> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema("$", "expected an object"))?;
        let points = obj
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::schema("points", "expected an array of numbers"))?
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.as_f64()
                    .ok_or_else(|| Error::schema(format!("points[{i}]"), "expected a number"))
            })
            .collect::<Result<Vec<_>>>()?;
        let interval = match obj.get("interval") {
            Some(iv) => crate::functions::parse_interval(iv, "interval")?,
            None => default,
        };
        Grid::new(points, interval)
    }

    /// One point per line (commas also separate); blank lines and `#` comments skipped.
    pub fn from_csv_str(text: &str, interval: Interval) -> Result<Grid> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for field in line.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                let x = field.parse::<f64>().map_err(|_| {
                    Error::schema(format!("line {}", lineno + 1), format!("cannot parse \"{field}\" as a number"))
                })?;
                points.push(x);
            }
        }
        Grid::new(points, interval)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// `min_{i != j} |x_i - x_j|`; infinite for a single point.
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn max_point(&self) -> f64 {
        self.points.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Points `x_i^2` on `(a^2, b^2)`.
    pub fn squared(&self) -> Result<Grid> {
        Grid::new(
            self.points.iter().map(|x| x * x).collect(),
            self.interval.squared(),
        )
    }
}

fn min_gap(points: &[f64]) -> (f64, Option<(usize, usize)>) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
    let mut best = f64::INFINITY;
    let mut pair = None;
    for w in order.windows(2) {
        let gap = points[w[1]] - points[w[0]];
        if gap < best {
            best = gap;
            pair = Some((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    (best, pair)
}

/// A vector of signs `s_i = ±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<SignVector> {
        if let Some(i) = signs.iter().position(|s| *s != 1 && *s != -1) {
            return Err(Error::schema(format!("signs[{i}]"), "must be +1 or -1"));
        }
        Ok(SignVector(signs))
    }

    pub fn all_plus(n: usize) -> SignVector {
        SignVector(vec![1; n])
    }

    /// Bit `i` of `mask` set means `s_i = -1`.
    pub fn from_mask(n: usize, mask: u64) -> SignVector {
        SignVector((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// Parses `+,-,+` (also `+1,-1` and `1,-1`).
    pub fn parse(text: &str) -> Result<SignVector> {
        let signs = text
            .split(',')
            .map(str::trim)
            .enumerate()
            .map(|(i, f)| match f {
                "+" | "+1" | "1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(Error::schema(format!("signs[{i}]"), format!("cannot parse \"{other}\" as a sign"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignVector::new(signs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|s| -s).collect())
    }

    pub fn with_flipped(&self, i: usize) -> SignVector {
        let mut v = self.0.clone();
        v[i] = -v[i];
        SignVector(v)
    }
}

/// `(g_i + g_j) / (x_i + x_j)`, shared by every anti-Löwner construction path.
#[inline]
pub fn divided_sum(gi: f64, gj: f64, xi: f64, xj: f64) -> f64 {
    (gi + gj) / (xi + xj)
}

fn values(f: &FunctionSpec, grid: &Grid) -> Result<Vec<f64>> {
    grid.points().iter().map(|&x| f.evaluate(x)).collect()
}

/// Löwner matrix of divided differences with derivative diagonal.
pub fn loewner(f: &FunctionSpec, grid: &Grid) -> Result<SymMatrix> {
    let x = grid.points();
    let fx = values(f, grid)?;
    let diag = x
        .iter()
        .map(|&xi| {
            f.derivative(xi)
                .map_err(|e| Error::Construction(format!("derivative unavailable at {xi}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymMatrix::from_fn(x.len(), |i, j| {
        if i == j {
            diag[i]
        } else {
            (fx[i] - fx[j]) / (x[i] - x[j])
        }
    }))
}

/// anti-Löwner matrix of divided sums; the diagonal is `g(x_i) / x_i`.
pub fn anti_loewner(g: &FunctionSpec, grid: &Grid) -> Result<SymMatrix> {
    check_positive(grid)?;
    let gx = values(g, grid)?;
    Ok(anti_loewner_from_values(&gx, grid.points()))
}

pub(crate) fn anti_loewner_from_values(g: &[f64], x: &[f64]) -> SymMatrix {
    SymMatrix::from_fn(x.len(), |i, j| divided_sum(g[i], g[j], x[i], x[j]))
}

fn check_positive(grid: &Grid) -> Result<()> {
    match grid.points().iter().position(|&x| x <= 0.0) {
        None => Ok(()),
        Some(i) => Err(Error::Construction(format!(
            "points[{i}] = {} must be positive",
            grid.points()[i]
        ))),
    }
}

/// Signed matrix `Z` from function values `g_i` at the grid points.
pub fn signed_matrix_from_values(g: &[f64], grid: &Grid, s: &SignVector) -> Result<SymMatrix> {
    if g.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: g.len(),
        });
    }
    if s.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: s.len(),
        });
    }
    check_positive(grid)?;
    let x = grid.points();
    let sg: Vec<f64> = (0..g.len()).map(|i| s.get(i) * g[i]).collect();
    let sx: Vec<f64> = (0..x.len()).map(|i| s.get(i) * x[i]).collect();
    for i in 0..x.len() {
        for j in i..x.len() {
            if sx[i] + sx[j] == 0.0 {
                return Err(Error::Precondition(format!(
                    "s_{i} x_{i} + s_{j} x_{j} vanishes (duplicate points)"
                )));
            }
        }
    }
    Ok(SymMatrix::from_fn(x.len(), |i, j| {
        divided_sum(sg[i], sg[j], sx[i], sx[j])
    }))
}

pub fn signed_matrix(g: &FunctionSpec, grid: &Grid, s: &SignVector) -> Result<SymMatrix> {
    let gx = values(g, grid)?;
    signed_matrix_from_values(&gx, grid, s)
}

/// `K'` (all signs +1) and `K''` (+1 on the first half, -1 on the shifted half)
/// on the `2n` points `(y_1, ..., y_n, y_1 + eps, ..., y_n + eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Blocks {
    pub epsilon: f64,
    pub extended: Grid,
    pub k_prime: SymMatrix,
    pub k_double_prime: SymMatrix,
}

/// `min(delta / 4, (b - max point) / 2)`, `delta` the grid's minimum gap.
pub fn default_epsilon(grid: &Grid) -> f64 {
    let room = (grid.interval().b() - grid.max_point()) / 2.0;
    (grid.min_gap() / 4.0).min(room)
}

pub fn check_epsilon(grid: &Grid, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if grid.len() > 1 && epsilon >= grid.min_gap() / 2.0 {
        let (_, pair) = min_gap(grid.points());
        let (i, j) = pair.expect("grid with two or more points has a closest pair");
        return Err(Error::Precondition(format!(
            "epsilon {epsilon} must be below half the gap between points[{i}] = {} and points[{j}] = {}",
            grid.points()[i],
            grid.points()[j]
        )));
    }
    if grid.max_point() + epsilon >= grid.interval().b() {
        return Err(Error::Precondition(format!(
            "shifted point {} + {epsilon} leaves the interval {}",
            grid.max_point(),
            grid.interval()
        )));
    }
    Ok(())
}

pub fn theorem2_blocks(g: &FunctionSpec, grid: &Grid, epsilon: f64) -> Result<Theorem2Blocks> {
    check_epsilon(grid, epsilon)?;
    let n = grid.len();
    let mut pts = grid.points().to_vec();
    pts.extend(grid.points().iter().map(|y| y + epsilon));
    let extended = Grid::new(pts, grid.interval())?;
    let gx = values(g, &extended)?;
    let k_prime = signed_matrix_from_values(&gx, &extended, &SignVector::all_plus(2 * n))?;
    let mixed = SignVector((0..2 * n).map(|i| if i < n { 1 } else { -1 }).collect());
    let k_double_prime = signed_matrix_from_values(&gx, &extended, &mixed)?;
    Ok(Theorem2Blocks {
        epsilon,
        extended,
        k_prime,
        k_double_prime,
    })
}

/// Gram matrix `(t + x_i x_j)` of the vectors `(sqrt t, x_i)`.
pub fn gram_rank2(grid: &Grid, t: f64) -> Result<SymMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be finite and >= 0, got {t}")));
    }
    check_positive(grid)?;
    let x = grid.points();
    Ok(SymMatrix::from_fn(x.len(), |i, j| t + x[i] * x[j]))
}
