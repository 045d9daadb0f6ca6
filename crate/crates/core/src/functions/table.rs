//! Monotone-safe piecewise cubic Hermite interpolation for tabulated functions.

use crate::error::{Error, Result};

pub const MIN_KNOTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TableSpec {
    /// Validates the table and precomputes clamped knot slopes.
    ///
    /// Errors carry a field path relative to the table document.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < MIN_KNOTS {
            return Err(Error::schema(
                "knots",
                format!("at least {MIN_KNOTS} knots required, found {}", knots.len()),
            ));
        }
        if values.len() != knots.len() {
            return Err(Error::schema(
                "values",
                format!("expected {} values, found {}", knots.len(), values.len()),
            ));
        }
        for (i, k) in knots.iter().enumerate() {
            if !k.is_finite() {
                return Err(Error::schema(format!("knots[{i}]"), "must be finite"));
            }
            if i > 0 && *k <= knots[i - 1] {
                return Err(Error::schema(
                    format!("knots[{i}]"),
                    "knots must be strictly increasing",
                ));
            }
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::schema(
                    format!("values[{i}]"),
                    "values must be positive and finite",
                ));
            }
        }
        let slopes = clamped_slopes(&knots, &values);
        Ok(TableSpec {
            knots,
            values,
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_knot(&self) -> f64 {
        self.knots[0]
    }

    pub fn last_knot(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    fn segment(&self, x: f64) -> Result<usize> {
        if !(x >= self.first_knot() && x <= self.last_knot()) {
            return Err(Error::OutsideDomain {
                x,
                a: self.first_knot(),
                b: self.last_knot(),
            });
        }
        let k = self.knots.partition_point(|&k| k <= x);
        Ok(k.saturating_sub(1).min(self.knots.len() - 2))
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let k = self.segment(x)?;
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.values[k]
            + h10 * h * self.slopes[k]
            + h01 * self.values[k + 1]
            + h11 * h * self.slopes[k + 1])
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let k = self.segment(x)?;
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        Ok((d00 * self.values[k] + d01 * self.values[k + 1]) / h
            + d10 * self.slopes[k]
            + d11 * self.slopes[k + 1])
    }
}

/// Three-point slope estimates, zeroed at local extrema and clamped to
/// `3 * min(|secant|)` so the interpolant does not overshoot the data.
fn clamped_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];

    for k in 1..n - 1 {
        let (d0, d1) = (d[k - 1], d[k]);
        if d0 * d1 <= 0.0 {
            m[k] = 0.0;
            continue;
        }
        let est = (h[k] * d0 + h[k - 1] * d1) / (h[k - 1] + h[k]);
        let cap = 3.0 * d0.abs().min(d1.abs());
        m[k] = est.signum() * est.abs().min(cap);
    }

    m[0] = end_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let est = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if est * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && est.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        est
    }
}
