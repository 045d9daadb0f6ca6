//! Declarative scalar functions with exact first derivatives.
//!
//! Besides the elementary catalog this covers both integral representations
//! with finite atomic measures `mu = sum_k w_k delta_{t_k}`:
//!
//! ```text
//! om_rep:  f(x) = alpha + beta x + sum_k w_k x / (t_k + x)
//! al_rep:  g(x) = alpha / x + beta x + sum_k w_k x / (t_k + x^2)
//! ```

mod schema;
mod table;

pub use schema::{interval_to_json, parse_bound, parse_interval, parse_spec};
pub use table::{TableSpec, MIN_KNOTS};

use std::fmt;

use crate::error::{Error, Result};

/// Open interval `(a, b)` with `0 <= a < b`; `b` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::schema("domain", "a >= 0 violated"));
        }
        if b.is_nan() || b <= a {
            return Err(Error::schema("domain", "a < b violated"));
        }
        Ok(Interval { a, b })
    }

    /// `(0, +inf)`.
    pub const fn positive() -> Self {
        Interval {
            a: 0.0,
            b: f64::INFINITY,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_bounded(&self) -> bool {
        self.b.is_finite()
    }

    /// Open-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.a >= self.a && other.b <= self.b
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        Interval::new(self.a.max(other.a), self.b.min(other.b))
    }

    /// `(a^2, b^2)`.
    pub fn squared(&self) -> Interval {
        Interval {
            a: self.a * self.a,
            b: self.b * self.b,
        }
    }

    /// `(sqrt a, sqrt b)`.
    pub fn sqrt(&self) -> Interval {
        Interval {
            a: self.a.sqrt(),
            b: self.b.sqrt(),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// A point mass `w * delta_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub t: f64,
    pub w: f64,
}

/// `(alpha, beta, mu)` of an integral representation, `mu` finite atomic.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRep {
    alpha: f64,
    beta: f64,
    atoms: Vec<Atom>,
}

impl IntegralRep {
    pub fn new(alpha: f64, beta: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::schema("alpha", "must be finite and >= 0"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::schema("beta", "must be finite and >= 0"));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !(atom.t.is_finite() && atom.t >= 0.0) {
                return Err(Error::schema(format!("atoms[{i}][0]"), "t must be finite and >= 0"));
            }
            if !(atom.w.is_finite() && atom.w > 0.0) {
                return Err(Error::schema(format!("atoms[{i}][1]"), "weight must be finite and > 0"));
            }
        }
        Ok(IntegralRep { alpha, beta, atoms })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Multiplies `alpha`, `beta` and every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        IntegralRep::new(
            c * self.alpha,
            c * self.beta,
            self.atoms.iter().map(|a| Atom { t: a.t, w: c * a.w }).collect(),
        )
    }

    fn is_zero(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0 && self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqrtDirection {
    /// `h(x) = g(sqrt x) * sqrt x`
    TimesSqrt,
    /// `h(x) = g(sqrt x) / sqrt x`
    OverSqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Identity,
    Power(f64),
    Reciprocal,
    Log1p,
    Constant(f64),
    OmRep(IntegralRep),
    AlRep(IntegralRep),
    Table(TableSpec),
    Sum(Vec<(f64, FunctionSpec)>),
    SqrtTransform {
        inner: Box<FunctionSpec>,
        direction: SqrtDirection,
    },
    /// `1 / g(x)`.
    Inverse(Box<FunctionSpec>),
}

/// A scalar function together with its open domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    domain: Interval,
}

impl FunctionSpec {
    pub fn identity() -> Self {
        Self::catalog(FunctionKind::Identity)
    }

    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::schema("p", "must be finite"));
        }
        Ok(Self::catalog(FunctionKind::Power(p)))
    }

    pub fn reciprocal() -> Self {
        Self::catalog(FunctionKind::Reciprocal)
    }

    pub fn log1p() -> Self {
        Self::catalog(FunctionKind::Log1p)
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::schema("c", "must be finite and >= 0"));
        }
        Ok(Self::catalog(FunctionKind::Constant(c)))
    }

    pub fn om_rep(rep: IntegralRep) -> Self {
        Self::catalog(FunctionKind::OmRep(rep))
    }

    pub fn al_rep(rep: IntegralRep) -> Self {
        Self::catalog(FunctionKind::AlRep(rep))
    }

    /// Tabulated function; the domain is the open knot range (clipped at 0).
    pub fn table(table: TableSpec) -> Result<Self> {
        let domain = Interval::new(table.first_knot().max(0.0), table.last_knot())
            .map_err(|_| Error::schema("knots", "knot range must reach positive x"))?;
        Ok(FunctionSpec {
            kind: FunctionKind::Table(table),
            domain,
        })
    }

    /// Nonnegative combination; the domain is the intersection of the term domains.
    pub fn sum(terms: Vec<(f64, FunctionSpec)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::schema("terms", "at least one term required"));
        }
        let mut domain = Interval::positive();
        for (i, (w, spec)) in terms.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::schema(format!("terms[{i}].weight"), "must be finite and >= 0"));
            }
            domain = domain
                .intersect(&spec.domain)
                .map_err(|_| Error::schema(format!("terms[{i}].spec.domain"), "term domains do not overlap"))?;
        }
        Ok(FunctionSpec {
            kind: FunctionKind::Sum(terms),
            domain,
        })
    }

    /// `x -> 1 / g(x)` on the domain of `g`.
    pub fn inverse_of(g: FunctionSpec) -> Self {
        let domain = g.domain;
        FunctionSpec {
            kind: FunctionKind::Inverse(Box::new(g)),
            domain,
        }
    }

    fn catalog(kind: FunctionKind) -> Self {
        FunctionSpec {
            kind,
            domain: Interval::positive(),
        }
    }

    /// Restricts the domain. Table, sum and transformed functions cannot be
    /// extended beyond the region where their constituents are defined.
    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        if !self.natural_domain().contains_interval(&domain) {
            return Err(Error::schema(
                "domain",
                format!("must lie within {}", self.natural_domain()),
            ));
        }
        self.domain = domain;
        Ok(self)
    }

    fn natural_domain(&self) -> Interval {
        match &self.kind {
            FunctionKind::Table(t) => Interval {
                a: t.first_knot().max(0.0),
                b: t.last_knot(),
            },
            FunctionKind::Sum(terms) => terms.iter().fold(Interval::positive(), |d, (_, s)| Interval {
                a: d.a.max(s.domain.a),
                b: d.b.min(s.domain.b),
            }),
            FunctionKind::SqrtTransform { inner, .. } => inner.domain.squared(),
            FunctionKind::Inverse(inner) => inner.domain,
            _ => Interval::positive(),
        }
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Short human label, e.g. `power(0.5)`.
    pub fn label(&self) -> String {
        match &self.kind {
            FunctionKind::Identity => "identity".into(),
            FunctionKind::Power(p) => format!("power({p})"),
            FunctionKind::Reciprocal => "reciprocal".into(),
            FunctionKind::Log1p => "log1p".into(),
            FunctionKind::Constant(c) => format!("constant({c})"),
            FunctionKind::OmRep(r) => format!("om_rep(alpha={},beta={},atoms={})", r.alpha, r.beta, r.atoms.len()),
            FunctionKind::AlRep(r) => format!("al_rep(alpha={},beta={},atoms={})", r.alpha, r.beta, r.atoms.len()),
            FunctionKind::Table(t) => format!("table({} knots)", t.knots().len()),
            FunctionKind::Sum(terms) => format!("sum({} terms)", terms.len()),
            FunctionKind::SqrtTransform { inner, direction } => match direction {
                SqrtDirection::TimesSqrt => format!("sqrt_times({})", inner.label()),
                SqrtDirection::OverSqrt => format!("sqrt_over({})", inner.label()),
            },
            FunctionKind::Inverse(inner) => format!("inverse({})", inner.label()),
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        Ok(match &self.kind {
            FunctionKind::Identity => x,
            FunctionKind::Power(p) => x.powf(*p),
            FunctionKind::Reciprocal => 1.0 / x,
            FunctionKind::Log1p => x.ln_1p(),
            FunctionKind::Constant(c) => *c,
            FunctionKind::OmRep(r) => {
                r.alpha + r.beta * x + r.atoms.iter().map(|a| a.w * x / (a.t + x)).sum::<f64>()
            }
            FunctionKind::AlRep(r) => {
                r.alpha / x
                    + r.beta * x
                    + r.atoms.iter().map(|a| a.w * x / (a.t + x * x)).sum::<f64>()
            }
            FunctionKind::Table(t) => t.evaluate(x)?,
            FunctionKind::Sum(terms) => {
                let mut acc = 0.0;
                for (w, s) in terms {
                    acc += w * s.evaluate(x)?;
                }
                acc
            }
            FunctionKind::SqrtTransform { inner, direction } => {
                let r = x.sqrt();
                let g = inner.evaluate(r)?;
                match direction {
                    SqrtDirection::TimesSqrt => g * r,
                    SqrtDirection::OverSqrt => g / r,
                }
            }
            FunctionKind::Inverse(inner) => {
                let g = inner.evaluate(x)?;
                if g == 0.0 {
                    return Err(Error::Construction(format!("inverse of a function vanishing at x = {x}")));
                }
                1.0 / g
            }
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        Ok(match &self.kind {
            FunctionKind::Identity => 1.0,
            FunctionKind::Power(p) => {
                if *p == 0.0 {
                    0.0
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            FunctionKind::Reciprocal => -1.0 / (x * x),
            FunctionKind::Log1p => 1.0 / (1.0 + x),
            FunctionKind::Constant(_) => 0.0,
            FunctionKind::OmRep(r) => {
                r.beta
                    + r.atoms
                        .iter()
                        .map(|a| a.w * a.t / ((a.t + x) * (a.t + x)))
                        .sum::<f64>()
            }
            FunctionKind::AlRep(r) => {
                -r.alpha / (x * x)
                    + r.beta
                    + r.atoms
                        .iter()
                        .map(|a| {
                            let den = a.t + x * x;
                            a.w * (a.t - x * x) / (den * den)
                        })
                        .sum::<f64>()
            }
            FunctionKind::Table(t) => t.derivative(x)?,
            FunctionKind::Sum(terms) => {
                let mut acc = 0.0;
                for (w, s) in terms {
                    acc += w * s.derivative(x)?;
                }
                acc
            }
            FunctionKind::SqrtTransform { inner, direction } => {
                let r = x.sqrt();
                let g = inner.evaluate(r)?;
                let dg = inner.derivative(r)?;
                match direction {
                    SqrtDirection::TimesSqrt => 0.5 * (dg + g / r),
                    SqrtDirection::OverSqrt => (dg * r - g) / (2.0 * r * r * r),
                }
            }
            FunctionKind::Inverse(inner) => {
                let g = inner.evaluate(x)?;
                if g == 0.0 {
                    return Err(Error::Construction(format!("inverse of a function vanishing at x = {x}")));
                }
                -inner.derivative(x)? / (g * g)
            }
        })
    }

    /// True when this is an integral representation with every parameter zero.
    pub fn is_trivial_rep(&self) -> bool {
        match &self.kind {
            FunctionKind::OmRep(r) | FunctionKind::AlRep(r) => r.is_zero(),
            _ => false,
        }
    }
}

/// `h(x) = g(sqrt x) sqrt x` or `g(sqrt x) / sqrt x` on `(a^2, b^2)`.
pub fn sqrt_transform(g: &FunctionSpec, direction: SqrtDirection) -> FunctionSpec {
    FunctionSpec {
        domain: g.domain.squared(),
        kind: FunctionKind::SqrtTransform {
            inner: Box::new(g.clone()),
            direction,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(alpha: f64, beta: f64, atoms: &[(f64, f64)]) -> FunctionSpec {
        let atoms = atoms.iter().map(|&(t, w)| Atom { t, w }).collect();
        FunctionSpec::al_rep(IntegralRep::new(alpha, beta, atoms).unwrap())
    }

    #[test]
    fn al_rep_evaluation_examples() {
        assert_eq!(al(0.0, 1.0, &[]).evaluate(7.0).unwrap(), 7.0);
        assert_eq!(al(0.0, 0.0, &[(1.0, 1.0)]).evaluate(2.0).unwrap(), 0.4);
        assert_eq!(al(3.0, 2.0, &[(1.0, 1.0)]).evaluate(1.0).unwrap(), 5.5);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(FunctionSpec::identity().derivative(3.3).unwrap(), 1.0);
        assert_eq!(FunctionSpec::power(2.0).unwrap().derivative(3.0).unwrap(), 6.0);
        assert_eq!(al(0.0, 0.0, &[(1.0, 1.0)]).derivative(1.0).unwrap(), 0.0);
        assert_eq!(FunctionSpec::constant(2.0).unwrap().derivative(1.0).unwrap(), 0.0);
    }

    #[test]
    fn om_rep_with_zero_atom_is_constant_plus_linear() {
        let rep = IntegralRep::new(1.0, 2.0, vec![Atom { t: 0.0, w: 3.0 }]).unwrap();
        let f = FunctionSpec::om_rep(rep);
        assert_eq!(f.evaluate(2.0).unwrap(), 1.0 + 4.0 + 3.0);
        assert_eq!(f.derivative(2.0).unwrap(), 2.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            FunctionSpec::reciprocal().evaluate(0.0),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(al(1.0, 0.0, &[]).evaluate(0.0).is_err());
        let f = FunctionSpec::identity()
            .with_domain(Interval::new(1.0, 2.0).unwrap())
            .unwrap();
        assert!(f.evaluate(2.0).is_err());
        assert!(f.evaluate(1.5).is_ok());
        assert_eq!(Interval::new(3.0, 1.0).unwrap_err().to_string(), "domain: a < b violated");
    }

    #[test]
    fn sqrt_transform_examples() {
        let id = FunctionSpec::identity();
        let h1 = sqrt_transform(&id, SqrtDirection::TimesSqrt);
        let h2 = sqrt_transform(&id, SqrtDirection::OverSqrt);
        for x in [0.25, 4.0, 9.0] {
            assert!((h1.evaluate(x).unwrap() - x).abs() < 1e-15 * x);
            assert_eq!(h2.evaluate(x).unwrap(), 1.0);
            assert!((h1.derivative(x).unwrap() - 1.0).abs() < 1e-15);
            assert!(h2.derivative(x).unwrap().abs() < 1e-15);
        }
        let sq = FunctionSpec::power(2.0).unwrap();
        let h = sqrt_transform(&sq, SqrtDirection::TimesSqrt);
        assert_eq!(h.evaluate(4.0).unwrap(), 8.0);
        // h = x^1.5, h'(4) = 1.5 * 2
        assert!((h.derivative(4.0).unwrap() - 3.0).abs() < 1e-14);
        let bounded = id.with_domain(Interval::new(1.0, 3.0).unwrap()).unwrap();
        assert_eq!(sqrt_transform(&bounded, SqrtDirection::OverSqrt).domain(), Interval::new(1.0, 9.0).unwrap());
    }

    #[test]
    fn inverse_of_and_sum() {
        let g = FunctionSpec::power(0.5).unwrap();
        let inv = FunctionSpec::inverse_of(g.clone());
        assert!((inv.evaluate(4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((inv.derivative(4.0).unwrap() + 0.5 * 4.0_f64.powf(-1.5)).abs() < 1e-15);

        let s = FunctionSpec::sum(vec![(2.0, g), (1.0, FunctionSpec::identity())]).unwrap();
        assert_eq!(s.evaluate(4.0).unwrap(), 8.0);
        assert_eq!(s.derivative(4.0).unwrap(), 1.5);
        assert!(FunctionSpec::sum(vec![]).is_err());
        assert!(FunctionSpec::sum(vec![(-1.0, FunctionSpec::identity())]).is_err());
    }

    #[test]
    fn rep_validation() {
        assert!(IntegralRep::new(-1.0, 0.0, vec![]).is_err());
        assert_eq!(
            IntegralRep::new(0.0, 0.0, vec![Atom { t: 1.0, w: -0.5 }]).unwrap_err().to_string(),
            "atoms[0][1]: weight must be finite and > 0"
        );
    }
}
