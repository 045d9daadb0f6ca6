//! JSON schema for function specifications.
//!
//! `{"kind": ..., <kind fields>, "domain": [a, b | "inf"]}` with kinds
//! `identity`, `power` (p), `reciprocal`, `log1p`, `constant` (c),
//! `om_rep` / `al_rep` (alpha, beta, atoms as `[t, w]` pairs),
//! `table` (knots, values) and `sum` (terms `[{weight, spec}]`).
//! Derived functions serialize as `sqrt_times`, `sqrt_over` and `inverse`
//! with an `inner` spec.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::{
    sqrt_transform, Atom, FunctionKind, FunctionSpec, IntegralRep, Interval, SqrtDirection,
    TableSpec,
};
use crate::error::{Error, Result};

/// Parses and validates a JSON function specification.
pub fn parse_spec(text: &str) -> Result<FunctionSpec> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
    FunctionSpec::from_json(&value)
}

fn at(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

/// Re-roots an error produced with a field-relative path.
fn nest(prefix: &str, e: Error) -> Error {
    match e {
        Error::Schema { path, message } if !prefix.is_empty() => {
            let sep = if path.starts_with('[') { "" } else { "." };
            Error::Schema {
                path: format!("{prefix}{sep}{path}"),
                message,
            }
        }
        other => other,
    }
}

fn number(obj: &Map<String, Value>, prefix: &str, field: &str) -> Result<f64> {
    match obj.get(field) {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::schema(at(prefix, field), "expected a number")),
        None => Err(Error::schema(at(prefix, field), "missing field")),
    }
}

fn number_or(obj: &Map<String, Value>, prefix: &str, field: &str, default: f64) -> Result<f64> {
    if obj.contains_key(field) {
        number(obj, prefix, field)
    } else {
        Ok(default)
    }
}

fn number_list(obj: &Map<String, Value>, prefix: &str, field: &str) -> Result<Vec<f64>> {
    let arr = obj
        .get(field)
        .ok_or_else(|| Error::schema(at(prefix, field), "missing field"))?
        .as_array()
        .ok_or_else(|| Error::schema(at(prefix, field), "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| Error::schema(format!("{}[{i}]", at(prefix, field)), "expected a number"))
        })
        .collect()
}

pub fn parse_bound(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::schema(path, "expected a number")),
        _ => Err(Error::schema(path, "expected a number or \"inf\"")),
    }
}

pub fn parse_interval(v: &Value, path: &str) -> Result<Interval> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::schema(path, "expected [a, b]"))?;
    let a = parse_bound(&arr[0], &format!("{path}[0]"))?;
    let b = parse_bound(&arr[1], &format!("{path}[1]"))?;
    Interval::new(a, b).map_err(|e| nest_domain(path, e))
}

fn nest_domain(path: &str, e: Error) -> Error {
    match e {
        Error::Schema { message, .. } => Error::Schema {
            path: path.to_string(),
            message,
        },
        other => other,
    }
}

pub fn interval_to_json(d: &Interval) -> Value {
    if d.is_bounded() {
        json!([d.a(), d.b()])
    } else {
        json!([d.a(), "inf"])
    }
}

fn parse_rep(obj: &Map<String, Value>, prefix: &str) -> Result<IntegralRep> {
    let alpha = number_or(obj, prefix, "alpha", 0.0)?;
    let beta = number_or(obj, prefix, "beta", 0.0)?;
    let mut atoms = Vec::new();
    if let Some(v) = obj.get("atoms") {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::schema(at(prefix, "atoms"), "expected an array of [t, w] pairs"))?;
        for (i, pair) in arr.iter().enumerate() {
            let path = format!("{}[{i}]", at(prefix, "atoms"));
            let p = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::schema(&path, "expected [t, w]"))?;
            let t = p[0]
                .as_f64()
                .ok_or_else(|| Error::schema(format!("{path}[0]"), "expected a number"))?;
            let w = p[1]
                .as_f64()
                .ok_or_else(|| Error::schema(format!("{path}[1]"), "expected a number"))?;
            atoms.push(Atom { t, w });
        }
    }
    IntegralRep::new(alpha, beta, atoms).map_err(|e| nest(prefix, e))
}

impl FunctionSpec {
    pub fn from_json(value: &Value) -> Result<FunctionSpec> {
        Self::from_json_at(value, "")
    }

    fn from_json_at(value: &Value, prefix: &str) -> Result<FunctionSpec> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::schema(if prefix.is_empty() { "$" } else { prefix }, "expected an object"))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::schema(at(prefix, "kind"), "missing or non-string kind"))?;

        let spec = match kind {
            "identity" => FunctionSpec::identity(),
            "power" => FunctionSpec::power(number(obj, prefix, "p")?).map_err(|e| nest(prefix, e))?,
            "reciprocal" => FunctionSpec::reciprocal(),
            "log1p" => FunctionSpec::log1p(),
            "constant" => FunctionSpec::constant(number(obj, prefix, "c")?).map_err(|e| nest(prefix, e))?,
            "om_rep" => FunctionSpec::om_rep(parse_rep(obj, prefix)?),
            "al_rep" => FunctionSpec::al_rep(parse_rep(obj, prefix)?),
            "table" => {
                let knots = number_list(obj, prefix, "knots")?;
                let values = number_list(obj, prefix, "values")?;
                let table = TableSpec::new(knots, values).map_err(|e| nest(prefix, e))?;
                FunctionSpec::table(table).map_err(|e| nest(prefix, e))?
            }
            "sum" => {
                let path = at(prefix, "terms");
                let arr = obj
                    .get("terms")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::schema(&path, "expected an array of {weight, spec}"))?;
                let mut terms = Vec::with_capacity(arr.len());
                for (i, term) in arr.iter().enumerate() {
                    let tpath = format!("{path}[{i}]");
                    let tobj = term
                        .as_object()
                        .ok_or_else(|| Error::schema(&tpath, "expected {weight, spec}"))?;
                    let weight = number(tobj, &tpath, "weight")?;
                    let spec = tobj
                        .get("spec")
                        .ok_or_else(|| Error::schema(at(&tpath, "spec"), "missing field"))?;
                    terms.push((weight, Self::from_json_at(spec, &at(&tpath, "spec"))?));
                }
                FunctionSpec::sum(terms).map_err(|e| nest(prefix, e))?
            }
            "sqrt_times" | "sqrt_over" | "inverse" => {
                let path = at(prefix, "inner");
                let inner = obj
                    .get("inner")
                    .ok_or_else(|| Error::schema(&path, "missing field"))?;
                let inner = Self::from_json_at(inner, &path)?;
                match kind {
                    "sqrt_times" => sqrt_transform(&inner, SqrtDirection::TimesSqrt),
                    "sqrt_over" => sqrt_transform(&inner, SqrtDirection::OverSqrt),
                    _ => FunctionSpec::inverse_of(inner),
                }
            }
            other => {
                return Err(Error::schema(at(prefix, "kind"), format!("unknown kind \"{other}\"")));
            }
        };

        match obj.get("domain") {
            None => Ok(spec),
            Some(d) => {
                let path = at(prefix, "domain");
                let domain = parse_interval(d, &path)?;
                spec.with_domain(domain).map_err(|e| nest_domain(&path, e))
            }
        }
    }

    /// Canonical JSON form; `parse_spec` of its text reproduces `self`.
    pub fn to_json(&self) -> Value {
        let mut obj = match &self.kind {
            FunctionKind::Identity => json!({"kind": "identity"}),
            FunctionKind::Power(p) => json!({"kind": "power", "p": p}),
            FunctionKind::Reciprocal => json!({"kind": "reciprocal"}),
            FunctionKind::Log1p => json!({"kind": "log1p"}),
            FunctionKind::Constant(c) => json!({"kind": "constant", "c": c}),
            FunctionKind::OmRep(r) => rep_json("om_rep", r),
            FunctionKind::AlRep(r) => rep_json("al_rep", r),
            FunctionKind::Table(t) => json!({"kind": "table", "knots": t.knots(), "values": t.values()}),
            FunctionKind::Sum(terms) => json!({
                "kind": "sum",
                "terms": terms
                    .iter()
                    .map(|(w, s)| json!({"weight": w, "spec": s.to_json()}))
                    .collect::<Vec<_>>(),
            }),
            FunctionKind::SqrtTransform { inner, direction } => {
                let kind = match direction {
                    SqrtDirection::TimesSqrt => "sqrt_times",
                    SqrtDirection::OverSqrt => "sqrt_over",
                };
                json!({"kind": kind, "inner": inner.to_json()})
            }
            FunctionKind::Inverse(inner) => json!({"kind": "inverse", "inner": inner.to_json()}),
        };
        obj.as_object_mut()
            .expect("object literal")
            .insert("domain".into(), interval_to_json(&self.domain));
        obj
    }
}

fn rep_json(kind: &str, r: &IntegralRep) -> Value {
    json!({
        "kind": kind,
        "alpha": r.alpha(),
        "beta": r.beta(),
        "atoms": r.atoms().iter().map(|a| json!([a.t, a.w])).collect::<Vec<_>>(),
    })
}

impl Serialize for FunctionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        FunctionSpec::from_json(&v).map_err(D::Error::custom)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        interval_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        parse_interval(&v, "interval").map_err(D::Error::custom)
    }
}
