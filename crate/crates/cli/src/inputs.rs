//! Turning command-line strings into validated core types.

use std::fmt;
use std::path::Path;

use alw_core::builders::Grid;
use alw_core::functions::{parse_interval, parse_spec, FunctionSpec, Interval};
use alw_core::linalg::DEFAULT_TOLERANCE;
use serde_json::{json, Map, Value};

pub const TOLERANCE_ENV: &str = "ALW_DEFAULT_TOL";

/// An input problem; always exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<alw_core::Error> for InputError {
    fn from(e: alw_core::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

/// Prefixes a core error with the flag it came from.
pub fn at<T>(flag: &str, r: alw_core::Result<T>) -> Result<T> {
    r.map_err(|e| InputError(format!("{flag}: {e}")))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// JSON text, a path to a JSON file, or shorthand (`power:0.5`, `constant:2`,
/// `identity`, `reciprocal`, `log1p`, `al_rep:alpha=0,beta=1,atoms=(1,0.5)(3,2)`).
pub fn parse_function(arg: &str) -> Result<FunctionSpec> {
    let text = arg.trim();
    if text.starts_with('{') {
        return at("--fn", parse_spec(text));
    }
    let path = Path::new(text);
    if path.is_file() {
        let content = read_file(path)?;
        return at(&format!("--fn {}", path.display()), parse_spec(&content));
    }
    let value = shorthand(text).map_err(|m| InputError(format!("--fn: {m}")))?;
    at("--fn", FunctionSpec::from_json(&value))
}

fn shorthand(text: &str) -> std::result::Result<Value, String> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r.trim())),
        None => (text, None),
    };
    let number = |r: Option<&str>, what: &str| -> std::result::Result<f64, String> {
        let r = r.ok_or_else(|| format!("{name} needs a parameter, e.g. {name}:{what}"))?;
        r.parse::<f64>()
            .map_err(|_| format!("cannot parse \"{r}\" as a number"))
    };
    match name {
        "identity" | "reciprocal" | "log1p" => match rest {
            None => Ok(json!({ "kind": name })),
            Some(r) => Err(format!("{name} takes no parameters, got \"{r}\"")),
        },
        "power" => Ok(json!({"kind": "power", "p": number(rest, "0.5")?})),
        "constant" => Ok(json!({"kind": "constant", "c": number(rest, "1")?})),
        "al_rep" | "om_rep" => representation(name, rest.unwrap_or("")),
        other => Err(format!(
            "unknown function \"{other}\" (expected JSON, a file, or one of identity, reciprocal, log1p, power:p, constant:c, al_rep:..., om_rep:...)"
        )),
    }
}

/// `alpha=0,beta=1,atoms=(1,0.5)(3,2)`; each atom is `(t,w)`.
fn representation(kind: &str, body: &str) -> std::result::Result<Value, String> {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(kind));
    for field in split_top_level(body) {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got \"{field}\""))?;
        let (key, val) = (key.trim(), val.trim());
        match key {
            "alpha" | "beta" => {
                let v = val
                    .parse::<f64>()
                    .map_err(|_| format!("{key}: cannot parse \"{val}\" as a number"))?;
                obj.insert(key.into(), json!(v));
            }
            "atoms" => {
                obj.insert("atoms".into(), Value::Array(atoms(val)?));
            }
            other => return Err(format!("unknown field \"{other}\" (expected alpha, beta, atoms)")),
        }
    }
    Ok(Value::Object(obj))
}

fn atoms(text: &str) -> std::result::Result<Vec<Value>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| format!("atoms: expected (t,w) groups, got \"{rest}\""))?;
        let (pair, tail) = inner;
        let nums = pair
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| format!("atoms[{}]: cannot parse \"({pair})\"", out.len()))?;
        if nums.len() != 2 {
            return Err(format!("atoms[{}]: expected (t,w), got \"({pair})\"", out.len()));
        }
        out.push(json!([nums[0], nums[1]]));
        rest = tail.trim_start();
    }
    Ok(out)
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

/// `a,b` with `b` possibly `inf`.
pub fn parse_interval_arg(text: &str) -> Result<Interval> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(InputError(format!("--interval: expected a,b, got \"{text}\"")));
    }
    let bound = |s: &str| -> Result<Value> {
        if s.eq_ignore_ascii_case("inf") {
            Ok(json!("inf"))
        } else {
            s.parse::<f64>()
                .map(|v| json!(v))
                .map_err(|_| InputError(format!("--interval: cannot parse \"{s}\" as a number")))
        }
    };
    let v = json!([bound(parts[0])?, bound(parts[1])?]);
    at("--interval", parse_interval(&v, "interval"))
}

/// Inline comma-separated points, or a `.json` / CSV file.
pub fn parse_grid(arg: &str, interval: Interval) -> Result<Grid> {
    let path = Path::new(arg.trim());
    if path.is_file() {
        let text = read_file(path)?;
        let flag = format!("--grid {}", path.display());
        return if text.trim_start().starts_with('{') {
            at(&flag, Grid::from_json_str(&text, interval))
        } else {
            at(&flag, Grid::from_csv_str(&text, interval))
        };
    }
    at("--grid", Grid::from_csv_str(arg, interval))
}

/// `--tolerance`, else `$ALW_DEFAULT_TOL`, else the library default.
pub fn resolve_tolerance(flag: Option<f64>) -> Result<f64> {
    let (tol, source) = match flag {
        Some(t) => (t, "--tolerance".to_string()),
        None => match std::env::var(TOLERANCE_ENV) {
            Ok(s) => {
                let t = s
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| InputError(format!("{TOLERANCE_ENV}: cannot parse \"{s}\" as a number")))?;
                (t, TOLERANCE_ENV.to_string())
            }
            Err(_) => (DEFAULT_TOLERANCE, String::new()),
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(InputError(format!("{source}: tolerance must be positive and finite, got {tol}")));
    }
    Ok(tol)
}
