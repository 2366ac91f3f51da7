//! JSON triplet documents.
//!
//! ```json
//! {
//!   "shift": 0.3,
//!   "gaussian_variance": 0.7,
//!   "levy_measure": {
//!     "atoms": [{"x": 1.5, "mass": 2.0}],
//!     "named": {"family": "exponential", "lambda": 1.0},
//!     "grid": {"x": [0.1, 0.5], "density": [1.0, 0.2]}
//!   }
//! }
//! ```
//!
//! `named` and `grid` take one object or a list. A grid that crosses the
//! origin is split into its negative and positive parts.

use serde_json::{json, Map, Value};

use crate::error::{LevyError, Result};
use crate::triplet::{Atom, GridDensity, Interpolation, LevyMeasure, LevyTriplet, NamedDensity};

fn err(path: &str, msg: impl std::fmt::Display) -> LevyError {
    LevyError::Parse(format!("{path}: {msg}"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn number(m: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    let p = format!("{path}.{key}");
    match m.get(key) {
        None => Err(err(&p, "missing required key")),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| err(&p, format!("expected a number, got {v}"))),
    }
}

fn optional_number(m: &Map<String, Value>, key: &str, path: &str, default: f64) -> Result<f64> {
    if m.contains_key(key) {
        number(m, key, path)
    } else {
        Ok(default)
    }
}

fn numbers(m: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<f64>> {
    let p = format!("{path}.{key}");
    let arr = m
        .get(key)
        .ok_or_else(|| err(&p, "missing required key"))?
        .as_array()
        .ok_or_else(|| err(&p, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| err(&format!("{p}[{i}]"), format!("expected a number, got {v}")))
        })
        .collect()
}

fn reject_unknown(m: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(
            &format!("{path}.{k}"),
            format!("unknown key (expected one of {})", allowed.join(", ")),
        )),
        None => Ok(()),
    }
}

/// `v` as a list, accepting a bare object for a single entry.
fn one_or_many(v: &Value) -> Vec<(usize, &Value)> {
    match v {
        Value::Array(items) => items.iter().enumerate().collect(),
        other => vec![(0, other)],
    }
}

fn item_path(base: &str, v: &Value, i: usize) -> String {
    if v.is_array() {
        format!("{base}[{i}]")
    } else {
        base.to_string()
    }
}

fn parse_named(v: &Value, path: &str) -> Result<NamedDensity> {
    let m = object(v, path)?;
    let family = m
        .get("family")
        .ok_or_else(|| err(&format!("{path}.family"), "missing required key"))?
        .as_str()
        .ok_or_else(|| err(&format!("{path}.family"), "expected a string"))?;
    match family {
        "exponential" => {
            reject_unknown(m, &["family", "lambda", "weight"], path)?;
            Ok(NamedDensity::ExponentialTail {
                lambda: number(m, "lambda", path)?,
                weight: optional_number(m, "weight", path, 1.0)?,
            })
        }
        "stable_power" => {
            reject_unknown(m, &["family", "p", "c_plus", "c_minus"], path)?;
            Ok(NamedDensity::StablePower {
                p: number(m, "p", path)?,
                c_plus: optional_number(m, "c_plus", path, 0.0)?,
                c_minus: optional_number(m, "c_minus", path, 0.0)?,
            })
        }
        other => Err(err(
            &format!("{path}.family"),
            format!("unknown family '{other}' (expected exponential or stable_power)"),
        )),
    }
}

fn parse_grid(v: &Value, path: &str) -> Result<Vec<GridDensity>> {
    let m = object(v, path)?;
    reject_unknown(m, &["x", "density", "interpolation", "resolution"], path)?;
    let x = numbers(m, "x", path)?;
    let density = numbers(m, "density", path)?;
    let interpolation = match m.get("interpolation") {
        None => Interpolation::Linear,
        Some(s) => {
            let s = s
                .as_str()
                .ok_or_else(|| err(&format!("{path}.interpolation"), "expected a string"))?;
            Interpolation::parse(s).ok_or_else(|| {
                err(
                    &format!("{path}.interpolation"),
                    format!("unknown interpolation '{s}' (expected linear or log_lagrange)"),
                )
            })?
        }
    };
    if let Some(r) = m.get("resolution") {
        if r.as_u64().is_none() {
            return Err(err(
                &format!("{path}.resolution"),
                "expected a nonnegative integer",
            ));
        }
    }
    if x.len() != density.len() {
        return Err(err(
            path,
            format!(
                "x has {} entries but density has {}",
                x.len(),
                density.len()
            ),
        ));
    }
    let split = x.partition_point(|&v| v < 0.0);
    let mut out = Vec::new();
    for (xs, ds) in [
        (&x[..split], &density[..split]),
        (&x[split..], &density[split..]),
    ] {
        if !xs.is_empty() {
            out.push(
                GridDensity::new(xs.to_vec(), ds.to_vec(), interpolation)
                    .map_err(|e| err(path, e))?,
            );
        }
    }
    Ok(out)
}

/// Parses a triplet document, reporting syntax errors by line and column and
/// structural errors by key path.
pub fn parse_triplet(text: &str) -> Result<LevyTriplet> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| LevyError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let top = object(&root, "$")?;
    reject_unknown(top, &["shift", "gaussian_variance", "levy_measure"], "$")?;
    let shift = number(top, "shift", "$")?;
    let variance = number(top, "gaussian_variance", "$")?;

    let (mut atoms, mut grids, mut named) = (Vec::new(), Vec::new(), Vec::new());
    if let Some(lm) = top.get("levy_measure") {
        let path = "$.levy_measure";
        let lm = object(lm, path)?;
        reject_unknown(lm, &["atoms", "named", "grid"], path)?;
        if let Some(a) = lm.get("atoms") {
            let arr = a
                .as_array()
                .ok_or_else(|| err(&format!("{path}.atoms"), "expected an array"))?;
            for (i, item) in arr.iter().enumerate() {
                let p = format!("{path}.atoms[{i}]");
                let o = object(item, &p)?;
                reject_unknown(o, &["x", "mass"], &p)?;
                atoms.push(Atom::new(number(o, "x", &p)?, number(o, "mass", &p)?));
            }
        }
        if let Some(n) = lm.get("named") {
            for (i, item) in one_or_many(n) {
                named.push(parse_named(
                    item,
                    &item_path(&format!("{path}.named"), n, i),
                )?);
            }
        }
        if let Some(g) = lm.get("grid") {
            for (i, item) in one_or_many(g) {
                grids.extend(parse_grid(item, &item_path(&format!("{path}.grid"), g, i))?);
            }
        }
    }
    let measure = LevyMeasure::new(atoms, grids, named).map_err(|e| err("$.levy_measure", e))?;
    LevyTriplet::new(shift, variance, measure).map_err(|e| err("$", e))
}

fn collapse(mut items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Value::Array(items)
    }
}

pub fn triplet_to_value(t: &LevyTriplet) -> Value {
    let m = t.measure();
    let mut lm = Map::new();
    if !m.atoms().is_empty() {
        lm.insert(
            "atoms".into(),
            Value::Array(
                m.atoms()
                    .iter()
                    .map(|a| json!({"x": a.x, "mass": a.mass}))
                    .collect(),
            ),
        );
    }
    if !m.named().is_empty() {
        let items = m
            .named()
            .iter()
            .map(|n| match *n {
                NamedDensity::ExponentialTail { lambda, weight } => {
                    json!({"family": "exponential", "lambda": lambda, "weight": weight})
                }
                NamedDensity::StablePower { p, c_plus, c_minus } => {
                    json!({"family": "stable_power", "p": p, "c_plus": c_plus, "c_minus": c_minus})
                }
            })
            .collect();
        lm.insert("named".into(), collapse(items));
    }
    if !m.grids().is_empty() {
        let items = m
            .grids()
            .iter()
            .map(|g| {
                json!({
                    "x": g.x(),
                    "density": g.density(),
                    "interpolation": g.interpolation().as_str(),
                    "resolution": g.len(),
                })
            })
            .collect();
        lm.insert("grid".into(), collapse(items));
    }
    json!({
        "shift": t.shift(),
        "gaussian_variance": t.gaussian_variance(),
        "levy_measure": Value::Object(lm),
    })
}

/// Pretty-printed document with a trailing newline. Numbers use the
/// shortest representation that parses back to the same `f64`.
pub fn serialize_triplet(t: &LevyTriplet) -> String {
    let mut s =
        serde_json::to_string_pretty(&triplet_to_value(t)).expect("finite values serialize");
    s.push('\n');
    s
}
