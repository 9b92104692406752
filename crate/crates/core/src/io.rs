//! JSON interchange for algebras (format version 1).
//!
//! ```json
//! {"version": 1, "dim": 4, "labels": ["e1", ...], "params": [],
//!  "products": [{"i": 1, "j": 2, "terms": [{"k": 3, "coeff": "1"}]}]}
//! ```
//!
//! Indices are 1-based. `version` may be omitted. Output is deterministic:
//! products sorted by `(i, j)`, terms by `k`, scalars in canonical text.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::algebra::{Algebra, SparseVec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct TermOut {
    k: usize,
    coeff: String,
}

#[derive(Serialize)]
struct ProductOut {
    i: usize,
    j: usize,
    terms: Vec<TermOut>,
}

#[derive(Serialize)]
struct AlgebraOut {
    version: u32,
    dim: usize,
    labels: Vec<String>,
    params: Vec<String>,
    products: Vec<ProductOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degrees: Option<Vec<usize>>,
}

fn schema(location: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        reason: reason.into(),
    }
}

fn document(a: &Algebra, degrees: Option<Vec<usize>>) -> AlgebraOut {
    AlgebraOut {
        version: FORMAT_VERSION,
        dim: a.dim(),
        labels: a.labels().to_vec(),
        params: a.params().to_vec(),
        products: a
            .products()
            .iter()
            .map(|(&(i, j), v)| ProductOut {
                i: i + 1,
                j: j + 1,
                terms: v
                    .iter()
                    .map(|(&k, c)| TermOut {
                        k: k + 1,
                        coeff: c.to_string(),
                    })
                    .collect(),
            })
            .collect(),
        degrees,
    }
}

pub fn to_json(a: &Algebra) -> String {
    serde_json::to_string_pretty(&document(a, None)).expect("serialisable")
}

/// JSON with an extra `degrees` array (1-based degree of each basis vector).
pub fn to_json_with_degrees(a: &Algebra, degrees: &[usize]) -> String {
    serde_json::to_string_pretty(&document(a, Some(degrees.to_vec()))).expect("serialisable")
}

fn get<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(join(at, key), "missing field"))
}

fn join(at: &str, key: &str) -> String {
    if at.is_empty() {
        key.to_string()
    } else {
        format!("{at}.{key}")
    }
}

fn as_index(v: &Value, at: &str, dim: usize) -> Result<usize> {
    let i = v
        .as_u64()
        .ok_or_else(|| schema(at, "expected a positive integer"))? as usize;
    if i == 0 || i > dim {
        return Err(schema(at, format!("index {i} outside 1..={dim}")));
    }
    Ok(i - 1)
}

fn as_strings(v: &Value, at: &str) -> Result<Vec<String>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(at, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(n, s)| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(format!("{at}[{n}]"), "expected a string"))
        })
        .collect()
}

/// Parse an algebra document; errors name the offending field.
pub fn from_json(text: &str) -> Result<Algebra> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    if let Some(v) = obj.get("version") {
        let found = v
            .as_u64()
            .ok_or_else(|| schema("version", "expected an integer"))? as u32;
        if found != FORMAT_VERSION {
            return Err(Error::Version {
                found,
                expected: FORMAT_VERSION,
            });
        }
    }
    let dim = get(obj, "dim", "")?
        .as_u64()
        .filter(|&d| d > 0)
        .ok_or_else(|| schema("dim", "expected a positive integer"))? as usize;
    let labels = match obj.get("labels") {
        Some(v) => as_strings(v, "labels")?,
        None => (1..=dim).map(|i| format!("e{i}")).collect(),
    };
    if labels.len() != dim {
        return Err(schema(
            "labels",
            format!("{} labels for dimension {dim}", labels.len()),
        ));
    }
    let params = match obj.get("params") {
        Some(v) => as_strings(v, "params")?,
        None => Vec::new(),
    };
    let declared: BTreeSet<&str> = params.iter().map(String::as_str).collect();
    let mut a =
        Algebra::new(labels, params.clone()).map_err(|e| schema("labels", e.to_string()))?;
    let products = get(obj, "products", "")?
        .as_array()
        .ok_or_else(|| schema("products", "expected an array"))?;
    let mut seen = BTreeSet::new();
    for (n, p) in products.iter().enumerate() {
        let at = format!("products[{n}]");
        let po = p
            .as_object()
            .ok_or_else(|| schema(&at, "expected an object"))?;
        let i = as_index(get(po, "i", &at)?, &join(&at, "i"), dim)?;
        let j = as_index(get(po, "j", &at)?, &join(&at, "j"), dim)?;
        if !seen.insert((i, j)) {
            return Err(schema(
                &at,
                format!("duplicate product ({}, {})", i + 1, j + 1),
            ));
        }
        let terms = get(po, "terms", &at)?
            .as_array()
            .ok_or_else(|| schema(join(&at, "terms"), "expected an array"))?;
        let mut v = SparseVec::new();
        for (m, t) in terms.iter().enumerate() {
            let tat = format!("{at}.terms[{m}]");
            let to = t
                .as_object()
                .ok_or_else(|| schema(&tat, "expected an object"))?;
            let k = as_index(get(to, "k", &tat)?, &join(&tat, "k"), dim)?;
            let cat = join(&tat, "coeff");
            let c = match get(to, "coeff", &tat)? {
                Value::String(s) => Scalar::parse(s).map_err(|e| schema(&cat, e.to_string()))?,
                Value::Number(x) if x.is_i64() => Scalar::from_int(x.as_i64().expect("i64")),
                _ => return Err(schema(&cat, "expected a scalar string")),
            };
            for name in c.params() {
                if !declared.contains(name.as_str()) {
                    return Err(schema(&cat, format!("undeclared parameter `{name}`")));
                }
            }
            if v.contains_key(&k) {
                return Err(schema(&tat, format!("duplicate term k = {}", k + 1)));
            }
            if !c.is_zero() {
                v.insert(k, c);
            }
        }
        a.set_product(i, j, v)?;
    }
    Ok(a)
}

pub fn load(path: &Path) -> Result<Algebra> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema(path.display().to_string(), e.to_string()))?;
    from_json(&text)
}

pub fn save(a: &Algebra, path: &Path) -> Result<()> {
    let mut text = to_json(a);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Internal(format!("{}: {e}", path.display())))
}
