//! JSON record formats for matrices and families.
//!
//! Every record carries `"format": "treehopf/1"` and a `"kind"` tag.
//! Elements, trees, and rationals are embedded as display strings in
//! the grammar of the library parser, so records printed by one
//! invocation can be read back by the next.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use treehopf::comodule::{GroupElement, PrimitiveMatrix, StructureMatrix};
use treehopf::morphisms::TreeFamily;
use treehopf::trees::RootedTree;
use treehopf::{AlgebraElement, Rational};

use crate::CliError;

pub const FORMAT: &str = "treehopf/1";

/// Reads a JSON record from a path, or from standard input when the
/// path is `-`.
pub fn read_source(path: &str) -> Result<Value, CliError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad JSON: {e}")))
}

fn record<'v>(v: &'v Value, kind: &str) -> Result<&'v Map<String, Value>, CliError> {
    let map = v
        .as_object()
        .ok_or_else(|| CliError::Input("record must be a JSON object".into()))?;
    match map.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(map),
        Some(k) => Err(CliError::Input(format!("expected kind \"{kind}\", got \"{k}\""))),
        None => Err(CliError::Input("record is missing a \"kind\" field".into())),
    }
}

fn field<'v>(map: &'v Map<String, Value>, key: &str) -> Result<&'v Value, CliError> {
    map.get(key)
        .ok_or_else(|| CliError::Input(format!("record is missing \"{key}\"")))
}

fn usize_field(map: &Map<String, Value>, key: &str) -> Result<usize, CliError> {
    field(map, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| CliError::Input(format!("\"{key}\" must be a non-negative integer")))
}

fn str_field<'v>(map: &'v Map<String, Value>, key: &str) -> Result<&'v str, CliError> {
    field(map, key)?
        .as_str()
        .ok_or_else(|| CliError::Input(format!("\"{key}\" must be a string")))
}

fn element(s: &str) -> Result<AlgebraElement, CliError> {
    Ok(s.parse::<AlgebraElement>()?)
}

fn rational(v: &Value) -> Result<Rational, CliError> {
    let s = v
        .as_str()
        .ok_or_else(|| CliError::Input("rationals must be strings like \"3/2\"".into()))?;
    Rational::from_str(s).map_err(|e| CliError::Input(format!("bad rational \"{s}\": {e}")))
}

/// Sparse entries of a triangular matrix: `(i, j, element)` triples for
/// the nonzero, non-diagonal positions.
fn entries(map: &Map<String, Value>) -> Result<Vec<(usize, usize, AlgebraElement)>, CliError> {
    let list = field(map, "entries")?
        .as_array()
        .ok_or_else(|| CliError::Input("\"entries\" must be an array".into()))?;
    let mut out = Vec::new();
    for item in list {
        let entry = item
            .as_object()
            .ok_or_else(|| CliError::Input("each entry must be an object".into()))?;
        let i = usize_field(entry, "i")?;
        let j = usize_field(entry, "j")?;
        let e = element(str_field(entry, "element")?)?;
        out.push((i, j, e));
    }
    Ok(out)
}

/// A primitive family record: `kind: "family"`, the index bound `n`,
/// and entries `p(i, j)` for `1 <= i <= j <= n`.
pub fn family_from_json(v: &Value) -> Result<PrimitiveMatrix, CliError> {
    let map = record(v, "family")?;
    let n = usize_field(map, "n")?;
    let mut raw = vec![vec![AlgebraElement::zero(); n + 1]; n + 1];
    for (i, j, e) in entries(map)? {
        if !(1 <= i && i <= j && j <= n) {
            return Err(CliError::Input(format!(
                "family entry ({i}, {j}) outside 1 <= i <= j <= {n}"
            )));
        }
        raw[i - 1][j] = e;
    }
    Ok(PrimitiveMatrix::new(raw)?)
}

pub fn family_to_json(p: &PrimitiveMatrix) -> Value {
    let n = p.size();
    let mut list = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let e = p.p(i, j);
            if !e.is_zero() {
                list.push(json!({ "i": i, "j": j, "element": e.to_string() }));
            }
        }
    }
    json!({ "format": FORMAT, "kind": "family", "n": n, "entries": list })
}

pub fn family_text(p: &PrimitiveMatrix) -> String {
    let n = p.size();
    let mut out = format!("n: {n}");
    for i in 1..=n {
        for j in i..=n {
            let e = p.p(i, j);
            if !e.is_zero() {
                let _ = write!(out, "\np({i}, {j}) = {e}");
            }
        }
    }
    out
}

/// A structure matrix record: `kind: "structure"`, the index bound `n`,
/// and entries `q(i, j)` for `0 <= j < i <= n`; the unit diagonal is
/// implied.
pub fn structure_from_json(v: &Value) -> Result<StructureMatrix, CliError> {
    let map = record(v, "structure")?;
    let n = usize_field(map, "n")?;
    let mut raw = vec![vec![AlgebraElement::zero(); n + 1]; n + 1];
    for (i, row) in raw.iter_mut().enumerate() {
        row[i] = AlgebraElement::one();
    }
    for (i, j, e) in entries(map)? {
        if !(j < i && i <= n) {
            return Err(CliError::Input(format!(
                "structure entry ({i}, {j}) outside 0 <= j < i <= {n}"
            )));
        }
        raw[i][j] = e;
    }
    Ok(StructureMatrix::new(raw)?)
}

pub fn structure_to_json(q: &StructureMatrix) -> Value {
    let n = q.size();
    let mut list = Vec::new();
    for i in 1..=n {
        for j in 0..i {
            let e = q.q(i, j);
            if !e.is_zero() {
                list.push(json!({ "i": i, "j": j, "element": e.to_string() }));
            }
        }
    }
    json!({ "format": FORMAT, "kind": "structure", "n": n, "entries": list })
}

pub fn structure_text(q: &StructureMatrix) -> String {
    let n = q.size();
    let mut out = format!("n: {n}");
    for i in 1..=n {
        for j in 0..i {
            let e = q.q(i, j);
            if !e.is_zero() {
                let _ = write!(out, "\nq({i}, {j}) = {e}");
            }
        }
    }
    out
}

/// A group element record: `kind: "group"`, the block `profile`, and
/// the full square `matrix` of rationals as strings.
pub fn group_from_json(v: &Value) -> Result<GroupElement, CliError> {
    let map = record(v, "group")?;
    let profile = field(map, "profile")?
        .as_array()
        .ok_or_else(|| CliError::Input("\"profile\" must be an array".into()))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| CliError::Input("profile entries must be integers".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = field(map, "matrix")?
        .as_array()
        .ok_or_else(|| CliError::Input("\"matrix\" must be an array of rows".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| CliError::Input("matrix rows must be arrays".into()))?
                .iter()
                .map(rational)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupElement::new(profile, matrix)?)
}

fn images(map: &Map<String, Value>) -> Result<BTreeMap<RootedTree, AlgebraElement>, CliError> {
    let obj = field(map, "images")?
        .as_object()
        .ok_or_else(|| CliError::Input("\"images\" must be an object".into()))?;
    let mut out = BTreeMap::new();
    for (tree, value) in obj {
        let t = tree.parse::<RootedTree>()?;
        let e = element(value.as_str().ok_or_else(|| {
            CliError::Input("image values must be element strings".into())
        })?)?;
        out.insert(t, e);
    }
    Ok(out)
}

/// A tree family record: `kind: "tree-family"`, the weight `bound`,
/// and `images` mapping each tree string to a primitive (or zero)
/// element string.
pub fn tree_family_from_json(v: &Value) -> Result<TreeFamily, CliError> {
    let map = record(v, "tree-family")?;
    let bound = usize_field(map, "bound")?;
    Ok(TreeFamily::new(bound, images(map)?)?)
}

pub fn tree_family_to_json(fam: &TreeFamily) -> Value {
    let mut obj = Map::new();
    for (t, e) in fam.iter() {
        obj.insert(t.to_string(), Value::String(e.to_string()));
    }
    json!({ "format": FORMAT, "kind": "tree-family", "bound": fam.bound(), "images": obj })
}

pub fn tree_family_text(fam: &TreeFamily) -> String {
    let mut out = format!("bound: {}", fam.bound());
    for (t, e) in fam.iter() {
        let _ = write!(out, "\n{t} => {e}");
    }
    out
}

/// A morphism record: `kind: "morphism"`, the weight `bound`, and
/// `images` mapping each tree string to its image under an algebra
/// endomorphism. Images of forests follow by multiplicativity.
pub fn morphism_from_json(
    v: &Value,
) -> Result<(usize, BTreeMap<RootedTree, AlgebraElement>), CliError> {
    let map = record(v, "morphism")?;
    let bound = usize_field(map, "bound")?;
    let images = images(map)?;
    for w in 1..=bound {
        for t in treehopf::trees::enumerate_trees(w) {
            if !images.contains_key(&t) {
                return Err(CliError::Input(format!("missing image for tree {t}")));
            }
        }
    }
    Ok((bound, images))
}
