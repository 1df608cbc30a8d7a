//! JSON shapes for groups, primary specs, instances and elements.
//!
//! Parsing walks `serde_json::Value` by hand so that every rejection names
//! the offending field path, e.g. `components[1].levels[0][2]`.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::abelian::{FiniteAbelianGroup, GSequence, GroupElement};
use crate::error::{Error, Result};
use crate::primary::{PrimaryElement, PrimaryMonoidSpec};
use crate::tblock::{AmbientElement, Component, InstanceSpec};

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::invalid(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::invalid(path_or_root(path), "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::invalid(path_or_root(path), "expected an array"))
}

fn uint(v: &Value, path: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| Error::invalid(path_or_root(path), "expected a non-negative integer"))
}

fn path_or_root(path: &str) -> String {
    if path.is_empty() {
        "$".into()
    } else {
        path.into()
    }
}

fn reject_unknown(obj: &Map<String, Value>, known: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::invalid(join(path, k), "unknown field")),
        None => Ok(()),
    }
}

/// `[3, 3]` is `C3 ⊕ C3`; `[]` and `[1]` are trivial.
pub fn parse_group(v: &Value, path: &str) -> Result<FiniteAbelianGroup> {
    let moduli = array(v, path)?
        .iter()
        .enumerate()
        .map(|(j, m)| uint(m, &format!("{path}[{j}]")))
        .collect::<Result<Vec<u32>>>()?;
    FiniteAbelianGroup::new(moduli).map_err(|e| match e {
        Error::Invalid { path: inner, message } => {
            Error::invalid(format!("{path}{}", inner.trim_start_matches("group")), message)
        }
        other => other,
    })
}

/// A group literal as given on the command line, e.g. `"[3,3]"`.
pub fn parse_group_literal(text: &str) -> Result<FiniteAbelianGroup> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::invalid("group", format!("not a JSON array: {e}")))?;
    parse_group(&v, "group")
}

/// Element literals: `[1, 2]`, the integer `1` (one coordinate), or the
/// strings `"1"`, `"1,2"`, `"(1,2)"`.
pub fn parse_element(g: &FiniteAbelianGroup, v: &Value, path: &str) -> Result<GroupElement> {
    let coords: Vec<i64> = match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(j, x)| {
                x.as_i64()
                    .ok_or_else(|| Error::invalid(format!("{path}[{j}]"), "expected an integer"))
            })
            .collect::<Result<_>>()?,
        Value::Number(n) => vec![n
            .as_i64()
            .ok_or_else(|| Error::invalid(path, "expected an integer"))?],
        Value::String(s) => parse_coords(s).ok_or_else(|| {
            Error::invalid(path, format!("cannot read `{s}` as an element literal"))
        })?,
        _ => return Err(Error::invalid(path, "expected an element literal")),
    };
    let coords = if coords.is_empty() && g.moduli() == [1] {
        vec![0]
    } else {
        coords
    };
    if coords.len() != g.moduli().len() {
        return Err(Error::invalid(
            path,
            format!(
                "element has {} coordinates but {g} has {}",
                coords.len(),
                g.moduli().len()
            ),
        ));
    }
    g.element(&coords)
}

fn parse_coords(s: &str) -> Option<Vec<i64>> {
    let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    if inner.trim().is_empty() {
        return Some(vec![]);
    }
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// Comma-separated residues, the key used for free parts.
pub fn element_key(e: &GroupElement) -> String {
    e.residues()
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

const PRIMARY_FIELDS: [&str; 3] = ["units", "k", "levels"];

/// `{"units": [2], "k": 1, "levels": [["0"]]}`
pub fn parse_primary(v: &Value, path: &str) -> Result<PrimaryMonoidSpec> {
    let obj = object(v, path)?;
    parse_primary_fields(obj, path)
}

fn parse_primary_fields(obj: &Map<String, Value>, path: &str) -> Result<PrimaryMonoidSpec> {
    let units_path = join(path, "units");
    let units = parse_group(field(obj, "units", path)?, &units_path)?;
    let k = uint(field(obj, "k", path)?, &join(path, "k"))?;
    let levels_path = join(path, "levels");
    let levels = array(field(obj, "levels", path)?, &levels_path)?
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let lp = format!("{levels_path}[{i}]");
            array(level, &lp)?
                .iter()
                .enumerate()
                .map(|(j, e)| parse_element(&units, e, &format!("{lp}[{j}]")))
                .collect::<Result<BTreeSet<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PrimaryMonoidSpec::new(units, k, levels).map_err(|e| prefix(e, path))
}

fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Invalid { path: inner, message } if !path.is_empty() => {
            Error::invalid(format!("{path}.{inner}"), message)
        }
        other => other,
    }
}

pub fn primary_to_json(spec: &PrimaryMonoidSpec) -> Value {
    let levels: Vec<Vec<Value>> = spec
        .levels()
        .iter()
        .map(|level| level.iter().map(|u| json!(u.residues())).collect())
        .collect();
    json!({
        "units": spec.units().moduli(),
        "k": spec.exponent(),
        "levels": levels,
    })
}

/// `{"group": [2], "components": [{"units": …, "k": …, "levels": …,
/// "iota_p": [1], "iota_units": [[1]]}]}`
pub fn parse_instance(v: &Value) -> Result<InstanceSpec> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["group", "components"], "")?;
    let group = parse_group(field(obj, "group", "")?, "group")?;
    let components = match obj.get("components") {
        None => Vec::new(),
        Some(list) => array(list, "components")?
            .iter()
            .enumerate()
            .map(|(i, c)| parse_component(&group, c, &format!("components[{i}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    InstanceSpec::new(group, components)
}

fn parse_component(group: &FiniteAbelianGroup, v: &Value, path: &str) -> Result<Component> {
    let obj = object(v, path)?;
    let mut known = PRIMARY_FIELDS.to_vec();
    known.extend(["iota_p", "iota_units"]);
    reject_unknown(obj, &known, path)?;
    let primary = parse_primary_fields(obj, path)?;
    let iota_p = parse_element(group, field(obj, "iota_p", path)?, &join(path, "iota_p"))?;
    let up = join(path, "iota_units");
    let iota_units = match obj.get("iota_units") {
        None if primary.units().moduli().iter().all(|&m| m == 1) => {
            vec![group.zero(); primary.units().moduli().len()]
        }
        None => return Err(Error::invalid(up, "missing field")),
        Some(list) => array(list, &up)?
            .iter()
            .enumerate()
            .map(|(j, e)| parse_element(group, e, &format!("{up}[{j}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    Component::new(group, primary, iota_p, iota_units).map_err(|e| prefix(e, path))
}

pub fn instance_to_json(inst: &InstanceSpec) -> Value {
    let components: Vec<Value> = inst
        .components()
        .iter()
        .map(|c| {
            let mut v = primary_to_json(c.primary());
            let obj = v.as_object_mut().expect("object");
            obj.insert("iota_p".into(), json!(c.iota_p().residues()));
            obj.insert(
                "iota_units".into(),
                json!(c
                    .iota_units()
                    .iter()
                    .map(|g| g.residues().to_vec())
                    .collect::<Vec<_>>()),
            );
            v
        })
        .collect();
    json!({
        "group": inst.group().moduli(),
        "components": components,
    })
}

/// `{"free": {"1": 2}, "parts": [{"valuation": 1, "unit": [0]}]}`. Both
/// fields may be omitted; missing parts are the identity.
pub fn parse_ambient(inst: &InstanceSpec, v: &Value) -> Result<AmbientElement> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["free", "parts"], "")?;
    let g = inst.group();
    let mut free = GSequence::new();
    match obj.get("free") {
        None => {}
        Some(Value::Object(map)) => {
            for (key, count) in map {
                let p = format!("free.{key}");
                let e = parse_element(g, &Value::String(key.clone()), &p)?;
                free.push(e, uint(count, &p)?);
            }
        }
        Some(Value::Array(items)) => {
            for (j, item) in items.iter().enumerate() {
                free.push(parse_element(g, item, &format!("free[{j}]"))?, 1);
            }
        }
        Some(_) => return Err(Error::invalid("free", "expected an object or an array")),
    }
    let r = inst.components().len();
    let parts = match obj.get("parts") {
        None => inst
            .components()
            .iter()
            .map(|c| PrimaryElement {
                valuation: 0,
                unit: c.primary().units().zero(),
            })
            .collect(),
        Some(list) => {
            let items = array(list, "parts")?;
            if items.len() != r {
                return Err(Error::invalid(
                    "parts",
                    format!("expected {r} parts, found {}", items.len()),
                ));
            }
            items
                .iter()
                .zip(inst.components())
                .enumerate()
                .map(|(i, (item, c))| {
                    let p = format!("parts[{i}]");
                    let o = object(item, &p)?;
                    reject_unknown(o, &["valuation", "unit"], &p)?;
                    let valuation = uint(field(o, "valuation", &p)?, &join(&p, "valuation"))?;
                    let units = c.primary().units();
                    let unit = match o.get("unit") {
                        None => units.zero(),
                        Some(u) => parse_element(units, u, &join(&p, "unit"))?,
                    };
                    if !c.primary().is_member(valuation, &unit) {
                        return Err(Error::invalid(
                            p,
                            format!("p^{valuation}·{unit} is not in the component monoid"),
                        ));
                    }
                    Ok(PrimaryElement { valuation, unit })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(AmbientElement { free, parts })
}

pub fn ambient_to_json(a: &AmbientElement) -> Value {
    let free: Map<String, Value> = a
        .free
        .iter()
        .map(|(e, n)| (element_key(e), json!(n)))
        .collect();
    let parts: Vec<Value> = a
        .parts
        .iter()
        .map(|p| json!({"valuation": p.valuation, "unit": p.unit.residues()}))
        .collect();
    json!({"free": free, "parts": parts})
}
