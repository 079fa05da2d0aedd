//! JSON-lines records and their CSV / JSON re-emission.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use unrect_core::rat::{parse_rat, to_f64};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn is_rat_str(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        Some((n, d)) => {
            !n.is_empty() && !d.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) && d.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Float image of a `"p/q"` string, or of a (nested) array made only of them.
fn f64_mirror(v: &Value) -> Option<Value> {
    match v {
        Value::String(s) if is_rat_str(s) => {
            let x = to_f64(&parse_rat(s).ok()?);
            Some(serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number))
        }
        Value::Array(items) if !items.is_empty() => items.iter().map(f64_mirror).collect::<Option<Vec<_>>>().map(Value::Array),
        _ => None,
    }
}

/// Adds a `<key>_f64` sibling next to every exact rational field.
pub fn add_float_columns(v: &mut Value) {
    match v {
        Value::Object(map) => {
            let mut extra = Vec::new();
            for (k, child) in map.iter_mut() {
                if let Some(m) = f64_mirror(child) {
                    extra.push((format!("{k}_f64"), m));
                } else {
                    add_float_columns(child);
                }
            }
            for (k, m) in extra {
                map.entry(k).or_insert(m);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(add_float_columns),
        _ => {}
    }
}

/// A record of the given kind: the payload's fields plus the schema
/// version, with float columns added.
pub fn record<T: Serialize>(kind: &str, payload: &T, extra: Vec<(&str, Value)>) -> Value {
    let mut map = match serde_json::to_value(payload).expect("records serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    for (k, v) in extra {
        map.insert(k.into(), v);
    }
    map.insert("record".into(), Value::from(kind));
    map.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    let mut v = Value::Object(map);
    add_float_columns(&mut v);
    v
}

pub fn to_jsonl(records: &[Value]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    s
}

pub fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(e, dir))?;
            }
            std::fs::write(p, bytes).map_err(|e| CliError::io(e, p))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io(e, Path::new("<stdout>")))
        }
    }
}

pub fn parse_jsonl(text: &str) -> Result<Vec<Value>, CliError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::config(format!("record {}: {e}", i + 1))))
        .collect()
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::String(s) => out.push((prefix.into(), s.clone())),
        Value::Null => out.push((prefix.into(), String::new())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

/// One CSV row per record; nested objects become dotted columns and
/// arrays stay JSON text. Columns are the sorted union over all records.
pub fn records_to_csv(records: &[Value]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut row = Vec::new();
            flatten("", r, &mut row);
            row
        })
        .collect();
    let columns: BTreeSet<&str> = rows.iter().flatten().map(|(k, _)| k.as_str()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::config(e.to_string());
    w.write_record(&columns).map_err(csv_err)?;
    for row in &rows {
        let cells = columns.iter().map(|c| row.iter().find(|(k, _)| k == c).map_or("", |(_, v)| v.as_str()));
        w.write_record(cells).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::config(e.to_string()))
}

pub fn records_to_json(records: &[Value]) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(records).expect("records serialize");
    v.push(b'\n');
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_columns_follow_exact_fields() {
        let mut v = json!({"mu": "9/16", "id": "F1", "hist": ["1/2", "-1/4"], "nested": {"lo": "1/8"}, "iv": [["0/1", "1/2"]]});
        add_float_columns(&mut v);
        assert_eq!(v["mu_f64"], json!(0.5625));
        assert_eq!(v["hist_f64"], json!([0.5, -0.25]));
        assert_eq!(v["nested"]["lo_f64"], json!(0.125));
        assert_eq!(v["iv_f64"], json!([[0.0, 0.5]]));
        assert!(v.get("id_f64").is_none());
    }

    #[test]
    fn csv_has_union_of_columns() {
        let recs = vec![json!({"a": "1/2"}), json!({"b": {"c": 3}})];
        let s = String::from_utf8(records_to_csv(&recs).unwrap()).unwrap();
        assert_eq!(s, "a,b.c\n1/2,\n,3\n");
    }
}
