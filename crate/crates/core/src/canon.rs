//! Canonical JSON: sorted keys, no floats, naturals as bare decimal digits.
//!
//! Certificates and reports serialize through [`Value`] so that identical
//! inputs always produce byte-identical documents. Parsing goes through
//! `serde_json` with arbitrary-precision numbers so large bounds survive a
//! round trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sequence::Nat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Nat(Nat),
    Bool(bool),
    Str(String),
    Arr(Vec<Value>),
    Obj(BTreeMap<String, Value>),
}

impl Value {
    pub fn nat(n: impl Into<Nat>) -> Self {
        Value::Nat(n.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn obj(fields: impl IntoIterator<Item = (&'static str, Value)>) -> Self {
        Value::Obj(
            fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn arr(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Arr(items.into_iter().collect())
    }

    pub fn nat_arr<'a>(items: impl IntoIterator<Item = &'a Nat>) -> Self {
        Value::Arr(items.into_iter().cloned().map(Value::Nat).collect())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Obj(m) => m.get(key),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Result<&Nat> {
        match self {
            Value::Nat(n) => Ok(n),
            other => Err(Error::Certificate(format!(
                "expected natural, got {other:?}"
            ))),
        }
    }

    pub fn as_str(&self) -> Result<&str> {
        match self {
            Value::Str(s) => Ok(s),
            other => Err(Error::Certificate(format!(
                "expected string, got {other:?}"
            ))),
        }
    }

    pub fn as_arr(&self) -> Result<&[Value]> {
        match self {
            Value::Arr(items) => Ok(items),
            other => Err(Error::Certificate(format!("expected array, got {other:?}"))),
        }
    }

    pub fn required(&self, key: &str) -> Result<&Value> {
        self.get(key)
            .ok_or_else(|| Error::Certificate(format!("missing field '{key}'")))
    }

    /// Canonical textual form.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Value::Nat(n) => {
                let _ = write!(out, "{n}");
            }
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Str(s) => write_json_string(s, out),
            Value::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Value::Obj(map) => {
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_json_string(k, out);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }
}

fn write_json_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Parse a JSON document into a canonical value. Floats and negative
/// numbers are rejected; every number must be a natural.
pub fn parse(text: &str) -> Result<Value> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Certificate(format!("invalid json: {e}")))?;
    from_serde(&v)
}

fn from_serde(v: &serde_json::Value) -> Result<Value> {
    Ok(match v {
        serde_json::Value::Null => {
            return Err(Error::Certificate("null is not allowed".into()));
        }
        serde_json::Value::Bool(b) => Value::Bool(*b),
        serde_json::Value::Number(n) => {
            let text = n.to_string();
            let nat: Nat = text
                .parse()
                .map_err(|_| Error::Certificate(format!("number {text} is not a natural")))?;
            Value::Nat(nat)
        }
        serde_json::Value::String(s) => Value::Str(s.clone()),
        serde_json::Value::Array(items) => {
            Value::Arr(items.iter().map(from_serde).collect::<Result<_>>()?)
        }
        serde_json::Value::Object(map) => {
            let mut out = BTreeMap::new();
            for (k, v) in map {
                out.insert(k.clone(), from_serde(v)?);
            }
            Value::Obj(out)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::nat;

    #[test]
    fn keys_are_sorted() {
        let v = Value::obj([("zeta", Value::nat(nat(1))), ("alpha", Value::nat(nat(2)))]);
        assert_eq!(v.to_canonical_string(), r#"{"alpha":2,"zeta":1}"#);
    }

    #[test]
    fn large_naturals_round_trip() {
        let big: Nat = "123456789012345678901234567890123456789".parse().unwrap();
        let v = Value::obj([("bound", Value::Nat(big.clone()))]);
        let text = v.to_canonical_string();
        let back = parse(&text).unwrap();
        assert_eq!(back.required("bound").unwrap().as_nat().unwrap(), &big);
    }

    #[test]
    fn floats_are_rejected() {
        assert!(parse(r#"{"x": 1.5}"#).is_err());
        assert!(parse(r#"{"x": -3}"#).is_err());
    }
}
