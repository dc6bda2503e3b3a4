//! JSON function literals.
//!
//! `{"arity": k, "values": [...]}`, `{"symmetric": [...]}`,
//! `{"named": "EQ", "arity": k}` or `{"unary": [a, b]}`.

use serde_json::{json, Value};

use super::{Signature, Transform2};
use crate::error::{HolantError, Result};
use crate::numerics::{scalar_from_json, scalar_to_json, Scalar};

fn bad(msg: impl Into<String>) -> HolantError {
    HolantError::Parse { pos: 0, msg: msg.into() }
}

fn scalars(v: &Value, what: &str) -> Result<Vec<Scalar>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be a list")))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            scalar_from_json(x).map_err(|e| match e {
                HolantError::Parse { msg, .. } => bad(format!("{what}[{i}]: {msg}")),
                other => other,
            })
        })
        .collect()
}

pub fn parse_function(v: &Value) -> Result<Signature> {
    let obj = v.as_object().ok_or_else(|| bad("function literal must be an object"))?;
    let arity = match obj.get("arity") {
        None => None,
        Some(a) => Some(a.as_u64().ok_or_else(|| bad("arity must be a non-negative integer"))? as usize),
    };
    if let Some(vals) = obj.get("values") {
        let arity = arity.ok_or_else(|| bad("\"values\" needs \"arity\""))?;
        if arity > 24 {
            return Err(HolantError::ArityTooLarge { arity, cap: 24 });
        }
        return Signature::new(arity, scalars(vals, "values")?);
    }
    if let Some(s) = obj.get("symmetric") {
        let f = Signature::symmetric(&scalars(s, "symmetric")?)?;
        if let Some(a) = arity {
            if a != f.arity() {
                return Err(HolantError::ArityMismatch(format!("symmetric list gives arity {}, not {a}", f.arity())));
            }
        }
        return Ok(f);
    }
    if let Some(n) = obj.get("named") {
        let name = n.as_str().ok_or_else(|| bad("\"named\" must be a string"))?;
        return Signature::named(name, arity);
    }
    if let Some(u) = obj.get("unary") {
        let vals = scalars(u, "unary")?;
        if vals.len() != 2 {
            return Err(HolantError::ArityMismatch(format!("unary needs two values, got {}", vals.len())));
        }
        return Signature::new(1, vals);
    }
    Err(bad("function literal needs one of values, symmetric, named, unary"))
}

pub fn signature_to_json(f: &Signature) -> Value {
    json!({
        "arity": f.arity(),
        "values": f.values().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

/// `[[a, b], [c, d]]` with scalar literals.
pub fn transform_to_json(m: &Transform2) -> Value {
    json!([[scalar_to_json(m.get(0, 0)), scalar_to_json(m.get(0, 1))], [scalar_to_json(m.get(1, 0)), scalar_to_json(m.get(1, 1))]])
}

pub fn transform_from_json(v: &Value) -> Result<Transform2> {
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(|| bad("matrix must be [[a, b], [c, d]]"))?;
    let row = |r: &Value| -> Result<Vec<Scalar>> {
        let s = scalars(r, "matrix row")?;
        if s.len() != 2 {
            return Err(bad("matrix rows need two entries"));
        }
        Ok(s)
    };
    let (r0, r1) = (row(&rows[0])?, row(&rows[1])?);
    Ok(Transform2::new(r0[0].clone(), r0[1].clone(), r1[0].clone(), r1[1].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        assert_eq!(parse_function(&json!({"named": "EQ", "arity": 3})).unwrap(), Signature::eq(3));
        assert_eq!(parse_function(&json!({"symmetric": ["1", "0", "0", "1"]})).unwrap(), Signature::eq(3));
        assert_eq!(parse_function(&json!({"unary": [1, "2"]})).unwrap(), Signature::activity(Scalar::int(2)));
        assert_eq!(parse_function(&json!({"arity": 2, "values": [0, 1, 1, 0]})).unwrap(), Signature::neq());
        assert!(parse_function(&json!({"arity": 2, "values": [0, 1, 1]})).is_err());
        assert!(parse_function(&json!({"named": "NAND", "arity": 3})).is_err());
        assert!(parse_function(&json!({"arity": 1, "values": ["1", "x"]})).is_err());
    }

    #[test]
    fn round_trip() {
        let f = Signature::new(1, vec![Scalar::inv_sqrt2(), Scalar::complex(0.5, 1.0)]).unwrap();
        assert_eq!(parse_function(&signature_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn transform_round_trip() {
        let m = Transform2::k1();
        assert_eq!(transform_from_json(&transform_to_json(&m)).unwrap(), m);
        assert!(transform_from_json(&json!([[1, 2]])).is_err());
    }
}
