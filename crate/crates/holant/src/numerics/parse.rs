//! Scalar literals.
//!
//! Text forms: `-3/2`, `2+1/3i`, `4-i`, `5i`, `i`, `sqrt2`, `1/sqrt2` (each
//! optionally negated). JSON additionally allows integers, plain floats,
//! `{"zeta8": [c0, c1, c2, c3]}` and `{"re": x, "im": y}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{Cyc, Rational, Scalar};
use crate::error::{HolantError, Result};

fn err(pos: usize, msg: impl Into<String>) -> HolantError {
    HolantError::Parse { pos, msg: msg.into() }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    /// Unsigned `digits [/ digits]`.
    fn rational(&mut self) -> Result<Option<Rational>> {
        let Some(num) = self.digits() else { return Ok(None) };
        if self.peek() == Some(b'/') && !self.s[self.pos + 1..].starts_with(b"sqrt2") {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits().ok_or_else(|| err(at, "expected denominator"))?;
            if den.is_zero() {
                return Err(err(at, "zero denominator"));
            }
            return Ok(Some(Rational::new(num, den)));
        }
        Ok(Some(Rational::from_integer(num)))
    }
}

/// Parses a scalar literal written as text. Exact forms only; floats are
/// accepted through [`scalar_from_json`].
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let t = text.trim();
    let offset = text.len() - text.trim_start().len();
    let mut c = Cursor { s: t.as_bytes(), pos: 0 };
    let v = parse_inner(&mut c).map_err(|e| match e {
        HolantError::Parse { pos, msg } => err(pos + offset, msg),
        other => other,
    })?;
    if c.pos != t.len() {
        return Err(err(c.pos + offset, format!("unexpected trailing input {:?}", &t[c.pos..])));
    }
    Ok(Scalar::Exact(v))
}

fn parse_inner(c: &mut Cursor) -> Result<Cyc> {
    let neg = c.eat(b'-');
    let sign = |x: Cyc| if neg { -x } else { x };
    if c.eat_str("sqrt2") {
        return Ok(sign(Cyc::sqrt2()));
    }
    if c.eat_str("1/sqrt2") {
        return Ok(sign(Cyc::inv_sqrt2()));
    }
    if c.eat(b'i') {
        return Ok(sign(Cyc::i()));
    }
    let at = c.pos;
    let first = c.rational()?.ok_or_else(|| err(at, "expected a number"))?;
    let first = if neg { -first } else { first };
    if c.peek() == Some(b'/') {
        // a rational followed by /sqrt2
        if c.eat_str("/sqrt2") {
            return Ok(Cyc::inv_sqrt2().scale(&first));
        }
    }
    if c.eat(b'i') {
        return Ok(Cyc::gaussian(Rational::zero(), first));
    }
    let im_neg = match c.peek() {
        Some(b'+') => false,
        Some(b'-') => true,
        None => return Ok(Cyc::from_rational(first)),
        Some(_) => return Err(err(c.pos, "expected '+', '-' or 'i'")),
    };
    c.pos += 1;
    let at = c.pos;
    let im = c.rational()?.unwrap_or_else(Rational::one);
    if !c.eat(b'i') {
        return Err(err(c.pos.max(at), "expected 'i' after imaginary part"));
    }
    let im = if im_neg { -im } else { im };
    Ok(Cyc::gaussian(first, im))
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => match parse_scalar(s)? {
            Scalar::Exact(c) if c.is_rational() => Ok(c.coeffs()[0].clone()),
            _ => Err(err(0, format!("zeta8 coefficient {s:?} is not rational"))),
        },
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .ok_or_else(|| err(0, format!("zeta8 coefficient {n} is not an integer"))),
        _ => Err(err(0, "zeta8 coefficient must be a string or integer")),
    }
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::int(i))
            } else {
                let f = n.as_f64().ok_or_else(|| err(0, "unrepresentable number"))?;
                Ok(Scalar::complex(f, 0.0))
            }
        }
        Value::Object(m) => {
            if let Some(z) = m.get("zeta8") {
                let arr = z.as_array().filter(|a| a.len() == 4).ok_or_else(|| err(0, "zeta8 needs four coefficients"))?;
                let cs: Vec<Rational> = arr.iter().map(rational_from_json).collect::<Result<_>>()?;
                let [c0, c1, c2, c3]: [Rational; 4] = cs.try_into().expect("length checked");
                Ok(Scalar::Exact(Cyc::new(c0, c1, c2, c3)))
            } else if m.contains_key("re") || m.contains_key("im") {
                let part = |k: &str| -> Result<f64> {
                    match m.get(k) {
                        None => Ok(0.0),
                        Some(x) => x.as_f64().ok_or_else(|| err(0, format!("{k} must be a number"))),
                    }
                };
                Ok(Scalar::complex(part("re")?, part("im")?))
            } else {
                Err(err(0, "object scalar needs \"zeta8\" or \"re\"/\"im\""))
            }
        }
        _ => Err(err(0, "scalar must be a string, number or object")),
    }
}

fn rat_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of [`scalar_from_json`]: Gaussian rationals become literal
/// strings, other exact values a `zeta8` object, floats a `re`/`im` object.
pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(c) if c.is_gaussian() => Value::String(c.to_string()),
        Scalar::Exact(c) => json!({ "zeta8": c.coeffs().iter().map(rat_string).collect::<Vec<_>>() }),
        Scalar::Approx(z) => json!({ "re": z.re, "im": z.im }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    fn exact(s: &str) -> Cyc {
        match parse_scalar(s).unwrap() {
            Scalar::Exact(c) => c,
            Scalar::Approx(_) => panic!("approximate"),
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(exact("-3/2"), Cyc::from_rational(rational(-3, 2)));
        assert_eq!(exact("7"), Cyc::from_int(7));
        assert_eq!(exact(" 4/6 "), Cyc::from_rational(rational(2, 3)));
    }

    #[test]
    fn complex_forms() {
        assert_eq!(exact("i"), Cyc::i());
        assert_eq!(exact("-i"), -Cyc::i());
        assert_eq!(exact("3i"), Cyc::gaussian(rational(0, 1), rational(3, 1)));
        assert_eq!(exact("1+2i"), Cyc::gaussian(rational(1, 1), rational(2, 1)));
        assert_eq!(exact("1/2-1/3i"), Cyc::gaussian(rational(1, 2), rational(-1, 3)));
        assert_eq!(exact("-1-i"), Cyc::gaussian(rational(-1, 1), rational(-1, 1)));
    }

    #[test]
    fn roots() {
        let s = exact("1/sqrt2");
        assert_eq!(s.coeffs()[1], rational(1, 2));
        assert_eq!(s.coeffs()[3], rational(-1, 2));
        assert!((s.to_c64().re - 0.7071067811865476).abs() < 1e-12);
        assert_eq!(exact("-sqrt2"), -Cyc::sqrt2());
    }

    #[test]
    fn errors_carry_position() {
        match parse_scalar("1+2") {
            Err(HolantError::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        match parse_scalar("1/0") {
            Err(HolantError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("2x").is_err());
    }

    #[test]
    fn json_round_trip() {
        for s in [
            Scalar::ratio(-3, 2),
            Scalar::i(),
            Scalar::inv_sqrt2(),
            Scalar::Exact(Cyc::new(rational(1, 2), rational(2, 3), rational(-5, 1), rational(7, 9))),
            Scalar::complex(0.5, -0.25),
        ] {
            assert_eq!(scalar_from_json(&scalar_to_json(&s)).unwrap(), s);
        }
        assert_eq!(scalar_from_json(&json!(3)).unwrap(), Scalar::int(3));
        assert_eq!(scalar_from_json(&json!({"zeta8": ["0", "1/2", "0", "-1/2"]})).unwrap(), Scalar::inv_sqrt2());
    }
}
