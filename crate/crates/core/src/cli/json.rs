//! JSON emission with 17 significant digits for every float.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest plain-decimal form with 17 significant digits; scientific
/// notation outside [1e−5, 1e16).
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..16).contains(&exp) {
        format!("{x:.*}", (16 - exp) as usize)
    } else {
        sci
    }
}

fn reformat(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            Value::Number(format_f64(x).parse::<Number>().unwrap_or(n))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(reformat).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, reformat(v))).collect()),
        other => other,
    }
}

/// An exact integer as a JSON number.
pub fn big_number(x: &num_bigint::BigUint) -> Value {
    Value::Number(x.to_str_radix(10).parse().expect("decimal integer"))
}

/// Wraps `result` with the command name, parameter echo and version.
pub fn envelope(command: &str, params: Value, result: impl Serialize) -> Result<Value> {
    let result = serde_json::to_value(result).map_err(|e| Error::Format(e.to_string()))?;
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("version".into(), Value::String(VERSION.into()));
    m.insert("params".into(), params);
    m.insert("result".into(), result);
    Ok(reformat(Value::Object(m)))
}

pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(1.0 / 6.0), "0.16666666666666666");
        assert_eq!(format_f64(0.5), "0.50000000000000000");
        assert_eq!(format_f64(1e-300), "1.0000000000000000e-300");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000");
        for x in [0.1558063100350576, 3.0e-7, 123456.789, 1e20] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn envelope_reformats_nested_floats() {
        let v = envelope("t", serde_json::json!({"x": 0.25}), vec![0.1f64]).unwrap();
        let s = render(&v);
        assert!(s.contains("0.25000000000000000"));
        assert!(s.contains("0.10000000000000001"));
        assert!(s.contains("\"version\""));
    }

    #[test]
    fn big_integers_stay_exact() {
        let x = num_bigint::BigUint::from(3u32).pow(80);
        let v = big_number(&x);
        assert_eq!(serde_json::to_string(&v).unwrap(), x.to_str_radix(10));
    }
}
