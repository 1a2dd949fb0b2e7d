//! JSON output helpers shared by every serialized artifact.
//!
//! Floating-point numbers are written with 17 significant digits in
//! exponent form (`{:.16e}`). That representation round-trips every
//! `f64` exactly and makes outputs byte-for-byte reproducible.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

/// An `f64` serialized with 17 significant digits; non-finite values
/// become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

pub fn format_f17(x: f64) -> String {
    if x.is_finite() {
        // Normalize negative zero so outputs never carry "-0".
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_f17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// Serializes `(key, value)` pairs as a JSON object in iteration order.
pub struct OrderedMap<I>(pub I);

impl<I, K, V> Serialize for OrderedMap<I>
where
    I: Clone + IntoIterator<Item = (K, V)>,
    K: Serialize,
    V: Serialize,
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (k, v) in self.0.clone() {
            map.serialize_entry(&k, &v)?;
        }
        map.end()
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0, 1e-300, 123456.789, f64::MAX] {
            let s = format_f17(x);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f17(-0.0), format_f17(0.0));
    }

    #[test]
    fn raw_numbers_are_valid_json() {
        let s = serde_json::to_string(&vec![F17(0.5), F17(f64::NAN)]).unwrap();
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.5), None]);
    }
}
