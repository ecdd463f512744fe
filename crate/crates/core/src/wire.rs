//! JSON encodings shared by the report and config types.
//!
//! Complex numbers are written as `[re, im]` pairs. On input a pair, an
//! object `{"re": .., "im": ..}` or a bare real number are all accepted.

use crate::C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "radial-mult/1";

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JsonComplex(pub C64);

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex(z)
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        z.0
    }
}

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Pair([f64; 2]),
    Object {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Real(f64),
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let z = match ComplexRepr::deserialize(deserializer)? {
            ComplexRepr::Pair([re, im]) => C64::new(re, im),
            ComplexRepr::Object { re, im } => C64::new(re, im),
            ComplexRepr::Real(re) => C64::new(re, 0.0),
        };
        Ok(JsonComplex(z))
    }
}

/// `#[serde(with = "crate::wire::complex")]` adapter for bare [`C64`] fields.
pub mod complex {
    use super::JsonComplex;
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, serializer: S) -> Result<S::Ok, S::Error> {
        JsonComplex(*z).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<C64, D::Error> {
        JsonComplex::deserialize(deserializer).map(|z| z.0)
    }
}

/// Parses a complex number written as `0.5`, `-0.5`, `0.3+0.4i`, `-2i` or `0.3,0.4`.
pub fn parse_complex(text: &str) -> Option<C64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if let Some((re, im)) = t.split_once(',') {
        return Some(C64::new(re.parse().ok()?, im.parse().ok()?));
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let imag = |s: &str| -> Option<f64> {
            match s {
                "" | "+" => Some(1.0),
                "-" => Some(-1.0),
                _ => s.parse().ok(),
            }
        };
        return match split {
            Some(idx) => Some(C64::new(body[..idx].parse().ok()?, imag(&body[idx..])?)),
            None => Some(C64::new(0.0, imag(body)?)),
        };
    }
    Some(C64::new(t.parse().ok()?, 0.0))
}
