//! Exact scenario parameters, written in JSON either as numbers or as "p/q" strings.

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use pws_core::{format_rational, parse_rational, rational_to_f64, Rational};

/// A rational parameter. JSON numbers are read through their shortest decimal
/// form, so `0.05` means exactly 1/20.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(pub Rational);

impl Param {
    pub fn parse(s: &str) -> Result<Self, pws_core::PolyError> {
        parse_rational(s).map(Param)
    }

    pub fn from_f64(v: f64) -> Result<Self, pws_core::PolyError> {
        Self::parse(&format!("{v}"))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl From<Rational> for Param {
    fn from(r: Rational) -> Self {
        Param(r)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Param;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a rational string such as \"2/9\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Param, E> {
                Param::parse(v).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Param, E> {
                Ok(Param(pws_core::int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Param, E> {
                Param::parse(&v.to_string()).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Param, E> {
                if !v.is_finite() {
                    return Err(E::custom("parameter must be finite"));
                }
                Param::from_f64(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses a parameter given on the command line.
pub fn param(s: &str) -> Result<Param, String> {
    Param::parse(s).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pws_core::rat;

    #[test]
    fn numbers_and_strings() {
        let v: Vec<Param> = serde_json::from_str(r#"[0.05, "2/9", 3, "-0.4"]"#).unwrap();
        assert_eq!(v[0].0, rat(1, 20));
        assert_eq!(v[1].0, rat(2, 9));
        assert_eq!(v[2].0, rat(3, 1));
        assert_eq!(v[3].0, rat(-2, 5));
        assert_eq!(serde_json::to_string(&v[1]).unwrap(), "\"2/9\"");
        assert!(serde_json::from_str::<Param>("\"x\"").is_err());
    }
}
