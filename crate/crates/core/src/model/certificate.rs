use serde::{Deserialize, Serialize};

use crate::model::graph::GraphPair;
use crate::scalar::Scalar;

/// Verdict of a check, with enough data to reproduce a failure.
///
/// On failure `witnesses` holds the offending pair(s) and `value` the
/// violating quantity; on success `value` is the extremal quantity seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Certificate<S: Scalar = f64> {
    pub verdict: bool,
    pub witnesses: Vec<GraphPair<S>>,
    #[serde(with = "scalar_json")]
    pub value: S,
    /// Which probe set backed a "for all" quantifier, when one was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
}

impl<S: Scalar> Certificate<S> {
    pub fn pass(value: S) -> Self {
        Certificate {
            verdict: true,
            witnesses: Vec::new(),
            value,
            probe: None,
        }
    }

    pub fn fail(witnesses: Vec<GraphPair<S>>, value: S) -> Self {
        debug_assert!(!witnesses.is_empty() && witnesses.len() <= 2);
        Certificate {
            verdict: false,
            witnesses,
            value,
            probe: None,
        }
    }

    pub fn with_probe(mut self, probe: impl Into<String>) -> Self {
        self.probe = Some(probe.into());
        self
    }
}

/// Loads plain numeric fields through a JSON value first, which keeps them
/// readable inside internally tagged enums when numbers are arbitrary
/// precision.
pub mod plain_json {
    use serde::de::{DeserializeOwned, Error as _};
    use serde::{Deserialize, Deserializer};
    use serde_json::Value;

    pub fn deserialize<'de, T: DeserializeOwned, D: Deserializer<'de>>(
        d: D,
    ) -> Result<T, D::Error> {
        serde_json::from_value(Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Serde adapter routing a generic scalar through [`Scalar::to_json`].
pub mod scalar_json {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    use crate::scalar::Scalar;

    pub fn serialize<S: Scalar, Ser: Serializer>(v: &S, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        v.to_json().serialize(s)
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<S, D::Error> {
        let v = Value::deserialize(d)?;
        S::from_json(&v).map_err(D::Error::custom)
    }
}

/// Same as [`scalar_json`] for vectors of scalars.
pub mod scalar_vec_json {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    use crate::scalar::Scalar;

    pub fn serialize<S: Scalar, Ser: Serializer>(v: &[S], s: Ser) -> Result<Ser::Ok, Ser::Error> {
        v.iter()
            .map(|x| x.to_json())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<S>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(|x| S::from_json(x).map_err(D::Error::custom))
            .collect()
    }
}
