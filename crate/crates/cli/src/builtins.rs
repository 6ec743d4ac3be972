use monotone_core::region::ConvexRegion;
use monotone_core::{Covector, Error, Norm, Point, Result, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::io::{CliError, CliResult};

/// Set-valued maps for `kakutani`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetMap {
    /// `R(u) = C` for every `u`.
    Constant { set: ConvexRegion },
    /// `R(u)` is the Euclidean ball of `radius` about `A u + b`.
    AffineBall {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        radius: f64,
    },
}

impl SetMap {
    pub fn apply(&self, u: &Point) -> Result<Option<ConvexRegion>> {
        match self {
            SetMap::Constant { set } => Ok(Some(set.clone())),
            SetMap::AffineBall {
                matrix,
                offset,
                radius,
            } => {
                let x = u.coords();
                if matrix.len() != offset.len() || matrix.iter().any(|row| row.len() != x.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: x.len(),
                        found: offset.len(),
                    });
                }
                let center = matrix
                    .iter()
                    .zip(offset)
                    .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b)
                    .collect();
                ConvexRegion::ball(Norm::Euclidean, *radius, center).map(Some)
            }
        }
    }
}

/// The maps accepted by `df-extend --phi`.
pub fn phi_builtin(name: &str) -> CliResult<fn(&Covector) -> Result<Point>> {
    fn identity(x: &Covector) -> Result<Point> {
        Ok(x.to_point())
    }
    fn negate(x: &Covector) -> Result<Point> {
        Ok(x.to_point().neg())
    }
    match name {
        "identity" => Ok(identity),
        "negate" => Ok(negate),
        other => Err(CliError::Usage(format!(
            "unknown --phi `{other}` (expected identity or negate)"
        ))),
    }
}

/// `euclidean | sup | l1 | lp:<p> | weighted:<w1,w2,...>`, or a JSON norm.
pub fn parse_norm(text: &str) -> CliResult<Norm> {
    let t = text.trim();
    let bad = |m: String| CliError::Usage(format!("--norm: {m}"));
    let norm = if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| bad(e.to_string()))?
    } else if let Some(p) = t.strip_prefix("lp:") {
        Norm::Lp {
            p: p.parse().map_err(|_| bad(format!("bad exponent `{p}`")))?,
        }
    } else if let Some(w) = t.strip_prefix("weighted:") {
        let weights = w
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>();
        Norm::WeightedL2 {
            weights: weights.map_err(|_| bad(format!("bad weights `{w}`")))?,
        }
    } else {
        match t {
            "euclidean" => Norm::Euclidean,
            "sup" => Norm::Sup,
            "l1" => Norm::L1,
            other => return Err(bad(format!("unknown norm `{other}`"))),
        }
    };
    norm.validate().map_err(|e| bad(e.to_string()))?;
    Ok(norm)
}

/// A scalar flag value: a decimal or `p/q`.
pub fn parse_scalar<S: Scalar>(flag: &str, text: &str) -> CliResult<S> {
    let t = text.trim();
    S::from_json(&serde_json::Value::String(t.to_string()))
        .map_err(|e| CliError::Usage(format!("{flag}: `{t}`: {e}")))
}

pub fn parse_vector<S: Scalar>(flag: &str, text: &str) -> CliResult<Vec<S>> {
    text.split(',').map(|c| parse_scalar(flag, c)).collect()
}

pub fn uniform_vector(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    center
        .iter()
        .map(|c| c + rng.gen_range(-radius..=radius))
        .collect()
}
