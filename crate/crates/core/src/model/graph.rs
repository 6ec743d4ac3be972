use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::vector::{Covector, Point};
use crate::scalar::Scalar;

/// One element `(x, x*)` of an operator graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct GraphPair<S: Scalar = f64> {
    pub x: Point<S>,
    pub xstar: Covector<S>,
}

impl<S: Scalar> GraphPair<S> {
    pub fn new(x: Point<S>, xstar: Covector<S>) -> Result<Self> {
        xstar.check_dim(x.dim())?;
        Ok(GraphPair { x, xstar })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn to_f64(&self) -> GraphPair<f64> {
        GraphPair {
            x: self.x.to_f64(),
            xstar: self.xstar.to_f64(),
        }
    }
}

impl GraphPair<f64> {
    pub fn from_f64s(x: &[f64], xstar: &[f64]) -> Result<Self> {
        GraphPair::new(Point::from_f64s(x)?, Covector::from_f64s(xstar)?)
    }
}

/// A finite sample of a set-valued operator's graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct OperatorGraph<S: Scalar = f64> {
    dim: usize,
    pairs: Vec<GraphPair<S>>,
}

impl<S: Scalar> OperatorGraph<S> {
    pub fn new(dim: usize, pairs: Vec<GraphPair<S>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for p in &pairs {
            p.x.check_dim(dim)?;
            p.xstar.check_dim(dim)?;
        }
        Ok(OperatorGraph { dim, pairs })
    }

    /// Infers the dimension from the first pair.
    pub fn from_pairs(pairs: Vec<GraphPair<S>>) -> Result<Self> {
        let dim = pairs.first().map(|p| p.dim()).ok_or(Error::EmptyGraph)?;
        Self::new(dim, pairs)
    }

    pub fn empty(dim: usize) -> Self {
        OperatorGraph {
            dim: dim.max(1),
            pairs: Vec::new(),
        }
    }

    /// Samples `op` at the given points.
    pub fn sample(points: &[Point<S>], op: impl Fn(&Point<S>) -> Covector<S>) -> Result<Self> {
        let pairs = points
            .iter()
            .map(|x| GraphPair::new(x.clone(), op(x)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(pairs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[GraphPair<S>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, pair: GraphPair<S>) -> Result<()> {
        pair.x.check_dim(self.dim)?;
        self.pairs.push(pair);
        Ok(())
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.pairs.is_empty() {
            Err(Error::EmptyGraph)
        } else {
            Ok(())
        }
    }

    pub fn to_f64(&self) -> OperatorGraph<f64> {
        OperatorGraph {
            dim: self.dim,
            pairs: self.pairs.iter().map(|p| p.to_f64()).collect(),
        }
    }
}

impl OperatorGraph<f64> {
    pub fn to_scalar<T: Scalar>(&self) -> Result<OperatorGraph<T>> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                Ok(GraphPair {
                    x: p.x.to_scalar()?,
                    xstar: p.xstar.to_scalar()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorGraph {
            dim: self.dim,
            pairs,
        })
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
struct RawGraph<S: Scalar> {
    dim: usize,
    pairs: Vec<GraphPair<S>>,
}

impl<'de, S: Scalar> Deserialize<'de> for OperatorGraph<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGraph::<S>::deserialize(d)?;
        OperatorGraph::new(raw.dim, raw.pairs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn rejects_mixed_dimensions() {
        let a = GraphPair::from_f64s(&[0.0], &[1.0]).unwrap();
        let b = GraphPair::from_f64s(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(
            OperatorGraph::from_pairs(vec![a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(
            GraphPair::new(Point::<f64>::from_i64s(&[1]), Covector::from_i64s(&[1, 2])).is_err()
        );
    }

    #[test]
    fn json_encoding() {
        let text = r#"{"dim": 1, "pairs": [{"x": ["1/2"], "xstar": [3]}]}"#;
        let g: OperatorGraph<Rational> = serde_json::from_str(text).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.pairs()[0].x.coords()[0], Rational::ratio(1, 2));
        let bad = r#"{"dim": 2, "pairs": [{"x": [1], "xstar": [3]}]}"#;
        assert!(serde_json::from_str::<OperatorGraph<f64>>(bad).is_err());
    }
}
