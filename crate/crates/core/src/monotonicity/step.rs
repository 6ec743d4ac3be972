use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::scalar_json;
use crate::model::{Covector, GraphPair, OperatorGraph, Point};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Interval<S: Scalar = f64> {
    #[serde(with = "scalar_json")]
    pub lo: S,
    #[serde(with = "scalar_json")]
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: S) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn contains(&self, y: &S) -> bool {
        self.lo <= *y && *y <= self.hi
    }
}

/// `slope * x + intercept` on an open region between breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Piece<S: Scalar = f64> {
    #[serde(with = "scalar_json")]
    pub slope: S,
    #[serde(with = "scalar_json")]
    pub intercept: S,
}

impl<S: Scalar> Piece<S> {
    pub fn constant(v: S) -> Self {
        Piece {
            slope: S::zero(),
            intercept: v,
        }
    }

    pub fn at(&self, x: &S) -> S {
        self.slope.clone() * x.clone() + self.intercept.clone()
    }
}

/// A nondecreasing set-valued function on the line: affine pieces on the
/// open regions cut out by `breakpoints`, and an optional interval value at
/// each breakpoint (`None` leaves the breakpoint out of the domain).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct StepFunction1D<S: Scalar = f64> {
    #[serde(with = "crate::model::certificate::scalar_vec_json")]
    breakpoints: Vec<S>,
    pieces: Vec<Piece<S>>,
    at_breaks: Vec<Option<Interval<S>>>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
struct RawStep<S: Scalar> {
    #[serde(default, with = "crate::model::certificate::scalar_vec_json")]
    breakpoints: Vec<S>,
    pieces: Vec<Piece<S>>,
    #[serde(default)]
    at_breaks: Option<Vec<Option<Interval<S>>>>,
}

impl<'de, S: Scalar> Deserialize<'de> for StepFunction1D<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStep::<S>::deserialize(d)?;
        let n = raw.breakpoints.len();
        StepFunction1D::new(
            raw.breakpoints,
            raw.pieces,
            raw.at_breaks.unwrap_or_else(|| vec![None; n]),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl<S: Scalar> StepFunction1D<S> {
    pub fn new(
        breakpoints: Vec<S>,
        pieces: Vec<Piece<S>>,
        at_breaks: Vec<Option<Interval<S>>>,
    ) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} pieces, found {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if at_breaks.len() != breakpoints.len() {
            return Err(Error::DimensionMismatch {
                expected: breakpoints.len(),
                found: at_breaks.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if pieces.iter().any(|p| p.slope < S::zero()) {
            return Err(Error::Precondition(
                "not monotone: a piece has negative slope".into(),
            ));
        }
        let f = StepFunction1D {
            breakpoints,
            pieces,
            at_breaks,
        };
        for k in 0..f.breakpoints.len() {
            let (l, r) = (f.left_limit(k), f.right_limit(k));
            if l > r {
                return Err(Error::Precondition(format!(
                    "not monotone: jumps down at {}",
                    f.breakpoints[k]
                )));
            }
            if let Some(v) = &f.at_breaks[k] {
                if v.lo > v.hi {
                    return Err(Error::InvalidArgument(format!(
                        "empty value at {}",
                        f.breakpoints[k]
                    )));
                }
                if v.lo < l || v.hi > r {
                    return Err(Error::Precondition(format!(
                        "not monotone: value at {} leaves [{l}, {r}]",
                        f.breakpoints[k]
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Piecewise constant: `levels[k]` on the `k`-th open region.
    pub fn steps(breakpoints: Vec<S>, levels: Vec<S>) -> Result<Self> {
        let n = breakpoints.len();
        Self::new(
            breakpoints,
            levels.into_iter().map(Piece::constant).collect(),
            vec![None; n],
        )
    }

    /// `x -> slope * x + intercept` everywhere.
    pub fn affine(slope: S, intercept: S) -> Result<Self> {
        Self::new(Vec::new(), vec![Piece { slope, intercept }], Vec::new())
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    pub fn at_breaks(&self) -> &[Option<Interval<S>>] {
        &self.at_breaks
    }

    pub fn left_limit(&self, k: usize) -> S {
        self.pieces[k].at(&self.breakpoints[k])
    }

    pub fn right_limit(&self, k: usize) -> S {
        self.pieces[k + 1].at(&self.breakpoints[k])
    }

    /// Region containing `x`: `Ok(k)` for breakpoint `k`, `Err(k)` for the
    /// open piece `k`.
    fn locate(&self, x: &S) -> std::result::Result<usize, usize> {
        self.breakpoints
            .binary_search_by(|b| b.partial_cmp(x).unwrap_or(std::cmp::Ordering::Less))
    }

    /// The value set at `x` (`None` outside the domain).
    pub fn value_at(&self, x: &S) -> Option<Interval<S>> {
        match self.locate(x) {
            Ok(k) => self.at_breaks[k].clone(),
            Err(k) => Some(Interval::point(self.pieces[k].at(x))),
        }
    }

    /// `[φ(x-), φ(x+)]`: the value set of the maximal extension at `x`.
    pub fn limits_at(&self, x: &S) -> Interval<S> {
        match self.locate(x) {
            Ok(k) => Interval {
                lo: self.left_limit(k),
                hi: self.right_limit(k),
            },
            Err(k) => Interval::point(self.pieces[k].at(x)),
        }
    }

    pub fn is_maximal(&self) -> bool {
        (0..self.breakpoints.len()).all(|k| {
            self.at_breaks[k]
                .as_ref()
                .is_some_and(|v| v.lo == self.left_limit(k) && v.hi == self.right_limit(k))
        })
    }

    /// Graph samples at `xs`; breakpoints contribute both interval ends.
    pub fn sample_graph(&self, xs: &[S]) -> Result<OperatorGraph<S>> {
        let mut pairs = Vec::new();
        for x in xs {
            if let Some(v) = self.value_at(x) {
                let p = Point::new(vec![x.clone()])?;
                pairs.push(GraphPair::new(
                    p.clone(),
                    Covector::new(vec![v.lo.clone()])?,
                )?);
                if v.hi != v.lo {
                    pairs.push(GraphPair::new(p, Covector::new(vec![v.hi])?)?);
                }
            }
        }
        OperatorGraph::new(1, pairs)
    }

    /// The unique `x` with `y* ∈ φ̄(x) + λx`, where `φ̄` is the maximal
    /// extension. Exact in the rational backend.
    pub fn solve_shifted(&self, lambda: &S, ystar: &S) -> Result<S> {
        if !(*lambda > S::zero()) {
            return Err(Error::InvalidArgument("lambda must be positive".into()));
        }
        // g(x) = φ̄(x) + λx is strictly increasing; find the region holding y*
        let nb = self.breakpoints.len();
        let mut region = nb;
        for k in 0..nb {
            let b = &self.breakpoints[k];
            let lo = self.left_limit(k) + lambda.clone() * b.clone();
            let hi = self.right_limit(k) + lambda.clone() * b.clone();
            if *ystar < lo {
                region = k;
                break;
            }
            if *ystar <= hi {
                return Ok(b.clone());
            }
        }
        let p = &self.pieces[region];
        Ok((ystar.clone() - p.intercept.clone()) / (p.slope.clone() + lambda.clone()))
    }
}

/// Fills every breakpoint with `[φ(x-), φ(x+)]`, the unique maximal
/// monotone extension.
pub fn maximalize_1d<S: Scalar>(f: &StepFunction1D<S>) -> StepFunction1D<S> {
    let at_breaks = (0..f.breakpoints.len())
        .map(|k| {
            Some(Interval {
                lo: f.left_limit(k),
                hi: f.right_limit(k),
            })
        })
        .collect();
    StepFunction1D {
        breakpoints: f.breakpoints.clone(),
        pieces: f.pieces.clone(),
        at_breaks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotonicity::monotonically_related;
    use crate::scalar::{Rational, Tolerance};

    fn r(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    fn heaviside() -> StepFunction1D<Rational> {
        StepFunction1D::steps(vec![r(0, 1)], vec![r(0, 1), r(1, 1)]).unwrap()
    }

    #[test]
    fn jump_is_filled() {
        let m = maximalize_1d(&heaviside());
        assert_eq!(
            m.value_at(&r(0, 1)),
            Some(Interval {
                lo: r(0, 1),
                hi: r(1, 1)
            })
        );
        assert!(m.is_maximal());
        assert!(!heaviside().is_maximal());
        let half = StepFunction1D::new(
            vec![r(0, 1)],
            vec![Piece::constant(r(0, 1)), Piece::constant(r(1, 1))],
            vec![Some(Interval::point(r(1, 2)))],
        )
        .unwrap();
        assert_eq!(
            maximalize_1d(&half).value_at(&r(0, 1)).unwrap(),
            Interval {
                lo: r(0, 1),
                hi: r(1, 1)
            }
        );
    }

    #[test]
    fn continuous_function_is_unchanged() {
        let f = StepFunction1D::affine(r(2, 1), r(-1, 1)).unwrap();
        assert_eq!(maximalize_1d(&f), f);
        let kink = StepFunction1D::new(
            vec![r(0, 1)],
            vec![
                Piece::constant(r(0, 1)),
                Piece {
                    slope: r(1, 1),
                    intercept: r(0, 1),
                },
            ],
            vec![Some(Interval::point(r(0, 1)))],
        )
        .unwrap();
        assert_eq!(maximalize_1d(&kink), kink);
    }

    #[test]
    fn non_monotone_input_is_rejected() {
        assert!(StepFunction1D::steps(vec![r(0, 1)], vec![r(1, 1), r(0, 1)]).is_err());
        assert!(StepFunction1D::affine(r(-1, 1), r(0, 1)).is_err());
        let outside = StepFunction1D::new(
            vec![r(0, 1)],
            vec![Piece::constant(r(0, 1)), Piece::constant(r(1, 1))],
            vec![Some(Interval::point(r(2, 1)))],
        );
        assert!(outside.is_err());
    }

    #[test]
    fn shifted_solve() {
        let m = maximalize_1d(&heaviside());
        assert_eq!(m.solve_shifted(&r(1, 1), &r(1, 2)).unwrap(), r(0, 1));
        assert_eq!(m.solve_shifted(&r(1, 1), &r(3, 1)).unwrap(), r(2, 1));
        assert_eq!(m.solve_shifted(&r(1, 1), &r(-1, 1)).unwrap(), r(-1, 1));
        let id = StepFunction1D::affine(r(1, 1), r(0, 1)).unwrap();
        assert_eq!(id.solve_shifted(&r(1, 1), &r(4, 1)).unwrap(), r(2, 1));
    }

    #[test]
    fn output_is_maximal_on_probe_grid() {
        let f = StepFunction1D::new(
            vec![r(-1, 1), r(0, 1), r(1, 1)],
            vec![
                Piece {
                    slope: r(1, 2),
                    intercept: r(0, 1),
                },
                Piece::constant(r(0, 1)),
                Piece::constant(r(1, 1)),
                Piece {
                    slope: r(1, 1),
                    intercept: r(1, 1),
                },
            ],
            vec![None, None, Some(Interval::point(r(1, 1)))],
        )
        .unwrap();
        let m = maximalize_1d(&f);
        // the sample is finer than the probe grid so that slopes cannot hide
        // a related point between samples
        let sample: Vec<Rational> = (-128..=128).map(|k| r(k, 64)).collect();
        let g = m.sample_graph(&sample).unwrap();
        let probes: Vec<Rational> = (-15..=15).map(|k| r(k, 8)).collect();
        let tol = Tolerance::exact();
        for x in &probes {
            let v = m.value_at(x).unwrap();
            assert!(v.lo <= v.hi);
            for k in -24..=24 {
                let y = r(k, 8);
                let p = GraphPair::new(
                    Point::new(vec![x.clone()]).unwrap(),
                    Covector::new(vec![y.clone()]).unwrap(),
                )
                .unwrap();
                if monotonically_related(&p, &g, &tol).unwrap().verdict {
                    assert!(v.contains(&y), "({x}, {y}) related but outside {v:?}");
                }
            }
        }
    }
}
