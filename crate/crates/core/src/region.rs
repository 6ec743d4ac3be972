//! Closed convex regions: boxes, norm balls, halfspace intersections and a
//! paraboloid epigraph. Regions live either in the primal space or, as
//! windows and constraint sets, in the dual space; coordinates are plain
//! slices so both uses share one type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::{plain_json, scalar_json, scalar_vec_json};
use crate::model::norm::Norm;
use crate::model::vector::dot;
use crate::polyhedral::{self, Halfspace, LpValue};
use crate::scalar::{default_tolerance, Scalar, Tolerance};

/// Halfspace systems up to this dimension are projected by active sets.
const ACTIVE_SET_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
#[serde(try_from = "RawRegion<S>")]
pub enum ConvexRegion<S: Scalar = f64> {
    Box {
        #[serde(with = "scalar_vec_json")]
        lo: Vec<S>,
        #[serde(with = "scalar_vec_json")]
        hi: Vec<S>,
    },
    Ball {
        norm: Norm,
        #[serde(with = "scalar_json")]
        radius: S,
        #[serde(with = "scalar_vec_json")]
        center: Vec<S>,
    },
    Halfspaces {
        dim: usize,
        rows: Vec<Halfspace<S>>,
    },
    /// `{(u, s) : s >= curvature * |u|^2}`, the last coordinate being `s`.
    Epigraph {
        dim: usize,
        #[serde(with = "scalar_json")]
        curvature: S,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "S: Scalar"))]
enum RawRegion<S: Scalar> {
    Box {
        #[serde(with = "scalar_vec_json")]
        lo: Vec<S>,
        #[serde(with = "scalar_vec_json")]
        hi: Vec<S>,
    },
    Ball {
        norm: Norm,
        #[serde(with = "scalar_json")]
        radius: S,
        #[serde(with = "scalar_vec_json")]
        center: Vec<S>,
    },
    Halfspaces {
        #[serde(deserialize_with = "plain_json::deserialize")]
        dim: usize,
        rows: Vec<Halfspace<S>>,
    },
    Epigraph {
        #[serde(deserialize_with = "plain_json::deserialize")]
        dim: usize,
        #[serde(with = "scalar_json")]
        curvature: S,
    },
}

impl<S: Scalar> TryFrom<RawRegion<S>> for ConvexRegion<S> {
    type Error = Error;

    fn try_from(raw: RawRegion<S>) -> Result<Self> {
        match raw {
            RawRegion::Box { lo, hi } => ConvexRegion::boxed(lo, hi),
            RawRegion::Ball {
                norm,
                radius,
                center,
            } => ConvexRegion::ball(norm, radius, center),
            RawRegion::Halfspaces { dim, rows } => ConvexRegion::halfspaces(dim, rows),
            RawRegion::Epigraph { dim, curvature } => ConvexRegion::epigraph(dim, curvature),
        }
    }
}

fn f64s<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|c| c.to_f64()).collect()
}

fn from_f64s<S: Scalar>(v: &[f64]) -> Result<Vec<S>> {
    v.iter().map(|&c| S::from_f64(c)).collect()
}

fn check_finite<S: Scalar>(v: &[S]) -> Result<()> {
    match v.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

impl<S: Scalar> ConvexRegion<S> {
    pub fn boxed(lo: Vec<S>, hi: Vec<S>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        check_finite(&lo)?;
        check_finite(&hi)?;
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| l > h) {
            return Err(Error::EmptyRegion(format!("box has lo > hi on axis {i}")));
        }
        Ok(ConvexRegion::Box { lo, hi })
    }

    /// The box `[-r, r]^dim`.
    pub fn cube(dim: usize, r: S) -> Result<Self> {
        Self::boxed(vec![-r.clone(); dim], vec![r; dim])
    }

    pub fn ball(norm: Norm, radius: S, center: Vec<S>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::ZeroDimension);
        }
        check_finite(&center)?;
        norm.validate()?;
        if let Norm::WeightedL2 { weights } = &norm {
            if weights.len() != center.len() {
                return Err(Error::DimensionMismatch {
                    expected: center.len(),
                    found: weights.len(),
                });
            }
        }
        if !radius.is_finite() || radius < S::zero() {
            return Err(Error::EmptyRegion(
                "ball radius must be finite and nonnegative".into(),
            ));
        }
        Ok(ConvexRegion::Ball {
            norm,
            radius,
            center,
        })
    }

    /// Validated by an exact feasibility check.
    pub fn halfspaces(dim: usize, rows: Vec<Halfspace<S>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for r in &rows {
            if r.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.normal.len(),
                });
            }
            check_finite(&r.normal)?;
            check_finite(std::slice::from_ref(&r.offset))?;
        }
        let region = ConvexRegion::Halfspaces { dim, rows };
        if region.feasible_point()?.is_none() {
            return Err(Error::EmptyRegion("halfspace system is infeasible".into()));
        }
        Ok(region)
    }

    pub fn epigraph(dim: usize, curvature: S) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(
                "an epigraph needs at least two coordinates".into(),
            ));
        }
        if !(curvature > S::zero()) {
            return Err(Error::InvalidArgument(
                "epigraph curvature must be positive".into(),
            ));
        }
        Ok(ConvexRegion::Epigraph { dim, curvature })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexRegion::Box { lo, .. } => lo.len(),
            ConvexRegion::Ball { center, .. } => center.len(),
            ConvexRegion::Halfspaces { dim, .. } | ConvexRegion::Epigraph { dim, .. } => *dim,
        }
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexRegion::Box { .. } | ConvexRegion::Ball { .. } => true,
            ConvexRegion::Epigraph { .. } => false,
            ConvexRegion::Halfspaces { .. } => self.bounding_box().is_ok(),
        }
    }

    fn feasible_point(&self) -> Result<Option<Vec<S>>> {
        match self {
            ConvexRegion::Halfspaces { dim, rows } => {
                if S::EXACT {
                    polyhedral::feasible_point(rows, *dim, &Tolerance::exact())
                } else {
                    polyhedral::feasible_point_exact(rows, *dim)
                }
            }
            _ => Ok(Some(self.barycenter())),
        }
    }

    pub fn contains(&self, x: &[S], tol: &Tolerance) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConvexRegion::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| {
                (v.clone() - l.clone()).nonneg(tol) && (h.clone() - v.clone()).nonneg(tol)
            }),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => {
                let d: Vec<S> = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                if S::EXACT {
                    norm.le(&d, radius)
                } else {
                    norm.eval_slice(&f64s(&d))
                        <= radius.to_f64() + tol.abs + tol.rel * radius.to_f64().abs()
                }
            }
            ConvexRegion::Halfspaces { rows, .. } => rows.iter().all(|r| r.contains(x, tol)),
            ConvexRegion::Epigraph { curvature, .. } => {
                let (u, s) = x.split_at(x.len() - 1);
                (s[0].clone() - curvature.clone() * dot(u, u)).nonneg(tol)
            }
        }
    }

    /// Membership in the interior (strict inequalities).
    pub fn contains_open(&self, x: &[S], tol: &Tolerance) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConvexRegion::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| {
                (v.clone() - l.clone()).positive(tol) && (h.clone() - v.clone()).positive(tol)
            }),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => {
                let d: Vec<S> = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                if S::EXACT {
                    norm.lt(&d, radius)
                } else {
                    norm.eval_slice(&f64s(&d)) < radius.to_f64() - tol.abs
                }
            }
            ConvexRegion::Halfspaces { rows, .. } => rows.iter().all(|r| r.slack(x).positive(tol)),
            ConvexRegion::Epigraph { curvature, .. } => {
                let (u, s) = x.split_at(x.len() - 1);
                (s[0].clone() - curvature.clone() * dot(u, u)).positive(tol)
            }
        }
    }

    /// A central point: box or ball center, the vertex average of a bounded
    /// polytope (a feasible point otherwise), the origin for the epigraph.
    pub fn barycenter(&self) -> Vec<S> {
        let two = S::from_i64(2);
        match self {
            ConvexRegion::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (l.clone() + h.clone()) / two.clone())
                .collect(),
            ConvexRegion::Ball { center, .. } => center.clone(),
            ConvexRegion::Halfspaces { dim, rows } => {
                let verts =
                    polyhedral::vertices(rows, *dim, &default_tolerance::<S>()).unwrap_or_default();
                if !verts.is_empty() && self.is_bounded() {
                    let k = S::from_i64(verts.len() as i64);
                    (0..*dim)
                        .map(|j| {
                            verts.iter().fold(S::zero(), |acc, v| acc + v[j].clone()) / k.clone()
                        })
                        .collect()
                } else {
                    self.feasible_point()
                        .ok()
                        .flatten()
                        .unwrap_or_else(|| vec![S::zero(); *dim])
                }
            }
            ConvexRegion::Epigraph { dim, .. } => vec![S::zero(); *dim],
        }
    }

    /// Coordinate bounds `(lo, hi)` of the region; errors when unbounded.
    pub fn bounding_box(&self) -> Result<(Vec<S>, Vec<S>)> {
        match self {
            ConvexRegion::Box { lo, hi } => Ok((lo.clone(), hi.clone())),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => {
                let reach: Vec<S> = match norm {
                    Norm::WeightedL2 { weights } => weights
                        .iter()
                        .map(|w| S::from_f64(radius.to_f64() / w.sqrt()))
                        .collect::<Result<_>>()?,
                    _ => vec![radius.clone(); center.len()],
                };
                Ok((
                    center
                        .iter()
                        .zip(&reach)
                        .map(|(c, r)| c.clone() - r.clone())
                        .collect(),
                    center
                        .iter()
                        .zip(&reach)
                        .map(|(c, r)| c.clone() + r.clone())
                        .collect(),
                ))
            }
            ConvexRegion::Halfspaces { dim, rows } => {
                let mut lo = Vec::with_capacity(*dim);
                let mut hi = Vec::with_capacity(*dim);
                for j in 0..*dim {
                    let mut e = vec![S::zero(); *dim];
                    e[j] = S::one();
                    hi.push(optimum(rows, &e)?);
                    e[j] = -S::one();
                    lo.push(-optimum(rows, &e)?);
                }
                Ok((lo, hi))
            }
            ConvexRegion::Epigraph { .. } => {
                Err(Error::Unsupported("the epigraph is unbounded".into()))
            }
        }
    }

    /// The system of halfspaces describing a polyhedral region.
    pub fn as_halfspaces(&self) -> Option<Vec<Halfspace<S>>> {
        let d = self.dim();
        let unit = |j: usize, s: S| {
            let mut n = vec![S::zero(); d];
            n[j] = s;
            n
        };
        match self {
            ConvexRegion::Box { lo, hi } => Some(
                (0..d)
                    .flat_map(|j| {
                        [
                            Halfspace::new(unit(j, S::one()), hi[j].clone()),
                            Halfspace::new(unit(j, -S::one()), -lo[j].clone()),
                        ]
                    })
                    .collect(),
            ),
            ConvexRegion::Ball {
                norm: Norm::Sup,
                radius,
                center,
            } => {
                let lo = center.iter().map(|c| c.clone() - radius.clone()).collect();
                let hi = center.iter().map(|c| c.clone() + radius.clone()).collect();
                ConvexRegion::Box { lo, hi }.as_halfspaces()
            }
            ConvexRegion::Ball {
                norm: Norm::L1,
                radius,
                center,
            } if d <= 12 => Some(
                (0..1usize << d)
                    .map(|mask| {
                        let n: Vec<S> = (0..d)
                            .map(|j| {
                                if mask >> j & 1 == 1 {
                                    -S::one()
                                } else {
                                    S::one()
                                }
                            })
                            .collect();
                        let off = radius.clone() + dot(&n, center);
                        Halfspace::new(n, off)
                    })
                    .collect(),
            ),
            ConvexRegion::Halfspaces { rows, .. } => Some(rows.clone()),
            _ => None,
        }
    }

    /// Support function `sup_{c in C} ⟨a, c⟩`; `None` is `+inf`.
    ///
    /// Exact for boxes, polyhedra, sup/ℓ1 balls and the epigraph; the
    /// Euclidean-type balls round through floats in the exact backend.
    pub fn support(&self, a: &[S]) -> Result<Option<S>> {
        self.check_dim(a.len())?;
        Ok(match self {
            ConvexRegion::Box { lo, hi } => Some(a.iter().zip(lo.iter().zip(hi)).fold(
                S::zero(),
                |acc, (ai, (l, h))| {
                    acc + if *ai > S::zero() {
                        ai.clone() * h.clone()
                    } else {
                        ai.clone() * l.clone()
                    }
                },
            )),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => {
                let dual = norm.dual();
                let dn = match dual {
                    Norm::Sup => a.iter().fold(S::zero(), |m, c| S::max_of(m, c.abs_val())),
                    Norm::L1 => a.iter().fold(S::zero(), |acc, c| acc + c.abs_val()),
                    _ => S::from_f64(dual.eval_slice(&f64s(a)))?,
                };
                Some(dot(a, center) + radius.clone() * dn)
            }
            ConvexRegion::Halfspaces { rows, .. } => match polyhedral::maximize_exact(rows, a)? {
                LpValue::Optimal { value, .. } => Some(value),
                LpValue::Unbounded => None,
                LpValue::Infeasible => {
                    return Err(Error::EmptyRegion("halfspace system is infeasible".into()))
                }
            },
            ConvexRegion::Epigraph { curvature, .. } => {
                let (u, b) = a.split_at(a.len() - 1);
                let uu = dot(u, u);
                if b[0] < S::zero() {
                    Some(uu / (S::from_i64(4) * curvature.clone() * (-b[0].clone())))
                } else if b[0].is_zero() && uu.is_zero() {
                    Some(S::zero())
                } else {
                    None
                }
            }
        })
    }

    /// A maximizer of `⟨a, ·⟩` over the region, when the supremum is attained.
    pub fn support_point(&self, a: &[S]) -> Result<Option<Vec<S>>> {
        self.check_dim(a.len())?;
        Ok(match self {
            ConvexRegion::Box { lo, hi } => Some(
                a.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(ai, (l, h))| {
                        if *ai >= S::zero() {
                            h.clone()
                        } else {
                            l.clone()
                        }
                    })
                    .collect(),
            ),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => {
                if a.iter().all(|c| c.is_zero()) {
                    return Ok(Some(center.clone()));
                }
                let dir = match norm {
                    Norm::Sup => a
                        .iter()
                        .map(|c| if *c >= S::zero() { S::one() } else { -S::one() })
                        .collect(),
                    Norm::L1 => {
                        let (j, _) =
                            a.iter()
                                .enumerate()
                                .fold((0, S::zero()), |(bj, bv), (j, c)| {
                                    if c.abs_val() > bv {
                                        (j, c.abs_val())
                                    } else {
                                        (bj, bv)
                                    }
                                });
                        let mut e = vec![S::zero(); a.len()];
                        e[j] = if a[j] > S::zero() {
                            S::one()
                        } else {
                            -S::one()
                        };
                        e
                    }
                    _ => {
                        // the maximizer of <a, v> on the unit ball is J*(a)/|a|_*
                        let af = f64s(a);
                        let dual = norm.dual();
                        let dn = dual.eval_slice(&af);
                        let v = crate::duality::dualmap::smooth_duality_map(&dual, &af);
                        from_f64s(&v.iter().map(|c| c / dn).collect::<Vec<_>>())?
                    }
                };
                Some(
                    center
                        .iter()
                        .zip(dir)
                        .map(|(c, v)| c.clone() + radius.clone() * v)
                        .collect(),
                )
            }
            ConvexRegion::Halfspaces { rows, .. } => match polyhedral::maximize_exact(rows, a)? {
                LpValue::Optimal { point, .. } => Some(point),
                _ => None,
            },
            ConvexRegion::Epigraph { curvature, .. } => {
                let (u, b) = a.split_at(a.len() - 1);
                if b[0] < S::zero() {
                    let k = S::from_i64(2) * curvature.clone() * b[0].clone();
                    let pt: Vec<S> = u.iter().map(|c| -c.clone() / k.clone()).collect();
                    let s = curvature.clone() * dot(&pt, &pt);
                    let mut out = pt;
                    out.push(s);
                    Some(out)
                } else if b[0].is_zero() && u.iter().all(|c| c.is_zero()) {
                    Some(vec![S::zero(); a.len()])
                } else {
                    None
                }
            }
        })
    }

    /// Euclidean projection onto the region.
    pub fn project(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_dim(x.len())?;
        match self {
            ConvexRegion::Box { lo, hi } => Ok(x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| S::min_of(S::max_of(v.clone(), l.clone()), h.clone()))
                .collect()),
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => match norm {
                Norm::Sup => {
                    let (lo, hi) = self.bounding_box()?;
                    ConvexRegion::Box { lo, hi }.project(x)
                }
                _ if self.contains(x, &Tolerance::exact()) => Ok(x.to_vec()),
                Norm::Euclidean => {
                    let d: Vec<f64> = x
                        .iter()
                        .zip(center)
                        .map(|(a, b)| (a.clone() - b.clone()).to_f64())
                        .collect();
                    let len = Norm::Euclidean.eval_slice(&d);
                    let r = radius.to_f64();
                    let out: Vec<f64> = center
                        .iter()
                        .zip(&d)
                        .map(|(c, v)| c.to_f64() + v * r / len)
                        .collect();
                    from_f64s(&out)
                }
                Norm::WeightedL2 { weights } => {
                    let d: Vec<f64> = x
                        .iter()
                        .zip(center)
                        .map(|(a, b)| (a.clone() - b.clone()).to_f64())
                        .collect();
                    let p = project_ellipsoid(&d, weights, radius.to_f64());
                    from_f64s(
                        &center
                            .iter()
                            .zip(&p)
                            .map(|(c, v)| c.to_f64() + v)
                            .collect::<Vec<_>>(),
                    )
                }
                Norm::L1 => {
                    let rows = self
                        .as_halfspaces()
                        .ok_or_else(|| Error::TooLarge("l1 ball in high dimension".into()))?;
                    project_polyhedron(&rows, x)
                }
                Norm::Lp { .. } => Err(Error::Unsupported(
                    "Euclidean projection onto an lp ball".into(),
                )),
            },
            ConvexRegion::Halfspaces { rows, .. } => project_polyhedron(rows, x),
            ConvexRegion::Epigraph { curvature, .. } => {
                if self.contains(x, &Tolerance::exact()) {
                    return Ok(x.to_vec());
                }
                let xf = f64s(x);
                let p = project_paraboloid(&xf, curvature.to_f64());
                from_f64s(&p)
            }
        }
    }

    /// Euclidean distance to the region.
    pub fn distance(&self, x: &[S]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(x.iter()
            .zip(&p)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().powi(2))
            .sum::<f64>()
            .sqrt())
    }

    pub fn to_f64(&self) -> ConvexRegion<f64> {
        match self {
            ConvexRegion::Box { lo, hi } => ConvexRegion::Box {
                lo: f64s(lo),
                hi: f64s(hi),
            },
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => ConvexRegion::Ball {
                norm: norm.clone(),
                radius: radius.to_f64(),
                center: f64s(center),
            },
            ConvexRegion::Halfspaces { dim, rows } => ConvexRegion::Halfspaces {
                dim: *dim,
                rows: rows.iter().map(|r| r.to_f64()).collect(),
            },
            ConvexRegion::Epigraph { dim, curvature } => ConvexRegion::Epigraph {
                dim: *dim,
                curvature: curvature.to_f64(),
            },
        }
    }
}

impl ConvexRegion<f64> {
    pub fn to_scalar<T: Scalar>(&self) -> Result<ConvexRegion<T>> {
        Ok(match self {
            ConvexRegion::Box { lo, hi } => ConvexRegion::Box {
                lo: from_f64s(lo)?,
                hi: from_f64s(hi)?,
            },
            ConvexRegion::Ball {
                norm,
                radius,
                center,
            } => ConvexRegion::Ball {
                norm: norm.clone(),
                radius: T::from_f64(*radius)?,
                center: from_f64s(center)?,
            },
            ConvexRegion::Halfspaces { dim, rows } => ConvexRegion::Halfspaces {
                dim: *dim,
                rows: rows.iter().map(|r| r.to_scalar()).collect::<Result<_>>()?,
            },
            ConvexRegion::Epigraph { dim, curvature } => ConvexRegion::Epigraph {
                dim: *dim,
                curvature: T::from_f64(*curvature)?,
            },
        })
    }
}

fn optimum<S: Scalar>(rows: &[Halfspace<S>], objective: &[S]) -> Result<S> {
    match polyhedral::maximize_exact(rows, objective)? {
        LpValue::Optimal { value, .. } => Ok(value),
        LpValue::Unbounded => Err(Error::Unsupported("the polyhedron is unbounded".into())),
        LpValue::Infeasible => Err(Error::EmptyRegion("halfspace system is infeasible".into())),
    }
}

/// Linear maximization, carried out exactly even for float data.
fn project_polyhedron<S: Scalar>(rows: &[Halfspace<S>], x: &[S]) -> Result<Vec<S>> {
    let tol = default_tolerance::<S>();
    if x.len() <= ACTIVE_SET_MAX_DIM || S::EXACT {
        match polyhedral::project_active_set(rows, x, &tol) {
            Ok(Some(p)) => return Ok(p),
            Ok(None) => return Err(Error::EmptyRegion("halfspace system is infeasible".into())),
            Err(Error::TooLarge(_)) if !S::EXACT => {}
            Err(e) => return Err(e),
        }
    }
    let rf: Vec<Halfspace<f64>> = rows.iter().map(|r| r.to_f64()).collect();
    let p = polyhedral::project_dykstra(&rf, &f64s(x), 1e-10, 100_000)?;
    from_f64s(&p)
}

/// Projection of `d` onto `{v : Σ w_i v_i^2 <= r^2}` for `d` outside it.
fn project_ellipsoid(d: &[f64], w: &[f64], r: f64) -> Vec<f64> {
    let at = |mu: f64| -> Vec<f64> { d.iter().zip(w).map(|(v, wi)| v / (1.0 + mu * wi)).collect() };
    let excess =
        |mu: f64| -> f64 { at(mu).iter().zip(w).map(|(v, wi)| wi * v * v).sum::<f64>() - r * r };
    let mut hi = 1.0;
    while excess(hi) > 0.0 && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

/// Projection onto `{(u, s) : s >= c|u|^2}` for a point outside it.
fn project_paraboloid(x: &[f64], c: f64) -> Vec<f64> {
    let (u, s) = x.split_at(x.len() - 1);
    let s0 = s[0];
    let uu: f64 = u.iter().map(|v| v * v).sum();
    // with multiplier mu: u = u0 / (1 + 2 c mu), s = s0 + mu, s = c |u|^2
    let gap = |mu: f64| s0 + mu - c * uu / (1.0 + 2.0 * c * mu).powi(2);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while gap(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 1.0 + 2.0 * c * hi;
    let mut out: Vec<f64> = u.iter().map(|v| v / k).collect();
    let s = c * out.iter().map(|v| v * v).sum::<f64>();
    out.push(s);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    #[test]
    fn box_and_ball_projection_examples() {
        let b = ConvexRegion::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(b.project(&[2.0, 0.5]).unwrap(), vec![1.0, 0.5]);
        let ball = ConvexRegion::ball(Norm::Euclidean, 1.0, vec![0.0, 0.0]).unwrap();
        let p = ball.project(&[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn halfspace_projection_is_exact_in_rationals() {
        let c = ConvexRegion::halfspaces(2, vec![Halfspace::new(vec![r(1, 1), r(1, 1)], r(1, 1))])
            .unwrap();
        assert_eq!(
            c.project(&[r(1, 1), r(1, 1)]).unwrap(),
            vec![r(1, 2), r(1, 2)]
        );
    }

    #[test]
    fn infeasible_system_is_rejected() {
        let rows = vec![
            Halfspace::new(vec![1.0], 0.0),
            Halfspace::new(vec![-1.0], -1.0),
        ];
        assert!(matches!(
            ConvexRegion::halfspaces(1, rows),
            Err(Error::EmptyRegion(_))
        ));
        assert!(ConvexRegion::boxed(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn support_functions() {
        let interval = ConvexRegion::boxed(vec![r(-1, 1)], vec![r(1, 1)]).unwrap();
        assert_eq!(interval.support(&[r(-3, 1)]).unwrap(), Some(r(3, 1)));
        let epi = ConvexRegion::epigraph(2, r(1, 1)).unwrap();
        // sup over s >= u^2 of u - s = 1/4
        assert_eq!(epi.support(&[r(1, 1), r(-1, 1)]).unwrap(), Some(r(1, 4)));
        assert_eq!(epi.support(&[r(1, 1), r(0, 1)]).unwrap(), None);
        assert_eq!(epi.support(&[r(0, 1), r(1, 1)]).unwrap(), None);
        assert_eq!(epi.support(&[r(0, 1), r(0, 1)]).unwrap(), Some(r(0, 1)));
        let pt = epi.support_point(&[r(1, 1), r(-1, 1)]).unwrap().unwrap();
        assert_eq!(pt, vec![r(1, 2), r(1, 4)]);
        let l1 = ConvexRegion::ball(Norm::L1, r(1, 1), vec![r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(l1.support(&[r(2, 1), r(-3, 1)]).unwrap(), Some(r(3, 1)));
        let hs = ConvexRegion::halfspaces(2, l1.as_halfspaces().unwrap()).unwrap();
        assert_eq!(hs.support(&[r(2, 1), r(-3, 1)]).unwrap(), Some(r(3, 1)));
    }

    #[test]
    fn paraboloid_projection_satisfies_optimality() {
        let epi = ConvexRegion::epigraph(2, 1.0).unwrap();
        let x = [2.0, 0.0];
        let p = epi.project(&x).unwrap();
        assert!((p[1] - p[0] * p[0]).abs() < 1e-12);
        // x - p is normal to the boundary: proportional to (2u, -1)
        let n = [2.0 * p[0], -1.0];
        let d = [x[0] - p[0], x[1] - p[1]];
        assert!((d[0] * n[1] - d[1] * n[0]).abs() < 1e-9);
    }

    #[test]
    fn weighted_ball_projection_lands_on_boundary() {
        let ball = ConvexRegion::ball(
            Norm::WeightedL2 {
                weights: vec![1.0, 4.0],
            },
            1.0,
            vec![0.0, 0.0],
        )
        .unwrap();
        let p = ball.project(&[3.0, 2.0]).unwrap();
        assert!((p[0] * p[0] + 4.0 * p[1] * p[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounding_box_and_barycenter_of_polytope() {
        let tri = ConvexRegion::halfspaces(
            2,
            vec![
                Halfspace::new(vec![r(-1, 1), r(0, 1)], r(0, 1)),
                Halfspace::new(vec![r(0, 1), r(-1, 1)], r(0, 1)),
                Halfspace::new(vec![r(1, 1), r(1, 1)], r(1, 1)),
            ],
        )
        .unwrap();
        let (lo, hi) = tri.bounding_box().unwrap();
        assert_eq!((lo, hi), (vec![r(0, 1), r(0, 1)], vec![r(1, 1), r(1, 1)]));
        assert_eq!(tri.barycenter(), vec![r(1, 3), r(1, 3)]);
    }

    #[test]
    fn json_is_validated() {
        let ok: ConvexRegion =
            serde_json::from_str(r#"{"kind":"box","lo":[0,0],"hi":[1,1]}"#).unwrap();
        assert_eq!(ok.dim(), 2);
        assert!(
            serde_json::from_str::<ConvexRegion>(r#"{"kind":"box","lo":[2],"hi":[1]}"#).is_err()
        );
        let ball: ConvexRegion<Rational> = serde_json::from_str(
            r#"{"kind":"ball","norm":{"kind":"sup"},"radius":"1/2","center":[0]}"#,
        )
        .unwrap();
        assert!(ball.contains(&[r(1, 2)], &Tolerance::exact()));
    }
}
