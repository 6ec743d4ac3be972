use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::function::{dotf, ConvexFunction};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{Covector, Norm, Point};
use crate::polyhedral::{self, Halfspace, LpValue};
use crate::region::ConvexRegion;
use crate::scalar::{Extended, Tolerance};

/// `f*(s)` with a maximizer of `⟨s, y⟩ - f(y)` when it is attained.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ConjugatePoint {
    pub value: Extended,
    pub argmax: Option<Vec<f64>>,
}

impl ConjugatePoint {
    fn finite(value: f64, argmax: Vec<f64>) -> Self {
        ConjugatePoint {
            value: Extended::Finite(value),
            argmax: Some(argmax),
        }
    }

    fn infinite() -> Self {
        ConjugatePoint {
            value: Extended::PosInf,
            argmax: None,
        }
    }
}

/// Eigenvalues below this fraction of the largest count as zero.
const NULL_EIGEN: f64 = 1e-12;

fn eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
    let d = matrix.len();
    let m = DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
    let e = SymmetricEigen::new(m);
    let vals: Vec<f64> = e.eigenvalues.iter().cloned().collect();
    let vecs: Vec<Vec<f64>> = (0..d)
        .map(|k| e.eigenvectors.column(k).iter().cloned().collect())
        .collect();
    let top = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (vals, vecs, top)
}

/// Unit vector `d` with `⟨s, d⟩ = |s|_*`.
fn unit_direction(norm: &Norm, s: &[f64]) -> Result<Vec<f64>> {
    let ball = ConvexRegion::ball(norm.clone(), 1.0, vec![0.0; s.len()])?;
    Ok(ball.support_point(s)?.expect("balls are bounded"))
}

/// Max-affine pieces as the lifted system `⟨a_j, x⟩ - t <= -b_j` in `(x, t)`.
fn lifted_rows(slopes: &[&[f64]], intercepts: &[f64]) -> Vec<Halfspace<f64>> {
    slopes
        .iter()
        .zip(intercepts)
        .map(|(a, b)| {
            let mut n = a.to_vec();
            n.push(-1.0);
            Halfspace::new(n, -b)
        })
        .collect()
}

fn pieces(f: &ConvexFunction) -> Option<(Vec<&[f64]>, Vec<f64>)> {
    match f {
        ConvexFunction::Support { points } => Some((
            points.iter().map(|a| a.coords()).collect(),
            vec![0.0; points.len()],
        )),
        ConvexFunction::MaxAffine { slopes, intercepts } => Some((
            slopes.iter().map(|a| a.coords()).collect(),
            intercepts.clone(),
        )),
        _ => None,
    }
}

/// Closed-form (or exact LP) conjugate at `s`; `None` when `f` has neither.
pub(crate) fn conjugate_point(f: &ConvexFunction, s: &[f64]) -> Result<Option<ConjugatePoint>> {
    f.check_dim(s.len())?;
    let d = s.len();
    let tol = Tolerance::default();
    Ok(Some(match f {
        ConvexFunction::Quadratic {
            matrix,
            vector,
            constant,
        } => {
            let (vals, vecs, top) = eigen(matrix);
            let r: Vec<f64> = s.iter().zip(vector).map(|(a, b)| a - b).collect();
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut y = vec![0.0; d];
            let mut value = -constant;
            for (lam, v) in vals.iter().zip(&vecs) {
                let c = dotf(&r, v);
                if *lam <= NULL_EIGEN * top {
                    if c.abs() > 1e-9 * (1.0 + rn) {
                        return Ok(Some(ConjugatePoint::infinite()));
                    }
                } else {
                    value += 0.5 * c * c / lam;
                    y.iter_mut().zip(v).for_each(|(yi, vi)| *yi += c / lam * vi);
                }
            }
            ConjugatePoint::finite(value, y)
        }
        ConvexFunction::NormFn {
            norm,
            scale,
            squared,
            ..
        } => {
            let dn = norm.dual().eval_slice(s);
            if *squared {
                let u = if dn == 0.0 {
                    vec![0.0; d]
                } else {
                    unit_direction(norm, s)?
                };
                ConjugatePoint::finite(
                    dn * dn / (2.0 * scale),
                    u.iter().map(|v| v * dn / scale).collect(),
                )
            } else if dn <= scale * (1.0 + 1e-12) + tol.abs {
                ConjugatePoint::finite(0.0, vec![0.0; d])
            } else {
                ConjugatePoint::infinite()
            }
        }
        ConvexFunction::Indicator { set } => match set.support(s)? {
            Some(v) => ConjugatePoint {
                value: Extended::Finite(v),
                argmax: set.support_point(s)?,
            },
            None => ConjugatePoint::infinite(),
        },
        ConvexFunction::RegionSupport { set } => {
            if set.contains(s, &tol) {
                ConjugatePoint::finite(0.0, vec![0.0; d])
            } else {
                ConjugatePoint::infinite()
            }
        }
        ConvexFunction::Support { .. } | ConvexFunction::MaxAffine { .. } => {
            let (slopes, intercepts) = pieces(f).expect("piecewise affine");
            let rows = lifted_rows(&slopes, &intercepts);
            let mut obj = s.to_vec();
            obj.push(-1.0);
            match polyhedral::maximize_exact(&rows, &obj) {
                Ok(LpValue::Optimal { value, point }) => {
                    ConjugatePoint::finite(value, point[..d].to_vec())
                }
                Ok(LpValue::Unbounded) => ConjugatePoint::infinite(),
                Ok(LpValue::Infeasible) => unreachable!("a max-affine epigraph is nonempty"),
                Err(Error::TooLarge(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        ConvexFunction::NegSqrt { shifts } => {
            if s.iter().any(|v| *v >= 0.0) {
                ConjugatePoint::infinite()
            } else {
                // sup_t s t + sqrt(a + t) is attained at t = 1/(4 s^2) - a
                let value = s
                    .iter()
                    .zip(shifts)
                    .map(|(v, a)| -1.0 / (4.0 * v) - a * v)
                    .sum();
                let y = s
                    .iter()
                    .zip(shifts)
                    .map(|(v, a)| 1.0 / (4.0 * v * v) - a)
                    .collect();
                ConjugatePoint::finite(value, y)
            }
        }
        ConvexFunction::AffineShift {
            base,
            shift,
            slope,
            constant,
        } => {
            let r: Vec<f64> = s.iter().zip(slope.coords()).map(|(a, b)| a - b).collect();
            match conjugate_point(base, &r)? {
                None => return Ok(None),
                Some(cp) => {
                    let off = dotf(&r, shift.coords()) - constant;
                    ConjugatePoint {
                        value: match cp.value {
                            Extended::Finite(v) => Extended::Finite(v + off),
                            other => other,
                        },
                        argmax: cp
                            .argmax
                            .map(|z| z.iter().zip(shift.coords()).map(|(a, b)| a + b).collect()),
                    }
                }
            }
        }
        ConvexFunction::GridFn { .. } | ConvexFunction::SumFn { .. } => return Ok(None),
    }))
}

fn gain(f: &ConvexFunction, s: &[f64], y: &[f64]) -> Result<f64> {
    Ok(match f.value_or_inf(y)? {
        Extended::Finite(v) => dotf(s, y) - v,
        _ => f64::NEG_INFINITY,
    })
}

/// Walks `y(t)` for `t = 1, 4, 16, ...` until `⟨s, y⟩ - f(y) >= target`.
fn grow(
    f: &ConvexFunction,
    s: &[f64],
    target: f64,
    y: impl Fn(f64) -> Vec<f64>,
) -> Result<Option<Vec<f64>>> {
    let mut t = 1.0;
    for _ in 0..200 {
        let p = y(t);
        if gain(f, s, &p)? >= target {
            return Ok(Some(p));
        }
        t *= 4.0;
    }
    Ok(None)
}

/// A point `y` with `⟨s, y⟩ - f(y) >= target`, for `s` where `f*(s) = +inf`.
pub(crate) fn conjugate_witness(
    f: &ConvexFunction,
    s: &[f64],
    target: f64,
) -> Result<Option<Vec<f64>>> {
    let d = s.len();
    let ray = |dir: Vec<f64>| move |t: f64| dir.iter().map(|v| v * t).collect::<Vec<f64>>();
    match f {
        ConvexFunction::Quadratic { matrix, vector, .. } => {
            let (vals, vecs, top) = eigen(matrix);
            let r: Vec<f64> = s.iter().zip(vector).map(|(a, b)| a - b).collect();
            let mut n = vec![0.0; d];
            for (lam, v) in vals.iter().zip(&vecs) {
                if *lam <= NULL_EIGEN * top {
                    let c = dotf(&r, v);
                    n.iter_mut().zip(v).for_each(|(ni, vi)| *ni += c * vi);
                }
            }
            grow(f, s, target, ray(n))
        }
        ConvexFunction::NormFn { norm, .. } => grow(f, s, target, ray(unit_direction(norm, s)?)),
        ConvexFunction::Indicator { set } => match set {
            ConvexRegion::Halfspaces { rows, .. } => {
                polyhedral::point_reaching_exact(rows, s, &target)
            }
            ConvexRegion::Epigraph { curvature, .. } => {
                let (u, b) = s.split_at(d - 1);
                let c = *curvature;
                if b[0] > 0.0 {
                    grow(f, s, target, |t| {
                        let mut y = vec![0.0; d];
                        y[d - 1] = t;
                        y
                    })
                } else {
                    let uu: f64 = u.iter().map(|v| v * v).sum();
                    grow(f, s, target, |t| {
                        let mut y: Vec<f64> = u.iter().map(|v| v * t).collect();
                        y.push(c * t * t * uu);
                        y
                    })
                }
            }
            _ => Ok(None),
        },
        ConvexFunction::RegionSupport { set } => {
            let p = set.project(s)?;
            let dir: Vec<f64> = s.iter().zip(&p).map(|(a, b)| a - b).collect();
            grow(f, s, target, ray(dir))
        }
        ConvexFunction::Support { .. } | ConvexFunction::MaxAffine { .. } => {
            let (slopes, intercepts) = pieces(f).expect("piecewise affine");
            let rows = lifted_rows(&slopes, &intercepts);
            let mut obj = s.to_vec();
            obj.push(-1.0);
            Ok(polyhedral::point_reaching_exact(&rows, &obj, &target)?.map(|p| p[..d].to_vec()))
        }
        ConvexFunction::NegSqrt { shifts } => {
            let s = s.to_vec();
            let shifts = shifts.clone();
            grow(f, &s, target, |t| {
                s.iter()
                    .zip(&shifts)
                    .map(|(v, a)| {
                        if *v < 0.0 {
                            1.0 / (4.0 * v * v) - a
                        } else {
                            t * t
                        }
                    })
                    .collect()
            })
        }
        ConvexFunction::AffineShift {
            base,
            shift,
            slope,
            constant,
        } => {
            let r: Vec<f64> = s.iter().zip(slope.coords()).map(|(a, b)| a - b).collect();
            let t = target - dotf(&r, shift.coords()) + constant;
            Ok(conjugate_witness(base, &r, t)?
                .map(|z| z.iter().zip(shift.coords()).map(|(a, b)| a + b).collect()))
        }
        ConvexFunction::GridFn { .. } | ConvexFunction::SumFn { .. } => Ok(None),
    }
}

/// `f*(s)` where a closed form or an exact LP is available.
pub fn conjugate_value(f: &ConvexFunction, s: &Covector) -> Result<Extended> {
    match conjugate_point(f, s.coords())? {
        Some(cp) => Ok(cp.value),
        None => Err(Error::Unsupported(
            "no closed-form conjugate; use a discrete conjugate over a grid".into(),
        )),
    }
}

/// Closed-form conjugates as functions.
fn closed_conjugate(f: &ConvexFunction) -> Result<Option<ConvexFunction>> {
    let d = f.dim();
    Ok(match f {
        ConvexFunction::Quadratic {
            matrix,
            vector,
            constant,
        } => {
            if matrix.iter().flatten().all(|v| *v == 0.0) {
                let point =
                    ConvexFunction::indicator(ConvexRegion::boxed(vector.clone(), vector.clone())?);
                Some(if *constant == 0.0 {
                    point
                } else {
                    ConvexFunction::affine_shift(
                        point,
                        Point::zeros(d),
                        Covector::zeros(d),
                        -constant,
                    )?
                })
            } else {
                let (vals, vecs, top) = eigen(matrix);
                if vals.iter().any(|l| *l <= NULL_EIGEN * top) {
                    None
                } else {
                    let inv: Vec<Vec<f64>> = (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|j| vals.iter().zip(&vecs).map(|(l, v)| v[i] * v[j] / l).sum())
                                .collect()
                        })
                        .collect();
                    let sym: Vec<Vec<f64>> = (0..d)
                        .map(|i| (0..d).map(|j| 0.5 * (inv[i][j] + inv[j][i])).collect())
                        .collect();
                    let b: Vec<f64> = sym.iter().map(|row| -dotf(row, vector)).collect();
                    let c = -0.5 * dotf(&b, vector) - constant;
                    Some(ConvexFunction::quadratic(sym, b, c)?)
                }
            }
        }
        ConvexFunction::NormFn {
            norm,
            scale,
            squared,
            dim,
        } => Some(if *squared {
            ConvexFunction::norm(norm.dual(), 1.0 / scale, true, *dim)?
        } else {
            ConvexFunction::indicator(ConvexRegion::ball(norm.dual(), *scale, vec![0.0; *dim])?)
        }),
        ConvexFunction::Indicator { set } => {
            Some(ConvexFunction::RegionSupport { set: set.clone() })
        }
        ConvexFunction::RegionSupport { set } => {
            Some(ConvexFunction::Indicator { set: set.clone() })
        }
        ConvexFunction::AffineShift {
            base,
            shift,
            slope,
            constant,
        } => match closed_conjugate(base)? {
            Some(b) => {
                let c = -constant - dotf(slope.coords(), shift.coords());
                Some(ConvexFunction::affine_shift(
                    b,
                    slope.to_point(),
                    shift.to_covector(),
                    c,
                )?)
            }
            None => None,
        },
        _ => None,
    })
}

/// Fenchel conjugate. Closed forms are returned as functions; otherwise the
/// result is a grid function over `dual_grid`, filled pointwise from exact
/// formulas where possible and by the discrete transform over the primal
/// grid (a "discrete conjugate", exact only for the grid restriction)
/// otherwise. `+inf` values flag dual points where the supremum diverges.
pub fn fenchel_conjugate(f: &ConvexFunction, dual_grid: &GridSpec) -> Result<ConvexFunction> {
    f.check_dim(dual_grid.dim())?;
    if let Some(c) = closed_conjugate(f)? {
        return Ok(c);
    }
    let nodes: Vec<Vec<f64>> = dual_grid.nodes().collect();
    if conjugate_point(f, &nodes[0])?.is_some() {
        let values = nodes
            .par_iter()
            .map(|s| Ok(conjugate_point(f, s)?.expect("closed form available").value))
            .collect::<Result<Vec<_>>>()?;
        return ConvexFunction::grid(dual_grid.clone(), values);
    }
    let primal = primal_grid(f)?;
    discrete_conjugate(f, &primal, dual_grid)
}

fn primal_grid(f: &ConvexFunction) -> Result<GridSpec> {
    if let Some((g, _)) = f.grids().into_iter().max_by_key(|(g, _)| g.len()) {
        return Ok(g.clone());
    }
    let Some((lo, hi)) = f.domain_box()? else {
        return Err(Error::Precondition(
            "no closed-form conjugate and no bounded domain to sample".into(),
        ));
    };
    let steps = match lo.len() {
        1 => 2000,
        2 => 200,
        3 => 40,
        _ => 12,
    };
    GridSpec::uniform(lo, hi, steps)
}

/// `max over primal nodes y of ⟨s, y⟩ - f(y)` at every dual node `s`.
pub fn discrete_conjugate(
    f: &ConvexFunction,
    primal: &GridSpec,
    dual: &GridSpec,
) -> Result<ConvexFunction> {
    f.check_dim(primal.dim())?;
    f.check_dim(dual.dim())?;
    let samples: Vec<(Vec<f64>, f64)> = primal
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|y| Ok((f.value_or_inf(&y)?, y)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(v, y)| v.finite().map(|v| (y, v)))
        .collect();
    if samples.is_empty() {
        return Err(Error::OutsideDomain(
            "no primal grid node lies in the domain".into(),
        ));
    }
    let values: Vec<Extended> = dual
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|s| {
            Extended::Finite(
                samples
                    .iter()
                    .map(|(y, v)| dotf(s, y) - v)
                    .fold(f64::NEG_INFINITY, f64::max),
            )
        })
        .collect();
    ConvexFunction::grid(dual.clone(), values)
}
