use serde::{Deserialize, Serialize};

use crate::duality::dualmap::{duality_map, smooth_duality_map};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::min_symmetric_eigenvalue;
use crate::model::certificate::plain_json;
use crate::model::{Covector, Norm, Point};
use crate::region::ConvexRegion;
use crate::scalar::{Extended, Tolerance};

/// Proper convex functions on `R^d` with values in `(-inf, +inf]`.
///
/// `RegionSupport`, `NegSqrt` and `MaxAffine` go beyond the basic menu:
/// they are the conjugate of an indicator, the separable function
/// `Σ -sqrt(a_i + x_i)`, and the potentials built from cyclically monotone
/// data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "snake_case", try_from = "RawFunction")]
pub enum ConvexFunction {
    /// Multilinear interpolation of node values; `+inf` marks nodes outside
    /// the domain.
    GridFn {
        grid: GridSpec,
        values: Vec<Extended>,
    },
    /// `½ xᵀ Q x + ⟨b, x⟩ + c`.
    Quadratic {
        matrix: Vec<Vec<f64>>,
        vector: Vec<f64>,
        constant: f64,
    },
    /// `scale * |x|`, or `(scale / 2) * |x|^2` when `squared`.
    NormFn {
        norm: Norm,
        scale: f64,
        squared: bool,
        dim: usize,
    },
    Indicator {
        set: ConvexRegion,
    },
    /// `max_a ⟨a, x⟩` over the listed covectors.
    Support {
        points: Vec<Covector>,
    },
    /// `sup_{c in C} ⟨c, x⟩`.
    RegionSupport {
        set: ConvexRegion,
    },
    /// `base(x - shift) + ⟨slope, x⟩ + constant`.
    AffineShift {
        base: Box<ConvexFunction>,
        shift: Point,
        slope: Covector,
        constant: f64,
    },
    SumFn {
        terms: Vec<ConvexFunction>,
    },
    NegSqrt {
        shifts: Vec<f64>,
    },
    /// `max_j ⟨slopes_j, x⟩ + intercepts_j`.
    MaxAffine {
        slopes: Vec<Covector>,
        intercepts: Vec<f64>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "repr", rename_all = "snake_case")]
enum RawFunction {
    GridFn {
        grid: GridSpec,
        values: Vec<Extended>,
    },
    Quadratic {
        #[serde(deserialize_with = "plain_json::deserialize")]
        matrix: Vec<Vec<f64>>,
        #[serde(deserialize_with = "plain_json::deserialize")]
        vector: Vec<f64>,
        #[serde(default)]
        #[serde(deserialize_with = "plain_json::deserialize")]
        constant: f64,
    },
    NormFn {
        norm: Norm,
        #[serde(default = "one")]
        #[serde(deserialize_with = "plain_json::deserialize")]
        scale: f64,
        #[serde(default)]
        squared: bool,
        #[serde(deserialize_with = "plain_json::deserialize")]
        dim: usize,
    },
    Indicator {
        set: ConvexRegion,
    },
    Support {
        points: Vec<Covector>,
    },
    RegionSupport {
        set: ConvexRegion,
    },
    AffineShift {
        base: Box<ConvexFunction>,
        shift: Point,
        slope: Covector,
        #[serde(default)]
        #[serde(deserialize_with = "plain_json::deserialize")]
        constant: f64,
    },
    SumFn {
        terms: Vec<ConvexFunction>,
    },
    NegSqrt {
        #[serde(deserialize_with = "plain_json::deserialize")]
        shifts: Vec<f64>,
    },
    MaxAffine {
        slopes: Vec<Covector>,
        #[serde(deserialize_with = "plain_json::deserialize")]
        intercepts: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawFunction> for ConvexFunction {
    type Error = Error;

    fn try_from(raw: RawFunction) -> Result<Self> {
        let f = match raw {
            RawFunction::GridFn { grid, values } => ConvexFunction::GridFn { grid, values },
            RawFunction::Quadratic {
                matrix,
                vector,
                constant,
            } => ConvexFunction::Quadratic {
                matrix,
                vector,
                constant,
            },
            RawFunction::NormFn {
                norm,
                scale,
                squared,
                dim,
            } => ConvexFunction::NormFn {
                norm,
                scale,
                squared,
                dim,
            },
            RawFunction::Indicator { set } => ConvexFunction::Indicator { set },
            RawFunction::Support { points } => ConvexFunction::Support { points },
            RawFunction::RegionSupport { set } => ConvexFunction::RegionSupport { set },
            RawFunction::AffineShift {
                base,
                shift,
                slope,
                constant,
            } => ConvexFunction::AffineShift {
                base,
                shift,
                slope,
                constant,
            },
            RawFunction::SumFn { terms } => ConvexFunction::SumFn { terms },
            RawFunction::NegSqrt { shifts } => ConvexFunction::NegSqrt { shifts },
            RawFunction::MaxAffine { slopes, intercepts } => {
                ConvexFunction::MaxAffine { slopes, intercepts }
            }
        };
        f.validate()?;
        Ok(f)
    }
}

pub(crate) fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn finite_all(v: &[f64]) -> Result<()> {
    match v.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// `abs + rel * scale`, the slack allowed on a comparison of that size.
pub(crate) fn slack(tol: &Tolerance, scale: f64) -> f64 {
    tol.abs + tol.rel * scale.abs()
}

impl ConvexFunction {
    pub fn quadratic(matrix: Vec<Vec<f64>>, vector: Vec<f64>, constant: f64) -> Result<Self> {
        let f = ConvexFunction::Quadratic {
            matrix,
            vector,
            constant,
        };
        f.validate()?;
        Ok(f)
    }

    /// `½ |x|^2` in the Euclidean norm.
    pub fn half_square(dim: usize) -> Result<Self> {
        Self::norm(Norm::Euclidean, 1.0, true, dim)
    }

    /// `|x|` on the line.
    pub fn abs() -> Self {
        ConvexFunction::NormFn {
            norm: Norm::Euclidean,
            scale: 1.0,
            squared: false,
            dim: 1,
        }
    }

    pub fn norm(norm: Norm, scale: f64, squared: bool, dim: usize) -> Result<Self> {
        let f = ConvexFunction::NormFn {
            norm,
            scale,
            squared,
            dim,
        };
        f.validate()?;
        Ok(f)
    }

    /// The affine function `⟨a, x⟩ + c`.
    pub fn affine(a: Vec<f64>, c: f64) -> Result<Self> {
        let d = a.len();
        Self::quadratic(vec![vec![0.0; d]; d], a, c)
    }

    pub fn indicator(set: ConvexRegion) -> Self {
        ConvexFunction::Indicator { set }
    }

    pub fn support(points: Vec<Covector>) -> Result<Self> {
        let f = ConvexFunction::Support { points };
        f.validate()?;
        Ok(f)
    }

    pub fn max_affine(slopes: Vec<Covector>, intercepts: Vec<f64>) -> Result<Self> {
        let f = ConvexFunction::MaxAffine { slopes, intercepts };
        f.validate()?;
        Ok(f)
    }

    pub fn neg_sqrt(shifts: Vec<f64>) -> Result<Self> {
        let f = ConvexFunction::NegSqrt { shifts };
        f.validate()?;
        Ok(f)
    }

    pub fn sum(terms: Vec<ConvexFunction>) -> Result<Self> {
        let f = ConvexFunction::SumFn { terms };
        f.validate()?;
        Ok(f)
    }

    pub fn affine_shift(
        base: ConvexFunction,
        shift: Point,
        slope: Covector,
        constant: f64,
    ) -> Result<Self> {
        let f = ConvexFunction::AffineShift {
            base: Box::new(base),
            shift,
            slope,
            constant,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn grid(grid: GridSpec, values: Vec<Extended>) -> Result<Self> {
        let f = ConvexFunction::GridFn { grid, values };
        f.validate()?;
        Ok(f)
    }

    /// Tabulates `f` on the grid; non-finite results become `+inf`.
    pub fn tabulate(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid
            .nodes()
            .map(|x| {
                let v = f(&x);
                if v.is_finite() {
                    Extended::Finite(v)
                } else {
                    Extended::PosInf
                }
            })
            .collect();
        Self::grid(grid, values)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexFunction::GridFn { grid, .. } => grid.dim(),
            ConvexFunction::Quadratic { vector, .. } => vector.len(),
            ConvexFunction::NormFn { dim, .. } => *dim,
            ConvexFunction::Indicator { set } | ConvexFunction::RegionSupport { set } => set.dim(),
            ConvexFunction::Support { points } => points[0].dim(),
            ConvexFunction::AffineShift { shift, .. } => shift.dim(),
            ConvexFunction::SumFn { terms } => terms[0].dim(),
            ConvexFunction::NegSqrt { shifts } => shifts.len(),
            ConvexFunction::MaxAffine { slopes, .. } => slopes[0].dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexFunction::GridFn { grid, values } => validate_grid(grid, values),
            ConvexFunction::Quadratic {
                matrix,
                vector,
                constant,
            } => {
                let d = vector.len();
                if d == 0 {
                    return Err(Error::ZeroDimension);
                }
                if matrix.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: matrix.len(),
                    });
                }
                for row in matrix {
                    if row.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: row.len(),
                        });
                    }
                    finite_all(row)?;
                }
                finite_all(vector)?;
                finite_all(&[*constant])?;
                let scale = matrix.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                for i in 0..d {
                    for j in 0..i {
                        if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * scale {
                            return Err(Error::InvalidArgument(format!(
                                "matrix is not symmetric at ({i}, {j})"
                            )));
                        }
                    }
                }
                let m = min_symmetric_eigenvalue(matrix);
                if m < -1e-9 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not positive semidefinite (eigenvalue {m})"
                    )));
                }
                Ok(())
            }
            ConvexFunction::NormFn {
                norm, scale, dim, ..
            } => {
                norm.validate()?;
                if *dim == 0 {
                    return Err(Error::ZeroDimension);
                }
                if let Norm::WeightedL2 { weights } = norm {
                    if weights.len() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            found: weights.len(),
                        });
                    }
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "scale must be positive, got {scale}"
                    )));
                }
                Ok(())
            }
            ConvexFunction::Indicator { .. } | ConvexFunction::RegionSupport { .. } => Ok(()),
            ConvexFunction::Support { points } => same_dims(points),
            ConvexFunction::AffineShift {
                base,
                shift,
                slope,
                constant,
            } => {
                base.validate()?;
                shift.check_dim(base.dim())?;
                slope.check_dim(base.dim())?;
                finite_all(&[*constant])
            }
            ConvexFunction::SumFn { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument(
                        "a sum needs at least one term".into(),
                    ));
                }
                for t in terms {
                    t.validate()?;
                    if t.dim() != terms[0].dim() {
                        return Err(Error::DimensionMismatch {
                            expected: terms[0].dim(),
                            found: t.dim(),
                        });
                    }
                }
                Ok(())
            }
            ConvexFunction::NegSqrt { shifts } => {
                if shifts.is_empty() {
                    return Err(Error::ZeroDimension);
                }
                finite_all(shifts)
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => {
                same_dims(slopes)?;
                if intercepts.len() != slopes.len() {
                    return Err(Error::DimensionMismatch {
                        expected: slopes.len(),
                        found: intercepts.len(),
                    });
                }
                finite_all(intercepts)
            }
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

    /// Value at `x`; grid functions reject points outside their box.
    pub fn value(&self, x: &[f64]) -> Result<Extended> {
        self.value_in(x, &Tolerance::default())
    }

    /// `set_tol` decides indicator membership.
    fn value_in(&self, x: &[f64], set_tol: &Tolerance) -> Result<Extended> {
        self.check_dim(x.len())?;
        if let Some(index) = x.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(match self {
            ConvexFunction::GridFn { grid, values } => grid_value(grid, values, x)?,
            ConvexFunction::Quadratic {
                matrix,
                vector,
                constant,
            } => {
                let q: f64 = matrix
                    .iter()
                    .zip(x)
                    .map(|(row, xi)| xi * dotf(row, x))
                    .sum();
                Extended::Finite(0.5 * q + dotf(vector, x) + constant)
            }
            ConvexFunction::NormFn {
                norm,
                scale,
                squared,
                ..
            } => {
                let n = norm.eval_slice(x);
                Extended::Finite(if *squared {
                    0.5 * scale * n * n
                } else {
                    scale * n
                })
            }
            ConvexFunction::Indicator { set } => {
                if set.contains(x, set_tol) {
                    Extended::Finite(0.0)
                } else {
                    Extended::PosInf
                }
            }
            ConvexFunction::Support { points } => Extended::Finite(
                points
                    .iter()
                    .map(|a| dotf(a.coords(), x))
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
            ConvexFunction::RegionSupport { set } => match set.support(x)? {
                Some(v) => Extended::Finite(v),
                None => Extended::PosInf,
            },
            ConvexFunction::AffineShift {
                base,
                shift,
                slope,
                constant,
            } => {
                let z: Vec<f64> = x.iter().zip(shift.coords()).map(|(a, b)| a - b).collect();
                match base.value_in(&z, set_tol)? {
                    Extended::Finite(v) => Extended::Finite(v + dotf(slope.coords(), x) + constant),
                    other => other,
                }
            }
            ConvexFunction::SumFn { terms } => {
                let mut total = 0.0;
                for t in terms {
                    match t.value_in(x, set_tol)? {
                        Extended::Finite(v) => total += v,
                        other => return Ok(other),
                    }
                }
                Extended::Finite(total)
            }
            ConvexFunction::NegSqrt { shifts } => {
                if shifts.iter().zip(x).any(|(a, v)| a + v < 0.0) {
                    Extended::PosInf
                } else {
                    Extended::Finite(
                        -shifts
                            .iter()
                            .zip(x)
                            .map(|(a, v)| (a + v).sqrt())
                            .sum::<f64>(),
                    )
                }
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => Extended::Finite(
                slopes
                    .iter()
                    .zip(intercepts)
                    .map(|(a, b)| dotf(a.coords(), x) + b)
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
        })
    }

    /// Like [`ConvexFunction::value`] but points off a grid count as `+inf`.
    pub(crate) fn value_or_inf(&self, x: &[f64]) -> Result<Extended> {
        match self.value(x) {
            Err(Error::OutsideGrid(_)) => Ok(Extended::PosInf),
            other => other,
        }
    }

    /// Like [`ConvexFunction::value_or_inf`] with exact set membership, for
    /// probe points that must not borrow the tolerance band around a set.
    pub(crate) fn strict_value_or_inf(&self, x: &[f64]) -> Result<Extended> {
        match self.value_in(x, &Tolerance::exact()) {
            Err(Error::OutsideGrid(_)) => Ok(Extended::PosInf),
            other => other,
        }
    }

    /// Finite value at `x`, or an error naming the point.
    pub(crate) fn finite_value(&self, x: &[f64]) -> Result<f64> {
        match self.value(x)? {
            Extended::Finite(v) => Ok(v),
            _ => Err(Error::OutsideDomain(format!(
                "{x:?} is not in the effective domain"
            ))),
        }
    }

    /// The gradient when `f` is differentiable at `x` (in the interior of its
    /// domain).
    pub fn gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        self.check_dim(x.len())?;
        let tol = Tolerance::default();
        Ok(match self {
            ConvexFunction::Quadratic { matrix, vector, .. } => Some(
                matrix
                    .iter()
                    .zip(vector)
                    .map(|(row, b)| dotf(row, x) + b)
                    .collect(),
            ),
            ConvexFunction::NormFn {
                norm,
                scale,
                squared,
                ..
            } => {
                let n = norm.eval_slice(x);
                if n == 0.0 {
                    squared.then(|| vec![0.0; x.len()])
                } else if norm.is_smooth() {
                    let j = smooth_duality_map(norm, x);
                    let k = if *squared { *scale } else { scale / n };
                    Some(j.iter().map(|v| v * k).collect())
                } else {
                    match duality_map(norm, &Point::from_f64s(x)?)? {
                        crate::duality::DualityImage::Single { xstar } => {
                            let k = if *squared { *scale } else { scale / n };
                            Some(xstar.coords().iter().map(|v| v * k).collect())
                        }
                        _ => None,
                    }
                }
            }
            ConvexFunction::Indicator { set } => {
                set.contains_open(x, &tol).then(|| vec![0.0; x.len()])
            }
            ConvexFunction::Support { points } => {
                let act = active(points.iter().map(|a| (a.coords(), 0.0)), x, &tol);
                single_active(&act, points.iter().map(|a| a.coords()))
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => {
                let act = active(
                    slopes
                        .iter()
                        .map(|a| a.coords())
                        .zip(intercepts.iter().cloned()),
                    x,
                    &tol,
                );
                single_active(&act, slopes.iter().map(|a| a.coords()))
            }
            ConvexFunction::NegSqrt { shifts } => {
                if shifts.iter().zip(x).all(|(a, v)| a + v > 0.0) {
                    Some(
                        shifts
                            .iter()
                            .zip(x)
                            .map(|(a, v)| -0.5 / (a + v).sqrt())
                            .collect(),
                    )
                } else {
                    None
                }
            }
            ConvexFunction::AffineShift {
                base, shift, slope, ..
            } => {
                let z: Vec<f64> = x.iter().zip(shift.coords()).map(|(a, b)| a - b).collect();
                base.gradient(&z)?
                    .map(|g| g.iter().zip(slope.coords()).map(|(a, b)| a + b).collect())
            }
            ConvexFunction::SumFn { terms } => {
                let mut total = vec![0.0; x.len()];
                for t in terms {
                    match t.gradient(x)? {
                        Some(g) => total.iter_mut().zip(g).for_each(|(a, b)| *a += b),
                        None => return Ok(None),
                    }
                }
                Some(total)
            }
            ConvexFunction::GridFn { .. } | ConvexFunction::RegionSupport { .. } => None,
        })
    }

    /// Some element of `∂f(x)`, the minimal-norm one where that is cheap
    /// to name. `None` when `∂f(x)` is empty or no selection is known.
    pub fn subgradient_selection(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        self.check_dim(x.len())?;
        let tol = Tolerance::default();
        if let Some(g) = self.gradient(x)? {
            return Ok(Some(g));
        }
        Ok(match self {
            ConvexFunction::GridFn { grid, values } => {
                super::search::grid_selection(grid, values, x)?
            }
            ConvexFunction::NormFn {
                norm,
                scale,
                squared,
                ..
            } => {
                let n = norm.eval_slice(x);
                if n == 0.0 {
                    Some(vec![0.0; x.len()])
                } else {
                    let sel = duality_map(norm, &Point::from_f64s(x)?)?.selection();
                    let k = if *squared { *scale } else { scale / n };
                    Some(sel.coords().iter().map(|v| v * k).collect())
                }
            }
            ConvexFunction::Indicator { set } => set.contains(x, &tol).then(|| vec![0.0; x.len()]),
            ConvexFunction::Support { points } => {
                let act = active(points.iter().map(|a| (a.coords(), 0.0)), x, &tol);
                Some(barycenter(act.iter().map(|&j| points[j].coords()), x.len()))
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => {
                let act = active(
                    slopes
                        .iter()
                        .map(|a| a.coords())
                        .zip(intercepts.iter().cloned()),
                    x,
                    &tol,
                );
                Some(barycenter(act.iter().map(|&j| slopes[j].coords()), x.len()))
            }
            ConvexFunction::RegionSupport { set } => set.support_point(x)?,
            ConvexFunction::NegSqrt { .. } => None,
            ConvexFunction::AffineShift {
                base, shift, slope, ..
            } => {
                let z: Vec<f64> = x.iter().zip(shift.coords()).map(|(a, b)| a - b).collect();
                base.subgradient_selection(&z)?
                    .map(|g| g.iter().zip(slope.coords()).map(|(a, b)| a + b).collect())
            }
            ConvexFunction::SumFn { terms } => {
                let mut total = vec![0.0; x.len()];
                for t in terms {
                    match t.subgradient_selection(x)? {
                        Some(g) => total.iter_mut().zip(g).for_each(|(a, b)| *a += b),
                        None => return Ok(None),
                    }
                }
                Some(total)
            }
            ConvexFunction::Quadratic { .. } => unreachable!("quadratics are differentiable"),
        })
    }

    /// A box known to contain the effective domain, if there is one.
    pub fn domain_box(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        Ok(match self {
            ConvexFunction::GridFn { grid, .. } => Some((grid.lo().to_vec(), grid.hi().to_vec())),
            ConvexFunction::Indicator { set } if set.is_bounded() => Some(set.bounding_box()?),
            ConvexFunction::AffineShift { base, shift, .. } => {
                base.domain_box()?.map(|(lo, hi)| {
                    let s = shift.coords();
                    (
                        lo.iter().zip(s).map(|(a, b)| a + b).collect(),
                        hi.iter().zip(s).map(|(a, b)| a + b).collect(),
                    )
                })
            }
            ConvexFunction::SumFn { terms } => {
                let mut acc: Option<(Vec<f64>, Vec<f64>)> = None;
                for t in terms {
                    if let Some((lo, hi)) = t.domain_box()? {
                        acc = Some(match acc {
                            None => (lo, hi),
                            Some((l, h)) => (
                                l.iter().zip(&lo).map(|(a, b)| a.max(*b)).collect(),
                                h.iter().zip(&hi).map(|(a, b)| a.min(*b)).collect(),
                            ),
                        });
                    }
                }
                acc
            }
            _ => None,
        })
    }

    /// Grids carried by the function (its own or those of its terms).
    pub(crate) fn grids(&self) -> Vec<(&GridSpec, &[Extended])> {
        match self {
            ConvexFunction::GridFn { grid, values } => vec![(grid, values.as_slice())],
            ConvexFunction::SumFn { terms } => terms.iter().flat_map(|t| t.grids()).collect(),
            _ => Vec::new(),
        }
    }

    /// The grid of a grid function.
    pub fn native_grid(&self) -> Option<&GridSpec> {
        match self {
            ConvexFunction::GridFn { grid, .. } => Some(grid),
            _ => None,
        }
    }
}

fn same_dims(v: &[Covector]) -> Result<()> {
    let Some(first) = v.first() else {
        return Err(Error::InvalidArgument(
            "at least one covector is needed".into(),
        ));
    };
    for c in v {
        c.check_dim(first.dim())?;
    }
    Ok(())
}

/// Indices of the affine pieces attaining the maximum at `x`.
pub(crate) fn active<'a>(
    pieces: impl Iterator<Item = (&'a [f64], f64)>,
    x: &[f64],
    tol: &Tolerance,
) -> Vec<usize> {
    let vals: Vec<f64> = pieces.map(|(a, b)| dotf(a, x) + b).collect();
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s = slack(tol, m);
    (0..vals.len()).filter(|&j| vals[j] >= m - s).collect()
}

fn single_active<'a>(act: &[usize], slopes: impl Iterator<Item = &'a [f64]>) -> Option<Vec<f64>> {
    let slopes: Vec<&[f64]> = slopes.collect();
    let first = slopes[act[0]];
    act.iter()
        .all(|&j| slopes[j] == first)
        .then(|| first.to_vec())
}

fn barycenter<'a>(pts: impl Iterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    let mut k = 0.0;
    for p in pts {
        acc.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        k += 1.0;
    }
    acc.iter().map(|v| v / k).collect()
}

fn validate_grid(grid: &GridSpec, values: &[Extended]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    if values.iter().any(|v| matches!(v, Extended::NegInf)) {
        return Err(Error::InvalidArgument("grid values may not be -inf".into()));
    }
    if !values.iter().any(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(
            "grid function is identically +inf".into(),
        ));
    }
    let scale = values
        .iter()
        .filter_map(|v| v.finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let s = 1e-9 + 1e-9 * scale;
    let d = grid.dim();
    for axis in 0..d {
        let n = grid.steps()[axis] + 1;
        for flat in 0..grid.len() {
            let mut idx = grid.multi_index(flat);
            if idx[axis] != 0 {
                continue;
            }
            let line: Vec<Extended> = (0..n)
                .map(|i| {
                    idx[axis] = i;
                    values[grid.flat_index(&idx)]
                })
                .collect();
            let finite: Vec<usize> = (0..n).filter(|&i| line[i].is_finite()).collect();
            if let (Some(&a), Some(&b)) = (finite.first(), finite.last()) {
                if b - a + 1 != finite.len() {
                    idx[axis] = 0;
                    return Err(Error::InvalidArgument(format!(
                        "domain is not convex along axis {axis} through node {:?}",
                        idx
                    )));
                }
                for i in a + 1..b {
                    let (l, m, r) = (line[i - 1].to_f64(), line[i].to_f64(), line[i + 1].to_f64());
                    if m > 0.5 * (l + r) + s {
                        idx[axis] = i;
                        return Err(Error::InvalidArgument(format!(
                            "values fail midpoint convexity along axis {axis} at node {idx:?}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn grid_value(grid: &GridSpec, values: &[Extended], x: &[f64]) -> Result<Extended> {
    let Some((cell, frac)) = grid.locate(x) else {
        return Err(Error::OutsideGrid(format!(
            "{x:?} lies outside the grid box"
        )));
    };
    let d = grid.dim();
    let mut total = 0.0;
    for corner in 0..1usize << d {
        let mut w = 1.0;
        let mut idx = cell.clone();
        for a in 0..d {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx[a] = (idx[a] + 1).min(grid.steps()[a]);
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if w == 0.0 {
            continue;
        }
        match values[grid.flat_index(&idx)] {
            Extended::Finite(v) => total += w * v,
            other => return Ok(other),
        }
    }
    Ok(Extended::Finite(total))
}

/// `f(x)` for `x` a point.
pub fn eval(f: &ConvexFunction, x: &Point) -> Result<Extended> {
    f.value(x.coords())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let c = ConvexRegion::boxed(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(
            ConvexFunction::indicator(c).value(&[2.0]).unwrap(),
            Extended::PosInf
        );
        assert_eq!(
            ConvexFunction::half_square(1)
                .unwrap()
                .value(&[3.0])
                .unwrap(),
            Extended::Finite(4.5)
        );
        let s = ConvexFunction::support(vec![
            Covector::from_f64s(&[1.0]).unwrap(),
            Covector::from_f64s(&[-1.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(s.value(&[2.0]).unwrap(), Extended::Finite(2.0));
        let q =
            ConvexFunction::quadratic(vec![vec![2.0, 0.0], vec![0.0, 4.0]], vec![1.0, -1.0], 3.0)
                .unwrap();
        assert_eq!(
            q.value(&[1.0, 1.0]).unwrap(),
            Extended::Finite(1.0 + 2.0 + 1.0 - 1.0 + 3.0)
        );
        assert_eq!(
            ConvexFunction::neg_sqrt(vec![0.0])
                .unwrap()
                .value(&[-1.0])
                .unwrap(),
            Extended::PosInf
        );
    }

    #[test]
    fn grid_interpolation_and_box() {
        let g = GridSpec::uniform(vec![-1.0, -1.0], vec![1.0, 1.0], 4).unwrap();
        let f = ConvexFunction::tabulate(g, |x| x[0] * x[0] + x[1].abs()).unwrap();
        assert_eq!(f.value(&[0.5, -0.5]).unwrap(), Extended::Finite(0.75));
        let mid = f.value(&[0.25, 0.0]).unwrap().finite().unwrap();
        assert!((mid - 0.125).abs() < 1e-15);
        assert!(matches!(f.value(&[1.5, 0.0]), Err(Error::OutsideGrid(_))));
        assert_eq!(f.value_or_inf(&[1.5, 0.0]).unwrap(), Extended::PosInf);
    }

    #[test]
    fn grid_validation() {
        let g = GridSpec::uniform(vec![-1.0], vec![1.0], 4).unwrap();
        assert!(ConvexFunction::tabulate(g.clone(), |x| -x[0] * x[0]).is_err());
        let holes = vec![
            Extended::Finite(0.0),
            Extended::PosInf,
            Extended::Finite(0.0),
            Extended::Finite(0.0),
            Extended::Finite(0.0),
        ];
        assert!(ConvexFunction::grid(g.clone(), holes).is_err());
        let edge =
            ConvexFunction::tabulate(g, |x| if x[0] < 0.0 { f64::INFINITY } else { x[0] }).unwrap();
        assert_eq!(edge.value(&[-0.25]).unwrap(), Extended::PosInf);
        assert_eq!(edge.value(&[0.25]).unwrap(), Extended::Finite(0.25));
    }

    #[test]
    fn quadratic_must_be_psd_and_symmetric() {
        assert!(ConvexFunction::quadratic(
            vec![vec![1.0, 0.0], vec![0.0, -1.0]],
            vec![0.0, 0.0],
            0.0
        )
        .is_err());
        assert!(ConvexFunction::quadratic(
            vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![0.0, 0.0],
            0.0
        )
        .is_err());
        assert!(ConvexFunction::quadratic(
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![0.0, 0.0],
            0.0
        )
        .is_ok());
    }

    #[test]
    fn json_round_trip() {
        let f = ConvexFunction::sum(vec![
            ConvexFunction::abs(),
            ConvexFunction::affine_shift(
                ConvexFunction::half_square(1).unwrap(),
                Point::from_f64s(&[1.0]).unwrap(),
                Covector::from_f64s(&[2.0]).unwrap(),
                0.5,
            )
            .unwrap(),
        ])
        .unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"repr\":\"sum_fn\""));
        let back: ConvexFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"repr":"quadratic","matrix":[[-1]],"vector":[0]}"#;
        assert!(serde_json::from_str::<ConvexFunction>(bad).is_err());
        let abs: ConvexFunction =
            serde_json::from_str(r#"{"repr":"norm_fn","norm":{"kind":"euclidean"},"dim":1}"#)
                .unwrap();
        assert_eq!(abs, ConvexFunction::abs());
    }

    #[test]
    fn gradients_and_selections() {
        let abs = ConvexFunction::abs();
        assert_eq!(abs.gradient(&[0.0]).unwrap(), None);
        assert_eq!(abs.subgradient_selection(&[0.0]).unwrap(), Some(vec![0.0]));
        assert_eq!(abs.gradient(&[-2.0]).unwrap(), Some(vec![-1.0]));
        let m = ConvexFunction::max_affine(
            vec![
                Covector::from_f64s(&[-1.0]).unwrap(),
                Covector::from_f64s(&[1.0]).unwrap(),
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(m.subgradient_selection(&[0.0]).unwrap(), Some(vec![0.0]));
        assert_eq!(m.gradient(&[1.0]).unwrap(), Some(vec![1.0]));
        let ns = ConvexFunction::neg_sqrt(vec![0.25]).unwrap();
        assert_eq!(ns.gradient(&[0.0]).unwrap(), Some(vec![-1.0]));
        assert_eq!(ns.subgradient_selection(&[-0.25]).unwrap(), None);
    }
}
