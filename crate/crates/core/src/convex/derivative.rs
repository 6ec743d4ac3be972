use super::function::{active, dotf, ConvexFunction};
use crate::duality::duality_map;
use crate::error::{Error, Result};
use crate::model::Point;
use crate::scalar::{Extended, Tolerance};

/// Largest `k` in the step sequence `t = 2^-k`.
pub const MAX_HALVINGS: u32 = 40;
/// Quotients beyond this magnitude are declared infinite.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// `(t, (f(x + t y) - f(x)) / t)` for `t = 2^-k`, `k = 1..=kmax`. For convex
/// `f` the quotients are nonincreasing as `t` decreases.
pub fn difference_quotients(
    f: &ConvexFunction,
    x: &Point,
    y: &Point,
    kmax: u32,
) -> Result<Vec<(f64, Extended)>> {
    f.check_dim(x.dim())?;
    f.check_dim(y.dim())?;
    let fx = f.finite_value(x.coords())?;
    (1..=kmax)
        .map(|k| {
            let t = 0.5f64.powi(k as i32);
            let p: Vec<f64> = x
                .coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| a + t * b)
                .collect();
            Ok((
                t,
                match f.value_or_inf(&p)? {
                    Extended::Finite(v) => Extended::Finite((v - fx) / t),
                    other => other,
                },
            ))
        })
        .collect()
}

fn numeric(f: &ConvexFunction, x: &[f64], y: &[f64]) -> Result<Extended> {
    let fx = f.finite_value(x)?;
    let q = difference_quotients(
        f,
        &Point::from_f64s(x)?,
        &Point::from_f64s(y)?,
        MAX_HALVINGS,
    )?;
    let mut last: Option<f64> = None;
    for (t, v) in q {
        match v {
            Extended::Finite(v) => {
                if v < -DIVERGENCE_BOUND {
                    return Ok(Extended::NegInf);
                }
                if let Some(prev) = last {
                    // stop once the change is below what rounding in f can explain
                    let noise = 8.0 * f64::EPSILON * (1.0 + fx.abs() + (v * t).abs()) / t;
                    if (prev - v).abs() <= noise.max(1e-12 * (1.0 + v.abs())) {
                        return Ok(Extended::Finite(v));
                    }
                }
                last = Some(v);
            }
            _ => {
                // the segment leaves the domain for this t; smaller t may not
                last = None;
            }
        }
    }
    Ok(match last {
        Some(v) if v > DIVERGENCE_BOUND => Extended::PosInf,
        Some(v) => Extended::Finite(v),
        None => Extended::PosInf,
    })
}

fn add(a: Extended, b: Extended) -> Option<Extended> {
    Some(match (a, b) {
        (Extended::PosInf, Extended::NegInf) | (Extended::NegInf, Extended::PosInf) => return None,
        (Extended::PosInf, _) | (_, Extended::PosInf) => Extended::PosInf,
        (Extended::NegInf, _) | (_, Extended::NegInf) => Extended::NegInf,
        (Extended::Finite(u), Extended::Finite(v)) => Extended::Finite(u + v),
    })
}

fn closed(f: &ConvexFunction, x: &[f64], y: &[f64]) -> Result<Option<Extended>> {
    let tol = Tolerance::default();
    Ok(match f {
        ConvexFunction::Quadratic { .. } => f.gradient(x)?.map(|g| Extended::Finite(dotf(&g, y))),
        ConvexFunction::NormFn {
            norm,
            scale,
            squared,
            ..
        } => {
            let n = norm.eval_slice(x);
            if n == 0.0 {
                Some(Extended::Finite(if *squared {
                    0.0
                } else {
                    scale * norm.eval_slice(y)
                }))
            } else {
                // d+|.|(x)(y) = max over the face J(x)/|x| of ⟨x*, y⟩
                let face = duality_map(norm, &Point::from_f64s(x)?)?;
                let best = face
                    .extreme_points()
                    .iter()
                    .map(|e| dotf(e.coords(), y))
                    .fold(f64::NEG_INFINITY, f64::max);
                let k = if *squared { *scale } else { scale / n };
                Some(Extended::Finite(k * best))
            }
        }
        ConvexFunction::Support { points } => {
            let act = active(points.iter().map(|a| (a.coords(), 0.0)), x, &tol);
            Some(Extended::Finite(
                act.iter()
                    .map(|&j| dotf(points[j].coords(), y))
                    .fold(f64::NEG_INFINITY, f64::max),
            ))
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
            Some(Extended::Finite(
                act.iter()
                    .map(|&j| dotf(slopes[j].coords(), y))
                    .fold(f64::NEG_INFINITY, f64::max),
            ))
        }
        ConvexFunction::Indicator { set } => {
            // 0 on feasible directions; by convexity x + t y stays in C once it is in
            let inside = (0..=MAX_HALVINGS).any(|k| {
                let t = 0.5f64.powi(k as i32);
                let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + t * b).collect();
                set.contains(&p, &Tolerance::exact())
            });
            Some(if inside || y.iter().all(|v| *v == 0.0) {
                Extended::Finite(0.0)
            } else {
                Extended::PosInf
            })
        }
        ConvexFunction::NegSqrt { shifts } => {
            let mut leaves = false;
            let mut steep = false;
            let mut total = 0.0;
            for ((a, xi), yi) in shifts.iter().zip(x).zip(y) {
                let u = a + xi;
                if u > 0.0 {
                    total += -0.5 * yi / u.sqrt();
                } else if *yi < 0.0 {
                    leaves = true;
                } else if *yi > 0.0 {
                    steep = true;
                }
            }
            Some(if leaves {
                Extended::PosInf
            } else if steep {
                Extended::NegInf
            } else {
                Extended::Finite(total)
            })
        }
        ConvexFunction::AffineShift {
            base, shift, slope, ..
        } => {
            let z: Vec<f64> = x.iter().zip(shift.coords()).map(|(a, b)| a - b).collect();
            let b = match closed(base, &z, y)? {
                Some(b) => b,
                None => numeric(base, &z, y)?,
            };
            add(b, Extended::Finite(dotf(slope.coords(), y)))
        }
        ConvexFunction::SumFn { terms } => {
            let mut acc = Extended::Finite(0.0);
            for t in terms {
                let d = match closed(t, x, y)? {
                    Some(d) => d,
                    None => numeric(t, x, y)?,
                };
                match add(acc, d) {
                    Some(v) => acc = v,
                    None => return Ok(None),
                }
            }
            Some(acc)
        }
        ConvexFunction::GridFn { .. } | ConvexFunction::RegionSupport { .. } => None,
    })
}

/// `d+f(x)(y) = lim_{t -> 0+} (f(x + t y) - f(x)) / t`, in closed form where
/// available and from the monotone difference quotients otherwise.
pub fn directional_derivative(f: &ConvexFunction, x: &Point, y: &Point) -> Result<Extended> {
    f.check_dim(x.dim())?;
    f.check_dim(y.dim())?;
    if !f.value(x.coords())?.is_finite() {
        return Err(Error::OutsideDomain(format!(
            "{:?} is not in the effective domain",
            x.coords()
        )));
    }
    match closed(f, x.coords(), y.coords())? {
        Some(v) => Ok(v),
        None => numeric(f, x.coords(), y.coords()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::model::Norm;
    use crate::region::ConvexRegion;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> Point {
        Point::from_f64s(v).unwrap()
    }

    #[test]
    fn examples() {
        let f = ConvexFunction::half_square(1).unwrap();
        assert_eq!(
            directional_derivative(&f, &p(&[1.0]), &p(&[1.0])).unwrap(),
            Extended::Finite(1.0)
        );
        let root = ConvexFunction::neg_sqrt(vec![0.0]).unwrap();
        assert_eq!(
            directional_derivative(&root, &p(&[0.0]), &p(&[1.0])).unwrap(),
            Extended::NegInf
        );
        assert_eq!(
            directional_derivative(&root, &p(&[0.0]), &p(&[-1.0])).unwrap(),
            Extended::PosInf
        );
        let n = 10;
        let shifts: Vec<f64> = (1..=n).map(|k| 0.5f64.powi(k)).collect();
        let ladder = ConvexFunction::neg_sqrt(shifts).unwrap();
        for k in 1..=n {
            let mut e = vec![0.0; n as usize];
            e[k as usize - 1] = 1.0;
            let d = directional_derivative(&ladder, &p(&vec![0.0; n as usize]), &p(&e)).unwrap();
            assert!((d.finite().unwrap() + 2f64.powf(k as f64 / 2.0 - 1.0)).abs() < 1e-12);
        }
        assert!(matches!(
            directional_derivative(&root, &p(&[-1.0]), &p(&[1.0])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn grid_root_is_steep_but_finite() {
        // on a grid the quotient stabilizes at the first chord slope
        let g = GridSpec::uniform(vec![0.0], vec![1.0], 1000).unwrap();
        let f = ConvexFunction::tabulate(g, |x| -x[0].sqrt()).unwrap();
        let d = directional_derivative(&f, &p(&[0.0]), &p(&[1.0]))
            .unwrap()
            .finite()
            .unwrap();
        assert!((d + 1000f64.sqrt()).abs() < 1e-6);
        assert_eq!(
            directional_derivative(&f, &p(&[0.0]), &p(&[-1.0])).unwrap(),
            Extended::PosInf
        );
    }

    #[test]
    fn closed_forms_match_quotients() {
        let x = p(&[0.3, -0.7]);
        let y = p(&[1.0, 2.0]);
        let fs = [
            ConvexFunction::norm(Norm::Euclidean, 2.0, false, 2).unwrap(),
            ConvexFunction::norm(Norm::lp(3.0).unwrap(), 1.0, true, 2).unwrap(),
            ConvexFunction::norm(Norm::Sup, 1.0, false, 2).unwrap(),
            ConvexFunction::quadratic(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![1.0, 0.0], 0.0)
                .unwrap(),
            ConvexFunction::neg_sqrt(vec![1.0, 1.0]).unwrap(),
        ];
        for f in &fs {
            let c = directional_derivative(f, &x, &y).unwrap().finite().unwrap();
            let n = numeric(f, x.coords(), y.coords())
                .unwrap()
                .finite()
                .unwrap();
            assert!((c - n).abs() < 1e-5, "{f:?}: {c} vs {n}");
        }
        let sup = ConvexFunction::norm(Norm::Sup, 1.0, false, 2).unwrap();
        assert_eq!(
            directional_derivative(&sup, &p(&[1.0, 1.0]), &p(&[-1.0, 1.0])).unwrap(),
            Extended::Finite(1.0)
        );
        let b =
            ConvexFunction::indicator(ConvexRegion::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap());
        assert_eq!(
            directional_derivative(&b, &p(&[1.0, 0.5]), &p(&[-1.0, 3.0])).unwrap(),
            Extended::Finite(0.0)
        );
        assert_eq!(
            directional_derivative(&b, &p(&[1.0, 0.5]), &p(&[1.0, 0.0])).unwrap(),
            Extended::PosInf
        );
    }

    #[test]
    fn sums_and_shifts() {
        let f = ConvexFunction::sum(vec![
            ConvexFunction::abs(),
            ConvexFunction::half_square(1).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            directional_derivative(&f, &p(&[0.0]), &p(&[-2.0])).unwrap(),
            Extended::Finite(2.0)
        );
        let g = ConvexFunction::affine_shift(
            ConvexFunction::abs(),
            p(&[1.0]),
            crate::model::Covector::from_f64s(&[0.5]).unwrap(),
            0.0,
        )
        .unwrap();
        assert_eq!(
            directional_derivative(&g, &p(&[1.0]), &p(&[1.0])).unwrap(),
            Extended::Finite(1.5)
        );
        assert_eq!(
            directional_derivative(&g, &p(&[1.0]), &p(&[-1.0])).unwrap(),
            Extended::Finite(0.5)
        );
    }

    proptest! {
        #[test]
        fn quotients_are_monotone(x0 in -2.0f64..2.0, x1 in -2.0f64..2.0, y0 in -3.0f64..3.0, y1 in -3.0f64..3.0, which in 0usize..4) {
            let f = match which {
                0 => ConvexFunction::norm(Norm::Euclidean, 1.0, false, 2).unwrap(),
                1 => ConvexFunction::quadratic(vec![vec![1.0, 0.5], vec![0.5, 2.0]], vec![0.0, 1.0], 0.0).unwrap(),
                2 => ConvexFunction::neg_sqrt(vec![3.0, 3.0]).unwrap(),
                _ => ConvexFunction::tabulate(GridSpec::uniform(vec![-4.0, -4.0], vec![4.0, 4.0], 32).unwrap(), |v| v[0].abs() + v[1] * v[1]).unwrap(),
            };
            let q = difference_quotients(&f, &p(&[x0, x1]), &p(&[y0, y1]), 20).unwrap();
            let finite: Vec<f64> = q.iter().filter_map(|(_, v)| v.finite()).collect();
            for w in finite.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-7 * (1.0 + w[0].abs()));
            }
        }
    }
}
