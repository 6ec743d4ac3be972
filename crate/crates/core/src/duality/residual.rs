use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::vector::dot;
use crate::model::{Certificate, GraphPair, Point};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct ResidualReport<S: Scalar = f64> {
    /// Nonexpansiveness of `U` and monotonicity of `T = I - U` over sample
    /// pairs. Witnesses are `(x, Tx)` pairs.
    pub certificate: Certificate<S>,
    /// A sample with `|x - U(x)| <= tol`, i.e. a zero of `T`.
    pub fixed_point: Option<Point<S>>,
}

fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.clone() - v.clone())
        .collect()
}

/// Checks `|U x - U y| <= |x - y|` and `⟨Tx - Ty, x - y⟩ >= 0` for
/// `T = I - U` on all sample pairs (Euclidean norm, compared squared).
/// The passing value is the smallest `|x - y|² - |Ux - Uy|²`.
pub fn nonexpansive_residual<S: Scalar>(
    u: impl Fn(&Point<S>) -> Result<Point<S>>,
    c: &ConvexRegion<S>,
    samples: &[Point<S>],
    tol: &Tolerance,
) -> Result<ResidualReport<S>> {
    let mut images = Vec::with_capacity(samples.len());
    for (k, x) in samples.iter().enumerate() {
        c.check_dim(x.dim())?;
        if !c.contains(x.coords(), tol) {
            return Err(Error::InvalidArgument(format!(
                "sample {k} lies outside the region"
            )));
        }
        let ux = u(x)?;
        ux.check_dim(x.dim())?;
        if !c.contains(ux.coords(), tol) {
            return Err(Error::Oracle(format!(
                "U maps sample {k} = {x:?} to {ux:?}, outside the region"
            )));
        }
        images.push(ux);
    }
    let t: Vec<Vec<S>> = samples
        .iter()
        .zip(&images)
        .map(|(x, ux)| sub(x.coords(), ux.coords()))
        .collect();
    let pair = |k: usize| -> Result<GraphPair<S>> {
        GraphPair::new(
            samples[k].clone(),
            crate::model::Covector::new(t[k].clone())?,
        )
    };
    let fixed_point = samples
        .iter()
        .zip(&t)
        .find(|(_, r)| {
            let r2 = dot(r, r);
            if S::EXACT {
                r2 == S::zero()
            } else {
                r2.to_f64().sqrt() <= tol.abs
            }
        })
        .map(|(x, _)| x.clone());
    let mut worst: Option<S> = None;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let dx = sub(samples[i].coords(), samples[j].coords());
            let du = sub(images[i].coords(), images[j].coords());
            let gap = dot(&dx, &dx) - dot(&du, &du);
            if !gap.nonneg(tol) {
                return Ok(ResidualReport {
                    certificate: Certificate::fail(vec![pair(i)?, pair(j)?], gap),
                    fixed_point,
                });
            }
            let mono = dot(&sub(&t[i], &t[j]), &dx);
            if !mono.nonneg(tol) {
                return Ok(ResidualReport {
                    certificate: Certificate::fail(vec![pair(i)?, pair(j)?], mono),
                    fixed_point,
                });
            }
            worst = Some(match worst {
                Some(w) => S::min_of(w, gap),
                None => gap,
            });
        }
    }
    Ok(ResidualReport {
        certificate: Certificate::pass(worst.unwrap_or_else(S::zero)).with_probe("sample pairs"),
        fixed_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Norm;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    fn disk_samples() -> Vec<Point<Rational>> {
        let mut v = Vec::new();
        for i in -3..=3 {
            for j in -3..=3 {
                if i * i + j * j <= 9 {
                    v.push(Point::new(vec![q(i, 3), q(j, 3)]).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn rotation_of_the_disk() {
        let disk = ConvexRegion::ball(
            Norm::Euclidean,
            Rational::from_i64(1),
            vec![Rational::from_i64(0); 2],
        )
        .unwrap();
        let rot =
            |x: &Point<Rational>| Point::new(vec![-x.coords()[1].clone(), x.coords()[0].clone()]);
        let r = nonexpansive_residual(rot, &disk, &disk_samples(), &Tolerance::exact()).unwrap();
        assert!(r.certificate.verdict);
        assert_eq!(r.certificate.value, Rational::from_i64(0));
        assert_eq!(r.fixed_point, Some(Point::from_i64s(&[0, 0])));
    }

    #[test]
    fn projection_is_nonexpansive() {
        let tol = Tolerance::default();
        let big = ConvexRegion::cube(2, 3.0).unwrap();
        let ball = ConvexRegion::ball(Norm::Euclidean, 1.0, vec![0.5, 0.0]).unwrap();
        let samples: Vec<Point> = (0..60)
            .map(|k| {
                Point::from_f64s(&[3.0 * (k as f64 * 0.7).sin(), 3.0 * (k as f64 * 1.3).cos()])
                    .unwrap()
            })
            .collect();
        let r = nonexpansive_residual(
            |x: &Point| Point::new(ball.project(x.coords())?),
            &big,
            &samples,
            &tol,
        )
        .unwrap();
        assert!(r.certificate.verdict);
    }

    #[test]
    fn doubling_fails() {
        let tol = Tolerance::exact();
        let plane = ConvexRegion::cube(1, Rational::from_i64(10)).unwrap();
        let samples: Vec<Point<Rational>> =
            [0, 1, 2].iter().map(|v| Point::from_i64s(&[*v])).collect();
        let r = nonexpansive_residual(
            |x: &Point<Rational>| Ok(x.scale(&Rational::from_i64(2))),
            &plane,
            &samples,
            &tol,
        )
        .unwrap();
        assert!(!r.certificate.verdict);
        assert_eq!(r.certificate.witnesses.len(), 2);
        assert_eq!(r.certificate.value, Rational::from_i64(-3));
        let leaves = nonexpansive_residual(
            |x: &Point<Rational>| Ok(x.scale(&Rational::from_i64(20))),
            &plane,
            &samples,
            &tol,
        );
        assert!(matches!(leaves, Err(Error::Oracle(_))));
    }
}
