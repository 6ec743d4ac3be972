use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::min_symmetric_eigenvalue;
use crate::model::vector::dot;
use crate::model::{Certificate, Covector, GraphPair, Point};
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct PositivityReport<S: Scalar = f64> {
    /// `⟨Ax, x⟩ >= 0` on the samples; the value is the smallest product.
    pub certificate: Certificate<S>,
    /// Smallest eigenvalue of `(A + Aᵀ)/2`: positive on all of `R^d` iff
    /// this is `>= 0`.
    pub min_eigenvalue: f64,
}

pub fn apply<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Vec<S> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn positive_check<S: Scalar>(
    a: &[Vec<S>],
    samples: &[Point<S>],
    tol: &Tolerance,
) -> Result<PositivityReport<S>> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(
            "matrix must be square and nonempty".into(),
        ));
    }
    let af: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64()).collect())
        .collect();
    let min_eigenvalue = min_symmetric_eigenvalue(&af);
    let mut worst: Option<S> = None;
    for x in samples {
        x.check_dim(n)?;
        let ax = apply(a, x.coords());
        let v = dot(&ax, x.coords());
        if !v.nonneg(tol) {
            let cert = Certificate::fail(vec![GraphPair::new(x.clone(), Covector::new(ax)?)?], v);
            return Ok(PositivityReport {
                certificate: cert,
                min_eigenvalue,
            });
        }
        worst = Some(match worst {
            Some(w) => S::min_of(w, v),
            None => v,
        });
    }
    Ok(PositivityReport {
        certificate: Certificate::pass(worst.unwrap_or_else(S::zero)).with_probe("listed samples"),
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn m(rows: &[[i64; 2]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|v| Rational::from_i64(*v)).collect())
            .collect()
    }

    fn samples() -> Vec<Point<Rational>> {
        let mut v = Vec::new();
        for i in -3..=3 {
            for j in -3..=3 {
                v.push(Point::from_i64s(&[i, j]));
            }
        }
        v
    }

    #[test]
    fn examples() {
        let tol = Tolerance::exact();
        let id = positive_check(&m(&[[1, 0], [0, 1]]), &samples(), &tol).unwrap();
        assert!(id.certificate.verdict && id.min_eigenvalue == 1.0);
        let rot = positive_check(&m(&[[0, 1], [-1, 0]]), &samples(), &tol).unwrap();
        assert!(rot.certificate.verdict);
        assert_eq!(rot.certificate.value, Rational::from_i64(0));
        assert_eq!(rot.min_eigenvalue, 0.0);
        let bad = positive_check(
            &m(&[[1, 0], [0, -1]]),
            &[Point::from_i64s(&[1, 0]), Point::from_i64s(&[0, 1])],
            &tol,
        )
        .unwrap();
        assert!(!bad.certificate.verdict);
        assert_eq!(bad.certificate.witnesses[0].x, Point::from_i64s(&[0, 1]));
        assert_eq!(bad.certificate.value, Rational::from_i64(-1));
        assert_eq!(bad.min_eigenvalue, -1.0);
    }
}
