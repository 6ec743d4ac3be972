use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::scalar_json;
use crate::model::vector::cross;
use crate::model::{Covector, OperatorGraph, Point};
use crate::scalar::{Scalar, Tolerance};

/// Convex combination `(x, x*)` of graph pairs with the bound
/// `B = Σ_{i<j} t_i t_j ⟨x_j* - x_i*, x_j - x_i⟩` on `⟨y* - x*, x - y⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct HullBound<S: Scalar = f64> {
    pub x: Point<S>,
    pub xstar: Covector<S>,
    #[serde(with = "scalar_json")]
    pub bound: S,
    /// `max over g of ⟨y* - x*, x - y⟩`.
    #[serde(with = "scalar_json")]
    pub observed: S,
    pub verdict: bool,
}

pub fn convex_hull_range_bound<S: Scalar>(
    g: &OperatorGraph<S>,
    t: &[S],
    idx: &[usize],
    tol: &Tolerance,
) -> Result<HullBound<S>> {
    g.require_nonempty()?;
    if t.len() != idx.len() || t.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} indices",
            t.len(),
            idx.len()
        )));
    }
    if let Some(&bad) = idx.iter().find(|&&i| i >= g.len()) {
        return Err(Error::InvalidArgument(format!(
            "node index {bad} out of range"
        )));
    }
    if t.iter().any(|w| !w.nonneg(tol)) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let total = t.iter().fold(S::zero(), |a, w| a + w.clone());
    if !total.same(&S::one(), tol) {
        return Err(Error::InvalidArgument(format!(
            "weights sum to {total}, not 1"
        )));
    }
    let pairs: Vec<_> = idx.iter().map(|&i| &g.pairs()[i]).collect();
    let mut x = Point::zeros(g.dim());
    let mut xstar = Covector::zeros(g.dim());
    for (w, p) in t.iter().zip(&pairs) {
        x = x.add(&p.x.scale(w));
        xstar = xstar.add(&p.xstar.scale(w));
    }
    let mut bound = S::zero();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let w = t[i].clone() * t[j].clone();
            bound = bound + w * cross(&pairs[j].xstar, &pairs[i].xstar, &pairs[j].x, &pairs[i].x);
        }
    }
    let observed = g
        .pairs()
        .iter()
        .map(|q| cross(&q.xstar, &xstar, &x, &q.x))
        .reduce(S::max_of)
        .expect("nonempty graph");
    let verdict = (bound.clone() - observed.clone()).nonneg(tol);
    Ok(HullBound {
        x,
        xstar,
        bound,
        observed,
        verdict,
    })
}

/// `b = λz + (1-λ)y`, `b* = λz* + (1-λ)y*` and the margin
/// `r = -λ(1-λ)⟨z* - y*, z - y⟩` for a strictly violating pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Separation<S: Scalar = f64> {
    pub b: Point<S>,
    pub bstar: Covector<S>,
    #[serde(with = "scalar_json")]
    pub r: S,
}

pub fn separation_witness<S: Scalar>(
    z: &Point<S>,
    zstar: &Covector<S>,
    y: &Point<S>,
    ystar: &Covector<S>,
    lambda: &S,
    tol: &Tolerance,
) -> Result<Separation<S>> {
    let d = z.dim();
    zstar.check_dim(d)?;
    y.check_dim(d)?;
    ystar.check_dim(d)?;
    if !(*lambda > S::zero() && *lambda < S::one()) {
        return Err(Error::InvalidArgument(format!(
            "lambda = {lambda} must lie strictly between 0 and 1"
        )));
    }
    let prod = cross(ystar, zstar, y, z);
    if prod.nonneg(tol) {
        return Err(Error::Precondition(format!(
            "⟨y* - z*, y - z⟩ = {prod} is not negative"
        )));
    }
    let mu = S::one() - lambda.clone();
    let b = z.lerp(y, lambda);
    let bstar = zstar.lerp(ystar, lambda);
    let r = -(lambda.clone() * mu) * prod;
    Ok(Separation { b, bstar, r })
}

/// Both sides of the quadratic identity
/// `⟨λu* + (1-λ)v* - x*, λu + (1-λ)v - x⟩
///   = λ⟨u* - x*, u - x⟩ + (1-λ)⟨v* - x*, v - x⟩ - λ(1-λ)⟨u* - v*, u - v⟩`.
#[allow(clippy::too_many_arguments)]
pub fn quadratic_identity<S: Scalar>(
    u: &Point<S>,
    v: &Point<S>,
    x: &Point<S>,
    ustar: &Covector<S>,
    vstar: &Covector<S>,
    xstar: &Covector<S>,
    lambda: &S,
) -> Result<(S, S)> {
    let d = u.dim();
    for dim in [v.dim(), x.dim(), ustar.dim(), vstar.dim(), xstar.dim()] {
        if dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            });
        }
    }
    if *lambda < S::zero() || *lambda > S::one() {
        return Err(Error::InvalidArgument(format!(
            "lambda = {lambda} must lie in [0, 1]"
        )));
    }
    let mu = S::one() - lambda.clone();
    let c = u.lerp(v, lambda);
    let cstar = ustar.lerp(vstar, lambda);
    let lhs = cross(&cstar, xstar, &c, x);
    let rhs = lambda.clone() * cross(ustar, xstar, u, x) + mu.clone() * cross(vstar, xstar, v, x)
        - lambda.clone() * mu * cross(ustar, vstar, u, v);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphPair;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    #[test]
    fn hull_bound_example() {
        let g = OperatorGraph::from_pairs(vec![
            GraphPair::new(Point::from_i64s(&[0]), Covector::from_i64s(&[0])).unwrap(),
            GraphPair::new(Point::from_i64s(&[1]), Covector::from_i64s(&[1])).unwrap(),
        ])
        .unwrap();
        let tol = Tolerance::exact();
        let h = convex_hull_range_bound(&g, &[r(1, 2), r(1, 2)], &[0, 1], &tol).unwrap();
        assert_eq!(h.x.coords()[0], r(1, 2));
        assert_eq!(h.bound, r(1, 4));
        assert!(h.verdict);
        let single = convex_hull_range_bound(&g, &[r(1, 1)], &[1], &tol).unwrap();
        assert_eq!(single.bound, r(0, 1));
        assert!(single.verdict);
        assert!(convex_hull_range_bound(&g, &[r(1, 2), r(1, 3)], &[0, 1], &tol).is_err());
    }

    #[test]
    fn separation_example() {
        let tol = Tolerance::exact();
        let s = separation_witness(
            &Point::from_i64s(&[0]),
            &Covector::from_i64s(&[0]),
            &Point::from_i64s(&[1]),
            &Covector::from_i64s(&[-1]),
            &r(1, 2),
            &tol,
        )
        .unwrap();
        assert_eq!(s.b.coords()[0], r(1, 2));
        assert_eq!(s.bstar.coords()[0], r(-1, 2));
        assert_eq!(s.r, r(1, 4));
        for lam in [r(0, 1), r(1, 1)] {
            assert!(separation_witness(
                &Point::from_i64s(&[0]),
                &Covector::from_i64s(&[0]),
                &Point::from_i64s(&[1]),
                &Covector::from_i64s(&[-1]),
                &lam,
                &tol
            )
            .is_err());
        }
        let err = separation_witness(
            &Point::from_i64s(&[0]),
            &Covector::from_i64s(&[0]),
            &Point::from_i64s(&[1]),
            &Covector::from_i64s(&[1]),
            &r(1, 2),
            &tol,
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_endpoints() {
        let u = Point::from_i64s(&[1, 2]);
        let v = Point::from_i64s(&[-3, 0]);
        let x = Point::from_i64s(&[2, 2]);
        let us = Covector::from_i64s(&[0, 1]);
        let vs = Covector::from_i64s(&[5, -1]);
        let xs = Covector::from_i64s(&[1, 1]);
        let (l, rr) = quadratic_identity(&u, &v, &x, &us, &vs, &xs, &r(0, 1)).unwrap();
        assert_eq!(l, rr);
        assert_eq!(l, cross(&vs, &xs, &v, &x));
        let (l, rr) = quadratic_identity(&u, &v, &x, &us, &vs, &xs, &r(1, 1)).unwrap();
        assert_eq!(l, rr);
        assert_eq!(l, cross(&us, &xs, &u, &x));
    }

    fn rvec() -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-30i64..30, 1i64..12).prop_map(|(p, q)| r(p, q)), 3)
    }

    proptest! {
        #[test]
        fn identity_holds_exactly(a in rvec(), b in rvec(), c in rvec(), d in rvec(), e in rvec(), f in rvec(), l in 0i64..=12) {
            let lam = r(l, 12);
            let (lhs, rhs) = quadratic_identity(
                &Point::new(a).unwrap(), &Point::new(b).unwrap(), &Point::new(c).unwrap(),
                &Covector::new(d).unwrap(), &Covector::new(e).unwrap(), &Covector::new(f).unwrap(), &lam).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
