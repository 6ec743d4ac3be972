use crate::error::{Error, Result};
use crate::model::vector::dot;
use crate::model::{Certificate, Covector, GraphPair, Point};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};

fn diff<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.clone() - v.clone())
        .collect()
}

/// Euclidean metric projection onto `c`.
pub fn project<S: Scalar>(c: &ConvexRegion<S>, x: &Point<S>) -> Result<Point<S>> {
    Point::new(c.project(x.coords())?)
}

/// `(x, P(x))` as a graph pair of the projection.
fn proj_pair<S: Scalar>(x: &[S], p: &[S]) -> Result<GraphPair<S>> {
    GraphPair::new(Point::new(x.to_vec())?, Covector::new(p.to_vec())?)
}

/// Checks the variational inequality `⟨x - P(x), z - P(x)⟩ <= 0` for every
/// probe `z ∈ C`, and the strong monotonicity
/// `⟨u - v, P(u) - P(v)⟩ >= |P(u) - P(v)|²` over all pairs drawn from `x`
/// and the probes. On success the value is the largest VI product.
pub fn projection_vi_check<S: Scalar>(
    c: &ConvexRegion<S>,
    x: &Point<S>,
    probes: &[Point<S>],
    tol: &Tolerance,
) -> Result<Certificate<S>> {
    c.check_dim(x.dim())?;
    for (k, z) in probes.iter().enumerate() {
        z.check_dim(x.dim())?;
        if !c.contains(z.coords(), tol) {
            return Err(Error::InvalidArgument(format!(
                "probe {k} lies outside the region"
            )));
        }
    }
    let p = c.project(x.coords())?;
    let r = diff(x.coords(), &p);
    let mut worst: Option<S> = None;
    for z in probes {
        let v = dot(&r, &diff(z.coords(), &p));
        if !(-v.clone()).nonneg(tol) {
            return Ok(Certificate::fail(
                vec![
                    proj_pair(x.coords(), &p)?,
                    proj_pair(z.coords(), z.coords())?,
                ],
                v,
            ));
        }
        worst = Some(match worst {
            Some(w) => S::max_of(w, v),
            None => v,
        });
    }
    let mut pts: Vec<(Vec<S>, Vec<S>)> = vec![(x.coords().to_vec(), p)];
    for z in probes {
        pts.push((z.coords().to_vec(), c.project(z.coords())?));
    }
    if let Some(cert) = strong_pairs(&pts, tol)? {
        return Ok(cert);
    }
    Ok(Certificate::pass(worst.unwrap_or_else(S::zero)).with_probe("listed probes"))
}

fn strong_pairs<S: Scalar>(
    pts: &[(Vec<S>, Vec<S>)],
    tol: &Tolerance,
) -> Result<Option<Certificate<S>>> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (u, pu) = &pts[i];
            let (v, pv) = &pts[j];
            let dp = diff(pu, pv);
            let s = dot(&diff(u, v), &dp) - dot(&dp, &dp);
            if !s.nonneg(tol) {
                return Ok(Some(Certificate::fail(
                    vec![proj_pair(u, pu)?, proj_pair(v, pv)?],
                    s,
                )));
            }
        }
    }
    Ok(None)
}

/// Firm nonexpansiveness `⟨x - y, P(x) - P(y)⟩ >= |P(x) - P(y)|²` over all
/// pairs of arbitrary points.
pub fn firm_nonexpansive_check<S: Scalar>(
    c: &ConvexRegion<S>,
    points: &[Point<S>],
    tol: &Tolerance,
) -> Result<Certificate<S>> {
    let pts = points
        .iter()
        .map(|x| Ok((x.coords().to_vec(), c.project(x.coords())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(strong_pairs(&pts, tol)?
        .unwrap_or_else(|| Certificate::pass(S::zero()).with_probe("all point pairs")))
}
