//! Constructive versions of the existence lemmas: monotone extension of a
//! finite graph by one pair, a set-valued fixed point, and the pair in
//! `rB × -J` monotonically related to a bounded graph.
//!
//! Each "cover by violated constraints" argument becomes a direct search:
//! the sets `U(y, y*)` of candidates violating the pair `(y, y*)` are the
//! complements of the linear (or sampled) constraints solved here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::duality_map;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::certificate::scalar_json;
use crate::model::vector::dot;
use crate::model::{Covector, GraphPair, Norm, OperatorGraph, Point};
use crate::monotonicity::check_monotone;
use crate::polyhedral::{project_active_set, project_dykstra, project_halfspace, Halfspace};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};

/// Grid searches stop refining past this many nodes.
pub const MAX_SEARCH_NODES: usize = 1 << 20;
/// Nodes per axis on the first level.
pub const INITIAL_POINTS_PER_AXIS: usize = 9;
const DYKSTRA_TOL: f64 = 1e-10;
const DYKSTRA_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Extension<S: Scalar = f64> {
    pub xstar: Covector<S>,
    /// `min_(y, y*) ⟨x* - y*, φ(x*) - y⟩` over the graph (zero when empty).
    #[serde(with = "scalar_json")]
    pub min_product: S,
    /// Grid nodes examined; zero for the direct solve.
    pub points_searched: usize,
}

fn check_problem<S: Scalar>(
    m: &OperatorGraph<S>,
    c: &ConvexRegion<S>,
    tol: &Tolerance,
) -> Result<()> {
    if !m.is_empty() {
        c.check_dim(m.dim())?;
        if !check_monotone(m, tol)?.verdict {
            return Err(Error::Precondition("the graph M is not monotone".into()));
        }
    }
    if !c.is_bounded() {
        return Err(Error::Precondition(
            "the covector region C must be bounded".into(),
        ));
    }
    Ok(())
}

fn min_product<S: Scalar>(m: &OperatorGraph<S>, xs: &[S], x0: &[S]) -> S {
    m.pairs()
        .iter()
        .map(|p| {
            let a: Vec<S> = xs
                .iter()
                .zip(p.xstar.coords())
                .map(|(u, v)| u.clone() - v.clone())
                .collect();
            let b: Vec<S> = x0
                .iter()
                .zip(p.x.coords())
                .map(|(u, v)| u.clone() - v.clone())
                .collect();
            dot(&a, &b)
        })
        .reduce(S::min_of)
        .unwrap_or_else(S::zero)
}

/// Dykstra over halfspaces and one extra convex set given by its projector.
fn dykstra_with(
    rows: &[Halfspace<f64>],
    set: &ConvexRegion<f64>,
    point: &[f64],
) -> Result<Vec<f64>> {
    let d = point.len();
    let mut x = point.to_vec();
    let mut incr = vec![vec![0.0; d]; rows.len() + 1];
    let mut residual = f64::INFINITY;
    for _ in 0..DYKSTRA_SWEEPS {
        let prev = x.clone();
        for (k, p) in incr.iter_mut().enumerate() {
            let y: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
            let z = if k < rows.len() {
                project_halfspace(&rows[k], &y)
            } else {
                set.project(&y)?
            };
            for ((pi, yi), zi) in p.iter_mut().zip(&y).zip(&z) {
                *pi = yi - zi;
            }
            x = z;
        }
        let step = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let violation = rows
            .iter()
            .map(|h| dot(&h.normal, &x) - h.offset)
            .fold(0.0, f64::max);
        residual = step.max(violation).max(set.distance(&x)?);
        if residual <= DYKSTRA_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { residual })
}

/// Finds `x0* ∈ C` with `⟨x0* - y*, x0 - y⟩ >= 0` for every `(y, y*) ∈ M`,
/// the one nearest the barycenter of `C`. The constraints are linear in
/// `x0*`: `⟨y - x0, x0*⟩ <= ⟨y*, y - x0⟩`.
pub fn extend_constant<S: Scalar>(
    m: &OperatorGraph<S>,
    c: &ConvexRegion<S>,
    x0: &Point<S>,
    tol: &Tolerance,
) -> Result<Extension<S>> {
    check_problem(m, c, tol)?;
    c.check_dim(x0.dim())?;
    let centre = c.barycenter();
    if m.is_empty() {
        return Ok(Extension {
            xstar: Covector::new(centre)?,
            min_product: S::zero(),
            points_searched: 0,
        });
    }
    let rows: Vec<Halfspace<S>> = m
        .pairs()
        .iter()
        .filter_map(|p| {
            let n: Vec<S> =
                p.x.coords()
                    .iter()
                    .zip(x0.coords())
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
            (!n.iter().all(|v| *v == S::zero())).then(|| {
                let b = dot(p.xstar.coords(), &n);
                Halfspace::new(n, b)
            })
        })
        .collect();
    let solved = match c.as_halfspaces() {
        Some(mut all) => {
            all.extend(rows.iter().cloned());
            match project_active_set(&all, &centre, tol) {
                Ok(Some(x)) => x,
                Ok(None) => return Err(infeasible(m, c, &centre, x0)),
                Err(Error::TooLarge(_)) => {
                    let f: Vec<Halfspace<f64>> = all.iter().map(|h| h.to_f64()).collect();
                    let c64: Vec<f64> = centre.iter().map(|v| v.to_f64()).collect();
                    let x = project_dykstra(&f, &c64, DYKSTRA_TOL, DYKSTRA_SWEEPS)?;
                    x.into_iter().map(S::from_f64).collect::<Result<Vec<S>>>()?
                }
                Err(e) => return Err(e),
            }
        }
        None => {
            let f: Vec<Halfspace<f64>> = rows.iter().map(|h| h.to_f64()).collect();
            let c64: Vec<f64> = centre.iter().map(|v| v.to_f64()).collect();
            let x = dykstra_with(&f, &c.to_f64(), &c64)?;
            x.into_iter().map(S::from_f64).collect::<Result<Vec<S>>>()?
        }
    };
    let mp = min_product(m, &solved, x0.coords());
    if !mp.nonneg(tol) || !c.contains(&solved, tol) {
        return Err(infeasible(m, c, &solved, x0));
    }
    Ok(Extension {
        xstar: Covector::new(solved)?,
        min_product: mp,
        points_searched: 0,
    })
}

fn infeasible<S: Scalar>(
    m: &OperatorGraph<S>,
    _c: &ConvexRegion<S>,
    at: &[S],
    x0: &Point<S>,
) -> Error {
    Error::Infeasible(format!(
        "no monotone extension found; max violation {} at {at:?}",
        -min_product(m, at, x0.coords()).to_f64()
    ))
}

/// The map `φ: C -> E` of a general extension problem.
pub enum Phi<'a> {
    Constant(Point),
    Map(&'a (dyn Fn(&Covector) -> Result<Point> + Sync)),
}

/// Dyadic grids on `[lo, hi]`: 9 nodes per axis, then 17, 33, ... while the
/// node count stays within [`MAX_SEARCH_NODES`].
fn dyadic_levels(lo: &[f64], hi: &[f64]) -> Result<Vec<GridSpec>> {
    let d = lo.len();
    let mut out = Vec::new();
    let mut steps = INITIAL_POINTS_PER_AXIS - 1;
    while (steps + 1)
        .checked_pow(d as u32)
        .is_some_and(|n| n <= MAX_SEARCH_NODES)
    {
        let degenerate: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| if a == b { 0 } else { steps })
            .collect();
        out.push(GridSpec::new(lo.to_vec(), hi.to_vec(), degenerate)?);
        steps *= 2;
    }
    Ok(out)
}

fn require_small(d: usize) -> Result<()> {
    if d > 3 {
        return Err(Error::Unsupported(format!(
            "grid searches need dimension at most 3, got {d}"
        )));
    }
    Ok(())
}

/// Maximizes `min_(y, y*) ⟨x* - y*, φ(x*) - y⟩` over refining grids on `C`;
/// among nodes reaching `-tol`, the one nearest the barycenter wins. A
/// constant `φ` is the linear problem of [`extend_constant`].
pub fn extend_general(
    m: &OperatorGraph,
    c: &ConvexRegion,
    phi: &Phi,
    tol: &Tolerance,
) -> Result<Extension> {
    if let Phi::Constant(x0) = phi {
        return extend_constant(m, c, x0, tol);
    }
    let Phi::Map(map) = phi else { unreachable!() };
    check_problem(m, c, tol)?;
    let centre = c.barycenter();
    if m.is_empty() {
        return Ok(Extension {
            xstar: Covector::from_f64s(&centre)?,
            min_product: 0.0,
            points_searched: 0,
        });
    }
    require_small(c.dim())?;
    let (lo, hi) = c.bounding_box()?;
    let mut searched = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for g in dyadic_levels(&lo, &hi)? {
        searched += g.len();
        let scored = (0..g.len())
            .into_par_iter()
            .filter_map(|k| {
                let xs = g.node(k);
                if !c.contains(&xs, tol) {
                    return None;
                }
                Some((|| {
                    let cov = Covector::from_f64s(&xs)?;
                    let y = map(&cov)?;
                    y.check_dim(xs.len())?;
                    Ok((k, min_product(m, &xs, y.coords()), xs))
                })())
            })
            .collect::<Result<Vec<_>>>()?;
        let pick = scored
            .iter()
            .filter(|(_, v, _)| *v >= -tol.abs)
            .map(|(k, v, xs)| (dist2(xs, &centre), *k, *v, xs))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((_, _, v, xs)) = pick {
            return Ok(Extension {
                xstar: Covector::from_f64s(xs)?,
                min_product: v,
                points_searched: searched,
            });
        }
        if let Some((_, v, xs)) = scored
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        {
            if best.as_ref().is_none_or(|(b, _)| v > b) {
                best = Some((*v, xs.clone()));
            }
        }
    }
    Err(match best {
        Some((v, xs)) => {
            Error::SearchExhausted(format!("best candidate {xs:?} reaches min product {v}"))
        }
        None => Error::SearchExhausted("no grid node lies in C".into()),
    })
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub u: Point,
    /// Euclidean distance from `u` to `R(u)`.
    pub distance: f64,
    pub points_searched: usize,
}

/// Finds `u ∈ K` with `dist(u, R(u)) <= tol`: refining grid search for the
/// smallest distance (lowest index among ties), each level polished by the
/// alternating map `u -> P_K(P_R(u)(u))`.
pub fn kakutani_witness(
    r: &(dyn Fn(&Point) -> Result<Option<ConvexRegion>> + Sync),
    k: &ConvexRegion,
    tol: f64,
) -> Result<FixedPoint> {
    require_small(k.dim())?;
    let inside = Tolerance::default();
    let eval = |u: &[f64]| -> Result<(f64, ConvexRegion)> {
        let p = Point::from_f64s(u)?;
        let set = r(&p)?.ok_or_else(|| Error::EmptyRegion(format!("R({u:?}) is empty")))?;
        set.check_dim(u.len())?;
        Ok((set.distance(u)?, set))
    };
    let (lo, hi) = k.bounding_box()?;
    let mut searched = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for g in dyadic_levels(&lo, &hi)? {
        searched += g.len();
        let scored = (0..g.len())
            .into_par_iter()
            .filter_map(|i| {
                let u = g.node(i);
                k.contains(&u, &inside)
                    .then(|| eval(&u).map(|(d, _)| (i, d, u)))
            })
            .collect::<Result<Vec<_>>>()?;
        let Some((_, d, u)) = scored
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        else {
            continue;
        };
        let (mut u, mut d) = (u, d);
        for _ in 0..100 {
            if d <= tol {
                break;
            }
            let (_, set) = eval(&u)?;
            let next = k.project(&set.project(&u)?)?;
            let (nd, _) = eval(&next)?;
            if nd >= d {
                break;
            }
            u = next;
            d = nd;
        }
        if d <= tol {
            return Ok(FixedPoint {
                u: Point::from_f64s(&u)?,
                distance: d,
                points_searched: searched,
            });
        }
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, u));
        }
    }
    Err(match best {
        Some((d, u)) => Error::SearchExhausted(format!("best candidate {u:?} at distance {d}")),
        None => Error::SearchExhausted("no grid node lies in K".into()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrowderWitness {
    pub pair: GraphPair,
    /// `min_(y, y*) ⟨x* - y*, x - y⟩` over the graph.
    pub min_product: f64,
    pub points_searched: usize,
}

/// Searches `x ∈ rB` (norm `n`) and `x* ∈ -J(x)` maximizing `min ⟨x* - y*, x - y⟩` over the graph; stops at the first
/// level whose best node, after a local pattern search, reaches `-tol`.
pub fn browder_witness(
    t: &OperatorGraph,
    r: f64,
    n: &Norm,
    tol: &Tolerance,
) -> Result<BrowderWitness> {
    t.require_nonempty()?;
    n.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let d = t.dim();
    require_small(d)?;
    let rr = r * (1.0 + tol.rel) + tol.abs;
    if let Some(k) = t.pairs().iter().position(|p| !n.le(p.x.coords(), &rr)) {
        return Err(Error::Precondition(format!(
            "graph point {k} lies outside rB"
        )));
    }
    let mut searched = 0;
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for g in dyadic_levels(&vec![-r; d], &vec![r; d])? {
        searched += g.len();
        let scored = (0..g.len())
            .into_par_iter()
            .filter_map(|k| {
                let x = g.node(k);
                n.le(&x, &r)
                    .then(|| best_minus_j(t, n, &x).map(|(v, xs)| (k, v, x, xs)))
            })
            .collect::<Result<Vec<_>>>()?;
        let Some((_, v, x, xs)) = scored
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        else {
            continue;
        };
        let (v, x, xs) = if v >= -tol.abs {
            (v, x, xs)
        } else {
            polish(t, r, n, (v, x, xs), g.max_spacing(), tol)?
        };
        if v >= -tol.abs {
            return Ok(BrowderWitness {
                pair: GraphPair::from_f64s(&x, &xs)?,
                min_product: v,
                points_searched: searched,
            });
        }
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, x, xs));
        }
    }
    let (v, x, _) = best.expect("the origin is always a node");
    Err(Error::SearchExhausted(format!(
        "best candidate {x:?} reaches min product {v}"
    )))
}

/// The covector in `-J(x)` with the largest min product: exact for a single
/// value, golden section along each edge of a face otherwise.
fn best_minus_j(t: &OperatorGraph, n: &Norm, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let ext: Vec<Vec<f64>> = duality_map(n, &Point::from_f64s(x)?)?
        .extreme_points()
        .iter()
        .map(|e| e.coords().iter().map(|v| -v).collect())
        .collect();
    let score = |xs: &[f64]| min_product(t, xs, x);
    let mut best = ext
        .iter()
        .map(|e| (score(e), e.clone()))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty image");
    for i in 0..ext.len() {
        for j in i + 1..ext.len() {
            let at = |s: f64| -> Vec<f64> {
                ext[i]
                    .iter()
                    .zip(&ext[j])
                    .map(|(a, b)| a + s * (b - a))
                    .collect()
            };
            let (mut a, mut b) = (0.0f64, 1.0f64);
            for _ in 0..80 {
                let (c, d) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
                if score(&at(c)) < score(&at(d)) {
                    a = c;
                } else {
                    b = d;
                }
            }
            let xs = at(0.5 * (a + b));
            let v = score(&xs);
            if v > best.0 {
                best = (v, xs);
            }
        }
    }
    Ok(best)
}

/// Pattern search from a grid node: axis and Halton directions, halving the
/// step until it underflows the tolerance scale.
fn polish(
    t: &OperatorGraph,
    r: f64,
    n: &Norm,
    start: (f64, Vec<f64>, Vec<f64>),
    h: f64,
    tol: &Tolerance,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let d = start.1.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        for sgn in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = sgn;
            dirs.push(e);
        }
    }
    for k in 1..=64u64 {
        let u: Vec<f64> = crate::grid::halton_point(k, d)
            .iter()
            .map(|v| 2.0 * v - 1.0)
            .collect();
        let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 0.0 {
            dirs.push(u.iter().map(|v| v / len).collect());
        }
    }
    let (mut v, mut x, mut xs) = start;
    let mut step = h;
    while step > 1e-15 * r && v < -tol.abs {
        let trial = dirs
            .par_iter()
            .enumerate()
            .filter_map(|(k, u)| {
                let y: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + step * b).collect();
                n.le(&y, &r)
                    .then(|| best_minus_j(t, n, &y).map(|(w, ys)| (k, w, y, ys)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match trial {
            Some((_, w, y, ys)) if w > v => (v, x, xs) = (w, y, ys),
            _ => step /= 2.0,
        }
    }
    Ok((v, x, xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotonicity::{maximalize_1d, StepFunction1D};
    use crate::scalar::Rational;

    fn q(a: i64) -> Rational {
        Rational::from_i64(a)
    }

    fn interval(a: i64, b: i64) -> ConvexRegion<Rational> {
        ConvexRegion::boxed(vec![q(a)], vec![q(b)]).unwrap()
    }

    fn two_pairs() -> OperatorGraph<Rational> {
        OperatorGraph::from_pairs(vec![
            GraphPair::new(Point::from_i64s(&[-1]), Covector::from_i64s(&[-1])).unwrap(),
            GraphPair::new(Point::from_i64s(&[1]), Covector::from_i64s(&[1])).unwrap(),
        ])
        .unwrap()
    }

    /// Interval intersection of the constraints `(x* - y*)(x0 - y) >= 0`.
    fn oracle(
        m: &OperatorGraph<Rational>,
        x0: &Rational,
        lo: Rational,
        hi: Rational,
    ) -> (Rational, Rational) {
        m.pairs().iter().fold((lo, hi), |(l, h), p| {
            let a = x0.clone() - p.x.coords()[0].clone();
            let ys = p.xstar.coords()[0].clone();
            if a > q(0) {
                (Rational::max_of(l, ys), h)
            } else if a < q(0) {
                (l, Rational::min_of(h, ys))
            } else {
                (l, h)
            }
        })
    }

    #[test]
    fn constant_examples() {
        let tol = Tolerance::exact();
        let m = two_pairs();
        let c = interval(-1, 1);
        let e = extend_constant(&m, &c, &Point::from_i64s(&[0]), &tol).unwrap();
        assert_eq!(e.xstar, Covector::from_i64s(&[0]));
        let e = extend_constant(&m, &c, &Point::from_i64s(&[2]), &tol).unwrap();
        assert_eq!(e.xstar, Covector::from_i64s(&[1]));
        assert_eq!(oracle(&m, &q(2), q(-1), q(1)), (q(1), q(1)));
        let empty = OperatorGraph::<Rational>::empty(1);
        let e = extend_constant(&empty, &interval(2, 6), &Point::from_i64s(&[0]), &tol).unwrap();
        assert_eq!(e.xstar, Covector::from_i64s(&[4]));
    }

    #[test]
    fn maximal_operators_extend_everywhere() {
        let tol = Tolerance::exact();
        let t = maximalize_1d(
            &StepFunction1D::steps(
                vec![Rational::ratio(-1, 2), Rational::ratio(1, 3)],
                vec![q(-1), Rational::ratio(1, 4), q(1)],
            )
            .unwrap(),
        );
        let xs: Vec<Rational> = (-8..=8).map(|k| Rational::ratio(k, 8)).collect();
        let m = t.sample_graph(&xs).unwrap();
        let c = interval(-1, 1);
        for k in -20..=20 {
            let x0 = Rational::ratio(k, 10);
            let e = extend_constant(&m, &c, &Point::new(vec![x0.clone()]).unwrap(), &tol).unwrap();
            let (lo, hi) = oracle(&m, &x0, q(-1), q(1));
            let v = e.xstar.coords()[0].clone();
            assert!(lo <= v && v <= hi);
            let mut g = m.clone();
            g.push(GraphPair::new(Point::new(vec![x0]).unwrap(), e.xstar.clone()).unwrap())
                .unwrap();
            assert!(check_monotone(&g, &tol).unwrap().verdict);
        }
    }

    #[test]
    fn two_dimensional_polytope_and_disk() {
        let tol = Tolerance::default();
        let m = OperatorGraph::from_pairs(vec![
            GraphPair::from_f64s(&[1.0, 0.0], &[1.0, 0.5]).unwrap(),
            GraphPair::from_f64s(&[0.0, 1.0], &[-0.5, 1.0]).unwrap(),
            GraphPair::from_f64s(&[-1.0, -1.0], &[-1.0, -1.0]).unwrap(),
        ])
        .unwrap();
        let x0 = Point::from_f64s(&[0.5, 0.5]).unwrap();
        let square = ConvexRegion::cube(2, 2.0).unwrap();
        let e = extend_constant(&m, &square, &x0, &tol).unwrap();
        assert!(e.min_product >= -1e-9);
        let disk = ConvexRegion::ball(Norm::Euclidean, 2.0, vec![0.0, 0.0]).unwrap();
        let e2 = extend_constant(&m, &disk, &x0, &tol).unwrap();
        assert!(e2.min_product >= -1e-9 && disk.contains(e2.xstar.coords(), &tol));
        let g = extend_general(&m, &square, &Phi::Constant(x0.clone()), &tol).unwrap();
        assert!(g.xstar.same(&e.xstar, &Tolerance::with_abs(1e-8)));
    }

    #[test]
    fn general_examples() {
        let tol = Tolerance::default();
        let c = ConvexRegion::cube(1, 1.0).unwrap();
        let ident = OperatorGraph::sample(
            &(-4..=4)
                .map(|k| Point::from_f64s(&[k as f64 / 4.0]).unwrap())
                .collect::<Vec<_>>(),
            |x| x.to_covector(),
        )
        .unwrap();
        let id = |s: &Covector| Ok(s.to_point());
        let e = extend_general(&ident, &c, &Phi::Map(&id), &tol).unwrap();
        assert_eq!(e.xstar.coords(), &[0.0]);
        let single =
            OperatorGraph::from_pairs(vec![GraphPair::from_f64s(&[1.0], &[0.0]).unwrap()]).unwrap();
        let neg = |s: &Covector| Ok(s.to_point().neg());
        let e = extend_general(&single, &c, &Phi::Map(&neg), &tol).unwrap();
        // sign analysis: x*(-x* - 1) >= 0 exactly on [-1, 0]
        let v = e.xstar.coords()[0];
        assert!((-1.0..=0.0).contains(&v));
        assert!(v * (-v - 1.0) >= -1e-9);
    }

    #[test]
    fn fixed_points() {
        let k = ConvexRegion::boxed(vec![0.0], vec![1.0]).unwrap();
        let shrink = |u: &Point| {
            Ok(Some(ConvexRegion::boxed(
                vec![0.0],
                vec![1.0 - u.coords()[0]],
            )?))
        };
        let w = kakutani_witness(&shrink, &k, 1e-9).unwrap();
        assert!(w.u.coords()[0] <= 0.5 + 1e-9);
        let constant = |_: &Point| Ok(Some(ConvexRegion::boxed(vec![0.3], vec![0.3])?));
        let w = kakutani_witness(&constant, &k, 1e-9).unwrap();
        assert!((w.u.coords()[0] - 0.3).abs() <= 1e-9);
        let ident = |u: &Point| {
            Ok(Some(ConvexRegion::boxed(
                u.coords().to_vec(),
                u.coords().to_vec(),
            )?))
        };
        assert_eq!(kakutani_witness(&ident, &k, 1e-9).unwrap().distance, 0.0);
        let empty = |_: &Point| Ok(None);
        assert!(matches!(
            kakutani_witness(&empty, &k, 1e-9),
            Err(Error::EmptyRegion(_))
        ));
    }

    #[test]
    fn browder_examples() {
        let tol = Tolerance::default();
        let pts: Vec<Point> = (-4..=4)
            .map(|k| Point::from_f64s(&[k as f64 / 4.0]).unwrap())
            .collect();
        let ident = OperatorGraph::sample(&pts, |x| x.to_covector()).unwrap();
        let w = browder_witness(&ident, 1.0, &Norm::Euclidean, &tol).unwrap();
        assert_eq!(w.pair.x.coords(), &[0.0]);
        assert_eq!(w.pair.xstar.coords(), &[0.0]);
        let single =
            OperatorGraph::from_pairs(vec![GraphPair::from_f64s(&[0.0], &[0.0]).unwrap()]).unwrap();
        let w = browder_witness(&single, 1.0, &Norm::Euclidean, &tol).unwrap();
        assert_eq!(w.pair.x.coords(), &[0.0]);
        let grid2: Vec<Point> = (-2..=2)
            .flat_map(|i| {
                (-2..=2).map(move |j| Point::from_f64s(&[i as f64 / 2.0, j as f64 / 2.0]).unwrap())
            })
            .collect();
        for n in [Norm::Euclidean, Norm::Sup, Norm::L1] {
            let inside: Vec<Point> = grid2
                .iter()
                .filter(|p| n.le(p.coords(), &1.0))
                .cloned()
                .collect();
            let constant =
                OperatorGraph::sample(&inside, |_| Covector::from_f64s(&[0.3, -0.2]).unwrap())
                    .unwrap();
            let w = browder_witness(&constant, 1.0, &n, &tol).unwrap();
            // exhaustive verification over the graph, then the -J identities
            let mut g = constant.clone();
            g.push(w.pair.clone()).unwrap();
            assert!(check_monotone(&g, &tol).unwrap().verdict);
            let nx = n.eval_slice(w.pair.x.coords());
            assert!((n.dual().eval_slice(w.pair.xstar.coords()) - nx).abs() < 1e-9);
            assert!((dot(w.pair.xstar.coords(), w.pair.x.coords()) + nx * nx).abs() < 1e-9);
        }
    }
}
