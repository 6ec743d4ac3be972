//! Monotonicity of sampled operator graphs: pairwise checks, relatedness
//! (global and windowed), inversion and sums, cyclic monotonicity, 1-D
//! maximalization, coercivity and local-boundedness probes, and the
//! constructive witnesses built from convex combinations of graph pairs.

pub mod coercivity;
pub mod cyclic;
pub mod step;
pub mod witness;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use coercivity::{coercivity_profile, local_bound_probe, CoercivityProfile};
pub use cyclic::{check_cyclic, check_n_cyclic, cyclic_sum, CycleReport};
pub use step::{maximalize_1d, Interval, Piece, StepFunction1D};
pub use witness::{
    convex_hull_range_bound, quadratic_identity, separation_witness, HullBound, Separation,
};

use crate::error::{Error, Result};
use crate::model::vector::cross;
use crate::model::{Certificate, GraphPair, OperatorGraph};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};

/// `⟨x* - y*, x - y⟩` for two graph pairs.
pub fn pair_product<S: Scalar>(p: &GraphPair<S>, q: &GraphPair<S>) -> S {
    cross(&p.xstar, &q.xstar, &p.x, &q.x)
}

/// Checks every pair of graph elements. On failure the witnesses are the
/// lexicographically smallest violating index pair.
pub fn check_monotone<S: Scalar>(g: &OperatorGraph<S>, tol: &Tolerance) -> Result<Certificate<S>> {
    g.require_nonempty()?;
    let pairs = g.pairs();
    let n = pairs.len();
    let violation = (0..n).into_par_iter().find_map_first(|i| {
        (i + 1..n).find_map(|j| {
            let v = pair_product(&pairs[i], &pairs[j]);
            (!v.nonneg(tol)).then_some((i, j, v))
        })
    });
    if let Some((i, j, v)) = violation {
        return Ok(Certificate::fail(
            vec![pairs[i].clone(), pairs[j].clone()],
            v,
        ));
    }
    let min = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..n)
                .map(|j| pair_product(&pairs[i], &pairs[j]))
                .reduce(S::min_of)
        })
        .reduce_with(S::min_of)
        .unwrap_or_else(S::zero);
    Ok(Certificate::pass(min))
}

/// Is `p` monotonically related to every element of `g`? An empty graph
/// relates vacuously (value 0).
pub fn monotonically_related<S: Scalar>(
    p: &GraphPair<S>,
    g: &OperatorGraph<S>,
    tol: &Tolerance,
) -> Result<Certificate<S>> {
    p.x.check_dim(g.dim())?;
    p.xstar.check_dim(g.dim())?;
    let mut best: Option<(usize, S)> = None;
    for (k, q) in g.pairs().iter().enumerate() {
        let v = pair_product(p, q);
        match &best {
            Some((_, b)) if *b <= v => {}
            _ => best = Some((k, v)),
        }
    }
    Ok(match best {
        None => Certificate::pass(S::zero()).with_probe("empty graph"),
        Some((k, v)) if !v.nonneg(tol) => {
            Certificate::fail(vec![p.clone(), g.pairs()[k].clone()], v)
        }
        Some((_, v)) => Certificate::pass(v),
    })
}

/// The inverse operator's graph: every pair swapped.
pub fn invert<S: Scalar>(g: &OperatorGraph<S>) -> OperatorGraph<S> {
    let pairs = g
        .pairs()
        .iter()
        .map(|p| GraphPair {
            x: p.xstar.to_point(),
            xstar: p.x.to_covector(),
        })
        .collect();
    OperatorGraph::new(g.dim(), pairs).expect("swapping keeps dimensions")
}

/// Graph of `S + T` on the common domain: all covector sums at points
/// appearing in both graphs.
pub fn sum_graphs<S: Scalar>(
    s: &OperatorGraph<S>,
    t: &OperatorGraph<S>,
    tol: &Tolerance,
) -> Result<OperatorGraph<S>> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: t.dim(),
        });
    }
    let mut out = Vec::new();
    for p in s.pairs() {
        for q in t.pairs() {
            if p.x.same(&q.x, tol) {
                out.push(GraphPair {
                    x: p.x.clone(),
                    xstar: p.xstar.add(&q.xstar),
                });
            }
        }
    }
    OperatorGraph::new(s.dim(), out)
}

/// A covector window for localized relatedness: `None` is the whole dual
/// space; `open` selects the interior of the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Window<S: Scalar = f64> {
    #[serde(default)]
    pub region: Option<ConvexRegion<S>>,
    #[serde(default)]
    pub open: bool,
}

impl<S: Scalar> Window<S> {
    pub fn everything() -> Self {
        Window {
            region: None,
            open: false,
        }
    }

    pub fn open(region: ConvexRegion<S>) -> Self {
        Window {
            region: Some(region),
            open: true,
        }
    }

    pub fn closed(region: ConvexRegion<S>) -> Self {
        Window {
            region: Some(region),
            open: false,
        }
    }

    pub fn contains(&self, xstar: &[S], tol: &Tolerance) -> bool {
        match &self.region {
            None => true,
            Some(r) if self.open => r.contains_open(xstar, tol),
            Some(r) => r.contains(xstar, tol),
        }
    }
}

/// Relatedness of `p` to the part of `g` whose covectors lie in `window`.
pub fn window_related<S: Scalar>(
    p: &GraphPair<S>,
    g: &OperatorGraph<S>,
    window: &Window<S>,
    tol: &Tolerance,
) -> Result<Certificate<S>> {
    if let Some(r) = &window.region {
        r.check_dim(g.dim())?;
    }
    if !window.contains(p.xstar.coords(), tol) {
        return Err(Error::Precondition(
            "the pair's covector lies outside the window".into(),
        ));
    }
    let inside: Vec<GraphPair<S>> = g
        .pairs()
        .iter()
        .filter(|q| window.contains(q.xstar.coords(), tol))
        .cloned()
        .collect();
    let sub = OperatorGraph::new(g.dim(), inside)?;
    let cert = monotonically_related(p, &sub, tol)?;
    Ok(cert.with_probe(format!(
        "{} of {} graph pairs inside the window",
        sub.len(),
        g.len()
    )))
}
