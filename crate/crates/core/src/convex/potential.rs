use serde::{Deserialize, Serialize};

use super::function::ConvexFunction;
use crate::error::{Error, Result};
use crate::model::certificate::{scalar_json, scalar_vec_json};
use crate::model::vector::dot;
use crate::model::{Certificate, Covector, OperatorGraph};
use crate::monotonicity::cyclic::check_cyclic;
use crate::scalar::{Scalar, Tolerance};

/// `x ↦ ⟨slope, x⟩ + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct AffinePiece<S: Scalar = f64> {
    pub slope: Covector<S>,
    #[serde(with = "scalar_json")]
    pub intercept: S,
}

impl<S: Scalar> AffinePiece<S> {
    pub fn at(&self, x: &[S]) -> S {
        dot(self.slope.coords(), x) + self.intercept.clone()
    }
}

/// A convex potential for a cyclically monotone graph, `f = max` of the
/// affine pieces, normalized by `f(x_base) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct PotentialReconstruction<S: Scalar = f64> {
    pub base_index: usize,
    #[serde(with = "scalar_vec_json")]
    pub node_values: Vec<S>,
    pub affine_pieces: Vec<AffinePiece<S>>,
}

fn tail_weight<S: Scalar>(g: &OperatorGraph<S>, i: usize, j: usize) -> S {
    let (p, q) = (&g.pairs()[i], &g.pairs()[j]);
    let diff: Vec<S> =
        q.x.coords()
            .iter()
            .zip(p.x.coords())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
    dot(p.xstar.coords(), &diff)
}

/// Longest-path values from `base` under tail weights
/// `v(i -> j) = ⟨x_i*, x_j - x_i⟩`; finite because the graph has no
/// positive cycles.
pub fn reconstruct_potential<S: Scalar>(
    g: &OperatorGraph<S>,
    base: usize,
    tol: &Tolerance,
) -> Result<PotentialReconstruction<S>> {
    g.require_nonempty()?;
    let n = g.len();
    if base >= n {
        return Err(Error::InvalidArgument(format!(
            "base index {base} out of range for {n} nodes"
        )));
    }
    let report = check_cyclic(g, tol)?;
    if !report.verdict {
        return Err(Error::NotCyclicallyMonotone {
            cycle: report.cycle,
            sum: report.sum.to_string(),
        });
    }
    let w: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| tail_weight(g, i, j)).collect())
        .collect();
    let mut val: Vec<Option<S>> = vec![None; n];
    val[base] = Some(S::zero());
    for _ in 1..n {
        let mut changed = false;
        for i in 0..n {
            let Some(vi) = val[i].clone() else { continue };
            for j in 0..n {
                if i == j || j == base {
                    continue;
                }
                let cand = vi.clone() + w[i][j].clone();
                if val[j].as_ref().is_none_or(|vj| cand > *vj) {
                    val[j] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let node_values: Vec<S> = val
        .into_iter()
        .map(|v| v.expect("complete graph reaches every node"))
        .collect();
    let affine_pieces = g
        .pairs()
        .iter()
        .zip(&node_values)
        .map(|(p, v)| AffinePiece {
            slope: p.xstar.clone(),
            intercept: v.clone() - dot(p.xstar.coords(), p.x.coords()),
        })
        .collect();
    Ok(PotentialReconstruction {
        base_index: base,
        node_values,
        affine_pieces,
    })
}

impl<S: Scalar> PotentialReconstruction<S> {
    pub fn eval_at(&self, x: &[S]) -> S {
        self.affine_pieces
            .iter()
            .map(|p| p.at(x))
            .reduce(S::max_of)
            .unwrap_or_else(S::zero)
    }

    /// Checks `v_j >= v_i + ⟨x_i*, x_j - x_i⟩` for every ordered node pair
    /// and that each node's own piece attains the maximum there. The
    /// certificate value is the smallest slack.
    pub fn verify_node_inequalities(
        &self,
        g: &OperatorGraph<S>,
        tol: &Tolerance,
    ) -> Result<Certificate<S>> {
        let n = g.len();
        if n != self.node_values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.node_values.len(),
                found: n,
            });
        }
        let mut worst: Option<S> = None;
        for i in 0..n {
            for j in 0..n {
                let s = self.node_values[j].clone()
                    - self.node_values[i].clone()
                    - tail_weight(g, i, j);
                if !s.nonneg(tol) {
                    return Ok(Certificate::fail(
                        vec![g.pairs()[i].clone(), g.pairs()[j].clone()],
                        s,
                    ));
                }
                worst = Some(match worst {
                    Some(w) => S::min_of(w, s),
                    None => s,
                });
            }
        }
        for (j, p) in g.pairs().iter().enumerate() {
            let f = self.eval_at(p.x.coords());
            if !f.same(&self.node_values[j], tol) {
                return Ok(Certificate::fail(
                    vec![p.clone()],
                    self.node_values[j].clone() - f,
                ));
            }
        }
        Ok(Certificate::pass(worst.unwrap_or_else(S::zero)).with_probe("graph nodes"))
    }

    pub fn to_convex_function(&self) -> Result<ConvexFunction> {
        let slopes = self
            .affine_pieces
            .iter()
            .map(|p| p.slope.to_f64())
            .collect();
        let intercepts = self
            .affine_pieces
            .iter()
            .map(|p| p.intercept.to_f64())
            .collect();
        ConvexFunction::max_affine(slopes, intercepts)
    }
}
