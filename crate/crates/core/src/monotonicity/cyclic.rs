use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::scalar_json;
use crate::model::vector::dot;
use crate::model::OperatorGraph;
use crate::scalar::{Scalar, Tolerance};

/// Longest cycle the exhaustive enumeration accepts.
pub const MAX_CYCLE_LENGTH: usize = 6;
/// Largest graph the exhaustive enumeration accepts.
pub const MAX_EXHAUSTIVE_NODES: usize = 12;

/// Outcome of a cyclic-monotonicity check. `cycle` lists node indices
/// `c_0, ..., c_{n-1}` and `sum` is `Σ_k ⟨x*_{c_k}, x_{c_k} - x_{c_{k-1}}⟩`
/// with indices mod `n`. On success the reported cycle is the one with the
/// smallest sum seen (empty when there is none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct CycleReport<S: Scalar = f64> {
    pub verdict: bool,
    pub cycle: Vec<usize>,
    #[serde(with = "scalar_json")]
    pub sum: S,
}

/// Head weight `⟨x_j*, x_j - x_i⟩` of the step `i -> j`.
fn head_weight<S: Scalar>(g: &OperatorGraph<S>, i: usize, j: usize) -> S {
    let (p, q) = (&g.pairs()[i], &g.pairs()[j]);
    let diff: Vec<S> =
        q.x.coords()
            .iter()
            .zip(p.x.coords())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
    dot(q.xstar.coords(), &diff)
}

/// The cyclic sum of `cycle` (closing back to its first node).
pub fn cyclic_sum<S: Scalar>(g: &OperatorGraph<S>, cycle: &[usize]) -> Result<S> {
    if let Some(&bad) = cycle.iter().find(|&&c| c >= g.len()) {
        return Err(Error::InvalidArgument(format!(
            "node index {bad} out of range"
        )));
    }
    let n = cycle.len();
    Ok((0..n).fold(S::zero(), |acc, k| {
        acc + head_weight(g, cycle[(k + n - 1) % n], cycle[k])
    }))
}

fn weights<S: Scalar>(g: &OperatorGraph<S>) -> Vec<Vec<S>> {
    let n = g.len();
    (0..n)
        .map(|i| (0..n).map(|j| head_weight(g, i, j)).collect())
        .collect()
}

/// Exhaustive search over node sequences of length `2..=n` (repetition
/// allowed). Sequences are canonical: the first node is the smallest and
/// no two cyclically consecutive nodes coincide, since cyclic sums are
/// rotation invariant and a repeated node contributes nothing. The first
/// violation in (length, lexicographic) order is returned.
pub fn check_n_cyclic<S: Scalar>(
    g: &OperatorGraph<S>,
    n: usize,
    tol: &Tolerance,
) -> Result<CycleReport<S>> {
    g.require_nonempty()?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "cycle length must be at least 2".into(),
        ));
    }
    if n > MAX_CYCLE_LENGTH {
        return Err(Error::CapExceeded(format!(
            "cycle length {n} exceeds {MAX_CYCLE_LENGTH}"
        )));
    }
    if g.len() > MAX_EXHAUSTIVE_NODES {
        return Err(Error::CapExceeded(format!(
            "{} nodes exceed {MAX_EXHAUSTIVE_NODES}",
            g.len()
        )));
    }
    let w = weights(g);
    let mut best: Option<(S, Vec<usize>)> = None;
    for len in 2..=n {
        let mut seq = Vec::with_capacity(len);
        for start in 0..g.len() {
            seq.clear();
            seq.push(start);
            if let Some(found) = extend(&w, &mut seq, len, S::zero(), tol, &mut best) {
                return Ok(found);
            }
        }
    }
    Ok(match best {
        Some((sum, cycle)) => CycleReport {
            verdict: true,
            cycle,
            sum,
        },
        None => CycleReport {
            verdict: true,
            cycle: Vec::new(),
            sum: S::zero(),
        },
    })
}

fn extend<S: Scalar>(
    w: &[Vec<S>],
    seq: &mut Vec<usize>,
    len: usize,
    partial: S,
    tol: &Tolerance,
    best: &mut Option<(S, Vec<usize>)>,
) -> Option<CycleReport<S>> {
    let last = *seq.last().expect("nonempty");
    let start = seq[0];
    if seq.len() == len {
        if last == start {
            return None;
        }
        let sum = partial + w[last][start].clone();
        if !sum.nonneg(tol) {
            return Some(CycleReport {
                verdict: false,
                cycle: seq.clone(),
                sum,
            });
        }
        match best {
            Some((b, _)) if *b <= sum => {}
            _ => *best = Some((sum, seq.clone())),
        }
        return None;
    }
    for next in start..w.len() {
        if next == last {
            continue;
        }
        seq.push(next);
        let found = extend(
            w,
            seq,
            len,
            partial.clone() + w[last][next].clone(),
            tol,
            best,
        );
        seq.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Full cyclic monotonicity via negative-cycle detection. With tail weights
/// `v(i -> j) = ⟨x_i*, x_j - x_i⟩` a violation is a directed cycle of
/// positive `v`-weight; Bellman–Ford on `-v` finds one, and reversing it
/// gives the head-weight cycle reported.
pub fn check_cyclic<S: Scalar>(g: &OperatorGraph<S>, tol: &Tolerance) -> Result<CycleReport<S>> {
    g.require_nonempty()?;
    let n = g.len();
    // cost(i -> j) = -v(i -> j) = ⟨x_i*, x_i - x_j⟩ = head weight of j -> i
    let head = weights(g);
    let cost = |i: usize, j: usize| head[j][i].clone();
    let margin = S::from_f64(tol.abs).unwrap_or_else(|_| S::zero());
    let mut dist = vec![S::zero(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last_updated = None;
    for _round in 0..n {
        last_updated = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let cand = dist[i].clone() + cost(i, j);
                let improved = if S::EXACT {
                    cand < dist[j]
                } else {
                    cand + margin.clone() < dist[j]
                };
                if improved {
                    dist[j] = dist[i].clone() + cost(i, j);
                    pred[j] = Some(i);
                    last_updated = Some(j);
                }
            }
        }
        if last_updated.is_none() {
            break;
        }
    }
    let Some(mut v) = last_updated else {
        return Ok(CycleReport {
            verdict: true,
            cycle: Vec::new(),
            sum: S::zero(),
        });
    };
    for _ in 0..n {
        v = pred[v].expect("updated nodes have predecessors");
    }
    // walking predecessors traverses the cost cycle backwards, which is the
    // head-weight cycle forwards
    let mut cycle = vec![v];
    let mut u = pred[v].expect("on a cycle");
    while u != v {
        cycle.push(u);
        u = pred[u].expect("on a cycle");
    }
    let m = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &c)| c)
        .map(|(k, _)| k)
        .unwrap_or(0);
    cycle.rotate_left(m);
    let sum = cyclic_sum(g, &cycle)?;
    if sum.nonneg(tol) {
        // only roundoff-sized cycles remain; not a certified violation
        return Ok(CycleReport {
            verdict: true,
            cycle,
            sum,
        });
    }
    Ok(CycleReport {
        verdict: false,
        cycle,
        sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Covector, GraphPair, Point};
    use crate::monotonicity::check_monotone;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rot_graph() -> OperatorGraph<Rational> {
        let pts = [(1, 1), (0, 1), (1, 0)];
        OperatorGraph::from_pairs(
            pts.iter()
                .map(|&(a, b)| {
                    GraphPair::new(Point::from_i64s(&[a, b]), Covector::from_i64s(&[b, -a]))
                        .unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    fn half_square_graph() -> OperatorGraph<Rational> {
        OperatorGraph::from_pairs(
            [-1, 0, 1]
                .iter()
                .map(|&x| {
                    GraphPair::new(Point::from_i64s(&[x]), Covector::from_i64s(&[x])).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rotation_is_not_three_cyclic() {
        let tol = Tolerance::exact();
        let g = rot_graph();
        let r = check_n_cyclic(&g, 3, &tol).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.cycle, vec![0, 1, 2]);
        assert_eq!(r.sum, Rational::from_i64(-1));
        assert_eq!(cyclic_sum(&g, &r.cycle).unwrap(), r.sum);
        assert!(check_n_cyclic(&g, 2, &tol).unwrap().verdict);
        let full = check_cyclic(&g, &tol).unwrap();
        assert!(!full.verdict);
        assert_eq!(full.cycle.len(), 3);
        assert!(full.sum < Rational::from_i64(0));
        assert_eq!(cyclic_sum(&g, &full.cycle).unwrap(), full.sum);
    }

    #[test]
    fn gradient_samples_are_cyclic() {
        let tol = Tolerance::exact();
        let g = half_square_graph();
        for n in 2..=6 {
            assert!(check_n_cyclic(&g, n, &tol).unwrap().verdict);
        }
        assert!(check_cyclic(&g, &tol).unwrap().verdict);
        let single =
            OperatorGraph::from_pairs(vec![GraphPair::from_f64s(&[1.0], &[2.0]).unwrap()]).unwrap();
        assert!(
            check_cyclic(&single, &Tolerance::default())
                .unwrap()
                .verdict
        );
        assert!(
            check_n_cyclic(&single, 4, &Tolerance::default())
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn caps_are_enforced() {
        let g = half_square_graph();
        assert!(matches!(
            check_n_cyclic(&g, 7, &Tolerance::exact()),
            Err(Error::CapExceeded(_))
        ));
        assert!(check_n_cyclic(&g, 1, &Tolerance::exact()).is_err());
    }

    #[test]
    fn monotone_implies_two_cyclic_and_oracles_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tol = Tolerance::default();
        for _ in 0..300 {
            let n = rng.gen_range(1..=7);
            let d = rng.gen_range(1..=3);
            let pairs = (0..n)
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-4..=4) as f64).collect();
                    let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-4..=4) as f64).collect();
                    GraphPair::from_f64s(&x, &y).unwrap()
                })
                .collect();
            let g = OperatorGraph::from_pairs(pairs).unwrap();
            let mono = check_monotone(&g, &tol).unwrap().verdict;
            let two = check_n_cyclic(&g, 2, &tol).unwrap().verdict;
            assert_eq!(mono, two);
            let exhaustive = check_n_cyclic(&g, 5, &tol).unwrap();
            let full = check_cyclic(&g, &tol).unwrap();
            if !full.verdict {
                assert!((cyclic_sum(&g, &full.cycle).unwrap() - full.sum).abs() < 1e-12);
            }
            if !exhaustive.verdict {
                assert!(!full.verdict);
            }
        }
    }
}
