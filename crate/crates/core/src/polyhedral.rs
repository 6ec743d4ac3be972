//! Linear inequality systems `⟨a_i, x⟩ <= b_i`.
//!
//! Fourier–Motzkin elimination decides feasibility and solves small linear
//! programs exactly; an active-set enumeration computes Euclidean
//! projections onto small polyhedra; Dykstra's alternating projections
//! handle the rest in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::model::certificate::{scalar_json, scalar_vec_json};
use crate::model::vector::dot;
use crate::scalar::{Rational, Scalar, Tolerance};

/// Row cap for Fourier–Motzkin; beyond this the elimination is abandoned.
const FM_ROW_CAP: usize = 50_000;
/// Subset cap for the active-set projection.
const ACTIVE_SET_CAP: u64 = 400_000;

/// `⟨normal, x⟩ <= offset`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Halfspace<S: Scalar = f64> {
    #[serde(with = "scalar_vec_json")]
    pub normal: Vec<S>,
    #[serde(with = "scalar_json")]
    pub offset: S,
}

impl<S: Scalar> Halfspace<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Self {
        Halfspace { normal, offset }
    }

    pub fn slack(&self, x: &[S]) -> S {
        self.offset.clone() - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[S], tol: &Tolerance) -> bool {
        self.slack(x).nonneg(tol)
    }

    pub fn to_f64(&self) -> Halfspace<f64> {
        Halfspace {
            normal: self.normal.iter().map(|v| v.to_f64()).collect(),
            offset: self.offset.to_f64(),
        }
    }
}

impl Halfspace<f64> {
    pub fn to_scalar<T: Scalar>(&self) -> Result<Halfspace<T>> {
        Ok(Halfspace {
            normal: self
                .normal
                .iter()
                .map(|&v| T::from_f64(v))
                .collect::<Result<_>>()?,
            offset: T::from_f64(self.offset)?,
        })
    }
}

/// Outcome of maximizing a linear objective.
#[derive(Debug, Clone, PartialEq)]
pub enum LpValue<S> {
    Infeasible,
    Unbounded,
    Optimal { value: S, point: Vec<S> },
}

fn zero_row<S: Scalar>(r: &Halfspace<S>) -> bool {
    r.normal.iter().all(|c| c.is_zero())
}

fn normalize<S: Scalar>(mut r: Halfspace<S>) -> Halfspace<S> {
    let scale = if S::EXACT {
        r.normal.iter().find(|c| !c.is_zero()).map(|c| c.abs_val())
    } else {
        let m = r
            .normal
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max);
        (m > 0.0).then(|| S::from_f64(m).unwrap_or_else(|_| S::one()))
    };
    if let Some(s) = scale {
        r.normal = r.normal.iter().map(|c| c.clone() / s.clone()).collect();
        r.offset = r.offset.clone() / s;
    }
    r
}

/// Sorts rows by normal and keeps the tightest offset per normal.
fn dedupe<S: Scalar>(mut rows: Vec<Halfspace<S>>) -> Vec<Halfspace<S>> {
    rows.sort_by(|a, b| {
        a.normal
            .partial_cmp(&b.normal)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.offset
                    .partial_cmp(&b.offset)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    let mut out: Vec<Halfspace<S>> = Vec::with_capacity(rows.len());
    for r in rows {
        match out.last() {
            Some(last) if last.normal == r.normal => {}
            _ => out.push(r),
        }
    }
    out
}

/// Eliminates variable `var`, returning `None` when a constant row is violated.
fn eliminate<S: Scalar>(
    rows: &[Halfspace<S>],
    var: usize,
    tol: &Tolerance,
) -> Result<Option<Vec<Halfspace<S>>>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        let c = &r.normal[var];
        if c.is_zero() {
            out.push(r.clone());
        } else if *c > S::zero() {
            pos.push(r);
        } else {
            neg.push(r);
        }
    }
    if out.len() + pos.len() * neg.len() > FM_ROW_CAP {
        return Err(Error::TooLarge(format!(
            "Fourier–Motzkin step would create {} rows",
            out.len() + pos.len() * neg.len()
        )));
    }
    for p in &pos {
        for n in &neg {
            let cp = p.normal[var].clone();
            let cn = -n.normal[var].clone();
            let normal: Vec<S> = p
                .normal
                .iter()
                .zip(&n.normal)
                .enumerate()
                .map(|(j, (a, b))| {
                    if j == var {
                        S::zero()
                    } else {
                        a.clone() * cn.clone() + b.clone() * cp.clone()
                    }
                })
                .collect();
            let offset = p.offset.clone() * cn.clone() + n.offset.clone() * cp.clone();
            out.push(normalize(Halfspace { normal, offset }));
        }
    }
    let mut kept = Vec::with_capacity(out.len());
    for r in out {
        if zero_row(&r) {
            if !r.offset.nonneg(tol) {
                return Ok(None);
            }
        } else {
            kept.push(r);
        }
    }
    Ok(Some(dedupe(kept)))
}

/// Runs the elimination of variables `nvars-1, ..., stop` and keeps every
/// intermediate system for back-substitution. `None` means infeasible.
fn eliminate_down_to<S: Scalar>(
    rows: &[Halfspace<S>],
    nvars: usize,
    stop: usize,
    tol: &Tolerance,
) -> Result<Option<Vec<Vec<Halfspace<S>>>>> {
    let mut initial = Vec::new();
    for r in rows {
        if r.normal.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: r.normal.len(),
            });
        }
        let r = normalize(r.clone());
        if zero_row(&r) {
            if !r.offset.nonneg(tol) {
                return Ok(None);
            }
        } else {
            initial.push(r);
        }
    }
    let mut systems = vec![dedupe(initial)];
    for var in (stop..nvars).rev() {
        match eliminate(systems.last().expect("nonempty"), var, tol)? {
            Some(next) => systems.push(next),
            None => return Ok(None),
        }
    }
    Ok(Some(systems))
}

/// Bounds `lo <= x_var <= hi` implied by `rows` once `x[..var]` is fixed.
fn bounds_for<S: Scalar>(rows: &[Halfspace<S>], var: usize, x: &[S]) -> (Option<S>, Option<S>) {
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    for r in rows {
        let c = &r.normal[var];
        if c.is_zero() {
            continue;
        }
        let rest = r.normal[..var]
            .iter()
            .zip(&x[..var])
            .fold(S::zero(), |acc, (a, v)| acc + a.clone() * v.clone());
        let bound = (r.offset.clone() - rest) / c.clone();
        if *c > S::zero() {
            hi = Some(match hi {
                Some(h) => S::min_of(h, bound),
                None => bound,
            });
        } else {
            lo = Some(match lo {
                Some(l) => S::max_of(l, bound),
                None => bound,
            });
        }
    }
    (lo, hi)
}

fn pick<S: Scalar>(lo: Option<S>, hi: Option<S>) -> S {
    match (lo, hi) {
        (Some(l), Some(h)) => (l + h) / S::from_i64(2),
        (Some(l), None) => S::max_of(l, S::zero()),
        (None, Some(h)) => S::min_of(h, S::zero()),
        (None, None) => S::zero(),
    }
}

/// Back-substitutes through the stored systems; `systems[k]` has the last
/// `k` variables eliminated. `fixed` pins leading variables.
fn back_substitute<S: Scalar>(systems: &[Vec<Halfspace<S>>], nvars: usize, fixed: &[S]) -> Vec<S> {
    let mut x = vec![S::zero(); nvars];
    x[..fixed.len()].clone_from_slice(fixed);
    for var in fixed.len()..nvars {
        let rows = &systems[nvars - 1 - var];
        let (lo, hi) = bounds_for(rows, var, &x);
        x[var] = pick(lo, hi);
    }
    x
}

/// A point satisfying every row, or `None` when the system is infeasible.
pub fn feasible_point<S: Scalar>(
    rows: &[Halfspace<S>],
    dim: usize,
    tol: &Tolerance,
) -> Result<Option<Vec<S>>> {
    match eliminate_down_to(rows, dim, 0, tol)? {
        None => Ok(None),
        Some(systems) => Ok(Some(back_substitute(&systems, dim, &[]))),
    }
}

/// Maximizes `⟨objective, x⟩` subject to `rows`.
pub fn maximize<S: Scalar>(
    rows: &[Halfspace<S>],
    objective: &[S],
    tol: &Tolerance,
) -> Result<LpValue<S>> {
    let dim = objective.len();
    // variable 0 is the objective value t, with t - <c, x> <= 0
    let mut lifted: Vec<Halfspace<S>> = rows
        .iter()
        .map(|r| {
            let mut normal = Vec::with_capacity(dim + 1);
            normal.push(S::zero());
            normal.extend(r.normal.iter().cloned());
            Halfspace {
                normal,
                offset: r.offset.clone(),
            }
        })
        .collect();
    let mut obj_row = vec![S::one()];
    obj_row.extend(objective.iter().map(|c| -c.clone()));
    lifted.push(Halfspace {
        normal: obj_row,
        offset: S::zero(),
    });
    let systems = match eliminate_down_to(&lifted, dim + 1, 1, tol)? {
        None => return Ok(LpValue::Infeasible),
        Some(s) => s,
    };
    let last = systems.last().expect("nonempty");
    let (lo, hi) = bounds_for(last, 0, &[]);
    let Some(value) = hi else {
        // still need to rule out infeasibility of the x-part
        return Ok(match feasible_point(rows, dim, tol)? {
            Some(_) => LpValue::Unbounded,
            None => LpValue::Infeasible,
        });
    };
    if let Some(l) = lo {
        if !(value.clone() - l).nonneg(tol) {
            return Ok(LpValue::Infeasible);
        }
    }
    let full = back_substitute(&systems, dim + 1, std::slice::from_ref(&value));
    Ok(LpValue::Optimal {
        value,
        point: full[1..].to_vec(),
    })
}

/// A feasible point with `⟨objective, x⟩ >= target`, if one exists.
pub fn point_reaching<S: Scalar>(
    rows: &[Halfspace<S>],
    objective: &[S],
    target: &S,
    tol: &Tolerance,
) -> Result<Option<Vec<S>>> {
    let mut all = rows.to_vec();
    all.push(Halfspace {
        normal: objective.iter().map(|c| -c.clone()).collect(),
        offset: -target.clone(),
    });
    feasible_point(&all, objective.len(), tol)
}

fn exact_rows<S: Scalar>(rows: &[Halfspace<S>]) -> Result<Vec<Halfspace<Rational>>> {
    rows.iter().map(|r| r.to_f64().to_scalar()).collect()
}

fn exact_vec<S: Scalar>(v: &[S]) -> Result<Vec<Rational>> {
    v.iter().map(|c| Rational::from_f64(c.to_f64())).collect()
}

fn back_from_exact<S: Scalar>(v: &[Rational]) -> Result<Vec<S>> {
    v.iter().map(|c| S::from_f64(c.to_f64())).collect()
}

/// [`maximize`] with float data decided in exact arithmetic (floats are
/// dyadic rationals, so the conversion is lossless).
pub fn maximize_exact<S: Scalar>(rows: &[Halfspace<S>], objective: &[S]) -> Result<LpValue<S>> {
    if S::EXACT {
        return maximize(rows, objective, &Tolerance::exact());
    }
    Ok(
        match maximize(
            &exact_rows(rows)?,
            &exact_vec(objective)?,
            &Tolerance::exact(),
        )? {
            LpValue::Optimal { value, point } => LpValue::Optimal {
                value: S::from_f64(value.to_f64())?,
                point: back_from_exact(&point)?,
            },
            LpValue::Unbounded => LpValue::Unbounded,
            LpValue::Infeasible => LpValue::Infeasible,
        },
    )
}

/// [`feasible_point`] decided in exact arithmetic.
pub fn feasible_point_exact<S: Scalar>(
    rows: &[Halfspace<S>],
    dim: usize,
) -> Result<Option<Vec<S>>> {
    if S::EXACT {
        return feasible_point(rows, dim, &Tolerance::exact());
    }
    match feasible_point(&exact_rows(rows)?, dim, &Tolerance::exact())? {
        Some(p) => Ok(Some(back_from_exact(&p)?)),
        None => Ok(None),
    }
}

/// [`point_reaching`] decided in exact arithmetic.
pub fn point_reaching_exact<S: Scalar>(
    rows: &[Halfspace<S>],
    objective: &[S],
    target: &S,
) -> Result<Option<Vec<S>>> {
    let mut all = rows.to_vec();
    all.push(Halfspace {
        normal: objective.iter().map(|c| -c.clone()).collect(),
        offset: -target.clone(),
    });
    feasible_point_exact(&all, objective.len())
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul((n - i) as u64) / (i as u64 + 1)
    })
}

/// Calls `f` on every strictly increasing index tuple of length `k` in `0..m`,
/// in lexicographic order; stops early when `f` returns `true`.
fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Euclidean projection of `point` onto `{x : rows}` by enumerating active
/// sets of size at most `dim`. Exact in the rational backend. Returns `None`
/// when the polyhedron is empty.
pub fn project_active_set<S: Scalar>(
    rows: &[Halfspace<S>],
    point: &[S],
    tol: &Tolerance,
) -> Result<Option<Vec<S>>> {
    let dim = point.len();
    let m = rows.len();
    let total: u64 = (0..=dim.min(m)).map(|k| binomial(m, k)).sum();
    if total > ACTIVE_SET_CAP {
        return Err(Error::TooLarge(format!("{total} active sets to enumerate")));
    }
    if rows.iter().all(|r| r.contains(point, tol)) {
        return Ok(Some(point.to_vec()));
    }
    let mut best: Option<(S, Vec<S>)> = None;
    for k in 1..=dim.min(m) {
        let mut done = false;
        for_each_subset(m, k, |subset| {
            let gram: Vec<Vec<S>> = subset
                .iter()
                .map(|&i| {
                    subset
                        .iter()
                        .map(|&j| dot(&rows[i].normal, &rows[j].normal))
                        .collect()
                })
                .collect();
            let rhs: Vec<S> = subset
                .iter()
                .map(|&i| dot(&rows[i].normal, point) - rows[i].offset.clone())
                .collect();
            let Some(lambda) = solve(&gram, &rhs) else {
                return false;
            };
            if !lambda.iter().all(|l| l.nonneg(tol)) {
                return false;
            }
            let mut x = point.to_vec();
            for (l, &i) in lambda.iter().zip(subset) {
                for (xj, aj) in x.iter_mut().zip(&rows[i].normal) {
                    *xj = xj.clone() - l.clone() * aj.clone();
                }
            }
            let scale = S::one()
                + x.iter()
                    .fold(S::zero(), |acc, v| S::max_of(acc, v.abs_val()));
            let feasible = rows.iter().all(|r| {
                let s = r.slack(&x);
                if S::EXACT {
                    s.nonneg(tol)
                } else {
                    s.to_f64() >= -(tol.abs.max(1e-12) * scale.to_f64())
                }
            });
            if !feasible {
                return false;
            }
            let d = x.iter().zip(point).fold(S::zero(), |acc, (a, b)| {
                acc + (a.clone() - b.clone()) * (a.clone() - b.clone())
            });
            // KKT candidates are unique in exact arithmetic
            if S::EXACT {
                best = Some((d, x));
                done = true;
                return true;
            }
            match &best {
                Some((bd, _)) if *bd <= d => {}
                _ => best = Some((d, x)),
            }
            false
        });
        if done {
            break;
        }
    }
    Ok(best.map(|(_, x)| x))
}

/// Vertices of a bounded polyhedron (deduplicated, lexicographic order).
pub fn vertices<S: Scalar>(
    rows: &[Halfspace<S>],
    dim: usize,
    tol: &Tolerance,
) -> Result<Vec<Vec<S>>> {
    let m = rows.len();
    if binomial(m, dim) > ACTIVE_SET_CAP {
        return Err(Error::TooLarge(format!(
            "{} candidate vertices",
            binomial(m, dim)
        )));
    }
    let mut out: Vec<Vec<S>> = Vec::new();
    for_each_subset(m, dim, |subset| {
        let a: Vec<Vec<S>> = subset.iter().map(|&i| rows[i].normal.clone()).collect();
        let b: Vec<S> = subset.iter().map(|&i| rows[i].offset.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if rows.iter().all(|r| r.contains(&x, tol))
                && !out
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(p, q)| p.same(q, tol)))
            {
                out.push(x);
            }
        }
        false
    });
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Projection onto a single halfspace.
pub fn project_halfspace(h: &Halfspace<f64>, x: &[f64]) -> Vec<f64> {
    let excess = dot(&h.normal, x) - h.offset;
    if excess <= 0.0 {
        return x.to_vec();
    }
    let nn = dot(&h.normal, &h.normal);
    if nn == 0.0 {
        return x.to_vec();
    }
    x.iter()
        .zip(&h.normal)
        .map(|(xi, ai)| xi - excess / nn * ai)
        .collect()
}

/// Dykstra's cyclic projections onto an intersection of halfspaces.
pub fn project_dykstra(
    rows: &[Halfspace<f64>],
    point: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>> {
    let mut x = point.to_vec();
    let mut incr = vec![vec![0.0; point.len()]; rows.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        let prev = x.clone();
        for (h, p) in rows.iter().zip(incr.iter_mut()) {
            let y: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
            let z = project_halfspace(h, &y);
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
        residual = step.max(violation);
        if residual <= tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { residual })
}
