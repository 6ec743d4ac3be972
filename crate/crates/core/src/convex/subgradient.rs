use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conjugate::{conjugate_point, conjugate_witness};
use super::function::{dotf, slack, ConvexFunction};
use crate::error::{Error, Result};
use crate::grid::halton_point;
use crate::model::{Certificate, Covector, GraphPair, Point};
use crate::scalar::{Extended, Tolerance};

/// Radii of the local probe shells used when no conjugate is available.
const PROBE_RADII: [f64; 6] = [1e-6, 1e-3, 1e-1, 1.0, 10.0, 100.0];
const HALTON_DIRECTIONS: usize = 64;

/// `h(y) = f(y) - f(x) - ⟨x*, y - x⟩`; `None` off the domain.
fn gap_at(f: &ConvexFunction, fx: f64, x: &[f64], s: &[f64], y: &[f64]) -> Result<Option<f64>> {
    Ok(f.strict_value_or_inf(y)?
        .finite()
        .map(|fy| fy - fx - (dotf(s, y) - dotf(s, x))))
}

fn fail(x: &[f64], s: &[f64], y: &[f64], value: f64, probe: &str) -> Result<Certificate> {
    Ok(Certificate::fail(
        vec![GraphPair::from_f64s(x, s)?, GraphPair::from_f64s(y, s)?],
        value,
    )
    .with_probe(probe))
}

/// Local probe points around `x`: lattice directions `{-1, 0, 1}^d` (up to
/// `d = 6`) and Halton directions in the cube, at every radius, plus the
/// nodes of any grid carried by `f`.
fn probe_points(f: &ConvexFunction, x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if d <= 6 {
        for code in 0..3usize.pow(d as u32) {
            let mut c = code;
            let v: Vec<f64> = (0..d)
                .map(|_| {
                    let r = (c % 3) as f64 - 1.0;
                    c /= 3;
                    r
                })
                .collect();
            if v.iter().any(|e| *e != 0.0) {
                dirs.push(v);
            }
        }
    }
    for k in 0..HALTON_DIRECTIONS {
        dirs.push(
            halton_point(k as u64 + 1, d)
                .iter()
                .map(|h| 2.0 * h - 1.0)
                .collect(),
        );
    }
    let mut pts: Vec<Vec<f64>> = PROBE_RADII
        .iter()
        .flat_map(|r| {
            dirs.iter()
                .map(move |u| x.iter().zip(u).map(|(a, b)| a + r * b).collect())
        })
        .collect();
    for (g, _) in f.grids() {
        pts.extend(g.nodes());
    }
    pts
}

fn probe_label(f: &ConvexFunction) -> String {
    if matches!(f, ConvexFunction::GridFn { .. }) {
        "grid nodes".into()
    } else if f.grids().is_empty() {
        "local probes: lattice and Halton directions at radii 1e-6..100".into()
    } else {
        "grid nodes and local probes at radii 1e-6..100".into()
    }
}

/// Checks `f(y) >= f(x) + ⟨x*, y - x⟩ - eps` for all `y`. Closed forms use
/// the conjugate (`f(x) + f*(x*) - ⟨x*, x⟩ <= eps`, exact over all of `E`);
/// grid functions use their nodes; sums use local probes.
fn inequality_test(
    f: &ConvexFunction,
    x: &[f64],
    s: &[f64],
    eps: f64,
    tol: &Tolerance,
    witness: bool,
) -> Result<Certificate> {
    let fx = f.finite_value(x)?;
    let sx = dotf(s, x);
    if let Some(cp) = conjugate_point(f, s)? {
        return match cp.value {
            Extended::Finite(fs) => {
                let gap = fx + fs - sx;
                if gap <= eps + slack(tol, fx.abs() + fs.abs() + sx.abs()) {
                    Ok(Certificate::pass(gap.max(0.0)).with_probe("closed-form conjugate"))
                } else {
                    let y = cp.argmax.expect("finite conjugates come with a maximizer");
                    let h = gap_at(f, fx, x, s, &y)?.unwrap_or(-gap);
                    fail(x, s, &y, h, "closed-form conjugate")
                }
            }
            _ if !witness => Ok(Certificate {
                verdict: false,
                witnesses: Vec::new(),
                value: f64::NEG_INFINITY,
                probe: None,
            }),
            _ => {
                // f*(x*) = +inf: find y with h(y) <= -(eps + 1)
                let target = fx - sx + eps + 1.0;
                let Some(y) = conjugate_witness(f, s, target)? else {
                    return Err(Error::SearchExhausted(
                        "no witness for an infinite conjugate".into(),
                    ));
                };
                let h = gap_at(f, fx, x, s, &y)?.expect("witness lies in the domain");
                fail(x, s, &y, h, "closed-form conjugate (value +inf)")
            }
        };
    }
    let label = probe_label(f);
    let pts = probe_points(f, x);
    let gaps = pts
        .par_iter()
        .map(|y| Ok(gap_at(f, fx, x, s, y)?.map(|h| (h, y))))
        .collect::<Result<Vec<_>>>()?;
    let worst = gaps
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(f64, &Vec<f64>)>, (h, y)| match best {
            Some((b, _)) if b <= h => best,
            _ => Some((h, y)),
        });
    let scale = fx.abs() + sx.abs();
    match worst {
        Some((h, y)) if h < -(eps + slack(tol, scale)) => fail(x, s, y, h, &label),
        Some((h, _)) => Ok(Certificate::pass(h).with_probe(label)),
        None => Ok(Certificate::pass(0.0).with_probe(label)),
    }
}

/// Tests `x* ∈ ∂f(x)`. A failing certificate carries `(x, x*)` and `(y, x*)`
/// for a `y` violating the subgradient inequality, with `value = h(y) < 0`.
pub fn subgradient_test(
    f: &ConvexFunction,
    x: &Point,
    xstar: &Covector,
    tol: &Tolerance,
) -> Result<Certificate> {
    f.check_dim(x.dim())?;
    f.check_dim(xstar.dim())?;
    inequality_test(f, x.coords(), xstar.coords(), 0.0, tol, true)
}

/// Tests `x* ∈ ∂_ε f(x)`.
pub fn eps_subdifferential_test(
    f: &ConvexFunction,
    x: &Point,
    xstar: &Covector,
    eps: f64,
    tol: &Tolerance,
) -> Result<Certificate> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eps must be a nonnegative number, got {eps}"
        )));
    }
    if eps == 0.0 {
        return subgradient_test(f, x, xstar, tol);
    }
    f.check_dim(x.dim())?;
    f.check_dim(xstar.dim())?;
    inequality_test(f, x.coords(), xstar.coords(), eps, tol, true)
}

/// Membership only, without witnesses.
pub(crate) fn in_subdifferential(
    f: &ConvexFunction,
    x: &[f64],
    s: &[f64],
    tol: &Tolerance,
) -> Result<bool> {
    Ok(inequality_test(f, x, s, 0.0, tol, false)?.verdict)
}

/// Outcome of the sum-rule check at `(x, x*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub in_sum_subdiff: bool,
    pub decomposable: bool,
    pub parts: Option<(Covector, Covector)>,
    pub certificate: Certificate,
    /// How the split was searched.
    pub probe: String,
}

/// Split search settings: covectors `u` on the lattice `resolution * Z^d`
/// within sup-distance `radius` of the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSearch {
    pub resolution: f64,
    pub radius: Option<f64>,
}

impl Default for SplitSearch {
    fn default() -> Self {
        SplitSearch {
            resolution: 1e-3,
            radius: None,
        }
    }
}

/// Largest split lattice searched.
pub const MAX_SPLIT_CANDIDATES: usize = 1 << 25;

/// Tests `x* ∈ ∂(f + g)(x)` and searches for `x* = u* + v*` with
/// `u* ∈ ∂f(x)`, `v* ∈ ∂g(x)`. When one summand is differentiable at `x`
/// the split is forced; otherwise `u*` ranges over the probe lattice.
pub fn sum_rule_check(
    f: &ConvexFunction,
    g: &ConvexFunction,
    x: &Point,
    xstar: &Covector,
    search: SplitSearch,
    tol: &Tolerance,
) -> Result<SumRuleReport> {
    f.check_dim(x.dim())?;
    g.check_dim(x.dim())?;
    f.check_dim(xstar.dim())?;
    let xs = x.coords();
    let s = xstar.coords();
    for (name, h) in [("f", f), ("g", g)] {
        if !h.value(xs)?.is_finite() {
            return Err(Error::OutsideDomain(format!("x is not in dom({name})")));
        }
    }
    let sum = ConvexFunction::sum(vec![f.clone(), g.clone()])?;
    let certificate = subgradient_test(&sum, x, xstar, tol)?;
    let split = |u: Vec<f64>| -> Result<Option<(Covector, Covector)>> {
        let v: Vec<f64> = s.iter().zip(&u).map(|(a, b)| a - b).collect();
        Ok(
            (in_subdifferential(f, xs, &u, tol)? && in_subdifferential(g, xs, &v, tol)?).then(
                || {
                    (
                        Covector::from_f64s(&u).expect("finite"),
                        Covector::from_f64s(&v).expect("finite"),
                    )
                },
            ),
        )
    };
    let (parts, probe) = if let Some(u) = f.gradient(xs)? {
        (
            split(u)?,
            "forced split: f is differentiable at x".to_string(),
        )
    } else if let Some(w) = g.gradient(xs)? {
        let u: Vec<f64> = s.iter().zip(&w).map(|(a, b)| a - b).collect();
        (
            split(u)?,
            "forced split: g is differentiable at x".to_string(),
        )
    } else {
        lattice_split(f, g, xs, s, search, tol)?
    };
    Ok(SumRuleReport {
        in_sum_subdiff: certificate.verdict,
        decomposable: parts.is_some(),
        parts,
        certificate,
        probe,
    })
}

fn lattice_split(
    f: &ConvexFunction,
    g: &ConvexFunction,
    x: &[f64],
    s: &[f64],
    search: SplitSearch,
    tol: &Tolerance,
) -> Result<(Option<(Covector, Covector)>, String)> {
    let h = search.resolution;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {h}"
        )));
    }
    let r = search
        .radius
        .unwrap_or_else(|| 1.0 + s.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let half = (r / h).round() as i64;
    let per_axis = (2 * half + 1) as usize;
    let d = s.len();
    let total = (0..d)
        .try_fold(1usize, |acc, _| acc.checked_mul(per_axis))
        .filter(|n| *n <= MAX_SPLIT_CANDIDATES);
    let Some(total) = total else {
        return Err(Error::TooLarge(format!("{per_axis}^{d} split candidates")));
    };
    // test the summand whose membership is cheaper first
    let (first, second, swap) = if costly(f) && !costly(g) {
        (g, f, true)
    } else {
        (f, g, false)
    };
    let try_u = |a: Vec<f64>| -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        if !in_subdifferential(first, x, &a, tol)? {
            return Ok(None);
        }
        let b: Vec<f64> = s.iter().zip(&a).map(|(p, q)| p - q).collect();
        Ok(in_subdifferential(second, x, &b, tol)?.then_some((a, b)))
    };
    // shells of growing sup norm, so the smallest first-summand part wins
    let mut found = None;
    for m in 0..=half {
        found = shell(d, m)
            .into_par_iter()
            .map(|i| i.iter().map(|&v| v as f64 * h).collect())
            .map(&try_u)
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            })
            .transpose()?
            .flatten();
        if found.is_some() {
            break;
        }
    }
    let parts = found.map(|(a, b)| {
        let (u, v) = if swap { (b, a) } else { (a, b) };
        (
            Covector::from_f64s(&u).expect("finite"),
            Covector::from_f64s(&v).expect("finite"),
        )
    });
    Ok((
        parts,
        format!(
            "lattice of {total} covectors, spacing {h}, sup radius {}",
            half as f64 * h
        ),
    ))
}

/// Integer points of sup norm exactly `m` in `Z^d`: for each axis `j` and
/// sign, coordinate `j` is `±m`, earlier ones are strictly inside and later
/// ones are free.
fn shell(d: usize, m: i64) -> Vec<Vec<i64>> {
    if m == 0 {
        return vec![vec![0; d]];
    }
    let mut out = Vec::new();
    for j in 0..d {
        for sign in [-1, 1] {
            let mut pts = vec![Vec::with_capacity(d)];
            for axis in 0..d {
                let range: Vec<i64> = match axis.cmp(&j) {
                    std::cmp::Ordering::Less => (1 - m..m).collect(),
                    std::cmp::Ordering::Equal => vec![sign * m],
                    std::cmp::Ordering::Greater => (-m..=m).collect(),
                };
                pts = pts
                    .into_iter()
                    .flat_map(|p: Vec<i64>| {
                        range.iter().map(move |&v| {
                            let mut q = p.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            out.extend(pts);
        }
    }
    out
}

fn costly(f: &ConvexFunction) -> bool {
    match f {
        ConvexFunction::Indicator { set } => {
            matches!(set, crate::region::ConvexRegion::Halfspaces { .. })
        }
        ConvexFunction::GridFn { .. } | ConvexFunction::SumFn { .. } => true,
        ConvexFunction::AffineShift { base, .. } => costly(base),
        _ => false,
    }
}
