use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derivative::directional_derivative;
use super::function::{dotf, slack, ConvexFunction};
use super::minty::golden;
use super::subgradient::subgradient_test;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{Certificate, Covector, Point};
use crate::polyhedral::{project_dykstra, Halfspace};
use crate::scalar::{Extended, Tolerance};

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Minimal-norm covector satisfying the subgradient inequality against the
/// grid nodes: exact interval arithmetic on the line, Dykstra projection of
/// the origin in higher dimensions. `None` when no such covector is found.
pub(crate) fn grid_selection(
    grid: &GridSpec,
    values: &[Extended],
    x: &[f64],
) -> Result<Option<Vec<f64>>> {
    let f = ConvexFunction::GridFn {
        grid: grid.clone(),
        values: values.to_vec(),
    };
    let Some(fx) = f.value(x)?.finite() else {
        return Ok(None);
    };
    if grid.dim() == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (k, v) in values.iter().enumerate() {
            let Some(v) = v.finite() else { continue };
            let y = grid.axis_node(0, k);
            if y < x[0] {
                lo = lo.max((v - fx) / (y - x[0]));
            } else if y > x[0] {
                hi = hi.min((v - fx) / (y - x[0]));
            }
        }
        if lo > hi + 1e-9 * (1.0 + lo.abs().min(hi.abs())) {
            return Ok(None);
        }
        return Ok(Some(vec![0.0f64.clamp(lo.min(hi), hi.max(lo))]));
    }
    let rows_for = |near: Option<usize>| -> Vec<Halfspace<f64>> {
        let centre = grid.multi_index(grid.nearest(x));
        (0..grid.len())
            .filter(|&k| match near {
                Some(r) => grid
                    .multi_index(k)
                    .iter()
                    .zip(&centre)
                    .all(|(a, b)| a.abs_diff(*b) <= r),
                None => true,
            })
            .filter_map(|k| {
                let v = values[k].finite()?;
                let y = grid.node(k);
                let n: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                (euclid(&n) > 0.0).then(|| Halfspace::new(n, v - fx))
            })
            .collect()
    };
    let holds = |s: &[f64]| {
        (0..grid.len()).all(|k| match values[k].finite() {
            Some(v) => {
                let y = grid.node(k);
                let lhs = v - fx - (dotf(s, &y) - dotf(s, x));
                lhs >= -slack(&Tolerance::default(), v.abs() + fx.abs())
            }
            None => true,
        })
    };
    for near in [Some(2), None] {
        let rows = rows_for(near);
        if near.is_none() && rows.len() > 20_000 {
            break;
        }
        match project_dykstra(&rows, &vec![0.0; x.len()], 1e-13, 100_000) {
            Ok(s) if holds(&s) => return Ok(Some(s)),
            Ok(_) | Err(Error::NoConvergence { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn node_values(f: &ConvexFunction, grid: &GridSpec) -> Result<(Vec<Vec<f64>>, Vec<Option<f64>>)> {
    f.check_dim(grid.dim())?;
    let nodes: Vec<Vec<f64>> = grid.nodes().collect();
    let vals = nodes
        .par_iter()
        .map(|y| Ok(f.value_or_inf(y)?.finite()))
        .collect::<Result<Vec<_>>>()?;
    Ok((nodes, vals))
}

fn argmin(vals: &[Option<f64>]) -> Option<(usize, f64)> {
    vals.iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .fold(None, |best, (k, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((k, v)),
        })
}

/// Output of [`br_search`]: `x* ∈ ∂f(x)` with `|x - x0| < β`, `|x*| < α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrResult {
    pub x: Point,
    pub xstar: Covector,
    /// `ε` with `f(x0) < inf f + ε < inf f + αβ`.
    pub eps: f64,
    /// `λ = sqrt((ε/β) α)`, strictly between `ε/β` and `α`.
    pub lambda: f64,
    pub distance: f64,
    pub dual_norm: f64,
    pub steps: usize,
    pub certificate: Certificate,
}

/// Ekeland-style search on `grid` for a subgradient pair near `x0`
/// (Euclidean norms throughout).
pub fn br_search(
    f: &ConvexFunction,
    grid: &GridSpec,
    x0: &Point,
    alpha: f64,
    beta: f64,
    tol: &Tolerance,
) -> Result<BrResult> {
    f.check_dim(x0.dim())?;
    if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(
            "alpha and beta must be positive".into(),
        ));
    }
    let (nodes, vals) = node_values(f, grid)?;
    let Some((_, inf)) = argmin(&vals) else {
        return Err(Error::OutsideDomain(
            "no grid node lies in the domain".into(),
        ));
    };
    let fx0 = f.finite_value(x0.coords())?;
    let gap = (fx0 - inf).max(0.0);
    if gap >= alpha * beta {
        return Err(Error::Precondition(format!(
            "f(x0) - inf f = {gap} is not below alpha * beta = {}",
            alpha * beta
        )));
    }
    let eps = if gap > 0.0 {
        (gap * alpha * beta).sqrt()
    } else {
        0.5 * alpha * beta
    };
    let lambda = (eps / beta * alpha).sqrt();
    let mut cur = x0.coords().to_vec();
    let mut fcur = fx0;
    let mut steps = 0;
    loop {
        let next = nodes
            .par_iter()
            .zip(vals.par_iter())
            .enumerate()
            .filter_map(|(k, (y, v))| {
                let v = (*v)?;
                (v + lambda * dist(y, &cur) < fcur).then_some((k, v))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match next {
            Some((k, v)) => {
                cur = nodes[k].clone();
                fcur = v;
                steps += 1;
            }
            None => break,
        }
        if steps > nodes.len() {
            return Err(Error::SearchExhausted("descent did not terminate".into()));
        }
    }
    let best = || format!("best candidate x = {cur:?} with f = {fcur}");
    // the grid point, then the minimizer of f + λ|· - x̄| between its neighbours
    let polished = polish(f, grid, &cur, lambda);
    let mut last = None;
    for p in [cur.clone(), polished] {
        let x = Point::from_f64s(&p)?;
        let pull: Vec<f64> = p.iter().zip(&cur).map(|(a, b)| a - b).collect();
        let extra = match euclid(&pull) {
            n if n > 0.0 => vec![pull.iter().map(|v| -lambda * v / n).collect()],
            _ => Vec::new(),
        };
        let Some((s, certificate)) = small_subgradient(f, &x, extra, alpha, tol)? else {
            continue;
        };
        let distance = dist(&p, x0.coords());
        let dual_norm = euclid(&s);
        if distance < beta && dual_norm < alpha {
            return Ok(BrResult {
                x,
                xstar: Covector::from_f64s(&s)?,
                eps,
                lambda,
                distance,
                dual_norm,
                steps,
                certificate,
            });
        }
        last = Some(format!(
            "x* = {s:?}, |x - x0| = {distance}, |x*| = {dual_norm}"
        ));
    }
    Err(Error::SearchExhausted(match last {
        Some(m) => format!("{}: {m}", best()),
        None => format!("no subgradient found; {}", best()),
    }))
}

/// Coordinate golden-section minimization of `f(y) + λ|y - c|` over the
/// grid cells around `c`.
fn polish(f: &ConvexFunction, grid: &GridSpec, c: &[f64], lambda: f64) -> Vec<f64> {
    let d = c.len();
    let phi_at = |y: &[f64]| match f.value_or_inf(y) {
        Ok(v) => v.to_f64() + lambda * dist(y, c),
        Err(_) => f64::INFINITY,
    };
    let mut y = c.to_vec();
    for _sweep in 0..if d == 1 { 1 } else { 40 } {
        for i in 0..d {
            let h = grid.spacing(i);
            let a = (c[i] - h).max(grid.lo()[i]);
            let b = (c[i] + h).min(grid.hi()[i]);
            let base = y.clone();
            let phi = |t: f64| {
                let mut z = base.clone();
                z[i] = t;
                phi_at(&z)
            };
            let t = golden(phi, a, b);
            if phi(t) <= phi(y[i]) {
                y[i] = t;
            }
        }
    }
    y
}

/// A certified subgradient at `x` of smallest norm among the candidates:
/// `extra`, then in one dimension the element of `[-f'(x; -1), f'(x; 1)]`
/// nearest 0 (and dyadic roundings of it), then the function's own
/// selection. Stops early at the first one shorter than `short`.
fn small_subgradient(
    f: &ConvexFunction,
    x: &Point,
    extra: Vec<Vec<f64>>,
    short: f64,
    tol: &Tolerance,
) -> Result<Option<(Vec<f64>, Certificate)>> {
    let mut candidates = extra;
    if x.dim() == 1 {
        let right = directional_derivative(f, x, &Point::from_f64s(&[1.0])?)?.finite();
        let left = directional_derivative(f, x, &Point::from_f64s(&[-1.0])?)?.finite();
        if let (Some(hi), Some(neg_lo)) = (right, left) {
            let c = 0.0f64.max(-neg_lo).min(hi);
            candidates.push(vec![c]);
            for bits in [40, 32, 26, 20] {
                let m = (bits as f64).exp2();
                candidates.push(vec![(c * m).round() / m]);
            }
        }
    }
    candidates.extend(f.subgradient_selection(x.coords())?);
    let mut best: Option<(Vec<f64>, Certificate)> = None;
    for s in candidates {
        let cert = subgradient_test(f, x, &Covector::from_f64s(&s)?, tol)?;
        if cert.verdict && best.as_ref().is_none_or(|(b, _)| euclid(&s) < euclid(b)) {
            let done = euclid(&s) < short;
            best = Some((s, cert));
            if done {
                break;
            }
        }
    }
    Ok(best)
}

/// Output of [`descent_witness`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentWitness {
    pub z: Point,
    pub zstar: Covector,
    pub fz: f64,
    pub fx: f64,
    /// `⟨z*, x - z⟩ > 0`.
    pub product: f64,
    pub certificate: Certificate,
}

/// Finds `z` with `f(z) < f(x)` and `z* ∈ ∂f(z)` with `⟨z*, x - z⟩ > 0`,
/// walking from the grid minimizer `m` back toward `x` along
/// `z = x + 2^-k (m - x)`, `k = 0, 1, ...`.
pub fn descent_witness(
    f: &ConvexFunction,
    grid: &GridSpec,
    x: &Point,
    tol: &Tolerance,
) -> Result<DescentWitness> {
    f.check_dim(x.dim())?;
    let (nodes, vals) = node_values(f, grid)?;
    let fx = f.finite_value(x.coords())?;
    let Some((k, fm)) = argmin(&vals) else {
        return Err(Error::OutsideDomain(
            "no grid node lies in the domain".into(),
        ));
    };
    if fm >= fx - slack(tol, fx) {
        return Err(Error::Precondition(
            "x is already minimal on the probe grid".into(),
        ));
    }
    let m = &nodes[k];
    for j in 0..=60 {
        let s = 0.5f64.powi(j);
        let z: Vec<f64> = x
            .coords()
            .iter()
            .zip(m)
            .map(|(a, b)| a + s * (b - a))
            .collect();
        let Some(fz) = f.value_or_inf(&z)?.finite() else {
            continue;
        };
        if fz >= fx - slack(tol, fx) {
            continue;
        }
        let Some(zs) = f.subgradient_selection(&z)? else {
            continue;
        };
        let product = dotf(&zs, x.coords()) - dotf(&zs, &z);
        if product <= slack(tol, fx) {
            continue;
        }
        let zp = Point::from_f64s(&z)?;
        let zstar = Covector::from_f64s(&zs)?;
        let certificate = subgradient_test(f, &zp, &zstar, tol)?;
        if certificate.verdict {
            return Ok(DescentWitness {
                z: zp,
                zstar,
                fz,
                fx,
                product,
                certificate,
            });
        }
    }
    Err(Error::SearchExhausted(
        "no certified descent pair on the segment to the grid minimizer".into(),
    ))
}
