use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::{dotf, ConvexFunction};
use super::subgradient::subgradient_test;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{Certificate, Covector, GraphPair, Point};
use crate::scalar::Tolerance;

/// A solution of `y* ∈ ∂f(x) + λx`, certified through `x* = y* - λx ∈ ∂f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxSolution {
    pub ystar: Covector,
    pub x: Point,
    pub xstar: Covector,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MintyReport {
    pub solutions: Vec<ProxSolution>,
    /// Fails on the first sample that could not be certified; the witness
    /// pair carries that `y*` and `value` the certification residual.
    pub certificate: Certificate,
}

const STEPS_1D: usize = 2000;
const STEPS_2D: usize = 200;

fn objective(f: &ConvexFunction, lambda: f64, ys: &[f64], x: &[f64]) -> f64 {
    match f.value_or_inf(x) {
        Ok(v) => v.to_f64() + 0.5 * lambda * dotf(x, x) - dotf(ys, x),
        Err(_) => f64::INFINITY,
    }
}

fn scan(f: &ConvexFunction, lambda: f64, ys: &[f64], g: &GridSpec) -> Option<(usize, f64)> {
    (0..g.len())
        .into_par_iter()
        .map(|k| (k, objective(f, lambda, ys, &g.node(k))))
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

pub(crate) fn golden(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    0.5 * (a + b)
}

/// Solves `min f(x) + (λ/2)|x|² - ⟨y*, x⟩` (Euclidean, dimension 1 or 2):
/// exhaustive scan over `grid` (or an automatic box that grows while the
/// minimizer sits on its boundary), coordinate golden-section refinement,
/// then certification of `y* - λx ∈ ∂f(x)`.
pub fn prox_solve(
    f: &ConvexFunction,
    lambda: f64,
    ystar: &Covector,
    grid: Option<&GridSpec>,
    tol: &Tolerance,
) -> Result<ProxSolution> {
    let d = f.dim();
    f.check_dim(ystar.dim())?;
    if d > 2 {
        return Err(Error::Unsupported(format!(
            "resolvent search in dimension {d}; only 1 and 2 are supported"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let ys = ystar.coords();
    let steps = if d == 1 { STEPS_1D } else { STEPS_2D };
    let dom = match f.native_grid() {
        Some(g) => Some((g.lo().to_vec(), g.hi().to_vec())),
        None => f.domain_box()?,
    };
    let (g, k) = match grid {
        Some(g) => {
            if g.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: g.dim(),
                });
            }
            let Some((k, _)) = scan(f, lambda, ys, g) else {
                return Err(Error::OutsideDomain(
                    "no grid node lies in the domain".into(),
                ));
            };
            (g.clone(), k)
        }
        None => {
            let mut r = 1.0 + 2.0 * ys.iter().fold(0.0f64, |m, v| m.max(v.abs())) / lambda;
            let mut found = None;
            for _ in 0..60 {
                let (mut lo, mut hi) = (vec![-r; d], vec![r; d]);
                if let Some((dl, dh)) = &dom {
                    lo.iter_mut().zip(dl).for_each(|(a, b)| *a = a.max(*b));
                    hi.iter_mut().zip(dh).for_each(|(a, b)| *a = a.min(*b));
                }
                if lo.iter().zip(&hi).any(|(a, b)| a > b) {
                    r *= 2.0;
                    continue;
                }
                let g = GridSpec::uniform(lo.clone(), hi.clone(), steps)?;
                let Some((k, _)) = scan(f, lambda, ys, &g) else {
                    r *= 2.0;
                    continue;
                };
                let node = g.node(k);
                let clipped = node
                    .iter()
                    .enumerate()
                    .any(|(i, v)| (*v <= lo[i] && lo[i] <= -r) || (*v >= hi[i] && hi[i] >= r));
                if !clipped {
                    found = Some((g, k));
                    break;
                }
                r *= 2.0;
            }
            found.ok_or_else(|| {
                Error::SearchExhausted("the minimizer escapes every search box".into())
            })?
        }
    };
    let mut x = g.node(k);
    let h: Vec<f64> = (0..d).map(|i| g.spacing(i)).collect();
    for _sweep in 0..if d == 1 { 1 } else { 40 } {
        for i in 0..d {
            let a = (x[i] - h[i]).max(g.lo()[i]);
            let b = (x[i] + h[i]).min(g.hi()[i]);
            let base = x.clone();
            let phi = |t: f64| {
                let mut y = base.clone();
                y[i] = t;
                objective(f, lambda, ys, &y)
            };
            let t = golden(phi, a, b);
            if phi(t) <= phi(x[i]) {
                x[i] = t;
            }
        }
    }
    let dual_of =
        |c: &[f64]| -> Vec<f64> { ys.iter().zip(c).map(|(a, b)| a - lambda * b).collect() };
    let mut points = vec![x.clone()];
    for bits in [40, 32, 26, 20, 16] {
        let m = (bits as f64).exp2();
        points.push(x.iter().map(|v| (v * m).round() / m).collect());
    }
    if let Some(ng) = f.native_grid() {
        points.push(ng.node(ng.nearest(&x)));
    }
    points.push(g.node(k));
    let mut candidates: Vec<(Vec<f64>, Vec<f64>)> = points
        .into_iter()
        .map(|c| {
            let s = dual_of(&c);
            (c, s)
        })
        .collect();
    // snapped covectors land on faces of dual balls that rounding misses
    let s0 = dual_of(&x);
    for bits in [40, 32, 26, 20, 16] {
        let m = (bits as f64).exp2();
        let s: Vec<f64> = s0.iter().map(|v| (v * m).round() / m).collect();
        let c = ys.iter().zip(&s).map(|(a, b)| (a - b) / lambda).collect();
        candidates.push((c, s));
    }
    let mut residual = f64::INFINITY;
    for (c, s) in candidates {
        if !f.value_or_inf(&c)?.is_finite() {
            continue;
        }
        let xp = Point::from_f64s(&c)?;
        let xs = Covector::from_f64s(&s)?;
        let cert = subgradient_test(f, &xp, &xs, tol)?;
        if cert.verdict {
            return Ok(ProxSolution {
                ystar: ystar.clone(),
                x: xp,
                xstar: xs,
                certificate: cert,
            });
        }
        residual = residual.min(cert.value.abs());
    }
    Err(Error::NoConvergence { residual })
}

/// Probes `R(∂f + J) = E*` (Euclidean `J`) by solving `y* ∈ ∂f(x) + x`
/// for each sample.
pub fn maximality_probe(
    f: &ConvexFunction,
    dual_samples: &[Covector],
    grid: Option<&GridSpec>,
    tol: &Tolerance,
) -> Result<MintyReport> {
    if dual_samples.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one dual sample is needed".into(),
        ));
    }
    let mut solutions = Vec::with_capacity(dual_samples.len());
    let mut worst = 0.0f64;
    for ys in dual_samples {
        match prox_solve(f, 1.0, ys, grid, tol) {
            Ok(sol) => {
                worst = worst.max(sol.certificate.value.abs());
                solutions.push(sol);
            }
            Err(e @ (Error::NoConvergence { .. } | Error::SearchExhausted(_))) => {
                let residual = match e {
                    Error::NoConvergence { residual } => residual,
                    _ => f64::INFINITY,
                };
                let cert = Certificate {
                    verdict: false,
                    witnesses: vec![GraphPair::new(Point::zeros(ys.dim()), ys.clone())?],
                    value: residual,
                    probe: Some("grid minimization".into()),
                };
                return Ok(MintyReport {
                    solutions,
                    certificate: cert,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MintyReport {
        solutions,
        certificate: Certificate::pass(worst).with_probe("grid minimization"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Covector {
        Covector::from_f64s(&[v]).unwrap()
    }

    #[test]
    fn soft_threshold() {
        let tol = Tolerance::default();
        let abs = ConvexFunction::abs();
        let s = prox_solve(&abs, 1.0, &c(3.0), None, &tol).unwrap();
        assert_eq!(s.x.coords(), &[2.0]);
        let s = prox_solve(&abs, 1.0, &c(0.5), None, &tol).unwrap();
        assert!(s.x.coords()[0].abs() < 1e-9);
        // oracle: exhaustive minimization of |x| + ½(x - y)² on a fine grid
        for y in [-4.0, -1.5, -0.3, 0.0, 0.7, 2.25, 10.0] {
            let s = prox_solve(&abs, 1.0, &c(y), None, &tol).unwrap();
            let oracle = (0..=400_000).map(|k| -20.0 + k as f64 * 1e-4).fold(
                (f64::INFINITY, 0.0),
                |best, x| {
                    let v = x.abs() + 0.5 * (x - y) * (x - y);
                    if v < best.0 {
                        (v, x)
                    } else {
                        best
                    }
                },
            );
            assert!((s.x.coords()[0] - oracle.1).abs() < 1e-4, "y = {y}");
        }
    }

    #[test]
    fn half_square_halves() {
        let tol = Tolerance::default();
        let f = ConvexFunction::half_square(1).unwrap();
        for t in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            let s = prox_solve(&f, 1.0, &c(t), None, &tol).unwrap();
            assert!((s.x.coords()[0] - t / 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn probe_reports() {
        let tol = Tolerance::default();
        let samples: Vec<Covector> = [-2.0, -0.5, 0.0, 0.5, 3.0].iter().map(|v| c(*v)).collect();
        let r = maximality_probe(&ConvexFunction::abs(), &samples, None, &tol).unwrap();
        assert!(r.certificate.verdict);
        assert_eq!(r.solutions.len(), 5);
        let g = GridSpec::uniform(vec![-2.0], vec![2.0], 400).unwrap();
        let gf = ConvexFunction::tabulate(g.clone(), |x| x[0] * x[0]).unwrap();
        let r = maximality_probe(&gf, &samples, None, &tol).unwrap();
        assert!(r.certificate.verdict, "{:?}", r.certificate);
        let two = ConvexFunction::norm(crate::model::Norm::L1, 1.0, false, 2).unwrap();
        let r = maximality_probe(
            &two,
            &[Covector::from_f64s(&[2.0, -0.5]).unwrap()],
            None,
            &tol,
        )
        .unwrap();
        assert!(r.certificate.verdict);
        let x = r.solutions[0].x.coords();
        assert!((x[0] - 1.0).abs() < 1e-9 && x[1].abs() < 1e-9);
    }
}
