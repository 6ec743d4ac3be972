use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::halton_point;
use crate::model::{Covector, Norm, OperatorGraph, Point};
use crate::scalar::Extended;

/// Empirical `c(r) = inf{⟨x*, x⟩ / |x| : (x, x*) sampled, |x| >= r}`.
/// Radii with no sample beyond them get `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityProfile {
    pub radii: Vec<f64>,
    pub c_values: Vec<Extended>,
    pub thresholds: Vec<f64>,
    /// `c` is nondecreasing over the finite values and ends above every
    /// threshold.
    pub coercive: bool,
}

/// Builds the profile; `thresholds` defaults to `[sqrt(last radius)]`.
pub fn coercivity_profile(
    g: &OperatorGraph,
    norm: &Norm,
    radii: &[f64],
    thresholds: Option<&[f64]>,
) -> Result<CoercivityProfile> {
    norm.validate()?;
    if radii.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one radius is needed".into(),
        ));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let ratios: Vec<(f64, f64)> = g
        .pairs()
        .iter()
        .map(|p| {
            let len = crate::model::norm_eval(norm, &p.x)?;
            let prod: f64 = p
                .xstar
                .coords()
                .iter()
                .zip(p.x.coords())
                .map(|(a, b)| a * b)
                .sum();
            Ok((len, if len > 0.0 { prod / len } else { 0.0 }))
        })
        .collect::<Result<_>>()?;
    if !ratios.iter().any(|(len, _)| *len >= radii[0]) {
        return Err(Error::InvalidArgument(format!(
            "no sampled point has norm >= {}",
            radii[0]
        )));
    }
    let c_values: Vec<Extended> = radii
        .iter()
        .map(|&r| {
            ratios
                .iter()
                .filter(|(len, _)| *len >= r)
                .map(|(_, q)| *q)
                .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |m| m.min(q))))
                .map_or(Extended::PosInf, Extended::Finite)
        })
        .collect();
    let last = *radii.last().expect("nonempty");
    let thresholds = thresholds
        .map(|t| t.to_vec())
        .unwrap_or_else(|| vec![last.sqrt()]);
    let finite: Vec<f64> = c_values.iter().filter_map(|c| c.finite()).collect();
    let nondecreasing = finite.windows(2).all(|w| w[1] >= w[0]);
    let top = thresholds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coercive = nondecreasing && finite.last().is_some_and(|&c| c > top);
    Ok(CoercivityProfile {
        radii: radii.to_vec(),
        c_values,
        thresholds,
        coercive,
    })
}

/// For each radius, the largest dual norm of `op` over the probe points
/// `x ± r e_i` and `samples` Halton points of the ball `x + r B`.
pub fn local_bound_probe(
    op: &dyn Fn(&Point) -> Result<Vec<Covector>>,
    x: &Point,
    norm: &Norm,
    radii: &[f64],
    samples: usize,
) -> Result<Vec<f64>> {
    norm.validate()?;
    if radii.is_empty()
        || radii.iter().any(|r| !(r.is_finite() && *r > 0.0))
        || radii.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let d = x.dim();
    let dual = norm.dual();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut offsets: Vec<Vec<f64>> = Vec::with_capacity(2 * d + samples);
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = s;
                let len = norm.eval_slice(&e);
                offsets.push(e.iter().map(|v| v * r / len).collect());
            }
        }
        for k in 0..samples {
            let u: Vec<f64> = halton_point(k as u64 + 1, d)
                .iter()
                .map(|h| 2.0 * h - 1.0)
                .collect();
            let len = norm.eval_slice(&u);
            let scale = if len > 1.0 { r / len } else { r };
            offsets.push(u.iter().map(|v| v * scale).collect());
        }
        let mut best = 0.0f64;
        for off in offsets {
            let p = Point::from_f64s(
                &x.coords()
                    .iter()
                    .zip(&off)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<_>>(),
            )?;
            for c in op(&p)? {
                best = best.max(dual.eval_slice(c.coords()));
            }
        }
        out.push(best);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphPair;

    fn radial_graph(f: impl Fn(f64) -> f64) -> OperatorGraph {
        let pairs = (-200..=200)
            .map(|k| {
                let t = k as f64 / 2.0;
                GraphPair::from_f64s(&[t], &[f(t)]).unwrap()
            })
            .collect();
        OperatorGraph::from_pairs(pairs).unwrap()
    }

    #[test]
    fn identity_profile_is_the_radius() {
        let radii = [1.0, 5.0, 20.0, 80.0];
        let p = coercivity_profile(&radial_graph(|t| t), &Norm::Euclidean, &radii, None).unwrap();
        for (r, c) in radii.iter().zip(&p.c_values) {
            assert!((c.finite().unwrap() - r).abs() < 1e-12);
        }
        assert!(p.coercive);
    }

    #[test]
    fn rotation_profile_is_zero() {
        let pairs = (0..40)
            .map(|k| {
                let a = (k as f64 * 0.7).sin() * k as f64;
                let b = (k as f64 * 1.3).cos() * k as f64;
                GraphPair::from_f64s(&[a, b], &[b, -a]).unwrap()
            })
            .collect();
        let g = OperatorGraph::from_pairs(pairs).unwrap();
        let p = coercivity_profile(&g, &Norm::Euclidean, &[1.0, 10.0, 20.0], None).unwrap();
        assert!(p.c_values.iter().all(|c| c.finite().unwrap().abs() < 1e-12));
        assert!(!p.coercive);
    }

    #[test]
    fn arctan_is_not_coercive() {
        let p = coercivity_profile(
            &radial_graph(f64::atan),
            &Norm::Euclidean,
            &[1.0, 10.0, 50.0, 100.0],
            None,
        )
        .unwrap();
        let last = p.c_values.last().unwrap().finite().unwrap();
        assert!(last < std::f64::consts::FRAC_PI_2);
        assert!(!p.coercive);
    }

    #[test]
    fn profile_errors() {
        assert!(
            coercivity_profile(&radial_graph(|t| t), &Norm::Euclidean, &[1000.0], None).is_err()
        );
        assert!(
            coercivity_profile(&radial_graph(|t| t), &Norm::Euclidean, &[2.0, 1.0], None).is_err()
        );
        let p = coercivity_profile(&radial_graph(|t| t), &Norm::Euclidean, &[50.0, 500.0], None)
            .unwrap();
        assert_eq!(p.c_values[1], Extended::PosInf);
    }

    #[test]
    fn local_bounds() {
        let x = Point::from_f64s(&[0.0, 0.0]).unwrap();
        let id = |p: &Point| Ok(vec![p.to_covector()]);
        let v = local_bound_probe(&id, &x, &Norm::Euclidean, &[1.0, 0.5], 64).unwrap();
        assert!(v[0] <= 1.0 + 1e-12 && v[1] <= 0.5 + 1e-12);
        assert!((v[0] - 1.0).abs() < 1e-12);
        let bounded = |p: &Point| {
            let c: Vec<f64> = p.coords().iter().map(|v| v.tanh() / 2.0).collect();
            Ok(vec![Covector::from_f64s(&c)?])
        };
        assert!(local_bound_probe(&bounded, &x, &Norm::Euclidean, &[10.0], 100).unwrap()[0] <= 1.0);
        let n = 12;
        let diag = |p: &Point| {
            let c: Vec<f64> = p
                .coords()
                .iter()
                .enumerate()
                .map(|(i, v)| v * 2f64.powi(i as i32 + 1))
                .collect();
            Ok(vec![Covector::from_f64s(&c)?])
        };
        let x = Point::from_f64s(&vec![0.0; n]).unwrap();
        let delta = 0.25;
        let v = local_bound_probe(&diag, &x, &Norm::Euclidean, &[delta], 32).unwrap();
        assert!((v[0] - delta * 2f64.powi(n as i32)).abs() < 1e-9);
        assert!(local_bound_probe(&id, &x, &Norm::Euclidean, &[0.5, 1.0], 4).is_err());
    }
}
