//! Duality maps `J(x) = {x* : ⟨x*, x⟩ = |x|^2, |x*|_* = |x|}`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::norm::Norm;
use crate::model::vector::{Covector, Point};

/// Single-valued image for smooth norms, a face for the sup and ℓ1 norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualityImage {
    Single {
        xstar: Covector,
    },
    /// Convex hull of the listed extreme covectors.
    Face {
        extreme: Vec<Covector>,
    },
}

impl DualityImage {
    /// The unique value, or the barycenter of the face.
    pub fn selection(&self) -> Covector {
        match self {
            DualityImage::Single { xstar } => xstar.clone(),
            DualityImage::Face { extreme } => {
                let k = extreme.len() as f64;
                let dim = extreme[0].dim();
                let c: Vec<f64> = (0..dim)
                    .map(|j| extreme.iter().map(|e| e.coords()[j]).sum::<f64>() / k)
                    .collect();
                Covector::from_f64s(&c).expect("finite barycenter")
            }
        }
    }

    pub fn extreme_points(&self) -> Vec<Covector> {
        match self {
            DualityImage::Single { xstar } => vec![xstar.clone()],
            DualityImage::Face { extreme } => extreme.clone(),
        }
    }
}

/// Gradient of `½|x|^2` for a smooth norm (`Euclidean`, `Lp`, `WeightedL2`).
pub(crate) fn smooth_duality_map(n: &Norm, x: &[f64]) -> Vec<f64> {
    match n {
        Norm::Euclidean => x.to_vec(),
        Norm::WeightedL2 { weights } => x.iter().zip(weights).map(|(v, w)| v * w).collect(),
        Norm::Lp { p } => {
            let len = n.eval_slice(x);
            if len == 0.0 {
                return vec![0.0; x.len()];
            }
            // |x|^{2-p} |x_i|^{p-1} = |x| (|x_i| / |x|)^{p-1}
            x.iter()
                .map(|v| len * (v.abs() / len).powf(p - 1.0) * v.signum())
                .collect()
        }
        Norm::Sup | Norm::L1 => unreachable!("non-smooth norms have set-valued duality maps"),
    }
}

pub fn duality_map(n: &Norm, x: &Point) -> Result<DualityImage> {
    crate::model::norm::norm_eval(n, x)?;
    let xs = x.coords();
    if x.is_zero() {
        return Ok(DualityImage::Single {
            xstar: Covector::zeros(x.dim()),
        });
    }
    Ok(match n {
        Norm::Sup => {
            let m = n.eval_slice(xs);
            let extreme = xs
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() == m)
                .map(|(i, v)| {
                    let mut c = vec![0.0; xs.len()];
                    c[i] = m * v.signum();
                    Covector::from_f64s(&c)
                })
                .collect::<Result<Vec<_>>>()?;
            if extreme.len() == 1 {
                DualityImage::Single {
                    xstar: extreme.into_iter().next().expect("one"),
                }
            } else {
                DualityImage::Face { extreme }
            }
        }
        Norm::L1 => {
            // x* = |x|_1 s with s_i = sign(x_i) off the zero set, any value in [-1, 1] on it
            let m = n.eval_slice(xs);
            let zeros: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] == 0.0).collect();
            let base: Vec<f64> = xs
                .iter()
                .map(|v| if *v == 0.0 { 0.0 } else { m * v.signum() })
                .collect();
            if zeros.is_empty() {
                DualityImage::Single {
                    xstar: Covector::from_f64s(&base)?,
                }
            } else {
                let mut extreme = Vec::new();
                for mask in 0..1usize << zeros.len().min(12) {
                    let mut c = base.clone();
                    for (b, &i) in zeros.iter().enumerate() {
                        c[i] = if mask >> b & 1 == 1 { m } else { -m };
                    }
                    extreme.push(Covector::from_f64s(&c)?);
                }
                DualityImage::Face { extreme }
            }
        }
        _ => DualityImage::Single {
            xstar: Covector::from_f64s(&smooth_duality_map(n, xs))?,
        },
    })
}
