use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::plain_json;
use crate::model::vector::{Covector, Point};
use crate::scalar::Scalar;

/// A norm on the primal space; its dual acts on covectors.
///
/// `L1` is included so that the dual of `Sup` (and the conjugate of a
/// sup-norm function) can be named directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Norm {
    Euclidean,
    Lp {
        #[serde(deserialize_with = "plain_json::deserialize")]
        p: f64,
    },
    Sup,
    L1,
    WeightedL2 {
        #[serde(deserialize_with = "plain_json::deserialize")]
        weights: Vec<f64>,
    },
}

impl Norm {
    pub fn lp(p: f64) -> Result<Self> {
        let n = Norm::Lp { p };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Norm::Lp { p } if !(p.is_finite() && *p > 1.0) => Err(Error::InvalidNorm(format!(
                "lp norm needs 1 < p < inf, got p = {p}"
            ))),
            Norm::WeightedL2 { weights }
                if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) =>
            {
                Err(Error::InvalidNorm(
                    "weights must be positive and finite".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if let Norm::WeightedL2 { weights } = self {
            if weights.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    found: dim,
                });
            }
        }
        Ok(())
    }

    /// The dual norm as a norm on covectors.
    pub fn dual(&self) -> Norm {
        match self {
            Norm::Euclidean => Norm::Euclidean,
            Norm::Lp { p } => Norm::Lp {
                p: conjugate_exponent(*p),
            },
            Norm::Sup => Norm::L1,
            Norm::L1 => Norm::Sup,
            Norm::WeightedL2 { weights } => Norm::WeightedL2 {
                weights: weights.iter().map(|w| 1.0 / w).collect(),
            },
        }
    }

    /// True when the duality map is single-valued (the norm is smooth off 0).
    pub fn is_smooth(&self) -> bool {
        !matches!(self, Norm::Sup | Norm::L1)
    }

    pub fn eval_slice(&self, v: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::Lp { p } => lp_norm(v, *p),
            Norm::Sup => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            Norm::L1 => v.iter().map(|c| c.abs()).sum(),
            Norm::WeightedL2 { weights } => weights
                .iter()
                .zip(v)
                .map(|(w, c)| w * c * c)
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Exact comparison `‖v‖ <= r` where the norm allows it
    /// (Euclidean and weighted via squares); `Lp` falls back to floats.
    pub fn le<S: Scalar>(&self, v: &[S], r: &S) -> bool {
        match self {
            Norm::Euclidean => sum_sq(v) <= r.clone() * r.clone(),
            Norm::WeightedL2 { weights } => {
                let total = weights.iter().zip(v).fold(S::zero(), |acc, (w, c)| {
                    acc + S::from_f64(*w).unwrap_or_else(|_| S::one()) * c.clone() * c.clone()
                });
                total <= r.clone() * r.clone()
            }
            Norm::Sup => v.iter().all(|c| c.abs_val() <= *r),
            Norm::L1 => v.iter().fold(S::zero(), |acc, c| acc + c.abs_val()) <= *r,
            Norm::Lp { p } => {
                lp_norm(&v.iter().map(|c| c.to_f64()).collect::<Vec<_>>(), *p) <= r.to_f64()
            }
        }
    }

    /// Strict version of [`Norm::le`].
    pub fn lt<S: Scalar>(&self, v: &[S], r: &S) -> bool {
        match self {
            Norm::Euclidean => sum_sq(v) < r.clone() * r.clone(),
            Norm::Sup => v.iter().all(|c| c.abs_val() < *r),
            Norm::L1 => v.iter().fold(S::zero(), |acc, c| acc + c.abs_val()) < *r,
            _ => {
                self.le(v, r)
                    && self.eval_slice(&v.iter().map(|c| c.to_f64()).collect::<Vec<_>>())
                        < r.to_f64()
            }
        }
    }
}

fn sum_sq<S: Scalar>(v: &[S]) -> S {
    v.iter()
        .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
}

pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    // scale by the max entry to avoid overflow in |x|^p
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v
        .iter()
        .map(|c| (c.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn norm_eval(n: &Norm, x: &Point) -> Result<f64> {
    n.check_dim(x.dim())?;
    Ok(n.eval_slice(x.coords()))
}

pub fn dual_norm_eval(n: &Norm, xstar: &Covector) -> Result<f64> {
    n.check_dim(xstar.dim())?;
    Ok(n.dual().eval_slice(xstar.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vector::pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[f64]) -> Point {
        Point::from_f64s(v).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_eval(&Norm::Euclidean, &pt(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(norm_eval(&Norm::Sup, &pt(&[1.0, -2.0])).unwrap(), 2.0);
        let l3 = norm_eval(&Norm::lp(3.0).unwrap(), &pt(&[1.0, 1.0])).unwrap();
        assert!((l3 - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_examples() {
        let c = |v: &[f64]| Covector::from_f64s(v).unwrap();
        assert_eq!(dual_norm_eval(&Norm::Sup, &c(&[1.0, -2.0])).unwrap(), 3.0);
        assert!(
            (dual_norm_eval(&Norm::lp(2.0).unwrap(), &c(&[3.0, 4.0])).unwrap() - 5.0).abs() < 1e-14
        );
        let q = dual_norm_eval(&Norm::lp(3.0).unwrap(), &c(&[1.0, 1.0])).unwrap();
        assert!((q - 2f64.powf(2.0 / 3.0)).abs() < 1e-14);
    }

    /// Grid search of sup{<x*, x> : ‖x‖_3 <= 1} for x* = (1, 1).
    #[test]
    fn dual_of_l3_matches_grid_supremum() {
        let steps = 200_000;
        let mut best = f64::MIN;
        for k in 0..steps {
            let theta = std::f64::consts::TAU * k as f64 / steps as f64;
            let (a, b) = (theta.cos(), theta.sin());
            let r = lp_norm(&[a, b], 3.0);
            best = best.max((a + b) / r);
        }
        // frozen: 2^(2/3) = 1.5874010519681994
        assert!((best - 1.587_401_051_968_199_4).abs() < 1e-9);
        let q = dual_norm_eval(
            &Norm::lp(3.0).unwrap(),
            &Covector::from_f64s(&[1.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert!((q - best).abs() < 1e-9);
    }

    #[test]
    fn invalid_p_is_rejected() {
        assert!(Norm::lp(1.0).is_err());
        assert!(norm_eval(&Norm::Lp { p: 0.5 }, &pt(&[1.0])).is_err());
        assert!(norm_eval(&Norm::WeightedL2 { weights: vec![1.0] }, &pt(&[1.0, 2.0])).is_err());
    }

    fn all_norms() -> Vec<Norm> {
        vec![
            Norm::Euclidean,
            Norm::Lp { p: 1.5 },
            Norm::Lp { p: 3.0 },
            Norm::Sup,
            Norm::L1,
            Norm::WeightedL2 {
                weights: vec![0.5, 2.0, 3.0],
            },
        ]
    }

    #[test]
    fn holder_inequality_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in all_norms() {
            for _ in 0..1000 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let xs: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let (x, xs) = (pt(&x), Covector::from_f64s(&xs).unwrap());
                let lhs = pair(&xs, &x).unwrap().abs();
                let rhs = dual_norm_eval(&n, &xs).unwrap() * norm_eval(&n, &x).unwrap();
                assert!(lhs <= rhs + 1e-9, "{n:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn norm_axioms_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in all_norms() {
            for _ in 0..500 {
                let a = pt(&(0..3).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>());
                let b = pt(&(0..3).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>());
                let t: f64 = rng.gen_range(-3.0..3.0);
                let na = norm_eval(&n, &a).unwrap();
                let nb = norm_eval(&n, &b).unwrap();
                let nab = norm_eval(&n, &a.add(&b)).unwrap();
                assert!(nab <= na + nb + 1e-9);
                let nta = norm_eval(&n, &a.scale(&t)).unwrap();
                assert!((nta - t.abs() * na).abs() <= 1e-9 * (1.0 + na));
            }
            assert_eq!(norm_eval(&n, &Point::zeros(3)).unwrap(), 0.0);
        }
    }
}
