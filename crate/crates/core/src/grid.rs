//! Rectangular grids and quasi-random sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::plain_json;
use crate::scalar::Scalar;

/// `steps[i] + 1` equally spaced nodes on `[lo[i], hi[i]]` per axis,
/// flattened row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    steps: Vec<usize>,
}

#[derive(Deserialize)]
struct RawGrid {
    #[serde(deserialize_with = "plain_json::deserialize")]
    lo: Vec<f64>,
    #[serde(deserialize_with = "plain_json::deserialize")]
    hi: Vec<f64>,
    #[serde(deserialize_with = "plain_json::deserialize")]
    steps: Vec<usize>,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::new(raw.lo, raw.hi, raw.steps)
    }
}

/// Refuse grids larger than this many nodes.
pub const MAX_GRID_NODES: usize = 1 << 24;

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, steps: Vec<usize>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if hi.len() != lo.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if steps.len() != lo.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: steps.len(),
            });
        }
        if let Some(index) = lo.iter().chain(&hi).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidArgument(
                "grid needs lo <= hi on every axis".into(),
            ));
        }
        if steps.contains(&0) {
            return Err(Error::InvalidArgument(
                "grid needs at least one step per axis".into(),
            ));
        }
        let total = steps
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s + 1));
        match total {
            Some(n) if n <= MAX_GRID_NODES => Ok(GridSpec { lo, hi, steps }),
            _ => Err(Error::TooLarge(format!("grid with steps {steps:?}"))),
        }
    }

    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>, steps: usize) -> Result<Self> {
        let d = lo.len();
        Self::new(lo, hi, vec![steps; d])
    }

    /// Grid on `[lo, hi]` with spacing at most `h`.
    pub fn with_spacing(lo: Vec<f64>, hi: Vec<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(
                "grid spacing must be positive".into(),
            ));
        }
        let steps = lo
            .iter()
            .zip(&hi)
            .map(|(l, u)| (((u - l) / h).round() as usize).max(1))
            .collect();
        Self::new(lo, hi, steps)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.iter().map(|s| s + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.steps[axis] as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn axis_node(&self, axis: usize, i: usize) -> f64 {
        if i == self.steps[axis] {
            return self.hi[axis];
        }
        self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / self.steps[axis] as f64
    }

    /// The same node computed exactly from the binary values of the bounds.
    pub fn axis_node_exact<S: Scalar>(&self, axis: usize, i: usize) -> Result<S> {
        let lo = S::from_f64(self.lo[axis])?;
        let hi = S::from_f64(self.hi[axis])?;
        let t = S::ratio(i as i64, self.steps[axis] as i64);
        Ok(lo.clone() + (hi - lo) * t)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.steps[a] + 1;
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.steps)
            .fold(0, |acc, (&i, &s)| acc * (s + 1) + i)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axis_node(a, i))
            .collect()
    }

    pub fn node_exact<S: Scalar>(&self, flat: usize) -> Result<Vec<S>> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axis_node_exact(a, i))
            .collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// Grid with every step count doubled (old nodes are kept).
    pub fn refine(&self) -> Result<Self> {
        Self::new(
            self.lo.clone(),
            self.hi.clone(),
            self.steps.iter().map(|s| s * 2).collect(),
        )
    }

    /// Cell containing `x` and the fractional position within it, per axis.
    pub fn locate(&self, x: &[f64]) -> Option<(Vec<usize>, Vec<f64>)> {
        if !self.contains(x) {
            return None;
        }
        let mut cell = Vec::with_capacity(self.dim());
        let mut frac = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let h = self.spacing(a);
            if h == 0.0 {
                cell.push(0);
                frac.push(0.0);
                continue;
            }
            let t = (x[a] - self.lo[a]) / h;
            let i = (t.floor() as usize).min(self.steps[a] - 1);
            cell.push(i);
            frac.push((t - i as f64).clamp(0.0, 1.0));
        }
        Some((cell, frac))
    }

    /// Nearest node (flat index).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let idx: Vec<usize> = (0..self.dim())
            .map(|a| {
                let h = self.spacing(a);
                if h == 0.0 {
                    0
                } else {
                    (((x[a] - self.lo[a]) / h).round().max(0.0) as usize).min(self.steps[a])
                }
            })
            .collect();
        self.flat_index(&idx)
    }
}

/// Radical inverse of `index` in `base` (van der Corput).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Point `index` of the Halton sequence in `[0, 1)^dim`.
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|a| {
            halton(
                index,
                PRIMES[a % PRIMES.len()] + 58 * (a / PRIMES.len()) as u64,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn indexing_round_trips() {
        let g = GridSpec::new(vec![-1.0, 0.0], vec![1.0, 2.0], vec![4, 2]).unwrap();
        assert_eq!(g.len(), 15);
        for k in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(k)), k);
        }
        assert_eq!(g.node(0), vec![-1.0, 0.0]);
        assert_eq!(g.node(14), vec![1.0, 2.0]);
        assert_eq!(g.node(3), vec![-0.5, 0.0]);
        assert_eq!(
            g.node_exact::<Rational>(3).unwrap(),
            vec![Rational::ratio(-1, 2), Rational::from_i64(0)]
        );
    }

    #[test]
    fn locate_and_nearest() {
        let g = GridSpec::uniform(vec![0.0], vec![1.0], 4).unwrap();
        let (cell, frac) = g.locate(&[0.3]).unwrap();
        assert_eq!(cell, vec![1]);
        assert!((frac[0] - 0.2).abs() < 1e-12);
        assert_eq!(g.locate(&[1.0]).unwrap().0, vec![3]);
        assert!(g.locate(&[1.5]).is_none());
        assert_eq!(g.nearest(&[0.3]), 1);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(vec![1.0], vec![0.0], vec![2]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![0]).is_err());
        assert!(GridSpec::uniform(vec![0.0; 4], vec![1.0; 4], 100).is_err());
    }

    #[test]
    fn halton_is_in_unit_cube() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        for k in 0..100 {
            assert!(halton_point(k, 5).iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }
}
