//! Sequences with a finite head and a closed-form geometric tail: `ℓ1`
//! elements as [`TailSequence`], and the bounded sequences produced by the
//! Gossez operator as [`BoundedSequence`].

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::{scalar_json, scalar_vec_json};
use crate::scalar::Rational;

/// Coordinates `start, start + 1, ...` equal `first * ratio^(k - start)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    #[serde(with = "scalar_json")]
    pub first: Rational,
    #[serde(with = "scalar_json")]
    pub ratio: Rational,
    pub start: usize,
}

/// A summable sequence indexed from 1: the head, zeros up to the tail start,
/// then the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSequence {
    #[serde(with = "scalar_vec_json")]
    pub head: Vec<Rational>,
    pub tail: Option<GeometricTail>,
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn powi(r: &Rational, k: usize) -> Rational {
    num_traits::pow(r.clone(), k)
}

impl TailSequence {
    pub fn new(head: Vec<Rational>, tail: Option<GeometricTail>) -> Result<Self> {
        if let Some(t) = &tail {
            if t.start <= head.len() {
                return Err(Error::InvalidArgument(format!(
                    "tail starts at {} inside a head of length {}",
                    t.start,
                    head.len()
                )));
            }
            if t.ratio.abs() >= Rational::one() {
                return Err(Error::InvalidArgument(format!(
                    "non-summable tail: |ratio| = {} >= 1",
                    t.ratio.abs()
                )));
            }
        }
        Ok(TailSequence { head, tail })
    }

    pub fn finite(head: Vec<Rational>) -> Self {
        TailSequence { head, tail: None }
    }

    /// The `k`-th unit vector.
    pub fn unit(k: usize) -> Self {
        let mut head = vec![q(0); k];
        head[k - 1] = q(1);
        TailSequence::finite(head)
    }

    /// `(-1/2, 1/2^3, 1/2^4, ...)`.
    pub fn gossez_z() -> Self {
        TailSequence {
            head: vec![Rational::new((-1).into(), 2.into())],
            tail: Some(GeometricTail {
                first: Rational::new(1.into(), 8.into()),
                ratio: Rational::new(1.into(), 2.into()),
                start: 2,
            }),
        }
    }

    pub fn coord(&self, k: usize) -> Rational {
        assert!(k >= 1, "sequences are indexed from 1");
        if k <= self.head.len() {
            return self.head[k - 1].clone();
        }
        match &self.tail {
            Some(t) if k >= t.start => t.first.clone() * powi(&t.ratio, k - t.start),
            _ => q(0),
        }
    }

    /// First index from which every coordinate follows the tail law (zero
    /// without a tail).
    pub fn regular_from(&self) -> usize {
        self.tail.as_ref().map_or(self.head.len() + 1, |t| t.start)
    }

    /// `Σ_{k >= m} x_k`.
    pub fn sum_from(&self, m: usize) -> Rational {
        let m = m.max(1);
        let mut s: Rational = self.head.iter().skip(m - 1).cloned().sum();
        if let Some(t) = &self.tail {
            let from = m.max(t.start);
            s += t.first.clone() * powi(&t.ratio, from - t.start) / (q(1) - t.ratio.clone());
        }
        s
    }

    pub fn total(&self) -> Rational {
        self.sum_from(1)
    }

    /// `Σ_{k < n} x_k`.
    pub fn prefix(&self, n: usize) -> Rational {
        (1..n).map(|k| self.coord(k)).sum()
    }

    /// `Σ |x_k|`.
    pub fn l1_norm(&self) -> Rational {
        let mut s: Rational = self.head.iter().map(|v| v.abs()).sum();
        if let Some(t) = &self.tail {
            s += t.first.abs() / (q(1) - t.ratio.abs());
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TailSequence {
            head: self.head.iter().map(|v| v.clone() * c.clone()).collect(),
            tail: self.tail.as_ref().map(|t| GeometricTail {
                first: t.first.clone() * c.clone(),
                ..t.clone()
            }),
        }
    }

    /// `self + c * other` when the tails share ratio and start (or one is
    /// absent).
    pub fn axpy(&self, c: &Rational, other: &TailSequence) -> Result<Self> {
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (Some(t), None) => Some(t.clone()),
            (None, Some(t)) => Some(GeometricTail {
                first: t.first.clone() * c.clone(),
                ..t.clone()
            }),
            (Some(a), Some(b)) if a.ratio == b.ratio && a.start == b.start => Some(GeometricTail {
                first: a.first.clone() + b.first.clone() * c.clone(),
                ..a.clone()
            }),
            _ => {
                return Err(Error::Unsupported(
                    "sums of sequences with different tails".into(),
                ))
            }
        };
        let n = self.head.len().max(other.head.len());
        let head = (1..=n)
            .map(|k| self.coord(k) + c.clone() * other.coord(k))
            .collect();
        TailSequence::new(head, tail)
    }

    pub fn as_bounded(&self) -> BoundedSequence {
        let from = self.regular_from();
        BoundedSequence {
            head: (1..from).map(|k| self.coord(k)).collect(),
            limit: q(0),
            geometric: self
                .tail
                .iter()
                .map(|t| GeometricTerm {
                    coef: t.first.clone(),
                    ratio: t.ratio.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricTerm {
    #[serde(with = "scalar_json")]
    pub coef: Rational,
    #[serde(with = "scalar_json")]
    pub ratio: Rational,
}

/// A bounded sequence equal, from index `head.len() + 1` on, to
/// `limit + Σ coef * ratio^(k - head.len() - 1)` with every `|ratio| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedSequence {
    #[serde(with = "scalar_vec_json")]
    pub head: Vec<Rational>,
    #[serde(with = "scalar_json")]
    pub limit: Rational,
    pub geometric: Vec<GeometricTerm>,
}

impl BoundedSequence {
    pub fn constant(c: Rational) -> Self {
        BoundedSequence {
            head: Vec::new(),
            limit: c,
            geometric: Vec::new(),
        }
    }

    pub fn coord(&self, k: usize) -> Rational {
        assert!(k >= 1, "sequences are indexed from 1");
        if k <= self.head.len() {
            return self.head[k - 1].clone();
        }
        let j = k - self.head.len() - 1;
        self.geometric.iter().fold(self.limit.clone(), |s, g| {
            s + g.coef.clone() * powi(&g.ratio, j)
        })
    }

    /// Moves the regular part to start later, keeping the values.
    fn extended_to(&self, len: usize) -> Self {
        if len <= self.head.len() {
            return self.clone();
        }
        let shift = len - self.head.len();
        BoundedSequence {
            head: (1..=len).map(|k| self.coord(k)).collect(),
            limit: self.limit.clone(),
            geometric: self
                .geometric
                .iter()
                .map(|g| GeometricTerm {
                    coef: g.coef.clone() * powi(&g.ratio, shift),
                    ratio: g.ratio.clone(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &BoundedSequence) -> Self {
        let n = self.head.len().max(other.head.len());
        let (a, b) = (self.extended_to(n), other.extended_to(n));
        let mut geometric = a.geometric.clone();
        geometric.extend(b.geometric.iter().map(|g| GeometricTerm {
            coef: -g.coef.clone(),
            ratio: g.ratio.clone(),
        }));
        BoundedSequence {
            head: a
                .head
                .iter()
                .zip(&b.head)
                .map(|(x, y)| x.clone() - y.clone())
                .collect(),
            limit: a.limit - b.limit,
            geometric,
        }
        .simplified()
    }

    fn simplified(mut self) -> Self {
        let mut merged: Vec<GeometricTerm> = Vec::new();
        for g in self.geometric.drain(..) {
            if let Some(m) = merged.iter_mut().find(|m| m.ratio == g.ratio) {
                m.coef += g.coef;
            } else {
                merged.push(g);
            }
        }
        merged.retain(|g| !g.coef.is_zero());
        self.geometric = merged;
        self
    }

    /// Exact `sup_k |v_k|`. The regular part must carry at most one
    /// geometric term.
    pub fn sup_norm(&self) -> Result<Rational> {
        let head_max = self
            .head
            .iter()
            .map(|v| v.abs())
            .fold(q(0), |m, v| if v > m { v } else { m });
        let n = self.head.len();
        let tail_max = match self.geometric.len() {
            0 => self.limit.abs(),
            // v_j = L + c r^j: monotone in j for r >= 0, alternating about L
            // with shrinking amplitude for r < 0
            1 => [self.coord(n + 1), self.coord(n + 2), self.limit.clone()]
                .iter()
                .map(|v| v.abs())
                .fold(q(0), |m, v| if v > m { v } else { m }),
            _ => {
                return Err(Error::Unsupported(
                    "sup norm with several geometric terms".into(),
                ))
            }
        };
        Ok(if tail_max > head_max {
            tail_max
        } else {
            head_max
        })
    }

    /// Whether the sup is attained (as opposed to approached in the limit).
    pub fn sup_attained(&self) -> Result<bool> {
        let s = self.sup_norm()?;
        let n = self.head.len();
        Ok((1..=n + 2).any(|k| self.coord(k).abs() == s)
            || self.geometric.is_empty() && self.limit.abs() == s)
    }

    /// `⟨self, x⟩ = Σ v_k x_k`, in closed form.
    pub fn pair(&self, x: &TailSequence) -> Rational {
        let m = (self.head.len() + 1).max(x.regular_from());
        let mut s: Rational = (1..m).map(|k| self.coord(k) * x.coord(k)).sum();
        if let Some(t) = &x.tail {
            // x_k = b ρ^(k - m) for k >= m, where b = x_m
            let b = x.coord(m);
            let rho = t.ratio.clone();
            let shift = m - self.head.len() - 1;
            s += self.limit.clone() * b.clone() / (q(1) - rho.clone());
            for g in &self.geometric {
                let c0 = g.coef.clone() * powi(&g.ratio, shift);
                s += c0 * b.clone() / (q(1) - g.ratio.clone() * rho.clone());
            }
        }
        s
    }
}

/// `(Ax)_n = -Σ_{k<n} x_k + Σ_{k>n} x_k`.
pub fn gossez_apply(x: &TailSequence, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sequences are indexed from 1".into(),
        ));
    }
    check_summable(x)?;
    Ok(x.sum_from(n + 1) - x.prefix(n))
}

fn check_summable(x: &TailSequence) -> Result<()> {
    match &x.tail {
        Some(t) if t.ratio.abs() >= Rational::one() => Err(Error::InvalidArgument(format!(
            "non-summable tail: |ratio| = {}",
            t.ratio.abs()
        ))),
        _ => Ok(()),
    }
}

/// The whole sequence `Ax` in closed form. Past the tail start,
/// `(Ax)_n = a ρ^(n-s) (1 + ρ) / (1 - ρ) - Σx`.
pub fn gossez_image(x: &TailSequence) -> Result<BoundedSequence> {
    check_summable(x)?;
    let from = x.regular_from();
    let head = (1..from)
        .map(|n| gossez_apply(x, n))
        .collect::<Result<Vec<_>>>()?;
    let limit = -x.total();
    let geometric = match &x.tail {
        Some(t) => vec![GeometricTerm {
            coef: t.first.clone() * (q(1) + t.ratio.clone()) / (q(1) - t.ratio.clone()),
            ratio: t.ratio.clone(),
        }],
        None => Vec::new(),
    };
    Ok(BoundedSequence {
        head,
        limit,
        geometric,
    }
    .simplified())
}
