use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

macro_rules! dense_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq)]
        pub struct $name<S = f64> {
            coords: Vec<S>,
        }

        impl<S: Scalar> $name<S> {
            /// Validates positive dimension and finite coordinates.
            pub fn new(coords: Vec<S>) -> Result<Self> {
                if coords.is_empty() {
                    return Err(Error::ZeroDimension);
                }
                if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
                    return Err(Error::NonFinite { index });
                }
                Ok($name { coords })
            }

            pub fn zeros(dim: usize) -> Self {
                $name { coords: vec![S::zero(); dim.max(1)] }
            }

            pub fn unit(dim: usize, i: usize) -> Self {
                let mut coords = vec![S::zero(); dim];
                coords[i] = S::one();
                $name { coords }
            }

            pub fn from_i64s(values: &[i64]) -> Self {
                Self::new(values.iter().map(|&v| S::from_i64(v)).collect())
                    .expect("integer literals are finite")
            }

            pub fn coords(&self) -> &[S] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<S> {
                self.coords
            }

            pub fn dim(&self) -> usize {
                self.coords.len()
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(|c| c.is_zero())
            }

            pub fn add(&self, other: &Self) -> Self {
                debug_assert_eq!(self.dim(), other.dim());
                $name {
                    coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                debug_assert_eq!(self.dim(), other.dim());
                $name {
                    coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect(),
                }
            }

            pub fn scale(&self, s: &S) -> Self {
                $name { coords: self.coords.iter().map(|a| a.clone() * s.clone()).collect() }
            }

            pub fn neg(&self) -> Self {
                $name { coords: self.coords.iter().map(|a| -a.clone()).collect() }
            }

            /// `t * self + (1 - t) * other`
            pub fn lerp(&self, other: &Self, t: &S) -> Self {
                let u = S::one() - t.clone();
                $name {
                    coords: self
                        .coords
                        .iter()
                        .zip(&other.coords)
                        .map(|(a, b)| t.clone() * a.clone() + u.clone() * b.clone())
                        .collect(),
                }
            }

            /// Coordinatewise equality (exact, or within tolerance for floats).
            pub fn same(&self, other: &Self, tol: &crate::scalar::Tolerance) -> bool {
                self.dim() == other.dim()
                    && self.coords.iter().zip(&other.coords).all(|(a, b)| a.same(b, tol))
            }

            pub fn to_f64(&self) -> $name<f64> {
                $name { coords: self.coords.iter().map(|c| c.to_f64()).collect() }
            }

            pub fn check_dim(&self, dim: usize) -> Result<()> {
                if self.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: self.dim() });
                }
                Ok(())
            }
        }

        impl $name<f64> {
            pub fn from_f64s(values: &[f64]) -> Result<Self> {
                Self::new(values.to_vec())
            }

            pub fn euclidean(&self) -> f64 {
                self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
            }

            pub fn to_scalar<T: Scalar>(&self) -> Result<$name<T>> {
                let coords = self.coords.iter().map(|&c| T::from_f64(c)).collect::<Result<Vec<_>>>()?;
                Ok($name { coords })
            }
        }

        impl<S: Scalar> fmt::Debug for $name<S> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(", stringify!($name))?;
                for (i, c) in self.coords.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }

        impl<S: Scalar> Serialize for $name<S> {
            fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
                let values: Vec<Value> = self.coords.iter().map(|c| c.to_json()).collect();
                values.serialize(s)
            }
        }

        impl<'de, S: Scalar> Deserialize<'de> for $name<S> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let values = Vec::<Value>::deserialize(d)?;
                let coords = values
                    .iter()
                    .map(S::from_json)
                    .collect::<Result<Vec<S>>>()
                    .map_err(D::Error::custom)?;
                $name::new(coords).map_err(D::Error::custom)
            }
        }
    };
}

dense_vector!(
    /// A point of the primal space.
    Point
);
dense_vector!(
    /// An element of the dual space, paired with points coordinatewise.
    Covector
);

impl<S: Scalar> Point<S> {
    /// Reinterprets the coordinates as a covector (identifies E with E* in
    /// the Euclidean setting).
    pub fn to_covector(&self) -> Covector<S> {
        Covector {
            coords: self.coords.clone(),
        }
    }
}

impl<S: Scalar> Covector<S> {
    pub fn to_point(&self) -> Point<S> {
        Point {
            coords: self.coords.clone(),
        }
    }
}

/// Dot product of two equally long slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// The coordinate pairing `<x*, x>`.
pub fn pair<S: Scalar>(xstar: &Covector<S>, x: &Point<S>) -> Result<S> {
    x.check_dim(xstar.dim())?;
    Ok(dot(xstar.coords(), x.coords()))
}

/// `<x* - y*, x - y>` without dimension checks; callers validate first.
pub(crate) fn cross<S: Scalar>(
    xs: &Covector<S>,
    ys: &Covector<S>,
    x: &Point<S>,
    y: &Point<S>,
) -> S {
    xs.coords()
        .iter()
        .zip(ys.coords())
        .zip(x.coords().iter().zip(y.coords()))
        .fold(S::zero(), |acc, ((a, b), (c, d))| {
            acc + (a.clone() - b.clone()) * (c.clone() - d.clone())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn pairing_examples() {
        let p = |a: &[i64], b: &[i64]| {
            pair(&Covector::<f64>::from_i64s(a), &Point::from_i64s(b)).unwrap()
        };
        assert_eq!(p(&[1, 0], &[0, 1]), 0.0);
        assert_eq!(p(&[1, 1], &[1, 1]), 2.0);
        assert_eq!(p(&[1, -1], &[1, 0]), 1.0);
    }

    #[test]
    fn pairing_rejects_mismatched_dims() {
        let err = pair(
            &Covector::<f64>::from_i64s(&[1, 2]),
            &Point::from_i64s(&[1]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn rejects_nan_and_empty() {
        assert_eq!(
            Point::from_f64s(&[1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
        assert_eq!(Point::<f64>::new(vec![]).unwrap_err(), Error::ZeroDimension);
    }

    #[test]
    fn json_round_trip_rational() {
        let p: Point<Rational> = serde_json::from_str(r#"["1/3", 2, "0.5"]"#).unwrap();
        assert_eq!(p.coords()[0], Rational::ratio(1, 3));
        assert_eq!(p.coords()[2], Rational::ratio(1, 2));
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, r#"["1/3","2","1/2"]"#);
    }
}
