use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::model::certificate::scalar_json;
use crate::scalar::{format_rational, Rational};

/// `rational + sqrt2 * √2`, exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSqrt2 {
    #[serde(with = "scalar_json")]
    pub rational: Rational,
    #[serde(with = "scalar_json")]
    pub sqrt2: Rational,
}

impl QSqrt2 {
    pub fn new(rational: Rational, sqrt2: Rational) -> Self {
        QSqrt2 { rational, sqrt2 }
    }

    pub fn from_rational(r: Rational) -> Self {
        QSqrt2 {
            rational: r,
            sqrt2: Rational::zero(),
        }
    }

    /// `2^(k/2)` for any integer `k`.
    pub fn pow_sqrt2(k: i64) -> Self {
        let half = crate::scalar::pow2(k.div_euclid(2));
        if k.rem_euclid(2) == 0 {
            QSqrt2::from_rational(half)
        } else {
            QSqrt2::new(Rational::zero(), half)
        }
    }

    pub fn signum(&self) -> i32 {
        let (a, b) = (&self.rational, &self.sqrt2);
        let sa = if a.is_zero() {
            0
        } else if a.is_positive() {
            1
        } else {
            -1
        };
        let sb = if b.is_zero() {
            0
        } else if b.is_positive() {
            1
        } else {
            -1
        };
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // opposite signs: compare a^2 with 2 b^2
        let lhs = a.clone() * a.clone();
        let rhs = b.clone() * b.clone() * Rational::from_integer(2.into());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// `1 / self` via the conjugate `a - b√2`.
    pub fn recip(&self) -> Option<Self> {
        let n = self.rational.clone() * self.rational.clone()
            - self.sqrt2.clone() * self.sqrt2.clone() * Rational::from_integer(2.into());
        (!n.is_zero())
            .then(|| QSqrt2::new(self.rational.clone() / n.clone(), -self.sqrt2.clone() / n))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.sqrt2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum().cmp(&0))
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QSqrt2::new(self.rational + o.rational, self.sqrt2 + o.sqrt2)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QSqrt2::new(self.rational - o.rational, self.sqrt2 - o.sqrt2)
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        QSqrt2::new(-self.rational, -self.sqrt2)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = Rational::from_integer(2.into());
        QSqrt2::new(
            self.rational.clone() * o.rational.clone() + two * self.sqrt2.clone() * o.sqrt2.clone(),
            self.rational * o.sqrt2 + self.sqrt2 * o.rational,
        )
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.sqrt2.is_one() {
            "√2".to_string()
        } else if (-self.sqrt2.clone()).is_one() {
            "-√2".to_string()
        } else {
            format!("{}·√2", format_rational(&self.sqrt2))
        };
        match (self.rational.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.rational)),
            (true, false) => write!(f, "{b}"),
            (false, false) => write!(f, "{} + {b}", format_rational(&self.rational)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn arithmetic_and_order() {
        let s = QSqrt2::pow_sqrt2(1);
        assert_eq!(s.clone() * s.clone(), QSqrt2::from_rational(r(2, 1)));
        assert_eq!(QSqrt2::pow_sqrt2(-3), QSqrt2::new(r(0, 1), r(1, 4)));
        assert_eq!(QSqrt2::pow_sqrt2(4), QSqrt2::from_rational(r(4, 1)));
        assert!(QSqrt2::new(r(3, 2), r(-1, 1)).signum() == 1);
        assert!(QSqrt2::new(r(7, 5), r(-1, 1)).signum() == -1);
        assert_eq!(s.recip().unwrap(), QSqrt2::new(r(0, 1), r(1, 2)));
        let x = QSqrt2::new(r(3, 1), r(-2, 1));
        assert_eq!(
            x.clone() * x.recip().unwrap(),
            QSqrt2::from_rational(r(1, 1))
        );
        assert!(QSqrt2::pow_sqrt2(3) > QSqrt2::from_rational(r(28, 10)));
        assert_eq!(format!("{}", QSqrt2::pow_sqrt2(-1)), "1/2·√2");
    }
}
