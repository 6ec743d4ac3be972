//! Shared value types: points, covectors, pairings, norms, graphs and
//! certificates.

pub mod certificate;
pub mod graph;
pub mod norm;
pub mod vector;

pub use certificate::Certificate;
pub use graph::{GraphPair, OperatorGraph};
pub use norm::{dual_norm_eval, norm_eval, Norm};
pub use vector::{dot, pair, Covector, Point};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| Rational::ratio(p, q))
    }

    fn rvec(n: usize) -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec(rat(), n)
    }

    proptest! {
        #[test]
        fn pairing_is_bilinear(a in rat(), b in rat(), u in rvec(3), v in rvec(3), x in rvec(3)) {
            let u = Covector::new(u).unwrap();
            let v = Covector::new(v).unwrap();
            let x = Point::new(x).unwrap();
            let combo = u.scale(&a).add(&v.scale(&b));
            let lhs = pair(&combo, &x).unwrap();
            let rhs = a * pair(&u, &x).unwrap() + b * pair(&v, &x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
