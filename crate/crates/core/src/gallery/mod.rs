//! Exact reproductions of the classical examples and counterexamples. Every
//! report is a list of claims, each comparing an expected value with one
//! computed independently in rational (or `Q(√2)`) arithmetic; a claim
//! passes only on exact equality.

pub mod sequence;
pub mod surd;

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::certificate::scalar_json;
use crate::model::{Covector, GraphPair, OperatorGraph, Point};
use crate::monotonicity::cyclic::check_n_cyclic;
use crate::monotonicity::{check_monotone, pair_product, window_related, Window};
use crate::region::ConvexRegion;
use crate::scalar::{format_rational, pow2, Rational, Tolerance};

pub use sequence::{
    gossez_apply, gossez_image, BoundedSequence, GeometricTail, GeometricTerm, TailSequence,
};
pub use surd::QSqrt2;

pub const REPORT_NAMES: [&str; 7] = [
    "gossez-antisymmetry",
    "gossez-4-5",
    "fitzpatrick-2-21",
    "ladder-2-9a",
    "diagonal-1-13",
    "rotation-2-23",
    "sum-gap-2-12",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimValue {
    Rational {
        #[serde(with = "scalar_json")]
        value: Rational,
    },
    Verdict {
        value: bool,
    },
    Surd {
        value: QSqrt2,
    },
}

impl fmt::Display for ClaimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimValue::Rational { value } => write!(f, "{}", format_rational(value)),
            ClaimValue::Verdict { value } => write!(f, "{value}"),
            ClaimValue::Surd { value } => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub expected: ClaimValue,
    pub computed: ClaimValue,
    pub pass: bool,
}

impl Claim {
    pub fn new(description: impl Into<String>, expected: ClaimValue, computed: ClaimValue) -> Self {
        let pass = expected == computed;
        Claim {
            description: description.into(),
            expected,
            computed,
            pass,
        }
    }

    fn rational(description: impl Into<String>, expected: Rational, computed: Rational) -> Self {
        Claim::new(
            description,
            ClaimValue::Rational { value: expected },
            ClaimValue::Rational { value: computed },
        )
    }

    fn verdict(description: impl Into<String>, expected: bool, computed: bool) -> Self {
        Claim::new(
            description,
            ClaimValue::Verdict { value: expected },
            ClaimValue::Verdict { value: computed },
        )
    }

    fn surd(description: impl Into<String>, expected: QSqrt2, computed: QSqrt2) -> Self {
        Claim::new(
            description,
            ClaimValue::Surd { value: expected },
            ClaimValue::Surd { value: computed },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub name: String,
    pub claims: Vec<Claim>,
    /// What the computation does and does not establish.
    pub notes: Vec<String>,
}

impl GalleryReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn claim(&self, description: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.description == description)
    }
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn q(a: i64) -> Rational {
    Rational::from_integer(a.into())
}

/// Runs a report with its default parameters.
pub fn report(name: &str) -> Result<GalleryReport> {
    match name {
        "gossez-antisymmetry" => gossez_antisymmetry(),
        "gossez-4-5" => gossez_4_5(32),
        "fitzpatrick-2-21" => fitzpatrick_2_21(8),
        "ladder-2-9a" => ladder_2_9a(20),
        "diagonal-1-13" => diagonal_1_13(4, 16, r(1, 3)),
        "rotation-2-23" => rotation_2_23(),
        "sum-gap-2-12" => sum_gap_2_12(),
        other => Err(Error::UnknownReport(other.to_string())),
    }
}

fn antisymmetry_suite() -> Result<Vec<(&'static str, TailSequence)>> {
    Ok(vec![
        ("e1", TailSequence::unit(1)),
        ("e2", TailSequence::unit(2)),
        ("e4", TailSequence::unit(4)),
        ("z", TailSequence::gossez_z()),
        (
            "(1, -2, 3/4)",
            TailSequence::finite(vec![q(1), q(-2), r(3, 4)]),
        ),
        (
            "(3^-k)",
            TailSequence::new(
                vec![],
                Some(GeometricTail {
                    first: r(1, 3),
                    ratio: r(1, 3),
                    start: 1,
                }),
            )?,
        ),
        (
            "(2, 0, -(-1/2)^(k-3)/2)",
            TailSequence::new(
                vec![q(2)],
                Some(GeometricTail {
                    first: r(-1, 2),
                    ratio: r(-1, 2),
                    start: 3,
                }),
            )?,
        ),
    ])
}

pub fn gossez_antisymmetry() -> Result<GalleryReport> {
    let suite = antisymmetry_suite()?;
    let images = suite
        .iter()
        .map(|(_, x)| gossez_image(x))
        .collect::<Result<Vec<_>>>()?;
    let mut claims = Vec::new();
    for ((name, x), ax) in suite.iter().zip(&images) {
        claims.push(Claim::rational(
            format!("<Ax, x> for x = {name}"),
            q(0),
            ax.pair(x),
        ));
        claims.push(Claim::rational(
            format!("lim (Ax)_n + sum x for x = {name}"),
            q(0),
            ax.limit.clone() + x.total(),
        ));
    }
    for i in 0..suite.len() {
        for j in i + 1..suite.len() {
            let s = images[i].pair(&suite[j].1) + images[j].pair(&suite[i].1);
            claims.push(Claim::rational(
                format!(
                    "<Ax, y> + <Ay, x> for x = {}, y = {}",
                    suite[i].0, suite[j].0
                ),
                q(0),
                s,
            ));
        }
    }
    Ok(GalleryReport {
        name: "gossez-antisymmetry".into(),
        claims,
        notes: vec!["Series are summed in closed form over geometric tails; no truncation.".into()],
    })
}

/// Test vectors `u` with `|Au|_∞ < 1`.
fn gossez_suite() -> Result<Vec<(&'static str, TailSequence)>> {
    Ok(vec![
        ("e1/2", TailSequence::unit(1).scale(&r(1, 2))),
        ("-e1/2", TailSequence::unit(1).scale(&r(-1, 2))),
        ("e2/2", TailSequence::unit(2).scale(&r(1, 2))),
        ("-e3/2", TailSequence::unit(3).scale(&r(-1, 2))),
        ("e4/2", TailSequence::unit(4).scale(&r(1, 2))),
        ("(e1 - e2)/4", TailSequence::finite(vec![r(1, 4), r(-1, 4)])),
        (
            "(1/2, 1/4, 1/8)",
            TailSequence::finite(vec![r(1, 2), r(1, 4), r(1, 8)]),
        ),
        (
            "(1/3, 1/6, 1/12, ...)",
            TailSequence::new(
                vec![],
                Some(GeometricTail {
                    first: r(1, 3),
                    ratio: r(1, 2),
                    start: 1,
                }),
            )?,
        ),
        ("z", TailSequence::gossez_z()),
    ])
}

/// Embeds the finitely supported part of the suite, together with `(x, x*)`,
/// into `R^(N+1)` so that every pair product is preserved exactly: the last
/// coordinate carries the pairing of the tails beyond `N`.
fn gossez_shadow(
    x: &TailSequence,
    xs: &BoundedSequence,
    suite: &[TailSequence],
) -> Result<(GraphPair<Rational>, OperatorGraph<Rational>)> {
    let n = suite.iter().map(|u| u.head.len()).max().unwrap_or(1);
    let x_tail_sum = x.sum_from(n + 1);
    // Σ_{k>N} x*_k x_k = ⟨x*, x⟩ - Σ_{k<=N} x*_k x_k
    let head_pair: Rational = (1..=n).map(|k| xs.coord(k) * x.coord(k)).sum();
    let t = xs.pair(x) - head_pair;
    let mut xh: Vec<Rational> = (1..=n).map(|k| x.coord(k)).collect();
    xh.push(q(1));
    let mut xsh: Vec<Rational> = (1..=n).map(|k| xs.coord(k)).collect();
    xsh.push(t);
    let p = GraphPair::new(Point::new(xh)?, Covector::new(xsh)?)?;
    let mut pairs = Vec::new();
    for u in suite {
        debug_assert!(u.tail.is_none());
        let au = gossez_image(u)?;
        let mut uh: Vec<Rational> = (1..=n).map(|k| u.coord(k)).collect();
        uh.push(q(0));
        let mut auh: Vec<Rational> = (1..=n).map(|k| au.coord(k)).collect();
        auh.push(-u.total() * x_tail_sum.clone());
        pairs.push(GraphPair::new(Point::new(uh)?, Covector::new(auh)?)?);
    }
    Ok((p, OperatorGraph::new(n + 1, pairs)?))
}

pub fn gossez_4_5(n_max: usize) -> Result<GalleryReport> {
    let z = TailSequence::gossez_z();
    let e = TailSequence::unit(1);
    let mut claims = vec![Claim::rational("(Az)_1", r(1, 4), gossez_apply(&z, 1)?)];
    for n in 2..=n_max {
        let k = n as i64;
        claims.push(Claim::rational(
            format!("(Az)_{n}"),
            r(1, 4) + pow2(-k) + pow2(-k - 1),
            gossez_apply(&z, n)?,
        ));
    }
    let az = gossez_image(&z)?;
    let ae = gossez_image(&e)?;
    let e_minus_ae = e.as_bounded().sub(&ae);
    claims.push(Claim::rational(
        "sup |(e - Ae)_n - 1|",
        q(0),
        e_minus_ae
            .sub(&BoundedSequence::constant(q(1)))
            .sup_norm()?,
    ));
    let xs = e.as_bounded().sub(&az);
    let xs_norm = xs.sup_norm()?;
    claims.push(Claim::rational("|e - Az|_∞", r(3, 4), xs_norm.clone()));
    claims.push(Claim::verdict(
        "x* = e - Az lies in the open unit ball",
        true,
        xs_norm < q(1),
    ));
    let x = e.axpy(&q(-1), &z)?;
    let pxx = xs.pair(&x);
    claims.push(Claim::rational(
        "<x*, x> with x = e - z",
        r(5, 4),
        pxx.clone(),
    ));
    claims.push(Claim::rational(
        "1 - (Az)_1 - z_1",
        r(5, 4),
        q(1) - az.coord(1) - z.coord(1),
    ));
    claims.push(Claim::verdict("<x*, x> > 1", true, pxx > q(1)));
    let ax = gossez_image(&x)?;
    let gap = xs.sub(&ax);
    claims.push(Claim::rational(
        "sup |(x* - Ax) - (e - Ae)|",
        q(0),
        gap.sub(&e_minus_ae).sup_norm()?,
    ));
    claims.push(Claim::verdict("x* ≠ Ax", true, !gap.sup_norm()?.is_zero()));
    let suite = gossez_suite()?;
    for (name, u) in &suite {
        let au = gossez_image(u)?;
        claims.push(Claim::verdict(
            format!("|Au|_∞ < 1 for u = {name}"),
            true,
            au.sup_norm()? < q(1),
        ));
        claims.push(Claim::rational(
            format!("<e - Ae, u> - sum u for u = {name}"),
            q(0),
            e_minus_ae.pair(u) - u.total(),
        ));
        claims.push(Claim::verdict(
            format!("sum u <= 1 for u = {name}"),
            true,
            u.total() <= q(1),
        ));
        let d = xs.sub(&au);
        let product = d.pair(&x) - d.pair(u);
        claims.push(Claim::verdict(
            format!("<x* - Au, x - u> >= 0 for u = {name}"),
            true,
            product >= q(0),
        ));
    }
    let finite: Vec<TailSequence> = suite
        .iter()
        .filter(|(_, u)| u.tail.is_none())
        .map(|(_, u)| u.clone())
        .collect();
    let (p, g) = gossez_shadow(&x, &xs, &finite)?;
    let n = g.dim() - 1;
    let big = p.xstar.coords()[n].abs()
        + g.pairs()
            .iter()
            .map(|pp| pp.xstar.coords()[n].abs())
            .fold(q(0), |m, v| if v > m { v } else { m })
        + q(1);
    let mut lo = vec![q(-1); n];
    let mut hi = vec![q(1); n];
    lo.push(-big.clone());
    hi.push(big);
    let window = Window::open(ConvexRegion::boxed(lo, hi)?);
    let tol = Tolerance::exact();
    let cert = window_related(&p, &g, &window, &tol)?;
    claims.push(Claim::verdict(
        "window_related((x, x*), finite suite, open unit ball)",
        true,
        cert.verdict,
    ));
    claims.push(Claim::verdict(
        "x* ≠ Ax, yet (x, x*) is related to every (u, Au) in the window",
        true,
        cert.verdict && !gap.sup_norm()?.is_zero(),
    ));
    Ok(GalleryReport {
        name: "gossez-4-5".into(),
        claims,
        notes: vec![
            "The u-suite is sampled evidence; the inequality holds for every u with Au in the open unit ball.".into(),
            "window_related runs on an exact finite shadow: coordinates past the suite's support are folded into one extra coordinate that preserves every pair product.".into(),
        ],
    })
}

/// `f(y) = |y|_∞ + |y - e1|_∞` on `Q^n`.
fn fitzpatrick_f(y: &[Rational]) -> Rational {
    let sup = |v: &mut dyn Iterator<Item = Rational>| {
        v.map(|t| t.abs())
            .fold(q(0), |m, t| if t > m { t } else { m })
    };
    let a = sup(&mut y.iter().cloned());
    let b = sup(&mut y
        .iter()
        .enumerate()
        .map(|(i, t)| if i == 0 { t.clone() - q(1) } else { t.clone() }));
    a + b
}

/// Exact test of `x* ∈ ∂f(b)` for `b ∈ {0, e1}`: within sup-distance 1/2 of
/// `b`, `f` is affine on each ray, so `f(b + d/2) - f(b) >= ⟨x*, d/2⟩` on the
/// vertices `d ∈ {-1, 1}^n` decides membership. Returns a violating
/// direction on failure.
fn fitzpatrick_member(base: &[Rational], xs: &[Rational]) -> Option<Vec<Rational>> {
    let n = base.len();
    let fb = fitzpatrick_f(base);
    (0..1u64 << n).find_map(|mask| {
        let d: Vec<Rational> = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    r(1, 2)
                } else {
                    r(-1, 2)
                }
            })
            .collect();
        let y: Vec<Rational> = base
            .iter()
            .zip(&d)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        let lin: Rational = xs.iter().zip(&d).map(|(a, b)| a.clone() * b.clone()).sum();
        (fitzpatrick_f(&y) - fb.clone() < lin).then_some(d)
    })
}

pub fn fitzpatrick_2_21(n: usize) -> Result<GalleryReport> {
    if !(2..=16).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "truncation dimension must be in 2..=16, got {n}"
        )));
    }
    let mut claims = Vec::new();
    let unit = |k: usize, s: Rational| -> Vec<Rational> {
        let mut v = vec![q(0); n];
        v[k] = s;
        v
    };
    for (label, base, centre) in [("0", vec![q(0); n], q(-1)), ("e1", unit(0, q(1)), q(1))] {
        for k in 0..n {
            for s in [q(1), q(-1)] {
                let mut xs = unit(0, centre.clone());
                xs[k] += s.clone();
                let sign = if s.is_positive() { "+" } else { "-" };
                claims.push(Claim::verdict(
                    format!(
                        "{}e1* {sign} e{}* ∈ ∂f({label})",
                        if centre.is_negative() { "-" } else { "" },
                        k + 1
                    ),
                    true,
                    fitzpatrick_member(&base, &xs).is_none(),
                ));
            }
        }
        let mut outside = unit(0, centre.clone());
        outside[1] = r(3, 2);
        claims.push(Claim::verdict(
            format!("centre + (3/2)e2* ∉ ∂f({label})"),
            false,
            fitzpatrick_member(&base, &outside).is_none(),
        ));
        // the truncated (0, λ/2^2, λ/2^3, ...) sits at l1-distance 1 + λ/2 - λ 2^-n from ±e1*
        let lambda = r(1, 10);
        let w: Vec<Rational> = (0..n)
            .map(|k| {
                if k == 0 {
                    q(0)
                } else {
                    lambda.clone() * pow2(-(k as i64) - 1)
                }
            })
            .collect();
        let dist: Rational = w
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { centre.abs() } else { v.abs() })
            .sum();
        claims.push(Claim::rational(
            format!("|w - centre|_1 for w = (0, λ/4, λ/8, ...), λ = 1/10, at {label}"),
            q(1) + lambda.clone() / q(2) - lambda.clone() * pow2(-(n as i64)),
            dist,
        ));
        claims.push(Claim::verdict(
            format!("w ∉ ∂f({label})"),
            false,
            fitzpatrick_member(&base, &w).is_none(),
        ));
    }
    let zero = vec![q(0); n];
    claims.push(Claim::verdict(
        "0 = (e1* - e1*)/2 ∈ ∂f(0) (boundary of -e1* + B*)",
        true,
        fitzpatrick_member(&zero, &zero).is_none(),
    ));
    Ok(GalleryReport {
        name: "fitzpatrick-2-21".into(),
        claims,
        notes: vec![
            format!("Checked on the truncation Q^{n} with the sup norm; ∂f(0) = -e1* + B* and ∂f(e1) = e1* + B* are verified on the extreme points."),
            "The non-convexity of int R(∂f) uses ∂f(x) ⊂ F (finitely nonzero sequences) for x ∉ {0, e1}, which has no finite-dimensional counterpart and is not checked.".into(),
        ],
    })
}

pub fn ladder_2_9a(n_max: usize) -> Result<GalleryReport> {
    if n_max == 0 || n_max > 1000 {
        return Err(Error::InvalidArgument(format!(
            "ladder length must be in 1..=1000, got {n_max}"
        )));
    }
    let mut claims = Vec::new();
    for n in 1..=n_max {
        let k = n as i64;
        // d/dt -(2^-n + t)^(1/2) at t = 0 is -1 / (2 (2^-n)^(1/2))
        let root = QSqrt2::pow_sqrt2(-k);
        let d = -(root.clone() * QSqrt2::from_rational(q(2)))
            .recip()
            .expect("nonzero root");
        let bound = QSqrt2::pow_sqrt2(k - 2);
        claims.push(Claim::surd(
            format!("d+f(0)(e{n})"),
            -bound.clone(),
            d.clone(),
        ));
        claims.push(Claim::surd(
            format!("lower bound on |x*| from e{n}"),
            bound,
            -d.clone(),
        ));
        // quotients at t = 3·2^-n and 8·2^-n, where 2^-n + t is 4·2^-n and 9·2^-n
        let t3 = QSqrt2::from_rational(q(3) * pow2(-k));
        let t8 = QSqrt2::from_rational(q(8) * pow2(-k));
        let q3 = (root.clone() - root.clone() * QSqrt2::from_rational(q(2)))
            * t3.recip().expect("nonzero step");
        let q8 = (root.clone() - root.clone() * QSqrt2::from_rational(q(3)))
            * t8.recip().expect("nonzero step");
        claims.push(Claim::verdict(
            format!("d+f(0)(e{n}) <= quotient(3·2^-{n}) <= quotient(8·2^-{n})"),
            true,
            d <= q3 && q3 <= q8,
        ));
    }
    Ok(GalleryReport {
        name: "ladder-2-9a".into(),
        claims,
        notes: vec!["The bounds 2^(n/2-1) grow without limit, so no x* in l2 can be a subgradient: ∂f(x) is empty wherever infinitely many x_n > -2^-n.".into()],
    })
}

pub fn diagonal_1_13(n_lo: usize, n_hi: usize, delta: Rational) -> Result<GalleryReport> {
    if n_lo == 0 || n_lo > n_hi || n_hi > 1000 {
        return Err(Error::InvalidArgument(format!("bad range {n_lo}..={n_hi}")));
    }
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut claims = Vec::new();
    for n in n_lo..=n_hi {
        let diag: Vec<Rational> = (1..=n).map(|k| pow2(k as i64)).collect();
        let op_norm = diag
            .iter()
            .cloned()
            .fold(q(0), |m, v| if v > m { v } else { m });
        let expected = delta.clone() * pow2(n as i64);
        claims.push(Claim::rational(
            format!("sup over |x| <= δ of |T_{n} x|"),
            expected.clone(),
            delta.clone() * op_norm,
        ));
        claims.push(Claim::rational(
            format!("|T_{n}(δ e{n})|"),
            expected.clone(),
            (diag[n - 1].clone() * delta.clone()).abs(),
        ));
        if n >= 2 {
            // δ(3/5 e_{n-1} + 4/5 e_n) has norm exactly δ
            let x = [(n - 2, r(3, 5)), (n - 1, r(4, 5))];
            let sq: Rational = x
                .iter()
                .map(|(i, c)| num_traits::pow(diag[*i].clone() * c.clone() * delta.clone(), 2))
                .sum();
            claims.push(Claim::verdict(
                format!("|T_{n} x|^2 <= (δ 2^{n})^2 at x = δ(3/5, 4/5) on the last two axes"),
                true,
                sq <= expected.clone() * expected,
            ));
        }
    }
    Ok(GalleryReport {
        name: "diagonal-1-13".into(),
        claims,
        notes: vec![format!(
            "δ = {}; the sup grows like 2^N, so T is unbounded on every ball around 0.",
            format_rational(&delta)
        )],
    })
}

pub fn rotation_points() -> OperatorGraph<Rational> {
    let pts = [[1, 1], [0, 1], [1, 0]];
    OperatorGraph::from_pairs(
        pts.iter()
            .map(|[a, b]| {
                GraphPair::new(Point::from_i64s(&[*a, *b]), Covector::from_i64s(&[*b, -*a]))
                    .expect("matching dims")
            })
            .collect(),
    )
    .expect("nonempty")
}

pub fn rotation_2_23() -> Result<GalleryReport> {
    let g = rotation_points();
    let tol = Tolerance::exact();
    let mut claims = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            claims.push(Claim::rational(
                format!("<x{i}* - x{j}*, x{i} - x{j}>"),
                q(0),
                pair_product(&g.pairs()[i], &g.pairs()[j]),
            ));
        }
    }
    claims.push(Claim::verdict(
        "check_monotone",
        true,
        check_monotone(&g, &tol)?.verdict,
    ));
    let c3 = check_n_cyclic(&g, 3, &tol)?;
    claims.push(Claim::verdict("check_n_cyclic(n = 3)", false, c3.verdict));
    claims.push(Claim::rational("3-cycle sum", q(-1), c3.sum));
    Ok(GalleryReport {
        name: "rotation-2-23".into(),
        claims,
        notes: vec![format!(
            "T(x1, x2) = (x2, -x1) at (1, 1), (0, 1), (1, 0); violating cycle {:?}.",
            c3.cycle
        )],
    })
}

/// `x* = (a, b)` against the normal cone of `{s >= t^2}` at the origin: an
/// exact point of the set with `⟨x*, y⟩ > 0`, or `None` for members.
fn parabola_violation(a: &Rational, b: &Rational) -> Option<(Rational, Rational)> {
    if b.is_positive() {
        return Some((q(0), q(1)));
    }
    if a.is_zero() {
        return None;
    }
    if b.is_zero() {
        let t = a.signum();
        return Some((t.clone(), t.clone() * t));
    }
    // maximize a t + b t^2
    let t = -a.clone() / (q(2) * b.clone());
    Some((t.clone(), t.clone() * t))
}

/// Roots of `a t^2 + b t + c <= 0` when the discriminant vanishes.
fn double_root(a: &Rational, b: &Rational, c: &Rational) -> Option<Rational> {
    (b.clone() * b.clone() - q(4) * a.clone() * c.clone())
        .is_zero()
        .then(|| -b.clone() / (q(2) * a.clone()))
}

pub fn sum_gap_2_12() -> Result<GalleryReport> {
    let mut claims = Vec::new();
    let target = (q(1), q(0));
    // C ∩ L: points (t, 0) with t^2 <= 0
    let meet = double_root(&q(1), &q(0), &q(0));
    claims.push(Claim::verdict(
        "C ∩ L is the single point 0",
        true,
        meet.as_ref().is_some_and(|t| t.is_zero()),
    ));
    let in_sum = meet.is_some_and(|t| target.0.clone() * t <= q(0));
    claims.push(Claim::verdict("(1, 0) ∈ ∂(f + g)(0)", true, in_sum));
    claims.push(Claim::verdict(
        "-e ∈ ∂f(0)",
        true,
        parabola_violation(&q(0), &q(-1)).is_none(),
    ));
    claims.push(Claim::verdict(
        "e ∉ ∂f(0)",
        true,
        parabola_violation(&q(0), &q(1)).is_some(),
    ));
    // the normal cone of the x-axis is {a = 0}
    claims.push(Claim::verdict(
        "e ∈ ∂g(0) and -e ∈ ∂g(0)",
        true,
        [q(1), q(-1)]
            .iter()
            .all(|s| (q(0) * q(1) + s.clone() * q(0)).is_zero()),
    ));
    claims.push(Claim::verdict(
        "(1, 0) ∈ ∂f(0)",
        false,
        parabola_violation(&target.0, &target.1).is_none(),
    ));
    for c in [q(-2), q(-1), r(-1, 2), q(0), r(1, 2), q(1), q(2)] {
        // (1, 0) = (1, -c) + (0, c) with (0, c) ∈ ∂g(0)
        let u = (target.0.clone(), target.1.clone() - c.clone());
        let w = parabola_violation(&u.0, &u.1);
        let value = w
            .as_ref()
            .map(|(t, s)| u.0.clone() * t.clone() + u.1.clone() * s.clone());
        claims.push(Claim::verdict(
            format!(
                "(1, {}) ∉ ∂f(0), witnessed by a point of C",
                format_rational(&-c.clone())
            ),
            true,
            value.is_some_and(|v| v.is_positive()),
        ));
    }
    // ⟨(a, b), (1, 0)⟩ = a, so a ≠ 0 also leaves the normal cone of L
    let off_axis = [r(-2, 1), r(-1, 2), r(1, 3), q(2)].iter().all(|a| {
        [q(-3), r(-1, 4), q(0), q(2)].iter().all(|b| {
            parabola_violation(a, b).is_some() && !(a.clone() * q(1) + b.clone() * q(0)).is_zero()
        })
    });
    claims.push(Claim::verdict(
        "covectors with nonzero first coordinate lie in neither ∂f(0) nor ∂g(0)",
        true,
        off_axis,
    ));
    claims.push(Claim::verdict(
        "(1, 0) ∈ ∂f(0) + ∂g(0)",
        false,
        target.0.is_zero(),
    ));
    Ok(GalleryReport {
        name: "sum-gap-2-12".into(),
        claims,
        notes: vec![
            "f is the indicator of the epigraph C of t^2, g the indicator of the x-axis L; ∂f(0) = R⁻e, ∂g(0) = Re with e = (0, 1), while ∂(f + g)(0) = R².".into(),
        ],
    })
}

impl GalleryReport {
    /// One line per claim: pass mark, description, expected, computed.
    pub fn table(&self) -> String {
        let w = self
            .claims
            .iter()
            .map(|c| c.description.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = format!("{}\n", self.name);
        for c in &self.claims {
            let pad = w - c.description.chars().count();
            out.push_str(&format!(
                "  {} {}{}  expected {}  computed {}\n",
                if c.pass { "ok  " } else { "FAIL" },
                c.description,
                " ".repeat(pad),
                c.expected,
                c.computed
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}
