use monotone_core::convex::{
    br_search, conjugate_value, descent_witness, difference_quotients, directional_derivative,
    discrete_conjugate, eps_subdifferential_test, eval, fenchel_conjugate, maximality_probe,
    reconstruct_potential, subgradient_test, sum_rule_check, ConvexFunction, SplitSearch,
};
use monotone_core::duality::{
    convex_resolvent, duality_map, positive_check, project, projection_vi_check, step_resolvent,
};
use monotone_core::extension::{
    browder_witness, extend_constant, extend_general, kakutani_witness, Phi,
};
use monotone_core::gallery;
use monotone_core::grid::GridSpec;
use monotone_core::monotonicity::{
    check_cyclic, check_monotone, check_n_cyclic, coercivity_profile, invert,
    monotonically_related, separation_witness, sum_graphs, window_related, StepFunction1D, Window,
};
use monotone_core::region::ConvexRegion;
use monotone_core::{Covector, GraphPair, OperatorGraph, Point, Scalar, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::Command;
use crate::builtins::{
    parse_norm, parse_scalar, parse_vector, phi_builtin, uniform_vector, SetMap,
};
use crate::io::{CliError, CliResult, Doc, Outcome};

pub struct Context<'a> {
    pub doc: Option<&'a Doc>,
    pub tol: Tolerance,
    pub seed: u64,
}

impl Context<'_> {
    fn doc(&self) -> &Doc {
        self.doc
            .expect("input document is read for every command but gallery")
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn to_points<S: Scalar>(raw: Vec<Vec<f64>>) -> CliResult<Vec<Point<S>>> {
    raw.into_iter()
        .map(|v| Ok(Point::from_f64s(&v)?.to_scalar()?))
        .collect()
}

/// Commands that run in either backend. `None` when `cmd` is float-only.
pub fn generic<S: Scalar>(cmd: &Command, cx: &Context) -> CliResult<Option<Outcome>> {
    let out = match cmd {
        Command::CheckMonotone => {
            let g: OperatorGraph<S> = cx.doc().whole()?;
            let c = check_monotone(&g, &cx.tol)?;
            let v = c.verdict;
            Outcome::check(c, v)?
        }
        Command::CheckCyclic { n } => {
            let g: OperatorGraph<S> = cx.doc().whole()?;
            let r = if n == "full" {
                check_cyclic(&g, &cx.tol)?
            } else {
                let k: usize = n.parse().map_err(|_| {
                    CliError::Usage(format!("--n: expected an integer or `full`, got `{n}`"))
                })?;
                check_n_cyclic(&g, k, &cx.tol)?
            };
            let v = r.verdict;
            Outcome::check(r, v)?
        }
        Command::Related => {
            let d = cx.doc();
            let p: GraphPair<S> = d.field("pair")?;
            let g: OperatorGraph<S> = d.field("graph")?;
            let c = match d.optional::<Window<S>>("window")? {
                Some(w) => window_related(&p, &g, &w, &cx.tol)?,
                None => monotonically_related(&p, &g, &cx.tol)?,
            };
            let v = c.verdict;
            Outcome::check(c, v)?
        }
        Command::Invert => {
            let g: OperatorGraph<S> = cx.doc().whole()?;
            Outcome::data(invert(&g))?
        }
        Command::Sum => {
            let d = cx.doc();
            let s: OperatorGraph<S> = d.field("s")?;
            let t: OperatorGraph<S> = d.field("t")?;
            Outcome::data(sum_graphs(&s, &t, &cx.tol)?)?
        }
        Command::Witness47 { lambda } => {
            let d = cx.doc();
            let lambda: S = parse_scalar("--lambda", lambda)?;
            let w = separation_witness::<S>(
                &d.field("z")?,
                &d.field("zstar")?,
                &d.field("y")?,
                &d.field("ystar")?,
                &lambda,
                &cx.tol,
            )?;
            Outcome::data(w)?
        }
        Command::Reconstruct { base } => {
            let g: OperatorGraph<S> = cx.doc().whole()?;
            let cycle = check_cyclic(&g, &cx.tol)?;
            if !cycle.verdict {
                return Outcome::check(json!({ "cycle_report": cycle }), false).map(Some);
            }
            Outcome::check(reconstruct_potential(&g, *base, &cx.tol)?, true)?
        }
        Command::Project => {
            let d = cx.doc();
            let c: ConvexRegion<S> = d.field("region")?;
            let x: Point<S> = d.field("x")?;
            Outcome::data(json!({ "projection": project(&c, &x)? }))?
        }
        Command::ViCheck { samples } => {
            let d = cx.doc();
            let c: ConvexRegion<S> = d.field("region")?;
            let x: Point<S> = d.field("x")?;
            let probes: Vec<Point<S>> = match d.optional("probes")? {
                Some(p) => p,
                None => {
                    let mut rng = cx.rng();
                    let center: Vec<f64> = x.to_f64().coords().to_vec();
                    let mut out = Vec::with_capacity(*samples);
                    for _ in 0..*samples {
                        let y =
                            to_points::<S>(vec![uniform_vector(&mut rng, &center, 2.0)])?.remove(0);
                        out.push(project(&c, &y)?);
                    }
                    out
                }
            };
            let cert = projection_vi_check(&c, &x, &probes, &cx.tol)?;
            let v = cert.verdict;
            Outcome::check(cert, v)?
        }
        Command::Resolvent { lambda } if cx.doc().has("step") => {
            let d = cx.doc();
            let t: StepFunction1D<S> = d.field("step")?;
            let ystar: S = d
                .field::<serde_json::Value>("ystar")
                .and_then(|v| S::from_json(&v).map_err(CliError::from))?;
            let lambda: S = parse_scalar("--lambda", lambda)?;
            let x = step_resolvent(&t, &lambda, &ystar)?;
            Outcome::data(json!({ "x": x.to_json() }))?
        }
        Command::PositiveCheck { samples } => {
            let d = cx.doc();
            let raw: Vec<Vec<serde_json::Value>> = d.field("matrix")?;
            let a: Vec<Vec<S>> = raw
                .iter()
                .map(|row| row.iter().map(S::from_json).collect())
                .collect::<Result<_, _>>()?;
            let pts: Vec<Point<S>> = match d.optional("samples")? {
                Some(p) => p,
                None => {
                    let mut rng = cx.rng();
                    let zero = vec![0.0; a.len()];
                    to_points(
                        (0..*samples)
                            .map(|_| uniform_vector(&mut rng, &zero, 1.0))
                            .collect(),
                    )?
                }
            };
            let r = positive_check(&a, &pts, &cx.tol)?;
            let v = r.certificate.verdict;
            Outcome::check(r, v)?
        }
        Command::DfExtend {
            constant: Some(x0), ..
        } => {
            let d = cx.doc();
            let m: OperatorGraph<S> = d.field("graph")?;
            let c: ConvexRegion<S> = d.field("region")?;
            let x0 = Point::new(parse_vector::<S>("--constant", x0)?)?;
            Outcome::data(extend_constant(&m, &c, &x0, &cx.tol)?)?
        }
        Command::Gallery { name, n } => {
            let r = match (name.as_str(), n) {
                ("gossez-4-5", Some(n)) => gallery::gossez_4_5(*n)?,
                ("fitzpatrick-2-21", Some(n)) => gallery::fitzpatrick_2_21(*n)?,
                ("ladder-2-9a", Some(n)) => gallery::ladder_2_9a(*n)?,
                (_, Some(_)) => {
                    return Err(CliError::Usage(format!("--n is not accepted by `{name}`")))
                }
                (_, None) => gallery::report(name)?,
            };
            let passed = r.passed();
            let table = r.table();
            let mut o = Outcome::check(r, passed)?;
            o.table = Some(table);
            o
        }
        _ => return Ok(None),
    };
    Ok(Some(out))
}

fn function_grid(d: &Doc, f: &ConvexFunction) -> CliResult<GridSpec> {
    match d.optional::<GridSpec>("grid")? {
        Some(g) => Ok(g),
        None => f.native_grid().cloned().ok_or_else(|| {
            CliError::Input("field `grid` is required for a function without a native grid".into())
        }),
    }
}

/// Commands that exist only in the floating backend.
pub fn float_only(cmd: &Command, cx: &Context) -> CliResult<Outcome> {
    let d = cx.doc();
    let tol = &cx.tol;
    match cmd {
        Command::Coercivity {
            radii,
            thresholds,
            norm,
        } => {
            let g: OperatorGraph = d.whole()?;
            let p = coercivity_profile(&g, &parse_norm(norm)?, radii, thresholds.as_deref())?;
            let v = p.coercive;
            Outcome::check(p, v)
        }
        Command::Eval => {
            let f: ConvexFunction = d.field("function")?;
            Outcome::data(json!({ "value": eval(&f, &d.field("x")?)? }))
        }
        Command::Conjugate => {
            let f: ConvexFunction = d.field("function")?;
            if let Some(at) = d.optional::<Covector>("at")? {
                return Outcome::data(json!({ "value": conjugate_value(&f, &at)? }));
            }
            let dual: GridSpec = d.field("dual_grid")?;
            let c = match d.optional::<GridSpec>("primal_grid")? {
                Some(primal) => discrete_conjugate(&f, &primal, &dual)?,
                None => fenchel_conjugate(&f, &dual)?,
            };
            Outcome::data(c)
        }
        Command::SubgradTest => {
            let f: ConvexFunction = d.field("function")?;
            let c = subgradient_test(&f, &d.field("x")?, &d.field("xstar")?, tol)?;
            let v = c.verdict;
            Outcome::check(c, v)
        }
        Command::EpsSubgrad { eps } => {
            let f: ConvexFunction = d.field("function")?;
            let eps = match eps {
                Some(e) => *e,
                None => d.field("eps")?,
            };
            let c = eps_subdifferential_test(&f, &d.field("x")?, &d.field("xstar")?, eps, tol)?;
            let v = c.verdict;
            Outcome::check(c, v)
        }
        Command::DPlus => {
            let f: ConvexFunction = d.field("function")?;
            let x: Point = d.field("x")?;
            let y: Point = d.field("y")?;
            let kmax = d.optional::<u32>("kmax")?.unwrap_or(20);
            Outcome::data(json!({
                "value": directional_derivative(&f, &x, &y)?,
                "quotients": difference_quotients(&f, &x, &y, kmax)?,
            }))
        }
        Command::SumRule { resolution, radius } => {
            let f: ConvexFunction = d.field("f")?;
            let g: ConvexFunction = d.field("g")?;
            let search = SplitSearch {
                resolution: *resolution,
                radius: *radius,
            };
            let r = sum_rule_check(&f, &g, &d.field("x")?, &d.field("xstar")?, search, tol)?;
            let v = r.in_sum_subdiff && r.decomposable;
            Outcome::check(r, v)
        }
        Command::BrSearch { alpha, beta } => {
            let f: ConvexFunction = d.field("function")?;
            let grid = function_grid(d, &f)?;
            let r = br_search(&f, &grid, &d.field("x0")?, *alpha, *beta, tol)?;
            let v = r.certificate.verdict;
            Outcome::check(r, v)
        }
        Command::DescentWitness => {
            let f: ConvexFunction = d.field("function")?;
            let grid = function_grid(d, &f)?;
            let r = descent_witness(&f, &grid, &d.field("x")?, tol)?;
            let v = r.certificate.verdict;
            Outcome::check(r, v)
        }
        Command::MintyProbe { samples } => {
            let f: ConvexFunction = d.field("function")?;
            let grid: Option<GridSpec> = d.optional("grid")?;
            let duals: Vec<Covector> = match d.optional("samples")? {
                Some(s) => s,
                None => {
                    let mut rng = cx.rng();
                    let zero = vec![0.0; f.dim()];
                    (0..*samples)
                        .map(|_| Covector::from_f64s(&uniform_vector(&mut rng, &zero, 2.0)))
                        .collect::<Result<_, _>>()?
                }
            };
            let r = maximality_probe(&f, &duals, grid.as_ref(), tol)?;
            let v = r.certificate.verdict;
            Outcome::check(r, v)
        }
        Command::Dualmap { norm } => {
            Outcome::data(duality_map(&parse_norm(norm)?, &d.field("x")?)?)
        }
        Command::Resolvent { lambda } => {
            let f: ConvexFunction = d.field("function")?;
            let grid: Option<GridSpec> = d.optional("grid")?;
            let lambda: f64 = parse_scalar("--lambda", lambda)?;
            let r = convex_resolvent(&f, lambda, &d.field("ystar")?, grid.as_ref(), tol)?;
            let v = r.certificate.verdict;
            Outcome::check(r, v)
        }
        Command::DfExtend { phi, .. } => {
            let Some(name) = phi else {
                return Err(CliError::Usage(
                    "df-extend needs --constant or --phi".into(),
                ));
            };
            let map = phi_builtin(name)?;
            let m: OperatorGraph = d.field("graph")?;
            let c: ConvexRegion = d.field("region")?;
            Outcome::data(extend_general(&m, &c, &Phi::Map(&map), tol)?)
        }
        Command::Browder { r, norm } => {
            let g: OperatorGraph = d.whole()?;
            Outcome::data(browder_witness(&g, *r, &parse_norm(norm)?, tol)?)
        }
        Command::Kakutani { tol: t } => {
            let k: ConvexRegion = d.field("k")?;
            let map: SetMap = d.field("map")?;
            Outcome::data(kakutani_witness(&|u: &Point| map.apply(u), &k, *t)?)
        }
        other => unreachable!("{other:?} is handled by the generic dispatch"),
    }
}

pub fn is_float_only(cmd: &Command, doc: Option<&Doc>) -> bool {
    match cmd {
        Command::Coercivity { .. }
        | Command::Eval
        | Command::Conjugate
        | Command::SubgradTest
        | Command::EpsSubgrad { .. }
        | Command::DPlus
        | Command::SumRule { .. }
        | Command::BrSearch { .. }
        | Command::DescentWitness
        | Command::MintyProbe { .. }
        | Command::Dualmap { .. }
        | Command::Browder { .. }
        | Command::Kakutani { .. } => true,
        Command::Resolvent { .. } => !doc.is_some_and(|d| d.has("step")),
        Command::DfExtend { constant, .. } => constant.is_none(),
        _ => false,
    }
}
