//! Named example structures with their expected checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::{run_checks, CheckKind, CheckSpec, Domain, Subject, SymmetryField};
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::lift::{einstein_lift, skew_ricci_flat, symplectic_form, walker_lift, MetricFamily};
use crate::projective::Connection;
use crate::report::Report;
use crate::sampling::SampleBox;
use crate::symmetry::killing_lift;
use crate::tolerances;
use crate::twistor::{spray_for, TwistorPair};

pub const EXAMPLE_NAMES: &[(&str, &str)] = &[
    ("flat", "Kerr-Schild lift of the flat connection"),
    ("skew", "lift of a connection with skew Schouten tensor, from f"),
    ("sl2", "cohomogeneity-one lift with SL(2) symmetry, parameter c"),
    ("submaximal", "Ricci-flat limit with the 4m (x2 dx1 - x1 dx2)^2 term"),
    ("flat_n3", "lift of the flat connection over a threefold"),
];

const XY: &[&str] = &["x1", "x2"];
const TOTAL: &[&str] = &["x1", "x2", "xi1", "xi2"];

/// Parameter overrides; `None` keeps the example's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub f: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub lambda: f64,
    pub c: f64,
    pub m: f64,
    pub f: String,
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub params: Resolved,
    pub subject: Subject,
    pub checks: Vec<CheckSpec>,
}

impl Example {
    pub fn connection(&self) -> Option<&Connection> {
        self.subject.connection.as_ref()
    }

    pub fn metric(&self) -> &MetricFamily {
        &self.subject.metric
    }

    pub fn fields(&self) -> &[SymmetryField] {
        &self.subject.fields
    }
}

fn fields(texts: &[&str], vars: &[&str]) -> Vec<Expr> {
    texts.iter().map(|t| parse(t, vars).expect("built-in field")).collect()
}

/// `Gamma^1_11 = -Gamma^2_12 = c x y^2`, `Gamma^2_22 = -Gamma^1_12 = c x^2 y`,
/// `Gamma^1_22 = c x^3`, `Gamma^2_11 = c y^3`.
pub fn sl2_connection(c: f64) -> Result<Connection> {
    Connection::parse(
        XY,
        &[("c", c)],
        &[
            ((0, 0, 0), "c*x1*x2^2"),
            ((1, 0, 1), "neg(c*x1*x2^2)"),
            ((1, 1, 1), "c*x1^2*x2"),
            ((0, 0, 1), "neg(c*x1^2*x2)"),
            ((0, 1, 1), "c*x1^3"),
            ((1, 0, 0), "c*x2^3"),
        ],
    )
}

/// `g = d xi_i . dx^i + 4m (x^2 dx^1 - x^1 dx^2)^2`
pub fn submaximal_metric(m: f64) -> Result<MetricFamily> {
    let s = fields(&["x2^2", "neg(x1*x2)", "neg(x1*x2)", "x1^2"], XY);
    let s: Vec<Expr> = s.iter().map(|e| e.scale(4.0 * m)).collect();
    walker_lift(&Connection::flat(XY)).with_base_term(&s)
}

/// Polynomial connection with coefficients of degree at most two drawn from
/// `[-1, 1]`, reproducible from the seed.
pub fn random_connection(seed: u64, n: usize) -> Result<Connection> {
    if n == 0 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let var = |i: usize| Expr::var(i, &names[i]);
    let poly = |rng: &mut ChaCha8Rng| {
        let mut e = Expr::constant(rng.gen_range(-1.0..1.0));
        for i in 0..n {
            e = e + var(i).scale(rng.gen_range(-1.0..1.0));
            for j in i..n {
                e = e + (var(i) * var(j)).scale(rng.gen_range(-1.0..1.0));
            }
        }
        e
    };
    let mut gamma = vec![Expr::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let e = poly(&mut rng);
                gamma[(k * n + i) * n + j] = e.clone();
                gamma[(k * n + j) * n + i] = e;
            }
        }
    }
    Connection::new(names, gamma)
}

/// Random `(Gamma, M)` pair for the modified Walker family.
pub fn random_pair(seed: u64) -> Result<(Connection, Vec<Expr>)> {
    let conn = random_connection(seed, 2)?;
    let other = random_connection(seed ^ 0x9e37_79b9, 2)?;
    let m = (0..4).map(|k| other.symbols()[k].clone()).collect();
    Ok((conn, m))
}

fn base_upsilon(f: &Expr) -> Vec<Expr> {
    vec![f.diff(0), f.diff(1)]
}

fn lifted(conn: &Connection, name: &str, base: &[&str], lambda: f64) -> Result<SymmetryField> {
    let base = fields(base, XY);
    Ok(SymmetryField {
        name: name.to_string(),
        components: killing_lift(conn, &base, lambda, tolerances::STANDARD)?,
        base: Some(base),
    })
}

fn einstein_subject(name: &str, conn: &Connection, lambda: f64) -> Result<Subject> {
    let metric = einstein_lift(conn, lambda)?;
    let mut subject = Subject::new(name, metric.clone());
    subject.omega = Some(symplectic_form(&metric)?);
    if conn.dim() == 2 {
        subject.twistor = Some(TwistorPair::geometric(&spray_for(&metric)?)?);
    }
    Ok(subject)
}

fn four_dim_einstein_checks(lambda: f64) -> Vec<CheckSpec> {
    use CheckKind::*;
    [
        Scalar(-24.0 * lambda),
        Einstein(Some(lambda)),
        SelfDualWeyl,
        MixedBlock,
        ParallelFiber,
        OmegaClosed,
        ParaStructure,
        HodgeSquare,
        Twistor,
        Signature,
    ]
    .into_iter()
    .map(CheckSpec::new)
    .collect()
}

fn flat(p: &Params) -> Result<Example> {
    let lambda = p.lambda.unwrap_or(1.0);
    let f = p.f.clone().unwrap_or_else(|| "x1*x2".into());
    let conn = Connection::flat(XY);
    let resolved = Resolved { lambda, c: 0.0, m: 0.0, f: f.clone() };
    if lambda == 0.0 {
        let subject = Subject::new("flat", walker_lift(&conn));
        let checks = [CheckKind::RiemannFlat, CheckKind::Signature]
            .into_iter()
            .map(CheckSpec::new)
            .collect();
        return Ok(Example { name: "flat".into(), params: resolved, subject, checks });
    }
    let mut subject = einstein_subject("flat", &conn, lambda)?;
    subject.upsilon = Some(base_upsilon(&parse(&f, XY)?));
    subject.fields = vec![
        lifted(&conn, "translation_1", &["1", "0"], lambda)?,
        lifted(&conn, "rotation", &["neg(x2)", "x1"], lambda)?,
        lifted(&conn, "projective", &["x1^2", "x1*x2"], lambda)?,
    ];
    let mut checks = four_dim_einstein_checks(lambda);
    checks.extend(
        [
            CheckKind::WeylNorm(96.0 * lambda * lambda),
            CheckKind::Killing,
            CheckKind::Symplectic,
            CheckKind::Invariance,
            CheckKind::Bianchi,
            CheckKind::WeylTraceFree,
            CheckKind::DetConstant,
            CheckKind::JetFiniteDifference,
        ]
        .into_iter()
        .map(CheckSpec::new),
    );
    Ok(Example { name: "flat".into(), params: resolved, subject, checks })
}

fn skew(p: &Params) -> Result<Example> {
    let lambda = p.lambda.unwrap_or(0.0);
    let f = p.f.clone().unwrap_or_else(|| "x1*x2".into());
    let fe = parse(&f, XY)?;
    let metric = skew_ricci_flat(XY, &fe, lambda)?;
    let mut subject = Subject::new("skew", metric.clone());
    subject.twistor = Some(TwistorPair::geometric(&spray_for(&metric)?)?);
    use CheckKind::*;
    let mut kinds = vec![SelfDualWeyl, MixedBlock, ParallelFiber, Twistor, Signature, Bianchi];
    if lambda == 0.0 {
        kinds.insert(0, RicciFlat);
    } else {
        kinds.insert(0, Einstein(Some(lambda)));
        kinds.insert(0, Scalar(-24.0 * lambda));
    }
    Ok(Example {
        name: "skew".into(),
        params: Resolved { lambda, c: 0.0, m: 0.0, f },
        subject,
        checks: kinds.into_iter().map(CheckSpec::new).collect(),
    })
}

fn sl2(p: &Params) -> Result<Example> {
    let lambda = p.lambda.unwrap_or(-1.0);
    let c = p.c.unwrap_or(1.0);
    let conn = sl2_connection(c)?;
    let mut subject = einstein_subject("sl2", &conn, lambda)?;
    subject.domain = Domain::Cohomogeneity { lambda };
    let printed = [
        ("K1", ["x1", "neg(x2)", "neg(xi1)", "xi2"], ["x1", "neg(x2)"]),
        ("K2", ["0", "2*x1", "neg(2*xi2)", "0"], ["0", "2*x1"]),
        ("K3", ["neg(2*x2)", "0", "0", "2*xi1"], ["neg(2*x2)", "0"]),
    ];
    subject.fields = printed
        .iter()
        .map(|(name, total, base)| SymmetryField {
            name: name.to_string(),
            components: fields(total, TOTAL),
            base: Some(fields(base, XY)),
        })
        .collect();
    subject.upsilon = Some(base_upsilon(&parse("x1*x2", XY)?));
    let mut checks = four_dim_einstein_checks(lambda);
    checks.extend(
        [
            CheckKind::WeylNorm(96.0 * lambda * lambda),
            CheckKind::Killing,
            CheckKind::Symplectic,
        ]
        .into_iter()
        .map(CheckSpec::new),
    );
    Ok(Example {
        name: "sl2".into(),
        params: Resolved { lambda, c, m: 0.0, f: String::new() },
        subject,
        checks,
    })
}

fn submaximal(p: &Params) -> Result<Example> {
    let m = p.m.unwrap_or(1.0);
    let lambda = p.lambda.unwrap_or(1.0);
    let metric = submaximal_metric(m)?;
    let mut subject = Subject::new("submaximal", metric.clone());
    subject.twistor = Some(TwistorPair::geometric(&spray_for(&metric)?)?);
    subject.fields = [
        ("rotation", ["neg(x2)", "x1", "neg(xi2)", "xi1"]),
        ("fiber_1", ["0", "0", "1", "0"]),
        ("fiber_2", ["0", "0", "0", "1"]),
    ]
    .iter()
    .map(|(name, comps)| SymmetryField {
        name: name.to_string(),
        components: fields(comps, TOTAL),
        base: None,
    })
    .collect();
    use CheckKind::*;
    let mut checks: Vec<CheckSpec> = [RicciFlat, SelfDualWeyl, MixedBlock, ParallelFiber, Twistor, Killing, Signature]
        .into_iter()
        .map(CheckSpec::new)
        .collect();
    checks.push(CheckSpec::control("einstein_lambda_control", Einstein(Some(lambda))));
    Ok(Example {
        name: "submaximal".into(),
        params: Resolved { lambda, c: 0.0, m, f: String::new() },
        subject,
        checks,
    })
}

fn flat_n3(p: &Params) -> Result<Example> {
    let lambda = p.lambda.unwrap_or(1.0);
    let conn = Connection::flat(&["x1", "x2", "x3"]);
    let subject = Subject::new("flat_n3", einstein_lift(&conn, lambda)?);
    use CheckKind::*;
    let checks = vec![
        CheckSpec::new(Einstein(None)).with_tolerance(tolerances::HIGHER_DIM),
        CheckSpec::new(Scalar(-48.0 * lambda)).with_tolerance(tolerances::HIGHER_DIM),
        CheckSpec::new(ScalarSpread),
        CheckSpec::new(ParallelFiber),
        CheckSpec::new(Bianchi),
        CheckSpec::new(DetConstant),
        CheckSpec::new(Signature),
    ];
    Ok(Example {
        name: "flat_n3".into(),
        params: Resolved { lambda, c: 0.0, m: 0.0, f: String::new() },
        subject,
        checks,
    })
}

pub fn get_example(name: &str, params: &Params) -> Result<Example> {
    match name {
        "flat" => flat(params),
        "skew" => skew(params),
        "sl2" => sl2(params),
        "submaximal" => submaximal(params),
        "flat_n3" => flat_n3(params),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

/// Runs the example's expected checks at `points` admissible points.
pub fn verify_example(e: &Example, points: usize, seed: u64) -> Result<Report> {
    let pts = e.subject.sample(points, seed, SampleBox::default())?;
    let entries = run_checks(&e.subject, &e.checks, &pts)?;
    Ok(Report::new(&e.name, seed, points, entries))
}
