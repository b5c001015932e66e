//! Named residual checks evaluated over a sample of total-space points.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lift::{einstein_lift, gauge_shift, MetricFamily, SympForm};
use crate::projective::Connection;
use crate::pseudoriemann::{
    closed_residual, curvature_suite, einstein_residual, form_lie_residual, killing_residual,
    metric_jet, para_structure, parallel_fiber_residual, signature, weyl_blocks, weyl_norm_squared,
    CurvatureSuite, WeylBlocks,
};
use crate::sampling::{sample_points, SampleBox};
use crate::tolerances::{self, CONTROL_FLOOR, SINGULAR_MARGIN};
use crate::twistor::{chart_point, Chart, TwistorPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass when every point's residual is at most the tolerance.
    Below,
    /// Pass when every point's residual exceeds the tolerance.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckKind {
    Scalar(f64),
    ScalarSpread,
    Einstein(Option<f64>),
    RicciFlat,
    RiemannFlat,
    WeylFlat,
    SelfDualWeyl,
    AntiSelfDualWeyl,
    MixedBlock,
    /// Relative error of `|C|^2` against a target.
    WeylNorm(f64),
    ParallelFiber,
    Killing,
    Symplectic,
    Twistor,
    OmegaClosed,
    ParaStructure,
    HodgeSquare,
    DetConstant,
    Bianchi,
    WeylTraceFree,
    JetFiniteDifference,
    Invariance,
    Signature,
}

/// Every name accepted by [`CheckKind::from_name`].
pub const CHECK_NAMES: &[&str] = &[
    "scalar",
    "scalar_spread",
    "einstein",
    "ricci_flat",
    "riemann_flat",
    "weyl_flat",
    "self_dual_weyl",
    "anti_self_dual_weyl",
    "mixed_block",
    "weyl_norm",
    "parallel_fiber",
    "killing",
    "symplectic",
    "twistor",
    "omega_closed",
    "para_structure",
    "hodge_square",
    "det_constant",
    "bianchi",
    "weyl_tracefree",
    "jet_fd",
    "invariance",
    "signature",
];

impl CheckKind {
    pub fn name(&self) -> &'static str {
        use CheckKind::*;
        match self {
            Scalar(_) => "scalar",
            ScalarSpread => "scalar_spread",
            Einstein(_) => "einstein",
            RicciFlat => "ricci_flat",
            RiemannFlat => "riemann_flat",
            WeylFlat => "weyl_flat",
            SelfDualWeyl => "self_dual_weyl",
            AntiSelfDualWeyl => "anti_self_dual_weyl",
            MixedBlock => "mixed_block",
            WeylNorm(_) => "weyl_norm",
            ParallelFiber => "parallel_fiber",
            Killing => "killing",
            Symplectic => "symplectic",
            Twistor => "twistor",
            OmegaClosed => "omega_closed",
            ParaStructure => "para_structure",
            HodgeSquare => "hodge_square",
            DetConstant => "det_constant",
            Bianchi => "bianchi",
            WeylTraceFree => "weyl_tracefree",
            JetFiniteDifference => "jet_fd",
            Invariance => "invariance",
            Signature => "signature",
        }
    }

    /// `target` feeds `scalar` and `weyl_norm`; `lambda` feeds `einstein`.
    pub fn from_name(name: &str, target: Option<f64>, lambda: Option<f64>) -> Result<CheckKind> {
        use CheckKind::*;
        let need = |what: &str| {
            target.ok_or_else(|| Error::Config(format!("check `{name}` needs a {what} target")))
        };
        Ok(match name {
            "scalar" => Scalar(need("scalar")?),
            "scalar_spread" => ScalarSpread,
            "einstein" => Einstein(lambda),
            "ricci_flat" => RicciFlat,
            "riemann_flat" => RiemannFlat,
            "weyl_flat" => WeylFlat,
            "self_dual_weyl" => SelfDualWeyl,
            "anti_self_dual_weyl" => AntiSelfDualWeyl,
            "mixed_block" => MixedBlock,
            "weyl_norm" => WeylNorm(need("|C|^2")?),
            "parallel_fiber" => ParallelFiber,
            "killing" => Killing,
            "symplectic" => Symplectic,
            "twistor" => Twistor,
            "omega_closed" => OmegaClosed,
            "para_structure" => ParaStructure,
            "hodge_square" => HodgeSquare,
            "det_constant" => DetConstant,
            "bianchi" => Bianchi,
            "weyl_tracefree" => WeylTraceFree,
            "jet_fd" => JetFiniteDifference,
            "invariance" => Invariance,
            "signature" => Signature,
            other => return Err(Error::Config(format!("unknown check `{other}`"))),
        })
    }

    pub fn default_tolerance(&self) -> f64 {
        use CheckKind::*;
        match self {
            Scalar(_) | RicciFlat | ParallelFiber | Invariance | OmegaClosed => tolerances::TIGHT,
            JetFiniteDifference => tolerances::FINITE_DIFFERENCE,
            WeylNorm(_) => 1e-6,
            Signature => 0.5,
            _ => tolerances::STANDARD,
        }
    }

    fn needs_four_dimensions(&self) -> bool {
        use CheckKind::*;
        matches!(
            self,
            WeylFlat | SelfDualWeyl | AntiSelfDualWeyl | MixedBlock | WeylNorm(_) | HodgeSquare
                | Twistor | ParaStructure
        )
    }
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub name: String,
    pub kind: CheckKind,
    pub tolerance: f64,
    pub comparison: Comparison,
}

impl CheckSpec {
    pub fn new(kind: CheckKind) -> CheckSpec {
        CheckSpec {
            name: kind.name().to_string(),
            tolerance: kind.default_tolerance(),
            kind,
            comparison: Comparison::Below,
        }
    }

    /// A negative control: passes only if the residual stays above the floor.
    pub fn control(name: &str, kind: CheckKind) -> CheckSpec {
        CheckSpec {
            name: name.to_string(),
            kind,
            tolerance: CONTROL_FLOOR,
            comparison: Comparison::Above,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> CheckSpec {
        self.tolerance = tolerance;
        self
    }

    pub fn named(mut self, name: &str) -> CheckSpec {
        self.name = name.to_string();
        self
    }
}

/// A total-space vector field with an optional base field it was lifted from.
#[derive(Debug, Clone)]
pub struct SymmetryField {
    pub name: String,
    pub components: Vec<Expr>,
    pub base: Option<Vec<Expr>>,
}

/// Extra exclusion rules for sample points, on top of regularity of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Domain {
    #[default]
    Regular,
    /// Keep away from `r^2 = x^i xi_i = 0` and `L r^2 = 1`.
    Cohomogeneity { lambda: f64 },
}

/// Everything the checks can look at.
#[derive(Debug, Clone)]
pub struct Subject {
    pub name: String,
    pub metric: MetricFamily,
    pub connection: Option<Connection>,
    pub omega: Option<SympForm>,
    pub fields: Vec<SymmetryField>,
    pub upsilon: Option<Vec<Expr>>,
    pub twistor: Option<TwistorPair>,
    pub domain: Domain,
}

impl Subject {
    pub fn new(name: &str, metric: MetricFamily) -> Subject {
        Subject {
            name: name.to_string(),
            connection: metric.source().cloned(),
            metric,
            omega: None,
            fields: Vec::new(),
            upsilon: None,
            twistor: None,
            domain: Domain::Regular,
        }
    }

    pub fn admissible(&self, p: &[f64]) -> bool {
        if let Domain::Cohomogeneity { lambda } = self.domain {
            let n = self.metric.base_dim();
            let r2: f64 = (0..n).map(|i| p[i] * p[n + i]).sum();
            if r2.abs() < SINGULAR_MARGIN || (lambda * r2 - 1.0).abs() < SINGULAR_MARGIN {
                return false;
            }
        }
        if self
            .metric
            .components()
            .iter()
            .any(|e| e.denominator_margin(p) < SINGULAR_MARGIN)
        {
            return false;
        }
        match metric_jet(&self.metric, p) {
            Ok(jet) => {
                let d = self.metric.dim();
                let m = nalgebra::DMatrix::from_row_slice(d, d, &jet.g);
                m.determinant().abs() > 1e-8
            }
            Err(_) => false,
        }
    }

    pub fn sample(&self, count: usize, seed: u64, domain: SampleBox) -> Result<Vec<Vec<f64>>> {
        sample_points(self.metric.dim(), count, seed, domain, |p| self.admissible(p))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub points: usize,
    pub max_residual: f64,
    pub min_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl fmt::Display for CheckEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (rel, value) = match self.comparison {
            Comparison::Below => ("<=", self.max_residual),
            Comparison::Above => (">", self.min_residual),
        };
        write!(
            f,
            "{} {} residual={:.3e} {} tol={:.1e} points={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            value,
            rel,
            self.tolerance,
            self.points
        )?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

struct PointCache<'a> {
    subject: &'a Subject,
    p: &'a [f64],
    suite: Option<Result<CurvatureSuite>>,
    blocks: Option<Result<WeylBlocks>>,
}

impl<'a> PointCache<'a> {
    fn suite(&mut self) -> Result<&CurvatureSuite> {
        if self.suite.is_none() {
            self.suite = Some(curvature_suite(&self.subject.metric, self.p));
        }
        match self.suite.as_ref().unwrap() {
            Ok(s) => Ok(s),
            Err(e) => Err(Error::Numeric(e.to_string())),
        }
    }

    fn blocks(&mut self) -> Result<&WeylBlocks> {
        if self.blocks.is_none() {
            let b = self.suite().and_then(weyl_blocks);
            self.blocks = Some(b);
        }
        match self.blocks.as_ref().unwrap() {
            Ok(b) => Ok(b),
            Err(e) => Err(Error::Numeric(e.to_string())),
        }
    }
}

/// Precomputed families for the invariance check.
struct Gauge {
    shifted: MetricFamily,
    expected: MetricFamily,
}

fn gauge(subject: &Subject) -> Result<Gauge> {
    let conn = subject
        .connection
        .as_ref()
        .ok_or_else(|| Error::Invalid("invariance needs a base connection".into()))?;
    let lambda = subject
        .metric
        .lambda()
        .filter(|l| *l != 0.0)
        .ok_or_else(|| Error::Invalid("invariance needs a non-zero lambda".into()))?;
    let upsilon = subject
        .upsilon
        .as_ref()
        .ok_or_else(|| Error::Invalid("invariance needs a one-form upsilon".into()))?;
    let base = einstein_lift(conn, lambda)?;
    Ok(Gauge {
        shifted: gauge_shift(&base, upsilon, lambda)?,
        expected: einstein_lift(&conn.projective_change(upsilon)?, lambda)?,
    })
}

const TWISTOR_PARAMETERS: [f64; 2] = [-0.6, 0.45];

fn bianchi(s: &CurvatureSuite) -> f64 {
    let d = s.dim;
    let r = |a, b, c, e| s.riemann_down.get(&[a, b, c, e]);
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    worst = worst.max((r(a, b, c, e) + r(a, c, e, b) + r(a, e, b, c)).abs());
                }
            }
        }
    }
    worst
}

fn weyl_trace(s: &CurvatureSuite) -> f64 {
    let d = s.dim;
    let mut worst: f64 = 0.0;
    for b in 0..d {
        for e in 0..d {
            let t: f64 = (0..d)
                .flat_map(|a| (0..d).map(move |c| (a, c)))
                .map(|(a, c)| s.ginv(a, c) * s.weyl.get(&[a, b, c, e]))
                .sum();
            worst = worst.max(t.abs());
        }
    }
    worst
}

fn jet_fd(metric: &MetricFamily, p: &[f64]) -> Result<f64> {
    let d = metric.dim();
    let jet = metric_jet(metric, p)?;
    let g_at = |q: &[f64]| -> Result<Vec<f64>> {
        metric
            .components()
            .iter()
            .map(|e| e.eval(q).map_err(Error::from))
            .collect()
    };
    let shifted = |moves: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for (c, h) in moves {
            q[*c] += h;
        }
        g_at(&q)
    };
    let (h1, h2) = (tolerances::FD_STEP, tolerances::FD_STEP_SECOND);
    let mut worst: f64 = 0.0;
    let rel = |exact: f64, approx: f64| (exact - approx).abs() / exact.abs().max(1.0);
    for c in 0..d {
        let plus = shifted(&[(c, h1)])?;
        let minus = shifted(&[(c, -h1)])?;
        for a in 0..d {
            for b in 0..d {
                let fd = (plus[a * d + b] - minus[a * d + b]) / (2.0 * h1);
                worst = worst.max(rel(jet.dg(c, a, b), fd));
            }
        }
        for e in c..d {
            let pp = shifted(&[(c, h2), (e, h2)])?;
            let pm = shifted(&[(c, h2), (e, -h2)])?;
            let mp = shifted(&[(c, -h2), (e, h2)])?;
            let mm = shifted(&[(c, -h2), (e, -h2)])?;
            for a in 0..d {
                for b in 0..d {
                    let k = a * d + b;
                    let fd = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h2 * h2);
                    worst = worst.max(rel(jet.ddg(c, e, a, b), fd));
                }
            }
        }
    }
    Ok(worst)
}

fn needs<'a, T>(what: Option<&'a T>, message: &str) -> Result<&'a T> {
    what.ok_or_else(|| Error::Invalid(message.to_string()))
}

fn evaluate(kind: &CheckKind, cache: &mut PointCache, gauge: Option<&Gauge>) -> Result<f64> {
    use CheckKind::*;
    let subject = cache.subject;
    let p = cache.p;
    let metric = &subject.metric;
    Ok(match kind {
        Scalar(target) => (cache.suite()?.scalar - target).abs(),
        ScalarSpread | DetConstant => unreachable!("aggregated over points"),
        Einstein(lambda) => einstein_residual(cache.suite()?, *lambda),
        RicciFlat => cache.suite()?.ricci.max_abs(),
        RiemannFlat => cache.suite()?.riemann.max_abs(),
        WeylFlat => cache.suite()?.weyl.max_abs(),
        SelfDualWeyl => cache.blocks()?.self_dual_weyl,
        AntiSelfDualWeyl => cache.blocks()?.anti_self_dual_weyl,
        MixedBlock => cache.blocks()?.mixed,
        HodgeSquare => cache.blocks()?.star_square_defect,
        WeylNorm(target) => {
            let w = weyl_norm_squared(cache.suite()?);
            if *target == 0.0 {
                w.abs()
            } else {
                ((w - target) / target).abs()
            }
        }
        ParallelFiber => parallel_fiber_residual(cache.suite()?),
        Bianchi => bianchi(cache.suite()?),
        WeylTraceFree => weyl_trace(cache.suite()?),
        Killing => {
            if subject.fields.is_empty() {
                return Err(Error::Invalid("no symmetry fields to check".into()));
            }
            let mut worst: f64 = 0.0;
            for f in &subject.fields {
                worst = worst.max(killing_residual(metric, &f.components, p, false)?.residual);
            }
            worst
        }
        Symplectic => {
            let omega = needs(subject.omega.as_ref(), "no symplectic form")?;
            if subject.fields.is_empty() {
                return Err(Error::Invalid("no symmetry fields to check".into()));
            }
            let mut worst: f64 = 0.0;
            for f in &subject.fields {
                worst = worst.max(form_lie_residual(omega, &f.components, p)?);
            }
            worst
        }
        OmegaClosed => closed_residual(needs(subject.omega.as_ref(), "no symplectic form")?, p)?,
        ParaStructure => {
            let omega = needs(subject.omega.as_ref(), "no symplectic form")?;
            let s = para_structure(metric, omega, p)?;
            s.square_defect
                .max(s.compatibility_defect)
                .max(s.skew_defect)
                .max(s.fiber_defect)
        }
        Twistor => {
            let pair = needs(subject.twistor.as_ref(), "no twistor pair")?;
            let mut worst: f64 = 0.0;
            for chart in [Chart::Affine, Chart::Infinity] {
                for t in TWISTOR_PARAMETERS {
                    let (span, coef) = pair.certificate(&chart_point(p, chart, t))?;
                    worst = worst.max(span).max(coef.unwrap_or(0.0));
                }
            }
            worst
        }
        JetFiniteDifference => jet_fd(metric, p)?,
        Invariance => {
            let g = needs(gauge, "invariance data unavailable")?;
            let mut worst: f64 = 0.0;
            for (a, b) in g.shifted.components().iter().zip(g.expected.components()) {
                worst = worst.max((a.eval(p)? - b.eval(p)?).abs());
            }
            worst
        }
        Signature => {
            let jet = metric_jet(metric, p)?;
            let (pos, neg) = signature(&jet.g);
            (pos as f64 - neg as f64).abs()
        }
    })
}

fn point_series(kind: &CheckKind, caches: &mut [PointCache]) -> Result<Vec<f64>> {
    let values: Vec<f64> = match kind {
        CheckKind::ScalarSpread => caches
            .iter_mut()
            .map(|c| c.suite().map(|s| s.scalar))
            .collect::<Result<_>>()?,
        _ => caches
            .iter_mut()
            .map(|c| c.suite().map(|s| s.det))
            .collect::<Result<_>>()?,
    };
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    Ok(match kind {
        CheckKind::ScalarSpread => vec![spread],
        _ => {
            let scale = lo.abs().max(hi.abs());
            vec![if scale > 0.0 { spread / scale } else { spread }]
        }
    })
}

fn entry(spec: &CheckSpec, points: usize, values: Result<Vec<f64>>) -> CheckEntry {
    let (max, min, note) = match values {
        Ok(v) if v.iter().all(|x| x.is_finite()) => (
            v.iter().cloned().fold(0.0, f64::max),
            v.iter().cloned().fold(f64::INFINITY, f64::min),
            None,
        ),
        Ok(_) => (f64::NAN, f64::NAN, Some("non-finite residual".to_string())),
        Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
    };
    let pass = match spec.comparison {
        Comparison::Below => max <= spec.tolerance,
        Comparison::Above => min > spec.tolerance,
    };
    CheckEntry {
        name: spec.name.clone(),
        points,
        max_residual: max,
        min_residual: min,
        tolerance: spec.tolerance,
        comparison: spec.comparison,
        pass,
        note,
    }
}

/// Runs every check at every point. Failures to evaluate become failing
/// entries with a note; only a dimension mismatch in the request is an error.
pub fn run_checks(subject: &Subject, specs: &[CheckSpec], points: &[Vec<f64>]) -> Result<Vec<CheckEntry>> {
    for s in specs {
        if s.kind.needs_four_dimensions() && subject.metric.dim() != 4 {
            return Err(Error::Config(format!(
                "check `{}` is only defined in four dimensions",
                s.name
            )));
        }
    }
    let gauge = if specs.iter().any(|s| s.kind == CheckKind::Invariance) {
        Some(gauge(subject))
    } else {
        None
    };
    let mut caches: Vec<PointCache> = points
        .iter()
        .map(|p| PointCache {
            subject,
            p,
            suite: None,
            blocks: None,
        })
        .collect();
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let values = match &spec.kind {
            CheckKind::ScalarSpread | CheckKind::DetConstant => point_series(&spec.kind, &mut caches),
            CheckKind::Invariance => match gauge.as_ref().unwrap() {
                Ok(g) => caches
                    .iter_mut()
                    .map(|c| evaluate(&spec.kind, c, Some(g)))
                    .collect(),
                Err(e) => Err(Error::Invalid(e.to_string())),
            },
            kind => caches.iter_mut().map(|c| evaluate(kind, c, None)).collect(),
        };
        out.push(entry(spec, points.len(), values));
    }
    Ok(out)
}
