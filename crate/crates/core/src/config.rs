//! Job files: `[structure]`, `[sampling]` and `[checks]` tables in TOML with
//! expressions as quoted strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::checks::{run_checks, CheckKind, CheckSpec, Comparison, Subject, SymmetryField};
use crate::error::{Error, Result};
use crate::expr::{parse_bound, Expr};
use crate::gallery::{get_example, random_connection, Params};
use crate::lift::{
    einstein_lift, modified_walker, skew_ricci_flat, symplectic_form, thomas_walker_lift,
    walker_lift, LiftKind,
};
use crate::projective::Connection;
use crate::report::Report;
use crate::sampling::{SampleBox, DEFAULT_SEED};
use crate::symmetry::{complete_lift, killing_lift};
use crate::tolerances;
use crate::twistor::{spray_for, TwistorPair};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub structure: StructureConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    /// Where the file came from, for error messages.
    #[serde(skip)]
    pub source: Option<(String, String)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    /// A gallery name; the remaining keys then act as parameter overrides.
    pub example: Option<String>,
    pub dimension: Option<usize>,
    pub coordinates: Option<Vec<String>>,
    /// `einstein`, `walker`, `thomas_walker`, `modified_walker` or `skew`.
    pub family: Option<String>,
    pub lambda: Option<f64>,
    /// Named constants usable inside expressions (`c` and `m` also feed the
    /// gallery examples).
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    /// `"k,i,j"` (1-based) to the symbol `Gamma^k_ij`; the mirror entry is implied.
    #[serde(default)]
    pub gamma: BTreeMap<String, String>,
    /// Draw a random polynomial connection instead of reading `gamma`.
    pub random_seed: Option<u64>,
    /// `"i,j"` (1-based) to `M_ij` for the modified Walker family.
    #[serde(default)]
    pub m: BTreeMap<String, String>,
    pub f: Option<String>,
    pub upsilon: Option<Vec<String>>,
    /// Base vector fields, lifted to the total space.
    #[serde(default)]
    pub fields: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_box", rename = "box")]
    pub domain: [f64; 2],
}

fn default_points() -> usize {
    10
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_box() -> [f64; 2] {
    [-1.0, 1.0]
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            points: default_points(),
            seed: default_seed(),
            domain: default_box(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    /// Check names to run; the family's default suite when absent.
    pub run: Option<Vec<String>>,
    #[serde(default)]
    pub tolerance: BTreeMap<String, f64>,
    /// Targets for `scalar` and `weyl_norm`.
    #[serde(default)]
    pub targets: BTreeMap<String, f64>,
}

impl JobConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<JobConfig> {
        let mut cfg: JobConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        cfg.source = Some((origin.to_string(), text.to_string()));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<JobConfig> {
        let text = std::fs::read_to_string(path)?;
        JobConfig::from_toml(&text, &path.display().to_string())
    }

    fn locate(&self, needle: &str) -> String {
        match &self.source {
            Some((origin, text)) => match text.lines().position(|l| l.contains(needle)) {
                Some(k) => format!("{origin}:{}", k + 1),
                None => origin.clone(),
            },
            None => "<config>".to_string(),
        }
    }

    fn expr(&self, key: &str, text: &str, vars: &[&str]) -> Result<Expr> {
        let params: Vec<(&str, f64)> = self
            .structure
            .parameters
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .collect();
        parse_bound(text, vars, &params).map_err(|e| {
            Error::Config(format!("{}: {key} = \"{text}\": {e}", self.locate(&format!("\"{text}\""))))
        })
    }
}

fn indices(key: &str, n: usize, arity: usize) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != arity {
        return Err(Error::Config(format!("index key `{key}` needs {arity} comma-separated entries")));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(Error::Config(format!("index `{p}` in `{key}` is not in 1..={n}"))),
        })
        .collect()
}

/// Resolved job: the subject, its checks and the sampling plan.
#[derive(Debug, Clone)]
pub struct Job {
    pub subject: Subject,
    pub checks: Vec<CheckSpec>,
    pub points: usize,
    pub seed: u64,
    pub domain: SampleBox,
}

fn twistor_for(subject: &mut Subject) {
    if subject.metric.base_dim() == 2 {
        if let Ok(spray) = spray_for(&subject.metric) {
            subject.twistor = TwistorPair::geometric(&spray).ok();
        }
    }
}

fn default_checks(subject: &Subject) -> Vec<CheckSpec> {
    use CheckKind::*;
    let n = subject.metric.base_dim();
    let four = n == 2;
    let mut kinds = Vec::new();
    match (subject.metric.kind(), subject.metric.lambda()) {
        (LiftKind::Einstein, Some(l)) => {
            kinds.push(Scalar(-4.0 * (n * (n + 1)) as f64 * l));
            kinds.push(if four { Einstein(Some(l)) } else { Einstein(None) });
            kinds.push(ScalarSpread);
            if four {
                kinds.extend([SelfDualWeyl, MixedBlock]);
            }
            kinds.push(ParallelFiber);
            if four {
                kinds.extend([OmegaClosed, ParaStructure]);
            }
        }
        (LiftKind::SkewRicciFlat, Some(l)) if l == 0.0 => {
            kinds.extend([RicciFlat, SelfDualWeyl, ParallelFiber]);
        }
        _ => {
            if four {
                kinds.push(SelfDualWeyl);
            }
            kinds.push(ParallelFiber);
        }
    }
    if subject.twistor.is_some() {
        kinds.push(Twistor);
    }
    if subject.upsilon.is_some() && subject.metric.kind() == LiftKind::Einstein {
        kinds.push(Invariance);
    }
    if !subject.fields.is_empty() {
        kinds.push(Killing);
        if subject.omega.is_some() {
            kinds.push(Symplectic);
        }
    }
    kinds.push(Signature);
    kinds
        .into_iter()
        .map(|k| {
            let spec = CheckSpec::new(k);
            if n > 2 && matches!(spec.kind, Einstein(_) | Scalar(_)) {
                let tol = spec.tolerance.max(tolerances::HIGHER_DIM);
                spec.with_tolerance(tol)
            } else {
                spec
            }
        })
        .collect()
}

fn connection(cfg: &JobConfig, coords: &[&str]) -> Result<Connection> {
    let s = &cfg.structure;
    let n = coords.len();
    if let Some(seed) = s.random_seed {
        if !s.gamma.is_empty() {
            return Err(Error::Config("give either `gamma` or `random_seed`, not both".into()));
        }
        let c = random_connection(seed, n)?;
        let names: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        return Connection::new(names, c.symbols().to_vec());
    }
    let mut entries = Vec::new();
    for (key, text) in &s.gamma {
        let idx = indices(key, n, 3)?;
        cfg.expr(&format!("gamma.\"{key}\""), text, coords)?;
        entries.push(((idx[0], idx[1], idx[2]), text.as_str()));
    }
    let params: Vec<(&str, f64)> = s.parameters.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    Connection::parse(coords, &params, &entries)
}

fn custom_subject(cfg: &JobConfig) -> Result<Subject> {
    let s = &cfg.structure;
    let coords: Vec<String> = match (&s.coordinates, s.dimension) {
        (Some(c), Some(d)) if c.len() != d => {
            return Err(Error::Config(format!(
                "dimension = {d} but {} coordinates are named",
                c.len()
            )))
        }
        (Some(c), _) => c.clone(),
        (None, d) => (1..=d.unwrap_or(2)).map(|i| format!("x{i}")).collect(),
    };
    let coords: Vec<&str> = coords.iter().map(String::as_str).collect();
    let n = coords.len();
    let conn = connection(cfg, &coords)?;
    let family = s.family.as_deref().unwrap_or("einstein");
    let f = match &s.f {
        Some(t) => Some(cfg.expr("f", t, &coords)?),
        None => None,
    };
    let metric = match family {
        "einstein" => einstein_lift(&conn, s.lambda.unwrap_or(1.0))?,
        "walker" => walker_lift(&conn),
        "thomas_walker" => thomas_walker_lift(&conn),
        "modified_walker" => {
            let mut m = vec![Expr::zero(); n * n];
            for (key, text) in &s.m {
                let idx = indices(key, n, 2)?;
                m[idx[0] * n + idx[1]] = cfg.expr(&format!("m.\"{key}\""), text, &coords)?;
            }
            modified_walker(&conn, &m)?
        }
        "skew" => {
            let f = f
                .clone()
                .ok_or_else(|| Error::Config("the skew family needs `f`".into()))?;
            skew_ricci_flat(&coords, &f, s.lambda.unwrap_or(0.0))?
        }
        other => return Err(Error::Config(format!("unknown family `{other}`"))),
    };
    let mut subject = Subject::new(family, metric.clone());
    if metric.kind() == LiftKind::Einstein {
        subject.omega = Some(symplectic_form(&metric)?);
    }
    twistor_for(&mut subject);
    subject.upsilon = match (&s.upsilon, &f) {
        (Some(u), _) => {
            if u.len() != n {
                return Err(Error::Config(format!("upsilon needs {n} components")));
            }
            Some(
                u.iter()
                    .map(|t| cfg.expr("upsilon", t, &coords))
                    .collect::<Result<_>>()?,
            )
        }
        (None, Some(f)) if family == "einstein" => Some((0..n).map(|i| f.diff(i)).collect()),
        _ => None,
    };
    for (name, comps) in &s.fields {
        if comps.len() != n {
            return Err(Error::Config(format!("field `{name}` needs {n} components")));
        }
        let base: Vec<Expr> = comps
            .iter()
            .map(|t| cfg.expr(&format!("fields.{name}"), t, &coords))
            .collect::<Result<_>>()?;
        let components = match metric.kind() {
            LiftKind::Einstein => {
                killing_lift(&conn, &base, metric.lambda().unwrap(), tolerances::STANDARD)?
            }
            _ => complete_lift(&conn, &base)?,
        };
        subject.fields.push(SymmetryField {
            name: name.clone(),
            components,
            base: Some(base),
        });
    }
    Ok(subject)
}

fn spec_for(name: &str, cfg: &JobConfig, subject: &Subject, defaults: &[CheckSpec]) -> Result<CheckSpec> {
    let explicit = cfg.checks.targets.get(name).copied();
    let default = defaults.iter().find(|s| s.name == name);
    if let (Some(s), None) = (default, explicit) {
        return Ok(s.clone());
    }
    let n = subject.metric.base_dim();
    let lambda = subject.metric.lambda();
    let target = explicit.or(match (name, subject.metric.kind(), lambda) {
        ("scalar", LiftKind::Einstein, Some(l)) => Some(-4.0 * (n * (n + 1)) as f64 * l),
        _ => None,
    });
    let einstein_lambda = if n == 2 { lambda } else { None };
    let kind = CheckKind::from_name(name, target, einstein_lambda)?;
    Ok(match default {
        Some(s) => CheckSpec { kind, ..s.clone() },
        None => CheckSpec::new(kind),
    })
}

/// Resolves a config into a subject, its checks and a sampling plan.
pub fn prepare(cfg: &JobConfig) -> Result<Job> {
    let (subject, defaults) = match &cfg.structure.example {
        Some(name) => {
            let s = &cfg.structure;
            let params = Params {
                lambda: s.lambda,
                c: s.parameters.get("c").copied(),
                m: s.parameters.get("m").copied(),
                f: s.f.clone(),
            };
            let e = get_example(name, &params)?;
            (e.subject, e.checks)
        }
        None => {
            let subject = custom_subject(cfg)?;
            let defaults = default_checks(&subject);
            (subject, defaults)
        }
    };
    let mut checks = match &cfg.checks.run {
        Some(names) => names
            .iter()
            .map(|n| spec_for(n, cfg, &subject, &defaults))
            .collect::<Result<Vec<_>>>()?,
        None => defaults,
    };
    for (name, tol) in &cfg.checks.tolerance {
        let spec = checks
            .iter_mut()
            .find(|c| &c.name == name)
            .ok_or_else(|| Error::Config(format!("tolerance given for a check that is not run: `{name}`")))?;
        spec.tolerance = *tol;
    }
    for name in cfg.checks.targets.keys() {
        if !matches!(name.as_str(), "scalar" | "weyl_norm") {
            return Err(Error::Config(format!("check `{name}` takes no target")));
        }
    }
    let [lo, hi] = cfg.sampling.domain;
    if !(lo < hi) {
        return Err(Error::Config("sampling box must satisfy lo < hi".into()));
    }
    Ok(Job {
        subject,
        checks,
        points: cfg.sampling.points,
        seed: cfg.sampling.seed,
        domain: SampleBox { lo, hi },
    })
}

impl Job {
    /// Replaces the tolerance of every positive check.
    pub fn override_tolerance(&mut self, tol: f64) {
        for c in &mut self.checks {
            if c.comparison == Comparison::Below {
                c.tolerance = tol;
            }
        }
    }

    /// Keeps only the named checks, building any that are missing.
    pub fn restrict(&mut self, names: &[&str]) -> Result<()> {
        let mut out = Vec::new();
        for name in names {
            match self.checks.iter().find(|c| c.name == *name) {
                Some(c) => out.push(c.clone()),
                None => out.push(spec_for(name, &JobConfig::default(), &self.subject, &[])?),
            }
        }
        self.checks = out;
        Ok(())
    }

    pub fn run(&self) -> Result<Report> {
        let pts = self.subject.sample(self.points, self.seed, self.domain)?;
        let entries = run_checks(&self.subject, &self.checks, &pts)?;
        Ok(Report::new(&self.subject.name, self.seed, self.points, entries))
    }
}

pub fn run(cfg: &JobConfig) -> Result<Report> {
    prepare(cfg)?.run()
}
