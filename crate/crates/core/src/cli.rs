//! Command-line front end. `main_with` is the whole program; the binary only
//! forwards its arguments and exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{prepare, Job, JobConfig};
use crate::error::{Error, Result};
use crate::gallery::{get_example, Params, EXAMPLE_NAMES};
use crate::pseudoriemann::{curvature_suite, einstein_residual, weyl_blocks, weyl_norm_squared};
use crate::report::{emit, to_canonical_json, Format, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "asdlift", version, about = "Verify lifts of projective structures to ASD metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks requested by a config file.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List or run the built-in examples.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Dump curvature data at one point.
    Curvature {
        /// Config file or example name.
        target: String,
        /// Comma-separated total-space point.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        params: ExampleParams,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gauge invariance suite for the Einstein lift.
    Invariance {
        target: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Killing and symplectic residuals of the known symmetry fields.
    Killing {
        target: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Twistor distribution integrability.
    Twistor {
        target: String,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Debug, Subcommand)]
pub enum GalleryAction {
    List,
    Run {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExampleParams {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Example parameter `c` (sl2).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Example parameter `m` (submaximal).
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Example function `f` (skew, flat).
    #[arg(long)]
    pub f: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunOpts {
    #[command(flatten)]
    pub params: ExampleParams,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance for every positive check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Emit canonical JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compare the output byte for byte with this file.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Record wall time in the report (breaks byte stability).
    #[arg(long)]
    pub timing: bool,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn load_job(target: &str, opts: &RunOpts) -> Result<Job> {
    let path = Path::new(target);
    let mut cfg = if path.extension().is_some_and(|e| e == "toml") || path.is_file() {
        JobConfig::load(path)?
    } else {
        if !EXAMPLE_NAMES.iter().any(|(n, _)| *n == target) {
            return Err(Error::UnknownExample(target.to_string()));
        }
        let mut cfg = JobConfig::default();
        cfg.structure.example = Some(target.to_string());
        cfg
    };
    let p = &opts.params;
    if let Some(l) = p.lambda {
        cfg.structure.lambda = Some(l);
    }
    if let Some(c) = p.c {
        cfg.structure.parameters.insert("c".into(), c);
    }
    if let Some(m) = p.m {
        cfg.structure.parameters.insert("m".into(), m);
    }
    if let Some(f) = &p.f {
        cfg.structure.f = Some(f.clone());
    }
    if let Some(n) = opts.points {
        cfg.sampling.points = n;
    }
    if let Some(s) = opts.seed {
        cfg.sampling.seed = s;
    }
    let mut job = prepare(&cfg)?;
    if let Some(t) = opts.tol {
        job.override_tolerance(t);
    }
    Ok(job)
}

fn finish(report: Report, opts: &RunOpts, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let bytes = emit(&report, if opts.json { Format::Json } else { Format::Text });
    match &opts.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => out.write_all(&bytes)?,
    }
    if let Some(golden) = &opts.golden {
        let expected = std::fs::read(golden)?;
        if expected != bytes {
            writeln!(err, "output differs from golden file {}", golden.display())?;
            return Ok(EXIT_CHECK_FAILURE);
        }
    }
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_CHECK_FAILURE })
}

fn run_job(job: &Job, opts: &RunOpts, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let start = Instant::now();
    let mut report = job.run()?;
    if opts.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    finish(report, opts, out, err)
}

fn suite(target: &str, opts: &RunOpts, names: &[&str], out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut job = load_job(target, opts)?;
    let available: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| match *n {
            "symplectic" => job.subject.omega.is_some(),
            "twistor" => job.subject.twistor.is_some(),
            "self_dual_weyl" | "mixed_block" => job.subject.metric.dim() == 4,
            _ => true,
        })
        .collect();
    job.restrict(&available)?;
    if let Some(t) = opts.tol {
        job.override_tolerance(t);
    }
    run_job(&job, opts, out, err)
}

#[derive(Debug, Serialize)]
struct CurvatureDump {
    point: Vec<f64>,
    metric: Vec<f64>,
    det: f64,
    scalar: f64,
    ricci: Vec<f64>,
    einstein_residual: f64,
    weyl_norm_squared: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_dual_weyl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anti_self_dual_weyl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mixed_block: Option<f64>,
}

fn curvature(
    target: &str,
    at: &str,
    params: &ExampleParams,
    json: bool,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let opts = RunOpts {
        params: params.clone(),
        ..Default::default()
    };
    let job = load_job(target, &opts)?;
    let point: Vec<f64> = at
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Invalid(format!("--at: {e}")))?;
    let metric = &job.subject.metric;
    if point.len() != metric.dim() {
        return Err(Error::Invalid(format!(
            "--at needs {} coordinates, got {}",
            metric.dim(),
            point.len()
        )));
    }
    let s = curvature_suite(metric, &point)?;
    let blocks = if metric.dim() == 4 { Some(weyl_blocks(&s)?) } else { None };
    let dump = CurvatureDump {
        metric: s.metric.clone(),
        det: s.det,
        scalar: s.scalar,
        ricci: s.ricci.data.clone(),
        einstein_residual: einstein_residual(&s, None),
        weyl_norm_squared: weyl_norm_squared(&s),
        self_dual_weyl: blocks.as_ref().map(|b| b.self_dual_weyl),
        anti_self_dual_weyl: blocks.as_ref().map(|b| b.anti_self_dual_weyl),
        mixed_block: blocks.as_ref().map(|b| b.mixed),
        point,
    };
    let text = if json {
        to_canonical_json(&dump)
    } else {
        let mut t = format!(
            "scalar {:.16e}\ndet {:.16e}\n|C|^2 {:.16e}\ntrace-free ricci {:.3e}\n",
            dump.scalar, dump.det, dump.weyl_norm_squared, dump.einstein_residual
        );
        if let (Some(p), Some(m), Some(x)) = (dump.self_dual_weyl, dump.anti_self_dual_weyl, dump.mixed_block) {
            t.push_str(&format!("C+ {p:.3e}\nC- {m:.3e}\nmixed {x:.3e}\n"));
        }
        t
    };
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_PASS)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Verify { config, opts } => {
            let job = load_job(&config.to_string_lossy(), &opts)?;
            run_job(&job, &opts, out, err)
        }
        Command::Gallery { action: GalleryAction::List } => {
            for (name, about) in EXAMPLE_NAMES {
                let e = get_example(name, &Params::default())?;
                let checks: Vec<&str> = e.checks.iter().map(|c| c.name.as_str()).collect();
                writeln!(out, "{name:<11} {about}\n            checks: {}", checks.join(", "))?;
            }
            Ok(EXIT_PASS)
        }
        Command::Gallery { action: GalleryAction::Run { name, opts } } => {
            if !EXAMPLE_NAMES.iter().any(|(n, _)| *n == name) {
                return Err(Error::UnknownExample(name));
            }
            let job = load_job(&name, &opts)?;
            run_job(&job, &opts, out, err)
        }
        Command::Curvature { target, at, params, json, out: path } => {
            curvature(&target, &at, &params, json, path.as_deref(), out)
        }
        Command::Invariance { target, opts } => suite(
            &target,
            &opts,
            &["invariance", "einstein", "self_dual_weyl", "mixed_block", "parallel_fiber"],
            out,
            err,
        ),
        Command::Killing { target, opts } => suite(&target, &opts, &["killing", "symplectic"], out, err),
        Command::Twistor { target, opts } => {
            suite(&target, &opts, &["twistor", "self_dual_weyl"], out, err)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
