//! Verification reports and their canonical serialisations.

use serde::Serialize;
use serde_json::Value;

use crate::checks::CheckEntry;
use crate::conventions::{conventions, Conventions};

pub const TOOL: &str = "asdlift";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub calibration: Conventions,
    pub subject: String,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckEntry>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(subject: &str, seed: u64, points: usize, checks: Vec<CheckEntry>) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            calibration: *conventions(),
            subject: subject.to_string(),
            seed,
            points,
            pass: checks.iter().all(|c| c.pass),
            checks,
            wall_time_ms: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_canonical_json(report).into_bytes(),
        Format::Text => to_text(report).into_bytes(),
    }
}

/// Sorted keys, two-space indent, floats with 17 significant digits, LF
/// line endings and a trailing newline. Non-finite floats become `null`.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("reports serialise");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

fn format_float(x: f64) -> String {
    if !x.is_finite() {
        "null".to_string()
    } else if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialise")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&serde_json::to_string(key).expect("strings serialise"));
                out.push_str(": ");
                write_value(&map[*key], level + 1, out);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push('}');
        }
    }
}

pub fn to_text(report: &Report) -> String {
    let c = &report.calibration;
    let mut out = format!(
        "{} {}  subject={} seed={} points={}\ncalibration kappa={} curvature_sign={} orientation={}\n",
        report.tool,
        report.version,
        report.subject,
        report.seed,
        report.points,
        c.kappa,
        c.curvature_sign,
        c.orientation
    );
    for check in &report.checks {
        out.push_str(&check.to_string());
        out.push('\n');
    }
    out.push_str(if report.pass { "RESULT PASS\n" } else { "RESULT FAIL\n" });
    if let Some(ms) = report.wall_time_ms {
        out.push_str(&format!("wall_time_ms={ms:.1}\n"));
    }
    out
}
