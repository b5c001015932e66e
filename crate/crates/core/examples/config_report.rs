//! A job described in TOML, run through the library and written as the
//! canonical JSON report.

use asdlift::config::{run as run_job, JobConfig};
use asdlift::report::{emit, Format};

const JOB: &str = r#"
[structure]
family = "einstein"
lambda = 2.0
parameters = { b = 0.25 }

[structure.gamma]
"1,1,2" = "b*x2"
"2,2,2" = "x1^2"

[sampling]
points = 4
seed = 9

[checks]
run = ["scalar", "einstein", "self_dual_weyl", "twistor"]
tolerance = { scalar = 1e-8 }
"#;

pub fn run() -> asdlift::Result<()> {
    let cfg = JobConfig::from_toml(JOB, "inline.toml")?;
    let report = run_job(&cfg)?;
    let json = String::from_utf8(emit(&report, Format::Json)).expect("utf-8");
    print!("{json}");
    println!("pass = {}", report.all_pass());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
