//! Ricci-flat lifts: skew Schouten tensors and the submaximal metric.

use asdlift::gallery::{get_example, verify_example, Params};
use asdlift::report::to_text;

pub fn run() -> asdlift::Result<()> {
    let skew = get_example("skew", &Params { f: Some("x1*x2^2 + sin(x1)".into()), ..Default::default() })?;
    print!("{}", to_text(&verify_example(&skew, 6, 11)?));
    let sub = get_example("submaximal", &Params { m: Some(0.5), ..Default::default() })?;
    let report = verify_example(&sub, 6, 11)?;
    print!("{}", to_text(&report));
    let control = report.check("einstein_lambda_control").expect("control check");
    println!("not Einstein with lambda = 1: residual at least {:.3}", control.min_residual);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
