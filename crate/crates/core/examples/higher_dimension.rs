//! Lifts over threefolds: a 6-dimensional Einstein metric of neutral
//! signature with scalar curvature -48 lambda.

use asdlift::gallery::{get_example, random_connection, verify_example, Params};
use asdlift::lift::einstein_lift;
use asdlift::pseudoriemann::{curvature_suite, einstein_residual, signature};
use asdlift::report::to_text;

pub fn run() -> asdlift::Result<()> {
    let e = get_example("flat_n3", &Params { lambda: Some(0.5), ..Default::default() })?;
    print!("{}", to_text(&verify_example(&e, 4, 2)?));

    let g = einstein_lift(&random_connection(8, 3)?, 0.5)?;
    let p = [0.1, -0.2, 0.3, 0.4, -0.5, 0.2];
    let s = curvature_suite(&g, &p)?;
    println!(
        "random connection: scal = {:.9} einstein residual = {:.2e} signature = {:?}",
        s.scalar,
        einstein_residual(&s, None),
        signature(&s.metric)
    );
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
