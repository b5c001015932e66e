//! Lifting symmetries of the base to the Walker metric: affine fields give
//! Killing fields, projective ones give conformal Killing fields.

use asdlift::expr::parse;
use asdlift::lift::walker_lift;
use asdlift::pseudoriemann::killing_residual;
use asdlift::symmetry::{complete_lift, conformal_walker_lift, projective_defect};
use asdlift::Connection;

pub fn run() -> asdlift::Result<()> {
    let xy = ["x1", "x2"];
    let flat = Connection::flat(&xy);
    let g = walker_lift(&flat);
    let p = [0.3, -0.6, 0.2, 0.9];

    let rotation = vec![parse("neg(x2)", &xy)?, parse("x1", &xy)?];
    let v = complete_lift(&flat, &rotation)?;
    println!("rotation: |L g| = {:.2e}", killing_residual(&g, &v, &p, false)?.residual);

    let k = vec![parse("x1^2", &xy)?, parse("x1*x2", &xy)?];
    let f = parse("x1", &xy)?;
    let (v, factor) = conformal_walker_lift(&flat, &k, &f, 1e-9)?;
    let r = killing_residual(&g, &v, &p, true)?;
    println!(
        "projective field: |L g - s g| = {:.2e}, fitted s = {:.6}, expected {factor} = {:.6}",
        r.residual,
        r.factor,
        factor.eval(&p)?
    );

    let bad = vec![parse("x1^2", &xy)?, parse("0", &xy)?];
    println!("(x1^2, 0) projective defect: {:.6}", projective_defect(&flat, &bad)?);
    if let Err(e) = conformal_walker_lift(&flat, &bad, &f, 1e-9) {
        println!("refused: {e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
