//! The lift of the flat projective structure on the plane.

use asdlift::gallery::{get_example, verify_example, Params};
use asdlift::pseudoriemann::{curvature_suite, signature, weyl_blocks, weyl_norm_squared};
use asdlift::report::to_text;

pub fn run() -> asdlift::Result<()> {
    for lambda in [1.0, -0.5] {
        let e = get_example("flat", &Params { lambda: Some(lambda), ..Default::default() })?;
        let s = curvature_suite(e.metric(), &[0.2, -0.3, 0.7, 0.1])?;
        let b = weyl_blocks(&s)?;
        println!(
            "lambda={lambda}: scal={:.6} (-24 lambda = {}) |C|^2={:.6} C+={:.1e} C-={:.4} signature={:?}",
            s.scalar,
            -24.0 * lambda,
            weyl_norm_squared(&s),
            b.self_dual_weyl,
            b.anti_self_dual_weyl,
            signature(&s.metric)
        );
    }
    let e = get_example("flat", &Params::default())?;
    print!("{}", to_text(&verify_example(&e, 8, 1)?));
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
