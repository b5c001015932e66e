//! Integrability of the twistor distribution of Walker-type lifts.

use asdlift::gallery::random_pair;
use asdlift::lift::{einstein_lift, modified_walker};
use asdlift::twistor::{chart_point, spray_for, Chart, TwistorPair};

pub fn run() -> asdlift::Result<()> {
    let (conn, m) = random_pair(3)?;
    let families = [
        ("einstein", einstein_lift(&conn, 1.2)?),
        ("modified walker", modified_walker(&conn, &m)?),
    ];
    let base = [0.2, -0.4, 0.6, 0.3];
    for (name, g) in &families {
        let pair = TwistorPair::geometric(&spray_for(g)?)?;
        for chart in [Chart::Affine, Chart::Infinity] {
            for t in [-0.6, 0.45] {
                let q = chart_point(&base, chart, t);
                let span = pair.span(&q)?;
                let (resid, coeff) = pair.certificate(&q)?;
                println!(
                    "{name:<16} {chart:?} t={t:+.2}: [Theta, phi] = {:+.4} phi, fit {resid:.1e}, coefficient error {:.1e}",
                    span.beta,
                    coeff.unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
