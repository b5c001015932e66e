//! Projectively equivalent connections give isometric lifts: the change
//! `G -> G + d U + U d` is absorbed by a shift of the fibre coordinates.

use asdlift::expr::parse;
use asdlift::gallery::random_connection;
use asdlift::lift::{einstein_lift, gauge_shift};

pub fn run() -> asdlift::Result<()> {
    let conn = random_connection(5, 2)?;
    let f = parse("x1^2*x2 + cos(x1)", &["x1", "x2"])?;
    let upsilon = vec![f.diff(0), f.diff(1)];
    let lambda = 0.8;

    let changed = einstein_lift(&conn.projective_change(&upsilon)?, lambda)?;
    let shifted = gauge_shift(&einstein_lift(&conn, lambda)?, &upsilon, lambda)?;

    let mut worst: f64 = 0.0;
    for p in [[0.1, 0.2, -0.3, 0.4], [-0.7, 0.5, 0.9, -0.2], [0.3, -0.8, 0.0, 0.6]] {
        for (a, b) in changed.components().iter().zip(shifted.components()) {
            worst = worst.max((a.eval(&p)? - b.eval(&p)?).abs());
        }
    }
    println!("max |g(G + U) - shift^* g(G)| = {worst:.3e}");
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
