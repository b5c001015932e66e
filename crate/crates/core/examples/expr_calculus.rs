//! The expression language: parse, differentiate, print and evaluate.

use asdlift::expr::{parse, Tape};

pub fn run() -> asdlift::Result<()> {
    let vars = ["x1", "x2"];
    let f = parse("x1^2*sin(x2) + exp(x1*x2)/(1 + x2^2)", &vars)?;
    let fx = f.diff(0);
    let fxy = fx.diff(1);
    println!("f       = {f}");
    println!("df/dx1  = {fx}");
    println!("d2f     = {fxy}");

    let p = [0.4, -1.1];
    let tape = Tape::new(&[f.clone(), fx.clone(), fxy.clone()]);
    let values = tape.eval(&p)?;
    println!("at {p:?}: f={:.12} fx={:.12} fxy={:.12}", values[0], values[1], values[2]);

    // printed forms parse back to the same function
    let again = parse(&fxy.to_string(), &vars)?;
    assert!((again.eval(&p)? - values[2]).abs() < 1e-12);

    // negative numbers are written with neg(...)
    let g = parse("neg(2)*x1 + x2^-1", &vars)?;
    println!("g(1, 4) = {}", g.eval(&[1.0, 4.0])?);

    match parse("x1 + * x2", &vars) {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    println!("division by zero: {}", parse("1/x1", &vars)?.eval(&[0.0, 1.0]).unwrap_err());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
