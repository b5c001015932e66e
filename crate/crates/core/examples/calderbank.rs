//! Residuals of the Calderbank equations and of their prolongation for an
//! explicit abelian solution over the flat plane.

use asdlift::expr::{parse, Expr};
use asdlift::twistor::{calderbank_residual, prolongation_check, CalderbankData, MatField};
use asdlift::Connection;

fn matrix(entries: &[&str]) -> asdlift::Result<MatField> {
    let entries = entries
        .iter()
        .map(|t| parse(t, &["x1", "x2"]).map_err(Into::into))
        .collect::<asdlift::Result<Vec<Expr>>>()?;
    Ok(MatField { size: 2, entries })
}

fn data(eps: f64) -> asdlift::Result<CalderbankData> {
    Ok(CalderbankData {
        conn: Connection::flat(&["x1", "x2"]),
        a: [MatField::zeros(2), matrix(&["x1", "0", "0", "neg(x1)"])?],
        phi: [
            matrix(&["x2", "0", "0", "neg(x2)"])?.add(&matrix(&["0", "x1", "0", "0"])?.scale(eps)),
            matrix(&["neg(x1)", "0", "0", "x1"])?,
        ],
    })
}

pub fn run() -> asdlift::Result<()> {
    let x = [0.4, -0.7];
    for eps in [0.0, 0.1] {
        let d = data(eps)?;
        let pr = prolongation_check(&d, &Expr::zero(), &x)?;
        println!(
            "eps={eps}: |D(phi)| = {:.2e}  closure {:.2e}  derivative {:.2e}  integrability {:.2e}",
            calderbank_residual(&d, &x)?,
            pr.closure_residual,
            pr.derivative_residual,
            pr.integrability_residual
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
