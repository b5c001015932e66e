//! Self-dual Einstein lift of an arbitrary projective structure.

use asdlift::checks::{run_checks, CheckKind, CheckSpec, Subject};
use asdlift::gallery::random_connection;
use asdlift::lift::{einstein_lift, symplectic_form};
use asdlift::sampling::SampleBox;
use asdlift::Connection;

pub fn run() -> asdlift::Result<()> {
    let explicit = Connection::parse(
        &["x1", "x2"],
        &[("a", 0.3)],
        &[((0, 0, 0), "a*x2"), ((1, 0, 1), "sin(x1)"), ((0, 1, 1), "x1*x2")],
    )?;
    for (name, conn) in [("explicit", explicit), ("random", random_connection(42, 2)?)] {
        let lambda = -1.5;
        let g = einstein_lift(&conn, lambda)?;
        let mut subject = Subject::new(name, g.clone());
        subject.omega = Some(symplectic_form(&g)?);
        let specs: Vec<CheckSpec> = [
            CheckKind::Scalar(-24.0 * lambda),
            CheckKind::Einstein(Some(lambda)),
            CheckKind::SelfDualWeyl,
            CheckKind::MixedBlock,
            CheckKind::ParallelFiber,
            CheckKind::OmegaClosed,
            CheckKind::ParaStructure,
            CheckKind::Signature,
        ]
        .into_iter()
        .map(CheckSpec::new)
        .collect();
        let points = subject.sample(10, 7, SampleBox::default())?;
        println!("{name}:");
        for entry in run_checks(&subject, &specs, &points)? {
            println!("  {entry}");
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
