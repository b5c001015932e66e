//! A cohomogeneity-one example with three Killing fields.

use asdlift::gallery::{get_example, verify_example, Params};
use asdlift::pseudoriemann::killing_residual;
use asdlift::report::to_text;
use asdlift::sampling::SampleBox;
use asdlift::symmetry::lie_bracket;

pub fn run() -> asdlift::Result<()> {
    let e = get_example("sl2", &Params { c: Some(2.0), lambda: Some(-1.0), ..Default::default() })?;
    let points = e.subject.sample(5, 3, SampleBox { lo: -0.8, hi: 0.8 })?;
    for field in e.fields() {
        let worst = points
            .iter()
            .map(|p| killing_residual(e.metric(), &field.components, p, false).map(|r| r.residual))
            .collect::<asdlift::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let text: Vec<String> = field.components.iter().map(|c| c.to_string()).collect();
        println!("{} = ({})  |L g| = {worst:.2e}", field.name, text.join(", "));
    }
    let f = e.fields();
    let br = lie_bracket(&f[1].components, &f[2].components)?;
    let text: Vec<String> = br.iter().map(|c| c.to_string()).collect();
    println!("[K2, K3] = ({})", text.join(", "));
    print!("{}", to_text(&verify_example(&e, 6, 3)?));
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
