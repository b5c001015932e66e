//! Every example under `examples/` runs to completion.

#[allow(dead_code)]
#[path = "../examples/expr_calculus.rs"]
mod expr_calculus;

#[allow(dead_code)]
#[path = "../examples/flat_model.rs"]
mod flat_model;

#[allow(dead_code)]
#[path = "../examples/einstein_lift.rs"]
mod einstein_lift;

#[allow(dead_code)]
#[path = "../examples/gauge_invariance.rs"]
mod gauge_invariance;

#[allow(dead_code)]
#[path = "../examples/sl2_symmetry.rs"]
mod sl2_symmetry;

#[allow(dead_code)]
#[path = "../examples/ricci_flat.rs"]
mod ricci_flat;

#[allow(dead_code)]
#[path = "../examples/walker_symmetries.rs"]
mod walker_symmetries;

#[allow(dead_code)]
#[path = "../examples/twistor.rs"]
mod twistor;

#[allow(dead_code)]
#[path = "../examples/calderbank.rs"]
mod calderbank;

#[allow(dead_code)]
#[path = "../examples/higher_dimension.rs"]
mod higher_dimension;

#[allow(dead_code)]
#[path = "../examples/config_report.rs"]
mod config_report;

#[test]
fn expr_calculus_runs() {
    expr_calculus::run().unwrap();
}

#[test]
fn flat_model_runs() {
    flat_model::run().unwrap();
}

#[test]
fn einstein_lift_runs() {
    einstein_lift::run().unwrap();
}

#[test]
fn gauge_invariance_runs() {
    gauge_invariance::run().unwrap();
}

#[test]
fn sl2_symmetry_runs() {
    sl2_symmetry::run().unwrap();
}

#[test]
fn ricci_flat_runs() {
    ricci_flat::run().unwrap();
}

#[test]
fn walker_symmetries_runs() {
    walker_symmetries::run().unwrap();
}

#[test]
fn twistor_runs() {
    twistor::run().unwrap();
}

#[test]
fn calderbank_runs() {
    calderbank::run().unwrap();
}

#[test]
fn higher_dimension_runs() {
    higher_dimension::run().unwrap();
}

#[test]
fn config_report_runs() {
    config_report::run().unwrap();
}
