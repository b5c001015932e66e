//! The nine acceptance criteria. Runs without the libtest harness so that
//! every criterion prints its PASS/FAIL line even when an earlier one fails.

use std::time::Instant;

use asdlift::checks::{run_checks, CheckKind, CheckSpec, Subject};
use asdlift::expr::{parse, Expr};
use asdlift::gallery::{get_example, random_connection, random_pair, sl2_connection, Params};
use asdlift::lift::{einstein_lift, gauge_shift, modified_walker, symplectic_form, walker_lift};
use asdlift::projective::Connection;
use asdlift::pseudoriemann::{
    curvature_suite, einstein_residual, form_covariant_derivative, form_lie_residual,
    killing_residual, parallel_fiber_residual, weyl_blocks, weyl_norm_squared,
};
use asdlift::sampling::{sample_points, SampleBox};
use asdlift::symmetry::{complete_lift, conformal_walker_lift, killing_lift, projective_defect};
use asdlift::twistor::{
    chart_point, prolongation_check, spray_for, CalderbankData, Chart, MatField, TwistorPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XY: &[&str] = &["x1", "x2"];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { pass: true, lines: Vec::new() }
    }

    /// Records `value <= tol` (or `value > tol` for a control).
    fn below(&mut self, what: &str, value: f64, tol: f64) {
        let ok = value <= tol;
        self.pass &= ok;
        self.lines.push(format!("{} {what}: {value:.3e} <= {tol:.0e}", mark(ok)));
    }

    fn above(&mut self, what: &str, value: f64, floor: f64) {
        let ok = value > floor;
        self.pass &= ok;
        self.lines.push(format!("{} {what}: {value:.3e} > {floor:.0e}", mark(ok)));
    }

    fn holds(&mut self, what: &str, ok: bool, detail: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}: {detail}", mark(ok)));
    }

    fn note(&mut self, text: String) {
        self.lines.push(format!("     {text}"));
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "  ok"
    } else {
        "  NO"
    }
}

fn points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    sample_points(dim, count, seed, SampleBox::default(), |_| true).unwrap()
}

fn field(texts: &[&str], vars: &[&str]) -> Vec<Expr> {
    texts.iter().map(|t| parse(t, vars).unwrap()).collect()
}

fn criterion_01() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let flat = Connection::flat(XY);
    let (mut scalar, mut weyl): (f64, f64) = (0.0, 0.0);
    for lambda in [1.0, -1.0, 2.0] {
        let g = einstein_lift(&flat, lambda).unwrap();
        for p in points(4, 20, 101) {
            let s = curvature_suite(&g, &p).unwrap();
            scalar = scalar.max((s.scalar + 24.0 * lambda).abs());
            weyl = weyl.max(s.weyl.max_abs());
        }
    }
    o.below("scalar + 24 lambda, lambda in {1,-1,2}, 20 points", scalar, 1e-9);
    o.below("full Weyl tensor (conformal flatness)", weyl, 1e-10);
    let g = einstein_lift(&flat, 1.0).unwrap();
    let b = weyl_blocks(&curvature_suite(&g, &[0.3, -0.2, 0.5, 0.4]).unwrap()).unwrap();
    o.note(format!(
        "C+ = {:.1e}, C- = {:.3e}: the lift is ASD but not conformally flat",
        b.self_dual_weyl, b.anti_self_dual_weyl
    ));
    let secs = start.elapsed().as_secs_f64();
    o.below("runtime [s]", secs, 1.0);
    o
}

fn criterion_02() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (mut ein, mut sd, mut mixed, mut par): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for seed in 1..=10 {
        let conn = random_connection(seed, 2).unwrap();
        for lambda in [1.0, -0.5, 2.0] {
            let g = einstein_lift(&conn, lambda).unwrap();
            for p in points(4, 10, 200 + seed) {
                let s = curvature_suite(&g, &p).unwrap();
                let b = weyl_blocks(&s).unwrap();
                ein = ein.max(einstein_residual(&s, Some(lambda)));
                sd = sd.max(b.self_dual_weyl);
                mixed = mixed.max(b.mixed);
                par = par.max(parallel_fiber_residual(&s));
            }
        }
    }
    o.below("|Ric + 6 lambda g|", ein, 1e-8);
    o.below("|C+|", sd, 1e-8);
    o.below("mixed block", mixed, 1e-8);
    o.below("parallel distribution", par, 1e-9);
    o.below("runtime [s]", start.elapsed().as_secs_f64(), 20.0);
    o
}

fn criterion_03() -> Outcome {
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    for seed in 1..=10 {
        let conn = random_connection(seed, 2).unwrap();
        let f = random_connection(1000 + seed, 2).unwrap().symbols()[0].clone();
        let upsilon = vec![f.diff(0), f.diff(1)];
        let changed = conn.projective_change(&upsilon).unwrap();
        for lambda in [1.0, 2.0] {
            let shifted = gauge_shift(&einstein_lift(&conn, lambda).unwrap(), &upsilon, lambda).unwrap();
            let expected = einstein_lift(&changed, lambda).unwrap();
            for p in points(4, 20, 300 + seed) {
                for (a, b) in shifted.components().iter().zip(expected.components()) {
                    worst = worst.max((a.eval(&p).unwrap() - b.eval(&p).unwrap()).abs());
                }
            }
        }
    }
    o.below("gauge shift vs lift of the changed connection", worst, 1e-9);
    o
}

fn criterion_04() -> Outcome {
    let mut o = Outcome::new();
    let lambda = -1.0;
    let e = get_example("sl2", &Params { lambda: Some(lambda), c: Some(1.0), ..Default::default() }).unwrap();
    let pts = e.subject.sample(10, 400, SampleBox::default()).unwrap();
    let g = e.metric();
    let target = 96.0 * lambda * lambda;
    let mut rel: f64 = 0.0;
    let mut ratios = Vec::new();
    for p in &pts {
        let w = weyl_norm_squared(&curvature_suite(g, p).unwrap());
        rel = rel.max(((w - target) / target).abs());
        ratios.push(w / target);
    }
    o.below("|C|^2 = 96 lambda^2, relative", rel, 1e-6);
    o.note(format!("|C|^2 / 96 lambda^2 ranges over [{:.12}, {:.12}]",
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)));
    let conn = e.connection().unwrap();
    let omega = symplectic_form(g).unwrap();
    let (mut kill, mut symp, mut printed): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for sym in e.fields() {
        let lifted = killing_lift(conn, sym.base.as_ref().unwrap(), lambda, 1e-8).unwrap();
        for p in &pts {
            kill = kill.max(killing_residual(g, &lifted, p, false).unwrap().residual);
            symp = symp.max(form_lie_residual(&omega, &lifted, p).unwrap());
            for (a, b) in lifted.iter().zip(&sym.components) {
                printed = printed.max((a.eval(p).unwrap() - b.eval(p).unwrap()).abs());
            }
        }
    }
    o.below("Killing residual of the lifts of K1, K2, K3", kill, 1e-8);
    o.below("symplectic residual L_K omega", symp, 1e-8);
    o.below("lifted fields vs the printed K1, K2, K3", printed, 1e-12);
    let c = 1.0;
    let ode = sl2_connection(c).unwrap().ode_coefficients().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut ode_err: f64 = 0.0;
    for _ in 0..20 {
        let (x, y, yp): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let at = [x, y];
        let rhs: f64 = (0..4).map(|k| ode[k].eval(&at).unwrap() * yp.powi(3 - k as i32)).sum();
        let expected = c * (x * yp - y).powi(3);
        ode_err = ode_err.max((rhs - expected).abs() / expected.abs().max(1.0));
    }
    o.below("geodesic ODE vs c (x y' - y)^3", ode_err, 1e-12);
    o
}

fn ricci_flat_and_asd(o: &mut Outcome, name: &str, subject: &Subject) {
    let pts = subject.sample(20, 500, SampleBox::default()).unwrap();
    let (mut ric, mut sd): (f64, f64) = (0.0, 0.0);
    for p in &pts {
        let s = curvature_suite(&subject.metric, p).unwrap();
        ric = ric.max(s.ricci.max_abs());
        sd = sd.max(weyl_blocks(&s).unwrap().self_dual_weyl);
    }
    o.below(&format!("{name}: full Ricci"), ric, 1e-9);
    o.below(&format!("{name}: C+"), sd, 1e-8);
    let pair = TwistorPair::geometric(&spray_for(&subject.metric).unwrap()).unwrap();
    let mut tw: f64 = 0.0;
    for p in &pts {
        for chart in [Chart::Affine, Chart::Infinity] {
            let (res, coef) = pair.certificate(&chart_point(p, chart, 0.37)).unwrap();
            tw = tw.max(res).max(coef.unwrap_or(0.0));
        }
    }
    o.below(&format!("{name}: twistor bracket"), tw, 1e-9);
}

fn criterion_05() -> Outcome {
    let mut o = Outcome::new();
    let skew = get_example("skew", &Params { lambda: Some(0.0), f: Some("x1*x2".into()), ..Default::default() }).unwrap();
    ricci_flat_and_asd(&mut o, "skew, f = x1 x2", &skew.subject);
    let sub = get_example("submaximal", &Params { m: Some(1.0), ..Default::default() }).unwrap();
    ricci_flat_and_asd(&mut o, "submaximal, m = 1", &sub.subject);
    o
}

fn criterion_06() -> Outcome {
    let mut o = Outcome::new();
    let flat = Connection::flat(XY);
    let walker = walker_lift(&flat);
    let pts = points(4, 20, 600);
    for (name, k) in [("d1", ["1", "0"]), ("x1 d1 - x2 d2", ["x1", "neg(x2)"])] {
        let lifted = complete_lift(&flat, &field(&k, XY)).unwrap();
        let worst = pts
            .iter()
            .map(|p| killing_residual(&walker, &lifted, p, false).unwrap().residual)
            .fold(0.0, f64::max);
        o.below(&format!("complete lift of {name} on the Walker lift"), worst, 1e-9);
    }
    let k = field(&["x1^2", "0"], XY);
    let defect = projective_defect(&flat, &k).unwrap();
    o.below("(x1)^2 d1 satisfies the projective equation", defect, 1e-9);
    let lie = flat.lie_derivative(&k).unwrap();
    let rho: Vec<String> = (0..2).map(|i| lie.rho[i].to_string()).collect();
    o.note(format!("extracted trace form rho = ({}, {})", rho[0], rho[1]));
    let f = parse("x1", XY).unwrap();
    match conformal_walker_lift(&flat, &k, &f, 1e-9) {
        Ok((v, _)) => {
            let (mut res, mut factor): (f64, f64) = (0.0, 0.0);
            for p in &pts {
                let r = killing_residual(&walker, &v, p, true).unwrap();
                res = res.max(r.residual);
                factor = factor.max((r.factor - f.eval(p).unwrap()).abs());
            }
            o.below("conformal residual", res, 1e-9);
            o.below("recovered factor vs f", factor, 1e-8);
        }
        Err(e) => o.holds("conformal lift of (x1)^2 d1", false, format!("rejected: {e}")),
    }
    let projective = field(&["x1^2", "x1*x2"], XY);
    let (v, _) = conformal_walker_lift(&flat, &projective, &f, 1e-9).unwrap();
    let (mut res, mut factor): (f64, f64) = (0.0, 0.0);
    for p in &pts {
        let r = killing_residual(&walker, &v, p, true).unwrap();
        res = res.max(r.residual);
        factor = factor.max((r.factor - 2.0 * f.eval(p).unwrap()).abs());
    }
    o.note(format!(
        "for comparison, (x1)^2 d1 + x1 x2 d2 (rho = dx1, f = x1): residual {res:.1e}, \
         factor = 2 f to {factor:.1e}"
    ));
    o
}

fn nilpotent_solution(eps: f64) -> CalderbankData {
    let flat = Connection::flat(XY);
    let v = |t: &[&str]| MatField { size: 2, entries: field(t, XY) };
    let (a1, a2) = (0.5, -0.3);
    let u = v(&["1", "0.5*x1 - 0.3*x2", "0", "1"]);
    let u_inv = v(&["1", "neg(0.5*x1 - 0.3*x2)", "0", "1"]);
    let psi1 = v(&["x2", "1", "0", "neg(x2)"]);
    let psi2 = v(&["neg(x1)", "0", "0", "x1"]);
    let conj = |m: &MatField| u.mul(m).mul(&u_inv);
    let kick = v(&["0", "0", "x1", "0"]).scale(eps);
    CalderbankData {
        conn: flat,
        a: [
            MatField::from_constants(2, &[0.0, a1, 0.0, 0.0]),
            MatField::from_constants(2, &[0.0, a2, 0.0, 0.0]),
        ],
        phi: [conj(&psi1).add(&kick), conj(&psi2)],
    }
}

fn abelian_gauge_solution(eps: f64) -> CalderbankData {
    let v = |t: &[&str]| MatField { size: 2, entries: field(t, XY) };
    CalderbankData {
        conn: Connection::flat(XY),
        a: [MatField::zeros(2), v(&["x1", "0", "0", "neg(x1)"])],
        phi: [
            v(&["x2", "0", "0", "neg(x2)"]).add(&v(&["0", "x1", "0", "0"]).scale(eps)),
            v(&["neg(x1)", "0", "0", "x1"]),
        ],
    }
}

/// Levi-Civita connection of `dx^2 + e^{2x} dy^2` with the Killing form
/// `e^{2x} dy`, in a one-dimensional Lie algebra.
fn hyperbolic_solution(eps: f64) -> CalderbankData {
    let conn = Connection::parse(XY, &[], &[((0, 1, 1), "neg(exp(2*x1))"), ((1, 0, 1), "1")]).unwrap();
    let one = |t: &str| MatField { size: 1, entries: field(&[t], XY) };
    CalderbankData {
        conn,
        a: [one("0"), one("0")],
        phi: [one("x2").scale(eps), one("exp(2*x1)")],
    }
}

fn criterion_07() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let (mut span, mut coef, mut conditioning): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for seed in 1..=10 {
        let (conn, m) = random_pair(seed).unwrap();
        let g = modified_walker(&conn, &m).unwrap();
        let pair = TwistorPair::geometric(&spray_for(&g).unwrap()).unwrap();
        for p in points(4, 10, 700 + seed) {
            for chart in [Chart::Affine, Chart::Infinity] {
                let q = chart_point(&p, chart, rng.gen_range(-1.0..1.0));
                let s = pair.span(&q).unwrap();
                let (_, err) = pair.certificate(&q).unwrap();
                span = span.max(s.residual);
                coef = coef.max(err.unwrap());
                conditioning = conditioning.min(s.conditioning);
            }
        }
    }
    o.below("bracket-span residual, both charts", span, 1e-9);
    o.below("coefficient vs -pi^j G^k_jk + pi^j xi_j", coef, 1e-9);
    o.note(format!("smallest span conditioning {conditioning:.2e}"));
    let zero = Expr::zero();
    let h = parse("x1", XY).unwrap();
    let cases: [(&str, fn(f64) -> CalderbankData, &Expr); 3] = [
        ("nilpotent gauge", nilpotent_solution, &zero),
        ("abelian gauge", abelian_gauge_solution, &zero),
        ("hyperbolic plane", hyperbolic_solution, &h),
    ];
    let pts = points(2, 10, 777);
    for (name, build, h) in cases {
        let (mut closure, mut integ): (f64, f64) = (0.0, 0.0);
        let exact = build(0.0);
        for x in &pts {
            let pr = prolongation_check(&exact, h, x).unwrap();
            closure = closure.max(pr.closure_residual).max(pr.derivative_residual);
            integ = integ.max(pr.integrability_residual);
        }
        o.below(&format!("{name}: closure"), closure, 1e-9);
        o.below(&format!("{name}: integrability"), integ, 1e-9);
        let perturbed = build(0.1);
        let (mut closure, mut integ): (f64, f64) = (f64::INFINITY, 0.0);
        for x in &pts {
            let pr = prolongation_check(&perturbed, h, x).unwrap();
            closure = closure.min(pr.closure_residual);
            integ = integ.max(pr.integrability_residual.max(pr.derivative_residual));
        }
        o.above(&format!("{name}, perturbed: closure at every point"), closure, 1e-3);
        o.above(&format!("{name}, perturbed: prolongation"), integ, 1e-3);
    }
    o
}

fn criterion_08() -> Outcome {
    let mut o = Outcome::new();
    let coords = ["x1", "x2", "x3"];
    for (name, conn) in [
        ("flat", Connection::flat(&coords)),
        ("random", random_connection(8, 3).unwrap()),
    ] {
        let g = einstein_lift(&conn, 1.0).unwrap();
        let subject = Subject::new(name, g);
        let specs = [
            CheckSpec::new(CheckKind::Einstein(None)),
            CheckSpec::new(CheckKind::ScalarSpread),
        ];
        let pts = points(6, 10, 800);
        let r = run_checks(&subject, &specs, &pts).unwrap();
        o.below(&format!("{name}: |Ric - scal/6 g|"), r[0].max_residual, 1e-7);
        o.below(&format!("{name}: scalar spread"), r[1].max_residual, 1e-8);
        let s = curvature_suite(&subject.metric, &pts[0]).unwrap();
        o.note(format!("{name}: scalar curvature at lambda = 1 is {:.12}", s.scalar));
    }
    o
}

fn criterion_09() -> Outcome {
    let mut o = Outcome::new();
    use CheckKind::*;
    let kinds = [
        Bianchi,
        WeylTraceFree,
        JetFiniteDifference,
        DetConstant,
        HodgeSquare,
        ParaStructure,
        OmegaClosed,
    ];
    let specs: Vec<CheckSpec> = kinds.iter().cloned().map(CheckSpec::new).collect();
    let mut worst = vec![0.0f64; specs.len()];
    for seed in 1..=3 {
        let conn = random_connection(900 + seed, 2).unwrap();
        let g = einstein_lift(&conn, 1.5).unwrap();
        let mut subject = Subject::new("random", g.clone());
        subject.omega = Some(symplectic_form(&g).unwrap());
        let pts = subject.sample(8, 900 + seed, SampleBox::default()).unwrap();
        for (k, e) in run_checks(&subject, &specs, &pts).unwrap().iter().enumerate() {
            worst[k] = worst[k].max(e.max_residual);
        }
    }
    for (spec, w) in specs.iter().zip(&worst) {
        o.below(&spec.name, *w, spec.tolerance);
    }
    let at = [0.3, -0.4];
    let p4 = [0.3, -0.4, 0.6, 0.2];
    for (name, conn, lambda, expect_zero) in [
        ("flat", Connection::flat(XY), 1.0, true),
        ("sl2 c = 1", sl2_connection(1.0).unwrap(), -1.0, false),
    ] {
        let l = conn.liouville(&at).unwrap();
        let liouville = l[0].abs().max(l[1].abs());
        let g = einstein_lift(&conn, lambda).unwrap();
        let nabla = form_covariant_derivative(&g, &symplectic_form(&g).unwrap(), &p4)
            .unwrap()
            .max_abs();
        let ok = if expect_zero {
            liouville < 1e-12 && nabla < 1e-12
        } else {
            liouville > 1e-3 && nabla > 1e-3
        };
        o.holds(
            &format!("{name}: Liouville and nabla omega both {}", if expect_zero { "zero" } else { "non-zero" }),
            ok,
            format!("|l| = {liouville:.3e}, |nabla omega| = {nabla:.3e}"),
        );
    }
    o
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flat model", criterion_01),
        ("main theorem suite", criterion_02),
        ("gauge invariance", criterion_03),
        ("sl2 golden values", criterion_04),
        ("Ricci-flat limits", criterion_05),
        ("Walker propositions", criterion_06),
        ("twistor and Calderbank", criterion_07),
        ("higher dimension", criterion_08),
        ("property suites", criterion_09),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        println!(
            "{} criterion {} ({name}) [{:.2} s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            k + 1,
            t.elapsed().as_secs_f64()
        );
        for line in &outcome.lines {
            println!("{line}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria pass [{:.2} s]",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
