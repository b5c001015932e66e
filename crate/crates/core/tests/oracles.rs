//! Independent numerical oracles: central differences for derivatives and
//! jets, and numerically integrated flows for Lie derivatives.

use asdlift::expr::{parse, Expr};
use asdlift::gallery::{get_example, random_connection, Params};
use asdlift::lift::einstein_lift;
use asdlift::pseudoriemann::{killing_residual, metric_jet};
use asdlift::sampling::{sample_points, SampleBox};
use asdlift::Connection;

fn points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    sample_points(dim, count, seed, SampleBox::default(), |_| true).unwrap()
}

fn central(e: &Expr, p: &[f64], i: usize, h: f64) -> f64 {
    let mut a = p.to_vec();
    let mut b = p.to_vec();
    a[i] += h;
    b[i] -= h;
    (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h)
}

#[test]
fn symbolic_derivatives_match_central_differences() {
    let vars = ["x", "y", "z"];
    let cases = [
        "x^3*y - 2*z/(1 + x^2)",
        "exp(x*y)*sin(z) + cos(x - y)^2",
        "1/(x + y + 3)^2 + z^4/3",
        "sin(exp(x)/(2 + y^2))*z",
    ];
    for text in cases {
        let e = parse(text, &vars).unwrap();
        for p in points(3, 10, 1) {
            for i in 0..3 {
                let exact = e.diff(i).eval(&p).unwrap();
                let approx = central(&e, &p, i, 1e-6);
                assert!(
                    (exact - approx).abs() < 1e-6 * exact.abs().max(1.0),
                    "{text} d{i} at {p:?}: {exact} vs {approx}"
                );
            }
        }
    }
}

#[test]
fn second_derivatives_match_nested_differences() {
    let e = parse("x^2*exp(y) + sin(x*y)", &["x", "y"]).unwrap();
    for p in points(2, 10, 2) {
        for i in 0..2 {
            for j in 0..2 {
                let exact = e.diff(i).diff(j).eval(&p).unwrap();
                let approx = central(&e.diff(i), &p, j, 1e-6);
                assert!((exact - approx).abs() < 1e-6 * exact.abs().max(1.0));
            }
        }
    }
}

#[test]
fn metric_jets_match_differences_of_components() {
    let g = einstein_lift(&random_connection(4, 2).unwrap(), 1.5).unwrap();
    let d = g.dim();
    for p in points(d, 5, 3) {
        let jet = metric_jet(&g, &p).unwrap();
        for a in 0..d {
            for b in 0..d {
                let comp = g.component(a, b);
                assert_eq!(jet.g(a, b), comp.eval(&p).unwrap());
                for c in 0..d {
                    let fd = central(comp, &p, c, 1e-6);
                    assert!((jet.dg(c, a, b) - fd).abs() < 1e-6 * fd.abs().max(1.0));
                }
            }
        }
    }
}

/// State of the flow of `K` together with its first and second variations.
struct Flow {
    n: usize,
    k: Vec<Expr>,
    dk: Vec<Expr>,
    ddk: Vec<Expr>,
}

impl Flow {
    fn new(k: Vec<Expr>) -> Flow {
        let n = k.len();
        let dk = (0..n * n).map(|x| k[x / n].diff(x % n)).collect::<Vec<_>>();
        let ddk = (0..n * n * n).map(|x| dk[x / n].diff(x % n)).collect();
        Flow { n, k, dk, ddk }
    }

    fn rate(&self, s: &[f64]) -> Vec<f64> {
        let n = self.n;
        let x = &s[..n];
        let jac = &s[n..n + n * n];
        let hes = &s[n + n * n..];
        let dk: Vec<f64> = self.dk.iter().map(|e| e.eval(x).unwrap()).collect();
        let ddk: Vec<f64> = self.ddk.iter().map(|e| e.eval(x).unwrap()).collect();
        let mut out = vec![0.0; s.len()];
        for a in 0..n {
            out[a] = self.k[a].eval(x).unwrap();
            for i in 0..n {
                out[n + a * n + i] = (0..n).map(|b| dk[a * n + b] * jac[b * n + i]).sum();
                for j in 0..n {
                    let mut v = 0.0;
                    for b in 0..n {
                        v += dk[a * n + b] * hes[(b * n + i) * n + j];
                        for c in 0..n {
                            v += ddk[(a * n + b) * n + c] * jac[b * n + i] * jac[c * n + j];
                        }
                    }
                    out[n + n * n + (a * n + i) * n + j] = v;
                }
            }
        }
        out
    }

    /// `(phi_t(x), D phi_t, D^2 phi_t)` by classical Runge-Kutta.
    fn run(&self, x: &[f64], t: f64, steps: usize) -> Vec<f64> {
        let n = self.n;
        let mut s = vec![0.0; n + n * n + n * n * n];
        s[..n].copy_from_slice(x);
        for a in 0..n {
            s[n + a * n + a] = 1.0;
        }
        let h = t / steps as f64;
        let axpy = |s: &[f64], k: &[f64], c: f64| -> Vec<f64> {
            s.iter().zip(k).map(|(a, b)| a + c * b).collect()
        };
        for _ in 0..steps {
            let k1 = self.rate(&s);
            let k2 = self.rate(&axpy(&s, &k1, h / 2.0));
            let k3 = self.rate(&axpy(&s, &k2, h / 2.0));
            let k4 = self.rate(&axpy(&s, &k3, h));
            for m in 0..s.len() {
                s[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
            }
        }
        s
    }
}

fn pulled_back_symbols(conn: &Connection, flow: &Flow, x: &[f64], t: f64) -> Vec<f64> {
    let n = conn.dim();
    let s = flow.run(x, t, 20);
    let y = &s[..n];
    let jac = nalgebra::DMatrix::from_row_slice(n, n, &s[n..n + n * n]);
    let inv = jac.clone().try_inverse().unwrap();
    let hes = &s[n + n * n..];
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for a in 0..n {
                    let mut inner = hes[(a * n + i) * n + j];
                    for b in 0..n {
                        for c in 0..n {
                            inner += conn.gamma(a, b, c).eval(y).unwrap() * jac[(b, i)] * jac[(c, j)];
                        }
                    }
                    v += inv[(k, a)] * inner;
                }
                out[(k * n + i) * n + j] = v;
            }
        }
    }
    out
}

#[test]
fn lie_derivative_of_a_connection_matches_the_flow() {
    let xy = ["x1", "x2"];
    let conn = random_connection(12, 2).unwrap();
    let k: Vec<Expr> = ["x1*x2 + 0.5", "x1^2 - x2/3"].iter().map(|t| parse(t, &xy).unwrap()).collect();
    let flow = Flow::new(k.clone());
    let lie = conn.lie_derivative(&k).unwrap();
    let t = 1e-3;
    for x in points(2, 4, 5) {
        let x: Vec<f64> = x.iter().map(|v| 0.5 * v).collect();
        let plus = pulled_back_symbols(&conn, &flow, &x, t);
        let minus = pulled_back_symbols(&conn, &flow, &x, -t);
        let exact = lie.at(&x).unwrap().tensor.data;
        for m in 0..8 {
            let fd = (plus[m] - minus[m]) / (2.0 * t);
            assert!((fd - exact[m]).abs() < 1e-5 * exact[m].abs().max(1.0), "slot {m}: {fd} vs {}", exact[m]);
        }
    }
}

#[test]
fn lie_derivative_of_the_metric_matches_the_flow() {
    let e = get_example("sl2", &Params::default()).unwrap();
    let g = e.metric();
    let vars = ["x1", "x2", "xi1", "xi2"];
    let v: Vec<Expr> = ["x2", "x1*xi1", "0.3", "xi2*x1 - 1"].iter().map(|t| parse(t, &vars).unwrap()).collect();
    let flow = Flow::new(v.clone());
    let t = 1e-3;
    for p in e.subject.sample(3, 8, SampleBox { lo: -0.7, hi: 0.7 }).unwrap() {
        let pull = |t: f64| -> Vec<f64> {
            let s = flow.run(&p, t, 20);
            let y = &s[..4];
            let jac = &s[4..20];
            let gy: Vec<f64> = g.components().iter().map(|c| c.eval(y).unwrap()).collect();
            let mut out = vec![0.0; 16];
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            out[a * 4 + b] += gy[c * 4 + d] * jac[c * 4 + a] * jac[d * 4 + b];
                        }
                    }
                }
            }
            out
        };
        let (plus, minus) = (pull(t), pull(-t));
        let fd = (0..16).map(|m| ((plus[m] - minus[m]) / (2.0 * t)).abs()).fold(0.0, f64::max);
        let exact = killing_residual(g, &v, &p, false).unwrap().residual;
        assert!((fd - exact).abs() < 1e-5 * exact.max(1.0), "{fd} vs {exact}");
        assert!(exact > 1e-2);
    }
}
