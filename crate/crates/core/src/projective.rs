//! Torsion-free affine connections on an n-dimensional base, their curvature
//! and the projectively invariant data built from them.
//!
//! Index conventions: `gamma(k, i, j)` is the Christoffel symbol with upper index
//! `k`, and
//!
//! ```text
//! R_ij^k_l = d_i G^k_jl - d_j G^k_il + G^k_im G^m_jl - G^k_jm G^m_il
//! Ric_jl   = R_ij^i_l
//! ```
//!
//! The projective Schouten tensor is `Ric_(ij) + Ric_[ij]/3` on surfaces and
//! `Ric_(ij)/(n-1) + Ric_[ij]/(n+1)` in general.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{parse_bound, sum, Expr, Tape};
use crate::tensor::{Slot, TensorValue};

#[derive(Debug, Clone)]
pub struct Connection {
    coords: Vec<String>,
    gamma: Vec<Expr>,
    derived: Arc<OnceLock<Derived>>,
}

#[derive(Debug)]
struct Derived {
    riemann: Vec<Expr>,
    ricci: Vec<Expr>,
    schouten: Vec<Expr>,
    tape: Tape,
}

/// Components of the connection curvature at one base point.
#[derive(Debug, Clone)]
pub struct ConnectionCurvature {
    /// `R_ij^k_l`
    pub riemann: TensorValue,
    pub ricci: TensorValue,
    pub schouten: TensorValue,
    /// `beta_ij = P_ji - P_ij`
    pub beta: TensorValue,
    /// Projective Weyl tensor, only present for `n >= 3`.
    pub weyl: Option<TensorValue>,
}

/// Symbolic Lie derivative of a connection along a base vector field.
#[derive(Debug, Clone)]
pub struct LieDerivative {
    pub n: usize,
    /// `(L_K G)^k_ij` at `(k*n + i)*n + j`
    pub components: Vec<Expr>,
    /// Trace one-form `rho_j = (L_K G)^k_kj / (n+1)`
    pub rho: Vec<Expr>,
    /// `(L_K G)^k_ij - d^k_i rho_j - d^k_j rho_i`
    pub defect: Vec<Expr>,
}

#[derive(Debug, Clone)]
pub struct LieDerivativeValue {
    pub tensor: TensorValue,
    pub rho: Vec<f64>,
    pub residual: f64,
}

pub(crate) fn idx3(n: usize, k: usize, i: usize, j: usize) -> usize {
    (k * n + i) * n + j
}

pub(crate) fn idx4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

// Fixed probe points used to check symmetry of the lower indices.
const PROBES: [f64; 6] = [0.31, -0.72, 0.55, 0.13, -0.41, 0.87];

fn probe(n: usize, shift: usize) -> Vec<f64> {
    (0..n).map(|i| PROBES[(i + shift) % PROBES.len()]).collect()
}

impl Connection {
    /// Build from all `n^3` symbols, ordered `G^k_ij` at `(k*n + i)*n + j`.
    pub fn new(coords: Vec<String>, gamma: Vec<Expr>) -> Result<Connection> {
        let n = coords.len();
        if n < 2 {
            return Err(Error::Invalid("the base needs at least two coordinates".into()));
        }
        if gamma.len() != n * n * n {
            return Err(Error::Invalid(format!(
                "expected {} Christoffel symbols, got {}",
                n * n * n,
                gamma.len()
            )));
        }
        if let Some(e) = gamma.iter().find(|e| e.max_var_index().is_some_and(|i| i >= n)) {
            return Err(Error::Invalid(format!("`{e}` uses a variable outside the base")));
        }
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = &gamma[idx3(n, k, i, j)];
                    let b = &gamma[idx3(n, k, j, i)];
                    for shift in 0..4 {
                        let p = probe(n, shift);
                        if let (Ok(u), Ok(v)) = (a.eval(&p), b.eval(&p)) {
                            if (u - v).abs() > 1e-12 * (1.0 + u.abs()) {
                                return Err(Error::Invalid(format!(
                                    "connection has torsion: G^{k}_{i}{j} != G^{k}_{j}{i} (0-based)"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(Connection {
            coords,
            gamma,
            derived: Arc::new(OnceLock::new()),
        })
    }

    /// Build from entries `((k, i, j), text)` with 0-based indices; the entry
    /// `(k, j, i)` is filled in by symmetry and missing symbols are zero.
    pub fn parse(
        coords: &[&str],
        params: &[(&str, f64)],
        entries: &[((usize, usize, usize), &str)],
    ) -> Result<Connection> {
        let n = coords.len();
        let mut gamma: Vec<Option<Expr>> = vec![None; n * n * n];
        for &((k, i, j), text) in entries {
            if k >= n || i >= n || j >= n {
                return Err(Error::Invalid(format!("symbol index ({k},{i},{j}) out of range")));
            }
            let e = parse_bound(text, coords, params)?;
            for slot in [idx3(n, k, i, j), idx3(n, k, j, i)] {
                match &gamma[slot] {
                    Some(prev) if i != j && !same_values(prev, &e, n) => {
                        return Err(Error::Invalid(format!(
                            "G^{k}_{i}{j} and G^{k}_{j}{i} differ (0-based)"
                        )));
                    }
                    _ => gamma[slot] = Some(e.clone()),
                }
            }
        }
        let gamma = gamma.into_iter().map(|g| g.unwrap_or_else(Expr::zero)).collect();
        Connection::new(coords.iter().map(|s| s.to_string()).collect(), gamma)
    }

    pub fn flat(coords: &[&str]) -> Connection {
        let n = coords.len();
        Connection::new(
            coords.iter().map(|s| s.to_string()).collect(),
            vec![Expr::zero(); n * n * n],
        )
        .expect("the flat connection is valid")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord_var(&self, i: usize) -> Expr {
        Expr::var(i, &self.coords[i])
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.gamma[idx3(self.dim(), k, i, j)]
    }

    pub fn symbols(&self) -> &[Expr] {
        &self.gamma
    }

    fn derived(&self) -> &Derived {
        self.derived.get_or_init(|| {
            let n = self.dim();
            let g = |k, i, j| self.gamma(k, i, j);
            let mut riemann = Vec::with_capacity(n.pow(4));
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut e = g(k, j, l).diff(i) - g(k, i, l).diff(j);
                            for m in 0..n {
                                e = e + g(k, i, m) * g(m, j, l) - g(k, j, m) * g(m, i, l);
                            }
                            riemann.push(e);
                        }
                    }
                }
            }
            let mut ricci = Vec::with_capacity(n * n);
            for j in 0..n {
                for l in 0..n {
                    ricci.push(sum((0..n).map(|i| riemann[idx4(n, i, j, i, l)].clone())));
                }
            }
            let (s, a) = if n == 2 {
                (1.0, 1.0 / 3.0)
            } else {
                (1.0 / (n as f64 - 1.0), 1.0 / (n as f64 + 1.0))
            };
            let mut schouten = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let (rij, rji) = (&ricci[i * n + j], &ricci[j * n + i]);
                    let sym = (rij + rji).scale(0.5 * s);
                    let alt = (rij - rji).scale(0.5 * a);
                    schouten.push(sym + alt);
                }
            }
            let all: Vec<Expr> = self
                .gamma
                .iter()
                .chain(&riemann)
                .chain(&ricci)
                .chain(&schouten)
                .cloned()
                .collect();
            Derived {
                tape: Tape::new(&all),
                riemann,
                ricci,
                schouten,
            }
        })
    }

    pub fn riemann_exprs(&self) -> &[Expr] {
        &self.derived().riemann
    }

    pub fn ricci_exprs(&self) -> &[Expr] {
        &self.derived().ricci
    }

    /// `P_ij` at `i*n + j`.
    pub fn schouten_exprs(&self) -> &[Expr] {
        &self.derived().schouten
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Invalid(format!(
                "base point has {} coordinates, expected {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn curvature(&self, x: &[f64]) -> Result<ConnectionCurvature> {
        self.check_point(x)?;
        let n = self.dim();
        let v = self.derived().tape.eval(x)?;
        let (r0, c0, s0) = (n.pow(3), n.pow(3) + n.pow(4), n.pow(3) + n.pow(4) + n * n);
        let riemann = TensorValue {
            dim: n,
            valence: vec![Slot::Down, Slot::Down, Slot::Up, Slot::Down],
            data: v[r0..c0].to_vec(),
        };
        let ricci = TensorValue {
            dim: n,
            valence: vec![Slot::Down, Slot::Down],
            data: v[c0..s0].to_vec(),
        };
        let schouten = TensorValue {
            dim: n,
            valence: vec![Slot::Down, Slot::Down],
            data: v[s0..s0 + n * n].to_vec(),
        };
        let beta = TensorValue::from_fn(n, &[Slot::Down, Slot::Down], |ix| {
            schouten.get(&[ix[1], ix[0]]) - schouten.get(&[ix[0], ix[1]])
        });
        let weyl = (n >= 3).then(|| {
            TensorValue::from_fn(n, &riemann.valence, |ix| {
                riemann.get(ix) - decomposed(&schouten, &beta, ix)
            })
        });
        Ok(ConnectionCurvature {
            riemann,
            ricci,
            schouten,
            beta,
            weyl,
        })
    }

    /// `max |R - (d_i^k P_jl - d_j^k P_il + beta_ij d^k_l)|`, which vanishes
    /// identically on surfaces and equals the projective Weyl norm otherwise.
    pub fn decomposition_residual(&self, x: &[f64]) -> Result<f64> {
        let c = self.curvature(x)?;
        let rebuilt = TensorValue::from_fn(self.dim(), &c.riemann.valence, |ix| {
            decomposed(&c.schouten, &c.beta, ix)
        });
        Ok(c.riemann.max_abs_diff(&rebuilt))
    }

    /// `G^k_ij + d^k_i U_j + d^k_j U_i`
    pub fn projective_change(&self, upsilon: &[Expr]) -> Result<Connection> {
        let n = self.dim();
        if upsilon.len() != n {
            return Err(Error::Invalid("one-form has the wrong length".into()));
        }
        let mut gamma = self.gamma.clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let g = &mut gamma[idx3(n, k, i, j)];
                    if k == i {
                        *g = &*g + &upsilon[j];
                    }
                    if k == j {
                        *g = &*g + &upsilon[i];
                    }
                }
            }
        }
        Connection::new(self.coords.clone(), gamma)
    }

    /// `d_i d_j K^k + K^m d_m G^k_ij - G^m_ij d_m K^k + G^k_mj d_i K^m + G^k_im d_j K^m`
    pub fn lie_derivative(&self, field: &[Expr]) -> Result<LieDerivative> {
        let n = self.dim();
        if field.len() != n {
            return Err(Error::Invalid("vector field has the wrong length".into()));
        }
        let dk: Vec<Vec<Expr>> = field
            .iter()
            .map(|c| (0..n).map(|m| c.diff(m)).collect())
            .collect();
        let mut components = Vec::with_capacity(n.pow(3));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut e = dk[k][i].diff(j);
                    for m in 0..n {
                        e = e + &field[m] * self.gamma(k, i, j).diff(m)
                            - self.gamma(m, i, j) * &dk[k][m]
                            + self.gamma(k, m, j) * &dk[m][i]
                            + self.gamma(k, i, m) * &dk[m][j];
                    }
                    components.push(e);
                }
            }
        }
        let rho: Vec<Expr> = (0..n)
            .map(|j| sum((0..n).map(|k| components[idx3(n, k, k, j)].clone())).scale(1.0 / (n as f64 + 1.0)))
            .collect();
        let mut defect = Vec::with_capacity(n.pow(3));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut e = components[idx3(n, k, i, j)].clone();
                    if k == i {
                        e = e - &rho[j];
                    }
                    if k == j {
                        e = e - &rho[i];
                    }
                    defect.push(e);
                }
            }
        }
        Ok(LieDerivative {
            n,
            components,
            rho,
            defect,
        })
    }

    pub fn lie_derivative_at(&self, field: &[Expr], x: &[f64]) -> Result<LieDerivativeValue> {
        self.check_point(x)?;
        self.lie_derivative(field)?.at(x)
    }

    /// Trace-adjusted residual of the projective Killing equation at `x`.
    pub fn projective_residual(&self, field: &[Expr], x: &[f64]) -> Result<f64> {
        Ok(self.lie_derivative_at(field, x)?.residual)
    }

    /// `max |L_K G|`, which vanishes for affine fields.
    pub fn affine_residual(&self, field: &[Expr], x: &[f64]) -> Result<f64> {
        Ok(self.lie_derivative_at(field, x)?.tensor.max_abs())
    }

    /// Symbolic `nabla_b P_ca` at `(b*n + c)*n + a`.
    pub fn schouten_derivative_exprs(&self) -> Vec<Expr> {
        let n = self.dim();
        let p = self.schouten_exprs();
        let mut out = Vec::with_capacity(n.pow(3));
        for b in 0..n {
            for c in 0..n {
                for a in 0..n {
                    let mut e = p[c * n + a].diff(b);
                    for m in 0..n {
                        e = e - self.gamma(m, b, c) * &p[m * n + a]
                            - self.gamma(m, b, a) * &p[c * n + m];
                    }
                    out.push(e);
                }
            }
        }
        out
    }

    /// The Liouville one-form `l_a = eps^bc nabla_b P_ca` of a surface connection.
    pub fn liouville_exprs(&self) -> Result<Vec<Expr>> {
        if self.dim() != 2 {
            return Err(Error::Invalid("the Liouville form is defined on surfaces".into()));
        }
        let dp = self.schouten_derivative_exprs();
        Ok((0..2)
            .map(|a| &dp[idx3(2, 0, 1, a)] - &dp[idx3(2, 1, 0, a)])
            .collect())
    }

    pub fn liouville(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check_point(x)?;
        let l = self.liouville_exprs()?;
        Ok([l[0].eval(x)?, l[1].eval(x)?])
    }

    /// `max_i |d_i h - G^m_im|`: zero iff `e^h dx^1 ^ ... ^ dx^n` is parallel.
    pub fn special_residual(&self, h: &Expr, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let trace = sum((0..n).map(|m| self.gamma(m, i, m).clone()));
            worst = worst.max((h.diff(i) - trace).eval(x)?.abs());
        }
        Ok(worst)
    }

    /// Coefficients `[A3, A2, A1, A0]` of the geodesic equation
    /// `y'' = A3 y'^3 + A2 y'^2 + A1 y' + A0` of a surface connection.
    pub fn ode_coefficients(&self) -> Result<[Expr; 4]> {
        if self.dim() != 2 {
            return Err(Error::Invalid("the geodesic ODE form is defined on surfaces".into()));
        }
        let g = |k, i, j| self.gamma(k, i, j).clone();
        Ok([
            g(0, 1, 1),
            g(0, 0, 1).scale(2.0) - g(1, 1, 1),
            g(0, 0, 0) - g(1, 0, 1).scale(2.0),
            g(1, 0, 0).neg(),
        ])
    }

    /// Thomas symbols `G^k_ij - (G^l_il d^k_j + G^l_jl d^k_i)/(n+1)`, which
    /// depend only on the projective class.
    pub fn thomas_symbols(&self) -> Connection {
        let n = self.dim();
        let w = 1.0 / (n as f64 + 1.0);
        let trace: Vec<Expr> = (0..n)
            .map(|i| sum((0..n).map(|l| self.gamma(l, i, l).clone())))
            .collect();
        let mut gamma = self.gamma.clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut e = gamma[idx3(n, k, i, j)].clone();
                    if k == j {
                        e = e - trace[i].scale(w);
                    }
                    if k == i {
                        e = e - trace[j].scale(w);
                    }
                    gamma[idx3(n, k, i, j)] = e;
                }
            }
        }
        Connection::new(self.coords.clone(), gamma).expect("Thomas symbols are symmetric")
    }
}

impl LieDerivative {
    pub fn at(&self, x: &[f64]) -> Result<LieDerivativeValue> {
        let n = self.n;
        let mut data = Vec::with_capacity(n.pow(3));
        for e in &self.components {
            data.push(e.eval(x)?);
        }
        let rho = self.rho.iter().map(|e| e.eval(x)).collect::<std::result::Result<_, _>>()?;
        let mut residual: f64 = 0.0;
        for e in &self.defect {
            residual = residual.max(e.eval(x)?.abs());
        }
        Ok(LieDerivativeValue {
            tensor: TensorValue {
                dim: n,
                valence: vec![Slot::Up, Slot::Down, Slot::Down],
                data,
            },
            rho,
            residual,
        })
    }
}

fn decomposed(p: &TensorValue, beta: &TensorValue, ix: &[usize]) -> f64 {
    let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
    delta(i, k) * p.get(&[j, l]) - delta(j, k) * p.get(&[i, l]) + beta.get(&[i, j]) * delta(k, l)
}

fn same_values(a: &Expr, b: &Expr, n: usize) -> bool {
    (0..4).all(|shift| {
        let p = probe(n, shift);
        match (a.eval(&p), b.eval(&p)) {
            (Ok(u), Ok(v)) => (u - v).abs() <= 1e-12 * (1.0 + u.abs()),
            _ => true,
        }
    })
}
