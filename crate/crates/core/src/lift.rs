//! Metrics on the cotangent bundle built from a projective structure.
//!
//! Coordinates on the total space are `(x^1..x^n, xi_1..xi_n)`, stored in
//! variable slots `0..n` and `n..2n`. Every family here has the shape
//!
//! ```text
//! g = kappa * Sym[(d xi_i - T_ij dx^j) (x) dx^i],   Sym[a (x) b] = a (x) b + b (x) a
//! T_ij = G^k_ij xi_k - c xi_i xi_j - M_ij
//! ```
//!
//! with the Einstein lift at `c = L`, `M_ij = P_ji / L`; the Walker lift at
//! `c = 0`, `M = 0`; and the modified Walker lift at `c = 1`.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::conventions::conventions;
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::projective::Connection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    Einstein,
    Walker,
    ModifiedWalker,
    SkewRicciFlat,
    ThomasWalker,
    Custom,
}

#[derive(Debug, Clone)]
pub struct MetricFamily {
    n: usize,
    names: Vec<String>,
    kind: LiftKind,
    lambda: Option<f64>,
    source: Option<Connection>,
    theta: Option<ThetaData>,
    components: Vec<Expr>,
    jets: Arc<OnceLock<Tape>>,
}

/// Coefficients `c` and `M` of a Walker-type family (see the module docs).
#[derive(Debug, Clone)]
pub struct ThetaData {
    pub xi_coeff: f64,
    /// `M_ij` at `i*n + j`
    pub m: Vec<Expr>,
}

/// A two-form on the total space, `omega_ab` at `a*dim + b`.
#[derive(Debug, Clone)]
pub struct SympForm {
    pub dim: usize,
    pub components: Vec<Expr>,
}

pub fn fiber_names(base: &[String]) -> Vec<String> {
    let mut names = base.to_vec();
    names.extend((1..=base.len()).map(|i| format!("xi{i}")));
    names
}

impl MetricFamily {
    /// Wrap explicit components (row-major, `2n x 2n`, symmetric).
    pub fn custom(names: Vec<String>, components: Vec<Expr>) -> Result<MetricFamily> {
        let dim = names.len();
        if dim % 2 != 0 || dim < 2 || components.len() != dim * dim {
            return Err(Error::Invalid("metric components must form a 2n x 2n array".into()));
        }
        if components.iter().any(|e| e.max_var_index().is_some_and(|i| i >= dim)) {
            return Err(Error::Invalid("metric depends on a variable outside the total space".into()));
        }
        Ok(MetricFamily {
            n: dim / 2,
            names,
            kind: LiftKind::Custom,
            lambda: None,
            source: None,
            theta: None,
            components,
            jets: Arc::new(OnceLock::new()),
        })
    }

    pub(crate) fn walker_type_with(
        kappa: f64,
        conn: &Connection,
        xi_coeff: f64,
        base: Option<&[Expr]>,
    ) -> MetricFamily {
        let n = conn.dim();
        let dim = 2 * n;
        let xi: Vec<Expr> = (0..n).map(|i| Expr::var(n + i, &format!("xi{}", i + 1))).collect();
        let theta = |i: usize, j: usize| {
            let mut t = crate::expr::sum((0..n).map(|k| conn.gamma(k, i, j) * &xi[k]));
            if xi_coeff != 0.0 {
                t = t - (&xi[i] * &xi[j]).scale(xi_coeff);
            }
            if let Some(m) = base {
                t = t - &m[i * n + j];
            }
            t
        };
        let mut components = vec![Expr::zero(); dim * dim];
        for a in 0..n {
            for b in 0..n {
                components[a * dim + b] = (theta(a, b) + theta(b, a)).scale(-kappa);
            }
            components[a * dim + n + a] = Expr::constant(kappa);
            components[(n + a) * dim + a] = Expr::constant(kappa);
        }
        MetricFamily {
            n,
            names: fiber_names(conn.coords()),
            kind: LiftKind::Custom,
            lambda: None,
            source: Some(conn.clone()),
            theta: Some(ThetaData {
                xi_coeff,
                m: base.map(|m| m.to_vec()).unwrap_or_else(|| vec![Expr::zero(); n * n]),
            }),
            components,
            jets: Arc::new(OnceLock::new()),
        }
    }

    fn tagged(mut self, kind: LiftKind, lambda: Option<f64>) -> MetricFamily {
        self.kind = kind;
        self.lambda = lambda;
        self
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn source(&self) -> Option<&Connection> {
        self.source.as_ref()
    }

    pub fn theta(&self) -> Option<&ThetaData> {
        self.theta.as_ref()
    }

    pub fn component(&self, a: usize, b: usize) -> &Expr {
        &self.components[a * self.dim() + b]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn var(&self, a: usize) -> Expr {
        Expr::var(a, &self.names[a])
    }

    /// Values, first and second derivatives of the upper-triangular
    /// components, in the order used by `jet`.
    pub(crate) fn jet_tape(&self) -> &Tape {
        self.jets.get_or_init(|| {
            let dim = self.dim();
            let mut out = Vec::new();
            for a in 0..dim {
                for b in a..dim {
                    let g = self.component(a, b);
                    out.push(g.clone());
                    let first: Vec<Expr> = (0..dim).map(|c| g.diff(c)).collect();
                    for c in 0..dim {
                        out.push(first[c].clone());
                    }
                    for c in 0..dim {
                        for d in c..dim {
                            out.push(first[c].diff(d));
                        }
                    }
                }
            }
            Tape::new(&out)
        })
    }

    /// Add `s_ab dx^a dx^b` (base indices, symmetric `s`) to the metric.
    pub fn with_base_term(&self, s: &[Expr]) -> Result<MetricFamily> {
        let (n, dim) = (self.n, self.dim());
        if s.len() != n * n {
            return Err(Error::Invalid("base term must be n x n".into()));
        }
        let mut out = self.clone();
        for a in 0..n {
            for b in 0..n {
                out.components[a * dim + b] = &self.components[a * dim + b] + &s[a * n + b];
            }
        }
        let kappa = conventions().kappa;
        if let Some(t) = &mut out.theta {
            for k in 0..n * n {
                t.m[k] = &t.m[k] + s[k].scale(0.5 / kappa);
            }
        }
        out.kind = LiftKind::Custom;
        out.jets = Arc::new(OnceLock::new());
        Ok(out)
    }

    /// Pull back along `(x, xi) -> (x, xi + s(x))`.
    pub fn pullback_fiber_shift(&self, shift: &[Expr]) -> Result<MetricFamily> {
        let (n, dim) = (self.n, self.dim());
        if shift.len() != n || shift.iter().any(|e| e.max_var_index().is_some_and(|i| i >= n)) {
            return Err(Error::Invalid("fiber shift must be n functions of the base".into()));
        }
        let moved: Vec<Expr> = self
            .components
            .iter()
            .map(|e| e.substitute(&|i| (i >= n).then(|| self.var(i) + &shift[i - n])))
            .collect();
        // Jacobian of the map: identity plus d xi_i / d x^j = d_j s_i.
        let jac = |c: usize, a: usize| -> Expr {
            if c == a {
                Expr::one()
            } else if c >= n && a < n {
                shift[c - n].diff(a)
            } else {
                Expr::zero()
            }
        };
        let mut components = vec![Expr::zero(); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let mut e = Expr::zero();
                for c in 0..dim {
                    let ja = jac(c, a);
                    if ja.is_zero() {
                        continue;
                    }
                    for d in 0..dim {
                        let jb = jac(d, b);
                        if jb.is_zero() {
                            continue;
                        }
                        e = e + &moved[c * dim + d] * &ja * jb;
                    }
                }
                components[a * dim + b] = e;
            }
        }
        let mut out = MetricFamily::custom(self.names.clone(), components)?;
        out.source = self.source.clone();
        out.lambda = self.lambda;
        Ok(out)
    }

    /// Pull back along `(x, xi) -> (x, e^{w f(x)} xi)`.
    pub fn pullback_fiber_scale(&self, f: &Expr, w: f64) -> Result<MetricFamily> {
        let (n, dim) = (self.n, self.dim());
        let scale = f.scale(w).exp();
        let moved: Vec<Expr> = self
            .components
            .iter()
            .map(|e| e.substitute(&|i| (i >= n).then(|| &scale * self.var(i))))
            .collect();
        let jac = |c: usize, a: usize| -> Expr {
            match (c >= n, a >= n) {
                (false, false) => {
                    if c == a {
                        Expr::one()
                    } else {
                        Expr::zero()
                    }
                }
                (true, true) => {
                    if c == a {
                        scale.clone()
                    } else {
                        Expr::zero()
                    }
                }
                (true, false) => (&scale * self.var(c)).diff(a),
                (false, true) => Expr::zero(),
            }
        };
        let mut components = vec![Expr::zero(); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let mut e = Expr::zero();
                for c in 0..dim {
                    let ja = jac(c, a);
                    if ja.is_zero() {
                        continue;
                    }
                    for d in 0..dim {
                        let jb = jac(d, b);
                        if !jb.is_zero() {
                            e = e + &moved[c * dim + d] * &ja * jb;
                        }
                    }
                }
                components[a * dim + b] = e;
            }
        }
        let mut out = MetricFamily::custom(self.names.clone(), components)?;
        out.source = self.source.clone();
        Ok(out)
    }

    /// `w * g` for a function `w` on the total space.
    pub fn conformal(&self, w: &Expr) -> MetricFamily {
        let mut out = self.clone();
        out.components = self.components.iter().map(|e| w * e).collect();
        out.kind = LiftKind::Custom;
        out.theta = None;
        out.jets = Arc::new(OnceLock::new());
        out
    }
}

pub fn einstein_lift(conn: &Connection, lambda: f64) -> Result<MetricFamily> {
    einstein_lift_with(conventions().kappa, conn, lambda)
}

pub(crate) fn einstein_lift_with(kappa: f64, conn: &Connection, lambda: f64) -> Result<MetricFamily> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Invalid("the Einstein lift needs a finite non-zero lambda".into()));
    }
    let n = conn.dim();
    let p = conn.schouten_exprs();
    let m: Vec<Expr> = (0..n * n)
        .map(|k| p[(k % n) * n + k / n].scale(1.0 / lambda))
        .collect();
    Ok(MetricFamily::walker_type_with(kappa, conn, lambda, Some(&m))
        .tagged(LiftKind::Einstein, Some(lambda)))
}

pub fn walker_lift(conn: &Connection) -> MetricFamily {
    MetricFamily::walker_type_with(conventions().kappa, conn, 0.0, None).tagged(LiftKind::Walker, None)
}

/// Walker lift of the Thomas symbols, a projective invariant of the class.
pub fn thomas_walker_lift(conn: &Connection) -> MetricFamily {
    walker_lift(&conn.thomas_symbols()).tagged(LiftKind::ThomasWalker, None)
}

/// `T_ij = G^k_ij xi_k - xi_i xi_j - M_ij` for an arbitrary base tensor `M`.
pub fn modified_walker(conn: &Connection, m: &[Expr]) -> Result<MetricFamily> {
    let n = conn.dim();
    if m.len() != n * n || m.iter().any(|e| e.max_var_index().is_some_and(|i| i >= n)) {
        return Err(Error::Invalid("M must be an n x n array of base functions".into()));
    }
    Ok(MetricFamily::walker_type_with(conventions().kappa, conn, 1.0, Some(m))
        .tagged(LiftKind::ModifiedWalker, Some(1.0)))
}

/// The connection `G^1_11 = -d_1 f`, `G^2_22 = d_2 f`, all other symbols zero.
pub fn skew_connection(coords: &[&str], f: &Expr) -> Result<Connection> {
    if coords.len() != 2 {
        return Err(Error::Invalid("the skew family lives on surfaces".into()));
    }
    let mut gamma = vec![Expr::zero(); 8];
    gamma[0] = f.diff(0).neg();
    gamma[7] = f.diff(1);
    Connection::new(coords.iter().map(|s| s.to_string()).collect(), gamma)
}

/// Lift of a skew connection: no Schouten term, `lambda (xi_i dx^i)^2` kept.
pub fn skew_ricci_flat(coords: &[&str], f: &Expr, lambda: f64) -> Result<MetricFamily> {
    let conn = skew_connection(coords, f)?;
    Ok(MetricFamily::walker_type_with(conventions().kappa, &conn, lambda, None)
        .tagged(LiftKind::SkewRicciFlat, Some(lambda)))
}

/// Lift the base one-form shift to the gauge-transformed metric: the pullback
/// of `g` under `xi_i -> xi_i - U_i / lambda`.
pub fn gauge_shift(family: &MetricFamily, upsilon: &[Expr], lambda: f64) -> Result<MetricFamily> {
    if lambda == 0.0 {
        return Err(Error::Invalid("gauge shift needs a non-zero lambda".into()));
    }
    let shift: Vec<Expr> = upsilon.iter().map(|u| u.scale(-1.0 / lambda)).collect();
    family.pullback_fiber_shift(&shift)
}

/// `omega = kappa (d xi_i ^ dx^i) + (kappa / lambda) P_ij dx^i ^ dx^j`, where a
/// wedge carries the same weight as the symmetric product of the metric.
pub fn symplectic_form(family: &MetricFamily) -> Result<SympForm> {
    let (Some(conn), Some(lambda)) = (family.source(), family.lambda()) else {
        return Err(Error::Invalid("symplectic form needs an Einstein-type lift".into()));
    };
    if family.kind() != LiftKind::Einstein {
        return Err(Error::Invalid("symplectic form needs an Einstein lift".into()));
    }
    let kappa = conventions().kappa;
    let (n, dim) = (family.base_dim(), family.dim());
    let p = conn.schouten_exprs();
    let mut components = vec![Expr::zero(); dim * dim];
    for i in 0..n {
        components[(n + i) * dim + i] = Expr::constant(kappa);
        components[i * dim + n + i] = Expr::constant(-kappa);
        for j in 0..n {
            components[i * dim + j] = (&p[i * n + j] - &p[j * n + i]).scale(kappa / lambda);
        }
    }
    Ok(SympForm { dim, components })
}
