//! Twistor distributions on the twistor space of a Walker-type lift, and the
//! Calderbank equations on the base.
//!
//! Twistor-space slots are `(x1, x2, xi1, xi2, pi1, pi2)`. For a family with
//! `T_ij = G^k_ij xi_k - c xi_i xi_j - M_ij` the distribution is spanned by
//!
//! ```text
//! Theta = pi^i (d_i + T_ij d/d xi_j) - G^k_ij pi^i pi^j d/d pi^k
//! phi   = pi^i eps_ij d/d xi_j,    eps_12 = 1
//! ```
//!
//! and `[Theta, phi] = (-pi^j G^k_jk + c pi^j xi_j) phi`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{sum, Expr};
use crate::lift::MetricFamily;
use crate::projective::Connection;
use crate::symmetry::lie_bracket;

pub const SLOTS: [&str; 6] = ["x1", "x2", "xi1", "xi2", "pi1", "pi2"];

fn slot(i: usize) -> Expr {
    Expr::var(i, SLOTS[i])
}

fn eps(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct SprayField {
    pub components: Vec<Expr>,
    pub xi_coeff: f64,
    /// `-pi^j G^k_jk + c pi^j xi_j`
    pub expected_coefficient: Expr,
}

/// Spray of the family with coefficients `(c, M)` over `conn`.
pub fn spray_field(conn: &Connection, m: &[Expr], xi_coeff: f64) -> Result<SprayField> {
    if conn.dim() != 2 || m.len() != 4 {
        return Err(Error::Invalid("twistor distributions are built over surfaces".into()));
    }
    let xi = |i: usize| slot(2 + i);
    let pi = |i: usize| slot(4 + i);
    let theta = |i: usize, j: usize| {
        sum((0..2).map(|k| conn.gamma(k, i, j) * xi(k)))
            - (xi(i) * xi(j)).scale(xi_coeff)
            - &m[i * 2 + j]
    };
    let mut comps = vec![Expr::zero(); 6];
    comps[0] = pi(0);
    comps[1] = pi(1);
    for j in 0..2 {
        comps[2 + j] = sum((0..2).map(|i| pi(i) * theta(i, j)));
    }
    for k in 0..2 {
        let mut e = Expr::zero();
        for i in 0..2 {
            for j in 0..2 {
                e = e - conn.gamma(k, i, j) * pi(i) * pi(j);
            }
        }
        comps[4 + k] = e;
    }
    let trace = |j: usize| sum((0..2).map(|k| conn.gamma(k, j, k).clone()));
    let expected = sum((0..2).map(|j| (pi(j) * trace(j)).neg()))
        + sum((0..2).map(|j| pi(j) * xi(j))).scale(xi_coeff);
    Ok(SprayField {
        components: comps,
        xi_coeff,
        expected_coefficient: expected,
    })
}

/// Spray built from the coefficients recorded on a Walker-type family.
pub fn spray_for(family: &MetricFamily) -> Result<SprayField> {
    let (Some(conn), Some(theta)) = (family.source(), family.theta()) else {
        return Err(Error::Invalid("family is not of Walker type".into()));
    };
    spray_field(conn, &theta.m, theta.xi_coeff)
}

/// `pi^i eps_ij d/d xi_j`
pub fn higgs_geometric() -> Vec<Expr> {
    let mut comps = vec![Expr::zero(); 6];
    for j in 0..2 {
        comps[2 + j] = sum((0..2).map(|i| slot(4 + i).scale(eps(i, j))));
    }
    comps
}

/// `(b^k xi_k) pi^i eps_ij d/d xi_j`, used for Walker lifts.
pub fn higgs_walker(b: [f64; 2]) -> Vec<Expr> {
    let w = slot(2).scale(b[0]) + slot(3).scale(b[1]);
    higgs_geometric().iter().map(|c| &w * c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `pi = (1, t)`
    Affine,
    /// `pi = (t, 1)`
    Infinity,
}

pub fn chart_point(base: &[f64], chart: Chart, t: f64) -> [f64; 6] {
    let pi = match chart {
        Chart::Affine => [1.0, t],
        Chart::Infinity => [t, 1.0],
    };
    [base[0], base[1], base[2], base[3], pi[0], pi[1]]
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketSpan {
    /// Coefficient of `Theta` in the fit of `[Theta, phi]`.
    pub alpha: f64,
    /// Coefficient of `phi`.
    pub beta: f64,
    /// `|[Theta, phi] - alpha Theta - beta phi|`
    pub residual: f64,
    /// Smallest singular value of `[Theta phi]`.
    pub conditioning: f64,
}

const DEGENERATE: f64 = 1e-10;

fn values(field: &[Expr], p: &[f64]) -> Result<Vec<f64>> {
    field.iter().map(|e| e.eval(p).map_err(Error::from)).collect()
}

/// Least-squares fit of `[theta, phi]` in `span{theta, phi}` at `p`.
pub fn bracket_span_residual(theta: &[Expr], phi: &[Expr], p: &[f64]) -> Result<BracketSpan> {
    let br = lie_bracket(theta, phi)?;
    span_fit(theta, phi, &br, p)
}

pub(crate) fn span_fit(theta: &[Expr], phi: &[Expr], br: &[Expr], p: &[f64]) -> Result<BracketSpan> {
    let t = values(theta, p)?;
    let f = values(phi, p)?;
    let b = DVector::from_vec(values(br, p)?);
    let a = DMatrix::from_fn(6, 2, |r, c| if c == 0 { t[r] } else { f[r] });
    let svd = a.clone().svd(true, true);
    let conditioning = svd.singular_values.min();
    if conditioning < DEGENERATE {
        return Err(Error::Numeric("distribution is degenerate at this point".into()));
    }
    let coef = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let resid = &b - &a * &coef;
    Ok(BracketSpan {
        alpha: coef[0],
        beta: coef[1],
        residual: resid.amax(),
        conditioning,
    })
}

/// Bracket data for a spray and a Higgs field, with the bracket formed once.
#[derive(Debug, Clone)]
pub struct TwistorPair {
    pub theta: Vec<Expr>,
    pub phi: Vec<Expr>,
    pub bracket: Vec<Expr>,
    pub expected_coefficient: Option<Expr>,
}

impl TwistorPair {
    pub fn new(theta: Vec<Expr>, phi: Vec<Expr>, expected_coefficient: Option<Expr>) -> Result<TwistorPair> {
        let bracket = lie_bracket(&theta, &phi)?;
        Ok(TwistorPair {
            theta,
            phi,
            bracket,
            expected_coefficient,
        })
    }

    pub fn geometric(spray: &SprayField) -> Result<TwistorPair> {
        TwistorPair::new(
            spray.components.clone(),
            higgs_geometric(),
            Some(spray.expected_coefficient.clone()),
        )
    }

    pub fn span(&self, p: &[f64]) -> Result<BracketSpan> {
        span_fit(&self.theta, &self.phi, &self.bracket, p)
    }

    /// Fit residual and, when an expected coefficient is known, the absolute
    /// error of `beta`.
    pub fn certificate(&self, p: &[f64]) -> Result<(f64, Option<f64>)> {
        let s = self.span(p)?;
        let err = match &self.expected_coefficient {
            Some(e) => Some((s.beta - e.eval(p)?).abs().max(s.alpha.abs())),
            None => None,
        };
        Ok((s.residual, err))
    }
}

/// Square matrices of base functions.
#[derive(Debug, Clone)]
pub struct MatField {
    pub size: usize,
    pub entries: Vec<Expr>,
}

impl MatField {
    pub fn zeros(size: usize) -> MatField {
        MatField {
            size,
            entries: vec![Expr::zero(); size * size],
        }
    }

    pub fn from_constants(size: usize, values: &[f64]) -> MatField {
        MatField {
            size,
            entries: values.iter().map(|v| Expr::constant(*v)).collect(),
        }
    }

    pub fn scale_by(&self, f: &Expr) -> MatField {
        self.map(|e| f * e)
    }

    fn map(&self, f: impl Fn(&Expr) -> Expr) -> MatField {
        MatField {
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &MatField, f: impl Fn(&Expr, &Expr) -> Expr) -> MatField {
        MatField {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &MatField) -> MatField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatField) -> MatField {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> MatField {
        self.map(|e| e.scale(c))
    }

    pub fn diff(&self, i: usize) -> MatField {
        self.map(|e| e.diff(i))
    }

    pub fn mul(&self, other: &MatField) -> MatField {
        let m = self.size;
        let mut entries = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                entries.push(sum((0..m).map(|k| &self.entries[r * m + k] * &other.entries[k * m + c])));
            }
        }
        MatField { size: m, entries }
    }

    pub fn commutator(&self, other: &MatField) -> MatField {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn max_abs_at(&self, x: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in &self.entries {
            worst = worst.max(e.eval(x)?.abs());
        }
        Ok(worst)
    }
}

/// Gauge potential `A_i` and Higgs field `phi_i` over a surface connection.
#[derive(Debug, Clone)]
pub struct CalderbankData {
    pub conn: Connection,
    pub a: [MatField; 2],
    pub phi: [MatField; 2],
}

impl CalderbankData {
    /// `D_i phi_j = d_i phi_j - G^k_ij phi_k - [A_i, phi_j]`
    pub fn d_phi(&self, i: usize, j: usize) -> MatField {
        let mut out = self.phi[j].diff(i).sub(&self.a[i].commutator(&self.phi[j]));
        for k in 0..2 {
            out = out.sub(&self.phi[k].scale_by(self.conn.gamma(k, i, j)));
        }
        out
    }

    /// Adjoint derivative of a section without base indices.
    fn d_scalar(&self, i: usize, s: &MatField) -> MatField {
        s.diff(i).sub(&self.a[i].commutator(s))
    }

    /// `F` with `[D_1, D_2] X = [F, X]`.
    pub fn field_strength(&self) -> MatField {
        self.a[0]
            .diff(1)
            .sub(&self.a[1].diff(0))
            .add(&self.a[0].commutator(&self.a[1]))
    }
}

/// `max |D_(i phi_j)|`
pub fn calderbank_residual(data: &CalderbankData, x: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in i..2 {
            let s = data.d_phi(i, j).add(&data.d_phi(j, i));
            worst = worst.max(s.max_abs_at(x)?);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct Prolongation {
    /// `|mu|` with `mu = eps^ij D_i phi_j`
    pub mu_norm: f64,
    /// `|D_i phi_j - mu eps_ij / 2|`
    pub closure_residual: f64,
    /// `|D_i mu - Z_i|` with `Z_i` the prolonged value
    pub derivative_residual: f64,
    /// `|[F, mu] - D_1 Z_2 + D_2 Z_1|`
    pub integrability_residual: f64,
}

/// Prolongation of the Calderbank system for a special connection whose
/// parallel volume form is `e^h dx^1 ^ dx^2`.
pub fn prolongation_check(data: &CalderbankData, h: &Expr, x: &[f64]) -> Result<Prolongation> {
    let conn = &data.conn;
    let vol = h.exp();
    let inv_vol = h.neg().exp();
    let mu = data.d_phi(0, 1).sub(&data.d_phi(1, 0)).scale_by(&inv_vol);
    let mut closure: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let target = mu.scale_by(&vol.scale(0.5 * eps(i, j)));
            closure = closure.max(data.d_phi(i, j).sub(&target).max_abs_at(x)?);
        }
    }
    let f = data.field_strength();
    let r = conn.riemann_exprs();
    // Z_i = 2 e^-h ([phi_i, F] + R_12^k_i phi_k)
    let z: Vec<MatField> = (0..2)
        .map(|i| {
            let mut acc = data.phi[i].commutator(&f);
            for k in 0..2 {
                acc = acc.add(&data.phi[k].scale_by(&r[crate::projective::idx4(2, 0, 1, k, i)]));
            }
            acc.scale_by(&inv_vol.scale(2.0))
        })
        .collect();
    let mut derivative: f64 = 0.0;
    for i in 0..2 {
        derivative = derivative.max(data.d_scalar(i, &mu).sub(&z[i]).max_abs_at(x)?);
    }
    let lhs = f.commutator(&mu);
    let rhs = data.d_scalar(0, &z[1]).sub(&data.d_scalar(1, &z[0]));
    Ok(Prolongation {
        mu_norm: mu.max_abs_at(x)?,
        closure_residual: closure,
        derivative_residual: derivative,
        integrability_residual: lhs.sub(&rhs).max_abs_at(x)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_spray_bracket() {
        let flat = Connection::flat(&["x1", "x2"]);
        let s = spray_field(&flat, &vec![Expr::zero(); 4], 1.0).unwrap();
        let pair = TwistorPair::geometric(&s).unwrap();
        let p = chart_point(&[0.1, 0.2, 0.3, 0.4], Chart::Affine, 0.5);
        let (res, err) = pair.certificate(&p).unwrap();
        assert!(res < 1e-14);
        assert!(err.unwrap() < 1e-14);
        let span = pair.span(&p).unwrap();
        assert!((span.beta - (0.3 + 0.5 * 0.4)).abs() < 1e-14);
    }

    #[test]
    fn killing_solution_of_the_flat_system() {
        let flat = Connection::flat(&["x1", "x2"]);
        let x1 = Expr::var(0, "x1");
        let x2 = Expr::var(1, "x2");
        let p = MatField::from_constants(2, &[0.0, 1.0, 0.0, 0.0]);
        let q = MatField::from_constants(2, &[1.0, 0.0, 0.0, -1.0]);
        let data = CalderbankData {
            conn: flat,
            a: [MatField::zeros(2), MatField::zeros(2)],
            phi: [p.add(&q.scale_by(&x2)), q.scale_by(&x1).scale(-1.0)],
        };
        let x = [0.3, -0.8];
        assert!(calderbank_residual(&data, &x).unwrap() < 1e-15);
        let pr = prolongation_check(&data, &Expr::zero(), &x).unwrap();
        assert!(pr.closure_residual < 1e-15);
        assert!((pr.mu_norm - 2.0).abs() < 1e-15);
    }
}
