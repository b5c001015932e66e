//! Lifting base vector fields to the cotangent bundle.

use crate::error::{Error, Result};
use crate::expr::{sum, Expr};
use crate::projective::Connection;
use crate::sampling::{sample_points, SampleBox};

const VALIDATION_SEED: u64 = 0x5eed;
const VALIDATION_POINTS: usize = 8;

/// `[X, Y]^a = X^c d_c Y^a - Y^c d_c X^a`
pub fn lie_bracket(x: &[Expr], y: &[Expr]) -> Result<Vec<Expr>> {
    if x.len() != y.len() {
        return Err(Error::Invalid("vector fields live on different spaces".into()));
    }
    let d = x.len();
    Ok((0..d)
        .map(|a| {
            sum((0..d).map(|c| &x[c] * y[a].diff(c) - &y[c] * x[a].diff(c)))
        })
        .collect())
}

fn xi(conn: &Connection, i: usize) -> Expr {
    Expr::var(conn.dim() + i, &format!("xi{}", i + 1))
}

/// `K^i d_i - xi_j d_i K^j d/d xi_i`
pub fn complete_lift(conn: &Connection, field: &[Expr]) -> Result<Vec<Expr>> {
    let n = conn.dim();
    if field.len() != n {
        return Err(Error::Invalid("vector field has the wrong length".into()));
    }
    let mut out = field.to_vec();
    for i in 0..n {
        out.push(sum((0..n).map(|j| xi(conn, j) * field[j].diff(i))).neg());
    }
    Ok(out)
}

fn validation_points(conn: &Connection, probe: &dyn Fn(&[f64]) -> bool) -> Result<Vec<Vec<f64>>> {
    sample_points(
        conn.dim(),
        VALIDATION_POINTS,
        VALIDATION_SEED,
        SampleBox::default(),
        probe,
    )
}

/// Largest `|(L_K G) - d rho - rho d|` over the validation points.
pub fn projective_defect(conn: &Connection, field: &[Expr]) -> Result<f64> {
    let lie = conn.lie_derivative(field)?;
    let pts = validation_points(conn, &|p| lie.at(p).is_ok())?;
    let mut worst: f64 = 0.0;
    for p in &pts {
        worst = worst.max(lie.at(p)?.residual);
    }
    Ok(worst)
}

/// `K~ + rho_i / L d/d xi_i` for a projective vector field `K`.
pub fn killing_lift(conn: &Connection, field: &[Expr], lambda: f64, tol: f64) -> Result<Vec<Expr>> {
    if lambda == 0.0 {
        return Err(Error::Invalid("the Killing lift needs a non-zero lambda".into()));
    }
    let defect = projective_defect(conn, field)?;
    if defect > tol {
        return Err(Error::Precondition {
            what: "projective Killing equation".into(),
            residual: defect,
        });
    }
    let lie = conn.lie_derivative(field)?;
    let n = conn.dim();
    let mut out = complete_lift(conn, field)?;
    for i in 0..n {
        out[n + i] = &out[n + i] + lie.rho[i].scale(1.0 / lambda);
    }
    Ok(out)
}

/// `K~ + c f xi_i d/d xi_i`, with no check on `K`.
pub fn fiber_scaled_lift(conn: &Connection, field: &[Expr], f: &Expr, c: f64) -> Result<Vec<Expr>> {
    let n = conn.dim();
    let mut out = complete_lift(conn, field)?;
    for i in 0..n {
        out[n + i] = &out[n + i] + (f * xi(conn, i)).scale(c);
    }
    Ok(out)
}

/// Conformal Killing field of the Walker lift for a projective `K` whose
/// trace form is `rho = df`. Returns the field and its conformal factor
/// `2 f`.
pub fn conformal_walker_lift(
    conn: &Connection,
    field: &[Expr],
    f: &Expr,
    tol: f64,
) -> Result<(Vec<Expr>, Expr)> {
    let defect = projective_defect(conn, field)?;
    if defect > tol {
        return Err(Error::Precondition {
            what: "projective Killing equation".into(),
            residual: defect,
        });
    }
    let n = conn.dim();
    let lie = conn.lie_derivative(field)?;
    let gap: Vec<Expr> = (0..n).map(|i| &lie.rho[i] - f.diff(i)).collect();
    let pts = validation_points(conn, &|p| gap.iter().all(|e| e.eval(p).is_ok()))?;
    let mut worst: f64 = 0.0;
    for p in &pts {
        for e in &gap {
            worst = worst.max(e.eval(p)?.abs());
        }
    }
    if worst > tol {
        return Err(Error::Precondition {
            what: "rho = df".into(),
            residual: worst,
        });
    }
    Ok((fiber_scaled_lift(conn, field, f, 2.0)?, f.scale(2.0)))
}

/// `max |L_K P_ij + nabla_i rho_j|` at a base point.
pub fn integrability_residual(conn: &Connection, field: &[Expr], x: &[f64]) -> Result<f64> {
    let n = conn.dim();
    let p = conn.schouten_exprs();
    let lie = conn.lie_derivative(field)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut e = Expr::zero();
            for m in 0..n {
                e = e + &field[m] * p[i * n + j].diff(m)
                    + &p[m * n + j] * field[m].diff(i)
                    + &p[i * n + m] * field[m].diff(j)
                    - conn.gamma(m, i, j) * &lie.rho[m];
            }
            e = e + lie.rho[j].diff(i);
            worst = worst.max(e.eval(x)?.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const XY: &[&str] = &["x1", "x2"];

    fn field(texts: &[&str]) -> Vec<Expr> {
        texts.iter().map(|t| parse(t, XY).unwrap()).collect()
    }

    #[test]
    fn complete_lift_of_a_rotation() {
        let flat = Connection::flat(XY);
        let k = field(&["neg(x2)", "x1"]);
        let lifted = complete_lift(&flat, &k).unwrap();
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(lifted[2].eval(&p).unwrap(), -0.4);
        assert_eq!(lifted[3].eval(&p).unwrap(), 0.3);
    }

    #[test]
    fn non_projective_field_is_rejected() {
        let flat = Connection::flat(XY);
        let k = field(&["x1^2", "0"]);
        let err = killing_lift(&flat, &k, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::Precondition { residual, .. } if residual > 0.5));
    }

    #[test]
    fn bracket_of_coordinate_fields() {
        let a = field(&["1", "0"]);
        let b = field(&["x2", "x1"]);
        let c = lie_bracket(&a, &b).unwrap();
        assert_eq!(c[0].as_const(), Some(0.0));
        assert_eq!(c[1].as_const(), Some(1.0));
    }
}
