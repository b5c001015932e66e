//! Numeric curvature of a metric family at a point, from exact symbolic jets.
//!
//! Riemann components use the base layout `R_ab^c_d` (with the calibrated
//! sign applied) and `Ric_bd = R_ab^a_d`. The lowered tensor is
//! `R_abcd = g_ae R_cd^e_b`, so `Ric_bd = g^ac R_abcd`.
//!
//! Two-forms in four dimensions are 6-vectors in the basis `dx^a ^ dx^b`,
//! `a < b`, ordered as [`PAIRS`]. Operators on them are 6x6 matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::conventions::conventions;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lift::{MetricFamily, SympForm};
use crate::tensor::{Slot, TensorValue};

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Values and symmetric derivatives of the metric components at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub dim: usize,
    /// `g_ab` at `a*dim + b`
    pub g: Vec<f64>,
    /// `d_c g_ab` at `(c*dim + a)*dim + b`
    pub dg: Vec<f64>,
    /// `d_c d_d g_ab` at `((c*dim + d)*dim + a)*dim + b`
    pub ddg: Vec<f64>,
}

impl MetricJet {
    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.dim + b]
    }
    pub fn dg(&self, c: usize, a: usize, b: usize) -> f64 {
        self.dg[(c * self.dim + a) * self.dim + b]
    }
    pub fn ddg(&self, c: usize, d: usize, a: usize, b: usize) -> f64 {
        self.ddg[((c * self.dim + d) * self.dim + a) * self.dim + b]
    }
}

pub fn metric_jet(family: &MetricFamily, p: &[f64]) -> Result<MetricJet> {
    let dim = family.dim();
    if p.len() != dim {
        return Err(Error::Invalid(format!(
            "point has {} coordinates, expected {dim}",
            p.len()
        )));
    }
    let v = family.jet_tape().eval(p)?;
    let mut g = vec![0.0; dim * dim];
    let mut dg = vec![0.0; dim.pow(3)];
    let mut ddg = vec![0.0; dim.pow(4)];
    let mut it = v.into_iter();
    let mut next = || it.next().expect("jet tape layout");
    for a in 0..dim {
        for b in a..dim {
            let val = next();
            g[a * dim + b] = val;
            g[b * dim + a] = val;
            for c in 0..dim {
                let val = next();
                dg[(c * dim + a) * dim + b] = val;
                dg[(c * dim + b) * dim + a] = val;
            }
            for c in 0..dim {
                for d in c..dim {
                    let val = next();
                    for (x, y) in [(c, d), (d, c)] {
                        ddg[((x * dim + y) * dim + a) * dim + b] = val;
                        ddg[((x * dim + y) * dim + b) * dim + a] = val;
                    }
                }
            }
        }
    }
    Ok(MetricJet { dim, g, dg, ddg })
}

#[derive(Debug, Clone)]
pub struct CurvatureSuite {
    pub dim: usize,
    pub metric: Vec<f64>,
    pub inverse: Vec<f64>,
    pub det: f64,
    /// `Gamma^a_bc` at `(a*dim + b)*dim + c`
    pub christoffel: Vec<f64>,
    /// `R_ab^c_d`
    pub riemann: TensorValue,
    /// `R_abcd`
    pub riemann_down: TensorValue,
    pub ricci: TensorValue,
    pub scalar: f64,
    /// `C_abcd`
    pub weyl: TensorValue,
}

impl CurvatureSuite {
    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.metric[a * self.dim + b]
    }
    pub fn ginv(&self, a: usize, b: usize) -> f64 {
        self.inverse[a * self.dim + b]
    }
    pub fn christoffel(&self, a: usize, b: usize, c: usize) -> f64 {
        self.christoffel[(a * self.dim + b) * self.dim + c]
    }
}

fn inverse(dim: usize, g: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = DMatrix::from_row_slice(dim, dim, g);
    let det = m.determinant();
    let scale = g.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    if det.abs() <= 1e-12 * scale.powi(dim as i32) {
        return Err(Error::Numeric(format!("metric is degenerate (det = {det:e})")));
    }
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Numeric("metric is not invertible".into()))?;
    let mut out = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            out[a * dim + b] = inv[(a, b)];
        }
    }
    Ok((out, det))
}

pub(crate) fn suite_with(jet: &MetricJet, sign: f64) -> Result<CurvatureSuite> {
    let n = jet.dim;
    let (ginv, det) = inverse(n, &jet.g)?;
    let gi = |a: usize, b: usize| ginv[a * n + b];
    // s[d][b][c] = d_b g_dc + d_c g_db - d_d g_bc
    let s = |d: usize, b: usize, c: usize| jet.dg(b, d, c) + jet.dg(c, d, b) - jet.dg(d, b, c);
    let ds = |e: usize, d: usize, b: usize, c: usize| {
        jet.ddg(e, b, d, c) + jet.ddg(e, c, d, b) - jet.ddg(e, d, b, c)
    };
    let mut gam = vec![0.0; n.pow(3)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gam[(a * n + b) * n + c] = 0.5 * (0..n).map(|d| gi(a, d) * s(d, b, c)).sum::<f64>();
            }
        }
    }
    // d_e g^ad = -g^am d_e g_mk g^kd
    let mut dginv = vec![0.0; n.pow(3)];
    for e in 0..n {
        for a in 0..n {
            for d in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    for k in 0..n {
                        acc -= gi(a, m) * jet.dg(e, m, k) * gi(k, d);
                    }
                }
                dginv[(e * n + a) * n + d] = acc;
            }
        }
    }
    let mut dgam = vec![0.0; n.pow(4)];
    for e in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = 0.0;
                    for d in 0..n {
                        acc += dginv[(e * n + a) * n + d] * s(d, b, c) + gi(a, d) * ds(e, d, b, c);
                    }
                    dgam[((e * n + a) * n + b) * n + c] = 0.5 * acc;
                }
            }
        }
    }
    let g3 = |a: usize, b: usize, c: usize| gam[(a * n + b) * n + c];
    let dg3 = |e: usize, a: usize, b: usize, c: usize| dgam[((e * n + a) * n + b) * n + c];
    let riemann = TensorValue::from_fn(n, &[Slot::Down, Slot::Down, Slot::Up, Slot::Down], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut r = dg3(i, k, j, l) - dg3(j, k, i, l);
        for m in 0..n {
            r += g3(k, i, m) * g3(m, j, l) - g3(k, j, m) * g3(m, i, l);
        }
        sign * r
    });
    let riemann_down = TensorValue::from_fn(n, &[Slot::Down; 4], |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        (0..n).map(|e| jet.g(a, e) * riemann.get(&[c, d, e, b])).sum()
    });
    let ricci = TensorValue::from_fn(n, &[Slot::Down, Slot::Down], |ix| {
        (0..n).map(|i| riemann.get(&[i, ix[0], i, ix[1]])).sum()
    });
    let mut scalar = 0.0;
    for a in 0..n {
        for b in 0..n {
            scalar += gi(a, b) * ricci.get(&[a, b]);
        }
    }
    let nf = n as f64;
    let weyl = TensorValue::from_fn(n, &[Slot::Down; 4], |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        let g = |x: usize, y: usize| jet.g(x, y);
        let r = |x: usize, y: usize| ricci.get(&[x, y]);
        riemann_down.get(ix)
            - (g(a, c) * r(b, d) - g(a, d) * r(b, c) - g(b, c) * r(a, d) + g(b, d) * r(a, c))
                / (nf - 2.0)
            + scalar * (g(a, c) * g(b, d) - g(a, d) * g(b, c)) / ((nf - 1.0) * (nf - 2.0))
    });
    Ok(CurvatureSuite {
        dim: n,
        metric: jet.g.clone(),
        inverse: ginv,
        det,
        christoffel: gam,
        riemann,
        riemann_down,
        ricci,
        scalar,
        weyl,
    })
}

pub fn curvature_suite(family: &MetricFamily, p: &[f64]) -> Result<CurvatureSuite> {
    suite_with(&metric_jet(family, p)?, conventions().curvature_sign)
}

/// `C_abcd C^abcd`
pub fn weyl_norm_squared(suite: &CurvatureSuite) -> f64 {
    let up = raise_all(&suite.weyl, &suite.inverse);
    suite.weyl.data.iter().zip(&up.data).map(|(a, b)| a * b).sum::<f64>()
}

fn raise_all(t: &TensorValue, ginv: &[f64]) -> TensorValue {
    let n = t.dim;
    let mut cur = t.clone();
    for slot in 0..t.rank() {
        let prev = cur.clone();
        cur = TensorValue::from_fn(n, &t.valence, |ix| {
            let mut j = ix.to_vec();
            (0..n)
                .map(|e| {
                    j[slot] = e;
                    ginv[ix[slot] * n + e] * prev.get(&j)
                })
                .sum()
        });
        cur.valence[slot] = Slot::Up;
    }
    cur
}

/// `max |Ric + 2(n+1) L g|` for a given `L`, or `max |Ric - (scal/dim) g|`.
pub fn einstein_residual(suite: &CurvatureSuite, lambda: Option<f64>) -> f64 {
    let d = suite.dim;
    let factor = match lambda {
        Some(l) => -(d as f64 + 2.0) * l,
        None => suite.scalar / d as f64,
    };
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            worst = worst.max((suite.ricci.get(&[a, b]) - factor * suite.g(a, b)).abs());
        }
    }
    worst
}

/// Largest `|nabla_X (d/d xi_j)|` component leaving the fiber directions.
pub fn parallel_fiber_residual(suite: &CurvatureSuite) -> f64 {
    let d = suite.dim;
    let n = d / 2;
    let mut worst: f64 = 0.0;
    for up in 0..n {
        for a in 0..d {
            for j in n..d {
                worst = worst.max(suite.christoffel(up, a, j).abs());
            }
        }
    }
    worst
}

fn levi_civita(ix: [usize; 4]) -> f64 {
    let mut v = ix;
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if v[i] == v[j] {
                return 0.0;
            }
        }
    }
    for i in 0..4 {
        while v[i] != i {
            let t = v[i];
            v.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// Raising operator on two-forms: `alpha^cd` from `alpha_ef`, in the pair basis.
fn pair_raise(g_inv: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(6, 6, |r, c| {
        let ((a, b), (e, f)) = (PAIRS[r], PAIRS[c]);
        g_inv[a * 4 + e] * g_inv[b * 4 + f] - g_inv[a * 4 + f] * g_inv[b * 4 + e]
    })
}

/// Hodge star on two-forms at a 4D metric `g` (row-major) for orientation `s`.
pub fn hodge_matrix(g: &[f64], s: f64) -> Result<DMatrix<f64>> {
    if g.len() != 16 {
        return Err(Error::Invalid("the Hodge star on two-forms is implemented in 4D".into()));
    }
    let (ginv, det) = inverse(4, g)?;
    let eps = DMatrix::from_fn(6, 6, |r, c| {
        let ((a, b), (e, f)) = (PAIRS[r], PAIRS[c]);
        levi_civita([a, b, e, f])
    });
    Ok(eps * pair_raise(&ginv) * (s * det.abs().sqrt()))
}

/// Hodge star with the calibrated orientation.
pub fn hodge_star(suite: &CurvatureSuite) -> Result<DMatrix<f64>> {
    hodge_matrix(&suite.metric, conventions().orientation)
}

/// `<alpha, beta> = alpha_ab beta^ab / 2` on pair vectors.
pub fn form_pairing(suite: &CurvatureSuite, alpha: &[f64], beta: &[f64]) -> f64 {
    let m = pair_raise(&suite.inverse);
    let (a, b) = (
        DMatrix::from_row_slice(1, 6, alpha),
        DMatrix::from_row_slice(6, 1, beta),
    );
    (a * m * b)[(0, 0)]
}

fn pair_operator(t: &TensorValue, ginv: &[f64]) -> DMatrix<f64> {
    let lowered = DMatrix::from_fn(6, 6, |r, c| {
        let ((a, b), (e, f)) = (PAIRS[r], PAIRS[c]);
        t.get(&[a, b, e, f])
    });
    lowered * pair_raise(ginv)
}

/// Curvature operator `(R alpha)_ab = R_ab^cd alpha_cd / 2`.
pub fn curvature_operator(suite: &CurvatureSuite) -> DMatrix<f64> {
    pair_operator(&suite.riemann_down, &suite.inverse)
}

pub fn weyl_operator(suite: &CurvatureSuite) -> DMatrix<f64> {
    pair_operator(&suite.weyl, &suite.inverse)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |s, v| s.max(v.abs()))
}

/// Block norms of the curvature operator under the Hodge splitting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeylBlocks {
    /// `|P+ W P+|`
    pub self_dual_weyl: f64,
    /// `|P- W P-|`
    pub anti_self_dual_weyl: f64,
    /// Largest mixed block `|P+ R P-|`, `|P- R P+|` (trace-free Ricci).
    pub mixed: f64,
    /// `|P+ R P+ - P+ W P+ - (scal/12) P+|`, zero for any metric.
    pub scalar_block_defect: f64,
    /// `|star^2 - 1|`
    pub star_square_defect: f64,
    pub scalar: f64,
}

pub fn weyl_blocks(suite: &CurvatureSuite) -> Result<WeylBlocks> {
    if suite.dim != 4 {
        return Err(Error::Invalid("Hodge splitting is implemented in 4D".into()));
    }
    let star = hodge_star(suite)?;
    let id = DMatrix::<f64>::identity(6, 6);
    let plus = (&id + &star) * 0.5;
    let minus = (&id - &star) * 0.5;
    let r = curvature_operator(suite);
    let w = weyl_operator(suite);
    let sd = &plus * &w * &plus;
    let asd = &minus * &w * &minus;
    let mixed = max_abs(&(&plus * &r * &minus)).max(max_abs(&(&minus * &r * &plus)));
    let scalar_block = &plus * &r * &plus - &sd - &plus * (suite.scalar / 12.0);
    Ok(WeylBlocks {
        self_dual_weyl: max_abs(&sd),
        anti_self_dual_weyl: max_abs(&asd),
        mixed,
        scalar_block_defect: max_abs(&scalar_block),
        star_square_defect: max_abs(&(&star * &star - &id)),
        scalar: suite.scalar,
    })
}

pub fn signature(g: &[f64]) -> (usize, usize) {
    let dim = (g.len() as f64).sqrt() as usize;
    let e = SymmetricEigen::new(DMatrix::from_row_slice(dim, dim, g));
    let pos = e.eigenvalues.iter().filter(|v| **v > 0.0).count();
    let neg = e.eigenvalues.iter().filter(|v| **v < 0.0).count();
    (pos, neg)
}

fn field_jet(field: &[Expr], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = field.len();
    let mut v = Vec::with_capacity(d);
    let mut dv = vec![0.0; d * d];
    for (c, e) in field.iter().enumerate() {
        v.push(e.eval(p)?);
        for a in 0..d {
            dv[c * d + a] = e.diff(a).eval(p)?;
        }
    }
    Ok((v, dv))
}

/// `(L_V t)_ab` for a covariant 2-tensor given by values and derivatives.
fn lie_covariant2(d: usize, t: &[f64], dt: &[f64], v: &[f64], dv: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = 0.0;
            for c in 0..d {
                acc += v[c] * dt[(c * d + a) * d + b]
                    + t[c * d + b] * dv[c * d + a]
                    + t[a * d + c] * dv[c * d + b];
            }
            out[a * d + b] = acc;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KillingResidual {
    /// `max |L_V g - factor g|`
    pub residual: f64,
    /// Least-squares conformal factor (zero for the plain Killing check).
    pub factor: f64,
}

/// Killing (or conformal Killing, fitting `L_V g = f g`) residual at `p`.
pub fn killing_residual(
    family: &MetricFamily,
    field: &[Expr],
    p: &[f64],
    conformal: bool,
) -> Result<KillingResidual> {
    let d = family.dim();
    if field.len() != d {
        return Err(Error::Invalid("vector field has the wrong length".into()));
    }
    let jet = metric_jet(family, p)?;
    let (v, dv) = field_jet(field, p)?;
    let l = lie_covariant2(d, &jet.g, &jet.dg, &v, &dv);
    let factor = if conformal {
        let (mut num, mut den) = (0.0, 0.0);
        for a in 0..d {
            for b in a..d {
                num += l[a * d + b] * jet.g[a * d + b];
                den += jet.g[a * d + b].powi(2);
            }
        }
        num / den
    } else {
        0.0
    };
    let residual = l
        .iter()
        .zip(&jet.g)
        .fold(0.0f64, |m, (x, g)| m.max((x - factor * g).abs()));
    Ok(KillingResidual { residual, factor })
}

fn form_jet(form: &SympForm, p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = form.dim;
    let mut w = vec![0.0; d * d];
    let mut dw = vec![0.0; d.pow(3)];
    for a in 0..d {
        for b in 0..d {
            let e = &form.components[a * d + b];
            w[a * d + b] = e.eval(p)?;
            for c in 0..d {
                dw[(c * d + a) * d + b] = e.diff(c).eval(p)?;
            }
        }
    }
    Ok((w, dw))
}

/// `max |L_V omega|`
pub fn form_lie_residual(form: &SympForm, field: &[Expr], p: &[f64]) -> Result<f64> {
    let d = form.dim;
    let (w, dw) = form_jet(form, p)?;
    let (v, dv) = field_jet(field, p)?;
    Ok(lie_covariant2(d, &w, &dw, &v, &dv)
        .iter()
        .fold(0.0, |m, x| m.max(x.abs())))
}

/// `max |d omega|`
pub fn closed_residual(form: &SympForm, p: &[f64]) -> Result<f64> {
    let d = form.dim;
    let (_, dw) = form_jet(form, p)?;
    let at = |c: usize, a: usize, b: usize| dw[(c * d + a) * d + b];
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                worst = worst.max((at(a, b, c) + at(b, c, a) + at(c, a, b)).abs());
            }
        }
    }
    Ok(worst)
}

/// `nabla_a omega_bc` for the Levi-Civita connection of `family`.
pub fn form_covariant_derivative(
    family: &MetricFamily,
    form: &SympForm,
    p: &[f64],
) -> Result<TensorValue> {
    let suite = curvature_suite(family, p)?;
    let d = form.dim;
    let (w, dw) = form_jet(form, p)?;
    Ok(TensorValue::from_fn(d, &[Slot::Down; 3], |ix| {
        let (a, b, c) = (ix[0], ix[1], ix[2]);
        let mut v = dw[(a * d + b) * d + c];
        for m in 0..d {
            v -= suite.christoffel(m, a, b) * w[m * d + c] + suite.christoffel(m, a, c) * w[b * d + m];
        }
        v
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ParaStructure {
    /// Sign `s` in `I = s g^-1 omega`, chosen so that `I` is `-1` on the fibers.
    pub sign: f64,
    /// `|I^2 - 1|`
    pub square_defect: f64,
    /// `|g(v, w) - omega(v, I w)|`
    pub compatibility_defect: f64,
    /// `|omega(I v, I w) + omega(v, w)|`
    pub skew_defect: f64,
    /// `|I (d/d xi) + d/d xi|`
    pub fiber_defect: f64,
}

pub fn para_structure(family: &MetricFamily, form: &SympForm, p: &[f64]) -> Result<ParaStructure> {
    let d = family.dim();
    let n = d / 2;
    let jet = metric_jet(family, p)?;
    let (ginv, _) = inverse(d, &jet.g)?;
    let (w, _) = form_jet(form, p)?;
    let gi = DMatrix::from_row_slice(d, d, &ginv);
    let om = DMatrix::from_row_slice(d, d, &w);
    let g = DMatrix::from_row_slice(d, d, &jet.g);
    let raw = &gi * &om;
    let sign = if raw[(n, n)] <= 0.0 { 1.0 } else { -1.0 };
    let op = raw * sign;
    let id = DMatrix::<f64>::identity(d, d);
    let mut fiber = DMatrix::<f64>::zeros(d, n);
    for j in 0..n {
        fiber[(n + j, j)] = 1.0;
    }
    Ok(ParaStructure {
        sign,
        square_defect: max_abs(&(&op * &op - &id)),
        compatibility_defect: max_abs(&(&g - &om * &op)),
        skew_defect: max_abs(&(op.transpose() * &om * &op + &om)),
        fiber_defect: max_abs(&(&op * &fiber + &fiber)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::einstein_lift;
    use crate::projective::Connection;

    #[test]
    fn flat_lift_scalar_and_einstein() {
        for lambda in [1.0, -1.0, 2.0] {
            let g = einstein_lift(&Connection::flat(&["x1", "x2"]), lambda).unwrap();
            let s = curvature_suite(&g, &[0.2, -0.4, 0.3, 0.6]).unwrap();
            assert!((s.scalar + 24.0 * lambda).abs() < 1e-10);
            assert!(einstein_residual(&s, Some(lambda)) < 1e-10);
            assert!((weyl_norm_squared(&s) - 96.0 * lambda * lambda).abs() < 1e-8);
        }
    }

    #[test]
    fn levi_civita_symbol() {
        assert_eq!(levi_civita([0, 1, 2, 3]), 1.0);
        assert_eq!(levi_civita([1, 0, 2, 3]), -1.0);
        assert_eq!(levi_civita([3, 2, 1, 0]), 1.0);
        assert_eq!(levi_civita([0, 0, 2, 3]), 0.0);
    }

    #[test]
    fn base_two_form_is_anti_self_dual() {
        let g = einstein_lift(&Connection::flat(&["x1", "x2"]), 1.0).unwrap();
        let s = curvature_suite(&g, &[0.2, -0.4, 0.3, 0.6]).unwrap();
        let star = hodge_star(&s).unwrap();
        assert!((star[(0, 0)] + 1.0).abs() < 1e-12);
        for r in 1..6 {
            assert!(star[(r, 0)].abs() < 1e-12);
        }
    }
}
