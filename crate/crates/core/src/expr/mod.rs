//! Immutable expression trees over real variables.
//!
//! An [`Expr`] is a cheap handle (`Arc`) to a node. Construction goes through
//! folding constructors, so `0 * e`, `e + 0`, `e^1` and constant subtrees never
//! reach the tree. Derivatives are exact and keep shared subtrees shared, which
//! [`Tape`] exploits when evaluating many expressions at once.

mod display;
mod parse;
mod tape;

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub use parse::parse;
pub use tape::Tape;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared symbol `{name}` at offset {pos}")]
    Undeclared { name: String, pos: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var { index: usize, name: Arc<str> },
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Neg(Expr),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
}

#[derive(Debug, Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(value: f64) -> Expr {
        Expr::wrap(Node::Const(value))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(index: usize, name: &str) -> Expr {
        Expr::wrap(Node::Var {
            index,
            name: Arc::from(name),
        })
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    fn key(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn add(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(a), _) if a == 0.0 => other.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => match other.node() {
                Node::Neg(inner) => Expr::wrap(Node::Sub(self.clone(), inner.clone())),
                _ => Expr::wrap(Node::Add(self.clone(), other.clone())),
            },
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(a), _) if a == 0.0 => other.neg(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Expr::wrap(Node::Sub(self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Expr::zero(),
            (Some(a), _) if a == 1.0 => other.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            (Some(a), _) if a == -1.0 => other.neg(),
            (_, Some(b)) if b == -1.0 => self.neg(),
            _ => Expr::wrap(Node::Mul(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) if b != 0.0 && (a / b).is_finite() => Expr::constant(a / b),
            (Some(a), _) if a == 0.0 && other.as_const().is_none() => Expr::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Expr::wrap(Node::Div(self.clone(), other.clone())),
        }
    }

    pub fn powi(&self, n: i32) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            let v = c.powi(n);
            if v.is_finite() && !(c == 0.0 && n < 0) {
                return Expr::constant(v);
            }
        }
        Expr::wrap(Node::Pow(self.clone(), n))
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) if c.exp().is_finite() => Expr::constant(c.exp()),
            _ => Expr::wrap(Node::Exp(self.clone())),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Expr::wrap(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Expr::wrap(Node::Cos(self.clone())),
        }
    }

    pub fn scale(&self, factor: f64) -> Expr {
        Expr::constant(factor).mul(self)
    }

    /// Exact partial derivative with respect to the variable with `index`.
    pub fn diff(&self, index: usize) -> Expr {
        let mut memo = HashMap::new();
        self.diff_memo(index, &mut memo)
    }

    fn diff_memo(&self, index: usize, memo: &mut HashMap<*const Node, Expr>) -> Expr {
        if let Some(d) = memo.get(&self.key()) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var { index: i, .. } => {
                if *i == index {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => a.diff_memo(index, memo).add(&b.diff_memo(index, memo)),
            Node::Sub(a, b) => a.diff_memo(index, memo).sub(&b.diff_memo(index, memo)),
            Node::Mul(a, b) => {
                let da = a.diff_memo(index, memo);
                let db = b.diff_memo(index, memo);
                da.mul(b).add(&a.mul(&db))
            }
            Node::Div(a, b) => {
                let da = a.diff_memo(index, memo);
                let db = b.diff_memo(index, memo);
                if db.is_zero() {
                    da.div(b)
                } else {
                    da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
                }
            }
            Node::Pow(a, n) => {
                let da = a.diff_memo(index, memo);
                Expr::constant(*n as f64).mul(&a.powi(n - 1)).mul(&da)
            }
            Node::Neg(a) => a.diff_memo(index, memo).neg(),
            Node::Exp(a) => self.mul(&a.diff_memo(index, memo)),
            Node::Sin(a) => a.cos().mul(&a.diff_memo(index, memo)),
            Node::Cos(a) => a.sin().neg().mul(&a.diff_memo(index, memo)),
        };
        memo.insert(self.key(), d.clone());
        d
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var { index, name } => *point.get(*index).ok_or_else(|| {
                ExprError::Domain(format!("variable `{name}` (slot {index}) is unbound"))
            })?,
            Node::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Node::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Node::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Node::Div(a, b) => divide(a.eval(point)?, b.eval(point)?)?,
            Node::Pow(a, n) => power(a.eval(point)?, *n)?,
            Node::Neg(a) => -a.eval(point)?,
            Node::Exp(a) => finite(a.eval(point)?.exp(), "exp overflow")?,
            Node::Sin(a) => a.eval(point)?.sin(),
            Node::Cos(a) => a.eval(point)?.cos(),
        };
        Ok(v)
    }

    /// Replace variables by expressions; `f` returns `None` to keep a variable.
    pub fn substitute(&self, f: &dyn Fn(usize) -> Option<Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_memo(f, &mut memo)
    }

    fn subst_memo(
        &self,
        f: &dyn Fn(usize) -> Option<Expr>,
        memo: &mut HashMap<*const Node, Expr>,
    ) -> Expr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let mut go = |e: &Expr| e.subst_memo(f, memo);
        let out = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var { index, .. } => f(*index).unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => {
                let a = go(a);
                a.add(&go(b))
            }
            Node::Sub(a, b) => {
                let a = go(a);
                a.sub(&go(b))
            }
            Node::Mul(a, b) => {
                let a = go(a);
                a.mul(&go(b))
            }
            Node::Div(a, b) => {
                let a = go(a);
                a.div(&go(b))
            }
            Node::Pow(a, n) => go(a).powi(*n),
            Node::Neg(a) => go(a).neg(),
            Node::Exp(a) => go(a).exp(),
            Node::Sin(a) => go(a).sin(),
            Node::Cos(a) => go(a).cos(),
        };
        memo.insert(self.key(), out.clone());
        out
    }

    pub fn bind(&self, index: usize, value: f64) -> Expr {
        self.substitute(&|i| (i == index).then(|| Expr::constant(value)))
    }

    fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Var { .. } => vec![],
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => vec![a, b],
            Node::Pow(a, _) | Node::Neg(a) | Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => vec![a],
        }
    }

    pub fn max_var_index(&self) -> Option<usize> {
        match self.node() {
            Node::Var { index, .. } => Some(*index),
            _ => self.children().into_iter().filter_map(|c| c.max_var_index()).max(),
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        match self.node() {
            Node::Var { index: i, .. } => *i == index,
            _ => self.children().into_iter().any(|c| c.depends_on(index)),
        }
    }

    /// Smallest |denominator| (and |base| of negative powers) met while
    /// evaluating at `point`; `+inf` if there is none.
    pub fn denominator_margin(&self, point: &[f64]) -> f64 {
        let own = match self.node() {
            Node::Div(_, b) => b.eval(point).map(f64::abs).unwrap_or(0.0),
            Node::Pow(a, n) if *n < 0 => a.eval(point).map(f64::abs).unwrap_or(0.0),
            _ => f64::INFINITY,
        };
        self.children()
            .into_iter()
            .map(|c| c.denominator_margin(point))
            .fold(own, f64::min)
    }

    /// Number of nodes counted as a tree (shared subtrees counted repeatedly).
    pub fn tree_size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::tree_size).sum::<usize>()
    }
}

fn divide(a: f64, b: f64) -> Result<f64, ExprError> {
    if b == 0.0 {
        return Err(ExprError::Domain("division by zero".into()));
    }
    finite(a / b, "quotient overflow")
}

fn power(a: f64, n: i32) -> Result<f64, ExprError> {
    if a == 0.0 && n < 0 {
        return Err(ExprError::Domain("negative power of zero".into()));
    }
    finite(a.powi(n), "power overflow")
}

fn finite(v: f64, what: &str) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Domain(what.into()))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(self, &rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(self, rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

/// Parse text over `vars` (slots `0..vars.len()`) and replace each parameter
/// name by its value.
pub fn parse_bound(text: &str, vars: &[&str], params: &[(&str, f64)]) -> Result<Expr, ExprError> {
    let symbols: Vec<&str> = vars.iter().copied().chain(params.iter().map(|p| p.0)).collect();
    let e = parse(text, &symbols)?;
    let n = vars.len();
    Ok(e.substitute(&|i| (i >= n).then(|| Expr::constant(params[i - n].1))))
}

/// Sum of expressions, folding zeros.
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    terms.into_iter().fold(Expr::zero(), |acc, t| acc.add(&t))
}
