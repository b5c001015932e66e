use std::collections::HashMap;

use super::{divide, finite, power, Expr, ExprError, Node};

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, i32),
    Neg(usize),
    Exp(usize),
    Sin(usize),
    Cos(usize),
}

/// A batch of expressions flattened into one instruction list, with shared
/// subtrees evaluated once.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl Tape {
    pub fn new(exprs: &[Expr]) -> Tape {
        let mut ops = Vec::new();
        let mut slots: HashMap<*const Node, usize> = HashMap::new();
        let outputs = exprs
            .iter()
            .map(|e| emit(e, &mut ops, &mut slots))
            .collect();
        Tape { ops, outputs }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, ExprError> {
        let mut regs = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(c) => c,
                Op::Var(i) => *point
                    .get(i)
                    .ok_or_else(|| ExprError::Domain(format!("slot {i} is unbound")))?,
                Op::Add(a, b) => regs[a] + regs[b],
                Op::Sub(a, b) => regs[a] - regs[b],
                Op::Mul(a, b) => regs[a] * regs[b],
                Op::Div(a, b) => divide(regs[a], regs[b])?,
                Op::Pow(a, n) => power(regs[a], n)?,
                Op::Neg(a) => -regs[a],
                Op::Exp(a) => finite(f64::exp(regs[a]), "exp overflow")?,
                Op::Sin(a) => f64::sin(regs[a]),
                Op::Cos(a) => f64::cos(regs[a]),
            };
            regs.push(v);
        }
        Ok(self.outputs.iter().map(|&k| regs[k]).collect())
    }
}

fn emit(e: &Expr, ops: &mut Vec<Op>, slots: &mut HashMap<*const Node, usize>) -> usize {
    if let Some(&k) = slots.get(&e.key()) {
        return k;
    }
    let op = match e.node() {
        Node::Const(c) => Op::Const(*c),
        Node::Var { index, .. } => Op::Var(*index),
        Node::Add(a, b) => Op::Add(emit(a, ops, slots), emit(b, ops, slots)),
        Node::Sub(a, b) => Op::Sub(emit(a, ops, slots), emit(b, ops, slots)),
        Node::Mul(a, b) => Op::Mul(emit(a, ops, slots), emit(b, ops, slots)),
        Node::Div(a, b) => Op::Div(emit(a, ops, slots), emit(b, ops, slots)),
        Node::Pow(a, n) => Op::Pow(emit(a, ops, slots), *n),
        Node::Neg(a) => Op::Neg(emit(a, ops, slots)),
        Node::Exp(a) => Op::Exp(emit(a, ops, slots)),
        Node::Sin(a) => Op::Sin(emit(a, ops, slots)),
        Node::Cos(a) => Op::Cos(emit(a, ops, slots)),
    };
    ops.push(op);
    let k = ops.len() - 1;
    slots.insert(e.key(), k);
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn tape_matches_tree_evaluation() {
        let s = ["x", "y"];
        let exprs: Vec<Expr> = ["x*y + sin(x)", "x^3/(1 + y^2)", "exp(neg(x*y))"]
            .iter()
            .map(|t| parse(t, &s).unwrap())
            .collect();
        let derived: Vec<Expr> = exprs.iter().flat_map(|e| [e.diff(0), e.diff(1)]).collect();
        let all: Vec<Expr> = exprs.iter().chain(&derived).cloned().collect();
        let tape = Tape::new(&all);
        let p = [0.4, -1.1];
        let got = tape.eval(&p).unwrap();
        for (e, v) in all.iter().zip(got) {
            assert_eq!(e.eval(&p).unwrap(), v);
        }
    }

    #[test]
    fn tape_reports_domain_errors() {
        let e = parse("1/x", &["x"]).unwrap();
        assert!(Tape::new(&[e]).eval(&[0.0]).is_err());
    }
}
