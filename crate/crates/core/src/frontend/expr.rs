//! Integer expressions and Boolean conditions, generic over the variable type
//! so the same trees serve the program, the interpreter and path formulae.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::value::BitWidth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    /// The operator obtained by exchanging the operands.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr<V> {
    Const(i64),
    Var(V),
    Add(Box<Expr<V>>, Box<Expr<V>>),
    Sub(Box<Expr<V>>, Box<Expr<V>>),
    Mul(Box<Expr<V>>, Box<Expr<V>>),
    Neg(Box<Expr<V>>),
}

impl<V> Expr<V> {
    pub fn map_vars<W>(&self, f: &mut impl FnMut(&V) -> W) -> Expr<W> {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) => Expr::Var(f(v)),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.map_vars(f))),
        }
    }

    /// Evaluate with `W`-bit wraparound.
    pub fn eval(&self, width: BitWidth, lookup: &mut impl FnMut(&V) -> i64) -> i64 {
        match self {
            Expr::Const(c) => width.wrap(*c),
            Expr::Var(v) => lookup(v),
            Expr::Add(a, b) => width.wrap(a.eval(width, lookup) + b.eval(width, lookup)),
            Expr::Sub(a, b) => width.wrap(a.eval(width, lookup) - b.eval(width, lookup)),
            Expr::Mul(a, b) => width.wrap(a.eval(width, lookup).wrapping_mul(b.eval(width, lookup))),
            Expr::Neg(a) => width.wrap(-a.eval(width, lookup)),
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => f(v),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            Expr::Neg(a) => a.for_each_var(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond<V> {
    Bool(bool),
    Cmp(CmpOp, Expr<V>, Expr<V>),
    And(Box<Cond<V>>, Box<Cond<V>>),
    Or(Box<Cond<V>>, Box<Cond<V>>),
    Not(Box<Cond<V>>),
}

impl<V> Cond<V> {
    pub fn negated(self) -> Cond<V> {
        Cond::Not(Box::new(self))
    }

    pub fn map_vars<W>(&self, f: &mut impl FnMut(&V) -> W) -> Cond<W> {
        match self {
            Cond::Bool(b) => Cond::Bool(*b),
            Cond::Cmp(op, a, b) => Cond::Cmp(*op, a.map_vars(f), b.map_vars(f)),
            Cond::And(a, b) => Cond::And(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Cond::Or(a, b) => Cond::Or(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Cond::Not(a) => Cond::Not(Box::new(a.map_vars(f))),
        }
    }

    pub fn eval(&self, width: BitWidth, lookup: &mut impl FnMut(&V) -> i64) -> bool {
        match self {
            Cond::Bool(b) => *b,
            Cond::Cmp(op, a, b) => {
                let (x, y) = (a.eval(width, lookup), b.eval(width, lookup));
                op.holds(x, y)
            }
            Cond::And(a, b) => a.eval(width, lookup) && b.eval(width, lookup),
            Cond::Or(a, b) => a.eval(width, lookup) || b.eval(width, lookup),
            Cond::Not(a) => !a.eval(width, lookup),
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            Cond::Bool(_) => {}
            Cond::Cmp(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            Cond::Not(a) => a.for_each_var(f),
        }
    }
}

impl<V: fmt::Display> fmt::Display for Expr<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

impl<V: fmt::Display> fmt::Display for Cond<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Bool(b) => write!(f, "{b}"),
            Cond::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Cond::And(a, b) => write!(f, "({a} && {b})"),
            Cond::Or(a, b) => write!(f, "({a} || {b})"),
            Cond::Not(a) => write!(f, "!({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_evaluation() {
        let w = BitWidth::new(8).unwrap();
        let e: Expr<char> = Expr::Mul(Box::new(Expr::Var('x')), Box::new(Expr::Const(3)));
        assert_eq!(e.eval(w, &mut |_| 50), -106);
        let c = Cond::Cmp(CmpOp::Lt, e, Expr::Const(0));
        assert!(c.eval(w, &mut |_| 50));
        assert!(!c.clone().negated().eval(w, &mut |_| 50));
    }

    #[test]
    fn negate_and_flip_are_consistent() {
        for op in [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge] {
            for a in -2..=2 {
                for b in -2..=2 {
                    assert_eq!(op.negate().holds(a, b), !op.holds(a, b));
                    assert_eq!(op.flip().holds(b, a), op.holds(a, b));
                }
            }
        }
    }
}
