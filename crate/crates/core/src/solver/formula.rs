//! Quantifier-free constraints over polynomials, kept in negation normal form.

use std::collections::BTreeSet;
use std::fmt;

use super::poly::{Poly, SymVar};
use crate::frontend::{CmpOp, Cond, Expr};
use crate::value::BitWidth;

/// `lhs op rhs` on the signed `W`-bit values of both sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Poly,
    pub op: CmpOp,
    pub rhs: Poly,
}

impl Atom {
    pub fn eval(&self, w: BitWidth, value: &impl Fn(SymVar) -> i64) -> bool {
        self.op.holds(self.lhs.eval(w, value), self.rhs.eval(w, value))
    }

    pub fn vars(&self) -> BTreeSet<SymVar> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    /// Build an atom; equalities are normalized to `lhs - rhs op 0` and
    /// ground atoms fold to constants.
    pub fn atom(lhs: Poly, op: CmpOp, rhs: Poly, w: BitWidth) -> Formula {
        let (lhs, rhs) = match op {
            CmpOp::Eq | CmpOp::Ne => (lhs.sub(&rhs, w), Poly::zero()),
            _ => (lhs, rhs),
        };
        match (lhs.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => Formula::from(op.holds(a, b)),
            _ => Formula::Atom(Atom { lhs, op, rhs }),
        }
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::False,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    /// Translate a condition (or its negation when `positive` is false),
    /// pushing negations down to the atoms.
    pub fn from_cond<V>(
        cond: &Cond<V>,
        positive: bool,
        w: BitWidth,
        lookup: &mut impl FnMut(&V) -> Poly,
    ) -> Formula {
        match cond {
            Cond::Bool(b) => Formula::from(*b == positive),
            Cond::Cmp(op, a, b) => {
                let op = if positive { *op } else { op.negate() };
                let lhs = Poly::from_expr(a, w, lookup);
                let rhs = Poly::from_expr(b, w, lookup);
                Formula::atom(lhs, op, rhs, w)
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                let parts = vec![
                    Formula::from_cond(a, positive, w, lookup),
                    Formula::from_cond(b, positive, w, lookup),
                ];
                if matches!(cond, Cond::And(..)) == positive {
                    Formula::and(parts)
                } else {
                    Formula::or(parts)
                }
            }
            Cond::Not(a) => Formula::from_cond(a, !positive, w, lookup),
        }
    }

    pub fn eval(&self, w: BitWidth, value: &impl Fn(SymVar) -> i64) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.eval(w, value),
            Formula::And(fs) => fs.iter().all(|f| f.eval(w, value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(w, value)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<SymVar>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.extend(a.vars()),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<SymVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// A formula over expressions whose variables are solver variables.
    pub fn from_sym_cond(cond: &Cond<SymVar>, w: BitWidth) -> Formula {
        Formula::from_cond(cond, true, w, &mut |v| Poly::var(*v))
    }
}

impl From<bool> for Formula {
    fn from(b: bool) -> Self {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{} {} {}", a.lhs, a.op.symbol(), a.rhs),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(self, Formula::And(_)) { " && " } else { " || " };
                let parts: Vec<String> = fs.iter().map(|p| format!("({p})")).collect();
                f.write_str(&parts.join(sep))
            }
        }
    }
}

/// Shorthand used by tests and examples: `x op c` over solver variables.
pub fn cmp_const(var: SymVar, op: CmpOp, c: i64, w: BitWidth) -> Formula {
    Formula::from_sym_cond(&Cond::Cmp(op, Expr::Var(var), Expr::Const(c)), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_is_pushed_to_atoms() {
        let w = BitWidth::new(8).unwrap();
        let c: Cond<SymVar> = Cond::Not(Box::new(Cond::And(
            Box::new(Cond::Cmp(CmpOp::Lt, Expr::Var(0), Expr::Const(3))),
            Box::new(Cond::Bool(true)),
        )));
        let f = Formula::from_sym_cond(&c, w);
        match &f {
            Formula::Atom(a) => assert_eq!(a.op, CmpOp::Ge),
            other => panic!("unexpected {other}"),
        }
        for x in -128..128 {
            assert_eq!(f.eval(w, &|_| x), c.eval(w, &mut |_| x));
        }
    }

    #[test]
    fn ground_atoms_fold() {
        let w = BitWidth::new(8).unwrap();
        assert_eq!(Formula::from_sym_cond(&Cond::Bool(false), w), Formula::False);
        let f = Formula::atom(Poly::constant(1, w), CmpOp::Lt, Poly::constant(2, w), w);
        assert_eq!(f, Formula::True);
        let x_minus_x = Poly::var(0).sub(&Poly::var(0), w);
        assert_eq!(Formula::atom(x_minus_x, CmpOp::Eq, Poly::zero(), w), Formula::True);
    }
}
