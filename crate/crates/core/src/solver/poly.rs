//! Polynomials over `Z / 2^W`.
//!
//! Addition, subtraction and multiplication commute with reduction modulo
//! `2^W`, so every program expression has an exact normal form as a
//! polynomial whose coefficients are signed `W`-bit representatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::frontend::Expr;
use crate::value::BitWidth;

/// Index of a solver variable.
pub type SymVar = u32;

/// A product of variables, sorted, with repetition for powers. The empty
/// monomial is the constant term.
pub type Monomial = Vec<SymVar>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64, w: BitWidth) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c, w);
        p
    }

    pub fn var(v: SymVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![v], 1);
        Self { terms }
    }

    fn add_term(&mut self, m: Monomial, c: i64, w: BitWidth) {
        let entry = self.terms.entry(m).or_insert(0);
        *entry = w.wrap(entry.wrapping_add(c));
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn add(&self, other: &Poly, w: BitWidth) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c, w);
        }
        out
    }

    pub fn neg(&self, w: BitWidth) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c.wrapping_neg(), w);
        }
        out
    }

    pub fn sub(&self, other: &Poly, w: BitWidth) -> Poly {
        self.add(&other.neg(w), w)
    }

    pub fn mul(&self, other: &Poly, w: BitWidth) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let mut m: Monomial = m1.iter().chain(m2.iter()).copied().collect();
                m.sort_unstable();
                out.add_term(m, c1.wrapping_mul(c2), w);
            }
        }
        out
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<SymVar> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|m| m.len() <= 1)
    }

    /// Evaluate under a total assignment, with wraparound.
    pub fn eval(&self, w: BitWidth, value: &impl Fn(SymVar) -> i64) -> i64 {
        let mut acc: i64 = 0;
        for (m, c) in self.terms() {
            let mut t = c;
            for &v in m {
                t = t.wrapping_mul(value(v));
            }
            acc = acc.wrapping_add(t);
        }
        w.wrap(acc)
    }

    /// Substitute constants for some variables.
    pub fn partial_eval(&self, w: BitWidth, fixed: &impl Fn(SymVar) -> Option<i64>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            let mut coeff = c;
            let mut rest = Vec::new();
            for &v in m {
                match fixed(v) {
                    Some(x) => coeff = coeff.wrapping_mul(x),
                    None => rest.push(v),
                }
            }
            out.add_term(rest, coeff, w);
        }
        out
    }

    /// Exact integer range of the polynomial (coefficients read as their
    /// signed representatives, no reduction) when each variable ranges over
    /// `bounds(v)`. `None` if the computation would overflow `i128`.
    pub fn exact_range(&self, bounds: &impl Fn(SymVar) -> (i64, i64)) -> Option<(i128, i128)> {
        let (mut lo, mut hi) = (0i128, 0i128);
        for (m, c) in self.terms() {
            let (mut tlo, mut thi) = (c as i128, c as i128);
            for &v in m {
                let (a, b) = bounds(v);
                let cands = [
                    tlo.checked_mul(a as i128)?,
                    tlo.checked_mul(b as i128)?,
                    thi.checked_mul(a as i128)?,
                    thi.checked_mul(b as i128)?,
                ];
                tlo = *cands.iter().min().unwrap();
                thi = *cands.iter().max().unwrap();
                if tlo.abs() > 1 << 100 || thi.abs() > 1 << 100 {
                    return None;
                }
            }
            lo += tlo;
            hi += thi;
        }
        Some((lo, hi))
    }

    /// Range of the wrapped value: exact when the integer range does not
    /// leave the `W`-bit window, the full window otherwise.
    pub fn wrapped_range(&self, w: BitWidth, bounds: &impl Fn(SymVar) -> (i64, i64)) -> (i64, i64) {
        match self.exact_range(bounds) {
            Some((lo, hi)) if lo >= w.min() as i128 && hi <= w.max() as i128 => (lo as i64, hi as i64),
            _ => (w.min(), w.max()),
        }
    }

    /// Convert an expression, reading variables through `lookup`.
    pub fn from_expr<V>(e: &Expr<V>, w: BitWidth, lookup: &mut impl FnMut(&V) -> Poly) -> Poly {
        match e {
            Expr::Const(c) => Poly::constant(*c, w),
            Expr::Var(v) => lookup(v),
            Expr::Add(a, b) => Poly::from_expr(a, w, lookup).add(&Poly::from_expr(b, w, lookup), w),
            Expr::Sub(a, b) => Poly::from_expr(a, w, lookup).sub(&Poly::from_expr(b, w, lookup), w),
            Expr::Mul(a, b) => Poly::from_expr(a, w, lookup).mul(&Poly::from_expr(b, w, lookup), w),
            Expr::Neg(a) => Poly::from_expr(a, w, lookup).neg(w),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.is_empty() {
                write!(f, "{c}")?;
            } else {
                if c != 1 {
                    write!(f, "{c}*")?;
                }
                let vars: Vec<String> = m.iter().map(|v| format!("s{v}")).collect();
                f.write_str(&vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w8() -> BitWidth {
        BitWidth::new(8).unwrap()
    }

    #[test]
    fn normal_form_cancels() {
        let w = w8();
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.add(&y, w).mul(&x.sub(&y, w), w);
        let q = x.mul(&x, w).sub(&y.mul(&y, w), w);
        assert_eq!(p, q);
        assert_eq!(p.sub(&q, w).as_constant(), Some(0));
        // 128 * 2 vanishes modulo 256.
        assert_eq!(Poly::constant(128, w).mul(&Poly::constant(2, w), w), Poly::zero());
    }

    #[test]
    fn ranges() {
        let w = w8();
        let p = Poly::var(0).add(&Poly::constant(10, w), w);
        assert_eq!(p.exact_range(&|_| (0, 5)), Some((10, 15)));
        assert_eq!(p.wrapped_range(w, &|_| (0, 5)), (10, 15));
        assert_eq!(p.wrapped_range(w, &|_| (0, 127)), (-128, 127));
    }

    proptest! {
        #[test]
        fn eval_matches_wrapping_arithmetic(a in -128i64..128, b in -128i64..128, c in -300i64..300) {
            let w = w8();
            let (x, y) = (Poly::var(0), Poly::var(1));
            let p = x.mul(&y, w).add(&Poly::constant(c, w), w).sub(&x.mul(&x, w), w);
            let vals = [a, b];
            let got = p.eval(w, &|v| vals[v as usize]);
            let want = w.wrap(a * b + c - a * a);
            prop_assert_eq!(got, want);
        }
    }
}
