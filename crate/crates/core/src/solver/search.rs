//! Complete backtracking search over bounded integer domains.
//!
//! Domains are interval sets. Before each decision, constraints are
//! propagated: atoms are checked with interval arithmetic, univariate
//! linear atoms are solved exactly (piecewise over the wraparound), and
//! non-wrapping linear atoms tighten variable bounds.

use std::collections::BTreeMap;

use super::domain::Domain;
use super::formula::{Atom, Formula};
use super::poly::{Poly, SymVar};
use crate::error::{Error, Result};
use crate::frontend::CmpOp;
use crate::value::BitWidth;

/// Default cap on search nodes per query.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

const MAX_ROUNDS: usize = 64;
const PIECE_LIMIT: i128 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// A model, one value per variable.
    Sat(Vec<i64>),
    Unsat,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }
}

/// Decide the conjunction of `formulas` over variables `0..num_vars`, each
/// ranging over the signed `W`-bit integers. Variables not mentioned by any
/// formula are set to 0.
pub fn solve_formulas(
    w: BitWidth,
    num_vars: usize,
    formulas: &[Formula],
    budget: u64,
) -> Result<Outcome> {
    let mut top = Vec::new();
    for f in formulas {
        flatten_and(f, &mut top);
    }
    if top.iter().any(|f| matches!(f, Formula::False)) {
        return Ok(Outcome::Unsat);
    }
    top.retain(|f| !matches!(f, Formula::True));
    let mut ground_ok = true;
    top.retain(|f| {
        if f.vars().is_empty() {
            ground_ok &= f.eval(w, &|_| 0);
            false
        } else {
            true
        }
    });
    if !ground_ok {
        return Ok(Outcome::Unsat);
    }
    let num_vars = top
        .iter()
        .flat_map(|f| f.vars())
        .map(|v| v as usize + 1)
        .max()
        .unwrap_or(0)
        .max(num_vars);

    let mut model = vec![0i64; num_vars];
    let mut search = Search {
        w,
        formulas: Vec::new(),
        budget,
        nodes: 0,
    };
    for (vars, fs) in components(num_vars, top) {
        search.formulas = fs;
        let mut doms = vec![Domain::full(w); num_vars];
        if !search.propagate(&mut doms) {
            return Ok(Outcome::Unsat);
        }
        match search.search(doms, &vars)? {
            Some(doms) => {
                for v in vars {
                    model[v as usize] = doms[v as usize].singleton().expect("assigned");
                }
            }
            None => return Ok(Outcome::Unsat),
        }
    }
    Ok(Outcome::Sat(model))
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(fs) => fs.iter().for_each(|g| flatten_and(g, out)),
        other => out.push(other.clone()),
    }
}

/// Group formulas whose variable sets are connected.
fn components(num_vars: usize, formulas: Vec<Formula>) -> Vec<(Vec<SymVar>, Vec<Formula>)> {
    let mut parent: Vec<usize> = (0..num_vars).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let var_sets: Vec<Vec<SymVar>> = formulas.iter().map(|f| f.vars().into_iter().collect()).collect();
    for vs in &var_sets {
        for pair in vs.windows(2) {
            let (a, b) = (find(&mut parent, pair[0] as usize), find(&mut parent, pair[1] as usize));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, (Vec<SymVar>, Vec<Formula>)> = BTreeMap::new();
    for (f, vs) in formulas.into_iter().zip(var_sets) {
        // Ground formulas were folded already; a formula always has a var.
        let root = find(&mut parent, vs[0] as usize);
        groups.entry(root).or_default().1.push(f);
    }
    for v in 0..num_vars {
        let root = find(&mut parent, v);
        if let Some(g) = groups.get_mut(&root) {
            g.0.push(v as SymVar);
        }
    }
    groups.into_values().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown,
}

struct Search {
    w: BitWidth,
    formulas: Vec<Formula>,
    budget: u64,
    nodes: u64,
}

impl Search {
    fn search(&mut self, doms: Vec<Domain>, order: &[SymVar]) -> Result<Option<Vec<Domain>>> {
        let Some(pos) = order.iter().position(|&v| doms[v as usize].singleton().is_none()) else {
            let value = |v: SymVar| doms[v as usize].singleton().unwrap_or(0);
            let ok = self.formulas.iter().all(|f| f.eval(self.w, &value));
            return Ok(ok.then_some(doms));
        };
        let var = order[pos] as usize;
        let rest = &order[pos + 1..];
        let candidates = doms[var].clone();
        for val in candidates.preferred_order() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::ResourceExhausted(format!(
                    "solver node budget of {} exceeded",
                    self.budget
                )));
            }
            let mut next = doms.clone();
            next[var] = Domain::single(val);
            if self.propagate(&mut next) {
                if let Some(sol) = self.search(next, rest)? {
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    /// Narrow domains to a fixpoint (or round cap). Returns false on a
    /// conflict.
    fn propagate(&self, doms: &mut [Domain]) -> bool {
        for _ in 0..MAX_ROUNDS {
            let mut changed = false;
            for f in &self.formulas {
                if self.prop_formula(f, doms, true, &mut changed) == Tri::False {
                    return false;
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    fn prop_formula(&self, f: &Formula, doms: &mut [Domain], narrow: bool, changed: &mut bool) -> Tri {
        match f {
            Formula::True => Tri::True,
            Formula::False => Tri::False,
            Formula::Atom(a) => self.prop_atom(a, doms, narrow, changed),
            Formula::And(fs) => {
                let mut all = true;
                for g in fs {
                    match self.prop_formula(g, doms, narrow, changed) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => all = false,
                        Tri::True => {}
                    }
                }
                if all {
                    Tri::True
                } else {
                    Tri::Unknown
                }
            }
            Formula::Or(fs) => {
                let mut open = Vec::new();
                for g in fs {
                    match self.prop_formula(g, doms, false, changed) {
                        Tri::True => return Tri::True,
                        Tri::Unknown => open.push(g),
                        Tri::False => {}
                    }
                }
                match open.as_slice() {
                    [] => Tri::False,
                    [only] if narrow => self.prop_formula(only, doms, true, changed),
                    _ => Tri::Unknown,
                }
            }
        }
    }

    fn prop_atom(&self, a: &Atom, doms: &mut [Domain], narrow: bool, changed: &mut bool) -> Tri {
        let w = self.w;
        let fixed = |v: SymVar| doms[v as usize].singleton();
        let lhs = a.lhs.partial_eval(w, &fixed);
        let rhs = a.rhs.partial_eval(w, &fixed);
        if let (Some(x), Some(y)) = (lhs.as_constant(), rhs.as_constant()) {
            return if a.op.holds(x, y) { Tri::True } else { Tri::False };
        }

        let lin_l = linear_parts(&lhs);
        let lin_r = linear_parts(&rhs);
        if let (Some((cl, bl)), Some((cr, br))) = (&lin_l, &lin_r) {
            let mut vars: Vec<SymVar> = cl.keys().chain(cr.keys()).copied().collect();
            vars.sort_unstable();
            vars.dedup();
            if let [x] = vars[..] {
                let coef = |m: &BTreeMap<SymVar, i64>| m.get(&x).copied().unwrap_or(0);
                let dom = &doms[x as usize];
                if let Some(sat) = univariate_sat(w, dom, (coef(cl), *bl), a.op, (coef(cr), *br)) {
                    if sat.is_empty() {
                        return Tri::False;
                    }
                    if sat != *dom {
                        if !narrow {
                            return Tri::Unknown;
                        }
                        doms[x as usize] = sat;
                        *changed = true;
                    }
                    return Tri::True;
                }
            }
        }

        let bounds = |v: SymVar| doms[v as usize].hull();
        let exact_l = lhs.exact_range(&bounds);
        let exact_r = rhs.exact_range(&bounds);
        let in_window = |r: Option<(i128, i128)>| match r {
            Some((lo, hi)) if lo >= w.min() as i128 && hi <= w.max() as i128 => Some((lo, hi)),
            _ => None,
        };
        let full = (w.min() as i128, w.max() as i128);
        let (rl, rr) = (in_window(exact_l), in_window(exact_r));
        let verdict = compare_ranges(rl.unwrap_or(full), a.op, rr.unwrap_or(full));
        if verdict != Tri::Unknown || !narrow {
            return verdict;
        }

        if let (Some(_), Some(_), Some((cl, bl)), Some((cr, br))) = (rl, rr, lin_l, lin_r) {
            // Both sides are exact integers here, so the difference is too.
            let mut coeffs: BTreeMap<SymVar, i128> = BTreeMap::new();
            for (v, c) in cl {
                *coeffs.entry(v).or_insert(0) += c as i128;
            }
            for (v, c) in cr {
                *coeffs.entry(v).or_insert(0) -= c as i128;
            }
            coeffs.retain(|_, c| *c != 0);
            let konst = bl as i128 - br as i128;
            if !bounds_propagate(&coeffs, konst, a.op, doms, changed) {
                return Tri::False;
            }
        }
        Tri::Unknown
    }
}

/// Split a linear polynomial into coefficients and constant term.
fn linear_parts(p: &Poly) -> Option<(BTreeMap<SymVar, i64>, i64)> {
    let mut coeffs = BTreeMap::new();
    let mut konst = 0;
    for (m, c) in p.terms() {
        match m.as_slice() {
            [] => konst = c,
            [v] => {
                coeffs.insert(*v, c);
            }
            _ => return None,
        }
    }
    Some((coeffs, konst))
}

fn compare_ranges((l1, h1): (i128, i128), op: CmpOp, (l2, h2): (i128, i128)) -> Tri {
    let (t, f) = match op {
        CmpOp::Lt => (h1 < l2, l1 >= h2),
        CmpOp::Le => (h1 <= l2, l1 > h2),
        CmpOp::Gt => (l1 > h2, h1 <= l2),
        CmpOp::Ge => (l1 >= h2, h1 < l2),
        CmpOp::Eq => (l1 == h1 && l2 == h2 && l1 == l2, h1 < l2 || h2 < l1),
        CmpOp::Ne => (h1 < l2 || h2 < l1, l1 == h1 && l2 == h2 && l1 == l2),
    };
    if t {
        Tri::True
    } else if f {
        Tri::False
    } else {
        Tri::Unknown
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Values of `x` in `[lo, hi]` with `k * x <= r`.
fn solve_le(k: i128, r: i128, lo: i128, hi: i128) -> (i128, i128) {
    match k.signum() {
        0 if r >= 0 => (lo, hi),
        0 => (1, 0),
        1 => (lo, hi.min(floor_div(r, k))),
        _ => (lo.max(ceil_div(r, k)), hi),
    }
}

/// Values of `x` in `[lo, hi]` with `k * x >= r`.
fn solve_ge(k: i128, r: i128, lo: i128, hi: i128) -> (i128, i128) {
    solve_le(-k, -r, lo, hi)
}

/// Intervals of `x` in `[lo, hi]` where `k * x + m op 0` holds exactly.
fn solve_linear(k: i128, m: i128, op: CmpOp, lo: i128, hi: i128, out: &mut Vec<(i128, i128)>) {
    match op {
        CmpOp::Lt => out.push(solve_le(k, -m - 1, lo, hi)),
        CmpOp::Le => out.push(solve_le(k, -m, lo, hi)),
        CmpOp::Gt => out.push(solve_ge(k, -m + 1, lo, hi)),
        CmpOp::Ge => out.push(solve_ge(k, -m, lo, hi)),
        CmpOp::Eq | CmpOp::Ne => {
            let root = if k == 0 {
                if m == 0 {
                    Some((lo, hi))
                } else {
                    None
                }
            } else if (-m) % k == 0 && (lo..=hi).contains(&(-m / k)) {
                Some((-m / k, -m / k))
            } else {
                None
            };
            match (op, root) {
                (CmpOp::Eq, Some(r)) => out.push(r),
                (CmpOp::Eq, None) => {}
                (_, None) => out.push((lo, hi)),
                (_, Some((a, b))) => {
                    out.push((lo, a - 1));
                    out.push((b + 1, hi));
                }
            }
        }
    }
}

/// Pieces of `[lo, hi]` on which `a * x + b` wraps by a fixed multiple of
/// the modulus: `(start, end, t)` with wrapped value `a*x + b - t*2^W`.
fn wrap_pieces(w: BitWidth, a: i64, b: i64, lo: i64, hi: i64) -> Option<Vec<(i128, i128, i128)>> {
    let (a, b, lo, hi) = (a as i128, b as i128, lo as i128, hi as i128);
    let m = w.modulus() as i128;
    let h = m / 2;
    if a == 0 {
        return Some(vec![(lo, hi, 0)]);
    }
    let t_of = |x: i128| floor_div(a * x + b + h, m);
    let (t1, t2) = (t_of(lo), t_of(hi));
    let (tmin, tmax) = (t1.min(t2), t1.max(t2));
    if tmax - tmin + 1 > PIECE_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    for t in tmin..=tmax {
        let (s1, e1) = solve_ge(a, m * t - h - b, lo, hi);
        let (s2, e2) = solve_le(a, m * t + h - 1 - b, lo, hi);
        let (s, e) = (s1.max(s2), e1.min(e2));
        if s <= e {
            out.push((s, e, t));
        }
    }
    out.sort_unstable();
    Some(out)
}

/// Exact set of domain values satisfying `a*x + b op c*x + d` on wrapped
/// values, or `None` if the wraparound splits the domain into too many
/// pieces.
fn univariate_sat(
    w: BitWidth,
    dom: &Domain,
    (a, b): (i64, i64),
    op: CmpOp,
    (c, d): (i64, i64),
) -> Option<Domain> {
    let m = w.modulus() as i128;
    let mut out = Vec::new();
    let mut budget = PIECE_LIMIT;
    for &(lo, hi) in dom.intervals() {
        let pl = wrap_pieces(w, a, b, lo, hi)?;
        let pr = wrap_pieces(w, c, d, lo, hi)?;
        budget -= (pl.len() + pr.len()) as i128;
        if budget < 0 {
            return None;
        }
        let (mut i, mut j) = (0, 0);
        while i < pl.len() && j < pr.len() {
            let (s1, e1, t1) = pl[i];
            let (s2, e2, t2) = pr[j];
            let (s, e) = (s1.max(s2), e1.min(e2));
            if s <= e {
                let k = a as i128 - c as i128;
                let konst = (b as i128 - m * t1) - (d as i128 - m * t2);
                solve_linear(k, konst, op, s, e, &mut out);
            }
            if e1 < e2 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    let ivs = out
        .into_iter()
        .filter(|(s, e)| s <= e)
        .map(|(s, e)| (s as i64, e as i64))
        .collect();
    Some(Domain::from_intervals(ivs))
}

/// Tighten variable bounds for `sum coeffs[v] * v + konst op 0` over exact
/// integers. Returns false if some domain becomes empty.
fn bounds_propagate(
    coeffs: &BTreeMap<SymVar, i128>,
    konst: i128,
    op: CmpOp,
    doms: &mut [Domain],
    changed: &mut bool,
) -> bool {
    if op == CmpOp::Ne {
        return true;
    }
    let term_range = |v: SymVar, k: i128, doms: &[Domain]| {
        let (lo, hi) = doms[v as usize].hull();
        let (x, y) = (k * lo as i128, k * hi as i128);
        (x.min(y), x.max(y))
    };
    for (&v, &k) in coeffs {
        let (mut rlo, mut rhi) = (konst, konst);
        for (&u, &ku) in coeffs {
            if u != v {
                let (a, b) = term_range(u, ku, doms);
                rlo += a;
                rhi += b;
            }
        }
        // k*v must satisfy k*v + rest op 0 for some rest in [rlo, rhi].
        let (lo, hi) = doms[v as usize].hull();
        let (lo, hi) = (lo as i128, hi as i128);
        let (nlo, nhi) = match op {
            CmpOp::Lt => solve_le(k, -rlo - 1, lo, hi),
            CmpOp::Le => solve_le(k, -rlo, lo, hi),
            CmpOp::Gt => solve_ge(k, -rhi + 1, lo, hi),
            CmpOp::Ge => solve_ge(k, -rhi, lo, hi),
            CmpOp::Eq => {
                let (a, b) = solve_le(k, -rlo, lo, hi);
                let (c, d) = solve_ge(k, -rhi, lo, hi);
                (a.max(c), b.min(d))
            }
            CmpOp::Ne => unreachable!(),
        };
        if nlo > hi || nhi < lo || nlo > nhi {
            doms[v as usize] = Domain::empty();
            return false;
        }
        if nlo > lo || nhi < hi {
            doms[v as usize] = doms[v as usize].restrict(nlo as i64, nhi as i64);
            *changed = true;
            if doms[v as usize].is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{Cond, Expr};

    fn w(bits: u32) -> BitWidth {
        BitWidth::new(bits).unwrap()
    }

    fn atom(lhs: Expr<SymVar>, op: CmpOp, rhs: Expr<SymVar>, width: BitWidth) -> Formula {
        Formula::from_sym_cond(&Cond::Cmp(op, lhs, rhs), width)
    }

    fn brute_force(width: BitWidth, n: usize, fs: &[Formula]) -> bool {
        let size = 1i64 << width.bits();
        let total = size.pow(n as u32);
        (0..total).any(|mut code| {
            let mut vals = vec![0; n];
            for v in vals.iter_mut() {
                *v = width.wrap(code % size);
                code /= size;
            }
            fs.iter().all(|f| f.eval(width, &|x| vals[x as usize]))
        })
    }

    #[test]
    fn wrapping_linear_atom() {
        let width = w(8);
        // 3x + 100 < -100 has solutions only through wraparound.
        let f = atom(
            Expr::Add(Box::new(Expr::Mul(Box::new(Expr::Const(3)), Box::new(Expr::Var(0)))), Box::new(Expr::Const(100))),
            CmpOp::Lt,
            Expr::Const(-100),
            width,
        );
        let dom = Domain::full(width);
        let Formula::Atom(a) = &f else { panic!() };
        let (cl, bl) = linear_parts(&a.lhs).unwrap();
        let sat = univariate_sat(width, &dom, (cl[&0], bl), a.op, (0, -100)).unwrap();
        for x in width.min()..=width.max() {
            assert_eq!(sat.contains(x), f.eval(width, &|_| x), "x = {x}");
        }
    }

    #[test]
    fn prefers_small_models() {
        let width = w(16);
        let f = Formula::and(vec![
            super::super::formula::cmp_const(0, CmpOp::Gt, 5, width),
            super::super::formula::cmp_const(1, CmpOp::Lt, -3, width),
        ]);
        let out = solve_formulas(width, 3, &[f], DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(out, Outcome::Sat(vec![6, -4, 0]));
    }

    #[test]
    fn nonlinear_unsat() {
        let width = w(6);
        // x*x == 2 has no solution modulo 64 (squares are 0, 1 mod 4...).
        let f = atom(
            Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(0))),
            CmpOp::Eq,
            Expr::Const(2),
            width,
        );
        assert!(!brute_force(width, 1, std::slice::from_ref(&f)));
        assert_eq!(solve_formulas(width, 1, &[f], DEFAULT_NODE_BUDGET).unwrap(), Outcome::Unsat);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let width = w(16);
        // x*x + y*y == 3 is unsat (squares are 0 or 1 mod 4) but nothing
        // propagates, so the search has to enumerate.
        let sq = |v| Expr::Mul(Box::new(Expr::Var(v)), Box::new(Expr::Var(v)));
        let f = atom(Expr::Add(Box::new(sq(0)), Box::new(sq(1))), CmpOp::Eq, Expr::Const(3), width);
        let err = solve_formulas(width, 2, &[f], 10).unwrap_err();
        assert!(matches!(err, Error::ResourceExhausted(_)));
    }
}
