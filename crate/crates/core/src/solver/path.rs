//! Path formulas: the conjunction of the transition formulas along an
//! interprocedural path, in single-assignment form.
//!
//! Each procedure activation on the path gets its own copy of the
//! procedure's variables. A variable not written by a step keeps its
//! current version, which encodes the frame conditions of every live
//! activation.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use super::formula::Formula;
use super::poly::{Poly, SymVar};
use super::search::{solve_formulas, Outcome, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::frontend::{
    Cond, Edge, Expr, InputId, InputOrigin, NodeId, NodeKind, ProcId, Program, Transition, VarId, VarRef,
};
use crate::value::{BitWidth, Valuation};
use crate::word::DecisionVector;

/// Version `index` of variable `var` in activation `frame`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedVar {
    pub frame: u32,
    pub var: VarId,
    pub index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(IndexedVar),
    Input(InputId),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(iv) => write!(f, "{}@{}#{}", iv.var, iv.frame, iv.index),
            Term::Input(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjunct {
    /// `var = expr`, with `var` a fresh version.
    Define(IndexedVar, Expr<Term>),
    Guard(Cond<Term>),
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjunct::Define(v, e) => write!(f, "{} = {e}", Term::Var(*v)),
            Conjunct::Guard(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PathFormula {
    pub width: BitWidth,
    pub num_inputs: usize,
    pub conjuncts: Vec<Conjunct>,
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.conjuncts.iter().map(|c| c.to_string()).collect();
        if parts.is_empty() {
            f.write_str("true")
        } else {
            f.write_str(&parts.join(" && "))
        }
    }
}

/// A satisfying assignment: the program inputs plus any unconstrained
/// local versions that the formula reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathModel {
    pub valuation: Valuation,
    pub locals: HashMap<IndexedVar, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathOutcome {
    Sat(PathModel),
    Unsat,
}

struct Frame {
    id: u32,
    proc: ProcId,
    current: HashMap<VarId, Term>,
    next_index: HashMap<VarId, u32>,
    /// Where to continue in the caller, and which caller variable receives
    /// the result.
    return_to: Option<(NodeId, Option<VarId>)>,
}

impl Frame {
    fn read(&self, v: VarId) -> Term {
        self.current.get(&v).copied().unwrap_or(Term::Var(IndexedVar {
            frame: self.id,
            var: v,
            index: 0,
        }))
    }

    fn write(&mut self, v: VarId) -> IndexedVar {
        let idx = self.next_index.entry(v).or_insert(1);
        let iv = IndexedVar {
            frame: self.id,
            var: v,
            index: *idx,
        };
        *idx += 1;
        self.current.insert(v, Term::Var(iv));
        iv
    }

    fn lift_expr(&self, e: &Expr<VarRef>) -> Expr<Term> {
        e.map_vars(&mut |r| self.lift_ref(*r))
    }

    fn lift_cond(&self, c: &Cond<VarRef>) -> Cond<Term> {
        c.map_vars(&mut |r| self.lift_ref(*r))
    }

    fn lift_ref(&self, r: VarRef) -> Term {
        match r {
            VarRef::Local(v) => self.read(v),
            VarRef::Input(i) => Term::Input(i),
        }
    }
}

/// Build the path formula of `path`, a node sequence starting at any node
/// of `main`. Fails if consecutive nodes are not connected by an edge, or a
/// return does not match the pending call.
pub fn build_path_formula(program: &Program, path: &[NodeId]) -> Result<PathFormula> {
    let mut conjuncts = Vec::new();
    let Some(&first) = path.first() else {
        return Err(Error::MalformedPath("empty path".into()));
    };
    let main = program.main();
    if program.node(first).proc != main {
        return Err(Error::MalformedPath(format!("path starts at {first} outside main")));
    }
    let mut main_frame = Frame {
        id: 0,
        proc: main,
        current: HashMap::new(),
        next_index: HashMap::new(),
        return_to: None,
    };
    for (i, input) in program.inputs().iter().enumerate() {
        if let InputOrigin::MainParam(v) = input.origin {
            main_frame.current.insert(v, Term::Input(InputId(i as u32)));
        }
    }
    let mut stack = vec![main_frame];
    let mut next_frame = 1;

    for pair in path.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        let frame = stack.last_mut().expect("stack never empties");
        debug_assert_eq!(program.node(u).proc, frame.proc);
        match &program.node(u).kind {
            NodeKind::Branch { cond, zero, one } => {
                let c = frame.lift_cond(cond);
                if v == *one {
                    conjuncts.push(Conjunct::Guard(c));
                } else if v == *zero {
                    conjuncts.push(Conjunct::Guard(c.negated()));
                } else {
                    return Err(Error::MalformedPath(format!("no edge {u} -> {v}")));
                }
            }
            NodeKind::Seq(Edge::Local(t, target)) => {
                if v != *target {
                    return Err(Error::MalformedPath(format!("no edge {u} -> {v}")));
                }
                match t {
                    Transition::Skip => {}
                    Transition::Assign(x, e) => {
                        let e = frame.lift_expr(e);
                        let iv = frame.write(*x);
                        conjuncts.push(Conjunct::Define(iv, e));
                    }
                    Transition::Assume(c) => conjuncts.push(Conjunct::Guard(frame.lift_cond(c))),
                }
            }
            NodeKind::Seq(Edge::Call(call, site)) => {
                let callee = program.proc(call.callee);
                if v != callee.initial {
                    return Err(Error::MalformedPath(format!(
                        "call at {u} must continue at {}",
                        callee.initial
                    )));
                }
                let args: Vec<Expr<Term>> = call.args.iter().map(|a| frame.lift_expr(a)).collect();
                let mut new = Frame {
                    id: next_frame,
                    proc: call.callee,
                    current: HashMap::new(),
                    next_index: HashMap::new(),
                    return_to: Some((*site, call.result)),
                };
                next_frame += 1;
                for (formal, arg) in callee.params.iter().zip(args) {
                    let iv = new.write(*formal);
                    conjuncts.push(Conjunct::Define(iv, arg));
                }
                stack.push(new);
            }
            NodeKind::Return => {
                if stack.len() == 1 {
                    return Err(Error::MalformedPath(format!("path continues after main returns at {u}")));
                }
                let done = stack.pop().unwrap();
                let (site, result) = done.return_to.expect("callee frame");
                if v != site {
                    return Err(Error::MalformedPath(format!("return from {u} must continue at {site}")));
                }
                let ret = done.read(program.proc(done.proc).ret_var);
                let caller = stack.last_mut().unwrap();
                if let Some(r) = result {
                    let iv = caller.write(r);
                    conjuncts.push(Conjunct::Define(iv, Expr::Var(ret)));
                }
            }
        }
        if program.node(v).proc != stack.last().unwrap().proc {
            return Err(Error::MalformedPath(format!("{v} is not in the active procedure")));
        }
    }
    Ok(PathFormula {
        width: program.bit_width(),
        num_inputs: program.num_inputs(),
        conjuncts,
    })
}

/// The decision vector of a path: one bit per branching node that is left
/// along the path.
pub fn decision_vector(program: &Program, path: &[NodeId]) -> DecisionVector {
    let mut d = DecisionVector::empty();
    for pair in path.windows(2) {
        if let NodeKind::Branch { one, .. } = &program.node(pair[0]).kind {
            d.push(pair[1] == *one);
        }
    }
    d
}

/// Polynomials with more terms or higher degree than this are named by a
/// fresh solver variable instead of being substituted further.
const MAX_TERMS: usize = 48;
const MAX_DEGREE: usize = 6;

impl PathFormula {
    /// Decide satisfiability with the default solver budget.
    pub fn solve(&self) -> Result<PathOutcome> {
        self.solve_with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn solve_with_budget(&self, budget: u64) -> Result<PathOutcome> {
        let w = self.width;
        let mut next_sym = self.num_inputs as SymVar;
        let mut free: Vec<(IndexedVar, SymVar)> = Vec::new();
        let mut defs: HashMap<IndexedVar, Rc<Poly>> = HashMap::new();
        let mut formulas = Vec::new();

        for c in &self.conjuncts {
            let mut lookup = |t: &Term| -> Poly {
                match t {
                    Term::Input(i) => Poly::var(i.0),
                    Term::Var(iv) => match defs.get(iv) {
                        Some(p) => (**p).clone(),
                        None => {
                            let s = next_sym;
                            next_sym += 1;
                            free.push((*iv, s));
                            let p = Rc::new(Poly::var(s));
                            defs.insert(*iv, p.clone());
                            (*p).clone()
                        }
                    },
                }
            };
            match c {
                Conjunct::Define(iv, e) => {
                    let p = Poly::from_expr(e, w, &mut lookup);
                    let too_big = p.terms().count() > MAX_TERMS
                        || p.terms().any(|(m, _)| m.len() > MAX_DEGREE);
                    let p = if too_big {
                        let s = next_sym;
                        next_sym += 1;
                        formulas.push(Formula::atom(Poly::var(s), crate::frontend::CmpOp::Eq, p, w));
                        Poly::var(s)
                    } else {
                        p
                    };
                    defs.insert(*iv, Rc::new(p));
                }
                Conjunct::Guard(cond) => {
                    let f = Formula::from_cond(cond, true, w, &mut lookup);
                    if f == Formula::False {
                        return Ok(PathOutcome::Unsat);
                    }
                    formulas.push(f);
                }
            }
        }

        match solve_formulas(w, next_sym as usize, &formulas, budget)? {
            Outcome::Unsat => Ok(PathOutcome::Unsat),
            Outcome::Sat(values) => {
                let valuation = Valuation::new(values[..self.num_inputs].to_vec());
                let locals = free.into_iter().map(|(iv, s)| (iv, values[s as usize])).collect();
                Ok(PathOutcome::Sat(PathModel { valuation, locals }))
            }
        }
    }

    /// Evaluate the formula under a model by executing the definitions in
    /// order and checking every guard.
    pub fn holds(&self, model: &PathModel) -> bool {
        let w = self.width;
        let mut env: HashMap<IndexedVar, i64> = model.locals.clone();
        for c in &self.conjuncts {
            let mut read = |t: &Term| match t {
                Term::Input(i) => model.valuation.get(i.index()),
                Term::Var(iv) => env.get(iv).copied().unwrap_or(0),
            };
            match c {
                Conjunct::Define(iv, e) => {
                    let v = e.eval(w, &mut read);
                    env.insert(*iv, v);
                }
                Conjunct::Guard(cond) => {
                    if !cond.eval(w, &mut read) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;

    const P1: &str = "fn main(x, y) { if (x > 0) { y = y + 1; } assert(y != 5); }";

    fn walk(program: &Program, bits: &[bool]) -> Vec<NodeId> {
        // Follow the unique successor of sequential nodes and `bits` at
        // branching nodes; stops one edge after the last bit.
        let mut path = vec![program.entry()];
        let mut bits = bits.iter();
        let mut cur = program.entry();
        loop {
            let next = match &program.node(cur).kind {
                NodeKind::Branch { zero, one, .. } => match bits.next() {
                    Some(true) => *one,
                    Some(false) => *zero,
                    None => return path,
                },
                NodeKind::Seq(e) => e.target(),
                NodeKind::Return => return path,
            };
            path.push(next);
            cur = next;
            if program.node(cur).error {
                return path;
            }
        }
    }

    #[test]
    fn feasible_and_infeasible_paths() {
        let p = parse_and_lower(P1, BitWidth::new(8).unwrap()).unwrap();
        // x > 0, then y + 1 == 5.
        let path = walk(&p, &[true, false]);
        assert_eq!(decision_vector(&p, &path).to_string(), "10");
        let f = build_path_formula(&p, &path).unwrap();
        match f.solve().unwrap() {
            PathOutcome::Sat(m) => {
                assert!(f.holds(&m));
                assert!(m.valuation.get(0) > 0);
                assert_eq!(m.valuation.get(1), 4);
            }
            PathOutcome::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn disconnected_path_is_rejected() {
        let p = parse_and_lower(P1, BitWidth::new(8).unwrap()).unwrap();
        let ret = p.proc(p.main()).ret;
        let err = build_path_formula(&p, &[p.entry(), ret]).unwrap_err();
        assert!(matches!(err, Error::MalformedPath(_)));
    }

    #[test]
    fn calls_get_fresh_activations() {
        let src = "fn inc(a) { return a + 1; } fn main(x) { let y = inc(x); let z = inc(y); assert(z == x + 2); }";
        let p = parse_and_lower(src, BitWidth::new(8).unwrap()).unwrap();
        // Walk through both calls by following call edges and returns.
        let mut path = vec![p.entry()];
        let mut stack = Vec::new();
        let mut cur = p.entry();
        loop {
            let next = match &p.node(cur).kind {
                NodeKind::Branch { zero, .. } => *zero,
                NodeKind::Seq(Edge::Call(call, site)) => {
                    stack.push(*site);
                    p.proc(call.callee).initial
                }
                NodeKind::Seq(e) => e.target(),
                NodeKind::Return => match stack.pop() {
                    Some(s) => s,
                    None => break,
                },
            };
            path.push(next);
            cur = next;
            if p.node(cur).error {
                break;
            }
        }
        let f = build_path_formula(&p, &path).unwrap();
        assert_eq!(f.solve().unwrap(), PathOutcome::Unsat);
    }
}
