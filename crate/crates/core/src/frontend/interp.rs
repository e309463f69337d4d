//! Concrete (and optionally concolic) execution of programs.

use serde::Serialize;

use super::expr::Cond;
use super::program::{Edge, InputOrigin, NodeId, NodeKind, ProcId, Program, Transition, VarId, VarRef};
use crate::solver::{Formula, Poly};
use crate::value::{BitWidth, Valuation};
use crate::word::DecisionVector;

/// Default cap on the number of edges one run may take.
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

/// Call depth beyond which a run is abandoned.
pub const MAX_CALL_DEPTH: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Returned,
    AssertionViolated,
    /// The step budget or the call depth cap was hit.
    StepBudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub decisions: DecisionVector,
    pub status: RunStatus,
    /// Visited nodes; ends at an error node for violating runs.
    pub path: Vec<NodeId>,
}

/// The two outcomes of one executed branch, as constraints over the
/// program inputs (solver variable `i` is input `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchConstraint {
    pub taken: Formula,
    pub flipped: Formula,
}

/// Run `program` on `inputs`.
pub fn execute(program: &Program, inputs: &Valuation, step_budget: usize) -> ExecutionTrace {
    Machine::new(program, inputs, false).run(step_budget).0
}

/// Run `program` on `inputs`, also recording the symbolic constraint of
/// every branch decision.
pub fn execute_concolic(
    program: &Program,
    inputs: &Valuation,
    step_budget: usize,
) -> (ExecutionTrace, Vec<BranchConstraint>) {
    Machine::new(program, inputs, true).run(step_budget)
}

// Symbolic values larger than this are replaced by their concrete value.
const MAX_TERMS: usize = 32;
const MAX_DEGREE: usize = 4;

struct Frame {
    proc: ProcId,
    vals: Vec<i64>,
    syms: Vec<Poly>,
    return_to: Option<(NodeId, Option<VarId>)>,
}

struct Machine<'a> {
    program: &'a Program,
    inputs: &'a Valuation,
    width: BitWidth,
    symbolic: bool,
    stack: Vec<Frame>,
}

impl<'a> Machine<'a> {
    fn new(program: &'a Program, inputs: &'a Valuation, symbolic: bool) -> Self {
        let width = program.bit_width();
        let main = program.proc(program.main());
        let mut frame = Frame {
            proc: program.main(),
            vals: vec![0; main.num_vars()],
            syms: if symbolic { vec![Poly::zero(); main.num_vars()] } else { Vec::new() },
            return_to: None,
        };
        for (i, input) in program.inputs().iter().enumerate() {
            if let InputOrigin::MainParam(v) = input.origin {
                frame.vals[v.index()] = width.wrap(inputs.get(i));
                if symbolic {
                    frame.syms[v.index()] = Poly::var(i as u32);
                }
            }
        }
        Self {
            program,
            inputs,
            width,
            symbolic,
            stack: vec![frame],
        }
    }

    fn read(&self, r: &VarRef) -> i64 {
        match r {
            VarRef::Local(v) => self.stack.last().unwrap().vals[v.index()],
            VarRef::Input(i) => self.width.wrap(self.inputs.get(i.index())),
        }
    }

    fn read_sym(&self, r: &VarRef) -> Poly {
        match r {
            VarRef::Local(v) => self.stack.last().unwrap().syms[v.index()].clone(),
            VarRef::Input(i) => Poly::var(i.0),
        }
    }

    fn eval(&self, e: &super::Expr<VarRef>) -> i64 {
        e.eval(self.width, &mut |r| self.read(r))
    }

    fn eval_sym(&self, e: &super::Expr<VarRef>, concrete: i64) -> Poly {
        let p = Poly::from_expr(e, self.width, &mut |r| self.read_sym(r));
        if p.terms().count() > MAX_TERMS || p.terms().any(|(m, _)| m.len() > MAX_DEGREE) {
            Poly::constant(concrete, self.width)
        } else {
            p
        }
    }

    fn branch_constraint(&self, cond: &Cond<VarRef>, taken: bool) -> BranchConstraint {
        let w = self.width;
        BranchConstraint {
            taken: Formula::from_cond(cond, taken, w, &mut |r| self.read_sym(r)),
            flipped: Formula::from_cond(cond, !taken, w, &mut |r| self.read_sym(r)),
        }
    }

    fn run(mut self, step_budget: usize) -> (ExecutionTrace, Vec<BranchConstraint>) {
        let program = self.program;
        let mut cur = program.entry();
        let mut path = vec![cur];
        let mut decisions = DecisionVector::empty();
        let mut constraints = Vec::new();
        let mut steps = 0;
        let status = loop {
            if program.node(cur).error {
                break RunStatus::AssertionViolated;
            }
            if steps >= step_budget {
                break RunStatus::StepBudgetExceeded;
            }
            steps += 1;
            let next = match &program.node(cur).kind {
                NodeKind::Branch { cond, zero, one } => {
                    let bit = cond.eval(self.width, &mut |r| self.read(r));
                    if self.symbolic {
                        constraints.push(self.branch_constraint(cond, bit));
                    }
                    decisions.push(bit);
                    if bit {
                        *one
                    } else {
                        *zero
                    }
                }
                NodeKind::Seq(Edge::Local(t, target)) => {
                    if let Transition::Assign(x, e) = t {
                        let v = self.eval(e);
                        if self.symbolic {
                            let s = self.eval_sym(e, v);
                            self.stack.last_mut().unwrap().syms[x.index()] = s;
                        }
                        self.stack.last_mut().unwrap().vals[x.index()] = v;
                    }
                    *target
                }
                NodeKind::Seq(Edge::Call(call, site)) => {
                    if self.stack.len() >= MAX_CALL_DEPTH {
                        break RunStatus::StepBudgetExceeded;
                    }
                    let callee = program.proc(call.callee);
                    let n = callee.num_vars();
                    let mut frame = Frame {
                        proc: call.callee,
                        vals: vec![0; n],
                        syms: if self.symbolic { vec![Poly::zero(); n] } else { Vec::new() },
                        return_to: Some((*site, call.result)),
                    };
                    for (formal, arg) in callee.params.iter().zip(&call.args) {
                        let v = self.eval(arg);
                        frame.vals[formal.index()] = v;
                        if self.symbolic {
                            frame.syms[formal.index()] = self.eval_sym(arg, v);
                        }
                    }
                    self.stack.push(frame);
                    callee.initial
                }
                NodeKind::Return => {
                    if self.stack.len() == 1 {
                        break RunStatus::Returned;
                    }
                    let done = self.stack.pop().unwrap();
                    let ret = program.proc(done.proc).ret_var.index();
                    let (site, result) = done.return_to.unwrap();
                    if let Some(r) = result {
                        let caller = self.stack.last_mut().unwrap();
                        caller.vals[r.index()] = done.vals[ret];
                        if self.symbolic {
                            caller.syms[r.index()] = done.syms[ret].clone();
                        }
                    }
                    site
                }
            };
            path.push(next);
            cur = next;
        };
        (
            ExecutionTrace {
                decisions,
                status,
                path,
            },
            constraints,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;
    use crate::solver::decision_vector;

    fn w8() -> BitWidth {
        BitWidth::new(8).unwrap()
    }

    #[test]
    fn runs_report_decisions_and_status() {
        let p = parse_and_lower("fn main(x, y) { if (x > 0) { y = y + 1; } assert(y != 5); }", w8()).unwrap();
        let t = execute(&p, &Valuation::new(vec![1, 4]), DEFAULT_STEP_BUDGET);
        assert_eq!(t.status, RunStatus::AssertionViolated);
        assert_eq!(t.decisions.to_string(), "10");
        assert_eq!(decision_vector(&p, &t.path), t.decisions);
        let t = execute(&p, &Valuation::new(vec![0, 4]), DEFAULT_STEP_BUDGET);
        assert_eq!(t.status, RunStatus::Returned);
        assert_eq!(t.decisions.to_string(), "01");
    }

    #[test]
    fn loops_hit_the_budget() {
        let p = parse_and_lower("fn main() { let i = 0; while (i >= 0) { i = i + 0; } }", w8()).unwrap();
        let t = execute(&p, &Valuation::default(), 50);
        assert_eq!(t.status, RunStatus::StepBudgetExceeded);
    }

    #[test]
    fn recursion_depth_is_capped() {
        let p = parse_and_lower("fn f(n) { let r = f(n); return r; } fn main() { let x = f(1); }", w8()).unwrap();
        let t = execute(&p, &Valuation::default(), DEFAULT_STEP_BUDGET);
        assert_eq!(t.status, RunStatus::StepBudgetExceeded);
    }

    #[test]
    fn concolic_constraints_match_the_run() {
        let src = "fn inc(a) { return a + 1; } fn main(x) { let y = inc(x); if (y * 2 > 10) { assert(y != 7); } }";
        let p = parse_and_lower(src, w8()).unwrap();
        let inputs = Valuation::new(vec![6]);
        let (t, cs) = execute_concolic(&p, &inputs, DEFAULT_STEP_BUDGET);
        assert_eq!(t.status, RunStatus::AssertionViolated);
        assert_eq!(cs.len(), t.decisions.len());
        let val = |v: u32| inputs.get(v as usize);
        for c in &cs {
            assert!(c.taken.eval(w8(), &val));
            assert!(!c.flipped.eval(w8(), &val));
        }
    }

    #[test]
    fn nondet_reads_inputs() {
        let p = parse_and_lower("fn main() { let a = nondet(); assert(a != 3); }", w8()).unwrap();
        let t = execute(&p, &Valuation::new(vec![3]), DEFAULT_STEP_BUDGET);
        assert_eq!(t.status, RunStatus::AssertionViolated);
    }
}
