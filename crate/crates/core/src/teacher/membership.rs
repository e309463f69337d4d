//! Feasibility of decision vectors.

use log::warn;

use crate::error::Result;
use crate::frontend::interp::MAX_CALL_DEPTH;
use crate::frontend::{Edge, NodeId, NodeKind, Program};
use crate::solver::{build_path_formula, PathModel, PathOutcome};
use crate::word::DecisionVector;

/// The unique interprocedural path from main's initial node that takes the
/// decisions `d` and stops one edge after the `|d|`-th branching node.
/// `None` if the program returns or reaches an error node with decisions
/// left, if a gap between branchings exceeds `step_budget` edges, or if the
/// call depth cap is hit.
pub fn unfold(program: &Program, d: &DecisionVector, step_budget: usize) -> Option<Vec<NodeId>> {
    let mut cur = program.entry();
    let mut path = vec![cur];
    if d.is_empty() {
        return Some(path);
    }
    let mut stack: Vec<NodeId> = Vec::new();
    let mut consumed = 0;
    let mut gap = 0;
    loop {
        let node = program.node(cur);
        if node.error {
            return None;
        }
        let (next, branched) = match &node.kind {
            NodeKind::Branch { zero, one, .. } => {
                let bit = d.bits()[consumed];
                consumed += 1;
                gap = 0;
                (if bit { *one } else { *zero }, true)
            }
            NodeKind::Seq(Edge::Local(_, t)) => (*t, false),
            NodeKind::Seq(Edge::Call(call, site)) => {
                if stack.len() + 1 >= MAX_CALL_DEPTH {
                    return None;
                }
                stack.push(*site);
                (program.proc(call.callee).initial, false)
            }
            NodeKind::Return => (stack.pop()?, false),
        };
        gap += 1;
        if gap > step_budget {
            warn!("membership unfolding of {d} exceeded {step_budget} steps between branchings");
            return None;
        }
        path.push(next);
        cur = next;
        if branched && consumed == d.len() {
            return Some(path);
        }
    }
}

/// Whether `d` is the decision vector of some feasible path, with a model
/// when it is.
pub fn feasibility(
    program: &Program,
    d: &DecisionVector,
    step_budget: usize,
    solver_budget: u64,
) -> Result<Option<PathModel>> {
    let Some(path) = unfold(program, d, step_budget) else {
        return Ok(None);
    };
    let formula = build_path_formula(program, &path)?;
    match formula.solve_with_budget(solver_budget)? {
        PathOutcome::Sat(model) => {
            debug_assert!(formula.holds(&model));
            Ok(Some(model))
        }
        PathOutcome::Unsat => Ok(None),
    }
}

/// Uncached membership in the feasible decision vectors.
pub fn membership(program: &Program, d: &DecisionVector, step_budget: usize, solver_budget: u64) -> Result<bool> {
    Ok(feasibility(program, d, step_budget, solver_budget)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::interp::DEFAULT_STEP_BUDGET;
    use crate::frontend::parse_and_lower;
    use crate::solver::DEFAULT_NODE_BUDGET;
    use crate::value::BitWidth;

    fn member(src: &str, d: &str) -> bool {
        let p = parse_and_lower(src, BitWidth::DEFAULT).unwrap();
        membership(&p, &DecisionVector::from(d), DEFAULT_STEP_BUDGET, DEFAULT_NODE_BUDGET).unwrap()
    }

    const P1: &str = "fn main(x) { if (x > 0) { assert(x >= 1); } }";

    #[test]
    fn p1_feasible_set() {
        for (d, want) in [("", true), ("0", true), ("1", true), ("11", true), ("10", false), ("00", false), ("110", false)] {
            assert_eq!(member(P1, d), want, "{d}");
        }
    }

    #[test]
    fn branch_free_program_only_has_lambda() {
        assert!(member("fn main(x) { x = x + 1; }", ""));
        assert!(!member("fn main(x) { x = x + 1; }", "0"));
    }

    #[test]
    fn divergence_between_branchings_is_infeasible() {
        let src = "fn spin() { spin(); } fn main(x) { if (x > 0) { spin(); } if (x > 1) { } }";
        assert!(member(src, "0"));
        assert!(member(src, "00"));
        assert!(!member(src, "11"));
    }
}
