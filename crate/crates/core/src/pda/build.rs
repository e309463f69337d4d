//! Error automata of programs. States are program nodes.

use super::automaton::{PdaTransition, PushdownAutomaton};
use crate::automata::FiniteAutomaton;
use crate::error::{Error, Result};
use crate::frontend::{Edge, NodeKind, Program};

/// Add the intraprocedural part shared by all three constructions: λ-moves
/// along local edges, 0/1 moves at branching nodes, and 0/1 self-loops on
/// accepting error nodes.
fn local_moves(program: &Program, mut add: impl FnMut(usize, Option<bool>, usize)) {
    for n in program.node_ids() {
        let node = program.node(n);
        let q = n.index();
        if node.error {
            add(q, Some(false), q);
            add(q, Some(true), q);
            continue;
        }
        match &node.kind {
            NodeKind::Branch { zero, one, .. } => {
                add(q, Some(false), zero.index());
                add(q, Some(true), one.index());
            }
            NodeKind::Seq(Edge::Local(_, t)) => add(q, None, t.index()),
            NodeKind::Seq(Edge::Call(..)) | NodeKind::Return => {}
        }
    }
}

fn error_fa_skeleton(program: &Program) -> FiniteAutomaton {
    let mut fa = FiniteAutomaton::new(program.num_nodes(), program.entry().index());
    for e in program.error_nodes() {
        fa.set_accepting(e.index(), true);
    }
    local_moves(program, |q, l, t| fa.add_transition(q, l, t));
    fa
}

/// Error trace automaton of a program without calls. Accepts exactly the
/// decision vectors of paths through an error node (and their extensions,
/// since an error node loops on both symbols).
pub fn build_error_fa(program: &Program) -> Result<FiniteAutomaton> {
    if program.has_calls() {
        return Err(Error::Unsupported(
            "the finite error automaton needs a program without calls".into(),
        ));
    }
    Ok(error_fa_skeleton(program))
}

/// Error path automaton: a call pushes its return site and enters the
/// callee; the callee's return node pops a site and continues there.
pub fn build_error_pda(program: &Program) -> PushdownAutomaton {
    let mut transitions = Vec::new();
    local_moves(program, |from, input, to| {
        transitions.push(PdaTransition {
            from,
            input,
            pop: None,
            push: None,
            to,
        })
    });
    for n in program.node_ids() {
        if let NodeKind::Seq(Edge::Call(call, site)) = &program.node(n).kind {
            transitions.push(PdaTransition {
                from: n.index(),
                input: None,
                pop: None,
                push: Some(site.index()),
                to: program.proc(call.callee).initial.index(),
            });
        }
    }
    for (pid, proc) in program.procs() {
        for (_, site) in program.return_sites(pid) {
            transitions.push(PdaTransition {
                from: proc.ret.index(),
                input: None,
                pop: Some(site.index()),
                push: None,
                to: site.index(),
            });
        }
    }
    PushdownAutomaton {
        num_states: program.num_nodes(),
        num_stack_symbols: program.num_nodes(),
        initial: program.entry().index(),
        accepting: program.error_nodes().map(|n| n.index()).collect(),
        transitions,
    }
}

/// Finite over-approximation of the error path automaton: calls become
/// λ-moves into the callee, and a callee's return node may jump to any of
/// its return sites.
pub fn build_error_fa_overapprox(program: &Program) -> FiniteAutomaton {
    let mut fa = error_fa_skeleton(program);
    for n in program.node_ids() {
        if let NodeKind::Seq(Edge::Call(call, _)) = &program.node(n).kind {
            fa.add_transition(n.index(), None, program.proc(call.callee).initial.index());
        }
    }
    for (pid, proc) in program.procs() {
        for (_, site) in program.return_sites(pid) {
            fa.add_transition(proc.ret.index(), None, site.index());
        }
    }
    fa
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{fa_accepts, fa_is_empty, Emptiness};
    use crate::frontend::parse_and_lower;
    use crate::pda::{pda_accepts, pda_is_empty};
    use crate::value::BitWidth;
    use crate::word::DecisionVector;

    const P1: &str = "fn main(x) { if (x > 0) { assert(x >= 1); } }";

    fn lower(src: &str) -> Program {
        parse_and_lower(src, BitWidth::DEFAULT).unwrap()
    }

    #[test]
    fn p1_error_language() {
        let p = lower(P1);
        let fa = build_error_fa(&p).unwrap();
        let pda = build_error_pda(&p);
        for w in DecisionVector::enumerate_up_to(6) {
            let want = w.len() >= 2 && w.bits()[0] && !w.bits()[1];
            assert_eq!(fa_accepts(&fa, &w), want, "{w}");
            assert_eq!(pda_accepts(&pda, &w).unwrap(), want, "{w}");
        }
        assert_eq!(fa_is_empty(&fa), Emptiness::Witness(DecisionVector::from("10")));
        assert_eq!(pda_is_empty(&pda).unwrap(), Emptiness::Witness(DecisionVector::from("10")));
    }

    #[test]
    fn assert_false_and_no_errors() {
        let fa = build_error_fa(&lower("fn main() { assert(false); }")).unwrap();
        for w in DecisionVector::enumerate_up_to(4) {
            assert_eq!(fa_accepts(&fa, &w), w.bits().first() == Some(&false), "{w}");
        }
        let clean = lower("fn main(x) { if (x > 0) { x = 1; } }");
        assert_eq!(fa_is_empty(&build_error_fa(&clean).unwrap()), Emptiness::Empty);
        assert_eq!(pda_is_empty(&build_error_pda(&clean)).unwrap(), Emptiness::Empty);
    }

    #[test]
    fn calls_are_rejected_by_the_finite_construction() {
        let p = lower("fn f() { } fn main() { f(); }");
        assert!(matches!(build_error_fa(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn recursive_countdown() {
        let p = lower("fn f(n) { if (n > 0) { f(n - 1); } } fn main(x) { f(x); assert(false); }");
        let pda = build_error_pda(&p);
        // The trailing 0 is the failing branch of `assert(false)`.
        for s in ["00", "100", "1100", "11000"] {
            assert!(pda_accepts(&pda, &DecisionVector::from(s)).unwrap(), "{s}");
        }
        for s in ["0", "1", "10", "01"] {
            assert!(!pda_accepts(&pda, &DecisionVector::from(s)).unwrap(), "{s}");
        }
        assert_eq!(pda_is_empty(&pda).unwrap(), Emptiness::Witness(DecisionVector::from("00")));
        let over = build_error_fa_overapprox(&p);
        for w in DecisionVector::enumerate_up_to(8) {
            if pda_accepts(&pda, &w).unwrap() {
                assert!(fa_accepts(&over, &w), "{w}");
            }
        }
    }

    #[test]
    fn two_callers_make_the_overapproximation_strict() {
        // Returning from g into the wrong caller reaches the error.
        let src = "fn g(a) { return a; }
                   fn main(x) {
                     if (x > 0) { let y = g(1); assert(y == 1); } else { let z = g(2); }
                   }";
        let p = lower(src);
        let pda = build_error_pda(&p);
        let over = build_error_fa_overapprox(&p);
        let mut strict = false;
        for w in DecisionVector::enumerate_up_to(6) {
            let in_pda = pda_accepts(&pda, &w).unwrap();
            let in_fa = fa_accepts(&over, &w);
            assert!(!in_pda || in_fa, "{w}");
            strict |= in_fa && !in_pda;
        }
        assert!(strict);
    }
}
