#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use pacverify::automata::Dfa;
use pacverify::frontend::{Edge, NodeId, NodeKind, Program};
use pacverify::DecisionVector;
use rand::Rng;

/// A uniformly random complete DFA with `n` states.
pub fn random_dfa(rng: &mut impl Rng, n: usize) -> Dfa {
    let accepting = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let delta = (0..n).map(|_| [rng.gen_range(0..n), rng.gen_range(0..n)]).collect();
    Dfa::new(0, accepting, delta)
}

/// A random DFA whose minimal automaton has exactly `n` states.
pub fn random_minimal_dfa(rng: &mut impl Rng, n: usize) -> Dfa {
    loop {
        let d = random_dfa(rng, n).minimize();
        if d.num_states() == n {
            return d;
        }
    }
}

/// Decision vectors of length at most `max_len` along interprocedural CFG
/// paths that pass through an error node, by exhaustive search over
/// (node, call stack, decisions so far). Data is ignored. Words extending
/// an error path are included, since the run stays in the error node.
pub fn error_words_by_search(program: &Program, max_len: usize, max_stack: usize) -> BTreeSet<DecisionVector> {
    let mut found = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut work = vec![(program.entry(), Vec::<NodeId>::new(), DecisionVector::empty())];
    while let Some((n, stack, word)) = work.pop() {
        if !seen.insert((n, stack.clone(), word.clone())) {
            continue;
        }
        let node = program.node(n);
        if node.error {
            for suffix in DecisionVector::enumerate_up_to(max_len - word.len()) {
                found.insert(word.concat(&suffix));
            }
            continue;
        }
        match &node.kind {
            NodeKind::Branch { zero, one, .. } => {
                if word.len() < max_len {
                    work.push((*zero, stack.clone(), word.with(false)));
                    work.push((*one, stack, word.with(true)));
                }
            }
            NodeKind::Seq(Edge::Local(_, t)) => work.push((*t, stack, word)),
            NodeKind::Seq(Edge::Call(call, site)) => {
                if stack.len() < max_stack {
                    let mut s = stack;
                    s.push(*site);
                    work.push((program.proc(call.callee).initial, s, word));
                }
            }
            NodeKind::Return => {
                let mut s = stack;
                if let Some(site) = s.pop() {
                    work.push((site, s, word));
                }
            }
        }
    }
    found
}
