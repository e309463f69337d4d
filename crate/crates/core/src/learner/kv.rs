//! Kearns–Vazirani learning with a discrimination tree.

use super::{ActiveLearner, Memo};
use crate::automata::Dfa;
use crate::error::Result;
use crate::teacher::MembershipOracle;
use crate::word::DecisionVector;

#[derive(Debug, Clone)]
enum TreeNode {
    /// A hypothesis state, by index into the access strings.
    Leaf(usize),
    /// `children[b]` holds the access strings `u` with
    /// `membership(u · suffix) == b`.
    Inner { suffix: DecisionVector, children: [usize; 2] },
}

/// Internal nodes carry distinguishing suffixes, leaves carry access
/// strings. Before the first counterexample the tree is absent and the
/// hypothesis has a single state.
#[derive(Debug, Clone, Default)]
pub struct DiscriminationTree {
    nodes: Vec<TreeNode>,
    access: Vec<DecisionVector>,
    leaf_of: Vec<usize>,
    memo: Memo,
    last: Option<Dfa>,
}

impl DiscriminationTree {
    pub fn new() -> Self {
        Self {
            access: vec![DecisionVector::empty()],
            leaf_of: vec![usize::MAX],
            ..Self::default()
        }
    }

    pub fn access_strings(&self) -> &[DecisionVector] {
        &self.access
    }

    fn sift(&mut self, w: &DecisionVector, oracle: &mut dyn MembershipOracle) -> Result<usize> {
        if self.nodes.is_empty() {
            return Ok(0);
        }
        let mut n = 0;
        loop {
            match &self.nodes[n] {
                TreeNode::Leaf(s) => return Ok(*s),
                TreeNode::Inner { suffix, children } => {
                    let (suffix, children) = (suffix.clone(), *children);
                    let b = self.memo.query(&w.concat(&suffix), oracle)?;
                    n = children[b as usize];
                }
            }
        }
    }

    /// Suffix of the lowest common ancestor of two leaves.
    fn separator(&self, a: usize, b: usize) -> DecisionVector {
        let path = |leaf: usize| {
            let mut p = vec![leaf];
            while let Some(parent) = self.parent(*p.last().unwrap()) {
                p.push(parent);
            }
            p
        };
        let (pa, pb) = (path(self.leaf_of[a]), path(self.leaf_of[b]));
        let lca = pa.iter().find(|n| pb.contains(n)).expect("common root");
        match &self.nodes[*lca] {
            TreeNode::Inner { suffix, .. } => suffix.clone(),
            TreeNode::Leaf(_) => unreachable!("distinct leaves"),
        }
    }

    fn parent(&self, n: usize) -> Option<usize> {
        self.nodes.iter().position(|node| match node {
            TreeNode::Inner { children, .. } => children.contains(&n),
            TreeNode::Leaf(_) => false,
        })
    }

    /// Replace the leaf of `state` by an inner node on `suffix` whose
    /// children are `state` and a new state with access string `access`.
    fn split(
        &mut self,
        state: usize,
        access: DecisionVector,
        suffix: DecisionVector,
        oracle: &mut dyn MembershipOracle,
    ) -> Result<()> {
        let new_state = self.access.len();
        let old_bit = self.memo.query(&self.access[state].concat(&suffix), oracle)?;
        let new_bit = self.memo.query(&access.concat(&suffix), oracle)?;
        debug_assert_ne!(old_bit, new_bit, "suffix must separate the states");
        self.access.push(access);
        let leaf = self.leaf_of[state];
        let old_leaf = self.nodes.len();
        self.nodes.push(TreeNode::Leaf(state));
        let new_leaf = self.nodes.len();
        self.nodes.push(TreeNode::Leaf(new_state));
        let mut children = [0; 2];
        children[old_bit as usize] = old_leaf;
        children[new_bit as usize] = new_leaf;
        self.nodes[leaf] = TreeNode::Inner { suffix, children };
        self.leaf_of[state] = old_leaf;
        self.leaf_of.push(new_leaf);
        Ok(())
    }
}

impl ActiveLearner for DiscriminationTree {
    fn conjecture(&mut self, oracle: &mut dyn MembershipOracle) -> Result<Dfa> {
        let n = self.access.len();
        let mut delta = Vec::with_capacity(n);
        let mut accepting = Vec::with_capacity(n);
        for s in 0..n {
            let u = self.access[s].clone();
            accepting.push(self.memo.query(&u, oracle)?);
            let mut next = [0; 2];
            for b in [false, true] {
                next[b as usize] = self.sift(&u.with(b), oracle)?;
            }
            delta.push(next);
        }
        let dfa = Dfa::new(0, accepting, delta);
        self.last = Some(dfa.clone());
        Ok(dfa)
    }

    fn process_counterexample(&mut self, cex: &DecisionVector, oracle: &mut dyn MembershipOracle) -> Result<()> {
        let hyp = match &self.last {
            Some(h) => h.clone(),
            None => self.conjecture(oracle)?,
        };
        if self.nodes.is_empty() {
            // The root separates by acceptance; a counterexample to the
            // one-state hypothesis is on the other side from λ.
            let lambda = self.memo.query(&DecisionVector::empty(), oracle)?;
            let c = self.memo.query(cex, oracle)?;
            if c == lambda {
                return Ok(());
            }
            self.nodes.push(TreeNode::Leaf(0));
            self.leaf_of[0] = 0;
            return self.split(0, cex.clone(), DecisionVector::empty(), oracle);
        }
        let mut state = hyp.initial();
        for i in 1..=cex.len() {
            let prefix = cex.prefix(i);
            let predicted = hyp.next(state, cex.bits()[i - 1]);
            let actual = self.sift(&prefix, oracle)?;
            if actual != predicted {
                let sep = self.separator(actual, predicted);
                let suffix = DecisionVector::from_bits(vec![cex.bits()[i - 1]]).concat(&sep);
                return self.split(state, cex.prefix(i - 1), suffix, oracle);
            }
            state = predicted;
        }
        // The hypothesis already agrees with the tree on `cex`; the
        // counterexample was stale.
        Ok(())
    }

    fn distinct_queries(&self) -> usize {
        self.memo.len()
    }
}
