//! Angluin's L* with an observation table.

use std::collections::HashMap;

use super::{ActiveLearner, Memo};
use crate::automata::Dfa;
use crate::error::Result;
use crate::teacher::MembershipOracle;
use crate::word::DecisionVector;

/// Prefixes `S`, suffixes `E`, and membership answers for `(S ∪ S·Σ)·E`.
#[derive(Debug, Clone, Default)]
pub struct ObservationTable {
    prefixes: Vec<DecisionVector>,
    suffixes: Vec<DecisionVector>,
    memo: Memo,
}

impl ObservationTable {
    pub fn new() -> Self {
        Self {
            prefixes: vec![DecisionVector::empty()],
            suffixes: vec![DecisionVector::empty()],
            memo: Memo::default(),
        }
    }

    pub fn prefixes(&self) -> &[DecisionVector] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[DecisionVector] {
        &self.suffixes
    }

    fn row(&mut self, u: &DecisionVector, oracle: &mut dyn MembershipOracle) -> Result<Vec<bool>> {
        let mut row = Vec::with_capacity(self.suffixes.len());
        for i in 0..self.suffixes.len() {
            let w = u.concat(&self.suffixes[i]);
            row.push(self.memo.query(&w, oracle)?);
        }
        Ok(row)
    }

    /// Extend `S` until every one-symbol extension has the row of some
    /// prefix. Returns false if nothing had to be added.
    fn close(&mut self, oracle: &mut dyn MembershipOracle) -> Result<bool> {
        let mut rows = Vec::new();
        for i in 0..self.prefixes.len() {
            let s = self.prefixes[i].clone();
            rows.push(self.row(&s, oracle)?);
        }
        for i in 0..self.prefixes.len() {
            for b in [false, true] {
                let ext = self.prefixes[i].with(b);
                let r = self.row(&ext, oracle)?;
                if !rows.contains(&r) {
                    self.prefixes.push(ext);
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Add a distinguishing suffix when two prefixes with equal rows have
    /// extensions with different rows. Returns false if consistent.
    fn make_consistent(&mut self, oracle: &mut dyn MembershipOracle) -> Result<bool> {
        let n = self.prefixes.len();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let s = self.prefixes[i].clone();
            rows.push(self.row(&s, oracle)?);
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i] != rows[j] {
                    continue;
                }
                for b in [false, true] {
                    let (si, sj) = (self.prefixes[i].with(b), self.prefixes[j].with(b));
                    let (ri, rj) = (self.row(&si, oracle)?, self.row(&sj, oracle)?);
                    if let Some(k) = (0..ri.len()).find(|&k| ri[k] != rj[k]) {
                        let e = DecisionVector::from_bits(vec![b]).concat(&self.suffixes[k]);
                        self.suffixes.push(e);
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

impl ActiveLearner for ObservationTable {
    fn conjecture(&mut self, oracle: &mut dyn MembershipOracle) -> Result<Dfa> {
        while self.close(oracle)? || self.make_consistent(oracle)? {}
        let mut states: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut reps = Vec::new();
        for i in 0..self.prefixes.len() {
            let s = self.prefixes[i].clone();
            let r = self.row(&s, oracle)?;
            if let std::collections::hash_map::Entry::Vacant(e) = states.entry(r) {
                e.insert(reps.len());
                reps.push(s);
            }
        }
        let mut delta = Vec::with_capacity(reps.len());
        let mut accepting = Vec::with_capacity(reps.len());
        for s in &reps {
            // Column 0 is the empty suffix.
            accepting.push(self.memo.query(s, oracle)?);
            let mut next = [0; 2];
            for b in [false, true] {
                let r = self.row(&s.with(b), oracle)?;
                next[b as usize] = states[&r];
            }
            delta.push(next);
        }
        Ok(Dfa::new(0, accepting, delta))
    }

    fn process_counterexample(&mut self, cex: &DecisionVector, _oracle: &mut dyn MembershipOracle) -> Result<()> {
        for p in cex.prefixes() {
            if !self.prefixes.contains(&p) {
                self.prefixes.push(p);
            }
        }
        Ok(())
    }

    fn distinct_queries(&self) -> usize {
        self.memo.len()
    }
}
