//! Pushdown automata over `{0, 1}`: product with a DFA, emptiness with a
//! shortest witness, and membership.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, Emptiness, Label};
use crate::error::{Error, Result};
use crate::word::DecisionVector;

/// Default cap on grammar items settled by [`pda_is_empty`].
pub const DEFAULT_ITEM_CAP: usize = 100_000;

/// `(from, input, pop, push, to)`; `None` in `input`, `pop` or `push` is λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdaTransition {
    pub from: usize,
    #[serde(with = "label_serde")]
    pub input: Label,
    pub pop: Option<usize>,
    pub push: Option<usize>,
    pub to: usize,
}

mod label_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(l: &Option<bool>, s: S) -> Result<S::Ok, S::Error> {
        match l {
            None => s.serialize_none(),
            Some(b) => s.serialize_str(if *b { "1" } else { "0" }),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<bool>, D::Error> {
        match Option::<String>::deserialize(d)?.as_deref() {
            None => Ok(None),
            Some("0") => Ok(Some(false)),
            Some("1") => Ok(Some(true)),
            Some(other) => Err(serde::de::Error::custom(format!("unknown symbol `{other}`"))),
        }
    }
}

/// Acceptance is by final state with any stack content, starting from the
/// empty stack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushdownAutomaton {
    pub num_states: usize,
    pub num_stack_symbols: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<PdaTransition>,
}

impl PushdownAutomaton {
    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_states;
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.initial >= n {
            return bad(format!("initial state {} out of range", self.initial));
        }
        if let Some(q) = self.accepting.iter().find(|&&q| q >= n) {
            return bad(format!("accepting state {q} out of range"));
        }
        for t in &self.transitions {
            if t.from >= n || t.to >= n {
                return bad(format!("transition {t:?} leaves the state set"));
            }
            if t.pop.into_iter().chain(t.push).any(|g| g >= self.num_stack_symbols) {
                return bad(format!("transition {t:?} uses an unknown stack symbol"));
            }
        }
        Ok(())
    }
}

/// Product with a DFA: `L(result) = L(p) ∩ L(d)`. Pairs whose DFA
/// component cannot reach acceptance are dropped.
pub fn pda_intersect_dfa(p: &PushdownAutomaton, d: &Dfa) -> PushdownAutomaton {
    // DFA states from which some accepting state is reachable.
    let n = d.num_states();
    let mut live: Vec<bool> = (0..n).map(|q| d.is_accepting(q)).collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if !live[q] && (live[d.next(q, false)] || live[d.next(q, true)]) {
                live[q] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut out_edges: Vec<Vec<&PdaTransition>> = vec![Vec::new(); p.num_states];
    for t in &p.transitions {
        out_edges[t.from].push(t);
    }
    let start = (p.initial, d.initial());
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut transitions = Vec::new();
    if live[start.1] {
        index.insert(start, 0);
        pairs.push(start);
    }
    let mut i = 0;
    while i < pairs.len() {
        let (q, s) = pairs[i];
        for t in &out_edges[q] {
            let s2 = match t.input {
                None => s,
                Some(b) => d.next(s, b),
            };
            if !live[s2] {
                continue;
            }
            let target = (t.to, s2);
            let j = *index.entry(target).or_insert_with(|| {
                pairs.push(target);
                pairs.len() - 1
            });
            transitions.push(PdaTransition {
                from: i,
                input: t.input,
                pop: t.pop,
                push: t.push,
                to: j,
            });
        }
        i += 1;
    }
    if pairs.is_empty() {
        // Nothing is accepted; keep a single rejecting state.
        return PushdownAutomaton {
            num_states: 1,
            num_stack_symbols: p.num_stack_symbols,
            initial: 0,
            accepting: Vec::new(),
            transitions: Vec::new(),
        };
    }
    let accepting = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(q, s))| p.is_accepting(q) && d.is_accepting(s))
        .map(|(k, _)| k)
        .collect();
    PushdownAutomaton {
        num_states: pairs.len(),
        num_stack_symbols: p.num_stack_symbols,
        initial: 0,
        accepting,
        transitions,
    }
}

/// The DFA accepting exactly `w`.
fn word_dfa(w: &DecisionVector) -> Dfa {
    let n = w.len();
    let sink = n + 1;
    let mut delta = Vec::with_capacity(n + 2);
    for (i, &b) in w.bits().iter().enumerate() {
        let mut row = [sink; 2];
        row[b as usize] = i + 1;
        delta.push(row);
    }
    delta.push([sink; 2]);
    delta.push([sink; 2]);
    let mut accepting = vec![false; n + 2];
    accepting[n] = true;
    Dfa::new(0, accepting, delta)
}

/// Membership. Errors only if the emptiness search exceeds its cap.
pub fn pda_accepts(p: &PushdownAutomaton, w: &DecisionVector) -> Result<bool> {
    let product = pda_intersect_dfa(p, &word_dfa(w));
    Ok(!pda_is_empty_with_cap(&product, DEFAULT_ITEM_CAP)?.is_empty())
}

/// Emptiness with the default item cap.
pub fn pda_is_empty(p: &PushdownAutomaton) -> Result<Emptiness> {
    pda_is_empty_with_cap(p, DEFAULT_ITEM_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Item {
    /// `Same(s, q)`: from entry `s` reach `q` at the same stack height
    /// without popping below it.
    Same(usize, usize),
    /// `Reach(q)`: reach `q` from the initial configuration.
    Reach(usize),
}

/// Emptiness, returning the shortest accepted word with lexicographic
/// tie-break.
///
/// Runs a Knuth-style generalized Dijkstra over the grammar of summaries:
/// concatenation is monotone in the shortlex order, so items settle with
/// their least derivable word.
pub fn pda_is_empty_with_cap(p: &PushdownAutomaton, cap: usize) -> Result<Emptiness> {
    let p = normalize(p);
    if p.accepting.is_empty() {
        return Ok(Emptiness::Empty);
    }
    let n = p.num_states;
    let mut internal: Vec<Vec<(Label, usize)>> = vec![Vec::new(); n];
    let mut pushes: Vec<Vec<(Label, usize, usize)>> = vec![Vec::new(); n];
    // pops[r] lists (input, γ, target).
    let mut pops: Vec<Vec<(Label, usize, usize)>> = vec![Vec::new(); n];
    for t in &p.transitions {
        match (t.pop, t.push) {
            (None, None) => internal[t.from].push((t.input, t.to)),
            (None, Some(g)) => pushes[t.from].push((t.input, g, t.to)),
            (Some(g), None) => pops[t.from].push((t.input, g, t.to)),
            (Some(_), Some(_)) => unreachable!("normalized"),
        }
    }
    let accepting: Vec<bool> = (0..n).map(|q| p.is_accepting(q)).collect();

    let mut settled: HashMap<Item, DecisionVector> = HashMap::new();
    // Settled `Same(t, r)` items by entry `t`.
    let mut by_entry: Vec<Vec<usize>> = vec![Vec::new(); n];
    // callers[t]: settled (s, q, input, γ) with `Same(s, q)` and a push
    // from `q` into entry `t`.
    let mut callers: Vec<Vec<(usize, usize, Label, usize)>> = vec![Vec::new(); n];
    let mut reach_entries: Vec<bool> = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(DecisionVector, Item)>> = BinaryHeap::new();

    let cat = |parts: &[&DecisionVector], l1: Label, l2: Label| -> DecisionVector {
        // parts[0] · l1 · parts[1] · l2 (missing parts are skipped).
        let mut bits = parts[0].bits().to_vec();
        bits.extend(l1);
        if let Some(mid) = parts.get(1) {
            bits.extend_from_slice(mid.bits());
        }
        bits.extend(l2);
        DecisionVector::from_bits(bits)
    };

    heap.push(Reverse((DecisionVector::empty(), Item::Same(p.initial, p.initial))));
    heap.push(Reverse((DecisionVector::empty(), Item::Reach(p.initial))));

    while let Some(Reverse((w, item))) = heap.pop() {
        if settled.contains_key(&item) {
            continue;
        }
        if settled.len() >= cap {
            return Err(Error::ResourceExhausted(format!(
                "pushdown emptiness check exceeded {cap} grammar items"
            )));
        }
        settled.insert(item, w.clone());
        match item {
            Item::Reach(q) => {
                if accepting[q] {
                    return Ok(Emptiness::Witness(w));
                }
                for &(a, _, t) in &pushes[q] {
                    heap.push(Reverse((cat(&[&w], a, None), Item::Reach(t))));
                    heap.push(Reverse((DecisionVector::empty(), Item::Same(t, t))));
                }
                reach_entries[q] = true;
                for &r in &by_entry[q] {
                    if !settled.contains_key(&Item::Reach(r)) {
                        let sw = &settled[&Item::Same(q, r)];
                        heap.push(Reverse((cat(&[&w, sw], None, None), Item::Reach(r))));
                    }
                }
            }
            Item::Same(s, q) => {
                by_entry[s].push(q);
                if reach_entries[s] && !settled.contains_key(&Item::Reach(q)) {
                    let rw = &settled[&Item::Reach(s)];
                    heap.push(Reverse((cat(&[rw, &w], None, None), Item::Reach(q))));
                }
                for &(a, q2) in &internal[q] {
                    if !settled.contains_key(&Item::Same(s, q2)) {
                        heap.push(Reverse((cat(&[&w], a, None), Item::Same(s, q2))));
                    }
                }
                for &(a, g, t) in &pushes[q] {
                    callers[t].push((s, q, a, g));
                    heap.push(Reverse((DecisionVector::empty(), Item::Same(t, t))));
                    for &r in &by_entry[t] {
                        let inner = &settled[&Item::Same(t, r)];
                        for &(b, g2, q2) in &pops[r] {
                            if g2 == g && !settled.contains_key(&Item::Same(s, q2)) {
                                heap.push(Reverse((cat(&[&w, inner], a, b), Item::Same(s, q2))));
                            }
                        }
                    }
                }
                // This item as the inner summary of a call into entry `s`.
                if !pops[q].is_empty() {
                    for &(s0, q0, a, g) in &callers[s] {
                        let outer = &settled[&Item::Same(s0, q0)];
                        for &(b, g2, q2) in &pops[q] {
                            if g2 == g && !settled.contains_key(&Item::Same(s0, q2)) {
                                heap.push(Reverse((cat(&[outer, &w], a, b), Item::Same(s0, q2))));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Emptiness::Empty)
}

/// Split transitions that both pop and push through a fresh state.
fn normalize(p: &PushdownAutomaton) -> PushdownAutomaton {
    let mut out = p.clone();
    out.transitions.clear();
    for t in &p.transitions {
        if let (Some(_), Some(g)) = (t.pop, t.push) {
            let mid = out.num_states;
            out.num_states += 1;
            out.transitions.push(PdaTransition {
                push: None,
                to: mid,
                ..*t
            });
            out.transitions.push(PdaTransition {
                from: mid,
                input: None,
                pop: None,
                push: Some(g),
                to: t.to,
            });
        } else {
            out.transitions.push(*t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(from: usize, input: Label, pop: Option<usize>, push: Option<usize>, to: usize) -> PdaTransition {
        PdaTransition {
            from,
            input,
            pop,
            push,
            to,
        }
    }

    /// `{ 1^n 0^n 1 : n >= 0 }`: push on 1, pop on 0, accept after a final 1.
    fn balanced() -> PushdownAutomaton {
        PushdownAutomaton {
            num_states: 3,
            num_stack_symbols: 1,
            initial: 0,
            accepting: vec![2],
            transitions: vec![
                t(0, Some(true), None, Some(0), 0),
                t(0, None, None, None, 1),
                t(1, Some(false), Some(0), None, 1),
                t(1, Some(true), None, None, 2),
            ],
        }
    }

    /// Explicit-configuration search with a bounded stack, as an oracle.
    fn simulate(p: &PushdownAutomaton, w: &DecisionVector, max_stack: usize) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut todo = vec![(p.initial, 0usize, Vec::<usize>::new())];
        while let Some((q, i, stack)) = todo.pop() {
            if !seen.insert((q, i, stack.clone())) {
                continue;
            }
            if i == w.len() && p.is_accepting(q) {
                return true;
            }
            for tr in p.transitions.iter().filter(|tr| tr.from == q) {
                let j = match tr.input {
                    None => i,
                    Some(b) if i < w.len() && w.bits()[i] == b => i + 1,
                    _ => continue,
                };
                let mut st = stack.clone();
                if let Some(g) = tr.pop {
                    if st.pop() != Some(g) {
                        continue;
                    }
                }
                if let Some(g) = tr.push {
                    if st.len() >= max_stack {
                        continue;
                    }
                    st.push(g);
                }
                todo.push((tr.to, j, st));
            }
        }
        false
    }

    #[test]
    fn membership_matches_simulation() {
        let p = balanced();
        for w in DecisionVector::enumerate_up_to(9) {
            assert_eq!(pda_accepts(&p, &w).unwrap(), simulate(&p, &w, 16), "{w}");
        }
        assert!(pda_accepts(&p, &DecisionVector::from("11001")).unwrap());
        // Leftover stack content does not prevent acceptance.
        assert!(pda_accepts(&p, &DecisionVector::from("1101")).unwrap());
        assert!(!pda_accepts(&p, &DecisionVector::from("100")).unwrap());
    }

    #[test]
    fn shortest_witness() {
        assert_eq!(pda_is_empty(&balanced()).unwrap(), Emptiness::Witness(DecisionVector::from("1")));
        let mut p = balanced();
        p.accepting.clear();
        assert_eq!(pda_is_empty(&p).unwrap(), Emptiness::Empty);
    }

    #[test]
    fn product_restricts_language() {
        // DFA for words starting with 10.
        let d = Dfa::new(0, vec![false, false, true, false], vec![[3, 1], [2, 3], [2, 2], [3, 3]]);
        let prod = pda_intersect_dfa(&balanced(), &d);
        assert_eq!(pda_is_empty(&prod).unwrap(), Emptiness::Witness(DecisionVector::from("101")));
        for w in DecisionVector::enumerate_up_to(7) {
            let want = simulate(&balanced(), &w, 16) && d.accepts(&w);
            assert_eq!(pda_accepts(&prod, &w).unwrap(), want, "{w}");
        }
        let none = pda_intersect_dfa(&balanced(), &Dfa::empty_language());
        assert_eq!(pda_is_empty(&none).unwrap(), Emptiness::Empty);
    }

    #[test]
    fn pop_push_transitions_are_normalized() {
        // Push a, swap a for b, pop b: accepts "110".
        let p = PushdownAutomaton {
            num_states: 4,
            num_stack_symbols: 2,
            initial: 0,
            accepting: vec![3],
            transitions: vec![
                t(0, Some(true), None, Some(0), 1),
                t(1, Some(true), Some(0), Some(1), 2),
                t(2, Some(false), Some(1), None, 3),
            ],
        };
        assert_eq!(pda_is_empty(&p).unwrap(), Emptiness::Witness(DecisionVector::from("110")));
        assert!(pda_accepts(&p, &DecisionVector::from("110")).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let p = balanced();
        assert_eq!(PushdownAutomaton::from_json(&p.to_json()).unwrap(), p);
        assert!(PushdownAutomaton::from_json("{\"num_states\":1,\"num_stack_symbols\":0,\"initial\":4,\"accepting\":[],\"transitions\":[]}").is_err());
    }
}
