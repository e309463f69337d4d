//! Finite automata over `{0, 1}` with λ-moves, and complete DFAs.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};

use crate::word::DecisionVector;

/// A transition label: `Some(bit)` reads one symbol, `None` is a λ-move.
pub type Label = Option<bool>;

/// Outcome of an emptiness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// The shortest accepted word, least in lexicographic order among the
    /// shortest.
    Witness(DecisionVector),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(self) -> Option<DecisionVector> {
        match self {
            Emptiness::Empty => None,
            Emptiness::Witness(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAutomaton {
    initial: usize,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Label, usize)>>,
}

impl FiniteAutomaton {
    /// An automaton with `num_states` states, no transitions and no
    /// accepting states.
    pub fn new(num_states: usize, initial: usize) -> Self {
        assert!(initial < num_states, "initial state out of range");
        Self {
            initial,
            accepting: vec![false; num_states],
            edges: vec![Vec::new(); num_states],
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.accepting.push(false);
        self.edges.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn add_transition(&mut self, from: usize, label: Label, to: usize) {
        assert!(from < self.num_states() && to < self.num_states(), "transition endpoint out of range");
        if !self.edges[from].contains(&(label, to)) {
            self.edges[from].push((label, to));
        }
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.accepting[q])
    }

    pub fn edges(&self, q: usize) -> &[(Label, usize)] {
        &self.edges[q]
    }

    /// All transitions as `(from, label, to)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Label, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(q, es)| es.iter().map(move |&(l, t)| (q, l, t)))
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    fn closure(&self, set: &mut [bool]) {
        let mut stack: Vec<usize> = (0..set.len()).filter(|&q| set[q]).collect();
        while let Some(q) = stack.pop() {
            for &(l, t) in &self.edges[q] {
                if l.is_none() && !set[t] {
                    set[t] = true;
                    stack.push(t);
                }
            }
        }
    }

    fn step(&self, set: &[bool], bit: bool) -> Vec<bool> {
        let mut next = vec![false; set.len()];
        for q in (0..set.len()).filter(|&q| set[q]) {
            for &(l, t) in &self.edges[q] {
                if l == Some(bit) {
                    next[t] = true;
                }
            }
        }
        self.closure(&mut next);
        next
    }
}

/// A complete deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<[usize; 2]>,
}

impl Dfa {
    /// Build from a transition table; `delta[q][b]` is the successor of `q`
    /// on bit `b`.
    pub fn new(initial: usize, accepting: Vec<bool>, delta: Vec<[usize; 2]>) -> Self {
        let n = delta.len();
        assert!(n > 0 && initial < n && accepting.len() == n, "malformed DFA");
        assert!(delta.iter().flatten().all(|&t| t < n), "DFA successor out of range");
        Self {
            initial,
            accepting,
            delta,
        }
    }

    /// One state accepting everything.
    pub fn universal() -> Self {
        Self::new(0, vec![true], vec![[0, 0]])
    }

    /// One state accepting nothing.
    pub fn empty_language() -> Self {
        Self::new(0, vec![false], vec![[0, 0]])
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.accepting[q])
    }

    pub fn next(&self, q: usize, bit: bool) -> usize {
        self.delta[q][bit as usize]
    }

    pub fn run_from(&self, q: usize, w: &[bool]) -> usize {
        w.iter().fold(q, |q, &b| self.next(q, b))
    }

    pub fn accepts(&self, w: &DecisionVector) -> bool {
        self.accepting[self.run_from(self.initial, w.bits())]
    }

    pub fn complement(&self) -> Dfa {
        Dfa::new(self.initial, self.accepting.iter().map(|a| !a).collect(), self.delta.clone())
    }

    /// View as an automaton with λ-moves.
    pub fn to_fa(&self) -> FiniteAutomaton {
        let mut fa = FiniteAutomaton::new(self.num_states(), self.initial);
        for q in 0..self.num_states() {
            fa.set_accepting(q, self.accepting[q]);
            for b in [false, true] {
                fa.add_transition(q, Some(b), self.next(q, b));
            }
        }
        fa
    }

    /// The language-equal DFA with the fewest states, with states numbered
    /// in breadth-first order from the initial state.
    pub fn minimize(&self) -> Dfa {
        // Restrict to reachable states first.
        let mut order = vec![self.initial];
        let mut index = HashMap::from([(self.initial, 0usize)]);
        let mut i = 0;
        while i < order.len() {
            for b in [false, true] {
                let t = self.next(order[i], b);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                    e.insert(order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        // Moore refinement.
        let mut class: Vec<usize> = order.iter().map(|&q| self.accepting[q] as usize).collect();
        loop {
            let mut sigs: HashMap<(usize, usize, usize), usize> = HashMap::new();
            let next_class: Vec<usize> = order
                .iter()
                .enumerate()
                .map(|(k, &q)| {
                    let sig = (
                        class[k],
                        class[index[&self.next(q, false)]],
                        class[index[&self.next(q, true)]],
                    );
                    let n = sigs.len();
                    *sigs.entry(sig).or_insert(n)
                })
                .collect();
            let stable = sigs.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next_class;
            if stable {
                break;
            }
        }
        // Renumber classes in BFS order.
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut reps = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        renumber.insert(class[0], 0);
        reps.push(0);
        while let Some(k) = queue.pop_front() {
            for b in [false, true] {
                let t = index[&self.next(order[k], b)];
                if let std::collections::hash_map::Entry::Vacant(e) = renumber.entry(class[t]) {
                    e.insert(reps.len());
                    reps.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = reps
            .iter()
            .map(|&k| {
                let q = order[k];
                [
                    renumber[&class[index[&self.next(q, false)]]],
                    renumber[&class[index[&self.next(q, true)]]],
                ]
            })
            .collect();
        let accepting = reps.iter().map(|&k| self.accepting[order[k]]).collect();
        Dfa::new(0, accepting, delta)
    }
}

/// Membership, respecting λ-closure.
pub fn fa_accepts(a: &FiniteAutomaton, w: &DecisionVector) -> bool {
    let mut set = vec![false; a.num_states()];
    set[a.initial] = true;
    a.closure(&mut set);
    for &b in w.bits() {
        set = a.step(&set, b);
        if !set.contains(&true) {
            return false;
        }
    }
    set.iter().zip(&a.accepting).any(|(&s, &f)| s && f)
}

/// Subset construction. The empty subset, when reachable, becomes a
/// rejecting sink.
pub fn fa_determinize(a: &FiniteAutomaton) -> Dfa {
    let mut start = vec![false; a.num_states()];
    start[a.initial] = true;
    a.closure(&mut start);
    let mut index: HashMap<Vec<bool>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut delta: Vec<[usize; 2]> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut row = [0; 2];
        for b in [false, true] {
            let next = a.step(&subsets[i], b);
            let n = subsets.len();
            let id = *index.entry(next.clone()).or_insert(n);
            if id == n {
                subsets.push(next);
            }
            row[b as usize] = id;
        }
        delta.push(row);
        i += 1;
    }
    let accepting = subsets
        .iter()
        .map(|s| s.iter().zip(&a.accepting).any(|(&x, &f)| x && f))
        .collect();
    Dfa::new(0, accepting, delta)
}

/// Product automaton accepting `L(a) ∩ L(b)`; only reachable pairs are
/// built.
pub fn fa_product_intersect(a: &Dfa, b: &FiniteAutomaton) -> FiniteAutomaton {
    let start = (a.initial, b.initial);
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut pairs = vec![start];
    let mut edges: Vec<(usize, Label, (usize, usize))> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for &(l, t) in b.edges(q) {
            let target = match l {
                None => (p, t),
                Some(bit) => (a.next(p, bit), t),
            };
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(target) {
                e.insert(pairs.len());
                pairs.push(target);
            }
            edges.push((i, l, target));
        }
        i += 1;
    }
    let mut out = FiniteAutomaton::new(pairs.len(), 0);
    for (k, &(p, q)) in pairs.iter().enumerate() {
        out.set_accepting(k, a.is_accepting(p) && b.is_accepting(q));
    }
    for (from, l, to) in edges {
        out.add_transition(from, l, index[&to]);
    }
    out
}

/// Shortest accepted word (lexicographically least among the shortest), or
/// `Empty`.
pub fn fa_is_empty(a: &FiniteAutomaton) -> Emptiness {
    // Words only grow along edges and extending preserves the shortlex
    // order, so a Dijkstra-style search settles each state with its least
    // access word.
    let mut best: Vec<Option<DecisionVector>> = vec![None; a.num_states()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((DecisionVector::empty(), a.initial)));
    while let Some(Reverse((w, q))) = heap.pop() {
        if best[q].is_some() {
            continue;
        }
        if a.accepting[q] {
            return Emptiness::Witness(w);
        }
        for &(l, t) in &a.edges[q] {
            if best[t].is_none() {
                let next = match l {
                    None => w.clone(),
                    Some(bit) => w.with(bit),
                };
                heap.push(Reverse((next, t)));
            }
        }
        best[q] = Some(w);
    }
    Emptiness::Empty
}

/// `None` if the DFAs accept the same language, otherwise the shortest
/// (then lexicographically least) word accepted by exactly one of them.
pub fn dfa_equiv_counterexample(a: &Dfa, b: &Dfa) -> Option<DecisionVector> {
    let start = (a.initial, b.initial);
    let mut seen = HashMap::from([(start, ())]);
    let mut queue = VecDeque::from([(start, DecisionVector::empty())]);
    while let Some(((p, q), w)) = queue.pop_front() {
        if a.is_accepting(p) != b.is_accepting(q) {
            return Some(w);
        }
        for bit in [false, true] {
            let next = (a.next(p, bit), b.next(q, bit));
            if seen.insert(next, ()).is_none() {
                queue.push_back((next, w.with(bit)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(s: &str) -> DecisionVector {
        DecisionVector::from(s)
    }

    /// `10(0|1)*` with a λ-move in the middle.
    fn ten_star() -> FiniteAutomaton {
        let mut a = FiniteAutomaton::new(4, 0);
        a.add_transition(0, Some(true), 1);
        a.add_transition(1, None, 2);
        a.add_transition(2, Some(false), 3);
        a.add_transition(3, Some(false), 3);
        a.add_transition(3, Some(true), 3);
        a.set_accepting(3, true);
        a
    }

    #[test]
    fn acceptance_with_lambda_moves() {
        let a = ten_star();
        assert!(fa_accepts(&a, &dv("100")));
        assert!(fa_accepts(&a, &dv("10")));
        assert!(!fa_accepts(&a, &dv("11")));
        assert!(!fa_accepts(&a, &dv("")));
        assert!(fa_accepts(&Dfa::universal().to_fa(), &dv("0110")));
        assert!(!fa_accepts(&Dfa::empty_language().to_fa(), &dv("")));
    }

    #[test]
    fn emptiness_witnesses() {
        assert_eq!(fa_is_empty(&ten_star()), Emptiness::Witness(dv("10")));
        assert_eq!(fa_is_empty(&Dfa::empty_language().to_fa()), Emptiness::Empty);
        assert_eq!(fa_is_empty(&Dfa::universal().to_fa()), Emptiness::Witness(dv("")));
    }

    #[test]
    fn lambda_only_determinizes_to_two_states() {
        let mut a = FiniteAutomaton::new(2, 0);
        a.add_transition(0, None, 1);
        a.set_accepting(1, true);
        let d = fa_determinize(&a);
        assert_eq!(d.num_states(), 2);
        assert!(d.accepts(&dv("")));
        assert!(!d.accepts(&dv("0")));
    }

    #[test]
    fn product_of_prefix_and_suffix_languages() {
        // 1(0|1)* and (0|1)*0.
        let a = Dfa::new(0, vec![false, true, false], vec![[2, 1], [1, 1], [2, 2]]);
        let mut b = FiniteAutomaton::new(2, 0);
        b.add_transition(0, Some(false), 0);
        b.add_transition(0, Some(true), 0);
        b.add_transition(0, Some(false), 1);
        b.set_accepting(1, true);
        let p = fa_product_intersect(&a, &b);
        for w in DecisionVector::enumerate_up_to(8) {
            let want = w.len() >= 2 && w.bits()[0] && !w.bits()[w.len() - 1];
            assert_eq!(fa_accepts(&p, &w), want, "{w}");
        }
    }

    #[test]
    fn equivalence_counterexamples() {
        let even_ones = Dfa::new(0, vec![true, false], vec![[0, 1], [1, 0]]);
        assert_eq!(dfa_equiv_counterexample(&even_ones, &Dfa::universal()), Some(dv("1")));
        assert_eq!(dfa_equiv_counterexample(&Dfa::universal(), &Dfa::empty_language()), Some(dv("")));
        assert_eq!(dfa_equiv_counterexample(&even_ones, &even_ones), None);
    }

    #[test]
    fn minimization_merges_equivalent_states() {
        // Two copies of the universal language.
        let d = Dfa::new(0, vec![true, true], vec![[1, 1], [0, 0]]);
        let m = d.minimize();
        assert_eq!(m.num_states(), 1);
        assert_eq!(dfa_equiv_counterexample(&d, &m), None);
    }
}
