//! DOT and JSON encodings of automata.
//!
//! JSON layout (shared by DFAs and automata with λ-moves):
//!
//! ```json
//! {
//!   "kind": "dfa",
//!   "states": 2,
//!   "initial": 0,
//!   "accepting": [0],
//!   "transitions": [{ "from": 0, "symbol": "1", "to": 1 }]
//! }
//! ```
//!
//! `symbol` is `"0"`, `"1"`, or `null` for a λ-move. A `"dfa"` document
//! must have exactly one `"0"` and one `"1"` transition per state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fa::{Dfa, FiniteAutomaton, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub kind: String,
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: usize,
    pub symbol: Option<String>,
    pub to: usize,
}

fn label_str(l: Label) -> Option<String> {
    l.map(|b| if b { "1" } else { "0" }.to_string())
}

fn parse_label(s: &Option<String>) -> Result<Label> {
    match s.as_deref() {
        None => Ok(None),
        Some("0") => Ok(Some(false)),
        Some("1") => Ok(Some(true)),
        Some(other) => Err(Error::InvalidModel(format!("unknown symbol `{other}`"))),
    }
}

fn fa_document(a: &FiniteAutomaton, kind: &str) -> AutomatonJson {
    AutomatonJson {
        kind: kind.to_string(),
        states: a.num_states(),
        initial: a.initial(),
        accepting: a.accepting_states().collect(),
        transitions: a
            .transitions()
            .map(|(from, l, to)| TransitionJson {
                from,
                symbol: label_str(l),
                to,
            })
            .collect(),
    }
}

pub fn fa_to_json(a: &FiniteAutomaton) -> String {
    serde_json::to_string_pretty(&fa_document(a, "nfa")).expect("serializable")
}

pub fn dfa_to_json(d: &Dfa) -> String {
    serde_json::to_string_pretty(&fa_document(&d.to_fa(), "dfa")).expect("serializable")
}

fn fa_from_document(doc: &AutomatonJson) -> Result<FiniteAutomaton> {
    let n = doc.states;
    let check = |q: usize| {
        if q < n {
            Ok(q)
        } else {
            Err(Error::InvalidModel(format!("state {q} out of range (states: {n})")))
        }
    };
    if n == 0 {
        return Err(Error::InvalidModel("automaton has no states".into()));
    }
    let mut a = FiniteAutomaton::new(n, check(doc.initial)?);
    for &q in &doc.accepting {
        a.set_accepting(check(q)?, true);
    }
    for t in &doc.transitions {
        a.add_transition(check(t.from)?, parse_label(&t.symbol)?, check(t.to)?);
    }
    Ok(a)
}

pub fn fa_from_json(text: &str) -> Result<FiniteAutomaton> {
    let doc: AutomatonJson = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
    fa_from_document(&doc)
}

/// Rebuild a DFA from any document whose transitions are deterministic and
/// total.
pub fn dfa_from_json(text: &str) -> Result<Dfa> {
    dfa_from_fa(&fa_from_json(text)?)
}

fn dfa_from_fa(a: &FiniteAutomaton) -> Result<Dfa> {
    let mut delta = vec![[usize::MAX; 2]; a.num_states()];
    for (from, l, to) in a.transitions() {
        let Some(bit) = l else {
            return Err(Error::InvalidModel("λ-move in a DFA".into()));
        };
        let slot = &mut delta[from][bit as usize];
        if *slot != usize::MAX {
            return Err(Error::InvalidModel(format!("state {from} has two `{}` transitions", bit as u8)));
        }
        *slot = to;
    }
    if let Some(q) = delta.iter().position(|r| r.contains(&usize::MAX)) {
        return Err(Error::InvalidModel(format!("state {q} lacks a transition")));
    }
    let accepting = (0..a.num_states()).map(|q| a.is_accepting(q)).collect();
    Ok(Dfa::new(a.initial(), accepting, delta))
}

pub fn fa_to_dot(a: &FiniteAutomaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  __start [shape=point];\n");
    out.push_str(&format!("  __start -> q{};\n", a.initial()));
    for q in 0..a.num_states() {
        let shape = if a.is_accepting(q) { "doublecircle" } else { "circle" };
        out.push_str(&format!("  q{q} [shape={shape}];\n"));
    }
    // Merge parallel edges into one arrow with a combined label.
    let mut grouped: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for (from, l, to) in a.transitions() {
        let s = match l {
            None => "λ",
            Some(false) => "0",
            Some(true) => "1",
        };
        grouped.entry((from, to)).or_default().push(s);
    }
    for ((from, to), mut labels) in grouped {
        labels.sort_unstable();
        out.push_str(&format!("  q{from} -> q{to} [label=\"{}\"];\n", labels.join(",")));
    }
    out.push_str("}\n");
    out
}

pub fn dfa_to_dot(d: &Dfa) -> String {
    fa_to_dot(&d.to_fa())
}

/// Read back the DOT dialect written by [`fa_to_dot`].
pub fn fa_from_dot(text: &str) -> Result<FiniteAutomaton> {
    let bad = |line: &str| Error::InvalidModel(format!("unrecognized DOT line `{line}`"));
    let state = |tok: &str| -> Option<usize> { tok.trim().strip_prefix('q')?.parse().ok() };
    let mut initial = None;
    let mut accepting = Vec::new();
    let mut states = 0usize;
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.trim().trim_end_matches(';').trim();
        if line.is_empty()
            || line.starts_with("digraph")
            || line == "}"
            || line.starts_with("rankdir")
            || line.starts_with("__start [")
        {
            continue;
        }
        if let Some(rest) = line.strip_prefix("__start ->") {
            initial = Some(state(rest).ok_or_else(|| bad(raw))?);
        } else if let Some((lhs, rhs)) = line.split_once("->") {
            let from = state(lhs).ok_or_else(|| bad(raw))?;
            let (to, attrs) = rhs.split_once('[').ok_or_else(|| bad(raw))?;
            let to = state(to).ok_or_else(|| bad(raw))?;
            let label = attrs
                .split_once("label=\"")
                .and_then(|(_, r)| r.split_once('"'))
                .map(|(l, _)| l)
                .ok_or_else(|| bad(raw))?;
            for part in label.split(',') {
                let l = match part.trim() {
                    "0" => Some(false),
                    "1" => Some(true),
                    "λ" | "" => None,
                    _ => return Err(bad(raw)),
                };
                edges.push((from, l, to));
            }
            states = states.max(from + 1).max(to + 1);
        } else if let Some((name, attrs)) = line.split_once('[') {
            let q = state(name).ok_or_else(|| bad(raw))?;
            states = states.max(q + 1);
            if attrs.contains("doublecircle") {
                accepting.push(q);
            }
        } else {
            return Err(bad(raw));
        }
    }
    let initial = initial.ok_or_else(|| Error::InvalidModel("DOT graph has no start arrow".into()))?;
    if initial >= states {
        return Err(Error::InvalidModel("start state is not declared".into()));
    }
    let mut a = FiniteAutomaton::new(states, initial);
    for q in accepting {
        a.set_accepting(q, true);
    }
    for (from, l, to) in edges {
        a.add_transition(from, l, to);
    }
    Ok(a)
}

pub fn dfa_from_dot(text: &str) -> Result<Dfa> {
    dfa_from_fa(&fa_from_dot(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::dfa_equiv_counterexample;

    #[test]
    fn universal_dot_has_one_accepting_node() {
        let dot = dfa_to_dot(&Dfa::universal());
        assert_eq!(dot.matches("doublecircle").count(), 1);
        assert!(dot.contains("q0 -> q0 [label=\"0,1\"]"));
        let back = dfa_from_dot(&dot).unwrap();
        assert_eq!(dfa_equiv_counterexample(&back, &Dfa::universal()), None);
    }

    #[test]
    fn empty_language_json_has_no_accepting_states() {
        let json = dfa_to_json(&Dfa::empty_language());
        let doc: AutomatonJson = serde_json::from_str(&json).unwrap();
        assert!(doc.accepting.is_empty());
        assert_eq!(doc.kind, "dfa");
    }

    #[test]
    fn round_trips() {
        let d = Dfa::new(0, vec![true, false, true], vec![[1, 2], [1, 1], [0, 2]]);
        let j = dfa_from_json(&dfa_to_json(&d)).unwrap();
        assert_eq!(j, d);
        let t = dfa_from_dot(&dfa_to_dot(&d)).unwrap();
        assert_eq!(dfa_equiv_counterexample(&t, &d), None);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(dfa_from_json("{\"kind\":\"dfa\",\"states\":1,\"initial\":0,\"accepting\":[],\"transitions\":[]}").is_err());
        assert!(fa_from_json("{\"kind\":\"nfa\",\"states\":1,\"initial\":3,\"accepting\":[],\"transitions\":[]}").is_err());
        assert!(fa_from_dot("digraph x { nonsense }").is_err());
    }
}
