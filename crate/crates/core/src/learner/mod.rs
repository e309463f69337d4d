//! Active automata learning of the feasible decision vectors, with the
//! error automata used to check conjectures before each equivalence query.

mod kv;
mod lstar;

use std::collections::HashMap;
use std::time::Instant;

use log::{debug, info};
use serde::{Deserialize, Serialize};

pub use kv::DiscriminationTree;
pub use lstar::ObservationTable;

use crate::automata::{dfa_equiv_counterexample, fa_is_empty, fa_product_intersect, Dfa, Emptiness, FiniteAutomaton};
use crate::error::{Error, Result};
use crate::pda::{pda_intersect_dfa, pda_is_empty, PushdownAutomaton};
use crate::teacher::{feasibility, EquivalenceAnswer, MembershipOracle, Teacher};
use crate::value::Valuation;
use crate::word::DecisionVector;

/// Per-learner membership memo, so a learner asks each word once.
#[derive(Debug, Clone, Default)]
pub struct Memo(HashMap<DecisionVector, bool>);

impl Memo {
    pub fn query(&mut self, w: &DecisionVector, oracle: &mut dyn MembershipOracle) -> Result<bool> {
        if let Some(&b) = self.0.get(w) {
            return Ok(b);
        }
        let b = oracle.membership(w)?;
        self.0.insert(w.clone(), b);
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub trait ActiveLearner {
    /// The current hypothesis, after making the internal structure closed
    /// and consistent.
    fn conjecture(&mut self, oracle: &mut dyn MembershipOracle) -> Result<Dfa>;
    /// Refine with a word on which the last conjecture was wrong.
    fn process_counterexample(&mut self, cex: &DecisionVector, oracle: &mut dyn MembershipOracle) -> Result<()>;
    /// Distinct words this learner has asked about.
    fn distinct_queries(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    LStar,
    Kv,
}

impl Algorithm {
    pub fn learner(self) -> Box<dyn ActiveLearner> {
        match self {
            Algorithm::LStar => Box::new(ObservationTable::new()),
            Algorithm::Kv => Box::new(DiscriminationTree::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateCheckOutcome {
    /// The conjecture shares no word with the error language.
    Clean,
    /// A feasible word of the conjecture in the error language.
    BugFound(DecisionVector),
    /// An infeasible word of the conjecture in the error language.
    Refine(DecisionVector),
}

/// Intersect the conjecture with the error language. The finite
/// over-approximation `bo`, when given, is tried first since a DFA product
/// is cheaper than a pushdown one.
pub fn check_candidate(
    c: &Dfa,
    bo: Option<&FiniteAutomaton>,
    bp: &PushdownAutomaton,
    oracle: &mut dyn MembershipOracle,
) -> Result<CandidateCheckOutcome> {
    if let Some(bo) = bo {
        if fa_is_empty(&fa_product_intersect(c, bo)).is_empty() {
            return Ok(CandidateCheckOutcome::Clean);
        }
    }
    match pda_is_empty(&pda_intersect_dfa(bp, c))? {
        Emptiness::Empty => Ok(CandidateCheckOutcome::Clean),
        Emptiness::Witness(w) => Ok(if oracle.membership(&w)? {
            CandidateCheckOutcome::BugFound(w)
        } else {
            CandidateCheckOutcome::Refine(w)
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BugSource {
    CandidateCheck,
    Sampling,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// The conjecture met the error language on an infeasible word.
    Refined(DecisionVector),
    /// The previous counterexample still separates the new conjecture.
    Reused(DecisionVector),
    /// Sampling found a feasible word outside the conjecture.
    Counterexample(DecisionVector),
    Accepted,
    Bug(DecisionVector),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnEvent {
    pub iteration: usize,
    pub conjecture_states: usize,
    pub step: Step,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LearnStats {
    pub iterations: usize,
    pub candidate_refinements: usize,
    pub sampled_counterexamples: usize,
    pub reused_counterexamples: usize,
    pub equivalence_queries: u32,
    pub learner_queries: usize,
    pub final_states: usize,
}

#[derive(Debug, Clone)]
pub enum LearnOutcome {
    /// Sampling found no counterexample to a conjecture disjoint from the
    /// error language.
    ProbablyCorrect { model: Dfa },
    /// `valuation` drives the program along `vector` into an error node.
    BugFound {
        vector: DecisionVector,
        valuation: Valuation,
        source: BugSource,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnConfig {
    pub algorithm: Algorithm,
    /// Cap on conjectures before giving up.
    pub max_iterations: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::LStar,
            max_iterations: 10_000,
        }
    }
}

/// Learn until the teacher accepts a conjecture that avoids the error
/// language, or a bug turns up.
pub fn learn(
    teacher: &mut Teacher<'_>,
    bo: Option<&FiniteAutomaton>,
    bp: &PushdownAutomaton,
    config: LearnConfig,
    stats: &mut LearnStats,
    on_event: &mut dyn FnMut(&LearnEvent),
) -> Result<LearnOutcome> {
    let mut learner = config.algorithm.learner();
    let mut last_cex: Option<DecisionVector> = None;
    let started = Instant::now();
    loop {
        teacher.check_deadline()?;
        if stats.iterations >= config.max_iterations {
            return Err(Error::ResourceExhausted(format!("{} learning iterations", config.max_iterations)));
        }
        stats.iterations += 1;
        let c = learner.conjecture(teacher)?;
        stats.learner_queries = learner.distinct_queries();
        stats.final_states = c.num_states();
        let mut emit = |step: Step| {
            on_event(&LearnEvent {
                iteration: stats.iterations,
                conjecture_states: c.num_states(),
                step,
            })
        };
        debug!("iteration {}: {} states after {:?}", stats.iterations, c.num_states(), started.elapsed());

        if let Some(prev) = &last_cex {
            if c.accepts(prev) != teacher.membership(prev)? {
                let prev = prev.clone();
                stats.reused_counterexamples += 1;
                emit(Step::Reused(prev.clone()));
                learner.process_counterexample(&prev, teacher)?;
                continue;
            }
        }

        match check_candidate(&c, bo, bp, teacher)? {
            CandidateCheckOutcome::Refine(w) => {
                stats.candidate_refinements += 1;
                emit(Step::Refined(w.clone()));
                learner.process_counterexample(&w, teacher)?;
                last_cex = Some(w);
                continue;
            }
            CandidateCheckOutcome::BugFound(w) => {
                emit(Step::Bug(w.clone()));
                return bug(teacher, w, BugSource::CandidateCheck);
            }
            CandidateCheckOutcome::Clean => {}
        }

        stats.equivalence_queries += 1;
        match teacher.equivalence(&c, bp, stats.equivalence_queries)? {
            EquivalenceAnswer::Yes => {
                emit(Step::Accepted);
                info!("accepted a {}-state model after {} equivalence queries", c.num_states(), stats.equivalence_queries);
                return Ok(LearnOutcome::ProbablyCorrect { model: c });
            }
            EquivalenceAnswer::Counterexample(w) => {
                stats.sampled_counterexamples += 1;
                emit(Step::Counterexample(w.clone()));
                learner.process_counterexample(&w, teacher)?;
                last_cex = Some(w);
            }
            EquivalenceAnswer::BugFound(w) => {
                emit(Step::Bug(w.clone()));
                return bug(teacher, w, BugSource::Sampling);
            }
        }
    }
}

fn bug(teacher: &Teacher<'_>, vector: DecisionVector, source: BugSource) -> Result<LearnOutcome> {
    let p = teacher.params();
    match feasibility(teacher.program(), &vector, p.step_budget, p.solver_budget)? {
        Some(model) => Ok(LearnOutcome::BugFound {
            vector,
            valuation: model.valuation,
            source,
        }),
        None => Err(Error::InvalidModel(format!("bug witness {vector} is not feasible"))),
    }
}

/// Membership answered by a known DFA, counting queries.
#[derive(Debug, Clone)]
pub struct DfaOracle {
    target: Dfa,
    pub queries: u64,
}

impl DfaOracle {
    pub fn new(target: Dfa) -> Self {
        Self { target, queries: 0 }
    }
}

impl MembershipOracle for DfaOracle {
    fn membership(&mut self, d: &DecisionVector) -> Result<bool> {
        self.queries += 1;
        Ok(self.target.accepts(d))
    }
}

#[derive(Debug, Clone)]
pub struct ExactRun {
    pub model: Dfa,
    pub equivalence_queries: usize,
    pub membership_queries: u64,
}

/// Learn a known regular language with exact equivalence queries.
pub fn learn_exact(algorithm: Algorithm, target: &Dfa) -> Result<ExactRun> {
    let mut oracle = DfaOracle::new(target.clone());
    let mut learner = algorithm.learner();
    let mut last_cex: Option<DecisionVector> = None;
    let mut eq = 0;
    loop {
        let c = learner.conjecture(&mut oracle)?;
        if let Some(prev) = &last_cex {
            if c.accepts(prev) != target.accepts(prev) {
                let prev = prev.clone();
                learner.process_counterexample(&prev, &mut oracle)?;
                continue;
            }
        }
        eq += 1;
        match dfa_equiv_counterexample(&c, target) {
            None => {
                return Ok(ExactRun {
                    model: c,
                    equivalence_queries: eq,
                    membership_queries: oracle.queries,
                })
            }
            Some(w) => {
                learner.process_counterexample(&w, &mut oracle)?;
                last_cex = Some(w);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;
    use crate::pda::{build_error_fa_overapprox, build_error_pda};
    use crate::teacher::PacParams;
    use crate::value::BitWidth;

    /// Words whose number of 1s is divisible by three.
    fn mod3() -> Dfa {
        Dfa::new(0, vec![true, false, false], vec![[0, 1], [1, 2], [2, 0]])
    }

    /// Words whose third-to-last symbol is 1: eight minimal states.
    fn third_last() -> Dfa {
        let delta = (0..8).map(|s| [(s << 1) & 7, ((s << 1) | 1) & 7]).collect();
        Dfa::new(0, (0..8).map(|s| s & 4 != 0).collect(), delta)
    }

    #[test]
    fn exact_learning_recovers_targets() {
        for alg in [Algorithm::LStar, Algorithm::Kv] {
            for target in [mod3(), third_last(), Dfa::universal(), Dfa::empty_language()] {
                let n = target.minimize().num_states();
                let run = learn_exact(alg, &target).unwrap();
                assert!(dfa_equiv_counterexample(&run.model, &target).is_none(), "{alg:?}");
                assert_eq!(run.model.num_states(), n, "{alg:?}");
                assert!(run.equivalence_queries <= n, "{alg:?}: {} > {n}", run.equivalence_queries);
            }
        }
    }

    #[test]
    fn kv_tree_grows_one_leaf_per_counterexample() {
        let mut t = DiscriminationTree::new();
        let mut o = DfaOracle::new(mod3());
        let c = t.conjecture(&mut o).unwrap();
        assert_eq!(c.num_states(), 1);
        t.process_counterexample(&DecisionVector::from("1"), &mut o).unwrap();
        assert_eq!(t.access_strings().len(), 2);
        assert_eq!(t.conjecture(&mut o).unwrap().num_states(), 2);
    }

    fn run(src: &str, alg: Algorithm) -> LearnOutcome {
        let p = parse_and_lower(src, BitWidth::DEFAULT).unwrap();
        let bp = build_error_pda(&p);
        let bo = build_error_fa_overapprox(&p);
        let mut t = Teacher::new(&p, PacParams::default());
        let mut stats = LearnStats::default();
        learn(&mut t, Some(&bo), &bp, LearnConfig { algorithm: alg, ..LearnConfig::default() }, &mut stats, &mut |_| {})
            .unwrap()
    }

    #[test]
    fn learns_p1_and_finds_p2_bug() {
        for alg in [Algorithm::LStar, Algorithm::Kv] {
            match run("fn main(x) { if (x > 0) { assert(x >= 1); } }", alg) {
                LearnOutcome::ProbablyCorrect { model } => {
                    for w in ["", "0", "1", "11"] {
                        assert!(model.accepts(&DecisionVector::from(w)), "{w}");
                    }
                    assert!(!model.accepts(&DecisionVector::from("10")));
                }
                other => panic!("{other:?}"),
            }
            match run("fn main(x) { if (x > 0) { assert(x > 1); } }", alg) {
                LearnOutcome::BugFound { vector, valuation, .. } => {
                    assert_eq!(vector.to_string(), "10");
                    assert_eq!(valuation.get(0), 1);
                }
                other => panic!("{other:?}"),
            }
        }
    }
}
