//! End-to-end verification: lowering, error automata, learning, verdict.

mod corpus;
mod export;

use std::fmt;
use std::time::{Duration, Instant};

use log::info;
use serde::Serialize;

pub use corpus::{by_name, corpus, CorpusProgram, CORPUS};
pub use export::{export_model, import_model, ModelFormat};

use crate::automata::{Dfa, Emptiness};
use crate::error::{Error, Result};
use crate::frontend::{execute, parse_and_lower, ExecutionTrace, Program, RunStatus};
use crate::learner::{learn, Algorithm, BugSource, LearnConfig, LearnOutcome, LearnStats};
use crate::pda::{build_error_fa_overapprox, build_error_pda, pda_intersect_dfa, pda_is_empty, PushdownAutomaton};
use crate::teacher::{PacParams, Teacher, TeacherStats};
use crate::value::{BitWidth, Valuation};
use crate::word::DecisionVector;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub pac: PacParams,
    pub algorithm: Algorithm,
    pub bit_width: BitWidth,
    pub max_iterations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            pac: PacParams::default(),
            algorithm: Algorithm::LStar,
            bit_width: BitWidth::DEFAULT,
            max_iterations: LearnConfig::default().max_iterations,
        }
    }
}

impl VerifyOptions {
    pub fn new(pac: PacParams, algorithm: Algorithm) -> Self {
        Self {
            pac,
            algorithm,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub algorithm: Option<Algorithm>,
    pub program_nodes: usize,
    pub teacher: TeacherStats,
    pub learner: LearnStats,
    pub total_time: Duration,
}

impl RunStats {
    /// Everything except wall-clock measurements, for reproducibility
    /// comparisons.
    pub fn without_timings(&self) -> RunStats {
        let mut s = self.clone();
        s.teacher.membership_time = Duration::ZERO;
        s.teacher.equivalence_time = Duration::ZERO;
        s.total_time = Duration::ZERO;
        s
    }

    /// Plain-text table, one row per measure.
    pub fn table(&self) -> String {
        let alg = match self.algorithm {
            Some(Algorithm::LStar) => "L*",
            Some(Algorithm::Kv) => "KV",
            None => "-",
        };
        let rows: [(&str, String); 11] = [
            ("Algorithm", alg.to_string()),
            ("# of CFG nodes", self.program_nodes.to_string()),
            ("# of Mem queries", self.teacher.membership_queries.to_string()),
            ("# of Mem cache hits", self.teacher.membership_cache_hits.to_string()),
            ("# of Equ queries", self.teacher.equivalence_queries.to_string()),
            ("# of solver calls", self.teacher.solver_calls.to_string()),
            ("# of sampled batches", self.teacher.batches.to_string()),
            ("# of states", self.learner.final_states.to_string()),
            ("Mem time [s]", format!("{:.3}", self.teacher.membership_time.as_secs_f64())),
            ("Equ time [s]", format!("{:.3}", self.teacher.equivalence_time.as_secs_f64())),
            ("Total time [s]", format!("{:.3}", self.total_time.as_secs_f64())),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    BugFound {
        vector: DecisionVector,
        valuation: Valuation,
        /// The replayed run on `valuation`.
        trace: ExecutionTrace,
        source: BugSource,
        stats: RunStats,
    },
    ProbablyCorrect {
        model: Dfa,
        epsilon: f64,
        delta: f64,
        batch_size: usize,
        stats: RunStats,
    },
    ResourceExhausted {
        reason: String,
        stats: RunStats,
    },
}

impl Verdict {
    pub fn stats(&self) -> &RunStats {
        match self {
            Verdict::BugFound { stats, .. } | Verdict::ProbablyCorrect { stats, .. } | Verdict::ResourceExhausted { stats, .. } => stats,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::ProbablyCorrect { .. } => 0,
            Verdict::BugFound { .. } => 1,
            Verdict::ResourceExhausted { .. } => 2,
        }
    }

    pub fn model(&self) -> Option<&Dfa> {
        match self {
            Verdict::ProbablyCorrect { model, .. } => Some(model),
            _ => None,
        }
    }

    pub fn is_bug(&self) -> bool {
        matches!(self, Verdict::BugFound { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BugFound { vector, valuation, .. } => {
                write!(f, "BugFound: decision vector {vector}, inputs {:?}", valuation.values())
            }
            Verdict::ProbablyCorrect {
                model,
                epsilon,
                delta,
                batch_size,
                ..
            } => write!(
                f,
                "ProbablyCorrect: ({epsilon}, {delta})-correct with batch size {batch_size}, model of {} states",
                model.num_states()
            ),
            Verdict::ResourceExhausted { reason, .. } => write!(f, "ResourceExhausted: {reason}"),
        }
    }
}

/// Parse, lower and verify `source`. Errors are reserved for bad input;
/// running out of time or budget is a verdict.
pub fn verify(source: &str, options: &VerifyOptions) -> Result<Verdict> {
    options.pac.validate()?;
    let program = parse_and_lower(source, options.bit_width)?;
    verify_program(&program, options)
}

pub fn verify_program(program: &Program, options: &VerifyOptions) -> Result<Verdict> {
    let start = Instant::now();
    let bp = build_error_pda(program);
    let bo = build_error_fa_overapprox(program);
    let mut teacher = Teacher::new(program, options.pac.clone());
    let mut learner_stats = LearnStats::default();
    let config = LearnConfig {
        algorithm: options.algorithm,
        max_iterations: options.max_iterations,
    };
    let outcome = learn(&mut teacher, Some(&bo), &bp, config, &mut learner_stats, &mut |e| {
        info!("iteration {} ({} states): {:?}", e.iteration, e.conjecture_states, e.step)
    });
    let stats = RunStats {
        algorithm: Some(options.algorithm),
        program_nodes: program.num_nodes(),
        teacher: teacher.stats().clone(),
        learner: learner_stats,
        total_time: start.elapsed(),
    };
    match outcome {
        Ok(LearnOutcome::ProbablyCorrect { model }) => Ok(Verdict::ProbablyCorrect {
            model,
            epsilon: options.pac.epsilon,
            delta: options.pac.delta,
            batch_size: options.pac.batch_size,
            stats,
        }),
        Ok(LearnOutcome::BugFound { vector, valuation, source }) => {
            let trace = execute(program, &valuation, options.pac.step_budget);
            if trace.status != RunStatus::AssertionViolated || !trace.decisions.starts_with(&vector) {
                return Err(Error::InvalidModel(format!(
                    "witness for {vector} does not replay to a violation (got {:?} along {})",
                    trace.status, trace.decisions
                )));
            }
            Ok(Verdict::BugFound {
                vector,
                valuation,
                trace,
                source,
                stats,
            })
        }
        Err(Error::ResourceExhausted(reason)) => Ok(Verdict::ResourceExhausted { reason, stats }),
        Err(e) => Err(e),
    }
}

/// Check a previously learned model against another error automaton over
/// the same branching structure. Only automata are involved: no membership
/// queries, no sampling.
pub fn reverify(model: &Dfa, error: &PushdownAutomaton) -> Result<Emptiness> {
    pda_is_empty(&pda_intersect_dfa(error, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::dfa_equiv_counterexample;

    const P1: &str = "fn main(x) { if (x > 0) { assert(x >= 1); } }";

    #[test]
    fn p1_model_matches_hand_built_target() {
        let v = verify(P1, &VerifyOptions::default()).unwrap();
        // λ, 0, 1, 11 and nothing else.
        let target = Dfa::new(0, vec![true, true, true, true, false], vec![[1, 2], [4, 4], [4, 3], [4, 4], [4, 4]]);
        let model = v.model().expect("ProbablyCorrect");
        for w in ["", "0", "1", "11"] {
            assert!(model.accepts(&DecisionVector::from(w)), "{w}");
        }
        assert!(!model.accepts(&DecisionVector::from("10")));
        // Sampling only sees feasible vectors, so the model may generalize
        // over infeasible ones such as "01"; it must never reach an error.
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let bp = build_error_pda(&p);
        for w in DecisionVector::enumerate_up_to(6) {
            if model.accepts(&w) != target.accepts(&w) {
                assert!(!crate::teacher::membership(&p, &w, 1000, 1000).unwrap(), "{w}");
                assert!(!crate::pda::pda_accepts(&bp, &w).unwrap(), "{w}");
            }
        }
        assert_eq!(reverify(model, &bp).unwrap(), Emptiness::Empty);
        assert_eq!(v.exit_code(), 0);
    }

    #[test]
    fn p2_and_assert_false_are_bugs() {
        match verify("fn main(x) { if (x > 0) { assert(x > 1); } }", &VerifyOptions::default()).unwrap() {
            Verdict::BugFound { vector, valuation, .. } => {
                assert_eq!(vector.to_string(), "10");
                let x = valuation.get(0);
                assert!(x > 0 && x <= 1);
            }
            other => panic!("{other}"),
        }
        match verify("fn main() { assert(false); }", &VerifyOptions::default()).unwrap() {
            Verdict::BugFound { vector, .. } => assert_eq!(vector.to_string(), "0"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn model_round_trips() {
        let v = verify(P1, &VerifyOptions::default()).unwrap();
        let model = v.model().unwrap();
        for f in [ModelFormat::Json, ModelFormat::Dot] {
            let back = import_model(&export_model(model, f), f).unwrap();
            assert_eq!(dfa_equiv_counterexample(model, &back), None, "{f}");
        }
        let dot = export_model(&Dfa::universal(), ModelFormat::Dot);
        assert_eq!(dot.matches("doublecircle").count(), 1);
        assert!(export_model(&Dfa::empty_language(), ModelFormat::Json).contains("\"accepting\": []"));
    }

    #[test]
    fn reuse_checks_a_new_property_without_queries() {
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let v = verify_program(&p, &VerifyOptions::default()).unwrap();
        let model = v.model().unwrap();
        // Same branching structure, weaker property.
        let p2 = parse_and_lower("fn main(x) { if (x > 0) { assert(x >= 0); } }", BitWidth::DEFAULT).unwrap();
        let teacher = Teacher::new(&p2, PacParams::default());
        assert_eq!(reverify(model, &build_error_pda(&p2)).unwrap(), Emptiness::Empty);
        assert_eq!(teacher.stats(), &TeacherStats::default());
    }

    #[test]
    fn reproducible_stats() {
        let a = verify(P1, &VerifyOptions::default()).unwrap();
        let b = verify(P1, &VerifyOptions::default()).unwrap();
        assert_eq!(a.stats().without_timings(), b.stats().without_timings());
        assert_eq!(a.model(), b.model());
    }

    #[test]
    fn parse_errors_are_errors() {
        assert!(matches!(verify("fn main( {", &VerifyOptions::default()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn stats_table_has_row_labels() {
        let v = verify(P1, &VerifyOptions::default()).unwrap();
        let t = v.stats().table();
        for label in ["# of Mem queries", "# of Equ queries", "Total time [s]"] {
            assert!(t.contains(label), "{t}");
        }
    }
}
