use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::membership::feasibility;
use super::params::{pac_sample_count, PacParams, Strategy};
use super::sampling::{sample_batch_concolic, sample_batch_random_input, BatchedSample};
use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::frontend::Program;
use crate::pda::{pda_accepts, pda_is_empty, PushdownAutomaton};
use crate::word::DecisionVector;

pub trait MembershipOracle {
    fn membership(&mut self, d: &DecisionVector) -> Result<bool>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceAnswer {
    Yes,
    /// A sampled feasible vector outside the conjecture.
    Counterexample(DecisionVector),
    /// A sampled feasible vector in the error language.
    BugFound(DecisionVector),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TeacherStats {
    pub membership_queries: u64,
    pub membership_cache_hits: u64,
    pub solver_calls: u64,
    pub equivalence_queries: u64,
    pub batches: u64,
    pub membership_time: Duration,
    pub equivalence_time: Duration,
}

/// Answers membership by path feasibility and equivalence by sampling.
pub struct Teacher<'p> {
    program: &'p Program,
    params: PacParams,
    cache: HashMap<DecisionVector, bool>,
    stats: TeacherStats,
    deadline: Option<Instant>,
}

impl<'p> Teacher<'p> {
    /// The wall-clock timeout in `params`, if any, starts now.
    pub fn new(program: &'p Program, params: PacParams) -> Self {
        let deadline = params.timeout.map(|t| Instant::now() + t);
        Self {
            program,
            params,
            cache: HashMap::new(),
            stats: TeacherStats::default(),
            deadline,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn params(&self) -> &PacParams {
        &self.params
    }

    pub fn stats(&self) -> &TeacherStats {
        &self.stats
    }

    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::ResourceExhausted("wall-clock timeout".into())),
            _ => Ok(()),
        }
    }

    /// The `index`-th batched sample of this teacher's seed. Each batch runs
    /// on its own random stream, so batches are independent sessions and
    /// replay identically.
    pub fn sample_batch_at(&mut self, index: u64) -> Result<BatchedSample> {
        self.check_deadline()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(index);
        self.stats.batches += 1;
        match self.params.strategy {
            Strategy::RandomInput => Ok(sample_batch_random_input(self.program, &self.params, &mut rng)),
            Strategy::Concolic => sample_batch_concolic(self.program, &self.params, &mut rng),
        }
    }

    /// Draw `pac_sample_count(i)` batches and look for a vector outside
    /// `L(c)`. Such a vector is a bug if the error automaton accepts it.
    pub fn equivalence(&mut self, c: &Dfa, bp: &PushdownAutomaton, i: u32) -> Result<EquivalenceAnswer> {
        debug_assert!(
            pda_is_empty(&crate::pda::pda_intersect_dfa(bp, c)).map_or(true, |e| e.is_empty()),
            "conjecture intersects the error language"
        );
        let start = Instant::now();
        self.stats.equivalence_queries += 1;
        let result = self.equivalence_inner(c, bp, i);
        self.stats.equivalence_time += start.elapsed();
        result
    }

    fn equivalence_inner(&mut self, c: &Dfa, bp: &PushdownAutomaton, i: u32) -> Result<EquivalenceAnswer> {
        let q = pac_sample_count(&self.params, i);
        for _ in 0..q {
            let index = self.stats.batches;
            let batch = self.sample_batch_at(index)?;
            for w in batch.0 {
                if !c.accepts(&w) {
                    return Ok(if pda_accepts(bp, &w)? {
                        EquivalenceAnswer::BugFound(w)
                    } else {
                        EquivalenceAnswer::Counterexample(w)
                    });
                }
            }
        }
        Ok(EquivalenceAnswer::Yes)
    }
}

impl MembershipOracle for Teacher<'_> {
    fn membership(&mut self, d: &DecisionVector) -> Result<bool> {
        self.stats.membership_queries += 1;
        if let Some(&hit) = self.cache.get(d) {
            self.stats.membership_cache_hits += 1;
            return Ok(hit);
        }
        self.check_deadline()?;
        let start = Instant::now();
        self.stats.solver_calls += 1;
        let answer = feasibility(self.program, d, self.params.step_budget, self.params.solver_budget)?.is_some();
        self.stats.membership_time += start.elapsed();
        self.cache.insert(d.clone(), answer);
        Ok(answer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;
    use crate::pda::build_error_pda;
    use crate::value::BitWidth;

    const P1: &str = "fn main(x) { if (x > 0) { assert(x >= 1); } }";
    const P2: &str = "fn main(x) { if (x > 0) { assert(x > 1); } }";

    #[test]
    fn universal_conjecture_passes() {
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let mut t = Teacher::new(&p, PacParams::default());
        // The universal DFA intersects the error language, so skip the
        // precondition by checking sampling directly.
        for i in 0..5 {
            let b = t.sample_batch_at(i).unwrap();
            assert!(b.0.iter().all(|w| Dfa::universal().accepts(w)));
        }
    }

    #[test]
    fn empty_conjecture_gets_feasible_counterexample() {
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let bp = build_error_pda(&p);
        let mut t = Teacher::new(&p, PacParams::default());
        match t.equivalence(&Dfa::empty_language(), &bp, 1).unwrap() {
            EquivalenceAnswer::Counterexample(w) => {
                assert_ne!(w.to_string(), "10");
                assert!(t.membership(&w).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn concolic_equivalence_finds_p2_bug() {
        let p = parse_and_lower(P2, BitWidth::DEFAULT).unwrap();
        let bp = build_error_pda(&p);
        let mut t = Teacher::new(&p, PacParams::default());
        // A conjecture containing everything but the error language.
        let c = Dfa::new(0, vec![true, true, false, true], vec![[3, 1], [2, 3], [2, 2], [3, 3]]);
        assert_eq!(t.equivalence(&c, &bp, 1).unwrap(), EquivalenceAnswer::BugFound(DecisionVector::from("10")));
    }

    #[test]
    fn membership_is_cached() {
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let mut t = Teacher::new(&p, PacParams::default());
        let d = DecisionVector::from("11");
        assert!(t.membership(&d).unwrap());
        assert!(t.membership(&d).unwrap());
        assert_eq!(t.stats().membership_cache_hits, 1);
        assert_eq!(t.stats().solver_calls, 1);
    }

    #[test]
    fn batches_replay_by_index() {
        let p = parse_and_lower(P1, BitWidth::DEFAULT).unwrap();
        let mut a = Teacher::new(&p, PacParams::default().with_seed(3));
        let mut b = Teacher::new(&p, PacParams::default().with_seed(3));
        let _ = b.sample_batch_at(0).unwrap();
        assert_eq!(a.sample_batch_at(5).unwrap(), b.sample_batch_at(5).unwrap());
    }
}
