//! Batched samples of decision vectors from concrete executions.

use log::debug;
use rand::Rng;

use super::params::PacParams;
use crate::error::{Error, Result};
use crate::frontend::{execute, execute_concolic, BranchConstraint, Program};
use crate::solver::{solve_formulas, Formula, Outcome};
use crate::value::Valuation;
use crate::word::DecisionVector;

/// Flip attempts per run before falling back to fresh random inputs.
pub const FLIP_RETRIES: usize = 8;

/// `k` decision vectors drawn by one fresh sampler session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchedSample(pub Vec<DecisionVector>);

impl BatchedSample {
    pub fn vectors(&self) -> &[DecisionVector] {
        &self.0
    }
}

/// Uniform `W`-bit values for every input of the program.
pub fn random_inputs(program: &Program, rng: &mut impl Rng) -> Valuation {
    let w = program.bit_width();
    Valuation::new((0..program.num_inputs()).map(|_| rng.gen_range(w.min()..=w.max())).collect())
}

/// Each vector comes from a run on independent uniform inputs.
pub fn sample_batch_random_input(program: &Program, params: &PacParams, rng: &mut impl Rng) -> BatchedSample {
    BatchedSample(
        (0..params.batch_size)
            .map(|_| execute(program, &random_inputs(program, rng), params.step_budget).decisions)
            .collect(),
    )
}

/// Concolic session: the first run uses random inputs; each later run
/// negates a uniformly chosen branch of the previous run, keeping the
/// constraints before it. Nothing carries over between batches.
pub fn sample_batch_concolic(program: &Program, params: &PacParams, rng: &mut impl Rng) -> Result<BatchedSample> {
    let mut out = Vec::with_capacity(params.batch_size);
    let mut last: Option<(Valuation, Vec<BranchConstraint>)> = None;
    for _ in 0..params.batch_size {
        let inputs = match &last {
            Some((prev, constraints)) => match flip(program, params, prev, constraints, rng)? {
                Some(v) => v,
                None => random_inputs(program, rng),
            },
            None => random_inputs(program, rng),
        };
        let (trace, constraints) = execute_concolic(program, &inputs, params.step_budget);
        out.push(trace.decisions);
        last = Some((inputs, constraints));
    }
    Ok(BatchedSample(out))
}

fn flip(
    program: &Program,
    params: &PacParams,
    prev: &Valuation,
    constraints: &[BranchConstraint],
    rng: &mut impl Rng,
) -> Result<Option<Valuation>> {
    if constraints.is_empty() {
        return Ok(None);
    }
    let w = program.bit_width();
    for _ in 0..FLIP_RETRIES {
        let pos = rng.gen_range(0..constraints.len());
        let mut formulas: Vec<Formula> = constraints[..pos].iter().map(|c| c.taken.clone()).collect();
        formulas.push(constraints[pos].flipped.clone());
        match solve_formulas(w, program.num_inputs(), &formulas, params.solver_budget) {
            Ok(Outcome::Sat(values)) => {
                // Inputs the constraints do not mention keep their values.
                let mut mentioned = std::collections::BTreeSet::new();
                formulas.iter().for_each(|f| f.collect_vars(&mut mentioned));
                let mut next = prev.clone();
                for &v in &mentioned {
                    next.set(v as usize, values[v as usize]);
                }
                return Ok(Some(next));
            }
            Ok(Outcome::Unsat) => {}
            Err(Error::ResourceExhausted(msg)) => debug!("flip at {pos} abandoned: {msg}"),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;
    use crate::value::BitWidth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(k: usize) -> PacParams {
        PacParams::new(0.1, 0.9, k).unwrap()
    }

    #[test]
    fn branch_free_batches_are_lambda() {
        let p = parse_and_lower("fn main(x) { x = x * 2; }", BitWidth::DEFAULT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = sample_batch_random_input(&p, &params(3), &mut rng);
        assert_eq!(b.0, vec![DecisionVector::empty(); 3]);
        let b = sample_batch_concolic(&p, &params(3), &mut rng).unwrap();
        assert_eq!(b.0, vec![DecisionVector::empty(); 3]);
    }

    #[test]
    fn concolic_reaches_rare_branch() {
        let p = parse_and_lower("fn main(x) { if (x == 12345) { assert(false); } }", BitWidth::DEFAULT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = sample_batch_concolic(&p, &params(10), &mut rng).unwrap();
        assert!(b.0.iter().any(|d| d.to_string() == "10"), "{:?}", b.0);
    }
}
