use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::interp::DEFAULT_STEP_BUDGET;
use crate::solver::DEFAULT_NODE_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Uniformly random inputs for every run.
    RandomInput,
    /// Random start, then each run flips one branch of the previous run.
    Concolic,
}

/// Parameters of the probabilistic teacher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacParams {
    /// Error parameter, in (0, 1).
    pub epsilon: f64,
    /// Confidence, in (0, 1).
    pub delta: f64,
    /// Decision vectors per batched sample.
    pub batch_size: usize,
    pub seed: u64,
    pub strategy: Strategy,
    /// Edges one execution (or one gap between branchings during
    /// membership unfolding) may take.
    pub step_budget: usize,
    /// Search nodes per solver call.
    pub solver_budget: u64,
    pub timeout: Option<Duration>,
}

impl PacParams {
    pub fn new(epsilon: f64, delta: f64, batch_size: usize) -> Result<Self> {
        let p = Self {
            epsilon,
            delta,
            batch_size,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must be in (0,1), got {}", self.epsilon)));
        }
        if !open(self.delta) {
            return Err(Error::InvalidParameter(format!("delta must be in (0,1), got {}", self.delta)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch size must be at least 1".into()));
        }
        if self.step_budget == 0 || self.solver_budget == 0 {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }
}

impl Default for PacParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            delta: 0.9,
            batch_size: 10,
            seed: 0,
            strategy: Strategy::Concolic,
            step_budget: DEFAULT_STEP_BUDGET,
            solver_budget: DEFAULT_NODE_BUDGET,
            timeout: None,
        }
    }
}

/// Number of batched samples for the `i`-th equivalence query:
/// `ceil((1/ε) (ln(1/(1-δ)) + i ln 2))`.
pub fn pac_sample_count(params: &PacParams, i: u32) -> u64 {
    assert!(i >= 1, "equivalence queries are numbered from 1");
    let q = (1.0 / params.epsilon) * ((1.0 / (1.0 - params.delta)).ln() + f64::from(i) * std::f64::consts::LN_2);
    q.ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_counts() {
        let p = PacParams::new(0.1, 0.9, 10).unwrap();
        assert_eq!(pac_sample_count(&p, 1), 30);
        assert_eq!(pac_sample_count(&p, 2), 37);
        let p = PacParams::new(0.5, 0.5, 1).unwrap();
        assert_eq!(pac_sample_count(&p, 1), 3);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(PacParams::new(0.0, 0.5, 1).is_err());
        assert!(PacParams::new(0.5, 1.0, 1).is_err());
        assert!(PacParams::new(0.5, 0.5, 0).is_err());
    }
}
