//! The mechanical teacher: membership by path feasibility, equivalence by
//! sampling batches of decision vectors from program executions.

mod membership;
mod oracle;
mod params;
mod sampling;

pub use membership::{feasibility, membership, unfold};
pub use oracle::{EquivalenceAnswer, MembershipOracle, Teacher, TeacherStats};
pub use params::{pac_sample_count, PacParams, Strategy};
pub use sampling::{random_inputs, sample_batch_concolic, sample_batch_random_input, BatchedSample, FLIP_RETRIES};
