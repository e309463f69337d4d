//! Assertion checking for a small imperative language by learning a
//! regular model of its feasible decision vectors.

pub mod automata;
pub mod driver;
pub mod error;
pub mod frontend;
pub mod learner;
pub mod pda;
pub mod solver;
pub mod teacher;
pub mod value;
pub mod word;

pub use error::{Error, Result};
pub use value::{BitWidth, Valuation};
pub use word::DecisionVector;
