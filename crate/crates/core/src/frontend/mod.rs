//! The `.imp` language: parsing, lowering to control flow graphs with
//! calls, and execution.

mod expr;
pub mod interp;
mod lexer;
mod lower;
mod parser;
mod program;

pub use expr::{CmpOp, Cond, Expr};
pub use interp::{execute, execute_concolic, BranchConstraint, ExecutionTrace, RunStatus};
pub use lower::parse_and_lower;
pub use program::{
    CallSite, Cfgc, Edge, InputId, InputOrigin, InputVar, Node, NodeId, NodeKind, ProcId, Program,
    Transition, VarId, VarRef,
};
