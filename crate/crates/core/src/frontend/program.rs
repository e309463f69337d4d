//! Control flow graphs with calls (CFGCs) and programs built from them.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::expr::{Cond, Expr};
use crate::value::BitWidth;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident, $prefix:literal) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// A node, unique across all procedures of a program.
    NodeId,
    "n"
);
id_type!(ProcId, "p");
id_type!(
    /// A variable local to one procedure.
    VarId,
    "v"
);
id_type!(
    /// An input variable: a formal parameter of `main` or a `nondet()` site.
    InputId,
    "in"
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarRef {
    Local(VarId),
    /// `nondet()` sites read a program-wide input that never changes.
    Input(InputId),
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Local(v) => write!(f, "{v}"),
            VarRef::Input(i) => write!(f, "{i}"),
        }
    }
}

/// A transition formula over `X ∪ X'`, kept in structural form: a skip is
/// the frame `x' = x` for every `x`, an assignment is one primed equation plus
/// frames, and an assumption is a guard over unprimed variables plus frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transition {
    Skip,
    Assign(VarId, Expr<VarRef>),
    Assume(Cond<VarRef>),
}

/// Parameter passing (`g_in`: formals' = args) and result passing
/// (`g_out`: result' = callee's return value) of a procedure call edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub callee: ProcId,
    pub args: Vec<Expr<VarRef>>,
    pub result: Option<VarId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edge {
    Local(Transition, NodeId),
    Call(CallSite, NodeId),
}

impl Edge {
    pub fn target(&self) -> NodeId {
        match self {
            Edge::Local(_, t) | Edge::Call(_, t) => *t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// 0-transition is `¬cond`, 1-transition is `cond`.
    Branch {
        cond: Cond<VarRef>,
        zero: NodeId,
        one: NodeId,
    },
    Seq(Edge),
    /// The procedure's return node `v_r`; it has no outgoing edge.
    Return,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub proc: ProcId,
    pub kind: NodeKind,
    pub error: bool,
}

impl Node {
    pub fn is_branch(&self) -> bool {
        matches!(self.kind, NodeKind::Branch { .. })
    }

    /// The transition formula leaving a branching node for decision `bit`.
    pub fn branch_transition(&self, bit: bool) -> Option<(Transition, NodeId)> {
        match &self.kind {
            NodeKind::Branch { cond, zero, one } => Some(if bit {
                (Transition::Assume(cond.clone()), *one)
            } else {
                (Transition::Assume(cond.clone().negated()), *zero)
            }),
            _ => None,
        }
    }
}

/// One procedure's control flow graph.
#[derive(Debug, Clone)]
pub struct Cfgc {
    pub name: String,
    pub params: Vec<VarId>,
    /// Names of the procedure's variables, indexed by [`VarId`]. Shadowing
    /// `let`s get distinct ids with the same name.
    pub var_names: Vec<String>,
    /// Holds the value passed back by `return e;`.
    pub ret_var: VarId,
    pub initial: NodeId,
    pub ret: NodeId,
    pub nodes: Vec<NodeId>,
    pub errors: Vec<NodeId>,
}

impl Cfgc {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputOrigin {
    MainParam(VarId),
    Nondet { proc: ProcId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputVar {
    pub name: String,
    pub origin: InputOrigin,
}

/// A set of CFGCs with disjoint node sets and an entry procedure `main`.
#[derive(Debug, Clone)]
pub struct Program {
    pub(crate) procs: Vec<Cfgc>,
    pub(crate) nodes: Vec<Node>,
    pub(crate) names: HashMap<String, ProcId>,
    pub(crate) main: ProcId,
    pub(crate) inputs: Vec<InputVar>,
    pub(crate) width: BitWidth,
}

impl Program {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn proc(&self, id: ProcId) -> &Cfgc {
        &self.procs[id.index()]
    }

    pub fn procs(&self) -> impl Iterator<Item = (ProcId, &Cfgc)> {
        self.procs
            .iter()
            .enumerate()
            .map(|(i, p)| (ProcId(i as u32), p))
    }

    pub fn proc_by_name(&self, name: &str) -> Option<ProcId> {
        self.names.get(name).copied()
    }

    pub fn main(&self) -> ProcId {
        self.main
    }

    /// Initial node of `main`.
    pub fn entry(&self) -> NodeId {
        self.proc(self.main).initial
    }

    pub fn inputs(&self) -> &[InputVar] {
        &self.inputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn bit_width(&self) -> BitWidth {
        self.width
    }

    pub fn with_bit_width(mut self, width: BitWidth) -> Self {
        self.width = width;
        self
    }

    pub fn has_calls(&self) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n.kind, NodeKind::Seq(Edge::Call(..))))
    }

    pub fn error_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&n| self.node(n).error)
    }

    pub fn branch_count(&self, proc: ProcId) -> usize {
        self.proc(proc)
            .nodes
            .iter()
            .filter(|&&n| self.node(n).is_branch())
            .count()
    }

    /// Every `(call node, return site)` pair whose call targets `callee`.
    pub fn return_sites(&self, callee: ProcId) -> Vec<(NodeId, NodeId)> {
        self.node_ids()
            .filter_map(|n| match &self.node(n).kind {
                NodeKind::Seq(Edge::Call(call, site)) if call.callee == callee => Some((n, *site)),
                _ => None,
            })
            .collect()
    }

    /// Checks the structural CFGC invariants; returns a description of the
    /// first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut owner = vec![None; self.nodes.len()];
        for (pid, proc) in self.procs() {
            for &n in &proc.nodes {
                if owner[n.index()].replace(pid).is_some() {
                    return Err(format!("node {n} belongs to two procedures"));
                }
                if self.node(n).proc != pid {
                    return Err(format!("node {n} has the wrong owner"));
                }
            }
            if !matches!(self.node(proc.ret).kind, NodeKind::Return) {
                return Err(format!("return node of `{}` has an outgoing edge", proc.name));
            }
            if self.node(proc.initial).is_branch() {
                return Err(format!("initial node of `{}` is branching", proc.name));
            }
        }
        if owner.iter().any(Option::is_none) {
            return Err("node not owned by any procedure".into());
        }
        for n in self.node_ids() {
            let node = self.node(n);
            let within = |t: NodeId| self.node(t).proc == node.proc;
            match &node.kind {
                NodeKind::Branch { zero, one, .. } => {
                    if zero == one || !within(*zero) || !within(*one) {
                        return Err(format!("branching node {n} has malformed successors"));
                    }
                }
                NodeKind::Seq(Edge::Local(_, t)) => {
                    if !within(*t) {
                        return Err(format!("edge from {n} leaves its procedure"));
                    }
                }
                NodeKind::Seq(Edge::Call(call, t)) => {
                    if !within(*t) || call.callee.index() >= self.procs.len() {
                        return Err(format!("call edge from {n} is malformed"));
                    }
                    if call.args.len() != self.proc(call.callee).params.len() {
                        return Err(format!("call edge from {n} has wrong arity"));
                    }
                }
                NodeKind::Return => {
                    if self.proc(node.proc).ret != n {
                        return Err(format!("{n} is a second return node"));
                    }
                }
            }
        }
        Ok(())
    }
}
