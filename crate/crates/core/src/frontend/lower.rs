//! Lowering of parsed procedures into CFGCs.

use std::collections::HashMap;

use super::expr::{Cond, Expr};
use super::lexer::Pos;
use super::parser::{parse, AstCond, AstExpr, CallExpr, FnDecl, Rhs, Stmt};
use super::program::{
    CallSite, Cfgc, Edge, InputId, InputOrigin, InputVar, Node, NodeId, NodeKind, ProcId, Program,
    Transition, VarId, VarRef,
};
use crate::error::{Error, Result};
use crate::value::BitWidth;

/// Parse `.imp` source and lower it to a [`Program`] with the given width.
pub fn parse_and_lower(source: &str, width: BitWidth) -> Result<Program> {
    let decls = parse(source)?;
    let mut names = HashMap::new();
    for (i, d) in decls.iter().enumerate() {
        if names.insert(d.name.clone(), ProcId(i as u32)).is_some() {
            return Err(Error::DuplicateProcedure(d.name.clone()));
        }
    }
    let main = *names.get("main").ok_or(Error::MissingMain)?;

    let mut lowering = Lowering {
        nodes: Vec::new(),
        inputs: Vec::new(),
        names: &names,
        decls: &decls,
    };
    // Main's formals are the first inputs, in declaration order.
    for (i, p) in decls[main.index()].params.iter().enumerate() {
        lowering.inputs.push(InputVar {
            name: p.clone(),
            origin: InputOrigin::MainParam(VarId(i as u32)),
        });
    }
    let procs = decls
        .iter()
        .enumerate()
        .map(|(i, d)| lowering.procedure(ProcId(i as u32), d))
        .collect::<Result<Vec<_>>>()?;
    let (nodes, inputs) = (lowering.nodes, lowering.inputs);

    let program = Program {
        procs,
        nodes,
        names,
        main,
        inputs,
        width,
    };
    debug_assert_eq!(program.check_invariants(), Ok(()));
    Ok(program)
}

struct Lowering<'a> {
    nodes: Vec<Node>,
    inputs: Vec<InputVar>,
    names: &'a HashMap<String, ProcId>,
    decls: &'a [FnDecl],
}

struct ProcState {
    id: ProcId,
    name: String,
    scopes: Vec<HashMap<String, VarId>>,
    var_names: Vec<String>,
    members: Vec<NodeId>,
    errors: Vec<NodeId>,
    ret: NodeId,
    ret_var: VarId,
    nondet_sites: usize,
}

fn located(name: &str, pos: Pos) -> String {
    format!("{name} (at {}:{})", pos.line, pos.column)
}

impl ProcState {
    fn lookup_at(&self, name: &str, pos: Pos) -> Result<VarId> {
        self.lookup(name).map_err(|e| match e {
            Error::UndefinedVariable { procedure, .. } => Error::UndefinedVariable {
                procedure,
                name: located(name, pos),
            },
            other => other,
        })
    }

    fn declare(&mut self, name: &str) -> VarId {
        let id = VarId(self.var_names.len() as u32);
        self.var_names.push(name.to_string());
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(name.to_string(), id);
        id
    }

    fn lookup(&self, name: &str) -> Result<VarId> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .ok_or_else(|| Error::UndefinedVariable {
                procedure: self.name.clone(),
                name: name.to_string(),
            })
    }
}

impl<'a> Lowering<'a> {
    /// A fresh sequential node whose outgoing edge is filled in later.
    fn fresh(&mut self, st: &mut ProcState) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            proc: st.id,
            kind: NodeKind::Return,
            error: false,
        });
        st.members.push(id);
        id
    }

    fn set(&mut self, id: NodeId, kind: NodeKind) {
        self.nodes[id.index()].kind = kind;
    }

    fn procedure(&mut self, id: ProcId, decl: &FnDecl) -> Result<Cfgc> {
        let mut st = ProcState {
            id,
            name: decl.name.clone(),
            scopes: vec![HashMap::new()],
            var_names: Vec::new(),
            members: Vec::new(),
            errors: Vec::new(),
            ret: NodeId(0),
            ret_var: VarId(0),
            nondet_sites: 0,
        };
        let mut params = Vec::new();
        for p in &decl.params {
            if st.scopes[0].contains_key(p) {
                return Err(Error::Syntax {
                    line: decl.pos.line,
                    column: decl.pos.column,
                    message: format!("duplicate parameter `{p}`"),
                });
            }
            params.push(st.declare(p));
        }
        // Not nameable from source: `ret` is not a reserved word, so the
        // return slot gets a name no identifier can take.
        st.ret_var = VarId(st.var_names.len() as u32);
        st.var_names.push("$ret".to_string());

        let initial = self.fresh(&mut st);
        st.ret = self.fresh(&mut st);
        let body = self.fresh(&mut st);
        self.set(
            initial,
            NodeKind::Seq(Edge::Local(
                Transition::Assign(st.ret_var, Expr::Const(0)),
                body,
            )),
        );
        let end = self.block(&mut st, &decl.body, body)?;
        let ret = st.ret;
        self.set(end, NodeKind::Seq(Edge::Local(Transition::Skip, ret)));

        Ok(Cfgc {
            name: decl.name.clone(),
            params,
            var_names: st.var_names,
            ret_var: st.ret_var,
            initial,
            ret: st.ret,
            nodes: st.members,
            errors: st.errors,
        })
    }

    /// Lowers `stmts` starting at the open node `cur`; returns the open node
    /// reached at the end of the block.
    fn block(&mut self, st: &mut ProcState, stmts: &[Stmt], mut cur: NodeId) -> Result<NodeId> {
        st.scopes.push(HashMap::new());
        for s in stmts {
            cur = self.statement(st, s, cur)?;
        }
        st.scopes.pop();
        Ok(cur)
    }

    fn statement(&mut self, st: &mut ProcState, stmt: &Stmt, cur: NodeId) -> Result<NodeId> {
        match stmt {
            Stmt::Let { name, value } => {
                // The right-hand side is resolved before the new binding exists.
                let next = self.fresh(st);
                match value {
                    Rhs::Expr(e) => {
                        let e = self.expr(st, e)?;
                        let var = st.declare(name);
                        self.set(cur, NodeKind::Seq(Edge::Local(Transition::Assign(var, e), next)));
                    }
                    Rhs::Call(call) => {
                        let mut site = self.call(st, call)?;
                        site.result = Some(st.declare(name));
                        self.set(cur, NodeKind::Seq(Edge::Call(site, next)));
                    }
                }
                Ok(next)
            }
            Stmt::Assign { name, pos, value } => {
                let var = st.lookup_at(name, *pos)?;
                let next = self.fresh(st);
                match value {
                    Rhs::Expr(e) => {
                        let e = self.expr(st, e)?;
                        self.set(cur, NodeKind::Seq(Edge::Local(Transition::Assign(var, e), next)));
                    }
                    Rhs::Call(call) => {
                        let mut site = self.call(st, call)?;
                        site.result = Some(var);
                        self.set(cur, NodeKind::Seq(Edge::Call(site, next)));
                    }
                }
                Ok(next)
            }
            Stmt::Call(call) => {
                let site = self.call(st, call)?;
                let next = self.fresh(st);
                self.set(cur, NodeKind::Seq(Edge::Call(site, next)));
                Ok(next)
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                let cond = self.cond(st, cond)?;
                let one = self.fresh(st);
                let zero = self.fresh(st);
                self.set(cur, NodeKind::Branch { cond, zero, one });
                let then_end = self.block(st, then_block, one)?;
                let else_end = match else_block {
                    Some(b) => self.block(st, b, zero)?,
                    None => zero,
                };
                let join = self.fresh(st);
                self.set(then_end, NodeKind::Seq(Edge::Local(Transition::Skip, join)));
                self.set(else_end, NodeKind::Seq(Edge::Local(Transition::Skip, join)));
                Ok(join)
            }
            Stmt::While { cond, body } => {
                // `cur` may already be the target of earlier edges, so the
                // loop header is a node of its own.
                let header = self.fresh(st);
                self.set(cur, NodeKind::Seq(Edge::Local(Transition::Skip, header)));
                let cond = self.cond(st, cond)?;
                let one = self.fresh(st);
                let zero = self.fresh(st);
                self.set(header, NodeKind::Branch { cond, zero, one });
                let body_end = self.block(st, body, one)?;
                self.set(body_end, NodeKind::Seq(Edge::Local(Transition::Skip, header)));
                Ok(zero)
            }
            Stmt::Assert(cond) => {
                let cond = self.cond(st, cond)?;
                let one = self.fresh(st);
                let zero = self.fresh(st);
                self.set(cur, NodeKind::Branch { cond, zero, one });
                self.nodes[zero.index()].error = true;
                self.set(zero, NodeKind::Seq(Edge::Local(Transition::Skip, zero)));
                st.errors.push(zero);
                Ok(one)
            }
            Stmt::Return(value) => {
                let t = match value {
                    Some(e) => Transition::Assign(st.ret_var, self.expr(st, e)?),
                    None => Transition::Skip,
                };
                let ret = st.ret;
                self.set(cur, NodeKind::Seq(Edge::Local(t, ret)));
                // Whatever follows is unreachable but still lowered.
                Ok(self.fresh(st))
            }
        }
    }

    fn call(&mut self, st: &mut ProcState, call: &CallExpr) -> Result<CallSite> {
        let callee = *self
            .names
            .get(&call.name)
            .ok_or_else(|| Error::UndefinedProcedure(located(&call.name, call.pos)))?;
        let expected = self.decls[callee.index()].params.len();
        if expected != call.args.len() {
            return Err(Error::ArityMismatch {
                name: call.name.clone(),
                expected,
                found: call.args.len(),
            });
        }
        let args = call
            .args
            .iter()
            .map(|a| self.expr(st, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(CallSite {
            callee,
            args,
            result: None,
        })
    }

    fn expr(&mut self, st: &mut ProcState, e: &AstExpr) -> Result<Expr<VarRef>> {
        Ok(match e {
            AstExpr::Int(v) => Expr::Const(*v),
            AstExpr::Var(name, pos) => Expr::Var(VarRef::Local(st.lookup_at(name, *pos)?)),
            AstExpr::Nondet => {
                let id = InputId(self.inputs.len() as u32);
                self.inputs.push(InputVar {
                    name: format!("{}.nondet{}", st.name, st.nondet_sites),
                    origin: InputOrigin::Nondet { proc: st.id },
                });
                st.nondet_sites += 1;
                Expr::Var(VarRef::Input(id))
            }
            AstExpr::Add(a, b) => Expr::Add(Box::new(self.expr(st, a)?), Box::new(self.expr(st, b)?)),
            AstExpr::Sub(a, b) => Expr::Sub(Box::new(self.expr(st, a)?), Box::new(self.expr(st, b)?)),
            AstExpr::Mul(a, b) => Expr::Mul(Box::new(self.expr(st, a)?), Box::new(self.expr(st, b)?)),
            AstExpr::Neg(a) => Expr::Neg(Box::new(self.expr(st, a)?)),
        })
    }

    fn cond(&mut self, st: &mut ProcState, c: &AstCond) -> Result<Cond<VarRef>> {
        Ok(match c {
            AstCond::Bool(b) => Cond::Bool(*b),
            AstCond::Cmp(op, a, b) => Cond::Cmp(*op, self.expr(st, a)?, self.expr(st, b)?),
            AstCond::And(a, b) => Cond::And(Box::new(self.cond(st, a)?), Box::new(self.cond(st, b)?)),
            AstCond::Or(a, b) => Cond::Or(Box::new(self.cond(st, a)?), Box::new(self.cond(st, b)?)),
            AstCond::Not(a) => Cond::Not(Box::new(self.cond(st, a)?)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower(src: &str) -> Program {
        parse_and_lower(src, BitWidth::DEFAULT).unwrap()
    }

    #[test]
    fn guarded_assert_has_two_branches_one_error() {
        let p = lower("fn main(x){ if(x>0){ assert(x>=1); } }");
        let main = p.main();
        assert_eq!(p.branch_count(main), 2);
        assert_eq!(p.proc(main).errors.len(), 1);
        assert_eq!(p.num_inputs(), 1);
        assert_eq!(p.check_invariants(), Ok(()));
    }

    #[test]
    fn empty_main_is_branch_free() {
        let p = lower("fn main(){ }");
        let main = p.proc(p.main());
        assert!(!p.node(main.initial).is_branch());
        assert_eq!(p.branch_count(p.main()), 0);
        assert!(main.errors.is_empty());
    }

    #[test]
    fn assert_false_zero_successor_is_error() {
        let p = lower("fn main(x){ assert(false); }");
        let branch = p
            .node_ids()
            .find(|&n| p.node(n).is_branch())
            .expect("a branching node");
        match &p.node(branch).kind {
            NodeKind::Branch { cond, zero, .. } => {
                assert_eq!(cond, &Cond::Bool(false));
                assert!(p.node(*zero).error);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn compound_condition_is_one_branch() {
        let p = lower("fn main(x, y){ if(x > 0 && (y < 3 || !(x == y))){ x = 1; } }");
        assert_eq!(p.branch_count(p.main()), 1);
    }

    #[test]
    fn nondet_becomes_fresh_input() {
        let p = lower("fn f() { let a = nondet(); } fn main(x){ let y = nondet() + nondet(); f(); }");
        assert_eq!(p.num_inputs(), 4);
        assert_eq!(p.inputs()[0].origin, InputOrigin::MainParam(VarId(0)));
        assert!(matches!(p.inputs()[1].origin, InputOrigin::Nondet { .. }));
    }

    #[test]
    fn resolution_errors() {
        let w = BitWidth::DEFAULT;
        assert!(matches!(
            parse_and_lower("fn main(){ x = 1; }", w),
            Err(Error::UndefinedVariable { .. })
        ));
        assert!(matches!(
            parse_and_lower("fn main(){ g(); }", w),
            Err(Error::UndefinedProcedure(_))
        ));
        assert!(matches!(
            parse_and_lower("fn f(a){ } fn main(){ f(); }", w),
            Err(Error::ArityMismatch { expected: 1, found: 0, .. })
        ));
        assert!(matches!(parse_and_lower("fn f(){ }", w), Err(Error::MissingMain)));
        assert!(matches!(
            parse_and_lower("fn main(){ let y = y; }", w),
            Err(Error::UndefinedVariable { .. })
        ));
    }

    #[test]
    fn block_scoping() {
        let w = BitWidth::DEFAULT;
        assert!(parse_and_lower("fn main(x){ if (x > 0) { let t = 1; } x = t; }", w).is_err());
        let p = lower("fn main(x){ let t = 1; if (x > 0) { let t = 2; } x = t; }");
        assert_eq!(p.proc(p.main()).num_vars(), 4);
    }

    #[test]
    fn call_edges_and_return_sites() {
        let p = lower("fn f(n){ return n + 1; } fn main(x){ let a = f(x); let b = f(a); }");
        let f = p.proc_by_name("f").unwrap();
        assert_eq!(p.return_sites(f).len(), 2);
        assert!(p.has_calls());
        assert_eq!(p.check_invariants(), Ok(()));
    }
}
