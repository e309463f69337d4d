//! Recursive-descent parser for `.imp` sources.

use super::expr::CmpOp;
use super::lexer::{tokenize, Pos, Tok, Token};
use crate::error::Result;

#[derive(Debug, Clone)]
pub(crate) struct FnDecl {
    pub name: String,
    pub pos: Pos,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub(crate) enum Stmt {
    Let { name: String, value: Rhs },
    Assign { name: String, pos: Pos, value: Rhs },
    If {
        cond: AstCond,
        then_block: Vec<Stmt>,
        else_block: Option<Vec<Stmt>>,
    },
    While { cond: AstCond, body: Vec<Stmt> },
    Assert(AstCond),
    Return(Option<AstExpr>),
    Call(CallExpr),
}

#[derive(Debug, Clone)]
pub(crate) enum Rhs {
    Expr(AstExpr),
    Call(CallExpr),
}

#[derive(Debug, Clone)]
pub(crate) struct CallExpr {
    pub name: String,
    pub pos: Pos,
    pub args: Vec<AstExpr>,
}

#[derive(Debug, Clone)]
pub(crate) enum AstExpr {
    Int(i64),
    Var(String, Pos),
    Nondet,
    Add(Box<AstExpr>, Box<AstExpr>),
    Sub(Box<AstExpr>, Box<AstExpr>),
    Mul(Box<AstExpr>, Box<AstExpr>),
    Neg(Box<AstExpr>),
}

#[derive(Debug, Clone)]
pub(crate) enum AstCond {
    Bool(bool),
    Cmp(CmpOp, AstExpr, AstExpr),
    And(Box<AstCond>, Box<AstCond>),
    Or(Box<AstCond>, Box<AstCond>),
    Not(Box<AstCond>),
}

pub(crate) fn parse(src: &str) -> Result<Vec<FnDecl>> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, at: 0 };
    let mut fns = Vec::new();
    while p.peek() != &Tok::Eof {
        fns.push(p.function()?);
    }
    if fns.is_empty() {
        return Err(p.pos().error("expected at least one `fn`"));
    }
    Ok(fns)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.pos().error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                Ok((name, pos))
            }
            other => Err(pos.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn function(&mut self) -> Result<FnDecl> {
        self.expect(Tok::Fn, "`fn`")?;
        let (name, pos) = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                params.push(self.ident()?.0);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma, "`,` or `)`")?;
            }
        }
        let body = self.block()?;
        Ok(FnDecl {
            name,
            pos,
            params,
            body,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.peek() == &Tok::Eof {
                return Err(self.pos().error("unexpected end of input, expected `}`"));
            }
            stmts.push(self.statement()?);
        }
        Ok(stmts)
    }

    fn statement(&mut self) -> Result<Stmt> {
        match self.peek().clone() {
            Tok::Let => {
                self.next();
                let (name, _) = self.ident()?;
                self.expect(Tok::Assign, "`=`")?;
                let value = self.rhs()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Let { name, value })
            }
            Tok::If => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(Tok::RParen, "`)`")?;
                let then_block = self.block()?;
                let else_block = if self.eat(&Tok::Else) {
                    if self.peek() == &Tok::If {
                        Some(vec![self.statement()?])
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then_block,
                    else_block,
                })
            }
            Tok::While => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(Tok::RParen, "`)`")?;
                let body = self.block()?;
                Ok(Stmt::While { cond, body })
            }
            Tok::Assert => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.cond()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Assert(cond))
            }
            Tok::Return => {
                self.next();
                let value = if self.peek() == &Tok::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Return(value))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                if self.peek_at(1) == &Tok::LParen {
                    let call = self.call()?;
                    self.expect(Tok::Semi, "`;`")?;
                    return Ok(Stmt::Call(call));
                }
                self.next();
                self.expect(Tok::Assign, "`=` or `(`")?;
                let value = self.rhs()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Assign { name, pos, value })
            }
            other => Err(self
                .pos()
                .error(format!("expected statement, found {}", describe(&other)))),
        }
    }

    fn rhs(&mut self) -> Result<Rhs> {
        if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::LParen {
            Ok(Rhs::Call(self.call()?))
        } else {
            Ok(Rhs::Expr(self.expr()?))
        }
    }

    fn call(&mut self) -> Result<CallExpr> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma, "`,` or `)`")?;
            }
        }
        Ok(CallExpr { name, pos, args })
    }

    fn cond(&mut self) -> Result<AstCond> {
        let mut lhs = self.cond_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.cond_and()?;
            lhs = AstCond::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_and(&mut self) -> Result<AstCond> {
        let mut lhs = self.cond_unary()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.cond_unary()?;
            lhs = AstCond::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_unary(&mut self) -> Result<AstCond> {
        match self.peek() {
            Tok::Bang => {
                self.next();
                Ok(AstCond::Not(Box::new(self.cond_unary()?)))
            }
            Tok::True => {
                self.next();
                Ok(AstCond::Bool(true))
            }
            Tok::False => {
                self.next();
                Ok(AstCond::Bool(false))
            }
            Tok::LParen => {
                // Either a parenthesized condition or a comparison whose left
                // operand starts with `(`.
                let save = self.at;
                self.next();
                if let Ok(inner) = self.cond() {
                    if self.eat(&Tok::RParen) && !is_expr_continuation(self.peek()) {
                        return Ok(inner);
                    }
                }
                self.at = save;
                self.comparison()
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<AstCond> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::NotEq => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            other => {
                return Err(self.pos().error(format!(
                    "expected comparison operator, found {}",
                    describe(other)
                )))
            }
        };
        self.next();
        let rhs = self.expr()?;
        Ok(AstCond::Cmp(op, lhs, rhs))
    }

    fn expr(&mut self) -> Result<AstExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = AstExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = AstExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<AstExpr> {
        let mut lhs = self.factor()?;
        while self.eat(&Tok::Star) {
            lhs = AstExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<AstExpr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Minus => {
                self.next();
                Ok(AstExpr::Neg(Box::new(self.factor()?)))
            }
            Tok::Int(v) => {
                self.next();
                Ok(AstExpr::Int(v))
            }
            Tok::Nondet => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(AstExpr::Nondet)
            }
            Tok::Ident(name) => {
                self.next();
                if self.peek() == &Tok::LParen {
                    return Err(pos.error(format!(
                        "call to `{name}` may only appear as a statement or assignment right-hand side"
                    )));
                }
                Ok(AstExpr::Var(name, pos))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => Err(pos.error(format!("expected expression, found {}", describe(&other)))),
        }
    }
}

fn is_expr_continuation(tok: &Tok) -> bool {
    matches!(
        tok,
        Tok::Plus | Tok::Minus | Tok::Star | Tok::EqEq | Tok::NotEq | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge
    )
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn parses_nested_conditions() {
        let fns = parse("fn main(x, y) { if ((x + 1) > 2 && !(y == 0 || false)) { x = 1; } }").unwrap();
        assert_eq!(fns.len(), 1);
        assert_eq!(fns[0].params, vec!["x", "y"]);
        match &fns[0].body[0] {
            Stmt::If { cond: AstCond::And(l, r), .. } => {
                assert!(matches!(**l, AstCond::Cmp(CmpOp::Gt, AstExpr::Add(..), AstExpr::Int(2))));
                assert!(matches!(**r, AstCond::Not(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse("fn main() {\n  let x = ;\n}").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 11, .. }), "{err}");
    }

    #[test]
    fn calls_and_returns() {
        let fns = parse("fn f(a) { return a * 2; } fn main(x) { let y = f(x); f(y); return; }").unwrap();
        assert_eq!(fns.len(), 2);
        assert!(matches!(fns[1].body[0], Stmt::Let { value: Rhs::Call(_), .. }));
        assert!(matches!(fns[1].body[1], Stmt::Call(_)));
        assert!(matches!(fns[1].body[2], Stmt::Return(None)));
    }
}
