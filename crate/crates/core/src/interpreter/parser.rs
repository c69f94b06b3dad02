//! Recursive-descent parser.
//!
//! Precedence, loosest first: assignment, `||`, `&&`, equality, relational,
//! additive, multiplicative, unary, call/member.

use std::rc::Rc;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Pos, Result};

pub fn parse_program(source: &str) -> Result<Program> {
    let mut p = Parser {
        toks: tokenize(source)?,
        i: 0,
    };
    let mut body = Vec::new();
    while !p.at_eof() {
        body.push(p.statement()?);
    }
    Ok(Program { body })
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn pos(&self) -> Pos {
        self.peek().pos
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if t.tok != Tok::Eof {
            self.i += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek().tok, Tok::Keyword(q) if q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.advance();
        }
        hit
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T> {
        let found = match &self.peek().tok {
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string".to_string(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Keyword(k) => format!("'{k}'"),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".to_string(),
        };
        Err(Error::syntax(
            format!("expected {expected}, found {found}"),
            self.pos(),
        ))
    }

    fn expect_punct(&mut self, p: &str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.unexpected(&format!("'{p}'"))
        }
    }

    fn ident(&mut self) -> Result<Rc<str>> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    /// Semicolons are required except before `}` or end of input.
    fn end_statement(&mut self) -> Result<()> {
        if self.eat_punct(";") || self.is_punct("}") || self.at_eof() {
            Ok(())
        } else {
            self.unexpected("';'")
        }
    }

    fn statement(&mut self) -> Result<Stmt> {
        let pos = self.pos();
        match &self.peek().tok {
            Tok::Keyword("var") => {
                self.advance();
                let mut decls = Vec::new();
                loop {
                    let name = self.ident()?;
                    let init = if self.eat_punct("=") {
                        Some(self.expression()?)
                    } else {
                        None
                    };
                    decls.push((name, init));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.end_statement()?;
                Ok(Stmt::Var(decls, pos))
            }
            Tok::Keyword("function") if matches!(self.toks[self.i + 1].tok, Tok::Ident(_)) => {
                self.advance();
                let name = self.ident()?;
                let def = self.function_rest(Some(name), pos)?;
                Ok(Stmt::Function(def))
            }
            Tok::Keyword("if") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.is_keyword("else") {
                    self.advance();
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            Tok::Keyword("while") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                Ok(Stmt::While { cond, body })
            }
            Tok::Keyword("return") => {
                self.advance();
                let value = if self.is_punct(";") || self.is_punct("}") || self.at_eof() {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.end_statement()?;
                Ok(Stmt::Return(value, pos))
            }
            Tok::Punct("{") => Ok(Stmt::Block(self.block()?)),
            Tok::Punct(";") => {
                self.advance();
                Ok(Stmt::Empty)
            }
            _ => {
                let e = self.expression()?;
                self.end_statement()?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.unexpected("'}'");
            }
            body.push(self.statement()?);
        }
        self.advance();
        Ok(body)
    }

    fn function_rest(&mut self, name: Option<Rc<str>>, pos: Pos) -> Result<Rc<FunctionDef>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                params.push(self.ident()?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        let body = self.block()?;
        Ok(Rc::new(FunctionDef {
            name,
            params,
            body,
            pos,
        }))
    }

    fn expression(&mut self) -> Result<Expr> {
        let lhs = self.logical_or()?;
        let op = match self.peek().tok {
            Tok::Punct("=") => None,
            Tok::Punct("+=") => Some(BinOp::Add),
            Tok::Punct("-=") => Some(BinOp::Sub),
            _ => return Ok(lhs),
        };
        let pos = self.pos();
        if !matches!(
            lhs.kind,
            ExprKind::Ident(_) | ExprKind::Member(..) | ExprKind::Index(..)
        ) {
            return Err(Error::syntax("invalid assignment target", lhs.pos));
        }
        self.advance();
        let rhs = self.expression()?;
        Ok(Expr {
            kind: ExprKind::Assign(Box::new(lhs), op, Box::new(rhs)),
            pos,
        })
    }

    fn logical_or(&mut self) -> Result<Expr> {
        let mut lhs = self.logical_and()?;
        while self.is_punct("||") {
            let pos = self.advance().pos;
            let rhs = self.logical_and()?;
            lhs = Expr {
                kind: ExprKind::Logical(LogicalOp::Or, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn logical_and(&mut self) -> Result<Expr> {
        let mut lhs = self.equality()?;
        while self.is_punct("&&") {
            let pos = self.advance().pos;
            let rhs = self.equality()?;
            lhs = Expr {
                kind: ExprKind::Logical(LogicalOp::And, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn binary_level(
        &mut self,
        ops: &[(&str, BinOp)],
        next: fn(&mut Self) -> Result<Expr>,
    ) -> Result<Expr> {
        let mut lhs = next(self)?;
        loop {
            let Some(&(_, op)) = ops.iter().find(|(p, _)| self.is_punct(p)) else {
                return Ok(lhs);
            };
            let pos = self.advance().pos;
            let rhs = next(self)?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn equality(&mut self) -> Result<Expr> {
        self.binary_level(
            &[
                ("===", BinOp::StrictEq),
                ("!==", BinOp::StrictNe),
                ("==", BinOp::Eq),
                ("!=", BinOp::Ne),
            ],
            Self::relational,
        )
    }

    fn relational(&mut self) -> Result<Expr> {
        self.binary_level(
            &[
                ("<=", BinOp::Le),
                (">=", BinOp::Ge),
                ("<", BinOp::Lt),
                (">", BinOp::Gt),
            ],
            Self::additive,
        )
    }

    fn additive(&mut self) -> Result<Expr> {
        self.binary_level(
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            Self::multiplicative,
        )
    }

    fn multiplicative(&mut self) -> Result<Expr> {
        self.binary_level(&[("*", BinOp::Mul), ("/", BinOp::Div)], Self::unary)
    }

    fn unary(&mut self) -> Result<Expr> {
        let op = match self.peek().tok {
            Tok::Punct("!") => UnaryOp::Not,
            Tok::Punct("-") => UnaryOp::Neg,
            _ => return self.postfix(),
        };
        let pos = self.advance().pos;
        let operand = self.unary()?;
        Ok(Expr {
            kind: ExprKind::Unary(op, Box::new(operand)),
            pos,
        })
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        loop {
            let pos = self.pos();
            if self.eat_punct(".") {
                let name = self.ident()?;
                e = Expr {
                    kind: ExprKind::Member(Box::new(e), name),
                    pos,
                };
            } else if self.eat_punct("[") {
                let index = self.expression()?;
                self.expect_punct("]")?;
                e = Expr {
                    kind: ExprKind::Index(Box::new(e), Box::new(index)),
                    pos,
                };
            } else if self.eat_punct("(") {
                let args = self.list(")")?;
                e = Expr {
                    kind: ExprKind::Call(Box::new(e), args),
                    pos,
                };
            } else {
                return Ok(e);
            }
        }
    }

    /// Comma-separated expressions up to `close`; a trailing comma is allowed.
    fn list(&mut self, close: &str) -> Result<Vec<Expr>> {
        let mut items = Vec::new();
        while !self.eat_punct(close) {
            items.push(self.expression()?);
            if !self.eat_punct(",") {
                self.expect_punct(close)?;
                break;
            }
        }
        Ok(items)
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let kind = match self.peek().tok.clone() {
            Tok::Number(n) => {
                self.advance();
                ExprKind::Number(n)
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Str(s)
            }
            Tok::Ident(s) => {
                self.advance();
                ExprKind::Ident(s)
            }
            Tok::Keyword("true") => {
                self.advance();
                ExprKind::Bool(true)
            }
            Tok::Keyword("false") => {
                self.advance();
                ExprKind::Bool(false)
            }
            Tok::Keyword("null") => {
                self.advance();
                ExprKind::Null
            }
            Tok::Keyword("undefined") => {
                self.advance();
                ExprKind::Undefined
            }
            Tok::Keyword("function") => {
                self.advance();
                let name = match &self.peek().tok {
                    Tok::Ident(_) => Some(self.ident()?),
                    _ => None,
                };
                ExprKind::Function(self.function_rest(name, pos)?)
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expression()?;
                self.expect_punct(")")?;
                return Ok(e);
            }
            Tok::Punct("[") => {
                self.advance();
                ExprKind::Array(self.list("]")?)
            }
            Tok::Punct("{") => {
                self.advance();
                let mut props = Vec::new();
                while !self.eat_punct("}") {
                    let key: Rc<str> = match self.peek().tok.clone() {
                        Tok::Ident(s) | Tok::Str(s) => s,
                        Tok::Keyword(k) => Rc::from(k),
                        Tok::Number(n) => Rc::from(crate::value::format_number(n)),
                        _ => return self.unexpected("property name"),
                    };
                    self.advance();
                    self.expect_punct(":")?;
                    props.push((key, self.expression()?));
                    if !self.eat_punct(",") {
                        self.expect_punct("}")?;
                        break;
                    }
                }
                ExprKind::Object(props)
            }
            _ => return self.unexpected("expression"),
        };
        Ok(Expr { kind, pos })
    }
}
