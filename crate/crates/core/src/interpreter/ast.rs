use std::rc::Rc;

use crate::error::Pos;

#[derive(Debug)]
pub struct Program {
    pub body: Vec<Stmt>,
}

impl Program {
    /// Names of top-level function declarations, in source order.
    pub fn top_level_functions(&self) -> Vec<Rc<str>> {
        self.body
            .iter()
            .filter_map(|s| match s {
                Stmt::Function(def) => def.name.clone(),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct FunctionDef {
    pub name: Option<Rc<str>>,
    pub params: Vec<Rc<str>>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug)]
pub enum Stmt {
    Var(Vec<(Rc<str>, Option<Expr>)>, Pos),
    /// Named declaration, hoisted to the top of its block.
    Function(Rc<FunctionDef>),
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>, Pos),
    Block(Vec<Stmt>),
    Empty,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    StrictEq,
    StrictNe,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogicalOp {
    And,
    Or,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug)]
pub enum ExprKind {
    Number(f64),
    Str(Rc<str>),
    Bool(bool),
    Null,
    Undefined,
    Ident(Rc<str>),
    Object(Vec<(Rc<str>, Expr)>),
    Array(Vec<Expr>),
    Member(Box<Expr>, Rc<str>),
    Index(Box<Expr>, Box<Expr>),
    Call(Box<Expr>, Vec<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Logical(LogicalOp, Box<Expr>, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    /// `target = value`, or `target op= value` when the operator is present.
    Assign(Box<Expr>, Option<BinOp>, Box<Expr>),
    Function(Rc<FunctionDef>),
}
