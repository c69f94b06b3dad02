//! Lexer, parser and tree-walking evaluator for the scripting language.

pub mod ast;
pub mod builtins;
mod lexer;
mod parser;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

pub use ast::Program;
pub use parser::parse_program;

use crate::equality::{has_non_object_operand, to_number};
use crate::error::{Error, ErrorKind, Pos, Result};
use crate::heap::{Callable, NativeObject, ObjectRecord};
use crate::instrument::{classify_comparison, CompareOp, ComparisonReport};
use crate::object::property_key;
use crate::runtime::Runtime;
use crate::value::Value;
use ast::*;

/// A lexical scope frame.
#[derive(Clone)]
pub struct Env(Rc<Frame>);

struct Frame {
    vars: RefCell<HashMap<Rc<str>, Value>>,
    parent: Option<Env>,
}

impl Env {
    pub fn root() -> Env {
        Env(Rc::new(Frame {
            vars: RefCell::default(),
            parent: None,
        }))
    }

    pub fn child(&self) -> Env {
        Env(Rc::new(Frame {
            vars: RefCell::default(),
            parent: Some(self.clone()),
        }))
    }

    pub fn define(&self, name: &str, value: Value) {
        self.0.vars.borrow_mut().insert(Rc::from(name), value);
    }

    pub fn lookup(&self, name: &str) -> Option<Value> {
        let mut env = self;
        loop {
            if let Some(v) = env.0.vars.borrow().get(name) {
                return Some(v.clone());
            }
            env = env.0.parent.as_ref()?;
        }
    }

    /// Rebinds an existing name; `false` when unbound.
    pub fn assign(&self, name: &str, value: Value) -> bool {
        let mut env = self;
        loop {
            if let Some(slot) = env.0.vars.borrow_mut().get_mut(name) {
                *slot = value;
                return true;
            }
            match env.0.parent.as_ref() {
                Some(p) => env = p,
                None => return false,
            }
        }
    }
}

pub struct Closure {
    def: Rc<FunctionDef>,
    env: Env,
}

impl Closure {
    pub fn name(&self) -> &str {
        self.def.name.as_deref().unwrap_or("<anonymous>")
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub instrument: bool,
    /// Keep every recorded comparison event for later inspection.
    pub keep_events: bool,
}

/// Result of running a program to completion or to its first uncaught error.
#[derive(Debug)]
pub struct Outcome {
    pub output: Vec<String>,
    pub error: Option<Error>,
    pub report: Option<ComparisonReport>,
}

/// Parses and runs `source` in a fresh runtime.
pub fn run_source(source: &str, options: RunOptions) -> Outcome {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                output: Vec::new(),
                error: Some(e),
                report: None,
            }
        }
    };
    let mut rt = Runtime::new();
    if options.instrument {
        rt.enable_instrumentation(options.keep_events);
    }
    let result = rt.run_program(&program);
    rt.finish(result)
}

impl Runtime {
    /// Binds every top-level function declaration in the global scope.
    pub fn declare_functions(&mut self, program: &Program) {
        let globals = self.globals.clone();
        hoist(self, &program.body, &globals);
    }

    /// Runs the top-level statements. Declarations must already be hoisted.
    pub fn execute(&mut self, program: &Program) -> Result<()> {
        let globals = self.globals.clone();
        for stmt in &program.body {
            if let Flow::Return(_) = exec(self, stmt, &globals)? {
                break;
            }
        }
        Ok(())
    }

    pub fn run_program(&mut self, program: &Program) -> Result<()> {
        self.declare_functions(program);
        self.execute(program)
    }

    /// Packages the printed output and the report.
    pub fn finish(&mut self, result: Result<()>) -> Outcome {
        Outcome {
            output: self.take_output(),
            error: result.err(),
            report: self.instrumentation.as_ref().map(|i| i.report().clone()),
        }
    }

    pub fn make_closure(&mut self, def: Rc<FunctionDef>, env: Env) -> Value {
        Value::Object(self.heap.alloc(ObjectRecord::Native(NativeObject {
            call: Some(Callable::Script(Rc::new(Closure { def, env }))),
            ..NativeObject::default()
        })))
    }
}

pub(crate) fn call_closure(rt: &mut Runtime, closure: &Closure, args: &[Value]) -> Result<Value> {
    let env = closure.env.child();
    for (i, param) in closure.def.params.iter().enumerate() {
        env.define(param, args.get(i).cloned().unwrap_or(Value::Undefined));
    }
    match exec_block(rt, &closure.def.body, &env)? {
        Flow::Return(v) => Ok(v),
        Flow::Normal => Ok(Value::Undefined),
    }
}

enum Flow {
    Normal,
    Return(Value),
}

fn hoist(rt: &mut Runtime, body: &[Stmt], env: &Env) {
    for stmt in body {
        if let Stmt::Function(def) = stmt {
            let f = rt.make_closure(def.clone(), env.clone());
            env.define(def.name.as_deref().expect("declarations are named"), f);
        }
    }
}

fn exec_block(rt: &mut Runtime, body: &[Stmt], env: &Env) -> Result<Flow> {
    hoist(rt, body, env);
    for stmt in body {
        if let Flow::Return(v) = exec(rt, stmt, env)? {
            return Ok(Flow::Return(v));
        }
    }
    Ok(Flow::Normal)
}

fn exec(rt: &mut Runtime, stmt: &Stmt, env: &Env) -> Result<Flow> {
    match stmt {
        Stmt::Var(decls, _) => {
            for (name, init) in decls {
                let v = match init {
                    Some(e) => eval(rt, e, env)?,
                    None => Value::Undefined,
                };
                env.define(name, v);
            }
        }
        Stmt::Function(_) | Stmt::Empty => {}
        Stmt::Expr(e) => {
            eval(rt, e, env)?;
        }
        Stmt::If {
            cond,
            then,
            otherwise,
        } => {
            if eval(rt, cond, env)?.truthy() {
                return exec_scoped(rt, then, env);
            } else if let Some(other) = otherwise {
                return exec_scoped(rt, other, env);
            }
        }
        Stmt::While { cond, body } => {
            while eval(rt, cond, env)?.truthy() {
                if let Flow::Return(v) = exec_scoped(rt, body, env)? {
                    return Ok(Flow::Return(v));
                }
            }
        }
        Stmt::Return(e, _) => {
            let v = match e {
                Some(e) => eval(rt, e, env)?,
                None => Value::Undefined,
            };
            return Ok(Flow::Return(v));
        }
        Stmt::Block(body) => return exec_block(rt, body, &env.child()),
    }
    Ok(Flow::Normal)
}

fn exec_scoped(rt: &mut Runtime, stmt: &Stmt, env: &Env) -> Result<Flow> {
    match stmt {
        Stmt::Block(body) => exec_block(rt, body, &env.child()),
        other => exec(rt, other, env),
    }
}

fn get_property(rt: &mut Runtime, base: &Value, key: &str) -> Result<Value> {
    match base {
        Value::Object(r) => rt.dispatch_get(*r, key),
        Value::Str(s) if key == "length" => Ok(Value::Number(s.chars().count() as f64)),
        Value::Undefined | Value::Null => Err(Error::type_error(format!(
            "cannot read property '{key}' of {}",
            rt.display(base)
        ))),
        _ => Ok(Value::Undefined),
    }
}

fn set_property(rt: &mut Runtime, base: &Value, key: &str, value: Value) -> Result<Value> {
    match base {
        Value::Object(r) => rt.dispatch_set(*r, key, value),
        _ => Err(Error::type_error(format!(
            "cannot set property '{key}' of {}",
            rt.display(base)
        ))),
    }
}

fn eval(rt: &mut Runtime, expr: &Expr, env: &Env) -> Result<Value> {
    eval_inner(rt, expr, env).map_err(|e| e.at(expr.pos))
}

fn eval_inner(rt: &mut Runtime, expr: &Expr, env: &Env) -> Result<Value> {
    Ok(match &expr.kind {
        ExprKind::Number(n) => Value::Number(*n),
        ExprKind::Str(s) => Value::Str(s.clone()),
        ExprKind::Bool(b) => Value::Bool(*b),
        ExprKind::Null => Value::Null,
        ExprKind::Undefined => Value::Undefined,
        ExprKind::Ident(name) => env.lookup(name).ok_or_else(|| {
            Error::new(
                ErrorKind::ReferenceError,
                format!("'{name}' is not defined"),
            )
        })?,
        ExprKind::Object(props) => {
            let mut values = Vec::with_capacity(props.len());
            for (k, e) in props {
                values.push((k.clone(), eval(rt, e, env)?));
            }
            Value::Object(rt.make_native_object(values.iter().map(|(k, v)| (&**k, v.clone()))))
        }
        ExprKind::Array(items) => {
            let values = items
                .iter()
                .map(|e| eval(rt, e, env))
                .collect::<Result<Vec<_>>>()?;
            Value::Object(rt.make_array(&values))
        }
        ExprKind::Member(obj, name) => {
            let base = eval(rt, obj, env)?;
            get_property(rt, &base, name)?
        }
        ExprKind::Index(obj, index) => {
            let base = eval(rt, obj, env)?;
            let key = eval(rt, index, env)?;
            let key = property_key(rt, &key);
            get_property(rt, &base, &key)?
        }
        ExprKind::Call(callee, args) => {
            let (this, f) = match &callee.kind {
                ExprKind::Member(obj, name) => {
                    let base = eval(rt, obj, env)?;
                    let f = get_property(rt, &base, name).map_err(|e| e.at(callee.pos))?;
                    (base, f)
                }
                _ => (Value::Undefined, eval(rt, callee, env)?),
            };
            let args = args
                .iter()
                .map(|e| eval(rt, e, env))
                .collect::<Result<Vec<_>>>()?;
            if !matches!(f, Value::Object(r) if rt.heap.is_callable(r)) {
                return Err(Error::type_error(format!(
                    "{} is not a function",
                    describe_callee(callee)
                )));
            }
            rt.call(&f, this, &args)?
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let l = eval(rt, lhs, env)?;
            let r = eval(rt, rhs, env)?;
            binary(rt, *op, &l, &r, expr.pos)?
        }
        ExprKind::Logical(op, lhs, rhs) => {
            let l = eval(rt, lhs, env)?.truthy();
            let v = match op {
                LogicalOp::And => l && eval(rt, rhs, env)?.truthy(),
                LogicalOp::Or => l || eval(rt, rhs, env)?.truthy(),
            };
            Value::Bool(v)
        }
        ExprKind::Unary(op, operand) => {
            let v = eval(rt, operand, env)?;
            match op {
                UnaryOp::Not => Value::Bool(!v.truthy()),
                UnaryOp::Neg => Value::Number(-numeric(rt, &v)?),
            }
        }
        ExprKind::Assign(target, op, value) => assign(rt, target, *op, value, env)?,
        ExprKind::Function(def) => {
            // A named function expression can refer to itself.
            match &def.name {
                Some(name) => {
                    let scope = env.child();
                    let f = rt.make_closure(def.clone(), scope.clone());
                    scope.define(name, f.clone());
                    f
                }
                None => rt.make_closure(def.clone(), env.clone()),
            }
        }
    })
}

fn describe_callee(callee: &Expr) -> String {
    match &callee.kind {
        ExprKind::Ident(n) => format!("'{n}'"),
        ExprKind::Member(_, n) => format!("'.{n}'"),
        _ => "callee".to_string(),
    }
}

fn assign(
    rt: &mut Runtime,
    target: &Expr,
    op: Option<BinOp>,
    value: &Expr,
    env: &Env,
) -> Result<Value> {
    match &target.kind {
        ExprKind::Ident(name) => {
            let mut v = eval(rt, value, env)?;
            if let Some(op) = op {
                let current = env.lookup(name).ok_or_else(|| {
                    Error::new(
                        ErrorKind::ReferenceError,
                        format!("'{name}' is not defined"),
                    )
                })?;
                v = binary(rt, op, &current, &v, target.pos)?;
            }
            if !env.assign(name, v.clone()) {
                return Err(Error::new(
                    ErrorKind::ReferenceError,
                    format!("assignment to undeclared variable '{name}'"),
                ));
            }
            Ok(v)
        }
        ExprKind::Member(..) | ExprKind::Index(..) => {
            let (base, key) = match &target.kind {
                ExprKind::Member(obj, name) => (eval(rt, obj, env)?, name.to_string()),
                ExprKind::Index(obj, index) => {
                    let base = eval(rt, obj, env)?;
                    let key = eval(rt, index, env)?;
                    (base, property_key(rt, &key))
                }
                _ => unreachable!(),
            };
            let mut v = eval(rt, value, env)?;
            if let Some(op) = op {
                let current = get_property(rt, &base, &key)?;
                v = binary(rt, op, &current, &v, target.pos)?;
            }
            set_property(rt, &base, &key, v)
        }
        _ => Err(Error::syntax("invalid assignment target", target.pos)),
    }
}

fn to_primitive_value(rt: &mut Runtime, v: &Value) -> Result<Value> {
    match v {
        Value::Object(r) => rt.to_primitive(*r),
        other => Ok(other.clone()),
    }
}

fn numeric(rt: &mut Runtime, v: &Value) -> Result<f64> {
    Ok(to_number(&to_primitive_value(rt, v)?))
}

fn binary(rt: &mut Runtime, op: BinOp, l: &Value, r: &Value, pos: Pos) -> Result<Value> {
    let compare_op = match op {
        BinOp::Eq => Some(CompareOp::Eq),
        BinOp::Ne => Some(CompareOp::Ne),
        BinOp::StrictEq => Some(CompareOp::StrictEq),
        BinOp::StrictNe => Some(CompareOp::StrictNe),
        _ => None,
    };
    if let Some(cop) = compare_op {
        return compare(rt, cop, l, r, pos).map(Value::Bool);
    }
    Ok(match op {
        BinOp::Add => {
            let l = to_primitive_value(rt, l)?;
            let r = to_primitive_value(rt, r)?;
            if matches!(l, Value::Str(_)) || matches!(r, Value::Str(_)) {
                Value::Str(format!("{}{}", rt.display(&l), rt.display(&r)).into())
            } else {
                Value::Number(to_number(&l) + to_number(&r))
            }
        }
        BinOp::Sub => Value::Number(numeric(rt, l)? - numeric(rt, r)?),
        BinOp::Mul => Value::Number(numeric(rt, l)? * numeric(rt, r)?),
        BinOp::Div => Value::Number(numeric(rt, l)? / numeric(rt, r)?),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let l = to_primitive_value(rt, l)?;
            let r = to_primitive_value(rt, r)?;
            let ord = match (&l, &r) {
                (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
                _ => to_number(&l).partial_cmp(&to_number(&r)),
            };
            let Some(ord) = ord else {
                return Ok(Value::Bool(false));
            };
            Value::Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        _ => unreachable!("comparisons handled above"),
    })
}

/// Surface comparison: records the event when instrumented, then evaluates.
fn compare(rt: &mut Runtime, op: CompareOp, l: &Value, r: &Value, pos: Pos) -> Result<bool> {
    let class = rt
        .instrumentation
        .is_some()
        .then(|| classify_comparison(&rt.heap, l, r));
    let non_object = has_non_object_operand(l, r);
    let steps_before = rt.counters.identity_steps;
    let equal = match op {
        CompareOp::Eq | CompareOp::Ne => rt.abstract_equals(l, r),
        CompareOp::StrictEq | CompareOp::StrictNe => rt.strict_equals(l, r),
    };
    if non_object {
        rt.counters.non_object_comparisons += 1;
        rt.counters.non_object_identity_steps += rt.counters.identity_steps - steps_before;
    }
    if let (Some(instr), Some(class)) = (rt.instrumentation.as_mut(), class) {
        instr.record(pos, op, class, l, r, equal.as_ref().ok().copied());
    }
    let equal = equal?;
    Ok(if op.is_negated() { !equal } else { equal })
}
