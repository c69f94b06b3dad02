//! The runtime: heap, globals, output buffer, counters and hooks.

use std::rc::Rc;

use crate::error::{Error, ErrorKind, Result};
use crate::heap::{Callable, Heap, MembraneId, NativeObject, ObjectRecord};
use crate::instrument::Instrumentation;
use crate::interpreter::{self, Env};
use crate::value::{ObjectRef, Value};

/// Nested call limit; a trap that re-enters its own proxy hits this instead
/// of overflowing the host stack.
pub const MAX_CALL_DEPTH: usize = 200;

/// Event counters used by the stability and fast-path checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// get/set/has/deleteProperty/apply trap invocations.
    pub trap_calls: u64,
    pub is_transparent_calls: u64,
    /// Loop iterations of identity resolution over object inputs.
    pub identity_steps: u64,
    /// Surface comparisons with at least one non-object operand.
    pub non_object_comparisons: u64,
    /// Identity-resolution iterations observed while evaluating those.
    pub non_object_identity_steps: u64,
}

pub struct Runtime {
    pub heap: Heap,
    pub counters: Counters,
    pub(crate) globals: Env,
    pub(crate) output: Vec<String>,
    pub(crate) instrumentation: Option<Instrumentation>,
    next_membrane: u32,
    depth: usize,
}

impl Default for Runtime {
    fn default() -> Self {
        Self::new()
    }
}

impl Runtime {
    /// A runtime with every builtin bound in its global scope.
    pub fn new() -> Self {
        let mut rt = Runtime {
            heap: Heap::default(),
            counters: Counters::default(),
            globals: Env::root(),
            output: Vec::new(),
            instrumentation: None,
            next_membrane: 0,
            depth: 0,
        };
        interpreter::builtins::install(&mut rt);
        rt
    }

    pub fn globals(&self) -> &Env {
        &self.globals
    }

    pub fn global(&self, name: &str) -> Option<Value> {
        self.globals.lookup(name)
    }

    pub fn define_global(&mut self, name: &str, value: Value) {
        self.globals.define(name, value);
    }

    pub fn output(&self) -> &[String] {
        &self.output
    }

    pub fn take_output(&mut self) -> Vec<String> {
        std::mem::take(&mut self.output)
    }

    pub fn print_line(&mut self, line: String) {
        self.output.push(line);
    }

    pub fn enable_instrumentation(&mut self, keep_events: bool) {
        self.instrumentation = Some(Instrumentation::new(keep_events));
    }

    pub fn instrumentation(&self) -> Option<&Instrumentation> {
        self.instrumentation.as_ref()
    }

    pub fn take_instrumentation(&mut self) -> Option<Instrumentation> {
        self.instrumentation.take()
    }

    pub(crate) fn fresh_membrane_id(&mut self) -> MembraneId {
        self.next_membrane += 1;
        MembraneId(self.next_membrane)
    }

    /// Allocates a native function object.
    pub fn make_function<F>(&mut self, name: &str, f: F) -> ObjectRef
    where
        F: Fn(&mut Runtime, Value, &[Value]) -> Result<Value> + 'static,
    {
        self.heap.alloc(ObjectRecord::Native(NativeObject {
            call: Some(Callable::Native {
                name: Rc::from(name),
                f: Rc::new(f),
            }),
            ..NativeObject::default()
        }))
    }

    /// Calls any value; non-callables raise a TypeError.
    pub fn call(&mut self, f: &Value, this: Value, args: &[Value]) -> Result<Value> {
        match f {
            Value::Object(r) => self.dispatch_apply(*r, this, args),
            other => Err(Error::type_error(format!(
                "{} is not a function",
                self.display(other)
            ))),
        }
    }

    pub(crate) fn invoke(
        &mut self,
        callable: Callable,
        this: Value,
        args: &[Value],
    ) -> Result<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(Error::new(
                ErrorKind::TypeError,
                "maximum call depth exceeded",
            ));
        }
        self.depth += 1;
        // Nested script calls recurse through the evaluator; grow the native
        // stack on demand so the depth limit, not the host thread, decides.
        let result = stacker::maybe_grow(256 * 1024, 2 * 1024 * 1024, || match callable {
            Callable::Native { f, .. } => f(self, this, args),
            Callable::Script(closure) => interpreter::call_closure(self, &closure, args),
        });
        self.depth -= 1;
        result
    }

    /// Printable form used by `print` and in diagnostics.
    pub fn display(&self, v: &Value) -> String {
        match v {
            Value::Undefined => "undefined".into(),
            Value::Null => "null".into(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => crate::value::format_number(*n),
            Value::Str(s) => s.to_string(),
            Value::Object(r) => {
                if self.heap.is_callable(*r) {
                    "[function]".into()
                } else {
                    "[object]".into()
                }
            }
        }
    }

    /// `typeOf`: proxies report the same type as their base target.
    pub fn type_of(&self, v: &Value) -> &'static str {
        match v {
            Value::Undefined => "undefined",
            Value::Null => "object",
            Value::Bool(_) => "boolean",
            Value::Number(_) => "number",
            Value::Str(_) => "string",
            Value::Object(r) if self.heap.is_callable(*r) => "function",
            Value::Object(_) => "object",
        }
    }
}
