//! Identity-sensitive comparison.
//!
//! Every object comparison goes through [`Runtime::identity_object`], which
//! unwraps transparent layers until it reaches a native object or a proxy
//! that keeps its own identity. Two proxy flavours are handled in the same
//! loop:
//!
//! * `TransparentProxy` records always unwrap, through their target slot,
//!   whether or not they have been revoked.
//! * Ordinary proxies unwrap only when their handler's `isTransparent` trap
//!   answers truthy. A revoked ordinary proxy raises a TypeError as soon as
//!   resolution reaches it.
//!
//! The `isTransparent` trap is invoked on every resolution and its answer is
//! not cached. A trap that changes its answer makes equality unstable.

use crate::error::{Error, Result};
use crate::heap::ProxyKind;
use crate::object::TRAP_IS_TRANSPARENT;
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Tag, Value};

#[derive(Clone, Debug)]
pub struct IdentityResolution {
    pub identity: Value,
    /// Number of transparent layers removed.
    pub hops: usize,
}

impl Runtime {
    pub fn identity_object(&mut self, v: &Value) -> Result<Value> {
        Ok(self.resolve_identity(v)?.identity)
    }

    pub fn resolve_identity(&mut self, v: &Value) -> Result<IdentityResolution> {
        let Value::Object(mut current) = *v else {
            return Ok(IdentityResolution {
                identity: v.clone(),
                hops: 0,
            });
        };
        let mut hops = 0;
        loop {
            self.counters.identity_steps += 1;
            let Some(record) = self.heap.proxy(current) else {
                break;
            };
            let target = record.target;
            match record.kind {
                ProxyKind::Transparent { .. } => {}
                ProxyKind::Opaque => {
                    let Some(handler) = record.handler else {
                        return Err(Error::type_error(
                            "cannot resolve the identity of a revoked proxy",
                        ));
                    };
                    let trap = self.dispatch_get(handler, TRAP_IS_TRANSPARENT)?;
                    if trap.is_nullish() {
                        break;
                    }
                    self.counters.is_transparent_calls += 1;
                    if !self.call(&trap, Value::Undefined, &[])?.truthy() {
                        break;
                    }
                }
            }
            current = target;
            hops += 1;
        }
        Ok(IdentityResolution {
            identity: Value::Object(current),
            hops,
        })
    }

    fn same_identity(&mut self, x: ObjectRef, y: ObjectRef) -> Result<bool> {
        let lhs = self.identity_object(&Value::Object(x))?;
        let rhs = self.identity_object(&Value::Object(y))?;
        Ok(lhs.as_object() == rhs.as_object())
    }

    /// The `==` operator.
    pub fn abstract_equals(&mut self, x: &Value, y: &Value) -> Result<bool> {
        use Value::*;
        match (x, y) {
            (Undefined, Undefined) | (Null, Null) => Ok(true),
            (Number(a), Number(b)) => Ok(number_equals(*a, *b)),
            (Str(a), Str(b)) => Ok(a == b),
            (Bool(a), Bool(b)) => Ok(a == b),
            (Object(a), Object(b)) => self.same_identity(*a, *b),
            (Null, Undefined) | (Undefined, Null) => Ok(true),
            (Number(_), Str(_)) => self.abstract_equals(x, &Number(to_number(y))),
            (Str(_), Number(_)) => self.abstract_equals(&Number(to_number(x)), y),
            (Bool(_), _) => self.abstract_equals(&Number(to_number(x)), y),
            (_, Bool(_)) => self.abstract_equals(x, &Number(to_number(y))),
            (Str(_) | Number(_), Object(o)) => {
                let prim = self.to_primitive(*o)?;
                self.abstract_equals(x, &prim)
            }
            (Object(o), Str(_) | Number(_)) => {
                let prim = self.to_primitive(*o)?;
                self.abstract_equals(&prim, y)
            }
            _ => Ok(false),
        }
    }

    /// The `===` operator. Never coerces.
    pub fn strict_equals(&mut self, x: &Value, y: &Value) -> Result<bool> {
        match (x, y) {
            (Value::Object(a), Value::Object(b)) => self.same_identity(*a, *b),
            _ => Ok(primitive_strict_equals(x, y)),
        }
    }

    /// Like `===` but NaN equals itself and the zeros are distinguished.
    pub fn same_value(&mut self, x: &Value, y: &Value) -> Result<bool> {
        match (x, y) {
            (Value::Object(a), Value::Object(b)) => self.same_identity(*a, *b),
            _ => Ok(primitive_same_value(x, y)),
        }
    }

    /// `objectEquals(obj1, obj2[, secret])`. The secret counts as present
    /// whenever a third argument is passed.
    pub fn object_equals(&mut self, args: &[Value]) -> Result<bool> {
        let (obj1, obj2) = match args {
            [a, b, ..] => (a, b),
            _ => {
                return Err(Error::type_error(
                    "objectEquals requires at least two arguments",
                ))
            }
        };
        let Some(secret) = args.get(2) else {
            return self.strict_equals(obj1, obj2);
        };
        let reveals = |v: &Value| match (v, secret) {
            (Value::Object(o), Value::Object(s)) => self.heap.token_of(*o) == Some(*s),
            _ => false,
        };
        if reveals(obj1) || reveals(obj2) {
            Ok(match (obj1, obj2) {
                (Value::Object(a), Value::Object(b)) => a == b,
                _ => false,
            })
        } else {
            self.strict_equals(obj1, obj2)
        }
    }

    /// Tries `valueOf`, then `toString`, reading both through the object's
    /// traps; the first that returns a primitive wins.
    pub fn to_primitive(&mut self, obj: ObjectRef) -> Result<Value> {
        for method in ["valueOf", "toString"] {
            let f = self.dispatch_get(obj, method)?;
            if let Value::Object(fr) = f {
                if self.heap.is_callable(fr) {
                    let result = self.dispatch_apply(fr, Value::Object(obj), &[])?;
                    if !result.is_object() {
                        return Ok(result);
                    }
                }
            }
        }
        Err(Error::type_error(
            "cannot convert object to primitive value",
        ))
    }
}

fn number_equals(a: f64, b: f64) -> bool {
    // NaN is unequal to everything and +0 == -0 under IEEE comparison.
    a == b
}

fn primitive_strict_equals(x: &Value, y: &Value) -> bool {
    match (x, y) {
        (Value::Undefined, Value::Undefined) | (Value::Null, Value::Null) => true,
        (Value::Number(a), Value::Number(b)) => number_equals(*a, *b),
        (Value::Str(a), Value::Str(b)) => a == b,
        (Value::Bool(a), Value::Bool(b)) => a == b,
        _ => false,
    }
}

fn primitive_same_value(x: &Value, y: &Value) -> bool {
    match (x, y) {
        (Value::Number(a), Value::Number(b)) => {
            if a.is_nan() || b.is_nan() {
                a.is_nan() && b.is_nan()
            } else {
                a == b && a.is_sign_negative() == b.is_sign_negative()
            }
        }
        _ => primitive_strict_equals(x, y),
    }
}

/// Numeric conversion for primitives. Objects need [`Runtime::to_primitive`]
/// first and convert to NaN here.
pub fn to_number(v: &Value) -> f64 {
    match v {
        Value::Undefined => f64::NAN,
        Value::Null => 0.0,
        Value::Bool(b) => f64::from(u8::from(*b)),
        Value::Number(n) => *n,
        Value::Str(s) => string_to_number(s),
        Value::Object(_) => f64::NAN,
    }
}

/// Decimal grammar: optional sign, digits with an optional fraction, then an
/// optional exponent. Blank strings are zero; anything else is NaN.
pub fn string_to_number(s: &str) -> f64 {
    let s = s.trim();
    if s.is_empty() {
        return 0.0;
    }
    if is_decimal_literal(s) {
        s.parse().unwrap_or(f64::NAN)
    } else {
        f64::NAN
    }
}

fn is_decimal_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if matches!(b.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if matches!(b.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

/// Tag-level check used by the fast-path accounting: at least one operand is
/// not an object.
pub fn has_non_object_operand(x: &Value, y: &Value) -> bool {
    x.tag() != Tag::Object || y.tag() != Tag::Object
}
