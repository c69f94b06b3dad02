//! Object model operations: construction, trap dispatch and revocation.
//!
//! A proxy operation looks up the matching trap on the handler (the handler
//! may itself be a proxy, so the lookup is an ordinary property read). A
//! present trap is called with the documented positional arguments and no
//! implicit context; an absent trap forwards the operation to the target.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::heap::{NativeObject, ObjectRecord, ProxyKind, ProxyRecord};
use crate::runtime::Runtime;
use crate::value::{format_number, ObjectRef, Value};

pub const TRAP_GET: &str = "get";
pub const TRAP_SET: &str = "set";
pub const TRAP_HAS: &str = "has";
pub const TRAP_DELETE: &str = "deleteProperty";
pub const TRAP_APPLY: &str = "apply";
pub const TRAP_IS_TRANSPARENT: &str = "isTransparent";

fn expect_object(v: &Value, what: &str) -> Result<ObjectRef> {
    v.as_object()
        .ok_or_else(|| Error::type_error(format!("{what} must be an object")))
}

impl Runtime {
    pub fn make_native_object<'a, I>(&mut self, properties: I) -> ObjectRef
    where
        I: IntoIterator<Item = (&'a str, Value)>,
    {
        let properties = properties
            .into_iter()
            .map(|(k, v)| (Rc::from(k), v))
            .collect();
        self.heap.alloc(ObjectRecord::Native(NativeObject {
            properties,
            ..NativeObject::default()
        }))
    }

    /// An array is a native object with index keys and a `length` property.
    pub fn make_array(&mut self, items: &[Value]) -> ObjectRef {
        let mut props: Vec<(String, Value)> = items
            .iter()
            .enumerate()
            .map(|(i, v)| (i.to_string(), v.clone()))
            .collect();
        props.push(("length".into(), Value::Number(items.len() as f64)));
        self.make_native_object(props.iter().map(|(k, v)| (k.as_str(), v.clone())))
    }

    /// Reads `length` and the indexed elements through ordinary dispatch.
    pub fn array_to_vec(&mut self, arr: ObjectRef) -> Result<Vec<Value>> {
        let len = match self.dispatch_get(arr, "length")? {
            Value::Number(n) if n >= 0.0 && n.is_finite() => n as usize,
            Value::Undefined => 0,
            other => {
                return Err(Error::type_error(format!(
                    "invalid array length {}",
                    self.display(&other)
                )))
            }
        };
        (0..len)
            .map(|i| self.dispatch_get(arr, &i.to_string()))
            .collect()
    }

    pub fn make_proxy(&mut self, target: &Value, handler: &Value) -> Result<ObjectRef> {
        let target = expect_object(target, "proxy target")?;
        let handler = expect_object(handler, "proxy handler")?;
        Ok(self.alloc_proxy(ProxyKind::Opaque, target, handler))
    }

    pub fn make_transparent_proxy(
        &mut self,
        target: &Value,
        handler: &Value,
        token: &Value,
    ) -> Result<ObjectRef> {
        let target = expect_object(target, "proxy target")?;
        let handler = expect_object(handler, "proxy handler")?;
        let token = expect_object(token, "proxy token")?;
        Ok(self.alloc_proxy(ProxyKind::Transparent { token }, target, handler))
    }

    pub(crate) fn alloc_proxy(
        &mut self,
        kind: ProxyKind,
        target: ObjectRef,
        handler: ObjectRef,
    ) -> ObjectRef {
        self.heap.alloc(ObjectRecord::Proxy(ProxyRecord {
            kind,
            target,
            handler: Some(handler),
            membrane: None,
        }))
    }

    /// Creates a proxy together with a zero-argument revoke function.
    /// Revoking twice is a no-op.
    pub fn make_revocable(
        &mut self,
        target: &Value,
        handler: &Value,
        transparent: bool,
        token: Option<&Value>,
    ) -> Result<(ObjectRef, ObjectRef)> {
        let proxy = if transparent {
            let token = match token {
                Some(t) => t.clone(),
                None => Value::Object(self.make_native_object([])),
            };
            self.make_transparent_proxy(target, handler, &token)?
        } else {
            self.make_proxy(target, handler)?
        };
        let revoke = self.make_function("revoke", move |rt, _, _| {
            rt.revoke(proxy);
            Ok(Value::Undefined)
        });
        Ok((proxy, revoke))
    }

    /// Detaches the handler. Has no effect on natives or already revoked proxies.
    pub fn revoke(&mut self, proxy: ObjectRef) {
        if let ObjectRecord::Proxy(p) = self.heap.get_mut(proxy) {
            p.handler = None;
        }
    }

    pub fn is_revoked(&self, proxy: ObjectRef) -> bool {
        self.heap.proxy(proxy).is_some_and(|p| p.handler.is_none())
    }

    /// Looks up `name` on the proxy's handler. `Ok(None)` means forward.
    fn find_trap(&mut self, proxy: ObjectRef, name: &str) -> Result<Option<(ObjectRef, Value)>> {
        let record = self
            .heap
            .proxy(proxy)
            .expect("find_trap on a native object");
        let target = record.target;
        let Some(handler) = record.handler else {
            return Err(Error::revoked(format!(
                "cannot perform '{name}' on a revoked proxy"
            )));
        };
        let trap = self.dispatch_get(handler, name)?;
        match trap {
            Value::Undefined | Value::Null => Ok(None),
            Value::Object(t) if self.heap.is_callable(t) => Ok(Some((target, trap))),
            _ => Err(Error::type_error(format!("trap '{name}' is not callable"))),
        }
    }

    fn call_trap(&mut self, trap: &Value, args: &[Value]) -> Result<Value> {
        self.counters.trap_calls += 1;
        self.call(trap, Value::Undefined, args)
    }

    pub fn dispatch_get(&mut self, obj: ObjectRef, key: &str) -> Result<Value> {
        self.dispatch_get_with_receiver(obj, key, obj)
    }

    pub fn dispatch_get_with_receiver(
        &mut self,
        obj: ObjectRef,
        key: &str,
        receiver: ObjectRef,
    ) -> Result<Value> {
        if let Some(n) = self.heap.native(obj) {
            return Ok(n.properties.get(key).cloned().unwrap_or(Value::Undefined));
        }
        match self.find_trap(obj, TRAP_GET)? {
            Some((target, trap)) => self.call_trap(
                &trap,
                &[
                    Value::Object(target),
                    Value::str(key),
                    Value::Object(receiver),
                ],
            ),
            None => {
                let target = self.heap.proxy(obj).unwrap().target;
                self.dispatch_get_with_receiver(target, key, receiver)
            }
        }
    }

    pub fn dispatch_set(&mut self, obj: ObjectRef, key: &str, value: Value) -> Result<Value> {
        self.dispatch_set_with_receiver(obj, key, value, obj)
    }

    /// Returns the assigned value regardless of what a set trap returns.
    pub fn dispatch_set_with_receiver(
        &mut self,
        obj: ObjectRef,
        key: &str,
        value: Value,
        receiver: ObjectRef,
    ) -> Result<Value> {
        if let Some(n) = self.heap.native_mut(obj) {
            n.properties.insert(Rc::from(key), value.clone());
            return Ok(value);
        }
        match self.find_trap(obj, TRAP_SET)? {
            Some((target, trap)) => {
                self.call_trap(
                    &trap,
                    &[
                        Value::Object(target),
                        Value::str(key),
                        value.clone(),
                        Value::Object(receiver),
                    ],
                )?;
                Ok(value)
            }
            None => {
                let target = self.heap.proxy(obj).unwrap().target;
                self.dispatch_set_with_receiver(target, key, value, receiver)
            }
        }
    }

    pub fn dispatch_has(&mut self, obj: ObjectRef, key: &str) -> Result<bool> {
        if let Some(n) = self.heap.native(obj) {
            return Ok(n.properties.contains_key(key));
        }
        match self.find_trap(obj, TRAP_HAS)? {
            Some((target, trap)) => Ok(self
                .call_trap(&trap, &[Value::Object(target), Value::str(key)])?
                .truthy()),
            None => {
                let target = self.heap.proxy(obj).unwrap().target;
                self.dispatch_has(target, key)
            }
        }
    }

    /// Removes an own property; `true` when nothing remains under `key`.
    pub fn dispatch_delete(&mut self, obj: ObjectRef, key: &str) -> Result<bool> {
        if let Some(n) = self.heap.native_mut(obj) {
            n.properties.shift_remove(key);
            return Ok(true);
        }
        match self.find_trap(obj, TRAP_DELETE)? {
            Some((target, trap)) => Ok(self
                .call_trap(&trap, &[Value::Object(target), Value::str(key)])?
                .truthy()),
            None => {
                let target = self.heap.proxy(obj).unwrap().target;
                self.dispatch_delete(target, key)
            }
        }
    }

    pub fn dispatch_apply(&mut self, obj: ObjectRef, this: Value, args: &[Value]) -> Result<Value> {
        if !self.heap.is_callable(obj) {
            return Err(Error::type_error("value is not a function"));
        }
        if let Some(n) = self.heap.native(obj) {
            let callable = n.call.clone().expect("callable native");
            return self.invoke(callable, this, args);
        }
        match self.find_trap(obj, TRAP_APPLY)? {
            Some((target, trap)) => {
                let args_array = self.make_array(args);
                self.call_trap(
                    &trap,
                    &[Value::Object(target), this, Value::Object(args_array)],
                )
            }
            None => {
                let target = self.heap.proxy(obj).unwrap().target;
                self.dispatch_apply(target, this, args)
            }
        }
    }

    /// Own property keys of a native object, in insertion order.
    pub fn own_keys(&self, obj: ObjectRef) -> Vec<Rc<str>> {
        self.heap
            .native(obj)
            .map(|n| n.properties.keys().cloned().collect())
            .unwrap_or_default()
    }
}

/// Converts a bracket-access key to its property name.
pub fn property_key(rt: &Runtime, key: &Value) -> String {
    match key {
        Value::Number(n) => format_number(*n),
        other => rt.display(other),
    }
}
