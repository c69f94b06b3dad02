use super::{arg, handler_object, library_proxy, object_arg, Transparency};
use crate::error::{Error, Result};
use crate::object::{TRAP_APPLY, TRAP_DELETE, TRAP_GET, TRAP_HAS, TRAP_SET};
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

fn user_trap(rt: &mut Runtime, handler: ObjectRef, name: &str) -> Result<Option<Value>> {
    let trap = rt.dispatch_get(handler, name)?;
    match trap {
        Value::Undefined | Value::Null => Ok(None),
        Value::Object(r) if rt.heap.is_callable(r) => Ok(Some(trap)),
        _ => Err(Error::type_error(format!(
            "observer trap '{name}' is not callable"
        ))),
    }
}

/// A transparent proxy restricted to a projection of its target.
///
/// The user's trap runs first; the raw operation on the target runs after it.
/// A read or call returns the user's result only when it is `===` to the raw
/// result, and the raw result otherwise. Writes and deletes always reach the
/// target once the user trap has returned; the user trap can only veto them
/// by raising. The user's traps are not sandboxed.
pub fn make_observer(rt: &mut Runtime, target: &Value, user_handler: &Value) -> Result<ObjectRef> {
    let target = target
        .as_object()
        .ok_or_else(|| Error::type_error("observer target must be an object"))?;
    let user = user_handler
        .as_object()
        .ok_or_else(|| Error::type_error("observer handler must be an object"))?;

    let get = rt.make_function("observer.get", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let name = rt.display(&arg(args, 1));
        let result = match user_trap(rt, user, TRAP_GET)? {
            Some(trap) => rt.call(&trap, Value::Undefined, args)?,
            None => Value::Undefined,
        };
        let raw = rt.dispatch_get(target, &name)?;
        Ok(if rt.strict_equals(&result, &raw)? {
            result
        } else {
            raw
        })
    });
    let set = rt.make_function("observer.set", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let name = rt.display(&arg(args, 1));
        if let Some(trap) = user_trap(rt, user, TRAP_SET)? {
            rt.call(&trap, Value::Undefined, args)?;
        }
        rt.dispatch_set(target, &name, arg(args, 2))?;
        Ok(Value::Bool(true))
    });
    let has = rt.make_function("observer.has", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let name = rt.display(&arg(args, 1));
        if let Some(trap) = user_trap(rt, user, TRAP_HAS)? {
            rt.call(&trap, Value::Undefined, args)?;
        }
        Ok(Value::Bool(rt.dispatch_has(target, &name)?))
    });
    let delete = rt.make_function("observer.deleteProperty", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let name = rt.display(&arg(args, 1));
        if let Some(trap) = user_trap(rt, user, TRAP_DELETE)? {
            rt.call(&trap, Value::Undefined, args)?;
        }
        Ok(Value::Bool(rt.dispatch_delete(target, &name)?))
    });
    let apply = rt.make_function("observer.apply", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let result = match user_trap(rt, user, TRAP_APPLY)? {
            Some(trap) => rt.call(&trap, Value::Undefined, args)?,
            None => Value::Undefined,
        };
        let call_args = match arg(args, 2) {
            Value::Object(a) => rt.array_to_vec(a)?,
            _ => Vec::new(),
        };
        let raw = rt.dispatch_apply(target, arg(args, 1), &call_args)?;
        Ok(if rt.strict_equals(&result, &raw)? {
            result
        } else {
            raw
        })
    });
    let handler = handler_object(
        rt,
        vec![
            (TRAP_GET, get),
            (TRAP_SET, set),
            (TRAP_HAS, has),
            (TRAP_DELETE, delete),
            (TRAP_APPLY, apply),
        ],
    );
    Ok(library_proxy(
        rt,
        Transparency::Transparent,
        target,
        handler,
    ))
}
