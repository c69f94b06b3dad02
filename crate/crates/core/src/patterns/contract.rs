use super::{arg, handler_object, library_proxy, object_arg, Transparency};
use crate::error::{Error, Result};
use crate::object::{TRAP_APPLY, TRAP_SET};
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

fn require_callable(rt: &Runtime, v: &Value, what: &str) -> Result<()> {
    match v {
        Value::Object(r) if rt.heap.is_callable(*r) => Ok(()),
        _ => Err(Error::type_error(format!("{what} must be a function"))),
    }
}

/// Object contract: every property write must satisfy `pred`.
pub fn assert_contract(
    rt: &mut Runtime,
    target: &Value,
    pred: &Value,
    mode: Transparency,
) -> Result<ObjectRef> {
    let target = target
        .as_object()
        .ok_or_else(|| Error::type_error("contract target must be an object"))?;
    require_callable(rt, pred, "contract predicate")?;
    let pred = pred.clone();
    let set = rt.make_function("contract.set", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let key = rt.display(&arg(args, 1));
        let value = arg(args, 2);
        if !rt
            .call(&pred, Value::Undefined, std::slice::from_ref(&value))?
            .truthy()
        {
            return Err(Error::contract(format!(
                "value {} rejected for property '{key}'",
                rt.display(&value)
            )));
        }
        rt.dispatch_set(target, &key, value)?;
        Ok(Value::Bool(true))
    });
    let handler = handler_object(rt, vec![(TRAP_SET, set)]);
    Ok(library_proxy(rt, mode, target, handler))
}

/// Function contract: `arg_pred` guards the first argument before the call
/// and `ret_pred` guards the result after it.
pub fn function_contract(
    rt: &mut Runtime,
    f: &Value,
    arg_pred: &Value,
    ret_pred: &Value,
    mode: Transparency,
) -> Result<ObjectRef> {
    require_callable(rt, f, "contracted value")?;
    require_callable(rt, arg_pred, "argument predicate")?;
    require_callable(rt, ret_pred, "result predicate")?;
    let (arg_pred, ret_pred) = (arg_pred.clone(), ret_pred.clone());
    let apply = rt.make_function("contract.apply", move |rt, _, args| {
        let target = object_arg(args, 0, "target")?;
        let this = arg(args, 1);
        let call_args = match arg(args, 2) {
            Value::Object(a) => rt.array_to_vec(a)?,
            _ => Vec::new(),
        };
        let first = call_args.first().cloned().unwrap_or(Value::Undefined);
        if !rt
            .call(&arg_pred, Value::Undefined, std::slice::from_ref(&first))?
            .truthy()
        {
            return Err(Error::contract(format!(
                "argument {} violates the domain contract",
                rt.display(&first)
            )));
        }
        let result = rt.dispatch_apply(target, this, &call_args)?;
        if !rt
            .call(&ret_pred, Value::Undefined, std::slice::from_ref(&result))?
            .truthy()
        {
            return Err(Error::contract(format!(
                "result {} violates the range contract",
                rt.display(&result)
            )));
        }
        Ok(result)
    });
    let handler = handler_object(rt, vec![(TRAP_APPLY, apply)]);
    let target = f.as_object().expect("checked callable");
    Ok(library_proxy(rt, mode, target, handler))
}
