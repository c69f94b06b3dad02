//! Global bindings available to every script.

use crate::collections::CollectionKind;
use crate::error::{Error, Result};
use crate::object::property_key;
use crate::patterns::{self, Transparency};
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

fn arg(args: &[Value], i: usize) -> Value {
    args.get(i).cloned().unwrap_or(Value::Undefined)
}

fn object(args: &[Value], i: usize, what: &str) -> Result<ObjectRef> {
    arg(args, i)
        .as_object()
        .ok_or_else(|| Error::type_error(format!("{what} must be an object")))
}

fn optional_secret(args: &[Value], i: usize) -> Result<Option<ObjectRef>> {
    match arg(args, i) {
        Value::Undefined => Ok(None),
        Value::Object(r) => Ok(Some(r)),
        _ => Err(Error::type_error("collection secret must be an object")),
    }
}

fn define<F>(rt: &mut Runtime, name: &str, f: F)
where
    F: Fn(&mut Runtime, Value, &[Value]) -> Result<Value> + 'static,
{
    let fun = rt.make_function(name, f);
    rt.define_global(name, Value::Object(fun));
}

fn pair(rt: &mut Runtime, first: (&str, ObjectRef), second: (&str, ObjectRef)) -> Value {
    Value::Object(rt.make_native_object([
        (first.0, Value::Object(first.1)),
        (second.0, Value::Object(second.1)),
    ]))
}

pub(crate) fn install(rt: &mut Runtime) {
    define(rt, "print", |rt, _, args| {
        let line = args
            .iter()
            .map(|v| rt.display(v))
            .collect::<Vec<_>>()
            .join(" ");
        rt.print_line(line);
        Ok(Value::Undefined)
    });
    define(rt, "typeOf", |rt, _, args| {
        Ok(Value::str(rt.type_of(&arg(args, 0))))
    });
    define(rt, "contractViolation", |rt, _, args| {
        let msg = match args.first() {
            Some(v) => rt.display(v),
            None => "contract violated".to_string(),
        };
        Err(Error::contract(msg))
    });

    // Proxies and equality.
    define(rt, "proxy", |rt, _, args| {
        Ok(Value::Object(rt.make_proxy(&arg(args, 0), &arg(args, 1))?))
    });
    define(rt, "transparentProxy", |rt, _, args| {
        let token = match args.get(2) {
            Some(t) => t.clone(),
            None => Value::Object(rt.make_native_object([])),
        };
        Ok(Value::Object(rt.make_transparent_proxy(
            &arg(args, 0),
            &arg(args, 1),
            &token,
        )?))
    });
    define(rt, "revocable", |rt, _, args| {
        let transparent = arg(args, 2).truthy();
        let token = args.get(3);
        let (proxy, revoke) =
            rt.make_revocable(&arg(args, 0), &arg(args, 1), transparent, token)?;
        Ok(pair(rt, ("proxy", proxy), ("revoke", revoke)))
    });
    define(rt, "objectEquals", |rt, _, args| {
        Ok(Value::Bool(rt.object_equals(args)?))
    });
    define(rt, "sameValue", |rt, _, args| {
        Ok(Value::Bool(rt.same_value(&arg(args, 0), &arg(args, 1))?))
    });

    // Reflection helpers for handler code.
    define(rt, "hasProperty", |rt, _, args| {
        let o = object(args, 0, "hasProperty receiver")?;
        let key = property_key(rt, &arg(args, 1));
        Ok(Value::Bool(rt.dispatch_has(o, &key)?))
    });
    define(rt, "deleteProperty", |rt, _, args| {
        let o = object(args, 0, "deleteProperty receiver")?;
        let key = property_key(rt, &arg(args, 1));
        Ok(Value::Bool(rt.dispatch_delete(o, &key)?))
    });
    define(rt, "apply", |rt, _, args| {
        let f = arg(args, 0);
        let list = match arg(args, 2) {
            Value::Object(a) => rt.array_to_vec(a)?,
            Value::Undefined => Vec::new(),
            _ => return Err(Error::type_error("apply expects an argument array")),
        };
        rt.call(&f, arg(args, 1), &list)
    });

    // Arrays.
    define(rt, "arrayNew", |rt, _, args| {
        Ok(Value::Object(rt.make_array(args)))
    });
    define(rt, "arrayGet", |rt, _, args| {
        let a = object(args, 0, "array")?;
        let key = property_key(rt, &arg(args, 1));
        rt.dispatch_get(a, &key)
    });
    define(rt, "arraySet", |rt, _, args| {
        let a = object(args, 0, "array")?;
        let index = match arg(args, 1) {
            Value::Number(n) if n >= 0.0 && n.fract() == 0.0 => n,
            _ => {
                return Err(Error::type_error(
                    "array index must be a non-negative integer",
                ))
            }
        };
        let value = arg(args, 2);
        rt.dispatch_set(a, &property_key(rt, &Value::Number(index)), value.clone())?;
        if let Value::Number(len) = rt.dispatch_get(a, "length")? {
            if index >= len {
                rt.dispatch_set(a, "length", Value::Number(index + 1.0))?;
            }
        }
        Ok(value)
    });
    define(rt, "arrayLength", |rt, _, args| {
        let a = object(args, 0, "array")?;
        rt.dispatch_get(a, "length")
    });
    define(rt, "arrayPush", |rt, _, args| {
        let a = object(args, 0, "array")?;
        let len = match rt.dispatch_get(a, "length")? {
            Value::Number(n) => n,
            _ => 0.0,
        };
        rt.dispatch_set(a, &property_key(rt, &Value::Number(len)), arg(args, 1))?;
        rt.dispatch_set(a, "length", Value::Number(len + 1.0))
    });

    install_collections(rt);
    install_patterns(rt);
}

fn install_collections(rt: &mut Runtime) {
    use CollectionKind::*;
    for (prefix, kind) in [("map", Map), ("set", Set), ("weakMap", WeakMap)] {
        define(rt, &format!("{prefix}New"), move |rt, _, args| {
            let secret = optional_secret(args, 0)?;
            Ok(Value::Object(rt.make_collection(kind, secret)))
        });
        define(rt, &format!("{prefix}Has"), move |rt, _, args| {
            Ok(Value::Bool(rt.collection_has(
                kind,
                &arg(args, 0),
                &arg(args, 1),
            )?))
        });
        define(rt, &format!("{prefix}Delete"), move |rt, _, args| {
            Ok(Value::Bool(rt.collection_delete(
                kind,
                &arg(args, 0),
                &arg(args, 1),
            )?))
        });
        if kind == Set {
            define(rt, "setAdd", move |rt, _, args| {
                rt.collection_set(kind, &arg(args, 0), &arg(args, 1), Value::Bool(true))?;
                Ok(arg(args, 0))
            });
        } else {
            define(rt, &format!("{prefix}Set"), move |rt, _, args| {
                rt.collection_set(kind, &arg(args, 0), &arg(args, 1), arg(args, 2))?;
                Ok(arg(args, 0))
            });
            define(rt, &format!("{prefix}Get"), move |rt, _, args| {
                rt.collection_get(kind, &arg(args, 0), &arg(args, 1))
            });
        }
        if kind != WeakMap {
            define(rt, &format!("{prefix}Size"), move |rt, _, args| {
                Ok(Value::Number(
                    rt.collection_size(kind, &arg(args, 0))? as f64
                ))
            });
        }
    }
    define(rt, "mapKeys", |rt, _, args| {
        let keys = rt.collection_keys(Map, &arg(args, 0))?;
        Ok(Value::Object(rt.make_array(&keys)))
    });
    define(rt, "mapValues", |rt, _, args| {
        let values = rt.collection_values(Map, &arg(args, 0))?;
        Ok(Value::Object(rt.make_array(&values)))
    });
    define(rt, "setValues", |rt, _, args| {
        let keys = rt.collection_keys(Set, &arg(args, 0))?;
        Ok(Value::Object(rt.make_array(&keys)))
    });
}

fn install_patterns(rt: &mut Runtime) {
    define(rt, "makeMembrane", |rt, _, args| {
        let transparent = arg(args, 1).truthy();
        let (wrapper, revoke) = patterns::make_membrane(rt, &arg(args, 0), transparent)?;
        Ok(pair(rt, ("wrapper", wrapper), ("revoke", revoke)))
    });
    define(rt, "assertContract", |rt, _, args| {
        let mode = Transparency::from_opaque_flag(arg(args, 2).truthy());
        Ok(Value::Object(patterns::assert_contract(
            rt,
            &arg(args, 0),
            &arg(args, 1),
            mode,
        )?))
    });
    define(rt, "functionContract", |rt, _, args| {
        let mode = Transparency::from_opaque_flag(arg(args, 3).truthy());
        Ok(Value::Object(patterns::function_contract(
            rt,
            &arg(args, 0),
            &arg(args, 1),
            &arg(args, 2),
            mode,
        )?))
    });
    define(rt, "makeObserver", |rt, _, args| {
        Ok(Value::Object(patterns::make_observer(
            rt,
            &arg(args, 0),
            &arg(args, 1),
        )?))
    });
    define(rt, "createProxyConstructor", |rt, _, _| {
        Ok(Value::Object(
            patterns::create_proxy_constructor(rt)?.object,
        ))
    });
}
