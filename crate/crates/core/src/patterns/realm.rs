use super::{arg, object_arg};
use crate::error::Result;
use crate::heap::ProxyKind;
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

/// A transparency realm: a proxy constructor and an `equals` capability that
/// share one hidden token.
#[derive(Clone, Copy, Debug)]
pub struct RealmHandle {
    /// `{Constructor, equals}` as seen by scripts.
    pub object: ObjectRef,
    pub constructor: ObjectRef,
    pub equals: ObjectRef,
}

pub fn create_proxy_constructor(rt: &mut Runtime) -> Result<RealmHandle> {
    // The token never leaves these two closures.
    let token = rt.make_native_object([]);
    let equals = rt.make_function("realm.equals", move |rt, _, args| {
        let (x, y) = (arg(args, 0), arg(args, 1));
        Ok(Value::Bool(rt.object_equals(&[
            x,
            y,
            Value::Object(token),
        ])?))
    });
    let constructor = rt.make_function("realm.Constructor", move |rt, _, args| {
        let target = object_arg(args, 0, "proxy target")?;
        let handler = object_arg(args, 1, "proxy handler")?;
        Ok(Value::Object(rt.alloc_proxy(
            ProxyKind::Transparent { token },
            target,
            handler,
        )))
    });
    let object = rt.make_native_object([
        ("Constructor", Value::Object(constructor)),
        ("equals", Value::Object(equals)),
    ]);
    Ok(RealmHandle {
        object,
        constructor,
        equals,
    })
}
