//! Observers may watch and even try to substitute values, but every read
//! still yields the target's value or something identity-equal to it.

use std::cell::RefCell;
use std::rc::Rc;

use tproxy::patterns::make_observer;
use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    let inner = rt.make_native_object([]);
    let target = rt.make_native_object([("n", Value::Number(1.0)), ("inner", inner.into())]);

    let log = Rc::new(RefCell::new(Vec::new()));
    let seen = log.clone();
    let get = rt.make_function("get", move |rt, _, args| {
        let name = rt.display(&args[1]);
        seen.borrow_mut().push(name.clone());
        // Try to lie about `n`; offer a wrapped but identity-equal `inner`.
        let t = args[0].as_object().expect("target");
        match name.as_str() {
            "n" => Ok(Value::Number(99.0)),
            _ => {
                let raw = rt.dispatch_get(t, &name)?;
                let h = Value::Object(rt.make_native_object([]));
                Ok(Value::Object(rt.make_transparent_proxy(&raw, &h, &h)?))
            }
        }
    });
    let handler = rt.make_native_object([("get", Value::Object(get))]);
    let observed = make_observer(&mut rt, &target.into(), &handler.into())?;

    let n = rt.dispatch_get(observed, "n")?;
    let got_inner = rt.dispatch_get(observed, "inner")?;
    println!("observed.n = {} (trap offered 99)", rt.display(&n));
    println!(
        "observed.inner === inner: {}",
        rt.strict_equals(&got_inner, &inner.into())?
    );
    println!(
        "observed === target: {}",
        rt.strict_equals(&observed.into(), &target.into())?
    );
    println!("reads logged: {:?}", log.borrow());
    Ok(())
}
