//! Building proxies from Rust: forwarding, intercepting traps, revocation.

use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    let target = rt.make_native_object([("a", Value::Number(1.0))]);

    // An empty handler forwards every operation to the target.
    let empty = rt.make_native_object([]);
    let forwarding = rt.make_proxy(&target.into(), &empty.into())?;
    rt.dispatch_set(forwarding, "b", Value::Number(2.0))?;
    let b = rt.dispatch_get(target, "b")?;
    println!("target.b after write through proxy = {}", rt.display(&b));

    // A get trap sees (target, name, receiver) and may answer anything.
    let get = rt.make_function("get", |rt, _, args| {
        let name = rt.display(&args[1]);
        Ok(Value::from(format!("<{name}>").as_str()))
    });
    let handler = rt.make_native_object([("get", Value::Object(get))]);
    let loud = rt.make_proxy(&target.into(), &handler.into())?;
    let a = rt.dispatch_get(loud, "a")?;
    println!("loud.a = {}", rt.display(&a));
    println!("traps run so far: {}", rt.counters.trap_calls);

    // Revocation detaches the handler; every later operation raises.
    let (p, revoke) = rt.make_revocable(&target.into(), &empty.into(), false, None)?;
    rt.call(&revoke.into(), Value::Undefined, &[])?;
    match rt.dispatch_get(p, "a") {
        Err(e) => println!("after revoke: {e}"),
        Ok(v) => println!("unexpected: {}", rt.display(&v)),
    }
    Ok(())
}
