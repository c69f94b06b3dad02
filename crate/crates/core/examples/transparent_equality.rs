//! How `==`, `===` and `sameValue` see through transparent proxies.

use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    let target = Value::Object(rt.make_native_object([]));
    let h = Value::Object(rt.make_native_object([]));
    let token = Value::Object(rt.make_native_object([]));

    let opaque = Value::Object(rt.make_proxy(&target, &h)?);
    let clear = Value::Object(rt.make_transparent_proxy(&target, &h, &token)?);
    let nested = Value::Object(rt.make_transparent_proxy(&clear, &h, &token)?);
    let opaque_over_clear = Value::Object(rt.make_proxy(&clear, &h)?);

    // An opaque proxy can opt in per resolution through an isTransparent trap.
    let yes = rt.make_function("isTransparent", |_, _, _| Ok(Value::Bool(true)));
    let opting = Value::Object(rt.make_native_object([("isTransparent", Value::Object(yes))]));
    let opted_in = Value::Object(rt.make_proxy(&target, &opting)?);

    for (name, v) in [
        ("opaque", &opaque),
        ("transparent", &clear),
        ("transparent of transparent", &nested),
        ("opaque of transparent", &opaque_over_clear),
        ("isTransparent trap", &opted_in),
    ] {
        let resolved = rt.resolve_identity(v)?;
        println!(
            "{name:<28} === target: {:<5}  == target: {:<5}  layers removed: {}",
            rt.strict_equals(v, &target)?,
            rt.abstract_equals(v, &target)?,
            resolved.hops,
        );
    }

    // Primitive comparisons never touch proxy chains.
    println!(
        "1 == \"1\": {}",
        rt.abstract_equals(&Value::Number(1.0), &Value::from("1"))?
    );
    let nan = Value::Number(f64::NAN);
    println!(
        "NaN === NaN: {}, sameValue(NaN, NaN): {}",
        rt.strict_equals(&nan, &nan)?,
        rt.same_value(&nan, &nan)?
    );
    Ok(())
}
