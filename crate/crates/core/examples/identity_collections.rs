//! Map, Set and WeakMap keyed by resolved identity.

use tproxy::collections::CollectionKind::{Map, Set, WeakMap};
use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    let target = Value::Object(rt.make_native_object([]));
    let h = Value::Object(rt.make_native_object([]));
    let token = Value::Object(rt.make_native_object([]));
    let clear = Value::Object(rt.make_transparent_proxy(&target, &h, &token)?);
    let opaque = Value::Object(rt.make_proxy(&target, &h)?);

    let m = Value::Object(rt.make_collection(Map, None));
    rt.collection_set(Map, &m, &target, "A".into())?;
    rt.collection_set(Map, &m, &clear, "B".into())?;
    rt.collection_set(Map, &m, &opaque, "C".into())?;
    let keys = rt.collection_keys(Map, &m)?;
    let values: Vec<String> = rt
        .collection_values(Map, &m)?
        .iter()
        .map(|v| rt.display(v))
        .collect();
    println!("size {}  values {values:?}", keys.len());
    println!(
        "first key is the target itself: {}",
        keys[0].as_object() == target.as_object()
    );

    // With the token as secret, the transparent proxy gets its own entry.
    let revealing = Value::Object(rt.make_collection(Map, token.as_object()));
    rt.collection_set(Map, &revealing, &target, "A".into())?;
    rt.collection_set(Map, &revealing, &clear, "B".into())?;
    println!(
        "revealing map size {}",
        rt.collection_size(Map, &revealing)?
    );

    let s = Value::Object(rt.make_collection(Set, None));
    for k in [
        Value::Number(0.0),
        Value::Number(-0.0),
        Value::Number(f64::NAN),
        Value::Number(f64::NAN),
    ] {
        rt.collection_set(Set, &s, &k, Value::Bool(true))?;
    }
    println!(
        "set of 0, -0, NaN, NaN has {} entries",
        rt.collection_size(Set, &s)?
    );

    let w = Value::Object(rt.make_collection(WeakMap, None));
    rt.collection_set(WeakMap, &w, &clear, "x".into())?;
    println!(
        "weak map finds target via proxy entry: {}",
        rt.collection_has(WeakMap, &w, &target)?
    );
    if let Err(e) = rt.collection_set(WeakMap, &w, &Value::Number(1.0), Value::Null) {
        println!("primitive weak key: {e}");
    }
    Ok(())
}
