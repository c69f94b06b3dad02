//! Revealing transparent proxies with a token, and realms that hide the token.

use tproxy::patterns::create_proxy_constructor;
use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    let target = Value::Object(rt.make_native_object([]));
    let h = Value::Object(rt.make_native_object([]));
    let token = Value::Object(rt.make_native_object([]));
    let stranger = Value::Object(rt.make_native_object([]));

    let a = Value::Object(rt.make_transparent_proxy(&target, &h, &token)?);
    let b = Value::Object(rt.make_transparent_proxy(&target, &h, &token)?);
    println!("a === b                    {}", rt.strict_equals(&a, &b)?);
    println!(
        "objectEquals(a, b)         {}",
        rt.object_equals(&[a.clone(), b.clone()])?
    );
    println!(
        "objectEquals(a, b, token)  {}",
        rt.object_equals(&[a.clone(), b.clone(), token])?
    );
    println!(
        "objectEquals(a, b, other)  {}",
        rt.object_equals(&[a, b, stranger])?
    );

    // A realm bundles a constructor with the one equals that can see its proxies.
    let realm = create_proxy_constructor(&mut rt)?;
    let p1 = rt.call(
        &realm.constructor.into(),
        Value::Undefined,
        &[target.clone(), h.clone()],
    )?;
    let p2 = rt.call(&realm.constructor.into(), Value::Undefined, &[target, h])?;
    let revealed = rt.call(
        &realm.equals.into(),
        Value::Undefined,
        &[p1.clone(), p2.clone()],
    )?;
    println!("p1 === p2                  {}", rt.strict_equals(&p1, &p2)?);
    println!("realm.equals(p1, p2)       {}", rt.display(&revealed));
    Ok(())
}
