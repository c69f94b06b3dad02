//! Membranes wrap everything reachable from a root, preserve identity, and
//! revoke as a unit.

use tproxy::patterns::{Membrane, MembraneOptions};
use tproxy::{Runtime, Value};

fn main() -> tproxy::Result<()> {
    let mut rt = Runtime::new();
    // T1.x = T2, T1.y = T3, T2.z = T3
    let t3 = rt.make_native_object([("v", Value::Number(3.0))]);
    let t2 = rt.make_native_object([("z", t3.into())]);
    let t1 = rt.make_native_object([("x", t2.into()), ("y", t3.into())]);

    for transparent in [false, true] {
        let membrane = Membrane::new(
            &mut rt,
            MembraneOptions {
                transparent,
                identity_preserving: true,
            },
        );
        let p1 = membrane
            .wrap(&mut rt, &t1.into())?
            .as_object()
            .expect("proxy");
        let p1x = rt.dispatch_get(p1, "x")?.as_object().expect("proxy");
        let p1xz = rt.dispatch_get(p1x, "z")?;
        let p1y = rt.dispatch_get(p1, "y")?;
        println!(
            "{:<11} P1.x.z === P1.y: {}  P1.y === T3: {}  proxies minted: {}",
            if transparent { "transparent" } else { "opaque" },
            rt.strict_equals(&p1xz, &p1y)?,
            rt.strict_equals(&p1y, &t3.into())?,
            membrane.proxy_count(),
        );
        membrane.revoke(&mut rt);
        match rt.dispatch_get(p1, "x") {
            Err(e) => println!("            after revoke: {e}"),
            Ok(_) => println!("            still reachable after revoke"),
        }
    }
    Ok(())
}
