//! Embedding the interpreter: host functions, running a program, reading globals.

use tproxy::{parse_program, Runtime, Value};

const SOURCE: &str = r#"
var seen = mapNew();
function visit(node) {
  if (mapHas(seen, node)) { return 0; }
  mapSet(seen, node, true);
  return 1 + visit(node.next);
}
var a = { next: null };
var b = { next: a };
a.next = transparentProxy(b, {});
print("distinct nodes:", visit(a));
var total = hostSum(1, 2, 3);
"#;

fn main() {
    let mut rt = Runtime::new();
    let sum = rt.make_function("hostSum", |_, _, args| {
        Ok(Value::Number(
            args.iter()
                .map(|a| if let Value::Number(n) = a { *n } else { 0.0 })
                .sum(),
        ))
    });
    rt.define_global("hostSum", Value::Object(sum));

    let program = parse_program(SOURCE).expect("valid program");
    let result = rt.run_program(&program);
    let outcome = rt.finish(result);
    for line in &outcome.output {
        println!("{line}");
    }
    if let Some(e) = outcome.error {
        eprintln!("{e}");
    }
    let total = rt.global("total").unwrap_or(Value::Undefined);
    println!("total from host = {}", rt.display(&total));
}
