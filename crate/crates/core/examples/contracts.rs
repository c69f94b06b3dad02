//! A contract that is never violated should not change what a program
//! computes; with opaque proxies it can.

use tproxy::patterns::{assert_contract, function_contract, Transparency};
use tproxy::{run_source, RunOptions, Runtime, Value};

const BONUS: &str = r#"
function addBonus(acc1, acc2, amount) {
  acc1.balance += amount;
  if (acc1 !== acc2) { acc2.balance += amount; }
}
var account = { balance: 10 };
var restricted = assertContract(account, function (x) { return x >= 0; }, OPAQUE);
addBonus(account, account, 40);
addBonus(restricted, account, 40);
print(account.balance);
"#;

fn main() -> tproxy::Result<()> {
    for opaque in [false, true] {
        let src = BONUS.replace("OPAQUE", if opaque { "true" } else { "false" });
        let out = run_source(&src, RunOptions::default());
        println!(
            "{} contract: balance {}",
            if opaque { "opaque     " } else { "transparent" },
            out.output[0]
        );
    }

    // The same contracts from Rust.
    let mut rt = Runtime::new();
    let non_negative = rt.make_function("nonNegative", |_, _, args| {
        Ok(Value::Bool(
            matches!(args.first(), Some(Value::Number(n)) if *n >= 0.0),
        ))
    });
    let account = rt.make_native_object([("balance", Value::Number(10.0))]);
    let guarded = assert_contract(
        &mut rt,
        &account.into(),
        &non_negative.into(),
        Transparency::Transparent,
    )?;
    rt.dispatch_set(guarded, "balance", Value::Number(5.0))?;
    if let Err(e) = rt.dispatch_set(guarded, "balance", Value::Number(-1.0)) {
        println!("overdraw rejected: {e}");
    }

    let halve = rt.make_function("halve", |_, _, args| match args.first() {
        Some(Value::Number(n)) => Ok(Value::Number(n / 2.0)),
        _ => Ok(Value::Undefined),
    });
    let checked = function_contract(
        &mut rt,
        &halve.into(),
        &non_negative.into(),
        &non_negative.into(),
        Transparency::Opaque,
    )?;
    let ok = rt.call(&checked.into(), Value::Undefined, &[Value::Number(8.0)])?;
    println!("halve(8) = {}", rt.display(&ok));
    if let Err(e) = rt.call(&checked.into(), Value::Undefined, &[Value::Number(-8.0)]) {
        println!("halve(-8): {e}");
    }
    Ok(())
}
