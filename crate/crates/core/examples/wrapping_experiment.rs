//! Wraps each top-level function in turn and compares every variant with
//! the unwrapped baseline.
//!
//! Usage: `cargo run --example wrapping_experiment [script] [--opaque]`

use tproxy::cli::enumerate_variants;
use tproxy::instrument::ComparisonClass;
use tproxy::parse_program;

const DEFAULT: &str = r#"
var x = { tag: "x" };
function foo(f, y) { return f(y); }
function same(y) { return x === y; }
print(foo(same, x));
"#;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let opaque = args.iter().any(|a| a == "--opaque");
    let source = match args.iter().find(|a| !a.starts_with("--")) {
        Some(path) => std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => DEFAULT.to_string(),
    };
    let program = match parse_program(&source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let variants = enumerate_variants(&program, opaque);
    let baseline = variants[0].outcome.output.clone();
    println!(
        "{:<12} {:>7} {:>7} {:>8} {:>8}  output",
        "wrapped", "Type-Ia", "Type-Ib", "Type-IIa", "Type-IIb"
    );
    for v in &variants {
        let r = v.outcome.report.as_ref().expect("instrumented");
        let changed = if v.outcome.output == baseline {
            "same"
        } else {
            "CHANGED"
        };
        println!(
            "{:<12} {:>7} {:>7} {:>8} {:>8}  {changed}{}",
            v.function.as_deref().unwrap_or("(baseline)"),
            r.totals.get(ComparisonClass::TypeIa),
            r.totals.get(ComparisonClass::TypeIb),
            r.totals.get(ComparisonClass::TypeIIa),
            r.totals.get(ComparisonClass::TypeIIb),
            v.outcome
                .error
                .as_ref()
                .map(|e| format!(" ({e})"))
                .unwrap_or_default(),
        );
    }
}
