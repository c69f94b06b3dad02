//! Counting comparisons by proxy involvement while a script runs.
//!
//! Usage: `cargo run --example comparison_census [script] [json]`

use tproxy::instrument::ReportFormat;
use tproxy::{run_source, RunOptions};

const DEFAULT: &str = r#"
var shared = { v: 1 };
var clear = transparentProxy(shared, {});
var graph = makeMembrane({ a: shared, b: { c: shared } }, true).wrapper;
print(clear === shared, graph.a === graph.b.c, graph.a == shared, clear.v == 1);
"#;

fn main() {
    let mut args = std::env::args().skip(1);
    let source = match args.next() {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => DEFAULT.to_string(),
    };
    let format = match args.next().as_deref() {
        Some("json") => ReportFormat::Json,
        _ => ReportFormat::Table,
    };
    let out = run_source(
        &source,
        RunOptions {
            instrument: true,
            keep_events: false,
        },
    );
    for line in &out.output {
        println!("{line}");
    }
    if let Some(e) = &out.error {
        eprintln!("{e}");
    }
    let report = out.report.expect("instrumented run");
    println!("{}", report.emit(format));
    for site in report.flipped_sites() {
        println!("opaque proxies would flip the comparison at {site}");
    }
}
