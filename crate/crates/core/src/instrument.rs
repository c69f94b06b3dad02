//! Comparison census.
//!
//! Every evaluation of `==`, `!=`, `===` or `!==` in script code is counted
//! under exactly one [`ComparisonClass`], per operator and per source site.
//! Comparisons performed by host code (collections, `objectEquals`, the
//! membrane/contract/observer library) never pass through here.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Pos;
use crate::heap::Heap;
use crate::value::{ObjectRef, Value};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ComparisonClass {
    NonObject,
    ObjectObjectNoProxy,
    /// Proxy vs native or cross-membrane proxy, different base targets.
    TypeIa,
    /// Proxy vs native or cross-membrane proxy, same base target.
    TypeIb,
    /// Two proxies of one membrane, different base targets.
    TypeIIa,
    /// Two proxies of one membrane, same base target.
    TypeIIb,
}

impl ComparisonClass {
    pub const ALL: [ComparisonClass; 6] = [
        ComparisonClass::NonObject,
        ComparisonClass::ObjectObjectNoProxy,
        ComparisonClass::TypeIa,
        ComparisonClass::TypeIb,
        ComparisonClass::TypeIIa,
        ComparisonClass::TypeIIb,
    ];

    pub fn involves_proxy(self) -> bool {
        !matches!(
            self,
            ComparisonClass::NonObject | ComparisonClass::ObjectObjectNoProxy
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CompareOp {
    Eq,
    Ne,
    StrictEq,
    StrictNe,
}

impl CompareOp {
    pub const ALL: [CompareOp; 4] = [
        CompareOp::Eq,
        CompareOp::Ne,
        CompareOp::StrictEq,
        CompareOp::StrictNe,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::StrictEq => "===",
            CompareOp::StrictNe => "!==",
        }
    }

    pub fn is_negated(self) -> bool {
        matches!(self, CompareOp::Ne | CompareOp::StrictNe)
    }
}

/// Classifies a comparison by heap shape alone; never runs traps and never
/// fails, revoked proxies included.
pub fn classify_comparison(heap: &Heap, x: &Value, y: &Value) -> ComparisonClass {
    let (Value::Object(a), Value::Object(b)) = (x, y) else {
        return ComparisonClass::NonObject;
    };
    let (a, b) = (*a, *b);
    if !heap.is_proxy(a) && !heap.is_proxy(b) {
        return ComparisonClass::ObjectObjectNoProxy;
    }
    let same_target = heap.base_target(a) == heap.base_target(b);
    let same_membrane = matches!(
        (heap.membrane_of(a), heap.membrane_of(b)),
        (Some(m), Some(n)) if m == n
    );
    match (same_membrane, same_target) {
        (true, true) => ComparisonClass::TypeIIb,
        (true, false) => ComparisonClass::TypeIIa,
        (false, true) => ComparisonClass::TypeIb,
        (false, false) => ComparisonClass::TypeIa,
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClassCounts {
    #[serde(rename = "nonObject")]
    pub non_object: u64,
    #[serde(rename = "objectObjectNoProxy")]
    pub object_object_no_proxy: u64,
    #[serde(rename = "typeIa")]
    pub type_ia: u64,
    #[serde(rename = "typeIb")]
    pub type_ib: u64,
    #[serde(rename = "typeIIa")]
    pub type_iia: u64,
    #[serde(rename = "typeIIb")]
    pub type_iib: u64,
}

impl ClassCounts {
    pub fn get(&self, class: ComparisonClass) -> u64 {
        match class {
            ComparisonClass::NonObject => self.non_object,
            ComparisonClass::ObjectObjectNoProxy => self.object_object_no_proxy,
            ComparisonClass::TypeIa => self.type_ia,
            ComparisonClass::TypeIb => self.type_ib,
            ComparisonClass::TypeIIa => self.type_iia,
            ComparisonClass::TypeIIb => self.type_iib,
        }
    }

    fn slot(&mut self, class: ComparisonClass) -> &mut u64 {
        match class {
            ComparisonClass::NonObject => &mut self.non_object,
            ComparisonClass::ObjectObjectNoProxy => &mut self.object_object_no_proxy,
            ComparisonClass::TypeIa => &mut self.type_ia,
            ComparisonClass::TypeIb => &mut self.type_ib,
            ComparisonClass::TypeIIa => &mut self.type_iia,
            ComparisonClass::TypeIIb => &mut self.type_iib,
        }
    }

    pub fn total(&self) -> u64 {
        ComparisonClass::ALL.iter().map(|c| self.get(*c)).sum()
    }

    /// Comparisons with at least one proxy operand (Table 2's "Total").
    pub fn proxy_total(&self) -> u64 {
        self.type_ia + self.type_ib + self.type_iia + self.type_iib
    }
}

#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ComparisonReport {
    pub totals: ClassCounts,
    pub by_operator: BTreeMap<&'static str, ClassCounts>,
    pub sites: BTreeMap<Pos, ClassCounts>,
}

impl ComparisonReport {
    pub fn new() -> Self {
        ComparisonReport {
            by_operator: CompareOp::ALL
                .iter()
                .map(|op| (op.symbol(), ClassCounts::default()))
                .collect(),
            ..Default::default()
        }
    }

    pub fn total_comparisons(&self) -> u64 {
        self.totals.total()
    }

    pub fn record(&mut self, site: Pos, op: CompareOp, class: ComparisonClass) {
        *self.totals.slot(class) += 1;
        *self.by_operator.entry(op.symbol()).or_default().slot(class) += 1;
        *self.sites.entry(site).or_default().slot(class) += 1;
    }

    /// Sites where an opaque regime would flip the outcome.
    pub fn flipped_sites(&self) -> Vec<Pos> {
        self.sites
            .iter()
            .filter(|(_, c)| c.type_ib > 0)
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn to_json(&self) -> ReportJson {
        let op = |s: &str| self.by_operator.get(s).copied().unwrap_or_default();
        ReportJson {
            total_comparisons: self.total_comparisons(),
            counts: self.totals,
            by_operator: ByOperator {
                eq: op("=="),
                ne: op("!="),
                strict_eq: op("==="),
                strict_ne: op("!=="),
            },
            sites: self
                .sites
                .iter()
                .filter(|(_, c)| c.proxy_total() > 0)
                .map(|(p, c)| SiteJson {
                    line: p.line,
                    col: p.col,
                    type_ia: c.type_ia,
                    type_ib: c.type_ib,
                    type_iia: c.type_iia,
                    type_iib: c.type_iib,
                })
                .collect(),
        }
    }

    pub fn emit(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
            }
            ReportFormat::Table => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut rows: Vec<(String, ClassCounts)> = vec![("all".into(), self.totals)];
        for op in CompareOp::ALL {
            rows.push((
                op.symbol().into(),
                self.by_operator
                    .get(op.symbol())
                    .copied()
                    .unwrap_or_default(),
            ));
        }
        for (pos, counts) in &self.sites {
            if counts.proxy_total() > 0 {
                rows.push((format!("site {pos}"), *counts));
            }
        }
        let header = [
            "scope", "Total", "Type-Ia", "Type-Ib", "Type-IIa", "Type-IIb",
        ];
        let cells: Vec<[String; 6]> = rows
            .iter()
            .map(|(label, c)| {
                [
                    label.clone(),
                    c.proxy_total().to_string(),
                    c.type_ia.to_string(),
                    c.type_ib.to_string(),
                    c.type_iia.to_string(),
                    c.type_iib.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "comparisons: {} (non-object: {}, object-object without proxy: {})",
            self.total_comparisons(),
            self.totals.non_object,
            self.totals.object_object_no_proxy
        );
        let line = |out: &mut String, row: &[&str]| {
            let _ = write!(out, "{:<w$}", row[0], w = widths[0]);
            for (cell, w) in row[1..].iter().zip(&widths[1..]) {
                let _ = write!(out, " | {cell:>w$}");
            }
            out.push('\n');
        };
        line(&mut out, &header);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(out, "{}", rule.join("-+-"));
        for row in &cells {
            line(
                &mut out,
                &row.iter().map(String::as_str).collect::<Vec<_>>(),
            );
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    #[default]
    Table,
}

/// Wire form of a report.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReportJson {
    #[serde(rename = "totalComparisons")]
    pub total_comparisons: u64,
    #[serde(flatten)]
    pub counts: ClassCounts,
    #[serde(rename = "byOperator")]
    pub by_operator: ByOperator,
    pub sites: Vec<SiteJson>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct ByOperator {
    #[serde(rename = "==")]
    pub eq: ClassCounts,
    #[serde(rename = "!=")]
    pub ne: ClassCounts,
    #[serde(rename = "===")]
    pub strict_eq: ClassCounts,
    #[serde(rename = "!==")]
    pub strict_ne: ClassCounts,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SiteJson {
    pub line: u32,
    pub col: u32,
    #[serde(rename = "typeIa")]
    pub type_ia: u64,
    #[serde(rename = "typeIb")]
    pub type_ib: u64,
    #[serde(rename = "typeIIa")]
    pub type_iia: u64,
    #[serde(rename = "typeIIb")]
    pub type_iib: u64,
}

/// One recorded comparison, kept only when event capture is on.
#[derive(Clone, Debug)]
pub struct ComparisonEvent {
    pub site: Pos,
    pub op: CompareOp,
    pub class: ComparisonClass,
    pub lhs: Value,
    pub rhs: Value,
    /// Outcome of the underlying equality test, before negation. `None` when
    /// the comparison raised.
    pub equal: Option<bool>,
}

impl ComparisonEvent {
    pub fn operands(&self) -> Option<(ObjectRef, ObjectRef)> {
        Some((self.lhs.as_object()?, self.rhs.as_object()?))
    }
}

#[derive(Clone, Debug)]
pub struct Instrumentation {
    report: ComparisonReport,
    keep_events: bool,
    events: Vec<ComparisonEvent>,
}

impl Instrumentation {
    pub fn new(keep_events: bool) -> Self {
        Instrumentation {
            report: ComparisonReport::new(),
            keep_events,
            events: Vec::new(),
        }
    }

    pub fn record(
        &mut self,
        site: Pos,
        op: CompareOp,
        class: ComparisonClass,
        lhs: &Value,
        rhs: &Value,
        equal: Option<bool>,
    ) {
        self.report.record(site, op, class);
        if self.keep_events {
            self.events.push(ComparisonEvent {
                site,
                op,
                class,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                equal,
            });
        }
    }

    pub fn report(&self) -> &ComparisonReport {
        &self.report
    }

    pub fn events(&self) -> &[ComparisonEvent] {
        &self.events
    }
}
