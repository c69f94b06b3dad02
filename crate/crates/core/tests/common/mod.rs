//! Shared generators and independent oracles for the integration suites.
//!
//! Every generator keeps a *model* next to the heap it builds: identity
//! classes, base objects and membrane tags are tracked from construction
//! alone, without asking the runtime how it resolves anything. The oracles
//! below only consult that model.

#![allow(dead_code)]

pub mod checks;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tproxy::heap::MembraneId;
use tproxy::instrument::ComparisonClass;
use tproxy::patterns::{Membrane, MembraneOptions};
use tproxy::{run_source, ObjectRef, RunOptions, Runtime, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How a proxy layer treats identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Transparent,
    Opaque,
    /// Opaque kind whose handler answers `isTransparent` with true.
    TrapTrue,
    /// Opaque kind whose handler answers `isTransparent` with false.
    TrapFalse,
}

impl Layer {
    pub const ALL: [Layer; 4] = [
        Layer::Transparent,
        Layer::Opaque,
        Layer::TrapTrue,
        Layer::TrapFalse,
    ];

    fn keeps_identity(self) -> bool {
        matches!(self, Layer::Transparent | Layer::TrapTrue)
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub value: Value,
    /// Model identity class; equal classes must compare `===`.
    pub identity: usize,
    /// Index of the base native object in the population.
    pub base: usize,
    pub is_proxy: bool,
    pub membrane: Option<MembraneId>,
    /// Token of the outermost layer when that layer is a transparent-kind proxy.
    pub outer_token: Option<ObjectRef>,
    /// Every layer is a transparent-kind proxy (no opaque layer anywhere).
    pub all_transparent: bool,
}

impl Member {
    pub fn obj(&self) -> ObjectRef {
        self.value.as_object().expect("members are objects")
    }
}

/// A heap of native objects and proxy chains over them, with a model.
pub struct Population {
    pub rt: Runtime,
    pub members: Vec<Member>,
    pub tokens: Vec<ObjectRef>,
    next_identity: usize,
    bases: usize,
    membrane_cache: HashMap<(MembraneId, ObjectRef), usize>,
}

impl Population {
    pub fn new() -> Self {
        let mut rt = Runtime::new();
        let tokens = (0..2).map(|_| rt.make_native_object([])).collect();
        Population {
            rt,
            members: Vec::new(),
            tokens,
            next_identity: 0,
            bases: 0,
            membrane_cache: HashMap::new(),
        }
    }

    /// Up to `max_bases` natives, each carrying up to `max_layers` proxy
    /// layers stacked in random order; layers may also stack on other
    /// proxies, producing mixed chains.
    pub fn random(rng: &mut impl Rng, max_bases: usize, max_layers: usize) -> Self {
        let mut pop = Population::new();
        let n = rng.gen_range(1..=max_bases);
        for _ in 0..n {
            let base = pop.add_native(rng.gen_range(0..100) as f64);
            let mut top = base;
            for _ in 0..rng.gen_range(0..=max_layers) {
                let layer = *Layer::ALL.choose(rng).unwrap();
                // Occasionally branch from an earlier layer instead of the top.
                let on = if rng.gen_bool(0.3) {
                    rng.gen_range(base..=top)
                } else {
                    top
                };
                top = pop.add_layer(on, layer, rng);
            }
        }
        pop
    }

    fn fresh_identity(&mut self) -> usize {
        self.next_identity += 1;
        self.next_identity - 1
    }

    pub fn add_native(&mut self, payload: f64) -> usize {
        let obj = self
            .rt
            .make_native_object([("payload", Value::Number(payload))]);
        let identity = self.fresh_identity();
        let base = self.bases;
        self.bases += 1;
        self.members.push(Member {
            value: Value::Object(obj),
            identity,
            base,
            is_proxy: false,
            membrane: None,
            outer_token: None,
            all_transparent: true,
        });
        self.members.len() - 1
    }

    /// Stacks one layer on member `on`; returns the new member's index.
    pub fn add_layer(&mut self, on: usize, layer: Layer, rng: &mut impl Rng) -> usize {
        let target = self.members[on].clone();
        let handler = self.handler_for(layer, rng);
        let proxy = match layer {
            Layer::Transparent => {
                let token = *self.tokens.choose(rng).unwrap();
                self.rt
                    .make_transparent_proxy(&target.value, &handler, &Value::Object(token))
                    .unwrap()
            }
            _ => self.rt.make_proxy(&target.value, &handler).unwrap(),
        };
        let identity = if layer.keeps_identity() {
            target.identity
        } else {
            self.fresh_identity()
        };
        let outer_token = match layer {
            Layer::Transparent => self.rt.heap.token_of(proxy),
            _ => None,
        };
        self.members.push(Member {
            value: Value::Object(proxy),
            identity,
            base: target.base,
            is_proxy: true,
            membrane: None,
            outer_token,
            all_transparent: target.all_transparent && layer == Layer::Transparent,
        });
        self.members.len() - 1
    }

    fn handler_for(&mut self, layer: Layer, rng: &mut impl Rng) -> Value {
        let mut props: Vec<(&str, Value)> = Vec::new();
        // Forwarding traps that would bump the trap counter if ever invoked.
        if rng.gen_bool(0.5) {
            let get = self.rt.make_function("get", |rt, _, args| {
                let t = args[0].as_object().unwrap();
                let key = rt.display(&args[1]);
                rt.dispatch_get(t, &key)
            });
            props.push(("get", Value::Object(get)));
        }
        let answer = match layer {
            Layer::TrapTrue => Some(true),
            Layer::TrapFalse => Some(false),
            _ => None,
        };
        if let Some(answer) = answer {
            let f = self
                .rt
                .make_function("isTransparent", move |_, _, _| Ok(Value::Bool(answer)));
            props.push(("isTransparent", Value::Object(f)));
        }
        Value::Object(self.rt.make_native_object(props))
    }

    /// Routes member `on` through `membrane`, mirroring its raw-keyed cache.
    pub fn add_membrane_wrap(
        &mut self,
        membrane: &Membrane,
        transparent: bool,
        on: usize,
    ) -> usize {
        let target = self.members[on].clone();
        let wrapped = membrane.wrap(&mut self.rt, &target.value).unwrap();
        if target.membrane == Some(membrane.id()) {
            return on;
        }
        let raw = target.obj();
        let key = (membrane.id(), raw);
        if let Some(&existing) = self.membrane_cache.get(&key) {
            assert_eq!(
                self.members[existing].value.as_object(),
                wrapped.as_object()
            );
            return existing;
        }
        let identity = if transparent {
            target.identity
        } else {
            self.fresh_identity()
        };
        self.members.push(Member {
            value: wrapped.clone(),
            identity,
            base: target.base,
            is_proxy: true,
            membrane: Some(membrane.id()),
            outer_token: if transparent {
                self.rt.heap.token_of(wrapped.as_object().unwrap())
            } else {
                None
            },
            all_transparent: target.all_transparent && transparent,
        });
        let idx = self.members.len() - 1;
        self.membrane_cache.insert(key, idx);
        idx
    }

    pub fn new_membrane(&mut self, transparent: bool) -> Membrane {
        Membrane::new(
            &mut self.rt,
            MembraneOptions {
                transparent,
                identity_preserving: true,
            },
        )
    }
}

impl Default for Population {
    fn default() -> Self {
        Self::new()
    }
}

/// Classifier oracle: decides from the construction model alone.
pub fn oracle_class(x: Option<&Member>, y: Option<&Member>) -> ComparisonClass {
    let (Some(a), Some(b)) = (x, y) else {
        return ComparisonClass::NonObject;
    };
    if !a.is_proxy && !b.is_proxy {
        return ComparisonClass::ObjectObjectNoProxy;
    }
    let same_base = a.base == b.base;
    let same_membrane = a.membrane.is_some() && a.membrane == b.membrane;
    match (same_membrane, same_base) {
        (true, true) => ComparisonClass::TypeIIb,
        (true, false) => ComparisonClass::TypeIIa,
        (false, true) => ComparisonClass::TypeIb,
        (false, false) => ComparisonClass::TypeIa,
    }
}

/// A collection key as the association-list oracle sees it.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleKey {
    Num(f64),
    Str(String),
    Bool(bool),
    Null,
    Undefined,
    /// Model identity class.
    Identity(usize),
    /// A proxy revealed by the collection's secret, by raw reference.
    Raw(ObjectRef),
}

impl OracleKey {
    /// `sameValue` on the oracle image.
    pub fn same(&self, other: &OracleKey) -> bool {
        match (self, other) {
            (OracleKey::Num(a), OracleKey::Num(b)) => {
                (a.is_nan() && b.is_nan())
                    || (a == b && a.is_sign_negative() == b.is_sign_negative())
            }
            _ => self == other,
        }
    }
}

/// Brute-force identity map: a vector of (key image, stored key, value)
/// searched linearly.
#[derive(Default)]
pub struct AssocList {
    pub entries: Vec<(OracleKey, usize, i64)>,
}

impl AssocList {
    fn find(&self, k: &OracleKey) -> Option<usize> {
        self.entries.iter().position(|(e, _, _)| e.same(k))
    }

    pub fn set(&mut self, k: OracleKey, stored: usize, v: i64) {
        match self.find(&k) {
            Some(i) => self.entries[i].2 = v,
            None => self.entries.push((k, stored, v)),
        }
    }

    pub fn get(&self, k: &OracleKey) -> Option<i64> {
        self.find(k).map(|i| self.entries[i].2)
    }

    pub fn has(&self, k: &OracleKey) -> bool {
        self.find(k).is_some()
    }

    pub fn delete(&mut self, k: &OracleKey) -> bool {
        match self.find(k) {
            Some(i) => {
                self.entries.remove(i);
                true
            }
            None => false,
        }
    }
}

/// One row of the hand-tabulated equality table.
pub struct EqCase {
    pub name: &'static str,
    /// Script expression for the left operand, evaluated after `PRELUDE`.
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub loose: bool,
    pub strict: bool,
}

/// Bindings shared by every row.
pub const PRELUDE: &str = r#"
var o = { n: 1 };
var other = { n: 1 };
var five = { valueOf: function () { return 5; } };
var foo = { toString: function () { return "foo"; } };
var objValueOf = {
  valueOf: function () { return {}; },
  toString: function () { return "7"; }
};
var one = { valueOf: function () { return 1; } };
var opaque = proxy(o, {});
var clear = transparentProxy(o, {});
var clearClear = transparentProxy(clear, {});
var opaqueOfClear = proxy(clear, {});
var clearOfOpaque = transparentProxy(opaque, {});
var trapTrue = proxy(o, { isTransparent: function () { return true; } });
var trapFalse = proxy(o, { isTransparent: function () { return false; } });
var clearFive = transparentProxy(five, {});
var lying = proxy({}, {
  get: function (t, name) {
    if (name == "valueOf") { return function () { return 3; }; }
    return undefined;
  }
});
var nan = 0 / 0;
var inf = 1 / 0;
"#;

macro_rules! case {
    ($name:expr, $l:expr, $r:expr, $loose:expr, $strict:expr) => {
        EqCase {
            name: $name,
            lhs: $l,
            rhs: $r,
            loose: $loose,
            strict: $strict,
        }
    };
}

/// Expected results under `==` and `===`, tabulated by hand from the
/// ECMAScript rules plus identity resolution.
pub fn equality_table() -> Vec<EqCase> {
    vec![
        case!("NaN vs NaN", "nan", "nan", false, false),
        case!("NaN vs number", "nan", "1", false, false),
        case!("+0 vs -0", "0", "-0", true, true),
        case!("-0 vs +0", "-0", "0", true, true),
        case!("null vs undefined", "null", "undefined", true, false),
        case!("undefined vs null", "undefined", "null", true, false),
        case!("null vs null", "null", "null", true, true),
        case!(
            "undefined vs undefined",
            "undefined",
            "undefined",
            true,
            true
        ),
        case!("null vs 0", "null", "0", false, false),
        case!("undefined vs 0", "undefined", "0", false, false),
        case!("null vs false", "null", "false", false, false),
        case!("string vs number", "\"1\"", "1", true, false),
        case!("number vs fractional string", "1", "\"1.0\"", true, false),
        case!("empty string vs 0", "\"\"", "0", true, false),
        case!("blank string vs 0", "\"  \"", "0", true, false),
        case!("exponent string", "\"1e3\"", "1000", true, false),
        case!("non-numeric string vs NaN", "\"abc\"", "nan", false, false),
        case!(
            "Infinity literal is not in the grammar",
            "\"Infinity\"",
            "inf",
            false,
            false
        ),
        case!("true vs 1", "true", "1", true, false),
        case!("false vs 0", "false", "0", true, false),
        case!("true vs \"1\"", "true", "\"1\"", true, false),
        case!("false vs empty string", "false", "\"\"", true, false),
        case!("\"true\" vs true", "\"true\"", "true", false, false),
        case!("equal strings", "\"a\"", "\"a\"", true, true),
        case!("different strings", "\"a\"", "\"b\"", false, false),
        case!("same object", "o", "o", true, true),
        case!("different objects", "o", "other", false, false),
        case!("object vs null", "o", "null", false, false),
        case!("undefined vs object", "undefined", "o", false, false),
        case!("valueOf vs number", "five", "5", true, false),
        case!("number vs valueOf", "5", "five", true, false),
        case!("toString vs string", "foo", "\"foo\"", true, false),
        case!(
            "toString fallback after object valueOf",
            "objValueOf",
            "7",
            true,
            false
        ),
        case!("valueOf vs boolean", "one", "true", true, false),
        case!("opaque proxy vs target", "opaque", "o", false, false),
        case!("transparent proxy vs target", "clear", "o", true, true),
        case!("target vs transparent proxy", "o", "clear", true, true),
        case!(
            "two transparent layers vs target",
            "clearClear",
            "o",
            true,
            true
        ),
        case!(
            "transparent proxies of one target",
            "clear",
            "clearClear",
            true,
            true
        ),
        case!(
            "opaque over transparent vs target",
            "opaqueOfClear",
            "o",
            false,
            false
        ),
        case!(
            "transparent over opaque vs opaque",
            "clearOfOpaque",
            "opaque",
            true,
            true
        ),
        case!(
            "transparent over opaque vs target",
            "clearOfOpaque",
            "o",
            false,
            false
        ),
        case!("isTransparent true vs target", "trapTrue", "o", true, true),
        case!(
            "isTransparent false vs target",
            "trapFalse",
            "o",
            false,
            false
        ),
        case!(
            "transparent proxy vs unrelated object",
            "clear",
            "other",
            false,
            false
        ),
        case!(
            "valueOf read through a transparent proxy",
            "clearFive",
            "5",
            true,
            false
        ),
        case!("valueOf supplied by a get trap", "lying", "3", true, false),
        case!("transparent proxy vs null", "clear", "null", false, false),
    ]
}

/// Evaluates every row with both operators, in both operand orders, plus
/// the negated forms; returns one line of six booleans per row.
pub fn evaluate_equality_table(rows: &[EqCase]) -> Result<Vec<String>, String> {
    let mut src = String::from(PRELUDE);
    for c in rows {
        let (l, r) = (c.lhs, c.rhs);
        src.push_str(&format!(
            "print({l} == {r}, {r} == {l}, {l} === {r}, {r} === {l}, {l} != {r}, {l} !== {r});\n"
        ));
    }
    let outcome = run_source(&src, RunOptions::default());
    match outcome.error {
        Some(e) => Err(e.to_string()),
        None => Ok(outcome.output),
    }
}

pub fn expected_line(c: &EqCase) -> String {
    format!(
        "{} {} {} {} {} {}",
        c.loose, c.loose, c.strict, c.strict, !c.loose, !c.strict
    )
}

/// Reads a fixture from `scripts/`.
pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scripts")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every fixture name, sorted.
pub fn fixture_names() -> Vec<String> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.ends_with(".tp").then_some(name)
        })
        .collect();
    names.sort();
    names
}
