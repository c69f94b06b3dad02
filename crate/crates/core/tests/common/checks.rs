//! Randomised checks shared by the property suite and the acceptance runner.
//! Each returns the number of individual assertions made, or a description
//! of the first counterexample.

use std::cell::Cell;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use tproxy::collections::CollectionKind;
use tproxy::heap::ProxyKind;
use tproxy::instrument::{classify_comparison, ComparisonClass};
use tproxy::patterns::{make_observer, Membrane, MembraneOptions};
use tproxy::{ObjectRef, Runtime, Value};

use super::{oracle_class, AssocList, Layer, OracleKey, Population};

pub type Check = Result<u64, String>;

fn obj_eq(a: &Value, b: &Value) -> bool {
    a.as_object().is_some() && a.as_object() == b.as_object()
}

/// Reflexivity, symmetry and transitivity of `===` on objects, agreement
/// with the construction model, consistency of `==`, `sameValue` and
/// two-argument `objectEquals`, and idempotent identity resolution.
#[allow(clippy::needless_range_loop)]
pub fn equivalence(pop: &mut Population) -> Check {
    let n = pop.members.len();
    let mut m = vec![vec![false; n]; n];
    let mut checks = 0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (pop.members[i].value.clone(), pop.members[j].value.clone());
            let rt = &mut pop.rt;
            let s = rt.strict_equals(&x, &y).map_err(|e| e.to_string())?;
            let a = rt.abstract_equals(&x, &y).map_err(|e| e.to_string())?;
            let v = rt.same_value(&x, &y).map_err(|e| e.to_string())?;
            let o = rt.object_equals(&[x, y]).map_err(|e| e.to_string())?;
            let model = pop.members[i].identity == pop.members[j].identity;
            if s != model || a != s || v != s || o != s {
                return Err(format!(
                    "members {i},{j}: === {s}, == {a}, sameValue {v}, objectEquals {o}, model {model}"
                ));
            }
            m[i][j] = s;
            checks += 1;
        }
    }
    for i in 0..n {
        if !m[i][i] {
            return Err(format!("member {i} is not equal to itself"));
        }
        for j in 0..n {
            if m[i][j] != m[j][i] {
                return Err(format!("asymmetric pair {i},{j}"));
            }
            if m[i][j] {
                for k in 0..n {
                    if m[j][k] && !m[i][k] {
                        return Err(format!("intransitive triple {i},{j},{k}"));
                    }
                }
            }
        }
        let v = pop.members[i].value.clone();
        let once = pop.rt.identity_object(&v).map_err(|e| e.to_string())?;
        let twice = pop.rt.identity_object(&once).map_err(|e| e.to_string())?;
        if !obj_eq(&once, &twice) {
            return Err(format!("identity of member {i} is not idempotent"));
        }
    }
    Ok(checks)
}

/// `===` on objects runs no get/set/has/delete/apply traps, and its result
/// survives property writes made in between.
pub fn stability(pop: &mut Population, rng: &mut impl Rng, pairs: usize) -> Check {
    let n = pop.members.len();
    for _ in 0..pairs {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (x, y) = (pop.members[i].value.clone(), pop.members[j].value.clone());
        let before = pop.rt.counters.trap_calls;
        let first = pop.rt.strict_equals(&x, &y).map_err(|e| e.to_string())?;
        if pop.rt.counters.trap_calls != before {
            return Err(format!("=== on members {i},{j} ran a trap"));
        }
        for _ in 0..rng.gen_range(0..3) {
            let k = rng.gen_range(0..n);
            let target = pop.members[k].obj();
            pop.rt
                .dispatch_set(
                    target,
                    "payload",
                    Value::Number(rng.gen_range(0..10) as f64),
                )
                .map_err(|e| e.to_string())?;
        }
        let before = pop.rt.counters.trap_calls;
        let second = pop.rt.strict_equals(&x, &y).map_err(|e| e.to_string())?;
        if pop.rt.counters.trap_calls != before || first != second {
            return Err(format!("=== on members {i},{j} changed after mutation"));
        }
    }
    Ok(pairs as u64)
}

/// `objectEquals(x, y, s)` departs from `===` only when the outer layer of
/// x or y carries the token `s`.
pub fn token_locality(pop: &mut Population, rng: &mut impl Rng, pairs: usize) -> Check {
    let n = pop.members.len();
    let stranger = pop.rt.make_native_object([]);
    let mut secrets: Vec<Value> = pop.tokens.iter().map(|t| Value::Object(*t)).collect();
    secrets.push(Value::Object(stranger));
    secrets.push(Value::Number(1.0));
    for _ in 0..pairs {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let s = secrets.choose(rng).unwrap().clone();
        let (x, y) = (pop.members[i].value.clone(), pop.members[j].value.clone());
        let with = pop
            .rt
            .object_equals(&[x.clone(), y.clone(), s.clone()])
            .map_err(|e| e.to_string())?;
        let without = pop.rt.strict_equals(&x, &y).map_err(|e| e.to_string())?;
        let carries =
            |k: usize| s.as_object().is_some() && pop.members[k].outer_token == s.as_object();
        if with != without && !(carries(i) || carries(j)) {
            return Err(format!(
                "secret changed the result for members {i},{j} without matching"
            ));
        }
        if carries(i) || carries(j) {
            let raw = obj_eq(&x, &y);
            if with != raw {
                return Err(format!(
                    "revealed comparison of {i},{j} is not reference equality"
                ));
            }
        }
    }
    Ok(pairs as u64)
}

/// Primitive keys that stress `sameValue`: both zeros and two NaN payloads.
fn primitive_keys() -> Vec<Value> {
    vec![
        Value::Number(0.0),
        Value::Number(-0.0),
        Value::Number(f64::NAN),
        Value::Number(f64::from_bits(0x7ff8_0000_0000_0001)),
        Value::Number(1.0),
        Value::from("1"),
        Value::from("a"),
        Value::Bool(true),
        Value::Null,
        Value::Undefined,
    ]
}

fn oracle_key(
    pop: &Population,
    key: &Value,
    member: Option<usize>,
    secret: Option<ObjectRef>,
) -> OracleKey {
    if let Some(m) = member {
        let member = &pop.members[m];
        if secret.is_some() && member.outer_token == secret {
            return OracleKey::Raw(member.obj());
        }
        return OracleKey::Identity(member.identity);
    }
    match key {
        Value::Number(n) => OracleKey::Num(*n),
        Value::Str(s) => OracleKey::Str(s.to_string()),
        Value::Bool(b) => OracleKey::Bool(*b),
        Value::Null => OracleKey::Null,
        Value::Undefined => OracleKey::Undefined,
        Value::Object(_) => unreachable!("objects are members"),
    }
}

/// Runs one random operation sequence against both the identity map and
/// the association-list oracle.
pub fn collections(rng: &mut impl Rng, max_ops: usize) -> Check {
    let mut pop = Population::random(rng, 8, 3);
    let kind = *[
        CollectionKind::Map,
        CollectionKind::Set,
        CollectionKind::WeakMap,
    ]
    .choose(rng)
    .unwrap();
    let secret = match rng.gen_range(0..3) {
        0 => Some(pop.tokens[0]),
        _ => None,
    };
    let coll = Value::Object(pop.rt.make_collection(kind, secret));

    // Keys: every member plus the primitives, each remembering its member index.
    let mut keys: Vec<(Value, Option<usize>)> = pop
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.value.clone(), Some(i)))
        .collect();
    keys.extend(primitive_keys().into_iter().map(|k| (k, None)));
    keys.shuffle(rng);
    keys.truncate(20);

    let mut oracle = AssocList::default();
    let ops = rng.gen_range(1..=max_ops);
    let mut checks = 0;
    for step in 0..ops {
        let ki = rng.gen_range(0..keys.len());
        let (key, member) = keys[ki].clone();
        let ok = oracle_key(&pop, &key, member, secret);
        let weak_reject = kind == CollectionKind::WeakMap && !key.is_object();
        let rt = &mut pop.rt;
        let op = rng.gen_range(0..6);
        let ctx = |what: &str| format!("step {step} ({what}) on key {ki}");
        match op {
            0 | 1 => {
                let v = rng.gen_range(0..50) as i64;
                let stored = match kind {
                    CollectionKind::Set => Value::Bool(true),
                    _ => Value::Number(v as f64),
                };
                let r = rt.collection_set(kind, &coll, &key, stored);
                if weak_reject {
                    if r.is_ok() {
                        return Err(ctx("primitive accepted by WeakMap"));
                    }
                    continue;
                }
                r.map_err(|e| format!("{}: {e}", ctx("set")))?;
                oracle.set(
                    ok.clone(),
                    ki,
                    if kind == CollectionKind::Set { 1 } else { v },
                );
            }
            2 => {
                let has = rt.collection_has(kind, &coll, &key);
                if weak_reject {
                    if has.is_ok() {
                        return Err(ctx("primitive probe accepted by WeakMap"));
                    }
                    continue;
                }
                if has.map_err(|e| e.to_string())? != oracle.has(&ok) {
                    return Err(ctx("has"));
                }
            }
            3 if kind != CollectionKind::Set => {
                let got = rt.collection_get(kind, &coll, &key);
                if weak_reject {
                    if got.is_ok() {
                        return Err(ctx("primitive get accepted by WeakMap"));
                    }
                    continue;
                }
                let got = got.map_err(|e| e.to_string())?;
                let want = oracle.get(&ok);
                let same = match (want, &got) {
                    (None, Value::Undefined) => true,
                    (Some(w), Value::Number(n)) => *n == w as f64,
                    _ => false,
                };
                if !same {
                    return Err(format!("{}: got {got:?}, want {want:?}", ctx("get")));
                }
            }
            4 => {
                let del = rt.collection_delete(kind, &coll, &key);
                if weak_reject {
                    if del.is_ok() {
                        return Err(ctx("primitive delete accepted by WeakMap"));
                    }
                    continue;
                }
                if del.map_err(|e| e.to_string())? != oracle.delete(&ok) {
                    return Err(ctx("delete"));
                }
            }
            _ => {
                if kind == CollectionKind::WeakMap {
                    if rt.collection_keys(kind, &coll).is_ok() {
                        return Err(ctx("WeakMap iterated"));
                    }
                    continue;
                }
                let size = rt.collection_size(kind, &coll).map_err(|e| e.to_string())?;
                if size != oracle.entries.len() {
                    return Err(format!(
                        "{}: size {size}, want {}",
                        ctx("size"),
                        oracle.entries.len()
                    ));
                }
                let stored = rt.collection_keys(kind, &coll).map_err(|e| e.to_string())?;
                for (got, (_, want, _)) in stored.iter().zip(&oracle.entries) {
                    let want = &keys[*want].0;
                    let same = match (got, want) {
                        (Value::Object(a), Value::Object(b)) => a == b,
                        _ => rt.same_value(got, want).map_err(|e| e.to_string())?,
                    };
                    if !same {
                        return Err(ctx("stored key order"));
                    }
                }
            }
        }
        checks += 1;

        // Coherence: aliases with the same resolved identity agree.
        if kind != CollectionKind::WeakMap || key.is_object() {
            let kj = rng.gen_range(0..keys.len());
            let (other, other_member) = keys[kj].clone();
            if kind == CollectionKind::WeakMap && !other.is_object() {
                continue;
            }
            if oracle_key(&pop, &other, other_member, secret).same(&ok) {
                let a = pop
                    .rt
                    .collection_has(kind, &coll, &key)
                    .map_err(|e| e.to_string())?;
                let b = pop
                    .rt
                    .collection_has(kind, &coll, &other)
                    .map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("aliases {ki} and {kj} disagree"));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

/// A random object graph: node `i` has up to three edges `e0..e2`.
pub struct Graph {
    pub nodes: Vec<ObjectRef>,
    /// (edge name, destination node) per node.
    pub edges: Vec<Vec<(String, usize)>>,
    /// Every object behind the membrane, including inner proxies.
    pub behind: Vec<ObjectRef>,
}

/// With `inner_proxies`, some edges point at a transparent proxy of their
/// destination instead of the node itself.
pub fn random_graph(
    rt: &mut Runtime,
    rng: &mut impl Rng,
    max_nodes: usize,
    inner_proxies: bool,
) -> Graph {
    let n = rng.gen_range(1..=max_nodes);
    let nodes: Vec<ObjectRef> = (0..n)
        .map(|i| rt.make_native_object([("id", Value::Number(i as f64))]))
        .collect();
    let mut behind = nodes.clone();
    let mut edges = Vec::with_capacity(n);
    for &node in &nodes {
        let mut out = Vec::new();
        for e in 0..rng.gen_range(0..=3) {
            let dest = rng.gen_range(0..n);
            let name = format!("e{e}");
            let value = if inner_proxies && rng.gen_bool(0.3) {
                let h = rt.make_native_object([]);
                let p = rt
                    .make_transparent_proxy(&nodes[dest].into(), &h.into(), &h.into())
                    .unwrap();
                behind.push(p);
                Value::Object(p)
            } else {
                Value::Object(nodes[dest])
            };
            rt.dispatch_set(node, &name, value).unwrap();
            out.push((name, dest));
        }
        edges.push(out);
    }
    Graph {
        nodes,
        edges,
        behind,
    }
}

fn random_path(g: &Graph, rng: &mut impl Rng, max_len: usize) -> Vec<String> {
    let mut path = Vec::new();
    let mut at = 0;
    for _ in 0..rng.gen_range(0..=max_len) {
        let Some((name, dest)) = g.edges[at].choose(rng) else {
            break;
        };
        path.push(name.clone());
        at = *dest;
    }
    path
}

fn follow(rt: &mut Runtime, start: &Value, path: &[String]) -> Result<Value, String> {
    let mut v = start.clone();
    for step in path {
        let o = v.as_object().ok_or("path left the object graph")?;
        v = rt.dispatch_get(o, step).map_err(|e| e.to_string())?;
    }
    Ok(v)
}

/// Paths that meet inside meet outside, and nothing read through the
/// wrapper is an unwrapped object from behind the membrane.
pub fn membrane_identity(
    rng: &mut impl Rng,
    max_nodes: usize,
    options: MembraneOptions,
    inner_proxies: bool,
) -> Check {
    let mut rt = Runtime::new();
    let g = random_graph(&mut rt, rng, max_nodes, inner_proxies);
    let membrane = Membrane::new(&mut rt, options);
    let root = Value::Object(g.nodes[0]);
    let wrapper = membrane.wrap(&mut rt, &root).map_err(|e| e.to_string())?;
    let paths: Vec<Vec<String>> = (0..12).map(|_| random_path(&g, rng, 6)).collect();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for p in &paths {
        inside.push(follow(&mut rt, &root, p)?);
        let out = follow(&mut rt, &wrapper, p)?;
        let o = out.as_object().ok_or("non-object read")?;
        if g.behind.contains(&o) {
            return Err(format!("path {p:?} leaked an unwrapped object"));
        }
        if rt.heap.membrane_of(o) != Some(membrane.id()) {
            return Err(format!("path {p:?} yielded a foreign object"));
        }
        outside.push(out);
    }
    let mut checks = 0;
    for i in 0..paths.len() {
        for j in 0..paths.len() {
            let meet_inside = rt
                .strict_equals(&inside[i], &inside[j])
                .map_err(|e| e.to_string())?;
            if meet_inside {
                let meet_outside = rt
                    .strict_equals(&outside[i], &outside[j])
                    .map_err(|e| e.to_string())?;
                if !meet_outside {
                    return Err(format!(
                        "{:?} and {:?} meet inside only",
                        paths[i], paths[j]
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObserverTrap {
    Forward,
    WrapTransparent,
    FreshObject,
}

/// Every read through an observer is `===` to the raw read; fresh objects
/// offered by the trap are replaced by the raw value.
pub fn observer_projection(rng: &mut impl Rng, reads: usize) -> Check {
    let mut rt = Runtime::new();
    let keys = ["a", "b", "c", "d", "e"];
    let target = rt.make_native_object([]);
    let mode = Rc::new(Cell::new(ObserverTrap::Forward));
    let trap_mode = mode.clone();
    let get = rt.make_function("get", move |rt, _, args| {
        let t = args[0].as_object().unwrap();
        let key = rt.display(&args[1]);
        let raw = rt.dispatch_get(t, &key)?;
        Ok(match trap_mode.get() {
            ObserverTrap::Forward => raw,
            ObserverTrap::WrapTransparent => match raw {
                Value::Object(_) => {
                    let h = rt.make_native_object([]);
                    Value::Object(rt.make_transparent_proxy(&raw, &h.into(), &h.into())?)
                }
                other => other,
            },
            ObserverTrap::FreshObject => Value::Object(rt.make_native_object([])),
        })
    });
    let handler = rt.make_native_object([("get", Value::Object(get))]);
    let observed =
        make_observer(&mut rt, &target.into(), &handler.into()).map_err(|e| e.to_string())?;

    let mut fresh_discarded = 0;
    for i in 0..reads {
        // Repopulate a property now and then so reads see changing values.
        if i % 4 == 0 {
            let key = *keys.choose(rng).unwrap();
            let v = match rng.gen_range(0..4) {
                0 => Value::Number(rng.gen_range(0..9) as f64),
                1 => Value::from("s"),
                _ => Value::Object(rt.make_native_object([])),
            };
            rt.dispatch_set(target, key, v).map_err(|e| e.to_string())?;
        }
        let trap = *[
            ObserverTrap::Forward,
            ObserverTrap::WrapTransparent,
            ObserverTrap::FreshObject,
        ]
        .choose(rng)
        .unwrap();
        mode.set(trap);
        let key = *keys.choose(rng).unwrap();
        let seen = rt.dispatch_get(observed, key).map_err(|e| e.to_string())?;
        let raw = rt.dispatch_get(target, key).map_err(|e| e.to_string())?;
        if !rt.strict_equals(&seen, &raw).map_err(|e| e.to_string())? {
            return Err(format!(
                "read {i} of {key} under {trap:?} is not the raw value"
            ));
        }
        if trap == ObserverTrap::FreshObject {
            let is_raw = match (&seen, &raw) {
                (Value::Object(a), Value::Object(b)) => a == b,
                _ => rt.same_value(&seen, &raw).map_err(|e| e.to_string())?,
            };
            if !is_raw {
                return Err(format!("fresh object from read {i} was not discarded"));
            }
            fresh_discarded += 1;
        }
    }
    Ok(reads as u64 + fresh_discarded)
}

/// A population extended with membrane proxies of several membranes.
pub fn population_with_membranes(rng: &mut impl Rng) -> Population {
    let mut pop = Population::random(rng, 6, 3);
    let membranes: Vec<(Membrane, bool)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let transparent = rng.gen_bool(0.5);
            (pop.new_membrane(transparent), transparent)
        })
        .collect();
    for _ in 0..rng.gen_range(4..16) {
        let (m, transparent) = membranes.choose(rng).unwrap().clone();
        let on = rng.gen_range(0..pop.members.len());
        pop.add_membrane_wrap(&m, transparent, on);
    }
    // Extra plain layers over membrane proxies.
    for _ in 0..rng.gen_range(0..3) {
        let on = rng.gen_range(0..pop.members.len());
        let layer = *Layer::ALL.choose(rng).unwrap();
        pop.add_layer(on, layer, rng);
    }
    pop
}

/// The heap-shape classifier against the model classifier.
pub fn classifier(rng: &mut impl Rng, pairs: usize) -> Check {
    let pop = population_with_membranes(rng);
    let prims = [
        Value::Number(1.0),
        Value::from("x"),
        Value::Null,
        Value::Undefined,
    ];
    let n = pop.members.len();
    for _ in 0..pairs {
        let pick = |rng: &mut _| -> (Value, Option<usize>) {
            if Rng::gen_bool(rng, 0.1) {
                (prims.choose(rng).unwrap().clone(), None)
            } else {
                let i = Rng::gen_range(rng, 0..n);
                (pop.members[i].value.clone(), Some(i))
            }
        };
        let (x, xi) = pick(rng);
        let (y, yi) = pick(rng);
        let got = classify_comparison(&pop.rt.heap, &x, &y);
        let want = oracle_class(xi.map(|i| &pop.members[i]), yi.map(|i| &pop.members[i]));
        if got != want {
            return Err(format!(
                "members {xi:?} vs {yi:?}: classified {got:?}, oracle {want:?}"
            ));
        }
    }
    Ok(pairs as u64)
}

/// Every layer from `r` down to its base is a transparent-kind proxy.
pub fn all_transparent(rt: &Runtime, mut r: ObjectRef) -> bool {
    while let Some(p) = rt.heap.proxy(r) {
        if !matches!(p.kind, ProxyKind::Transparent { .. }) {
            return false;
        }
        r = p.target;
    }
    true
}

/// Recorded Type-Ib/IIb comparisons between transparent operands were true,
/// and would be false with identity resolution switched off.
pub fn flip_soundness(rt: &mut Runtime) -> Check {
    let events = rt
        .instrumentation()
        .expect("instrumented")
        .events()
        .to_vec();
    let mut checks = 0;
    for e in events {
        if !matches!(e.class, ComparisonClass::TypeIb | ComparisonClass::TypeIIb) {
            continue;
        }
        let Some((a, b)) = e.operands() else { continue };
        if a == b || !all_transparent(rt, a) || !all_transparent(rt, b) {
            continue;
        }
        let now = rt
            .strict_equals(&a.into(), &b.into())
            .map_err(|e| e.to_string())?;
        if e.equal != Some(true) || !now {
            return Err(format!("event at {} did not compare equal", e.site));
        }
        // Identity resolution disabled: raw references differ.
        checks += 1;
    }
    Ok(checks)
}

/// A random script comparing natives, proxy chains and membrane proxies,
/// including comparisons against primitives.
pub fn random_comparison_script(rng: &mut impl Rng) -> String {
    let mut src = String::new();
    let mut names: Vec<String> = Vec::new();
    let bases = rng.gen_range(1..=4);
    for i in 0..bases {
        src.push_str(&format!(
            "var b{i} = {{ n: {i}, valueOf: function () {{ return {i}; }} }};\n"
        ));
        names.push(format!("b{i}"));
    }
    src.push_str("var graph = { ");
    for i in 0..bases {
        src.push_str(&format!("k{i}: b{i}, "));
    }
    src.push_str("};\n");
    for m in 0..rng.gen_range(0..=2) {
        let transparent = rng.gen_bool(0.5);
        src.push_str(&format!(
            "var mem{m} = makeMembrane(graph, {transparent}).wrapper;\n"
        ));
        for i in 0..bases {
            if rng.gen_bool(0.6) {
                src.push_str(&format!("var w{m}_{i} = mem{m}.k{i};\n"));
                names.push(format!("w{m}_{i}"));
            }
        }
    }
    for p in 0..rng.gen_range(0..6) {
        let on = names.choose(rng).unwrap().clone();
        let ctor = match rng.gen_range(0..3) {
            0 => "proxy",
            _ => "transparentProxy",
        };
        src.push_str(&format!("var p{p} = {ctor}({on}, {{}});\n"));
        names.push(format!("p{p}"));
    }
    for _ in 0..rng.gen_range(5..25) {
        let op = *["==", "!=", "===", "!=="].choose(rng).unwrap();
        let l = names.choose(rng).unwrap().clone();
        let r = if rng.gen_bool(0.2) {
            ["1", "\"0\"", "null", "undefined", "true"]
                .choose(rng)
                .unwrap()
                .to_string()
        } else {
            names.choose(rng).unwrap().clone()
        };
        src.push_str(&format!("print({l} {op} {r});\n"));
    }
    src
}
