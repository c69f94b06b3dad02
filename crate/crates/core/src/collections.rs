//! Map, Set and WeakMap keyed by identity objects.
//!
//! A key is resolved to its identity object once, at insertion, and entries
//! are hashed by that identity under `sameValue`. The key object the caller
//! first inserted is the one stored and returned by iteration, even when a
//! later update arrives through a different alias of the same identity.
//!
//! Collections created with a secret store keys that are transparent proxies
//! carrying that secret under their own reference instead.

use std::rc::Rc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::heap::{InternalSlot, NativeObject, ObjectRecord};
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

/// Hashable image of a resolved key; equality is `sameValue`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CollectionKey {
    Undefined,
    Null,
    Bool(bool),
    /// Bit pattern with every NaN canonicalised; `-0` stays distinct.
    Number(u64),
    Str(Rc<str>),
    Object(ObjectRef),
}

impl CollectionKey {
    /// Converts an already resolved value.
    pub fn from_identity(v: &Value) -> Self {
        match v {
            Value::Undefined => CollectionKey::Undefined,
            Value::Null => CollectionKey::Null,
            Value::Bool(b) => CollectionKey::Bool(*b),
            Value::Number(n) if n.is_nan() => CollectionKey::Number(f64::NAN.to_bits()),
            Value::Number(n) => CollectionKey::Number(n.to_bits()),
            Value::Str(s) => CollectionKey::Str(s.clone()),
            Value::Object(r) => CollectionKey::Object(*r),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CollectionKind {
    Map,
    Set,
    /// Object keys only, not iterable.
    WeakMap,
}

impl CollectionKind {
    fn name(self) -> &'static str {
        match self {
            CollectionKind::Map => "Map",
            CollectionKind::Set => "Set",
            CollectionKind::WeakMap => "WeakMap",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub stored_key: Value,
    pub value: Value,
}

#[derive(Clone, Debug)]
pub struct IdentityMap {
    kind: CollectionKind,
    secret: Option<ObjectRef>,
    entries: IndexMap<CollectionKey, Entry>,
}

impl IdentityMap {
    pub fn new(kind: CollectionKind, secret: Option<ObjectRef>) -> Self {
        IdentityMap {
            kind,
            secret,
            entries: IndexMap::new(),
        }
    }

    pub fn kind(&self) -> CollectionKind {
        self.kind
    }

    pub fn secret(&self) -> Option<ObjectRef> {
        self.secret
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts or updates. An update keeps the original stored key and position.
    pub fn insert(&mut self, key: CollectionKey, stored_key: Value, value: Value) {
        match self.entries.get_mut(&key) {
            Some(entry) => entry.value = value,
            None => {
                self.entries.insert(key, Entry { stored_key, value });
            }
        }
    }

    pub fn get(&self, key: &CollectionKey) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &CollectionKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn remove(&mut self, key: &CollectionKey) -> bool {
        self.entries.shift_remove(key).is_some()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.entries.values()
    }
}

impl Runtime {
    /// Resolves `key` the way a collection with `secret` would hash it.
    pub fn collection_key(
        &mut self,
        key: &Value,
        secret: Option<ObjectRef>,
    ) -> Result<CollectionKey> {
        if let (Value::Object(k), Some(s)) = (key, secret) {
            if self.heap.token_of(*k) == Some(s) {
                return Ok(CollectionKey::Object(*k));
            }
        }
        let identity = self.identity_object(key)?;
        Ok(CollectionKey::from_identity(&identity))
    }

    pub fn make_collection(
        &mut self,
        kind: CollectionKind,
        secret: Option<ObjectRef>,
    ) -> ObjectRef {
        self.heap.alloc(ObjectRecord::Native(NativeObject {
            internal: Some(InternalSlot::Collection(IdentityMap::new(kind, secret))),
            ..NativeObject::default()
        }))
    }

    fn collection(
        &self,
        obj: &Value,
        expected: CollectionKind,
    ) -> Result<(ObjectRef, Option<ObjectRef>)> {
        let found = obj.as_object().and_then(|r| match self.heap.native(r) {
            Some(NativeObject {
                internal: Some(InternalSlot::Collection(m)),
                ..
            }) if m.kind() == expected => Some((r, m.secret())),
            _ => None,
        });
        found.ok_or_else(|| Error::type_error(format!("receiver is not a {}", expected.name())))
    }

    fn collection_mut(&mut self, r: ObjectRef) -> &mut IdentityMap {
        match self.heap.native_mut(r) {
            Some(NativeObject {
                internal: Some(InternalSlot::Collection(m)),
                ..
            }) => m,
            _ => unreachable!("checked by Runtime::collection"),
        }
    }

    fn checked_key(
        &mut self,
        kind: CollectionKind,
        key: &Value,
        secret: Option<ObjectRef>,
    ) -> Result<CollectionKey> {
        if kind == CollectionKind::WeakMap && !key.is_object() {
            return Err(Error::type_error("WeakMap keys must be objects"));
        }
        self.collection_key(key, secret)
    }

    pub fn collection_set(
        &mut self,
        kind: CollectionKind,
        m: &Value,
        key: &Value,
        value: Value,
    ) -> Result<()> {
        let (r, secret) = self.collection(m, kind)?;
        let k = self.checked_key(kind, key, secret)?;
        self.collection_mut(r).insert(k, key.clone(), value);
        Ok(())
    }

    pub fn collection_get(
        &mut self,
        kind: CollectionKind,
        m: &Value,
        key: &Value,
    ) -> Result<Value> {
        let (r, secret) = self.collection(m, kind)?;
        let k = self.checked_key(kind, key, secret)?;
        Ok(self
            .collection_mut(r)
            .get(&k)
            .map(|e| e.value.clone())
            .unwrap_or(Value::Undefined))
    }

    pub fn collection_has(&mut self, kind: CollectionKind, m: &Value, key: &Value) -> Result<bool> {
        let (r, secret) = self.collection(m, kind)?;
        let k = self.checked_key(kind, key, secret)?;
        Ok(self.collection_mut(r).contains(&k))
    }

    pub fn collection_delete(
        &mut self,
        kind: CollectionKind,
        m: &Value,
        key: &Value,
    ) -> Result<bool> {
        let (r, secret) = self.collection(m, kind)?;
        let k = self.checked_key(kind, key, secret)?;
        Ok(self.collection_mut(r).remove(&k))
    }

    /// Stored keys in first-insertion order. WeakMaps are not iterable.
    pub fn collection_keys(&mut self, kind: CollectionKind, m: &Value) -> Result<Vec<Value>> {
        if kind == CollectionKind::WeakMap {
            return Err(Error::type_error("WeakMap is not iterable"));
        }
        let (r, _) = self.collection(m, kind)?;
        Ok(self
            .collection_mut(r)
            .entries()
            .map(|e| e.stored_key.clone())
            .collect())
    }

    pub fn collection_values(&mut self, kind: CollectionKind, m: &Value) -> Result<Vec<Value>> {
        if kind == CollectionKind::WeakMap {
            return Err(Error::type_error("WeakMap is not iterable"));
        }
        let (r, _) = self.collection(m, kind)?;
        Ok(self
            .collection_mut(r)
            .entries()
            .map(|e| e.value.clone())
            .collect())
    }

    pub fn collection_size(&mut self, kind: CollectionKind, m: &Value) -> Result<usize> {
        let (r, _) = self.collection(m, kind)?;
        Ok(self.collection_mut(r).len())
    }
}
