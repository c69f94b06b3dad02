//! Heap records: native objects and both proxy kinds.

use std::fmt;
use std::rc::Rc;

use indexmap::IndexMap;

use crate::collections::IdentityMap;
use crate::error::Result;
use crate::interpreter::Closure;
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

/// Host function signature: `(runtime, this, arguments)`.
pub type NativeFn = Rc<dyn Fn(&mut Runtime, Value, &[Value]) -> Result<Value>>;

#[derive(Clone)]
pub enum Callable {
    Script(Rc<Closure>),
    Native { name: Rc<str>, f: NativeFn },
}

impl fmt::Debug for Callable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Callable::Script(c) => write!(f, "Script({})", c.name()),
            Callable::Native { name, .. } => write!(f, "Native({name})"),
        }
    }
}

/// Identifier stamped on every proxy minted by one membrane.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MembraneId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProxyKind {
    /// Created by the ordinary proxy constructor. Transparent for equality
    /// only while its handler's `isTransparent` trap answers truthy.
    Opaque,
    /// Created by the transparent constructor; carries the token that lets
    /// `objectEquals` reveal it.
    Transparent { token: ObjectRef },
}

#[derive(Clone, Debug)]
pub struct ProxyRecord {
    pub kind: ProxyKind,
    pub target: ObjectRef,
    /// `None` once revoked; never becomes `Some` again.
    pub handler: Option<ObjectRef>,
    pub membrane: Option<MembraneId>,
}

/// Built-in internal state carried by some native objects.
#[derive(Clone, Debug)]
pub enum InternalSlot {
    Collection(IdentityMap),
}

#[derive(Clone, Debug, Default)]
pub struct NativeObject {
    pub properties: IndexMap<Rc<str>, Value>,
    pub call: Option<Callable>,
    pub internal: Option<InternalSlot>,
}

#[derive(Clone, Debug)]
pub enum ObjectRecord {
    Native(NativeObject),
    Proxy(ProxyRecord),
}

impl ObjectRecord {
    pub fn as_proxy(&self) -> Option<&ProxyRecord> {
        match self {
            ObjectRecord::Proxy(p) => Some(p),
            ObjectRecord::Native(_) => None,
        }
    }

    pub fn as_native(&self) -> Option<&NativeObject> {
        match self {
            ObjectRecord::Native(n) => Some(n),
            ObjectRecord::Proxy(_) => None,
        }
    }
}

/// Arena of object records. Records are never freed during a run, so an
/// `ObjectRef` is always live.
#[derive(Default)]
pub struct Heap {
    records: Vec<ObjectRecord>,
}

impl Heap {
    pub fn alloc(&mut self, record: ObjectRecord) -> ObjectRef {
        let id = u32::try_from(self.records.len()).expect("heap exhausted");
        self.records.push(record);
        ObjectRef(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, r: ObjectRef) -> &ObjectRecord {
        &self.records[r.index()]
    }

    pub fn get_mut(&mut self, r: ObjectRef) -> &mut ObjectRecord {
        &mut self.records[r.index()]
    }

    pub fn proxy(&self, r: ObjectRef) -> Option<&ProxyRecord> {
        self.get(r).as_proxy()
    }

    pub fn native(&self, r: ObjectRef) -> Option<&NativeObject> {
        self.get(r).as_native()
    }

    pub fn native_mut(&mut self, r: ObjectRef) -> Option<&mut NativeObject> {
        match self.get_mut(r) {
            ObjectRecord::Native(n) => Some(n),
            ObjectRecord::Proxy(_) => None,
        }
    }

    pub fn is_proxy(&self, r: ObjectRef) -> bool {
        self.proxy(r).is_some()
    }

    pub fn is_transparent_proxy(&self, r: ObjectRef) -> bool {
        matches!(
            self.proxy(r),
            Some(ProxyRecord {
                kind: ProxyKind::Transparent { .. },
                ..
            })
        )
    }

    /// The token slot of a transparent proxy.
    pub fn token_of(&self, r: ObjectRef) -> Option<ObjectRef> {
        match self.proxy(r)?.kind {
            ProxyKind::Transparent { token } => Some(token),
            ProxyKind::Opaque => None,
        }
    }

    pub fn membrane_of(&self, r: ObjectRef) -> Option<MembraneId> {
        self.proxy(r).and_then(|p| p.membrane)
    }

    /// Follows every proxy layer, transparent or opaque, revoked or not,
    /// down to the native record at the end of the chain. Never runs traps.
    pub fn base_target(&self, mut r: ObjectRef) -> ObjectRef {
        while let Some(p) = self.proxy(r) {
            r = p.target;
        }
        r
    }

    /// Whether the base target has call behaviour.
    pub fn is_callable(&self, r: ObjectRef) -> bool {
        self.native(self.base_target(r))
            .is_some_and(|n| n.call.is_some())
    }
}
