//! Proxy idioms shipped with the runtime: membranes, contracts, observers
//! and transparency realms.
//!
//! Everything here is host code. Comparisons it performs go straight to the
//! equality routines and are never counted by the instrumentation.

mod contract;
mod membrane;
mod observer;
mod realm;

pub use contract::{assert_contract, function_contract};
pub use membrane::{make_membrane, Membrane, MembraneOptions};
pub use observer::make_observer;
pub use realm::{create_proxy_constructor, RealmHandle};

use crate::error::Result;
use crate::heap::ProxyKind;
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Transparency {
    #[default]
    Transparent,
    Opaque,
}

impl Transparency {
    pub fn from_opaque_flag(opaque: bool) -> Self {
        if opaque {
            Transparency::Opaque
        } else {
            Transparency::Transparent
        }
    }
}

/// Builds a handler object whose properties are host functions.
fn handler_object(rt: &mut Runtime, traps: Vec<(&str, ObjectRef)>) -> ObjectRef {
    rt.make_native_object(traps.into_iter().map(|(k, f)| (k, Value::Object(f))))
}

/// A proxy of the requested flavour; transparent ones get a private token.
fn library_proxy(
    rt: &mut Runtime,
    mode: Transparency,
    target: ObjectRef,
    handler: ObjectRef,
) -> ObjectRef {
    let kind = match mode {
        Transparency::Opaque => ProxyKind::Opaque,
        Transparency::Transparent => ProxyKind::Transparent {
            token: rt.make_native_object([]),
        },
    };
    rt.alloc_proxy(kind, target, handler)
}

fn arg(args: &[Value], i: usize) -> Value {
    args.get(i).cloned().unwrap_or(Value::Undefined)
}

fn object_arg(args: &[Value], i: usize, what: &str) -> Result<ObjectRef> {
    arg(args, i)
        .as_object()
        .ok_or_else(|| crate::error::Error::type_error(format!("{what} must be an object")))
}
