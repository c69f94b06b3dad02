use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::{arg, object_arg};
use crate::error::{Error, Result};
use crate::heap::{MembraneId, ObjectRecord, ProxyKind};
use crate::object::{TRAP_APPLY, TRAP_DELETE, TRAP_GET, TRAP_HAS, TRAP_SET};
use crate::runtime::Runtime;
use crate::value::{ObjectRef, Value};

#[derive(Clone, Copy, Debug)]
pub struct MembraneOptions {
    pub transparent: bool,
    /// Reuse one proxy per target. Turning this off still yields a membrane,
    /// just not an identity-preserving one when opaque.
    pub identity_preserving: bool,
}

impl Default for MembraneOptions {
    fn default() -> Self {
        MembraneOptions {
            transparent: false,
            identity_preserving: true,
        }
    }
}

struct State {
    id: MembraneId,
    options: MembraneOptions,
    token: ObjectRef,
    handler: ObjectRef,
    /// Keyed by the raw reference of the wrapped object.
    cache: HashMap<ObjectRef, ObjectRef>,
    minted: Vec<ObjectRef>,
    revoked: bool,
}

/// Wraps every object that crosses outward and unwraps its own proxies on
/// the way back in.
#[derive(Clone)]
pub struct Membrane {
    state: Rc<RefCell<State>>,
}

impl Membrane {
    pub fn new(rt: &mut Runtime, options: MembraneOptions) -> Membrane {
        let id = rt.fresh_membrane_id();
        let token = rt.make_native_object([]);
        let handler = rt.make_native_object([]);
        let membrane = Membrane {
            state: Rc::new(RefCell::new(State {
                id,
                options,
                token,
                handler,
                cache: HashMap::new(),
                minted: Vec::new(),
                revoked: false,
            })),
        };
        let traps = membrane.build_traps(rt);
        for (name, f) in traps {
            rt.dispatch_set(handler, name, Value::Object(f))
                .expect("handler is a native object");
        }
        membrane
    }

    pub fn id(&self) -> MembraneId {
        self.state.borrow().id
    }

    pub fn is_revoked(&self) -> bool {
        self.state.borrow().revoked
    }

    /// Number of distinct proxies minted so far.
    pub fn proxy_count(&self) -> usize {
        self.state.borrow().minted.len()
    }

    fn build_traps(&self, rt: &mut Runtime) -> Vec<(&'static str, ObjectRef)> {
        let m = self.clone();
        let get = rt.make_function("membrane.get", move |rt, _, args| {
            m.check_live()?;
            let target = object_arg(args, 0, "target")?;
            let key = rt.display(&arg(args, 1));
            let v = rt.dispatch_get(target, &key)?;
            m.wrap(rt, &v)
        });
        let m = self.clone();
        let set = rt.make_function("membrane.set", move |rt, _, args| {
            m.check_live()?;
            let target = object_arg(args, 0, "target")?;
            let key = rt.display(&arg(args, 1));
            let v = m.unwrap(rt, &arg(args, 2));
            rt.dispatch_set(target, &key, v)?;
            Ok(Value::Bool(true))
        });
        let m = self.clone();
        let has = rt.make_function("membrane.has", move |rt, _, args| {
            m.check_live()?;
            let target = object_arg(args, 0, "target")?;
            let key = rt.display(&arg(args, 1));
            Ok(Value::Bool(rt.dispatch_has(target, &key)?))
        });
        let m = self.clone();
        let delete = rt.make_function("membrane.deleteProperty", move |rt, _, args| {
            m.check_live()?;
            let target = object_arg(args, 0, "target")?;
            let key = rt.display(&arg(args, 1));
            Ok(Value::Bool(rt.dispatch_delete(target, &key)?))
        });
        let m = self.clone();
        let apply = rt.make_function("membrane.apply", move |rt, _, args| {
            m.check_live()?;
            let target = object_arg(args, 0, "target")?;
            let this = m.unwrap(rt, &arg(args, 1));
            let inner_args = match arg(args, 2) {
                Value::Object(a) => rt.array_to_vec(a)?,
                _ => Vec::new(),
            };
            let inner_args: Vec<Value> = inner_args.iter().map(|v| m.unwrap(rt, v)).collect();
            let result = rt.dispatch_apply(target, this, &inner_args)?;
            m.wrap(rt, &result)
        });
        vec![
            (TRAP_GET, get),
            (TRAP_SET, set),
            (TRAP_HAS, has),
            (TRAP_DELETE, delete),
            (TRAP_APPLY, apply),
        ]
    }

    fn check_live(&self) -> Result<()> {
        if self.is_revoked() {
            Err(Error::revoked("membrane has been revoked"))
        } else {
            Ok(())
        }
    }

    /// Wraps an outbound value. Primitives and this membrane's own proxies
    /// pass through unchanged.
    pub fn wrap(&self, rt: &mut Runtime, v: &Value) -> Result<Value> {
        let Value::Object(r) = v else {
            return Ok(v.clone());
        };
        self.check_live()?;
        let mut st = self.state.borrow_mut();
        if rt.heap.membrane_of(*r) == Some(st.id) {
            return Ok(v.clone());
        }
        if st.options.identity_preserving {
            if let Some(p) = st.cache.get(r) {
                return Ok(Value::Object(*p));
            }
        }
        let kind = if st.options.transparent {
            ProxyKind::Transparent { token: st.token }
        } else {
            ProxyKind::Opaque
        };
        let proxy = rt.alloc_proxy(kind, *r, st.handler);
        if let ObjectRecord::Proxy(p) = rt.heap.get_mut(proxy) {
            p.membrane = Some(st.id);
        }
        st.minted.push(proxy);
        if st.options.identity_preserving {
            st.cache.insert(*r, proxy);
        }
        Ok(Value::Object(proxy))
    }

    /// Strips one of this membrane's proxies; anything else is returned as is.
    pub fn unwrap(&self, rt: &Runtime, v: &Value) -> Value {
        match v {
            Value::Object(r) if rt.heap.membrane_of(*r) == Some(self.id()) => {
                Value::Object(rt.heap.proxy(*r).expect("membrane proxy").target)
            }
            other => other.clone(),
        }
    }

    /// Detaches every proxy this membrane has minted. Idempotent.
    pub fn revoke(&self, rt: &mut Runtime) {
        let mut st = self.state.borrow_mut();
        st.revoked = true;
        for p in &st.minted {
            rt.revoke(*p);
        }
    }
}

/// Wraps `root` in a fresh identity-preserving membrane. Returns the wrapper
/// and a revoke function.
pub fn make_membrane(
    rt: &mut Runtime,
    root: &Value,
    transparent: bool,
) -> Result<(ObjectRef, ObjectRef)> {
    if !root.is_object() {
        return Err(Error::type_error("membrane root must be an object"));
    }
    let membrane = Membrane::new(
        rt,
        MembraneOptions {
            transparent,
            identity_preserving: true,
        },
    );
    let wrapper = membrane
        .wrap(rt, root)?
        .as_object()
        .expect("object in, proxy out");
    let revoke = rt.make_function("revoke", move |rt, _, _| {
        membrane.revoke(rt);
        Ok(Value::Undefined)
    });
    Ok((wrapper, revoke))
}
