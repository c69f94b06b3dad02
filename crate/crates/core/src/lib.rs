//! A small dynamic object language whose proxies can be transparent.
//!
//! Opaque proxies have an identity of their own, as in the standard proxy
//! API. Transparent proxies compare equal to their base target under `==`,
//! `===`, `sameValue` and identity-keyed collections, unless a caller
//! holding the proxy's token asks `objectEquals` to reveal it.
//!
//! The crate is organised as:
//!
//! * [`heap`] and [`object`]: records, constructors, trap dispatch, revocation.
//! * [`equality`]: identity resolution and the comparison algorithms.
//! * [`collections`]: Map, Set and WeakMap keyed by identity objects.
//! * [`interpreter`]: the scripting language and its builtins.
//! * [`patterns`]: membranes, contracts, observers and transparency realms.
//! * [`instrument`]: the comparison census and its reports.
//! * [`cli`]: the `tproxy run` front end and the wrapping experiment.

pub mod cli;
pub mod collections;
pub mod equality;
pub mod error;
pub mod heap;
pub mod instrument;
pub mod interpreter;
pub mod object;
pub mod patterns;
pub mod runtime;
pub mod value;

pub use error::{Error, ErrorKind, Pos, Result};
pub use interpreter::{parse_program, run_source, Outcome, Program, RunOptions};
pub use runtime::Runtime;
pub use value::{ObjectRef, Value};
