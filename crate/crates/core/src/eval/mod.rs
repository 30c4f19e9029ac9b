//! Strict evaluation with a mutable store.

mod interp;
pub mod show;
pub mod store;
pub mod value;

use std::fmt;

use crate::syntax::SourceSpan;

pub use interp::Interpreter;
pub use show::{show_float, show_value};
pub use store::{Sink, Store};
pub use value::{Action, Env, Fields, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultKind {
    PrematureSelfAccess,
    UserFail,
    DivisionByZero,
    Internal,
}

impl FaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::PrematureSelfAccess => "PrematureSelfAccess",
            FaultKind::UserFail => "UserFail",
            FaultKind::DivisionByZero => "DivisionByZero",
            FaultKind::Internal => "Internal",
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{span}: runtime fault[{kind}]: {message}")]
pub struct RuntimeFault {
    pub kind: FaultKind,
    pub span: SourceSpan,
    pub message: String,
}
