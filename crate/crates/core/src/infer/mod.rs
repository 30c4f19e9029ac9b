//! Constraint-based inference: unification with an occurs check, field
//! and label-absence constraints, narrowing and cast obligations,
//! staged-construction typing and nominal ancestry.

mod checker;
pub mod concrete;
pub mod elab;
pub mod env;
pub mod error;
pub mod scheme;
mod solve;
pub mod unify;

pub use checker::{check_expr, check_program, infer_expr, infer_program, CheckOutput};
pub use concrete::{check_concrete, NotConcrete};
pub use elab::{branch_path, Branch, Elab, Elaborations};
pub use env::{TypeDecl, TypeEnv};
pub use error::{ErrorKind, TypeError};
pub use scheme::{Class, Constraint, Pred, Scheme};
pub use unify::{Subst, UnifyError};
