//! The type language and the pure algebra over it: rows, width and depth
//! subtyping, least upper bounds, coercion plans and nominal ancestry.

pub mod nominal;
pub mod row;
pub mod subtype;
pub mod types;

pub use nominal::{NominalError, NominalGraph};
pub use row::{
    lub_row, row_extend, row_intersect, row_project, row_union_left, row_update, width_subtype,
    Row, RowError,
};
pub use subtype::{depth_subtype, derive_deep_narrow, CoercionPlan, NotDeepSubtype};
pub use types::{Label, TyVar, Type};
