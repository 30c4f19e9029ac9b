//! Facts the checker hands to the evaluator, keyed by expression node.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::NodeId;
use crate::typesys::{CoercionPlan, Label, Type};

/// One step down a union: into the left branch or the right one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Elab {
    /// An integer literal typed as `Float`.
    FloatLit,
    /// Keep only these fields: `narrow` and `lubCons`.
    Project(BTreeSet<Label>),
    /// `deepNarrow`.
    Coerce(CoercionPlan),
    /// `downCast`: the tag path of the requested branch.
    DownCast(Vec<Branch>),
    /// `dynUpCast`: the full ground type and the labels of the view.
    DynUp { full: Type, view: BTreeSet<Label> },
    /// `dynDownCast`: the requested type, and the static type of the
    /// operand for values that were never up-cast.
    DynDown { target: Type, source: Type },
}

pub type Elaborations = BTreeMap<NodeId, Elab>;

/// The tag path of `target` among the branches of `union`, searching left
/// branches first and matching the final right branch last.
pub fn branch_path(union: &Type, target: &Type) -> Option<Vec<Branch>> {
    let mut path = Vec::new();
    let mut cur = union;
    loop {
        match cur {
            Type::Union(l, r) => {
                if **l == *target {
                    path.push(Branch::Left);
                    return Some(path);
                }
                path.push(Branch::Right);
                cur = r;
            }
            _ if path.is_empty() => return None,
            _ => return (*cur == *target).then_some(path),
        }
    }
}
