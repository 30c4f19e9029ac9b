//! Depth subtyping and the coercions that witness it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::types::{Label, Type};

/// How to turn a value of one type into a value of a supertype.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoercionPlan {
    Identity,
    /// Keep only these fields, unchanged.
    Project(BTreeSet<Label>),
    /// Coerce the argument on the way in and the result on the way out.
    WrapFunction(Box<CoercionPlan>, Box<CoercionPlan>),
    /// Coerce the result of an action when it runs.
    WrapAction(Box<CoercionPlan>),
    /// Keep exactly these fields, each coerced by its plan.
    PerField(BTreeMap<Label, CoercionPlan>),
}

impl CoercionPlan {
    pub fn is_identity(&self) -> bool {
        matches!(self, CoercionPlan::Identity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct NotDeepSubtype {
    /// Position of the failure: labels, `arg`, `res` and `io` steps.
    pub path: Vec<String>,
    pub lower: Type,
    pub upper: Type,
    pub reason: String,
}

impl NotDeepSubtype {
    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            "<top>".to_string()
        } else {
            self.path.join(".")
        }
    }
}

impl fmt::Display for NotDeepSubtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at `{}`: {}", self.path_string(), self.reason)
    }
}

/// Structural subtyping: records by width and depth, functions
/// contravariant in the argument and covariant in the result, actions
/// covariant. Every other constructor, `Ref` included, is invariant.
pub fn depth_subtype(s: &Type, t: &Type) -> bool {
    match (s, t) {
        (Type::Record(rs), Type::Record(rt)) => rt
            .iter()
            .all(|(l, tt)| rs.get(l).is_some_and(|st| depth_subtype(st, tt))),
        (Type::Fun(a, r), Type::Fun(a2, r2)) => depth_subtype(a2, a) && depth_subtype(r, r2),
        (Type::Action(a), Type::Action(b)) => depth_subtype(a, b),
        _ => s == t,
    }
}

/// Builds the coercion from `s` to `t`, or reports the first position
/// where `s` is not a depth subtype of `t`.
pub fn derive_deep_narrow(s: &Type, t: &Type) -> Result<CoercionPlan, NotDeepSubtype> {
    let mut path = Vec::new();
    derive(s, t, &mut path)
}

fn derive(s: &Type, t: &Type, path: &mut Vec<String>) -> Result<CoercionPlan, NotDeepSubtype> {
    let fail = |path: &Vec<String>, reason: String| NotDeepSubtype {
        path: path.clone(),
        lower: s.clone(),
        upper: t.clone(),
        reason,
    };
    match (s, t) {
        (Type::Record(rs), Type::Record(rt)) => {
            let mut plans = BTreeMap::new();
            for (l, tt) in rt.iter() {
                let Some(st) = rs.get(l) else {
                    return Err(fail(path, format!("missing field `{l}`")));
                };
                path.push(l.to_string());
                let p = derive(st, tt, path)?;
                path.pop();
                plans.insert(l.clone(), p);
            }
            if plans.values().all(CoercionPlan::is_identity) {
                if rs.len() == rt.len() {
                    Ok(CoercionPlan::Identity)
                } else {
                    Ok(CoercionPlan::Project(rt.labels()))
                }
            } else {
                Ok(CoercionPlan::PerField(plans))
            }
        }
        (Type::Fun(a, r), Type::Fun(a2, r2)) => {
            path.push("arg".into());
            let pa = derive(a2, a, path)?;
            path.pop();
            path.push("res".into());
            let pr = derive(r, r2, path)?;
            path.pop();
            if pa.is_identity() && pr.is_identity() {
                Ok(CoercionPlan::Identity)
            } else {
                Ok(CoercionPlan::WrapFunction(Box::new(pa), Box::new(pr)))
            }
        }
        (Type::Action(a), Type::Action(b)) => {
            path.push("io".into());
            let p = derive(a, b, path)?;
            path.pop();
            if p.is_identity() {
                Ok(CoercionPlan::Identity)
            } else {
                Ok(CoercionPlan::WrapAction(Box::new(p)))
            }
        }
        _ if s == t => Ok(CoercionPlan::Identity),
        _ => Err(fail(path, format!("`{s}` is not a subtype of `{t}`"))),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::typesys::row::Row;

    fn rec(fields: &[(&str, Type)]) -> Type {
        Type::Record(Row::from_pairs(fields.iter().map(|(l, t)| (Label::new(l), t.clone()))).unwrap())
    }

    fn setter() -> Type {
        Type::fun(Type::Int, Type::io(Type::Unit))
    }

    pub fn pp() -> Type {
        rec(&[
            ("getX", Type::io(Type::Int)),
            ("getY", Type::io(Type::Int)),
            ("moveX", setter()),
            ("moveY", setter()),
            ("print", Type::io(Type::Unit)),
        ])
    }

    pub fn cp() -> Type {
        rec(&[
            ("getX", Type::io(Type::Int)),
            ("getY", Type::io(Type::Int)),
            ("moveX", setter()),
            ("moveY", setter()),
            ("print", Type::io(Type::Unit)),
            ("getColor", Type::io(Type::String)),
        ])
    }

    fn vector(point: &Type) -> Type {
        rec(&[
            ("getP1", Type::io(point.clone())),
            ("getP2", Type::io(point.clone())),
            ("print", Type::io(Type::Unit)),
        ])
    }

    fn vector2(point: &Type) -> Type {
        rec(&[
            ("getP1", Type::io(point.clone())),
            ("getP2", Type::io(point.clone())),
            ("setO", Type::fun(point.clone(), Type::io(Type::Unit))),
            ("print", Type::io(Type::Unit)),
        ])
    }

    #[test]
    fn reflexive() {
        let t = vector(&cp());
        assert!(depth_subtype(&t, &t));
        assert_eq!(derive_deep_narrow(&t, &t), Ok(CoercionPlan::Identity));
    }

    #[test]
    fn colored_vector_is_deep_subtype() {
        assert!(depth_subtype(&vector(&cp()), &vector(&pp())));
        let pp_labels = pp().as_record().unwrap().labels();
        let get = CoercionPlan::WrapAction(Box::new(CoercionPlan::Project(pp_labels)));
        let expected = CoercionPlan::PerField(BTreeMap::from([
            (Label::new("getP1"), get.clone()),
            (Label::new("getP2"), get),
            (Label::new("print"), CoercionPlan::Identity),
        ]));
        assert_eq!(derive_deep_narrow(&vector(&cp()), &vector(&pp())), Ok(expected));
    }

    #[test]
    fn covariant_argument_is_rejected() {
        assert!(!depth_subtype(&vector2(&cp()), &vector2(&pp())));
        let err = derive_deep_narrow(&vector2(&cp()), &vector2(&pp())).unwrap_err();
        assert_eq!(err.path_string(), "setO.arg");
        assert!(err.reason.contains("getColor"));
    }

    #[test]
    fn refs_are_invariant() {
        let a = Type::reference(cp());
        let b = Type::reference(pp());
        assert!(!depth_subtype(&a, &b));
        assert!(derive_deep_narrow(&a, &b).is_err());
    }

    #[test]
    fn width_is_a_special_case() {
        let plan = derive_deep_narrow(&cp(), &pp()).unwrap();
        assert_eq!(plan, CoercionPlan::Project(pp().as_record().unwrap().labels()));
    }
}
