use std::fmt;

use crate::syntax::SourceSpan;
use crate::typesys::{Label, Type};

use super::checker::Checker;
use super::env::TypeEnv;
use super::scheme::{Constraint, Scheme};

/// Why a generator cannot be instantiated.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct NotConcrete {
    /// Fields used through self, with the types they are used at.
    pub missing: Vec<(Label, String)>,
    /// Other failures, such as a field present at the wrong type.
    pub other: Vec<String>,
}

impl fmt::Display for NotConcrete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.missing.iter().map(|(l, t)| format!("missing {l} : {t}")).collect();
        parts.extend(self.other.iter().cloned());
        write!(f, "not concrete: {}", parts.join("; "))
    }
}

/// Checks that the generator described by `g`, once applied to all
/// arguments but self, can be fixed: everything its methods require of
/// self is provided by the record it builds.
pub fn check_concrete(g: &Scheme, env: &TypeEnv) -> Result<(), NotConcrete> {
    let mut ck = Checker::new(env);
    let (preds, ty) = g.instantiate(&mut || ck.subst.fresh());
    let span = SourceSpan::synthetic();
    ck.pending = preds
        .into_iter()
        .map(|pred| Constraint {
            pred,
            span: span.clone(),
        })
        .collect();
    let mut tail = ty;
    let (s, p) = loop {
        match tail {
            Type::Fun(a, r) => match *r {
                Type::Action(p) => break (*a, *p),
                other => tail = other,
            },
            other => {
                return Err(NotConcrete {
                    missing: Vec::new(),
                    other: vec![format!("`{other}` is not a generator type")],
                })
            }
        }
    };
    let (s, p) = match (s, p) {
        (Type::NotFixed(s), Type::NotFixed(p)) => (*s, *p),
        pair => pair,
    };
    ck.solve();
    let missing = ck.missing_for_self(&s, &p);
    ck.unify_at(&s, &p, &span);
    ck.solve();
    let other: Vec<String> = ck.errors.iter().map(|e| e.message.clone()).collect();
    if missing.is_empty() && other.is_empty() {
        Ok(())
    } else {
        Err(NotConcrete { missing, other })
    }
}
