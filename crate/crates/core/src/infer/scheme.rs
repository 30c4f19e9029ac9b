//! Constraints, type schemes and their sugared display.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::SourceSpan;
use crate::typesys::{Label, TyVar, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Num,
    Show,
    Eq,
    /// Satisfied by records; keeps actions out of `construct`.
    IsRecord,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Num => "Num",
            Class::Show => "Show",
            Class::Eq => "Eq",
            Class::IsRecord => "IsRecord",
        }
    }
}

/// A deferred typing obligation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    /// Record type, field type.
    HasField(Label, Type, Type),
    Lacks(Label, Type),
    /// Field type, base record, extended record.
    Extend(Label, Type, Type, Type),
    /// Left operand, right operand, result.
    LeftUnion(Type, Type, Type),
    /// Head, tail element, common element.
    LubCons(Type, Type, Type),
    Narrowable(Type, Type),
    DeepNarrowable(Type, Type),
    DownCastable(Type, Type),
    /// Full record type, narrowed view.
    DynCastPair(Type, Type),
    AncestorOf(Type, String),
    Class(Class, Type),
    /// Ascribed value type, recursive named type.
    Fold(Type, Type),
}

impl Pred {
    pub fn types(&self) -> Vec<&Type> {
        match self {
            Pred::HasField(_, a, b)
            | Pred::Narrowable(a, b)
            | Pred::DeepNarrowable(a, b)
            | Pred::DownCastable(a, b)
            | Pred::DynCastPair(a, b)
            | Pred::Fold(a, b) => vec![a, b],
            Pred::Lacks(_, a) | Pred::AncestorOf(a, _) | Pred::Class(_, a) => vec![a],
            Pred::Extend(_, f, b, r) => vec![b, f, r],
            Pred::LeftUnion(a, b, r) | Pred::LubCons(a, b, r) => vec![a, b, r],
        }
    }

    pub fn map_types(&self, f: &mut dyn FnMut(&Type) -> Type) -> Pred {
        match self {
            Pred::HasField(l, a, b) => Pred::HasField(l.clone(), f(a), f(b)),
            Pred::Lacks(l, a) => Pred::Lacks(l.clone(), f(a)),
            Pred::Extend(l, x, b, r) => Pred::Extend(l.clone(), f(x), f(b), f(r)),
            Pred::LeftUnion(a, b, r) => Pred::LeftUnion(f(a), f(b), f(r)),
            Pred::LubCons(a, b, r) => Pred::LubCons(f(a), f(b), f(r)),
            Pred::Narrowable(a, b) => Pred::Narrowable(f(a), f(b)),
            Pred::DeepNarrowable(a, b) => Pred::DeepNarrowable(f(a), f(b)),
            Pred::DownCastable(a, b) => Pred::DownCastable(f(a), f(b)),
            Pred::DynCastPair(a, b) => Pred::DynCastPair(f(a), f(b)),
            Pred::AncestorOf(a, g) => Pred::AncestorOf(f(a), g.clone()),
            Pred::Class(c, a) => Pred::Class(*c, f(a)),
            Pred::Fold(a, b) => Pred::Fold(f(a), f(b)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        for t in self.types() {
            t.collect_vars(&mut out);
        }
        out
    }

    /// The type the constraint is about; it decides display order.
    pub fn subject(&self) -> &Type {
        self.types()[0]
    }

    fn rank(&self) -> u8 {
        match self {
            Pred::Class(Class::Num, _) => 0,
            Pred::HasField(..) => 1,
            Pred::Lacks(..) => 2,
            Pred::Extend(..) => 3,
            Pred::Narrowable(..) => 4,
            Pred::AncestorOf(..) => 5,
            Pred::LeftUnion(..) => 6,
            Pred::LubCons(..) => 7,
            Pred::DeepNarrowable(..) => 8,
            Pred::DownCastable(..) => 9,
            Pred::DynCastPair(..) => 10,
            Pred::Class(..) => 11,
            Pred::Fold(..) => 12,
        }
    }

    /// Whether the solver must settle this before generalization.
    pub fn needs_ground(&self) -> bool {
        matches!(
            self,
            Pred::LeftUnion(..)
                | Pred::LubCons(..)
                | Pred::DeepNarrowable(..)
                | Pred::DownCastable(..)
                | Pred::DynCastPair(..)
        )
    }

    pub fn display_with(&self, name: &dyn Fn(TyVar) -> String) -> String {
        let at = |t: &Type| {
            let s = t.display_with(name);
            if t.is_atomic() {
                s
            } else {
                format!("({s})")
            }
        };
        match self {
            Pred::HasField(l, r, v) => format!("HasField {} {} {}", l.capitalized(), at(r), at(v)),
            Pred::Lacks(l, r) => format!("Lacks {} {}", l.capitalized(), at(r)),
            Pred::Extend(l, f, b, r) => {
                format!("Extend {} {} {} {}", l.capitalized(), at(f), at(b), at(r))
            }
            Pred::LeftUnion(a, b, r) => format!("LeftUnion {} {} {}", at(a), at(b), at(r)),
            Pred::LubCons(a, b, r) => format!("LubCons {} {} {}", at(a), at(b), at(r)),
            Pred::Narrowable(a, b) => format!("Narrow {} {}", at(a), at(b)),
            Pred::DeepNarrowable(a, b) => format!("DeepNarrow {} {}", at(a), at(b)),
            Pred::DownCastable(a, b) => format!("DownCast {} {}", at(a), at(b)),
            Pred::DynCastPair(a, b) => format!("DynCast {} {}", at(a), at(b)),
            Pred::AncestorOf(f, g) => format!("Ancestor {} {g}", at(f)),
            Pred::Class(c, t) => format!("{} {}", c.name(), at(t)),
            Pred::Fold(a, b) => format!("Fold {} {}", at(a), at(b)),
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| format!("t{v}")))
    }
}

/// A constraint together with the source that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub pred: Pred,
    pub span: SourceSpan,
}

/// `forall vars. preds => ty`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub vars: Vec<TyVar>,
    pub preds: Vec<Pred>,
    pub ty: Type,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarSort {
    Row,
    Nomination,
    Plain,
}

impl Scheme {
    pub fn mono(ty: Type) -> Scheme {
        Scheme {
            vars: Vec::new(),
            preds: Vec::new(),
            ty,
        }
    }

    /// The scheme `forall a. a`, given to bindings that failed to check.
    pub fn any() -> Scheme {
        Scheme {
            vars: vec![0],
            preds: Vec::new(),
            ty: Type::Var(0),
        }
    }

    /// Replaces the quantified variables with fresh ones.
    pub fn instantiate(&self, fresh: &mut dyn FnMut() -> Type) -> (Vec<Pred>, Type) {
        let map: BTreeMap<TyVar, Type> = self.vars.iter().map(|v| (*v, fresh())).collect();
        let f = |v: TyVar| map.get(&v).cloned();
        let preds = self
            .preds
            .iter()
            .map(|p| p.map_types(&mut |t| t.subst_vars(&f)))
            .collect();
        (preds, self.ty.subst_vars(&f))
    }

    /// Variables in display order, and the constraints in display order.
    fn layout(&self) -> (Vec<TyVar>, Vec<&Pred>) {
        let mut order = Vec::new();
        self.ty.vars_in_order(&mut order);
        let mut rest: Vec<&Pred> = self.preds.iter().collect();
        let mut placed = Vec::new();
        while !rest.is_empty() {
            let key = |p: &Pred, order: &Vec<TyVar>| {
                let mut vs = Vec::new();
                p.subject().vars_in_order(&mut vs);
                let pos = vs
                    .first()
                    .and_then(|v| order.iter().position(|w| w == v))
                    .unwrap_or(usize::MAX);
                (pos, p.rank())
            };
            let best = (0..rest.len())
                .min_by_key(|&i| (key(rest[i], &order), i))
                .expect("non-empty");
            let p = rest.remove(best);
            for t in p.types() {
                t.vars_in_order(&mut order);
            }
            placed.push(p);
        }
        (order, placed)
    }

    fn sorts(&self) -> BTreeMap<TyVar, VarSort> {
        let mut sorts = BTreeMap::new();
        fn noms(t: &Type, out: &mut BTreeMap<TyVar, VarSort>) {
            if let Type::Nominal(n, _) = t {
                if let Type::Var(v) = **n {
                    out.insert(v, VarSort::Nomination);
                }
            }
            for c in t.children() {
                noms(c, out);
            }
        }
        noms(&self.ty, &mut sorts);
        for p in &self.preds {
            for t in p.types() {
                noms(t, &mut sorts);
            }
            let row_subjects: Vec<&Type> = match p {
                Pred::HasField(_, r, _) | Pred::Lacks(_, r) | Pred::Narrowable(r, _) => vec![r],
                Pred::Extend(_, _, b, r) => vec![b, r],
                Pred::LeftUnion(a, b, r) => vec![a, b, r],
                _ => Vec::new(),
            };
            for t in row_subjects {
                if let Type::Var(v) = t {
                    sorts.entry(*v).or_insert(VarSort::Row);
                }
            }
            if let Pred::AncestorOf(Type::Var(v), _) = p {
                sorts.insert(*v, VarSort::Nomination);
            }
        }
        sorts
    }

    /// Renders the scheme with constraints before `=>`, naming variables
    /// `a`, `a1`, ... with `r` for records and `f` for nominations.
    pub fn pretty(&self) -> String {
        let (order, preds) = self.layout();
        let sorts = self.sorts();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut names: BTreeMap<TyVar, String> = BTreeMap::new();
        for v in order {
            let base = match sorts.get(&v).copied().unwrap_or(VarSort::Plain) {
                VarSort::Row => "r",
                VarSort::Nomination => "f",
                VarSort::Plain => "a",
            };
            let n = counts.entry(base).or_insert(0);
            let name = if *n == 0 {
                base.to_string()
            } else {
                format!("{base}{n}")
            };
            *n += 1;
            names.insert(v, name);
        }
        let name = |v: TyVar| names.get(&v).cloned().unwrap_or_else(|| format!("t{v}"));
        let body = self.ty.display_with(&name);
        let shown: Vec<String> = preds.iter().map(|p| p.display_with(&name)).collect();
        match shown.len() {
            0 => body,
            1 => format!("{} => {body}", shown[0]),
            _ => format!("({}) => {body}", shown.join(", ")),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// Names variables `a`, `a1`, ... in order of first appearance across
/// several types, for use in error messages.
pub(crate) fn show_types(ts: &[&Type]) -> Vec<String> {
    let mut order = Vec::new();
    for t in ts {
        t.vars_in_order(&mut order);
    }
    let name = |v: TyVar| match order.iter().position(|w| *w == v) {
        Some(0) => "a".to_string(),
        Some(i) => format!("a{i}"),
        None => format!("t{v}"),
    };
    ts.iter().map(|t| t.display_with(&name)).collect()
}
