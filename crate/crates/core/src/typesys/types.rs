use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::row::Row;

/// A record label. Ordered by name; rows keep their entries in this order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: &str) -> Label {
        Label(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The label as a type-level name: `getX` becomes `GetX`.
    pub fn capitalized(&self) -> String {
        let mut cs = self.0.chars();
        match cs.next() {
            Some(c) => c.to_uppercase().chain(cs).collect(),
            None => String::new(),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Label {
        Label::new(s)
    }
}

pub type TyVar = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Var(TyVar),
    Int,
    Float,
    Bool,
    String,
    Unit,
    Pair(Box<Type>, Box<Type>),
    List(Box<Type>),
    Fun(Box<Type>, Box<Type>),
    /// `IO t`
    Action(Box<Type>),
    Ref(Box<Type>),
    Record(Row),
    /// `Either l r`
    Union(Box<Type>, Box<Type>),
    /// `N f x`: a payload tagged with a nomination. The nomination is a
    /// [`Type::Nomination`] or a variable standing for one.
    Nominal(Box<Type>, Box<Type>),
    Nomination(Arc<str>),
    NotFixed(Box<Type>),
    /// Iso-recursive named type applied to arguments.
    Named(Arc<str>, Vec<Type>),
}

impl Type {
    pub fn fun(a: Type, r: Type) -> Type {
        Type::Fun(Box::new(a), Box::new(r))
    }

    /// `a1 -> a2 -> ... -> r`
    pub fn funs(args: impl IntoIterator<Item = Type>, r: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(r, |acc, a| Type::fun(a, acc))
    }

    pub fn io(t: Type) -> Type {
        Type::Action(Box::new(t))
    }

    pub fn reference(t: Type) -> Type {
        Type::Ref(Box::new(t))
    }

    pub fn list(t: Type) -> Type {
        Type::List(Box::new(t))
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Pair(Box::new(a), Box::new(b))
    }

    pub fn union(a: Type, b: Type) -> Type {
        Type::Union(Box::new(a), Box::new(b))
    }

    pub fn nominal(n: Type, x: Type) -> Type {
        Type::Nominal(Box::new(n), Box::new(x))
    }

    pub fn nomination(n: &str) -> Type {
        Type::Nomination(Arc::from(n))
    }

    pub fn not_fixed(t: Type) -> Type {
        Type::NotFixed(Box::new(t))
    }

    /// The optional-value encoding: `Either t ()`.
    pub fn option(t: Type) -> Type {
        Type::union(t, Type::Unit)
    }

    pub fn children(&self) -> Vec<&Type> {
        match self {
            Type::Var(_)
            | Type::Int
            | Type::Float
            | Type::Bool
            | Type::String
            | Type::Unit
            | Type::Nomination(_) => Vec::new(),
            Type::List(a) | Type::Action(a) | Type::Ref(a) | Type::NotFixed(a) => vec![a],
            Type::Pair(a, b) | Type::Fun(a, b) | Type::Union(a, b) | Type::Nominal(a, b) => {
                vec![a, b]
            }
            Type::Record(r) => r.iter().map(|(_, t)| t).collect(),
            Type::Named(_, args) => args.iter().collect(),
        }
    }

    /// Rebuilds the type with `f` applied to every immediate child.
    pub fn map_children(&self, f: &mut dyn FnMut(&Type) -> Type) -> Type {
        match self {
            Type::Var(_)
            | Type::Int
            | Type::Float
            | Type::Bool
            | Type::String
            | Type::Unit
            | Type::Nomination(_) => self.clone(),
            Type::Pair(a, b) => Type::pair(f(a), f(b)),
            Type::List(a) => Type::list(f(a)),
            Type::Fun(a, b) => Type::fun(f(a), f(b)),
            Type::Action(a) => Type::io(f(a)),
            Type::Ref(a) => Type::reference(f(a)),
            Type::Record(r) => Type::Record(r.map_types(|t| f(t))),
            Type::Union(a, b) => Type::union(f(a), f(b)),
            Type::Nominal(a, b) => Type::nominal(f(a), f(b)),
            Type::NotFixed(a) => Type::not_fixed(f(a)),
            Type::Named(n, args) => Type::Named(n.clone(), args.iter().map(|a| f(a)).collect()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<TyVar>) {
        match self {
            Type::Var(v) => {
                out.insert(*v);
            }
            _ => {
                for c in self.children() {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Variables in order of first occurrence, left to right.
    pub fn vars_in_order(&self, out: &mut Vec<TyVar>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            _ => {
                for c in self.children() {
                    c.vars_in_order(out);
                }
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) => false,
            _ => self.children().into_iter().all(Type::is_ground),
        }
    }

    pub fn occurs(&self, v: TyVar) -> bool {
        match self {
            Type::Var(w) => *w == v,
            _ => self.children().into_iter().any(|c| c.occurs(v)),
        }
    }

    pub fn as_record(&self) -> Option<&Row> {
        match self {
            Type::Record(r) => Some(r),
            _ => None,
        }
    }

    /// Replaces variables according to `f`; variables mapped to `None`
    /// stay in place.
    pub fn subst_vars(&self, f: &dyn Fn(TyVar) -> Option<Type>) -> Type {
        match self {
            Type::Var(v) => f(*v).unwrap_or_else(|| self.clone()),
            _ => self.map_children(&mut |c| c.subst_vars(f)),
        }
    }

    /// Whether the type prints without parentheses in argument position.
    pub fn is_atomic(&self) -> bool {
        level(self) == 2
    }

    /// Renders the type in the sugared notation, naming variables with
    /// `name`.
    pub fn display_with(&self, name: &dyn Fn(TyVar) -> String) -> String {
        let mut out = String::new();
        write_type(self, name, 0, &mut out);
        out
    }
}

fn level(t: &Type) -> u8 {
    match t {
        Type::Fun(..) => 0,
        Type::Action(_)
        | Type::Ref(_)
        | Type::Union(..)
        | Type::Nominal(..)
        | Type::NotFixed(_)
        | Type::Record(_) => 1,
        Type::Named(_, args) if !args.is_empty() => 1,
        _ => 2,
    }
}

fn write_type(t: &Type, name: &dyn Fn(TyVar) -> String, min: u8, out: &mut String) {
    if level(t) < min {
        out.push('(');
        write_type(t, name, 0, out);
        out.push(')');
        return;
    }
    match t {
        Type::Var(v) => out.push_str(&name(*v)),
        Type::Int => out.push_str("Int"),
        Type::Float => out.push_str("Float"),
        Type::Bool => out.push_str("Bool"),
        Type::String => out.push_str("String"),
        Type::Unit => out.push_str("()"),
        Type::Pair(a, b) => {
            out.push('(');
            write_type(a, name, 0, out);
            out.push_str(", ");
            write_type(b, name, 0, out);
            out.push(')');
        }
        Type::List(a) => {
            out.push('[');
            write_type(a, name, 0, out);
            out.push(']');
        }
        Type::Fun(a, b) => {
            write_type(a, name, 1, out);
            out.push_str(" -> ");
            write_type(b, name, 0, out);
        }
        Type::Action(a) => {
            out.push_str("IO ");
            write_type(a, name, 2, out);
        }
        Type::Ref(a) => {
            out.push_str("Ref ");
            write_type(a, name, 2, out);
        }
        Type::Record(r) => {
            out.push_str("Record ( ");
            for (l, t) in r.iter() {
                out.push_str(&l.capitalized());
                out.push_str(" :=: ");
                write_type(t, name, 1, out);
                out.push_str(" :*: ");
            }
            out.push_str("HNil )");
        }
        Type::Union(a, b) => {
            out.push_str("Either ");
            write_type(a, name, 2, out);
            out.push(' ');
            write_type(b, name, 2, out);
        }
        Type::Nominal(n, x) => {
            out.push_str("N ");
            write_type(n, name, 2, out);
            out.push(' ');
            write_type(x, name, 2, out);
        }
        Type::Nomination(n) => out.push_str(n),
        Type::NotFixed(a) => {
            out.push_str("NotFixed ");
            write_type(a, name, 2, out);
        }
        Type::Named(n, args) => {
            out.push_str(n);
            for a in args {
                out.push(' ');
                write_type(a, name, 2, out);
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| format!("t{v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(fields: &[(&str, Type)]) -> Type {
        Type::Record(Row::from_pairs(fields.iter().map(|(l, t)| (Label::new(l), t.clone()))).unwrap())
    }

    #[test]
    fn sugared_record() {
        let t = rec(&[("x", Type::Int)]);
        assert_eq!(t.to_string(), "Record ( X :=: Int :*: HNil )");
    }

    #[test]
    fn functions_in_fields_are_parenthesized() {
        let t = rec(&[
            ("moveX", Type::fun(Type::Int, Type::io(Type::Unit))),
            ("getX", Type::io(Type::Int)),
        ]);
        assert_eq!(
            t.to_string(),
            "Record ( GetX :=: IO Int :*: MoveX :=: (Int -> IO ()) :*: HNil )"
        );
    }

    #[test]
    fn action_of_record_is_parenthesized() {
        let t = Type::fun(Type::Var(0), Type::io(rec(&[])));
        assert_eq!(t.display_with(&|_| "r".into()), "r -> IO (Record ( HNil ))");
    }

    #[test]
    fn arrows_associate_right() {
        let t = Type::fun(Type::fun(Type::Int, Type::Int), Type::fun(Type::Int, Type::Int));
        assert_eq!(t.to_string(), "(Int -> Int) -> Int -> Int");
    }

    #[test]
    fn capitalization() {
        assert_eq!(Label::new("getColor").capitalized(), "GetColor");
    }
}
