//! Constraint simplification to a fixpoint.

use std::collections::BTreeMap;

use crate::syntax::SourceSpan;
use crate::typesys::{derive_deep_narrow, row_intersect, row_project, row_union_left, Label, Row, Type};

use super::checker::Checker;
use super::elab::branch_path;
use super::error::{ErrorKind, TypeError};
use super::scheme::{show_types, Class, Constraint, Pred};

impl Checker<'_> {
    /// Simplifies pending constraints until nothing changes. Constraints
    /// on unknown types stay pending.
    pub(crate) fn solve(&mut self) {
        loop {
            let mut progress = false;
            let work = std::mem::take(&mut self.pending);
            for c in work {
                if self.step(&c) {
                    progress = true;
                } else {
                    self.pending.push(c);
                }
            }
            progress |= self.improve();
            if !progress {
                break;
            }
        }
    }

    /// Two field constraints on the same unknown record and label must
    /// agree on the field type; duplicate class constraints collapse.
    fn improve(&mut self) -> bool {
        let mut fields: BTreeMap<(u32, Label), Type> = BTreeMap::new();
        let mut classes: Vec<(Class, u32)> = Vec::new();
        let mut changed = false;
        let work = std::mem::take(&mut self.pending);
        for c in work {
            match &c.pred {
                Pred::HasField(l, s, v) => {
                    if let Type::Var(r) = self.subst.shallow(s) {
                        if let Some(prev) = fields.get(&(r, l.clone())).cloned() {
                            self.unify_at(&prev, v, &c.span);
                            changed = true;
                            continue;
                        }
                        fields.insert((r, l.clone()), v.clone());
                    }
                }
                Pred::Class(k, t) => {
                    if let Type::Var(v) = self.subst.shallow(t) {
                        if classes.contains(&(*k, v)) {
                            changed = true;
                            continue;
                        }
                        classes.push((*k, v));
                    }
                }
                _ => {}
            }
            self.pending.push(c);
        }
        changed
    }

    fn push(&mut self, pred: Pred, span: &SourceSpan) {
        self.pending.push(Constraint {
            pred,
            span: span.clone(),
        });
    }

    fn fail(&mut self, kind: ErrorKind, span: &SourceSpan, message: String) {
        self.errors.push(TypeError::new(kind, span, message));
    }

    /// Follows bindings and unfolds named types at the head.
    pub(crate) fn head(&self, t: &Type) -> Type {
        let t = self.subst.shallow(t);
        match &t {
            Type::Named(..) => self.env.head_normal(&t),
            _ => t,
        }
    }

    /// Returns true when the constraint is discharged, possibly by
    /// reporting an error or by pushing simpler constraints.
    fn step(&mut self, c: &Constraint) -> bool {
        let span = &c.span;
        match &c.pred {
            Pred::HasField(l, s, v) => {
                let st = self.subst.shallow(s);
                match &st {
                    Type::Var(_) => return false,
                    Type::Record(row) => match row.get(l) {
                        Some(ft) => {
                            let ft = ft.clone();
                            self.unify_at(&ft, v, span);
                        }
                        None => {
                            let (row_s, v_s) = self.show_pair(&st, v);
                            self.fail(
                                ErrorKind::MissingField,
                                span,
                                format!(
                                    "the record `{row_s}` has no field `{l}`; it is used as {l} : {v_s}"
                                ),
                            );
                        }
                    },
                    Type::Nominal(_, x) => self.push(Pred::HasField(l.clone(), (**x).clone(), v.clone()), span),
                    Type::Union(a, b) => {
                        self.push(Pred::HasField(l.clone(), (**a).clone(), v.clone()), span);
                        self.push(Pred::HasField(l.clone(), (**b).clone(), v.clone()), span);
                    }
                    Type::Named(..) => {
                        let u = self.env.head_normal(&st);
                        if !matches!(u, Type::Named(..)) {
                            self.push(Pred::HasField(l.clone(), u, v.clone()), span);
                        }
                    }
                    Type::NotFixed(_) => self.fail(
                        ErrorKind::PrematureSelfAccess,
                        span,
                        format!(
                            "a NotFixed object does not have the method `{l}`: the object is still under construction"
                        ),
                    ),
                    _ => {
                        let shown = self.show(&st);
                        self.fail(
                            ErrorKind::MissingField,
                            span,
                            format!("a value of type `{shown}` is not an object and has no field `{l}`"),
                        );
                    }
                }
                true
            }
            Pred::Lacks(l, s) => match self.head(s) {
                Type::Var(_) => false,
                Type::Record(row) => {
                    if let Some(ft) = row.get(l) {
                        let ft = self.show(ft);
                        self.fail(
                            ErrorKind::DuplicateLabel,
                            span,
                            format!("duplicate label `{l}`: the record already has {l} : {ft}"),
                        );
                    }
                    true
                }
                _ => true,
            },
            Pred::Extend(l, f, b, r) => match self.head(b) {
                Type::Var(_) => match self.head(r) {
                    Type::Record(row) => {
                        match row.get(l) {
                            Some(ft) => {
                                let ft = ft.clone();
                                self.unify_at(&ft, f, span);
                            }
                            None => {
                                let shown = self.show(&Type::Record(row.clone()));
                                self.fail(
                                    ErrorKind::MissingField,
                                    span,
                                    format!("the extended record `{shown}` has no field `{l}`"),
                                );
                                return true;
                            }
                        }
                        self.unify_at(b, &Type::Record(row.without(l)), span);
                        true
                    }
                    _ => false,
                },
                Type::Record(row) => {
                    let mut pairs: Vec<(Label, Type)> =
                        row.iter().filter(|(m, _)| *m != l).map(|(m, t)| (m.clone(), t.clone())).collect();
                    pairs.push((l.clone(), f.clone()));
                    let ext = Row::from_pairs(pairs).expect("label removed first");
                    self.unify_at(r, &Type::Record(ext), span);
                    true
                }
                other => {
                    let shown = self.show(&other);
                    self.fail(
                        ErrorKind::Mismatch,
                        span,
                        format!("`.*.` extends records, but its right operand has type `{shown}`"),
                    );
                    true
                }
            },
            Pred::LeftUnion(a, b, r) => match (self.head(a), self.head(b)) {
                (Type::Record(x), Type::Record(y)) => {
                    self.unify_at(r, &Type::Record(row_union_left(&x, &y)), span);
                    true
                }
                (Type::Var(_), _) | (_, Type::Var(_)) => false,
                (x, y) => {
                    let bad = if matches!(x, Type::Record(_)) { y } else { x };
                    let shown = self.show(&bad);
                    self.fail(
                        ErrorKind::Mismatch,
                        span,
                        format!("`.<++.` combines records, but an operand has type `{shown}`"),
                    );
                    true
                }
            },
            Pred::LubCons(h, e, r) => {
                let (sh, se) = (self.subst.shallow(h), self.subst.shallow(e));
                match (&sh, &se) {
                    (Type::Var(_), _) | (_, Type::Var(_)) => false,
                    (Type::Named(m, _), Type::Named(n, _)) if m == n => {
                        self.unify_at(h, e, span);
                        self.unify_at(r, h, span);
                        true
                    }
                    _ => match (self.head(h), self.head(e)) {
                        (Type::Record(x), Type::Record(y)) => {
                            let common = row_intersect(&x, &y);
                            for l in &common {
                                let (tx, ty) = (x.get(l).unwrap().clone(), y.get(l).unwrap().clone());
                                if self.subst.unify(&tx, &ty).is_err() {
                                    let (a, b) = self.show_pair(&tx, &ty);
                                    self.fail(
                                        ErrorKind::Mismatch,
                                        span,
                                        format!(
                                            "lubCons: field `{l}` has type `{a}` in the head but `{b}` in the tail"
                                        ),
                                    );
                                }
                            }
                            let lub = row_project(&x, &common).expect("common labels");
                            self.unify_at(r, &Type::Record(lub), span);
                            true
                        }
                        _ => {
                            self.unify_at(h, e, span);
                            self.unify_at(r, h, span);
                            true
                        }
                    },
                }
            }
            Pred::Narrowable(s, t) => {
                let target = match self.head(t) {
                    Type::Record(row) => row,
                    Type::Var(_) => return false,
                    other => {
                        let shown = self.show(&other);
                        self.fail(
                            ErrorKind::NotNarrowable,
                            span,
                            format!("narrowing targets a record type, not `{shown}`"),
                        );
                        return true;
                    }
                };
                match self.head(s) {
                    Type::Var(_) => false,
                    Type::Record(src) => {
                        for (l, tt) in target.iter() {
                            match src.get(l) {
                                Some(st) => {
                                    let st = st.clone();
                                    self.unify_at(&st, tt, span);
                                }
                                None => {
                                    let (a, b) = self.show_pair(&Type::Record(src.clone()), tt);
                                    self.fail(
                                        ErrorKind::NotNarrowable,
                                        span,
                                        format!("cannot narrow `{a}`: it lacks the field {l} : {b}"),
                                    );
                                }
                            }
                        }
                        true
                    }
                    other => {
                        let shown = self.show(&other);
                        self.fail(
                            ErrorKind::NotNarrowable,
                            span,
                            format!("only records can be narrowed, not `{shown}`"),
                        );
                        true
                    }
                }
            }
            Pred::DeepNarrowable(s, t) => {
                let (zs, zt) = (self.subst.zonk(s), self.subst.zonk(t));
                if !zs.is_ground() || !zt.is_ground() {
                    return false;
                }
                let (hs, ht) = (self.env.head_normal(&zs), self.env.head_normal(&zt));
                if let Err(e) = derive_deep_narrow(&hs, &ht) {
                    let (a, b) = self.show_pair(&e.lower, &e.upper);
                    self.fail(
                        ErrorKind::NotDeepSubtype,
                        span,
                        format!(
                            "not a deep subtype at `{}`: {} (`{a}` against `{b}`)",
                            e.path_string(),
                            e.reason
                        ),
                    );
                }
                true
            }
            Pred::DownCastable(u, t) => {
                let (zu, zt) = (self.subst.zonk(u), self.subst.zonk(t));
                if !zu.is_ground() || !zt.is_ground() {
                    return false;
                }
                if branch_path(&zu, &zt).is_none() {
                    let (a, b) = self.show_pair(&zt, &zu);
                    self.fail(
                        ErrorKind::StupidCast,
                        span,
                        format!("stupid cast: `{a}` is not a branch of the union `{b}`"),
                    );
                }
                true
            }
            Pred::Fold(a, n) => {
                let at = self.subst.shallow(a);
                match at {
                    Type::Var(_) => return false,
                    Type::Named(..) => self.unify_at(&at, n, span),
                    _ => {
                        let unfolded = self.env.head_normal(n);
                        self.unify_at(&at, &unfolded, span)
                    }
                };
                true
            }
            Pred::DynCastPair(full, view) => {
                let zf = self.subst.zonk(full);
                if !zf.is_ground() {
                    return false;
                }
                self.push(Pred::Narrowable(zf, view.clone()), span);
                true
            }
            Pred::AncestorOf(f, g) => match self.subst.shallow(f) {
                Type::Var(_) => false,
                Type::Nomination(n) => {
                    match self.env.nominal.is_ancestor(&n, g) {
                        Ok(true) => {}
                        Ok(false) => self.fail(
                            ErrorKind::NotAncestor,
                            span,
                            format!("`{g}` is not an ancestor of `{n}`"),
                        ),
                        Err(e) => self.fail(ErrorKind::NotAncestor, span, e.to_string()),
                    }
                    true
                }
                other => {
                    let shown = self.show(&other);
                    self.fail(
                        ErrorKind::NotAncestor,
                        span,
                        format!("`{shown}` is not a nomination"),
                    );
                    true
                }
            },
            Pred::Class(k, t) => self.step_class(*k, t, span),
        }
    }

    fn step_class(&mut self, k: Class, t: &Type, span: &SourceSpan) -> bool {
        let st = self.subst.shallow(t);
        let ok = match (&k, &st) {
            (_, Type::Var(_)) => return false,
            (Class::Num, Type::Int | Type::Float) => true,
            (Class::Num, _) => false,
            (Class::Show | Class::Eq, Type::Int | Type::Float | Type::Bool | Type::String | Type::Unit) => true,
            (Class::Show | Class::Eq, Type::Pair(a, b)) => {
                self.push(Pred::Class(k, (**a).clone()), span);
                self.push(Pred::Class(k, (**b).clone()), span);
                true
            }
            (Class::Show | Class::Eq, Type::List(a)) => {
                self.push(Pred::Class(k, (**a).clone()), span);
                true
            }
            (Class::Show | Class::Eq, _) => false,
            (Class::IsRecord, Type::Record(_) | Type::Named(..)) => true,
            (Class::IsRecord, _) => false,
        };
        if !ok {
            let shown = self.show(&st);
            let message = match k {
                Class::Num => format!("`{shown}` is not a numeric type (Num)"),
                Class::Show => format!("values of type `{shown}` cannot be shown (Show)"),
                Class::Eq => format!("values of type `{shown}` cannot be compared (Eq)"),
                Class::IsRecord => {
                    format!("construct needs a pure record-building function, but it returns `{shown}`")
                }
            };
            let kind = if k == Class::IsRecord {
                ErrorKind::Mismatch
            } else {
                ErrorKind::ClassError
            };
            self.fail(kind, span, message);
        }
        true
    }

    pub(crate) fn show(&self, t: &Type) -> String {
        show_types(&[&self.subst.zonk(t)]).remove(0)
    }

    pub(crate) fn show_pair(&self, a: &Type, b: &Type) -> (String, String) {
        let (za, zb) = (self.subst.zonk(a), self.subst.zonk(b));
        let mut v = show_types(&[&za, &zb]);
        let b = v.pop().unwrap();
        (v.pop().unwrap(), b)
    }
}
