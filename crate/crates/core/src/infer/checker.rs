use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::syntax::{BinOp, Builtin, DeclKind, Expr, ExprKind, Lit, NodeId, Program, SourceSpan, Stmt};
use crate::syntax::ast::AnnotKind;
use crate::typesys::{derive_deep_narrow, Label, Row, TyVar, Type};

use super::elab::{branch_path, Elab, Elaborations};
use super::env::TypeEnv;
use super::error::{ErrorKind, TypeError};
use super::scheme::{show_types, Class, Constraint, Pred, Scheme};
use super::unify::{Subst, UnifyError};

enum Request {
    IntLit(Type),
    Lub(Type),
    Narrow(Type),
    DeepNarrow(Type, Type),
    DownCast(Type, Type),
    DynUp(Type, Type),
    DynDown(Type, Type),
}

/// State for checking one group of mutually dependent bindings.
pub(crate) struct Checker<'e> {
    pub(crate) env: &'e TypeEnv,
    pub(crate) subst: Subst,
    pub(crate) pending: Vec<Constraint>,
    pub(crate) errors: Vec<TypeError>,
    locals: Vec<(String, Type)>,
    group: BTreeMap<String, Type>,
    requests: Vec<(NodeId, Request)>,
}

/// A binding handed to the checker: name, parameters and body.
pub(crate) struct Binding<'a> {
    pub name: &'a str,
    pub params: &'a [String],
    pub body: &'a Expr,
}

impl Binding<'_> {
    /// Bindings that are not functions keep no numeric polymorphism.
    fn is_function(&self) -> bool {
        !self.params.is_empty() || matches!(self.body.kind, ExprKind::Lam(..))
    }
}

pub(crate) struct GroupResult {
    pub schemes: Vec<(String, Scheme)>,
    pub errors: Vec<TypeError>,
    pub elabs: Elaborations,
}

impl<'e> Checker<'e> {
    pub(crate) fn new(env: &'e TypeEnv) -> Checker<'e> {
        Checker {
            env,
            subst: Subst::new(),
            pending: Vec::new(),
            errors: Vec::new(),
            locals: Vec::new(),
            group: BTreeMap::new(),
            requests: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Type {
        self.subst.fresh()
    }

    fn emit(&mut self, pred: Pred, span: &SourceSpan) {
        self.pending.push(Constraint {
            pred,
            span: span.clone(),
        });
    }

    fn error(&mut self, kind: ErrorKind, span: &SourceSpan, message: String) {
        self.errors.push(TypeError::new(kind, span, message));
    }

    /// Unifies and reports failure at `span`; returns whether it worked.
    pub(crate) fn unify_at(&mut self, a: &Type, b: &Type, span: &SourceSpan) -> bool {
        match self.subst.unify(a, b) {
            Ok(()) => true,
            Err(e) => {
                let err = self.unify_error(e, span);
                self.errors.push(err);
                false
            }
        }
    }

    fn unify_error(&self, e: UnifyError, span: &SourceSpan) -> TypeError {
        match e {
            UnifyError::Mismatch(a, b) => {
                let (a, b) = self.show_pair(&a, &b);
                TypeError::new(ErrorKind::Mismatch, span, format!("cannot match `{a}` with `{b}`"))
            }
            UnifyError::Infinite(v, t) => {
                let shown = show_types(&[&Type::Var(v), &t]);
                TypeError::new(
                    ErrorKind::InfiniteType,
                    span,
                    format!("cannot construct the infinite type: {} = {}", shown[0], shown[1]),
                )
            }
            UnifyError::MissingField { label, field, lacks } => {
                let shown = show_types(&[&field, &lacks]);
                TypeError::new(
                    ErrorKind::MissingField,
                    span,
                    format!(
                        "the record `{}` is missing the field {label} : {}",
                        shown[1], shown[0]
                    ),
                )
            }
        }
    }

    fn lookup(&mut self, name: &str, span: &SourceSpan) -> Type {
        if let Some((_, t)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return t.clone();
        }
        if let Some(t) = self.group.get(name) {
            return t.clone();
        }
        if let Some(s) = self.env.schemes.get(name) {
            let (preds, t) = s.instantiate(&mut || self.subst.fresh());
            for p in preds {
                self.emit(p, span);
            }
            return t;
        }
        self.error(ErrorKind::UnboundName, span, format!("unbound name `{name}`"));
        self.fresh()
    }

    fn builtin(&mut self, b: Builtin, span: &SourceSpan) -> Type {
        let a = self.fresh();
        let c = self.fresh();
        match b {
            Builtin::Fix => Type::fun(Type::fun(a.clone(), Type::io(a.clone())), Type::io(a)),
            Builtin::New => Type::fun(
                Type::fun(Type::not_fixed(a.clone()), Type::io(Type::not_fixed(a.clone()))),
                Type::io(a),
            ),
            Builtin::Construct => {
                self.emit(Pred::Class(Class::IsRecord, c.clone()), span);
                Type::funs(
                    [Type::not_fixed(a.clone()), Type::fun(a, c.clone())],
                    Type::io(Type::not_fixed(c)),
                )
            }
            Builtin::Return => Type::fun(a.clone(), Type::io(a)),
            Builtin::NewRef => Type::fun(a.clone(), Type::io(Type::reference(a))),
            Builtin::ReadRef => Type::fun(Type::reference(a.clone()), Type::io(a)),
            Builtin::WriteRef => Type::funs([Type::reference(a.clone()), a], Type::io(Type::Unit)),
            Builtin::ModifyRef => Type::funs(
                [Type::reference(a.clone()), Type::fun(a.clone(), a)],
                Type::io(Type::Unit),
            ),
            Builtin::Print => {
                self.emit(Pred::Class(Class::Show, a.clone()), span);
                Type::fun(a, Type::io(Type::Unit))
            }
            Builtin::PutStr | Builtin::PutStrLn => Type::fun(Type::String, Type::io(Type::Unit)),
            Builtin::Show => {
                self.emit(Pred::Class(Class::Show, a.clone()), span);
                Type::fun(a, Type::String)
            }
            Builtin::Abs => {
                self.emit(Pred::Class(Class::Num, a.clone()), span);
                Type::fun(a.clone(), a)
            }
            Builtin::MapM => Type::funs(
                [Type::fun(a.clone(), Type::io(c)), Type::list(a)],
                Type::io(Type::Unit),
            ),
            Builtin::Maybe => Type::funs(
                [c.clone(), Type::fun(a.clone(), c.clone()), Type::option(a)],
                c,
            ),
            Builtin::FailIO => Type::fun(Type::String, Type::io(a)),
            Builtin::Fst => Type::fun(Type::pair(a.clone(), c), a),
            Builtin::Snd => Type::fun(Type::pair(a, c.clone()), c),
        }
    }

    fn with_locals<T>(&mut self, binds: Vec<(String, Type)>, f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.locals.len();
        self.locals.extend(binds);
        let out = f(self);
        self.locals.truncate(n);
        out
    }

    pub(crate) fn infer(&mut self, e: &Expr) -> Type {
        let span = &e.span;
        match &e.kind {
            ExprKind::Lit(l) => match l {
                Lit::Int(_) => {
                    let a = self.fresh();
                    self.emit(Pred::Class(Class::Num, a.clone()), span);
                    self.requests.push((e.id, Request::IntLit(a.clone())));
                    a
                }
                Lit::Float(_) => Type::Float,
                Lit::Str(_) => Type::String,
                Lit::Bool(_) => Type::Bool,
                Lit::Unit => Type::Unit,
            },
            ExprKind::Var(x) => self.lookup(x, span),
            ExprKind::Builtin(b) => self.builtin(*b, span),
            ExprKind::Lam(ps, body) => {
                let binds: Vec<(String, Type)> = ps.iter().map(|p| (p.clone(), self.fresh())).collect();
                let args: Vec<Type> = binds.iter().map(|(_, t)| t.clone()).collect();
                let tb = self.with_locals(binds, |c| c.infer(body));
                Type::funs(args, tb)
            }
            ExprKind::App(..) => self.infer_app(e),
            ExprKind::Let(x, e1, e2) => {
                let t1 = self.infer(e1);
                self.with_locals(vec![(x.clone(), t1)], |c| c.infer(e2))
            }
            ExprKind::If(c, a, b) => {
                let tc = self.infer(c);
                self.unify_at(&tc, &Type::Bool, &c.span);
                let ta = self.infer(a);
                let tb = self.infer(b);
                self.unify_at(&ta, &tb, &b.span);
                ta
            }
            ExprKind::Do(stmts) => self.infer_do(stmts),
            ExprKind::Invoke(o, l) => {
                let to = self.infer(o);
                let v = self.fresh();
                self.emit(Pred::HasField(Label::new(l), to, v.clone()), span);
                v
            }
            ExprKind::EmptyRecord => Type::Record(Row::empty()),
            ExprKind::Extend(l, v, rest) => {
                let tv = self.infer(v);
                let tr = self.infer(rest);
                let l = Label::new(l);
                let r = self.fresh();
                self.emit(Pred::Lacks(l.clone(), tr.clone()), span);
                self.emit(Pred::Extend(l, tv, tr, r.clone()), span);
                r
            }
            ExprKind::Update(l, v, rest) => {
                let tv = self.infer(v);
                let tr = self.infer(rest);
                self.emit(Pred::HasField(Label::new(l), tr.clone(), tv), span);
                tr
            }
            ExprKind::UnionLeft(a, b) => {
                let ta = self.infer(a);
                let tb = self.infer(b);
                let r = self.fresh();
                self.emit(Pred::LeftUnion(ta, tb, r.clone()), span);
                r
            }
            ExprKind::Annot(kind, inner, te) => {
                let ti = self.infer(inner);
                let env = self.env;
                let mut vars = BTreeMap::new();
                let t = match env.convert(te, &mut vars, &mut || self.subst.fresh()) {
                    Ok(t) => t,
                    Err(m) => {
                        self.error(ErrorKind::UnboundName, span, m);
                        return self.fresh();
                    }
                };
                self.infer_annot(e.id, *kind, ti, t, span)
            }
            ExprKind::LubNil | ExprKind::UnionNil => Type::list(self.fresh()),
            ExprKind::LubCons(h, t) => {
                let th = self.infer(h);
                let tt = self.infer(t);
                if matches!(t.kind, ExprKind::LubNil) {
                    self.unify_at(&tt, &Type::list(th.clone()), &t.span);
                    return Type::list(th);
                }
                let el = self.fresh();
                self.unify_at(&tt, &Type::list(el.clone()), &t.span);
                let r = self.fresh();
                self.emit(Pred::LubCons(th, el, r.clone()), span);
                self.requests.push((e.id, Request::Lub(r.clone())));
                Type::list(r)
            }
            ExprKind::UnionCons(h, t) => {
                let th = self.infer(h);
                let tt = self.infer(t);
                if matches!(t.kind, ExprKind::UnionNil) {
                    self.unify_at(&tt, &Type::list(th.clone()), &t.span);
                    return Type::list(th);
                }
                let el = self.fresh();
                self.unify_at(&tt, &Type::list(el.clone()), &t.span);
                Type::list(Type::union(th, el))
            }
            ExprKind::Nominate(n, x) => {
                let tx = self.infer(x);
                self.check_nomination(n, span);
                Type::nominal(Type::nomination(n), tx)
            }
            ExprKind::Anonymize(x) => {
                let tx = self.infer(x);
                let (f, y) = (self.fresh(), self.fresh());
                self.unify_at(&tx, &Type::nominal(f, y.clone()), &x.span);
                y
            }
            ExprKind::NUpCast(x, g) => {
                let tx = self.infer(x);
                self.check_nomination(g, span);
                let (f, y) = (self.fresh(), self.fresh());
                self.unify_at(&tx, &Type::nominal(f.clone(), y.clone()), &x.span);
                self.emit(Pred::AncestorOf(f, g.clone()), span);
                Type::nominal(Type::nomination(g), y)
            }
            ExprKind::BinOp(op, a, b) => {
                let ta = self.infer(a);
                let tb = self.infer(b);
                self.unify_at(&ta, &tb, &b.span);
                match op {
                    BinOp::Eq => {
                        self.emit(Pred::Class(Class::Eq, ta), span);
                        Type::Bool
                    }
                    _ => {
                        self.emit(Pred::Class(Class::Num, ta.clone()), span);
                        ta
                    }
                }
            }
            ExprKind::Pair(a, b) => {
                let ta = self.infer(a);
                let tb = self.infer(b);
                Type::pair(ta, tb)
            }
            ExprKind::List(es) => {
                let a = self.fresh();
                for x in es {
                    let tx = self.infer(x);
                    self.unify_at(&a, &tx, &x.span);
                }
                Type::list(a)
            }
        }
    }

    fn check_nomination(&mut self, n: &str, span: &SourceSpan) {
        if !self.env.nominal.contains(n) {
            self.error(ErrorKind::UnboundName, span, format!("unknown nomination `{n}`"));
        }
    }

    fn infer_annot(&mut self, id: NodeId, kind: AnnotKind, ti: Type, t: Type, span: &SourceSpan) -> Type {
        match kind {
            AnnotKind::Ascribe => {
                let recursive = match &t {
                    Type::Named(n, _) => self.env.types.get(&**n).is_some_and(|d| d.recursive),
                    _ => false,
                };
                if recursive {
                    self.emit(Pred::Fold(ti, t.clone()), span);
                } else {
                    self.unify_at(&ti, &t, span);
                }
                t
            }
            AnnotKind::Narrow => {
                self.emit(Pred::Narrowable(ti, t.clone()), span);
                self.requests.push((id, Request::Narrow(t.clone())));
                t
            }
            AnnotKind::DeepNarrow => {
                self.emit(Pred::DeepNarrowable(ti.clone(), t.clone()), span);
                self.requests.push((id, Request::DeepNarrow(ti, t.clone())));
                t
            }
            AnnotKind::DownCast => {
                self.emit(Pred::DownCastable(ti.clone(), t.clone()), span);
                self.requests.push((id, Request::DownCast(ti, t.clone())));
                Type::option(t)
            }
            AnnotKind::DynUpCast => {
                self.emit(Pred::DynCastPair(ti.clone(), t.clone()), span);
                self.requests.push((id, Request::DynUp(ti, t.clone())));
                t
            }
            AnnotKind::DynDownCast => {
                self.emit(Pred::DynCastPair(t.clone(), ti.clone()), span);
                self.requests.push((id, Request::DynDown(t.clone(), ti)));
                Type::option(t)
            }
        }
    }

    fn infer_app(&mut self, e: &Expr) -> Type {
        let mut args = Vec::new();
        let mut head = e;
        while let ExprKind::App(f, a) = &head.kind {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        let mut tf = match &head.kind {
            ExprKind::Builtin(b @ (Builtin::Fix | Builtin::New)) => {
                let g = args.remove(0);
                self.infer_fix(*b, g, &head.span.to(&g.span))
            }
            _ => self.infer(head),
        };
        for a in args {
            let ta = self.infer(a);
            let r = self.fresh();
            match self.subst.shallow(&tf) {
                Type::Fun(p, q) => {
                    self.unify_at(&p, &ta, &a.span);
                    self.unify_at(&q, &r, &a.span);
                }
                other => {
                    if !matches!(other, Type::Var(_)) {
                        let shown = self.show(&other);
                        self.error(
                            ErrorKind::Mismatch,
                            &a.span,
                            format!("a value of type `{shown}` is applied to an argument but is not a function"),
                        );
                    } else {
                        self.unify_at(&tf, &Type::fun(ta, r.clone()), &a.span);
                    }
                }
            }
            tf = r;
        }
        tf
    }

    /// `fix g` and `new g`: ties the knot after checking that everything
    /// the generator asks of `self` is present in what it builds.
    fn infer_fix(&mut self, b: Builtin, g: &Expr, span: &SourceSpan) -> Type {
        let tg = self.infer(g);
        let (s, p) = (self.fresh(), self.fresh());
        let expected = match b {
            Builtin::Fix => Type::fun(s.clone(), Type::io(p.clone())),
            _ => Type::fun(Type::not_fixed(s.clone()), Type::io(Type::not_fixed(p.clone()))),
        };
        if self.unify_at(&expected, &tg, &g.span) {
            self.solve();
            self.check_instantiable(&s, &p, span);
            self.unify_at(&s, &p, span);
        }
        Type::io(p)
    }

    fn check_instantiable(&mut self, s: &Type, p: &Type, span: &SourceSpan) {
        let missing = self.missing_for_self(s, p);
        if !missing.is_empty() {
            let list: Vec<String> = missing.iter().map(|(l, t)| format!("{l} : {t}")).collect();
            self.error(
                ErrorKind::AbstractUse,
                span,
                format!(
                    "cannot instantiate an abstract generator: self needs {}, which the constructed object does not define",
                    list.join(", ")
                ),
            );
        }
    }

    /// Fields demanded of the self type `s`, by invocation or by a
    /// narrowing constraint, that the produced record `p` lacks. The
    /// demanding constraints are dropped.
    pub(crate) fn missing_for_self(&mut self, s: &Type, p: &Type) -> Vec<(Label, String)> {
        let Type::Var(sv) = self.subst.shallow(s) else {
            return Vec::new();
        };
        let Type::Record(row) = self.head(p) else {
            return Vec::new();
        };
        let mut missing: Vec<(Label, Type)> = Vec::new();
        let work = std::mem::take(&mut self.pending);
        for c in work {
            let lacking = match &c.pred {
                Pred::HasField(l, subj, v) if self.subst.shallow(subj) == Type::Var(sv) => {
                    (!row.contains(l)).then(|| vec![(l.clone(), v.clone())])
                }
                Pred::Narrowable(subj, t) if self.subst.shallow(subj) == Type::Var(sv) => {
                    match self.head(t) {
                        Type::Record(want) => {
                            let gone: Vec<(Label, Type)> = want
                                .iter()
                                .filter(|(l, _)| !row.contains(l))
                                .map(|(l, t)| (l.clone(), t.clone()))
                                .collect();
                            (!gone.is_empty()).then_some(gone)
                        }
                        _ => None,
                    }
                }
                _ => None,
            };
            match lacking {
                Some(ls) => {
                    for (l, t) in ls {
                        if !missing.iter().any(|(m, _)| *m == l) {
                            missing.push((l, t));
                        }
                    }
                }
                None => self.pending.push(c),
            }
        }
        let zonked: Vec<Type> = missing.iter().map(|(_, t)| self.subst.zonk(t)).collect();
        let shown = show_types(&zonked.iter().collect::<Vec<_>>());
        missing.into_iter().map(|(l, _)| l).zip(shown).collect()
    }

    fn infer_do(&mut self, stmts: &[Stmt]) -> Type {
        let n = self.locals.len();
        let mut result = Type::io(Type::Unit);
        for (i, st) in stmts.iter().enumerate() {
            match st {
                Stmt::Bind(x, e, _) => {
                    let te = self.infer(e);
                    let a = self.fresh();
                    self.unify_at(&te, &Type::io(a.clone()), &e.span);
                    self.locals.push((x.clone(), a));
                }
                Stmt::Let(x, e, _) => {
                    let te = self.infer(e);
                    self.locals.push((x.clone(), te));
                }
                Stmt::Expr(e) => {
                    let te = self.infer(e);
                    let a = self.fresh();
                    self.unify_at(&te, &Type::io(a.clone()), &e.span);
                    if i + 1 == stmts.len() {
                        result = Type::io(a);
                    }
                }
            }
        }
        self.locals.truncate(n);
        result
    }

    /// Variables reachable from `roots` through pending constraints.
    fn reachable(&self, roots: &[Type]) -> BTreeSet<TyVar> {
        let mut seen = BTreeSet::new();
        for t in roots {
            self.subst.zonk(t).collect_vars(&mut seen);
        }
        let preds: Vec<BTreeSet<TyVar>> = self
            .pending
            .iter()
            .map(|c| c.pred.map_types(&mut |t| self.subst.zonk(t)).free_vars())
            .collect();
        loop {
            let before = seen.len();
            for vs in &preds {
                if vs.iter().any(|v| seen.contains(v)) {
                    seen.extend(vs.iter().copied());
                }
            }
            if seen.len() == before {
                return seen;
            }
        }
    }

    /// Picks `Int` for numeric variables that cannot be generalized and
    /// `()` for unreachable variables that only need Show or Eq.
    fn default_classes(&mut self, fun_roots: &[Type], all_roots: &[Type]) -> bool {
        let in_fun = self.reachable(fun_roots);
        let in_any = self.reachable(all_roots);
        let mut changed = false;
        for pass in [Class::Num, Class::Show] {
            let candidates: Vec<(Class, Type)> = self
                .pending
                .iter()
                .filter_map(|c| match &c.pred {
                    Pred::Class(k, t) => Some((*k, t.clone())),
                    _ => None,
                })
                .collect();
            for (k, t) in candidates {
                let Type::Var(v) = self.subst.shallow(&t) else {
                    continue;
                };
                match (pass, k) {
                    (Class::Num, Class::Num) if !in_fun.contains(&v) => {
                        self.subst.bind(v, Type::Int);
                        changed = true;
                    }
                    (Class::Show, Class::Show | Class::Eq) if !in_any.contains(&v) => {
                        self.subst.bind(v, Type::Unit);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        changed
    }

    /// An unknown type ascribed to a recursive named type is taken to be
    /// the named type itself.
    fn default_folds(&mut self) -> bool {
        let work = std::mem::take(&mut self.pending);
        let mut changed = false;
        for c in work {
            match &c.pred {
                Pred::Fold(a, n) if matches!(self.subst.shallow(a), Type::Var(_)) => {
                    self.unify_at(a, n, &c.span);
                    changed = true;
                }
                _ => self.pending.push(c),
            }
        }
        changed
    }

    /// Reports constraints that can no longer be solved or generalized.
    fn report_residuals(&mut self, roots: &[Type]) {
        let reach = self.reachable(roots);
        let work = std::mem::take(&mut self.pending);
        for c in work {
            let pred = c.pred.map_types(&mut |t| self.subst.zonk(t));
            let dangling = pred.free_vars().is_disjoint(&reach);
            if pred.needs_ground() {
                let what = match &pred {
                    Pred::LeftUnion(..) => "the operands of `.<++.` must have known record types".to_string(),
                    Pred::LubCons(..) => "the elements of `lubCons` must have known record types".to_string(),
                    Pred::DeepNarrowable(s, _) => {
                        format!("`deepNarrow` needs a fully known source type, found `{}`", self.show(s))
                    }
                    Pred::DownCastable(u, _) => {
                        format!("`downCast` needs a fully known union type, found `{}`", self.show(u))
                    }
                    _ => "a dynamic cast needs a fully known record type".to_string(),
                };
                self.error(ErrorKind::AmbiguousRow, &c.span, what);
            } else if dangling {
                if !matches!(pred, Pred::Class(..)) {
                    let shown = pred.display_with(&|v| format!("t{v}"));
                    self.error(
                        ErrorKind::AmbiguousRow,
                        &c.span,
                        format!("cannot resolve `{shown}`: the record type is never determined"),
                    );
                }
            } else {
                self.pending.push(c);
            }
        }
    }

    fn generalize(&self, t: &Type) -> Scheme {
        let ty = self.subst.zonk(t);
        let reach = self.reachable(std::slice::from_ref(&ty));
        let mut preds: Vec<Pred> = Vec::new();
        for c in &self.pending {
            let p = c.pred.map_types(&mut |t| self.subst.zonk(t));
            if !p.free_vars().is_disjoint(&reach) && !preds.contains(&p) {
                preds.push(p);
            }
        }
        Scheme {
            vars: reach.into_iter().collect(),
            preds,
            ty,
        }
    }

    fn elaborations(&self) -> Elaborations {
        let mut out = Elaborations::new();
        let labels = |t: &Type| match self.env.head_normal(&self.subst.zonk(t)) {
            Type::Record(r) => Some(r.labels()),
            _ => None,
        };
        for (id, req) in &self.requests {
            let elab = match req {
                Request::IntLit(t) => (self.subst.zonk(t) == Type::Float).then_some(Elab::FloatLit),
                Request::Lub(t) | Request::Narrow(t) => labels(t).map(Elab::Project),
                Request::DeepNarrow(s, t) => {
                    let s = self.env.head_normal(&self.subst.zonk(s));
                    let t = self.env.head_normal(&self.subst.zonk(t));
                    derive_deep_narrow(&s, &t).ok().map(Elab::Coerce)
                }
                Request::DownCast(u, t) => {
                    branch_path(&self.subst.zonk(u), &self.subst.zonk(t)).map(Elab::DownCast)
                }
                Request::DynUp(s, t) => labels(t).map(|view| Elab::DynUp {
                    full: self.subst.zonk(s),
                    view,
                }),
                Request::DynDown(t, s) => Some(Elab::DynDown {
                    target: self.subst.zonk(t),
                    source: self.subst.zonk(s),
                }),
            };
            if let Some(x) = elab {
                out.insert(*id, x);
            }
        }
        out
    }

    /// Infers, solves and generalizes one group of bindings.
    pub(crate) fn check_group(env: &TypeEnv, bindings: &[Binding<'_>]) -> GroupResult {
        let mut ck = Checker::new(env);
        let monos: Vec<Type> = bindings.iter().map(|_| ck.fresh()).collect();
        for (b, m) in bindings.iter().zip(&monos) {
            ck.group.insert(b.name.to_string(), m.clone());
        }
        for (b, m) in bindings.iter().zip(&monos) {
            let binds: Vec<(String, Type)> = b.params.iter().map(|p| (p.clone(), ck.fresh())).collect();
            let args: Vec<Type> = binds.iter().map(|(_, t)| t.clone()).collect();
            let tb = ck.with_locals(binds, |c| c.infer(b.body));
            ck.unify_at(m, &Type::funs(args, tb), &b.body.span);
        }
        let fun_roots: Vec<Type> = bindings
            .iter()
            .zip(&monos)
            .filter(|(b, _)| b.is_function())
            .map(|(_, m)| m.clone())
            .collect();
        ck.solve();
        for _ in 0..4 {
            if !ck.default_classes(&fun_roots, &monos) && !ck.default_folds() {
                break;
            }
            ck.solve();
        }
        if ck.errors.is_empty() {
            ck.report_residuals(&monos);
        }
        let ok = ck.errors.is_empty();
        let schemes = bindings
            .iter()
            .zip(&monos)
            .map(|(b, m)| {
                let s = if ok { ck.generalize(m) } else { Scheme::any() };
                (b.name.to_string(), s)
            })
            .collect();
        GroupResult {
            schemes,
            elabs: if ok { ck.elaborations() } else { Elaborations::new() },
            errors: ck.errors,
        }
    }
}

/// Names used by `e` that are not bound inside it.
pub(crate) fn free_names(e: &Expr, out: &mut BTreeSet<String>) {
    fn go(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match &e.kind {
            ExprKind::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            ExprKind::Lam(ps, b) => {
                let n = bound.len();
                bound.extend(ps.iter().cloned());
                go(b, bound, out);
                bound.truncate(n);
            }
            ExprKind::Let(x, e1, e2) => {
                go(e1, bound, out);
                bound.push(x.clone());
                go(e2, bound, out);
                bound.pop();
            }
            ExprKind::Do(stmts) => {
                let n = bound.len();
                for st in stmts {
                    match st {
                        Stmt::Bind(x, e, _) | Stmt::Let(x, e, _) => {
                            go(e, bound, out);
                            bound.push(x.clone());
                        }
                        Stmt::Expr(e) => go(e, bound, out),
                    }
                }
                bound.truncate(n);
            }
            ExprKind::Lit(_)
            | ExprKind::Builtin(_)
            | ExprKind::EmptyRecord
            | ExprKind::LubNil
            | ExprKind::UnionNil => {}
            ExprKind::Invoke(a, _)
            | ExprKind::Annot(_, a, _)
            | ExprKind::Nominate(_, a)
            | ExprKind::Anonymize(a)
            | ExprKind::NUpCast(a, _) => go(a, bound, out),
            ExprKind::App(a, b)
            | ExprKind::Extend(_, a, b)
            | ExprKind::Update(_, a, b)
            | ExprKind::UnionLeft(a, b)
            | ExprKind::LubCons(a, b)
            | ExprKind::UnionCons(a, b)
            | ExprKind::BinOp(_, a, b)
            | ExprKind::Pair(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            ExprKind::If(a, b, c) => {
                go(a, bound, out);
                go(b, bound, out);
                go(c, bound, out);
            }
            ExprKind::List(es) => {
                for x in es {
                    go(x, bound, out);
                }
            }
        }
    }
    go(e, &mut Vec::new(), out)
}

/// The result of checking a program against an environment.
#[derive(Clone, Debug, Default)]
pub struct CheckOutput {
    /// Top-level bindings in source order.
    pub schemes: Vec<(String, Scheme)>,
    /// Sorted by position.
    pub errors: Vec<TypeError>,
    pub elabs: Elaborations,
}

/// Checks every declaration of `program`, adding its nominations, types
/// and binding schemes to `env`.
pub fn check_program(program: &Program, env: &mut TypeEnv) -> CheckOutput {
    let mut lets = Vec::new();
    for d in &program.decls {
        match &d.kind {
            DeclKind::Label(_) => {}
            DeclKind::Nominal { name, parents } => {
                if !env.nominal.contains(name) {
                    let _ = env.nominal.declare(name, parents);
                }
            }
            DeclKind::Type { name, params, body } => env.declare_type(name, params, body),
            DeclKind::Let { name, params, body } => lets.push(Binding { name, params, body }),
        }
    }
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..lets.len()).map(|i| graph.add_node(i)).collect();
    let index: BTreeMap<&str, usize> = lets.iter().enumerate().map(|(i, b)| (b.name, i)).collect();
    for (i, b) in lets.iter().enumerate() {
        let mut names = BTreeSet::new();
        free_names(b.body, &mut names);
        for n in names {
            if b.params.contains(&n) {
                continue;
            }
            if let Some(&j) = index.get(n.as_str()) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut out = CheckOutput::default();
    let mut found: BTreeMap<String, Scheme> = BTreeMap::new();
    for scc in tarjan_scc(&graph) {
        let mut members: Vec<usize> = scc.iter().map(|n| graph[*n]).collect();
        members.sort_unstable();
        let group: Vec<Binding<'_>> = members
            .iter()
            .map(|&i| Binding {
                name: lets[i].name,
                params: lets[i].params,
                body: lets[i].body,
            })
            .collect();
        let res = Checker::check_group(env, &group);
        for (n, s) in res.schemes {
            env.schemes.insert(n.clone(), s.clone());
            found.insert(n, s);
        }
        out.errors.extend(res.errors);
        out.elabs.extend(res.elabs);
    }
    out.schemes = lets
        .iter()
        .map(|b| (b.name.to_string(), found[b.name].clone()))
        .collect();
    out.errors
        .sort_by(|a, b| (&a.span.file, a.span.offset).cmp(&(&b.span.file, b.span.offset)));
    out
}

/// Checks a standalone expression, as typed at the REPL.
pub fn check_expr(e: &Expr, env: &TypeEnv) -> Result<(Scheme, Elaborations), Vec<TypeError>> {
    let b = Binding {
        name: "it",
        params: &[],
        body: e,
    };
    let mut res = Checker::check_group(env, std::slice::from_ref(&b));
    if res.errors.is_empty() {
        Ok((res.schemes.remove(0).1, res.elabs))
    } else {
        Err(res.errors)
    }
}

/// Whole-program inference from an empty environment.
pub fn infer_program(program: &Program) -> Result<BTreeMap<String, Scheme>, Vec<TypeError>> {
    let mut env = TypeEnv::new();
    let out = check_program(program, &mut env);
    if out.errors.is_empty() {
        Ok(out.schemes.into_iter().collect())
    } else {
        Err(out.errors)
    }
}

/// The raw type of `e` and the constraints it generates, before solving.
pub fn infer_expr(env: &TypeEnv, e: &Expr) -> (Type, Vec<Constraint>) {
    let mut ck = Checker::new(env);
    let t = ck.infer(e);
    let cs = ck
        .pending
        .iter()
        .map(|c| Constraint {
            pred: c.pred.map_types(&mut |t| ck.subst.zonk(t)),
            span: c.span.clone(),
        })
        .collect();
    (ck.subst.zonk(&t), cs)
}
