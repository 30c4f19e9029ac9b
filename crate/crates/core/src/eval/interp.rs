use std::collections::HashMap;
use std::rc::Rc;

use crate::infer::{Branch, Elab, Elaborations};
use crate::syntax::ast::AnnotKind;
use crate::syntax::{BinOp, Builtin, DeclKind, Expr, ExprKind, Lit, NodeId, Program, SourceSpan, Stmt};
use crate::typesys::{CoercionPlan, Label};

use super::show::show_value;
use super::store::Store;
use super::value::{Action, Closure, Coerced, DynObj, Env, Fields, Partial, Value};
use super::{FaultKind, RuntimeFault};

type Eval = Result<Value, RuntimeFault>;

enum Global {
    Value(Value),
    Thunk(Rc<Expr>),
    Forcing,
}

/// A strict evaluator over one [`Store`].
pub struct Interpreter {
    globals: HashMap<String, Global>,
    elabs: Elaborations,
    store: Store,
    bodies: HashMap<NodeId, Rc<Expr>>,
}

impl Interpreter {
    pub fn new(store: Store) -> Interpreter {
        Interpreter {
            globals: HashMap::new(),
            elabs: Elaborations::new(),
            store,
            bodies: HashMap::new(),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn add_elaborations(&mut self, elabs: &Elaborations) {
        self.elabs.extend(elabs.iter().map(|(k, v)| (*k, v.clone())));
    }

    /// Makes every binding of `program` available as a global.
    pub fn load(&mut self, program: &Program, elabs: &Elaborations) {
        self.add_elaborations(elabs);
        for d in &program.decls {
            if let DeclKind::Let { name, params, body } = &d.kind {
                self.define(name, params, body);
            }
        }
    }

    pub fn define(&mut self, name: &str, params: &[String], body: &Expr) {
        let g = if params.is_empty() {
            Global::Thunk(Rc::new(body.clone()))
        } else {
            Global::Value(Value::Closure(Rc::new(Closure {
                params: params.into(),
                applied: 0,
                body: Rc::new(body.clone()),
                env: Env::empty(),
            })))
        };
        self.globals.insert(name.to_string(), g);
    }

    pub fn into_store(self) -> Store {
        self.store
    }

    pub fn define_value(&mut self, name: &str, v: Value) {
        self.globals.insert(name.to_string(), Global::Value(v));
    }

    /// Evaluates the global `main` and runs it. `span` locates faults that
    /// happen outside any statement.
    pub fn run_main(&mut self, span: &SourceSpan) -> Eval {
        let main = self.global("main", span)?;
        let out = self.run(main, span);
        self.store.flush();
        out
    }

    /// Evaluates `e` with only the globals in scope.
    pub fn eval_expr(&mut self, e: &Expr) -> Eval {
        self.eval(e, &Env::empty())
    }

    /// Executes an action and returns its result.
    pub fn run_action(&mut self, v: Value, span: &SourceSpan) -> Eval {
        let out = self.run(v, span);
        self.store.flush();
        out
    }

    fn fault(&self, kind: FaultKind, span: &SourceSpan, message: impl Into<String>) -> RuntimeFault {
        RuntimeFault {
            kind,
            span: span.clone(),
            message: message.into(),
        }
    }

    fn internal(&self, span: &SourceSpan, message: impl Into<String>) -> RuntimeFault {
        self.fault(FaultKind::Internal, span, message)
    }

    fn global(&mut self, name: &str, span: &SourceSpan) -> Eval {
        match self.globals.get(name) {
            Some(Global::Value(v)) => Ok(v.clone()),
            Some(Global::Thunk(body)) => {
                let body = body.clone();
                self.globals.insert(name.to_string(), Global::Forcing);
                match self.eval(&body, &Env::empty()) {
                    Ok(v) => {
                        self.globals.insert(name.to_string(), Global::Value(v.clone()));
                        Ok(v)
                    }
                    Err(f) => {
                        self.globals.insert(name.to_string(), Global::Thunk(body));
                        Err(f)
                    }
                }
            }
            Some(Global::Forcing) => Err(self.internal(span, format!("`{name}` depends on its own value"))),
            None => Err(self.internal(span, format!("unbound name `{name}`"))),
        }
    }

    fn shared(&mut self, e: &Expr) -> Rc<Expr> {
        self.bodies.entry(e.id).or_insert_with(|| Rc::new(e.clone())).clone()
    }

    fn eval(&mut self, e: &Expr, env: &Env) -> Eval {
        let span = &e.span;
        match &e.kind {
            ExprKind::Lit(l) => Ok(match l {
                Lit::Int(n) => match self.elabs.get(&e.id) {
                    Some(Elab::FloatLit) => Value::Float(*n as f64),
                    _ => Value::Int(*n),
                },
                Lit::Float(x) => Value::Float(*x),
                Lit::Str(s) => Value::str(s),
                Lit::Bool(b) => Value::Bool(*b),
                Lit::Unit => Value::Unit,
            }),
            ExprKind::Var(x) => match env.lookup(x) {
                Some(v) => Ok(v.clone()),
                None => self.global(x, span),
            },
            ExprKind::Builtin(b) => self.call_builtin(*b, Vec::new(), span),
            ExprKind::Lam(ps, body) => Ok(Value::Closure(Rc::new(Closure {
                params: ps.as_slice().into(),
                applied: 0,
                body: self.shared(body),
                env: env.clone(),
            }))),
            ExprKind::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(fv, av, span)
            }
            ExprKind::Let(x, e1, e2) => {
                let v = self.eval(e1, env)?;
                self.eval(e2, &env.bind(x, v))
            }
            ExprKind::If(c, a, b) => match self.eval(c, env).and_then(|v| self.resolve(v, span))? {
                Value::Bool(true) => self.eval(a, env),
                Value::Bool(false) => self.eval(b, env),
                v => Err(self.internal(&c.span, format!("condition is a {}", v.kind_name()))),
            },
            ExprKind::Do(_) => Ok(Value::action(Action::Block {
                body: self.shared(e),
                env: env.clone(),
            })),
            ExprKind::Invoke(o, l) => {
                let ov = self.eval(o, env)?;
                self.invoke(&ov, &Label::new(l), span)
            }
            ExprKind::EmptyRecord => Ok(Value::record(Fields::new())),
            ExprKind::Extend(l, v, rest) | ExprKind::Update(l, v, rest) => {
                let vv = self.eval(v, env)?;
                let rv = self.eval(rest, env)?;
                let mut fields = (*self.fields(&rv, span)?).clone();
                fields.insert(Label::new(l), vv);
                Ok(Value::record(fields))
            }
            ExprKind::UnionLeft(a, b) => {
                let av = self.eval(a, env)?;
                let bv = self.eval(b, env)?;
                let left = self.fields(&av, span)?;
                let mut fields = (*self.fields(&bv, span)?).clone();
                fields.extend(left.iter().map(|(l, v)| (l.clone(), v.clone())));
                Ok(Value::record(fields))
            }
            ExprKind::Annot(kind, inner, _) => {
                let v = self.eval(inner, env)?;
                self.annot(e.id, *kind, v, span)
            }
            ExprKind::LubNil | ExprKind::UnionNil => Ok(Value::List(Rc::new(Vec::new()))),
            ExprKind::LubCons(h, t) => {
                let hv = self.eval(h, env)?;
                let tv = self.eval(t, env)?;
                let tail = self.list(&tv, span)?;
                let mut out = Vec::with_capacity(tail.len() + 1);
                match self.elabs.get(&e.id).cloned() {
                    Some(Elab::Project(ls)) => {
                        let plan = CoercionPlan::Project(ls);
                        out.push(self.coerce(&plan, hv, span)?);
                        for x in tail.iter() {
                            out.push(self.coerce(&plan, x.clone(), span)?);
                        }
                    }
                    _ => {
                        out.push(hv);
                        out.extend(tail.iter().cloned());
                    }
                }
                Ok(Value::List(Rc::new(out)))
            }
            ExprKind::UnionCons(h, t) => {
                let hv = self.eval(h, env)?;
                let tv = self.eval(t, env)?;
                let tail = self.list(&tv, span)?;
                if matches!(t.kind, ExprKind::UnionNil) {
                    return Ok(Value::List(Rc::new(vec![hv])));
                }
                let mut out = Vec::with_capacity(tail.len() + 1);
                out.push(Value::tag(Branch::Left, hv));
                out.extend(tail.iter().map(|x| Value::tag(Branch::Right, x.clone())));
                Ok(Value::List(Rc::new(out)))
            }
            ExprKind::Nominate(n, x) => {
                let v = self.eval(x, env)?;
                Ok(Value::Nominal(Rc::from(n.as_str()), Rc::new(v)))
            }
            ExprKind::Anonymize(x) => match self.eval(x, env)? {
                Value::Nominal(_, p) => Ok((*p).clone()),
                v => Err(self.internal(span, format!("anonymize of a {}", v.kind_name()))),
            },
            ExprKind::NUpCast(x, g) => match self.eval(x, env)? {
                Value::Nominal(_, p) => Ok(Value::Nominal(Rc::from(g.as_str()), p)),
                v => Err(self.internal(span, format!("nUpCast of a {}", v.kind_name()))),
            },
            ExprKind::BinOp(op, a, b) => {
                let av = self.eval(a, env)?;
                let bv = self.eval(b, env)?;
                let av = self.resolve(av, span)?;
                let bv = self.resolve(bv, span)?;
                self.binop(*op, av, bv, span)
            }
            ExprKind::Pair(a, b) => {
                let av = self.eval(a, env)?;
                let bv = self.eval(b, env)?;
                Ok(Value::Pair(Rc::new((av, bv))))
            }
            ExprKind::List(es) => {
                let mut out = Vec::with_capacity(es.len());
                for x in es {
                    out.push(self.eval(x, env)?);
                }
                Ok(Value::List(Rc::new(out)))
            }
        }
    }

    fn list(&self, v: &Value, span: &SourceSpan) -> Result<Rc<Vec<Value>>, RuntimeFault> {
        match v {
            Value::List(xs) => Ok(xs.clone()),
            v => Err(self.internal(span, format!("expected a list, found a {}", v.kind_name()))),
        }
    }

    /// The fields of an object, looking through self cells, dynamic views,
    /// nominal wrappers and union tags.
    fn fields(&mut self, v: &Value, span: &SourceSpan) -> Result<Rc<Fields>, RuntimeFault> {
        match v {
            Value::Record(fs) => Ok(fs.clone()),
            Value::SelfCell { .. } => {
                let obj = self.force_self(v, span)?;
                self.fields(&obj, span)
            }
            Value::Dyn(d) => self.fields(&d.view, span),
            Value::Nominal(_, p) | Value::Union(_, p) => self.fields(p, span),
            v => Err(self.internal(span, format!("expected an object, found a {}", v.kind_name()))),
        }
    }

    fn force_self(&mut self, v: &Value, span: &SourceSpan) -> Eval {
        let Value::SelfCell { cell, steps } = v else {
            return Ok(v.clone());
        };
        let Some(mut obj) = self.store.read_cell(*cell) else {
            return Err(self.fault(
                FaultKind::PrematureSelfAccess,
                span,
                "self is used before the object is constructed",
            ));
        };
        for plan in steps.iter() {
            obj = self.coerce(plan, obj, span)?;
        }
        Ok(obj)
    }

    fn invoke(&mut self, o: &Value, l: &Label, span: &SourceSpan) -> Eval {
        let fields = self.fields(o, span)?;
        match fields.get(l) {
            Some(v) => Ok(v.clone()),
            None => Err(self.internal(span, format!("the object has no field `{l}`"))),
        }
    }

    fn annot(&mut self, id: NodeId, kind: AnnotKind, v: Value, span: &SourceSpan) -> Eval {
        let elab = self.elabs.get(&id).cloned();
        match (kind, elab) {
            (AnnotKind::Ascribe, _) => Ok(v),
            (AnnotKind::Narrow, Some(Elab::Project(ls))) => self.coerce(&CoercionPlan::Project(ls), v, span),
            (AnnotKind::DeepNarrow, Some(Elab::Coerce(plan))) => self.coerce(&plan, v, span),
            (AnnotKind::DownCast, Some(Elab::DownCast(path))) => match &v {
                Value::Union(tags, payload) if tags.starts_with(&path) => {
                    Ok(Value::some(Value::untag(tags, payload, path.len())))
                }
                Value::Union(..) => Ok(Value::none()),
                v => Err(self.internal(span, format!("downCast of a {}", v.kind_name()))),
            },
            (AnnotKind::DynUpCast, Some(Elab::DynUp { full, view })) => {
                let projected = self.coerce(&CoercionPlan::Project(view), v.clone(), span)?;
                Ok(Value::Dyn(Rc::new(DynObj {
                    full: v,
                    ty: full,
                    view: projected,
                })))
            }
            (AnnotKind::DynDownCast, Some(Elab::DynDown { target, source })) => Ok(match &v {
                Value::Dyn(d) if d.ty == target => Value::some(d.full.clone()),
                Value::Dyn(_) => Value::none(),
                _ if source == target => Value::some(v),
                _ => Value::none(),
            }),
            (k, _) => Err(self.internal(span, format!("no elaboration for {}", k.keyword()))),
        }
    }

    /// Applies a coercion plan. Self cells stay lazy: the plan is recorded
    /// and applied when the cell is read.
    fn coerce(&mut self, plan: &CoercionPlan, v: Value, span: &SourceSpan) -> Eval {
        match plan {
            CoercionPlan::Identity => Ok(v),
            CoercionPlan::Project(_) | CoercionPlan::PerField(_) => {
                if let Value::SelfCell { cell, steps } = &v {
                    let mut steps = steps.to_vec();
                    steps.push(plan.clone());
                    return Ok(Value::SelfCell {
                        cell: *cell,
                        steps: steps.into(),
                    });
                }
                let fields = self.fields(&v, span)?;
                let mut out = Fields::new();
                match plan {
                    CoercionPlan::Project(ls) => {
                        for l in ls {
                            match fields.get(l) {
                                Some(x) => out.insert(l.clone(), x.clone()),
                                None => return Err(self.internal(span, format!("cannot narrow: no field `{l}`"))),
                            };
                        }
                    }
                    CoercionPlan::PerField(plans) => {
                        for (l, p) in plans {
                            let Some(x) = fields.get(l) else {
                                return Err(self.internal(span, format!("cannot narrow: no field `{l}`")));
                            };
                            out.insert(l.clone(), self.coerce(p, x.clone(), span)?);
                        }
                    }
                    _ => unreachable!(),
                }
                Ok(Value::record(out))
            }
            CoercionPlan::WrapAction(p) => Ok(Value::action(Action::Mapped(v, (**p).clone()))),
            CoercionPlan::WrapFunction(a, r) => Ok(Value::Coerced(Rc::new(Coerced {
                inner: v,
                arg: (**a).clone(),
                res: (**r).clone(),
            }))),
        }
    }

    /// Forces a self reference whose value is about to be inspected.
    fn resolve(&mut self, v: Value, span: &SourceSpan) -> Eval {
        match v {
            Value::SelfCell { .. } => self.force_self(&v, span),
            v => Ok(v),
        }
    }

    fn inspected(b: Builtin) -> &'static [usize] {
        match b {
            Builtin::Show
            | Builtin::Abs
            | Builtin::Fst
            | Builtin::Snd
            | Builtin::ReadRef
            | Builtin::WriteRef
            | Builtin::ModifyRef
            | Builtin::Print
            | Builtin::PutStr
            | Builtin::PutStrLn
            | Builtin::FailIO => &[0],
            Builtin::MapM => &[1],
            Builtin::Maybe => &[2],
            _ => &[],
        }
    }

    fn apply(&mut self, f: Value, a: Value, span: &SourceSpan) -> Eval {
        match self.resolve(f, span)? {
            Value::Closure(c) => {
                let env = c.env.bind(&c.params[c.applied], a);
                if c.applied + 1 == c.params.len() {
                    let body = c.body.clone();
                    self.eval(&body, &env)
                } else {
                    Ok(Value::Closure(Rc::new(Closure {
                        params: c.params.clone(),
                        applied: c.applied + 1,
                        body: c.body.clone(),
                        env,
                    })))
                }
            }
            Value::Prim(p) => {
                let mut args = p.args.clone();
                args.push(a);
                self.call_builtin(p.builtin, args, span)
            }
            Value::Coerced(c) => {
                let a = self.coerce(&c.arg, a, span)?;
                let r = self.apply(c.inner.clone(), a, span)?;
                self.coerce(&c.res, r, span)
            }
            v => Err(self.internal(span, format!("a {} is not a function", v.kind_name()))),
        }
    }

    fn call_builtin(&mut self, b: Builtin, mut args: Vec<Value>, span: &SourceSpan) -> Eval {
        if args.len() < b.arity() {
            return Ok(Value::Prim(Rc::new(Partial { builtin: b, args })));
        }
        for &i in Self::inspected(b) {
            args[i] = self.resolve(args[i].clone(), span)?;
        }
        match b {
            Builtin::Return => Ok(Value::action(Action::Pure(args.pop().unwrap()))),
            Builtin::Show => match show_value(&args[0]) {
                Some(s) => Ok(Value::str(&s)),
                None => Err(self.internal(span, format!("cannot show a {}", args[0].kind_name()))),
            },
            Builtin::Abs => match &args[0] {
                Value::Int(n) => Ok(Value::Int(n.wrapping_abs())),
                Value::Float(x) => Ok(Value::Float(x.abs())),
                v => Err(self.internal(span, format!("abs of a {}", v.kind_name()))),
            },
            Builtin::Fst | Builtin::Snd => match &args[0] {
                Value::Pair(p) => Ok(if b == Builtin::Fst { p.0.clone() } else { p.1.clone() }),
                v => Err(self.internal(span, format!("{} of a {}", b.name(), v.kind_name()))),
            },
            Builtin::Maybe => {
                let opt = args.pop().unwrap();
                let f = args.pop().unwrap();
                let default = args.pop().unwrap();
                match &opt {
                    Value::Union(tags, payload) => match tags[0] {
                        Branch::Left => {
                            let x = Value::untag(tags, payload, 1);
                            self.apply(f, x, span)
                        }
                        Branch::Right => Ok(default),
                    },
                    v => Err(self.internal(span, format!("maybe of a {}", v.kind_name()))),
                }
            }
            _ => Ok(Value::action(Action::Prim(b, args))),
        }
    }

    fn run(&mut self, v: Value, span: &SourceSpan) -> Eval {
        let v = self.resolve(v, span)?;
        let Value::Action(act) = v else {
            return Err(self.internal(span, format!("expected an action, found a {}", v.kind_name())));
        };
        match &*act {
            Action::Pure(x) => Ok(x.clone()),
            Action::Mapped(inner, plan) => {
                let r = self.run(inner.clone(), span)?;
                self.coerce(plan, r, span)
            }
            Action::Prim(b, args) => self.exec(*b, args, span),
            Action::Block { body, env } => {
                let ExprKind::Do(stmts) = &body.kind else {
                    return Err(self.internal(span, "malformed block"));
                };
                let mut env = env.clone();
                let mut last = Value::Unit;
                for s in stmts {
                    let sp = s.span().clone();
                    match s {
                        Stmt::Bind(x, e, _) => {
                            let a = self.eval(e, &env)?;
                            let r = self.run(a, &sp)?;
                            env = env.bind(x, r);
                            last = Value::Unit;
                        }
                        Stmt::Let(x, e, _) => {
                            let v = self.eval(e, &env)?;
                            env = env.bind(x, v);
                            last = Value::Unit;
                        }
                        Stmt::Expr(e) => {
                            let a = self.eval(e, &env)?;
                            last = self.run(a, &sp)?;
                        }
                    }
                }
                Ok(last)
            }
        }
    }

    fn exec(&mut self, b: Builtin, args: &[Value], span: &SourceSpan) -> Eval {
        let mut args = args.to_vec();
        for &i in Self::inspected(b) {
            args[i] = self.resolve(args[i].clone(), span)?;
        }
        match b {
            Builtin::Fix | Builtin::New => {
                let cell = self.store.new_cell();
                let me = Value::SelfCell {
                    cell,
                    steps: Rc::from([]),
                };
                let act = self.apply(args[0].clone(), me, span)?;
                let obj = self.run(act, span)?;
                let obj = self.force_self(&obj, span)?;
                self.store.fill_cell(cell, obj.clone());
                Ok(obj)
            }
            Builtin::Construct => self.apply(args[1].clone(), args[0].clone(), span),
            Builtin::NewRef => Ok(Value::Ref(self.store.new_ref(args[0].clone()))),
            Builtin::ReadRef => match &args[0] {
                Value::Ref(r) => match self.store.read_ref(*r) {
                    Some(v) => Ok(v.clone()),
                    None => Err(self.internal(span, "dangling reference")),
                },
                v => Err(self.internal(span, format!("readRef of a {}", v.kind_name()))),
            },
            Builtin::WriteRef | Builtin::ModifyRef => {
                let Value::Ref(r) = &args[0] else {
                    return Err(self.internal(span, format!("{} of a {}", b.name(), args[0].kind_name())));
                };
                let new = if b == Builtin::WriteRef {
                    args[1].clone()
                } else {
                    let old = self.store.read_ref(*r).cloned().unwrap_or(Value::Unit);
                    self.apply(args[1].clone(), old, span)?
                };
                if !self.store.write_ref(*r, new) {
                    return Err(self.internal(span, "dangling reference"));
                }
                Ok(Value::Unit)
            }
            Builtin::Print => match show_value(&args[0]) {
                Some(s) => {
                    self.store.write(&s);
                    self.store.write("\n");
                    Ok(Value::Unit)
                }
                None => Err(self.internal(span, format!("cannot print a {}", args[0].kind_name()))),
            },
            Builtin::PutStr | Builtin::PutStrLn => match &args[0] {
                Value::Str(s) => {
                    self.store.write(s);
                    if b == Builtin::PutStrLn {
                        self.store.write("\n");
                    }
                    Ok(Value::Unit)
                }
                v => Err(self.internal(span, format!("{} of a {}", b.name(), v.kind_name()))),
            },
            Builtin::MapM => {
                let xs = self.list(&args[1], span)?;
                for x in xs.iter() {
                    let a = self.apply(args[0].clone(), x.clone(), span)?;
                    self.run(a, span)?;
                }
                Ok(Value::Unit)
            }
            Builtin::FailIO => match &args[0] {
                Value::Str(s) => Err(self.fault(FaultKind::UserFail, span, s.to_string())),
                v => Err(self.internal(span, format!("failIO of a {}", v.kind_name()))),
            },
            _ => Err(self.internal(span, format!("`{}` is not an action", b.name()))),
        }
    }

    fn binop(&self, op: BinOp, a: Value, b: Value, span: &SourceSpan) -> Eval {
        if op == BinOp::Eq {
            return match values_equal(&a, &b) {
                Some(eq) => Ok(Value::Bool(eq)),
                None => Err(self.internal(span, format!("cannot compare a {}", a.kind_name()))),
            };
        }
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => Ok(Value::Int(match op {
                BinOp::Add => x.wrapping_add(y),
                BinOp::Sub => x.wrapping_sub(y),
                BinOp::Mul => x.wrapping_mul(y),
                _ => {
                    if y == 0 {
                        return Err(self.fault(FaultKind::DivisionByZero, span, "division by zero"));
                    }
                    floor_div(x, y)
                }
            })),
            (a, b) => {
                let (Some(x), Some(y)) = (as_float(&a), as_float(&b)) else {
                    return Err(self.internal(span, format!("arithmetic on a {}", a.kind_name())));
                };
                Ok(Value::Float(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    _ => x / y,
                }))
            }
        }
    }
}

fn floor_div(x: i64, y: i64) -> i64 {
    let q = x.wrapping_div(y);
    if x.wrapping_rem(y) != 0 && ((x < 0) != (y < 0)) {
        q - 1
    } else {
        q
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Int(n) => Some(*n as f64),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

fn values_equal(a: &Value, b: &Value) -> Option<bool> {
    Some(match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Unit, Value::Unit) => true,
        (Value::Pair(p), Value::Pair(q)) => values_equal(&p.0, &q.0)? && values_equal(&p.1, &q.1)?,
        (Value::List(xs), Value::List(ys)) => {
            if xs.len() != ys.len() {
                return Some(false);
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                if !values_equal(x, y)? {
                    return Some(false);
                }
            }
            true
        }
        _ => as_float(a)? == as_float(b)?,
    })
}
