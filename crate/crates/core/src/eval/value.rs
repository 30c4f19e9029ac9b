use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::infer::Branch;
use crate::syntax::{Builtin, Expr};
use crate::typesys::{CoercionPlan, Label, Type};

/// Field name to value, in label order.
pub type Fields = BTreeMap<Label, Value>;

/// Local variable bindings as a shared linked list.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

struct EnvNode {
    name: Rc<str>,
    value: Value,
    next: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode {
            name: Rc::from(name),
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if &*node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

pub struct Closure {
    pub params: Rc<[String]>,
    /// How many parameters are already bound in `env`.
    pub applied: usize,
    pub body: Rc<Expr>,
    pub env: Env,
}

/// A builtin waiting for the rest of its arguments.
pub struct Partial {
    pub builtin: Builtin,
    pub args: Vec<Value>,
}

/// A function seen through a coercion: arguments are coerced on the way
/// in and results on the way out.
pub struct Coerced {
    pub inner: Value,
    pub arg: CoercionPlan,
    pub res: CoercionPlan,
}

/// A suspended computation.
pub enum Action {
    /// A `do` block with the environment it closed over.
    Block { body: Rc<Expr>, env: Env },
    Pure(Value),
    /// An effectful builtin applied to all of its arguments.
    Prim(Builtin, Vec<Value>),
    /// Run `inner`, then coerce its result.
    Mapped(Value, CoercionPlan),
}

pub struct DynObj {
    pub full: Value,
    pub ty: Type,
    pub view: Value,
}

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Rc<str>),
    Unit,
    Pair(Rc<(Value, Value)>),
    List(Rc<Vec<Value>>),
    Closure(Rc<Closure>),
    Prim(Rc<Partial>),
    Coerced(Rc<Coerced>),
    Record(Rc<Fields>),
    Ref(usize),
    Action(Rc<Action>),
    /// Tag path from the outermost union, and the untagged payload.
    Union(Rc<[Branch]>, Rc<Value>),
    Nominal(Rc<str>, Rc<Value>),
    Dyn(Rc<DynObj>),
    /// The object under construction. Once the cell is filled it is read
    /// through the coercions in `steps`.
    SelfCell { cell: usize, steps: Rc<[CoercionPlan]> },
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Rc::from(s))
    }

    pub fn record(fields: Fields) -> Value {
        Value::Record(Rc::new(fields))
    }

    pub fn action(a: Action) -> Value {
        Value::Action(Rc::new(a))
    }

    /// Adds `b` in front of the tag path, flattening nested unions.
    pub fn tag(b: Branch, v: Value) -> Value {
        match v {
            Value::Union(path, p) => {
                let mut full = Vec::with_capacity(path.len() + 1);
                full.push(b);
                full.extend_from_slice(&path);
                Value::Union(full.into(), p)
            }
            other => Value::Union(Rc::from([b]), Rc::new(other)),
        }
    }

    /// The value with the first `n` tags removed.
    pub fn untag(path: &[Branch], payload: &Rc<Value>, n: usize) -> Value {
        if path.len() <= n {
            (**payload).clone()
        } else {
            Value::Union(path[n..].into(), payload.clone())
        }
    }

    pub fn some(v: Value) -> Value {
        Value::tag(Branch::Left, v)
    }

    pub fn none() -> Value {
        Value::tag(Branch::Right, Value::Unit)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Unit => "unit",
            Value::Pair(_) => "pair",
            Value::List(_) => "list",
            Value::Closure(_) | Value::Prim(_) | Value::Coerced(_) => "function",
            Value::Record(_) => "record",
            Value::Ref(_) => "reference",
            Value::Action(_) => "action",
            Value::Union(..) => "union value",
            Value::Nominal(..) => "nominal object",
            Value::Dyn(_) => "dynamic object",
            Value::SelfCell { .. } => "self reference",
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Record(fields) => {
                let labels: Vec<&str> = fields.keys().map(Label::as_str).collect();
                write!(f, "<record {{{}}}>", labels.join(", "))
            }
            Value::Union(path, p) => write!(f, "<union {path:?} {p:?}>"),
            Value::Nominal(n, p) => write!(f, "<{n} {p:?}>"),
            Value::Dyn(d) => write!(f, "<dynamic {:?}>", d.view),
            v => match super::show::show_value(v) {
                Some(s) => f.write_str(&s),
                None => write!(f, "<{}>", v.kind_name()),
            },
        }
    }
}
