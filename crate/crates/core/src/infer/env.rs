use std::collections::BTreeMap;

use crate::syntax::TypeExpr;
use crate::typesys::{Label, NominalGraph, Row, Type};

use super::scheme::Scheme;

#[derive(Clone, Debug, PartialEq)]
pub struct TypeDecl {
    pub params: Vec<String>,
    pub body: TypeExpr,
    /// Whether the body mentions the type itself. Recursive types stay
    /// named; the others are expanded where they are used.
    pub recursive: bool,
}

/// Everything the checker knows before looking at a group of bindings.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub schemes: BTreeMap<String, Scheme>,
    pub types: BTreeMap<String, TypeDecl>,
    pub nominal: NominalGraph,
}

fn mentions(t: &TypeExpr, name: &str) -> bool {
    match t {
        TypeExpr::Named(n, args) => n == name || args.iter().any(|a| mentions(a, name)),
        TypeExpr::Int
        | TypeExpr::Float
        | TypeExpr::Bool
        | TypeExpr::String
        | TypeExpr::Unit
        | TypeExpr::Var(_) => false,
        TypeExpr::Io(a)
        | TypeExpr::Ref(a)
        | TypeExpr::NotFixed(a)
        | TypeExpr::List(a)
        | TypeExpr::Nominal(_, a) => mentions(a, name),
        TypeExpr::Fun(a, b) | TypeExpr::Either(a, b) | TypeExpr::Pair(a, b) => {
            mentions(a, name) || mentions(b, name)
        }
        TypeExpr::Record(fs) => fs.iter().any(|(_, t)| mentions(t, name)),
    }
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn declare_type(&mut self, name: &str, params: &[String], body: &TypeExpr) {
        let recursive = mentions(body, name);
        self.types.insert(
            name.to_string(),
            TypeDecl {
                params: params.to_vec(),
                body: body.clone(),
                recursive,
            },
        );
    }

    /// One unfolding of a named type applied to `args`.
    pub fn unfold(&self, name: &str, args: &[Type]) -> Option<Type> {
        let decl = self.types.get(name)?;
        let mut vars: BTreeMap<String, Type> = decl
            .params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect();
        self.convert(&decl.body, &mut vars, &mut || Type::Unit).ok()
    }

    /// Unfolds named types at the head until something structural shows.
    pub fn head_normal(&self, t: &Type) -> Type {
        let mut cur = t.clone();
        for _ in 0..32 {
            match &cur {
                Type::Named(n, args) => match self.unfold(n, args) {
                    Some(u) => cur = u,
                    None => return cur,
                },
                _ => return cur,
            }
        }
        cur
    }

    /// Translates an annotation. Type variables are looked up in `vars`
    /// and created with `fresh` on first sight.
    pub fn convert(
        &self,
        t: &TypeExpr,
        vars: &mut BTreeMap<String, Type>,
        fresh: &mut dyn FnMut() -> Type,
    ) -> Result<Type, String> {
        Ok(match t {
            TypeExpr::Int => Type::Int,
            TypeExpr::Float => Type::Float,
            TypeExpr::Bool => Type::Bool,
            TypeExpr::String => Type::String,
            TypeExpr::Unit => Type::Unit,
            TypeExpr::Io(a) => Type::io(self.convert(a, vars, fresh)?),
            TypeExpr::Ref(a) => Type::reference(self.convert(a, vars, fresh)?),
            TypeExpr::NotFixed(a) => Type::not_fixed(self.convert(a, vars, fresh)?),
            TypeExpr::List(a) => Type::list(self.convert(a, vars, fresh)?),
            TypeExpr::Fun(a, b) => Type::fun(self.convert(a, vars, fresh)?, self.convert(b, vars, fresh)?),
            TypeExpr::Either(a, b) => {
                Type::union(self.convert(a, vars, fresh)?, self.convert(b, vars, fresh)?)
            }
            TypeExpr::Pair(a, b) => Type::pair(self.convert(a, vars, fresh)?, self.convert(b, vars, fresh)?),
            TypeExpr::Nominal(n, a) => {
                if !self.nominal.contains(n) {
                    return Err(format!("unknown nomination `{n}`"));
                }
                Type::nominal(Type::nomination(n), self.convert(a, vars, fresh)?)
            }
            TypeExpr::Record(fs) => {
                let mut pairs = Vec::with_capacity(fs.len());
                for (l, ft) in fs {
                    pairs.push((Label::new(l), self.convert(ft, vars, fresh)?));
                }
                Type::Record(Row::from_pairs(pairs).map_err(|e| e.to_string())?)
            }
            TypeExpr::Var(v) => match vars.get(v) {
                Some(t) => t.clone(),
                None => {
                    let t = fresh();
                    vars.insert(v.clone(), t.clone());
                    t
                }
            },
            TypeExpr::Named(n, args) => {
                let decl = self
                    .types
                    .get(n)
                    .ok_or_else(|| format!("unknown type `{n}`"))?;
                if decl.params.len() != args.len() {
                    return Err(format!(
                        "type `{n}` expects {} argument(s), found {}",
                        decl.params.len(),
                        args.len()
                    ));
                }
                let mut converted = Vec::with_capacity(args.len());
                for a in args {
                    converted.push(self.convert(a, vars, fresh)?);
                }
                if decl.recursive {
                    Type::Named(n.as_str().into(), converted)
                } else {
                    let mut inner: BTreeMap<String, Type> =
                        decl.params.iter().cloned().zip(converted).collect();
                    self.convert(&decl.body, &mut inner, fresh)?
                }
            }
        })
    }
}
