use crate::typesys::{Label, Row, TyVar, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyError {
    Mismatch(Type, Type),
    Infinite(TyVar, Type),
    /// Two records disagree on `label`, which `lacks` does not have.
    MissingField { label: Label, field: Type, lacks: Type },
}

/// Variable bindings, grown one fresh variable at a time.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    slots: Vec<Option<Type>>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn fresh_var(&mut self) -> TyVar {
        self.slots.push(None);
        (self.slots.len() - 1) as TyVar
    }

    pub fn fresh(&mut self) -> Type {
        Type::Var(self.fresh_var())
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn lookup(&self, v: TyVar) -> Option<&Type> {
        self.slots.get(v as usize).and_then(Option::as_ref)
    }

    /// Follows variable bindings at the head only.
    pub fn shallow(&self, t: &Type) -> Type {
        let mut cur = t;
        while let Type::Var(v) = cur {
            match self.lookup(*v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.clone()
    }

    /// Applies the substitution everywhere.
    pub fn zonk(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.lookup(*v) {
                Some(u) => self.zonk(u),
                None => t.clone(),
            },
            _ => t.map_children(&mut |c| self.zonk(c)),
        }
    }

    pub fn bind(&mut self, v: TyVar, t: Type) {
        let i = v as usize;
        if i >= self.slots.len() {
            self.slots.resize(i + 1, None);
        }
        self.slots[i] = Some(t);
    }

    pub fn unify(&mut self, a: &Type, b: &Type) -> Result<(), UnifyError> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), _) => self.bind_checked(*x, &b),
            (_, Type::Var(y)) => self.bind_checked(*y, &a),
            (Type::Int, Type::Int)
            | (Type::Float, Type::Float)
            | (Type::Bool, Type::Bool)
            | (Type::String, Type::String)
            | (Type::Unit, Type::Unit) => Ok(()),
            (Type::Nomination(m), Type::Nomination(n)) if m == n => Ok(()),
            (Type::List(x), Type::List(y))
            | (Type::Action(x), Type::Action(y))
            | (Type::Ref(x), Type::Ref(y))
            | (Type::NotFixed(x), Type::NotFixed(y)) => self.unify(x, y),
            (Type::Pair(x1, x2), Type::Pair(y1, y2))
            | (Type::Fun(x1, x2), Type::Fun(y1, y2))
            | (Type::Union(x1, x2), Type::Union(y1, y2))
            | (Type::Nominal(x1, x2), Type::Nominal(y1, y2)) => {
                self.unify(x1, y1)?;
                self.unify(x2, y2)
            }
            (Type::Named(m, xs), Type::Named(n, ys)) if m == n && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Type::Record(r), Type::Record(s)) => self.unify_rows(&a, r, &b, s),
            _ => Err(UnifyError::Mismatch(self.zonk(&a), self.zonk(&b))),
        }
    }

    fn unify_rows(&mut self, a: &Type, r: &Row, b: &Type, s: &Row) -> Result<(), UnifyError> {
        let missing = r
            .iter()
            .find(|(l, _)| !s.contains(l))
            .map(|(l, t)| (l, t, b))
            .or_else(|| s.iter().find(|(l, _)| !r.contains(l)).map(|(l, t)| (l, t, a)));
        if let Some((l, t, lacks)) = missing {
            return Err(UnifyError::MissingField {
                label: l.clone(),
                field: self.zonk(t),
                lacks: self.zonk(lacks),
            });
        }
        for ((_, x), (_, y)) in r.iter().zip(s.iter()) {
            self.unify(x, y)?;
        }
        Ok(())
    }

    fn bind_checked(&mut self, v: TyVar, t: &Type) -> Result<(), UnifyError> {
        let t = self.zonk(t);
        if t.occurs(v) {
            return Err(UnifyError::Infinite(v, t));
        }
        self.bind(v, t);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_to_int() {
        let mut s = Subst::new();
        let a = s.fresh();
        s.unify(&a, &Type::Int).unwrap();
        assert_eq!(s.zonk(&a), Type::Int);
    }

    #[test]
    fn congruence() {
        let mut s = Subst::new();
        let a = s.fresh();
        s.unify(&Type::io(a.clone()), &Type::io(Type::Int)).unwrap();
        assert_eq!(s.zonk(&a), Type::Int);
    }

    #[test]
    fn occurs_check() {
        let mut s = Subst::new();
        let a = s.fresh();
        let rec = Type::Record(Row::from_pairs([(Label::new("me"), a.clone())]).unwrap());
        assert!(matches!(s.unify(&a, &rec), Err(UnifyError::Infinite(0, _))));
    }

    #[test]
    fn rows_must_agree() {
        let mut s = Subst::new();
        let r = Type::Record(Row::from_pairs([(Label::new("x"), Type::Int)]).unwrap());
        let t = Type::Record(
            Row::from_pairs([(Label::new("x"), Type::Int), (Label::new("y"), Type::Int)]).unwrap(),
        );
        match s.unify(&r, &t) {
            Err(UnifyError::MissingField { label, .. }) => assert_eq!(label.as_str(), "y"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn named_types_are_nominal() {
        let mut s = Subst::new();
        let n = Type::Named("ListObj".into(), vec![Type::Int]);
        assert!(s.unify(&n, &n.clone()).is_ok());
        assert!(s.unify(&n, &Type::Int).is_err());
    }
}
