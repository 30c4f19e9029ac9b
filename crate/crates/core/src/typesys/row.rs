//! Label rows and the width algebra over them.

use std::collections::BTreeSet;
use std::fmt;

use super::types::{Label, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash, thiserror::Error)]
pub enum RowError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(Label),
    #[error("missing label `{0}`")]
    MissingLabel(Label),
    #[error("label `{0}` has different types in the two rows")]
    FieldTypeClash(Label),
}

/// Label to type map with unique labels, kept sorted by label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Row {
    entries: Vec<(Label, Type)>,
}

impl Row {
    pub fn empty() -> Row {
        Row::default()
    }

    /// Builds a row from pairs in any order, rejecting repeated labels.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Type)>) -> Result<Row, RowError> {
        let mut entries: Vec<(Label, Type)> = pairs.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(RowError::DuplicateLabel(w[0].0.clone()));
            }
        }
        Ok(Row { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Type)> {
        self.entries.iter().map(|(l, t)| (l, t))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.entries.iter().map(|(l, _)| l.clone()).collect()
    }

    fn position(&self, l: &Label) -> Result<usize, usize> {
        self.entries.binary_search_by(|(m, _)| m.cmp(l))
    }

    pub fn get(&self, l: &Label) -> Option<&Type> {
        self.position(l).ok().map(|i| &self.entries[i].1)
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.position(l).is_ok()
    }

    pub fn map_types(&self, mut f: impl FnMut(&Type) -> Type) -> Row {
        Row {
            entries: self.entries.iter().map(|(l, t)| (l.clone(), f(t))).collect(),
        }
    }

    /// Removes `l` if present.
    pub fn without(&self, l: &Label) -> Row {
        Row {
            entries: self.entries.iter().filter(|(m, _)| m != l).cloned().collect(),
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Type::Record(self.clone()))
    }
}

/// `row` plus `l : t`.
pub fn row_extend(row: &Row, l: Label, t: Type) -> Result<Row, RowError> {
    match row.position(&l) {
        Ok(_) => Err(RowError::DuplicateLabel(l)),
        Err(i) => {
            let mut entries = row.entries.clone();
            entries.insert(i, (l, t));
            Ok(Row { entries })
        }
    }
}

/// Replaces the entry for `l`. Whether the new type agrees with the old
/// one is for the caller to check.
pub fn row_update(row: &Row, l: Label, t: Type) -> Result<Row, RowError> {
    match row.position(&l) {
        Ok(i) => {
            let mut entries = row.entries.clone();
            entries[i].1 = t;
            Ok(Row { entries })
        }
        Err(_) => Err(RowError::MissingLabel(l)),
    }
}

/// All of `a`, plus the entries of `b` whose labels `a` lacks.
pub fn row_union_left(a: &Row, b: &Row) -> Row {
    let mut entries = a.entries.clone();
    entries.extend(b.entries.iter().filter(|(l, _)| !a.contains(l)).cloned());
    entries.sort_by(|x, y| x.0.cmp(&y.0));
    Row { entries }
}

pub fn row_intersect(a: &Row, b: &Row) -> BTreeSet<Label> {
    a.entries
        .iter()
        .filter(|(l, _)| b.contains(l))
        .map(|(l, _)| l.clone())
        .collect()
}

pub fn row_project(row: &Row, ls: &BTreeSet<Label>) -> Result<Row, RowError> {
    if let Some(l) = ls.iter().find(|l| !row.contains(l)) {
        return Err(RowError::MissingLabel(l.clone()));
    }
    Ok(Row {
        entries: row.entries.iter().filter(|(l, _)| ls.contains(l)).cloned().collect(),
    })
}

/// Every entry of `t` occurs in `s` with an identical type.
pub fn width_subtype(s: &Row, t: &Row) -> bool {
    t.iter().all(|(l, ty)| s.get(l) == Some(ty))
}

/// Width-only least upper bound: the shared labels, which must carry
/// identical types in both rows.
pub fn lub_row(a: &Row, b: &Row) -> Result<Row, RowError> {
    let shared = row_intersect(a, b);
    for l in &shared {
        if a.get(l) != b.get(l) {
            return Err(RowError::FieldTypeClash(l.clone()));
        }
    }
    row_project(a, &shared)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn row(fields: &[(&str, Type)]) -> Row {
        Row::from_pairs(fields.iter().map(|(l, t)| (Label::new(l), t.clone()))).unwrap()
    }

    fn io(t: Type) -> Type {
        Type::io(t)
    }

    fn setter() -> Type {
        Type::fun(Type::Int, io(Type::Unit))
    }

    fn mover() -> Type {
        Type::funs([Type::Int, Type::Int], io(Type::Unit))
    }

    pub fn shape_row() -> Row {
        row(&[
            ("getX", io(Type::Int)),
            ("getY", io(Type::Int)),
            ("setX", setter()),
            ("setY", setter()),
            ("moveTo", mover()),
            ("rMoveTo", mover()),
        ])
    }

    pub fn rect_row() -> Row {
        let mut r = shape_row();
        for (l, t) in [
            ("getWidth", io(Type::Int)),
            ("getHeight", io(Type::Int)),
            ("setWidth", setter()),
            ("setHeight", setter()),
            ("draw", io(Type::Unit)),
        ] {
            r = row_extend(&r, Label::new(l), t).unwrap();
        }
        r
    }

    pub fn circle_row() -> Row {
        let mut r = shape_row();
        for (l, t) in [
            ("getRadius", io(Type::Int)),
            ("setRadius", setter()),
            ("draw", io(Type::Unit)),
        ] {
            r = row_extend(&r, Label::new(l), t).unwrap();
        }
        r
    }

    fn labels(ls: &[&str]) -> BTreeSet<Label> {
        ls.iter().map(|l| Label::new(l)).collect()
    }

    const SHAPE_LABELS: [&str; 7] = ["getX", "getY", "setX", "setY", "moveTo", "rMoveTo", "draw"];

    #[test]
    fn extend_empty() {
        let r = row_extend(&Row::empty(), "getX".into(), io(Type::Int)).unwrap();
        assert_eq!(r, row(&[("getX", io(Type::Int))]));
    }

    #[test]
    fn extend_duplicate() {
        let r = row(&[("getX", io(Type::Int))]);
        assert_eq!(
            row_extend(&r, "getX".into(), io(Type::Int)),
            Err(RowError::DuplicateLabel("getX".into()))
        );
    }

    #[test]
    fn rectangle_row_has_eleven_entries() {
        let r = rect_row();
        assert_eq!(r.len(), 11);
        // Independent count: 6 shape methods, 4 size accessors, draw.
        let mut expected = labels(&SHAPE_LABELS);
        expected.extend(labels(&["getWidth", "getHeight", "setWidth", "setHeight"]));
        assert_eq!(r.labels(), expected);
    }

    #[test]
    fn update_same_type_is_identity() {
        let r = row(&[("print", io(Type::Unit))]);
        assert_eq!(row_update(&r, "print".into(), io(Type::Unit)).unwrap(), r);
    }

    #[test]
    fn update_absent_label() {
        let r = row(&[("getX", io(Type::Int))]);
        assert_eq!(
            row_update(&r, "print".into(), io(Type::Unit)),
            Err(RowError::MissingLabel("print".into()))
        );
    }

    #[test]
    fn override_keeps_the_colored_point_row() {
        let cp = row(&[
            ("varX", Type::reference(Type::Int)),
            ("getX", io(Type::Int)),
            ("moveX", setter()),
            ("print", io(Type::Unit)),
            ("getColor", io(Type::String)),
        ]);
        let cp2 = row_update(&cp, "print".into(), io(Type::Unit)).unwrap();
        assert_eq!(cp2.labels(), cp.labels());
        assert_eq!(cp2, cp);
    }

    #[test]
    fn union_left_identity_and_bias() {
        let r = rect_row();
        assert_eq!(row_union_left(&Row::empty(), &r), r);
        let a = row(&[("print", io(Type::Unit))]);
        let b = row(&[("print", io(Type::Int)), ("moveX", setter())]);
        assert_eq!(
            row_union_left(&a, &b),
            row(&[("print", io(Type::Unit)), ("moveX", setter())])
        );
    }

    #[test]
    fn diamond_union_keeps_one_print_and_one_move() {
        let point = |extra: &str| {
            row(&[
                ("print", io(Type::Unit)),
                ("moveX", setter()),
                (extra, io(Type::Int)),
            ])
        };
        let top = row(&[("print", io(Type::Unit)), ("moveX", setter())]);
        let u = row_union_left(
            &top,
            &row_union_left(&point("getA"), &row_union_left(&point("getB"), &point("getC"))),
        );
        assert_eq!(u.len(), 5);
        assert_eq!(u.get(&"print".into()), Some(&io(Type::Unit)));
    }

    #[test]
    fn intersect_examples() {
        let a = row(&[("a", Type::Int), ("b", Type::Bool)]);
        let b = row(&[("b", Type::Bool), ("c", Type::String)]);
        assert_eq!(row_intersect(&a, &b), labels(&["b"]));
        assert_eq!(row_intersect(&rect_row(), &circle_row()), labels(&SHAPE_LABELS));
        assert_eq!(row_intersect(&a, &a), a.labels());
    }

    #[test]
    fn project_examples() {
        let a = row(&[("a", Type::Int), ("b", Type::Bool)]);
        assert_eq!(row_project(&a, &labels(&["b"])).unwrap(), row(&[("b", Type::Bool)]));
        assert_eq!(row_project(&a, &BTreeSet::new()).unwrap(), Row::empty());
        let shape = row_project(&rect_row(), &labels(&SHAPE_LABELS)).unwrap();
        let mut expected = shape_row();
        expected = row_extend(&expected, "draw".into(), io(Type::Unit)).unwrap();
        assert_eq!(shape, expected);
        assert_eq!(
            row_project(&a, &labels(&["z"])),
            Err(RowError::MissingLabel("z".into()))
        );
    }

    #[test]
    fn width_examples() {
        let pp = row(&[
            ("varX", Type::reference(Type::Int)),
            ("getX", io(Type::Int)),
            ("moveX", setter()),
            ("print", io(Type::Unit)),
        ]);
        let cp = row_extend(&pp, "getColor".into(), io(Type::String)).unwrap();
        assert!(width_subtype(&pp, &pp));
        assert!(width_subtype(&cp, &pp));
        assert!(!width_subtype(&pp, &cp));
    }

    #[test]
    fn lub_examples() {
        let shape = row_project(&rect_row(), &labels(&SHAPE_LABELS)).unwrap();
        assert_eq!(lub_row(&rect_row(), &circle_row()).unwrap(), shape);
        assert_eq!(lub_row(&shape, &shape).unwrap(), shape);
        assert_eq!(
            lub_row(&row(&[("a", Type::Int)]), &row(&[("a", Type::Bool)])),
            Err(RowError::FieldTypeClash("a".into()))
        );
    }

    fn arb_row() -> impl Strategy<Value = Row> {
        proptest::collection::btree_map(
            prop::sample::select(vec!["a", "b", "c", "d", "e"]),
            prop::sample::select(vec![Type::Int, Type::Bool, Type::String]),
            0..5,
        )
        .prop_map(|m| Row::from_pairs(m.into_iter().map(|(l, t)| (Label::new(l), t))).unwrap())
    }

    proptest! {
        #[test]
        fn rows_stay_sorted_and_unique(r in arb_row(), l in "[a-f]", ) {
            let label = Label::new(&l);
            match row_extend(&r, label.clone(), Type::Unit) {
                Ok(r2) => {
                    prop_assert!(!r.contains(&label));
                    let ls: Vec<_> = r2.iter().map(|(l, _)| l.clone()).collect();
                    let mut sorted = ls.clone();
                    sorted.sort();
                    sorted.dedup();
                    prop_assert_eq!(ls, sorted);
                }
                Err(_) => prop_assert!(r.contains(&label)),
            }
        }

        #[test]
        fn lub_is_commutative_and_an_upper_bound(a in arb_row(), b in arb_row()) {
            match (lub_row(&a, &b), lub_row(&b, &a)) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(&x, &y);
                    prop_assert!(width_subtype(&a, &x));
                    prop_assert!(width_subtype(&b, &x));
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "lub defined in one direction only"),
            }
        }

        #[test]
        fn union_left_contains_both(a in arb_row(), b in arb_row()) {
            let u = row_union_left(&a, &b);
            prop_assert!(width_subtype(&u, &a));
            for (l, t) in b.iter() {
                if !a.contains(l) {
                    prop_assert_eq!(u.get(l), Some(t));
                }
            }
            prop_assert_eq!(u.len(), a.labels().union(&b.labels()).count());
        }
    }
}
