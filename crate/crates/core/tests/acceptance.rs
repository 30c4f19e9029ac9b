#![allow(clippy::absurd_extreme_comparisons)]

//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use minioo::driver::{check, run_captured, Failure, Source};
use minioo::golden::{self, Outcome};
use minioo::typesys::{depth_subtype, derive_deep_narrow, lub_row, width_subtype, Label, NominalGraph, Row, Type};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every comparison below is exact.
const TOLERANCE: usize = 0;
const DEEP_PAIRS: usize = 1000;
const DEEP_MAX_DEPTH: usize = 3;
const DAGS: usize = 200;
const DAG_MAX_NODES: usize = 8;
const COMMUTATIONS: usize = 500;
const ORACLE_LABELS: [&str; 4] = ["a", "b", "c", "d"];

type Check = Result<(), String>;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run_file(name: &str) -> (String, Result<(), Failure>) {
    let path = corpus().join(format!("{name}.moo"));
    let src = Source::read(&path).expect("corpus file");
    let prelude = Source::prelude_for(&path).expect("prelude");
    let (out, res) = run_captured(prelude.as_ref(), &src);
    (out, res.map(|_| ()))
}

fn expect_output(name: &str, want: &str) -> Check {
    let (out, res) = run_file(name);
    if let Err(f) = res {
        return Err(format!("{name}: {}", f.lines().join("; ")));
    }
    if out != want {
        return Err(format!("{name}: got {out:?}, want {want:?}"));
    }
    Ok(())
}

fn expect_error(name: &str, kind: &str, substring: &str) -> Check {
    let (_, res) = run_file(name);
    let Err(f) = res else {
        return Err(format!("{name}: succeeded, want error[{kind}]"));
    };
    let lines = f.lines();
    if lines.iter().any(|l| l.contains(&format!("[{kind}]:")) && l.contains(substring)) {
        Ok(())
    } else {
        Err(format!("{name}: want [{kind}] with {substring:?}, got {}", lines.join("; ")))
    }
}

fn all(checks: impl IntoIterator<Item = Check>) -> Check {
    let errs: Vec<String> = checks.into_iter().filter_map(Result::err).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join(" | "))
    }
}

fn criterion_1() -> Check {
    expect_output(
        "shapes",
        "Drawing a Rectangle at:(10,20), width 5, height 6\n\
         Drawing a Rectangle at:(110,120), width 5, height 6\n\
         Drawing a Circle at:(15,25), radius 8\n\
         Drawing a Circle at:(115,125), radius 8\n",
    )
}

fn criterion_2() -> Check {
    all([
        expect_output("first_oop", "0\n3\n"),
        expect_output("nested", "1\n2\n"),
        expect_output("selfish", "9\n"),
        expect_output("colored", "(5,\"red\")\n"),
        expect_output("first_class", "42\n"),
        expect_output("overriding", "so far - 5\ncolor  - \"red\"\n"),
        expect_output(
            "diamond",
            "super1: 42\nsuper2: 42\nsuper3: 42\nsuper1: 46\nsuper2: 46\nsuper3: 44\n",
        ),
    ])
}

fn criterion_3() -> Check {
    all([
        expect_error("abstract_fix", "AbstractUse", "getX"),
        expect_error("self_returning", "InfiniteType", "infinite type"),
        expect_error("duplicate_label", "DuplicateLabel", "getX"),
        expect_error("stupid_cast", "StupidCast", "stupid cast"),
        expect_error("covariant_unsafe", "MissingField", "getColor"),
        expect_error("self_print_new", "PrematureSelfAccess", "NotFixed"),
    ])
}

fn criterion_4() -> Check {
    // |0 - 5| and |10 - 25|, computed here rather than transcribed.
    let (p1, p2, cp1, cp2): (i64, i64, i64, i64) = (0, 5, 10, 25);
    let want = format!(
        "Length of v\n{}\nLength of colored cv\n{}\n{p1}\n{p2}\n{cp1}\n{cp2}\n",
        (p1 - p2).abs(),
        (cp1 - cp2).abs()
    );
    expect_output("deep", &want)
}

fn criterion_5() -> Check {
    expect_output("union_cast", "Not a circle.\nDrawing a Circle at:(15,25), radius 10\n")
}

// ---------------------------------------------------------------------
// Oracles for criterion 6. They work on their own representations and
// share nothing with the library beyond the final comparison.

/// One slot per oracle label: absent, Int or Bool.
type OracleRow = [u8; 4];

fn all_oracle_rows() -> Vec<OracleRow> {
    (0..81u32)
        .map(|mut n| {
            let mut r = [0u8; 4];
            for slot in &mut r {
                *slot = (n % 3) as u8;
                n /= 3;
            }
            r
        })
        .collect()
}

fn to_row(r: &OracleRow) -> Row {
    Row::from_pairs(r.iter().zip(ORACLE_LABELS).filter(|(s, _)| **s != 0).map(|(s, l)| {
        let t = if *s == 1 { Type::Int } else { Type::Bool };
        (Label::new(l), t)
    }))
    .unwrap()
}

/// `s` has every field of `t` at the same type.
fn oracle_sub(s: &OracleRow, t: &OracleRow) -> bool {
    (0..4).all(|i| t[i] == 0 || s[i] == t[i])
}

fn width_laws(rows: &[(OracleRow, Row)]) -> Check {
    let mut bad = 0usize;
    for (oa, a) in rows {
        if !width_subtype(a, a) {
            bad += 1;
        }
        for (ob, b) in rows {
            let ab = width_subtype(a, b);
            if ab != oracle_sub(oa, ob) {
                bad += 1;
            }
            if ab && width_subtype(b, a) && oa != ob {
                bad += 1;
            }
            if ab {
                for (_, c) in rows {
                    if width_subtype(b, c) && !width_subtype(a, c) {
                        bad += 1;
                    }
                }
            }
        }
    }
    (bad <= TOLERANCE).then_some(()).ok_or(format!("{bad} width_subtype law violations"))
}

fn lub_maximality(rows: &[(OracleRow, Row)]) -> Check {
    let mut bad = 0usize;
    for (oa, a) in rows {
        for (ob, b) in rows {
            let clash = (0..4).any(|i| oa[i] != 0 && ob[i] != 0 && oa[i] != ob[i]);
            let uppers: Vec<&OracleRow> = rows
                .iter()
                .map(|(o, _)| o)
                .filter(|c| oracle_sub(oa, c) && oracle_sub(ob, c))
                .collect();
            let least: Vec<&OracleRow> = uppers
                .iter()
                .copied()
                .filter(|m| uppers.iter().all(|c| oracle_sub(m, c)))
                .collect();
            match lub_row(a, b) {
                Err(_) if clash => {}
                Ok(l) if !clash => {
                    if least.len() != 1 || l != to_row(least[0]) {
                        bad += 1;
                    }
                    if lub_row(b, a).as_ref() != Ok(&l) {
                        bad += 1;
                    }
                }
                _ => bad += 1,
            }
        }
    }
    (bad <= TOLERANCE).then_some(()).ok_or(format!("{bad} lub_row disagreements"))
}

#[derive(Clone, Debug, PartialEq)]
enum OTy {
    Int,
    Bool,
    Rec(Vec<(usize, OTy)>),
    Fun(Box<OTy>, Box<OTy>),
    Io(Box<OTy>),
    Ref(Box<OTy>),
}

fn to_type(t: &OTy) -> Type {
    match t {
        OTy::Int => Type::Int,
        OTy::Bool => Type::Bool,
        OTy::Rec(fs) => Type::Record(
            Row::from_pairs(fs.iter().map(|(l, t)| (Label::new(ORACLE_LABELS[*l]), to_type(t)))).unwrap(),
        ),
        OTy::Fun(a, r) => Type::fun(to_type(a), to_type(r)),
        OTy::Io(a) => Type::io(to_type(a)),
        OTy::Ref(a) => Type::reference(to_type(a)),
    }
}

fn oracle_deep(s: &OTy, t: &OTy) -> bool {
    match (s, t) {
        (OTy::Rec(sf), OTy::Rec(tf)) => tf
            .iter()
            .all(|(l, tt)| sf.iter().any(|(k, st)| k == l && oracle_deep(st, tt))),
        (OTy::Fun(a, r), OTy::Fun(a2, r2)) => oracle_deep(a2, a) && oracle_deep(r, r2),
        (OTy::Io(a), OTy::Io(b)) => oracle_deep(a, b),
        _ => s == t,
    }
}

fn random_ty(rng: &mut ChaCha8Rng, depth: usize) -> OTy {
    let pick = if depth == 0 { rng.random_range(0..2) } else { rng.random_range(0..6) };
    match pick {
        0 => OTy::Int,
        1 => OTy::Bool,
        2 => {
            let mut fs = Vec::new();
            for l in 0..4 {
                if rng.random_bool(0.5) {
                    fs.push((l, random_ty(rng, depth - 1)));
                }
            }
            OTy::Rec(fs)
        }
        3 => OTy::Fun(Box::new(random_ty(rng, depth - 1)), Box::new(random_ty(rng, depth - 1))),
        4 => OTy::Io(Box::new(random_ty(rng, depth - 1))),
        _ => OTy::Ref(Box::new(random_ty(rng, depth - 1))),
    }
}

/// A type near `t`, usually a subtype (`down`) or supertype of it, so
/// that both outcomes are well represented.
fn perturb(rng: &mut ChaCha8Rng, t: &OTy, down: bool, depth: usize) -> OTy {
    if rng.random_bool(0.08) {
        return random_ty(rng, depth);
    }
    match t {
        OTy::Rec(fs) => {
            let mut out: Vec<(usize, OTy)> = Vec::new();
            for l in 0..4 {
                match fs.iter().find(|(k, _)| *k == l) {
                    Some((_, ft)) if down || rng.random_bool(0.7) => {
                        out.push((l, perturb(rng, ft, down, depth.saturating_sub(1))))
                    }
                    None if down && depth > 0 && rng.random_bool(0.4) => out.push((l, random_ty(rng, depth - 1))),
                    _ => {}
                }
            }
            OTy::Rec(out)
        }
        OTy::Fun(a, r) => OTy::Fun(
            Box::new(perturb(rng, a, !down, depth.saturating_sub(1))),
            Box::new(perturb(rng, r, down, depth.saturating_sub(1))),
        ),
        OTy::Io(a) => OTy::Io(Box::new(perturb(rng, a, down, depth.saturating_sub(1)))),
        other => other.clone(),
    }
}

fn deep_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut bad, mut positive) = (0usize, 0usize);
    for _ in 0..DEEP_PAIRS {
        let t = random_ty(&mut rng, DEEP_MAX_DEPTH);
        let s = perturb(&mut rng, &t, true, DEEP_MAX_DEPTH);
        let (ts, tt) = (to_type(&s), to_type(&t));
        let want = oracle_deep(&s, &t);
        positive += usize::from(want);
        if derive_deep_narrow(&ts, &tt).is_ok() != want || depth_subtype(&ts, &tt) != want {
            bad += 1;
        }
    }
    if positive == 0 || positive == DEEP_PAIRS {
        return Err(format!("degenerate sample: {positive} of {DEEP_PAIRS} pairs are subtypes"));
    }
    (bad <= TOLERANCE).then_some(()).ok_or(format!("{bad} depth-subtype disagreements"))
}

fn ancestry_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut bad = 0usize;
    for _ in 0..DAGS {
        let n = rng.random_range(1..=DAG_MAX_NODES);
        let mut reach = vec![vec![false; n]; n];
        let mut g = NominalGraph::new();
        for i in 0..n {
            reach[i][i] = true;
            let parents: Vec<usize> = (0..i).filter(|_| rng.random_bool(0.35)).collect();
            for &p in &parents {
                reach[i][p] = true;
            }
            let names: Vec<String> = parents.iter().map(|p| format!("N{p}")).collect();
            g.declare(&format!("N{i}"), &names).unwrap();
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        for (i, row) in reach.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                if g.is_ancestor(&format!("N{i}"), &format!("N{j}")) != Ok(want) {
                    bad += 1;
                }
            }
        }
    }
    (bad <= TOLERANCE).then_some(()).ok_or(format!("{bad} ancestry disagreements"))
}

/// A field value, the type to write for it, and how to observe it.
fn random_field(rng: &mut ChaCha8Rng, l: &str) -> (String, &'static str, String) {
    let k = format!("({})", rng.random_range(-50..50i64));
    match rng.random_range(0..5) {
        0 => (k.clone(), "Int", format!("print (r # {l})")),
        1 => (format!("\"s{k}\""), "String", format!("print (r # {l})")),
        2 => (format!("return {k}"), "IO Int", format!("do {{ x <- r # {l}; print x }}")),
        3 => (format!("print {k}"), "IO ()", format!("r # {l}")),
        _ => (format!("\\n -> n + {k}"), "Int -> Int", format!("print (r # {l} 3)")),
    }
}

fn commutation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let labels = ["f0", "f1", "f2", "f3", "f4"];
    let decls: String = labels.iter().map(|l| format!("label {l}\n")).collect();
    let mut bad = Vec::new();
    for case in 0..COMMUTATIONS {
        let mut fields: Vec<(&str, (String, &str, String))> = Vec::new();
        for l in labels {
            if rng.random_bool(0.6) {
                fields.push((l, random_field(&mut rng, l)));
            }
        }
        if fields.is_empty() {
            continue;
        }
        let target: Vec<&(&str, (String, &str, String))> = {
            let t: Vec<_> = fields.iter().filter(|_| rng.random_bool(0.6)).collect();
            if t.is_empty() {
                vec![&fields[0]]
            } else {
                t
            }
        };
        let record: String = fields
            .iter()
            .map(|(l, (v, _, _))| format!("({l} = {v}) .*. "))
            .collect::<String>()
            + "emptyRecord";
        let ty: Vec<String> = target.iter().map(|(l, (_, t, _))| format!("{l} : {t}")).collect();
        let ty = format!("{{ {} }}", ty.join(", "));
        let observe: Vec<String> = target.iter().map(|(_, (_, _, o))| o.clone()).collect();
        let observe = observe.join("; ");
        let direct = format!("{decls}let main = do {{ let r = {record}; {observe} }}\n");
        let narrowed = format!("{decls}let main = do {{ let r = narrow ({record}) : {ty}; {observe} }}\n");
        let a = run_captured(None, &Source::new(format!("direct{case}.moo"), direct));
        let b = run_captured(None, &Source::new(format!("narrow{case}.moo"), narrowed));
        match (a, b) {
            ((x, Ok(_)), (y, Ok(_))) if x == y && !x.is_empty() => {}
            ((x, ra), (y, rb)) => bad.push(format!(
                "case {case}: direct {x:?} {:?} / narrowed {y:?} {:?}",
                ra.err().map(|f| f.lines()),
                rb.err().map(|f| f.lines())
            )),
        }
    }
    if bad.len() <= TOLERANCE {
        Ok(())
    } else {
        Err(format!("{} commutation failures, first: {}", bad.len(), bad[0]))
    }
}

fn criterion_6() -> Check {
    let rows: Vec<(OracleRow, Row)> = all_oracle_rows().into_iter().map(|o| (o, to_row(&o))).collect();
    all([
        width_laws(&rows),
        lub_maximality(&rows),
        deep_agreement(),
        ancestry_agreement(),
        commutation(),
    ])
}

fn criterion_7() -> Check {
    let path = corpus().join("colored.moo");
    let src = Source::read(&path).map_err(|e| e.to_string())?;
    let prelude = Source::prelude_for(&path).map_err(|e| e.to_string())?;
    let checked = check(prelude.as_ref(), &src).map_err(|f| f.lines().join("; "))?;
    let scheme = checked.scheme("colored_point").ok_or("no colored_point")?.pretty();
    let (ctx, body) = scheme.split_once(" => ").ok_or(format!("no context in {scheme}"))?;
    let ctx = canonical_vars(ctx.trim_start_matches('(').trim_end_matches(')'));
    let got: BTreeSet<String> = ctx.split(", ").map(str::to_string).collect();
    let want: BTreeSet<String> = ["HasField GetX v0 (IO v1)", "Num v2", "Show v1"]
        .into_iter()
        .map(str::to_string)
        .collect();
    if got != want {
        return Err(format!("constraints {got:?}, want {want:?} in {scheme}"));
    }
    let parts: Vec<&str> = body.split(":=:").collect();
    let fields: Vec<&str> = parts[..parts.len() - 1]
        .iter()
        .filter_map(|s| s.rsplit(' ').find(|w| !w.is_empty()))
        .collect();
    if fields != ["GetColor", "GetX", "MoveX", "Print", "VarX"] {
        return Err(format!("result row {fields:?} in {scheme}"));
    }
    Ok(())
}

/// Renames lowercase type variables to v0, v1, ... by first appearance
/// after sorting the constraints, so naming does not matter.
fn canonical_vars(ctx: &str) -> String {
    let mut parts: Vec<&str> = ctx.split(", ").collect();
    parts.sort_by_key(|p| p.split(' ').next().unwrap_or("").to_string());
    let joined = parts.join(", ");
    let mut names: Vec<String> = Vec::new();
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String, names: &mut Vec<String>| {
        if word.starts_with(|c: char| c.is_ascii_lowercase()) {
            let i = names.iter().position(|n| n == word).unwrap_or_else(|| {
                names.push(word.clone());
                names.len() - 1
            });
            out.push_str(&format!("v{i}"));
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in joined.chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out, &mut names);
            out.push(c);
        }
    }
    flush(&mut word, &mut out, &mut names);
    out
}

fn corpus_suite() -> Check {
    let report = golden::run_suite(&corpus()).map_err(|e| e.to_string())?;
    let failed: Vec<String> = report
        .cases
        .iter()
        .filter(|c| c.outcome != Outcome::Pass)
        .map(|c| c.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(format!("corpus failures: {failed:?}"))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("shapes golden output", criterion_1),
        ("session goldens", criterion_2),
        ("type-error corpus", criterion_3),
        ("depth-subtyping demo", criterion_4),
        ("union down-cast loop", criterion_5),
        ("property suites against oracles", criterion_6),
        ("polymorphic generator scheme", criterion_7),
    ];
    let failures = minioo::with_big_stack(move || {
        let mut failures = 0;
        for (i, (name, f)) in criteria.iter().enumerate() {
            match f() {
                Ok(()) => println!("PASS {} {name}", i + 1),
                Err(why) => {
                    failures += 1;
                    println!("FAIL {} {name}: {why}", i + 1);
                }
            }
        }
        if let Err(why) = corpus_suite() {
            failures += 1;
            println!("FAIL golden corpus: {why}");
        }
        failures
    });
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
