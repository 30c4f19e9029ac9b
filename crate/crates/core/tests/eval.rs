use std::fs;
use std::path::{Path, PathBuf};

use minioo::diagnostic::DiagOptions;
use minioo::driver::{self, run_captured, Failure, Source};
use minioo::eval::{show_value, FaultKind, Value};
use minioo::repl::Repl;
use minioo::syntax::pretty::decl_to_string;
use minioo::syntax::{parse_source, DeclKind, ParseContext};
use minioo::Store;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Corpus programs that are expected to print output.
fn output_cases() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "moo") && p.with_extension("out").is_file())
        .collect();
    v.sort();
    v
}

fn load(path: &Path) -> (Option<Source>, Source) {
    (Source::prelude_for(path).unwrap(), Source::read(path).unwrap())
}

/// Output and the shown result of `main`.
fn run_program(text: &str) -> (String, Result<Option<String>, Failure>) {
    let prelude = Source::read(&corpus().join("prelude.moo")).unwrap();
    let text = text.to_string();
    minioo::with_big_stack(move || {
        let (out, res) = run_captured(Some(&prelude), &Source::new("t.moo", text));
        (out, res.map(|v: Value| show_value(&v)))
    })
}

#[test]
fn evaluation_is_deterministic() {
    minioo::with_big_stack(|| {
        for path in output_cases() {
            let (prelude, src) = load(&path);
            let a = run_captured(prelude.as_ref(), &src);
            let b = run_captured(prelude.as_ref(), &src);
            assert_eq!(a.0, b.0, "{}", path.display());
            assert!(a.1.is_ok() && b.1.is_ok(), "{}", path.display());
        }
    });
}

#[test]
fn runs_share_no_state() {
    let counter = "let main = do { r <- newRef 0; modifyRef r (\\v -> v + 1); v <- readRef r; print v }";
    let first = run_program(counter).0;
    let second = run_program(counter).0;
    assert_eq!(first, "1\n");
    assert_eq!(second, "1\n");
}

#[test]
fn self_cells_are_never_read_early_in_successful_runs() {
    minioo::with_big_stack(|| {
        for path in output_cases() {
            let (prelude, src) = load(&path);
            let (store, res) = driver::run(prelude.as_ref(), &src, Store::capture());
            assert!(res.is_ok(), "{}", path.display());
            assert_eq!(store.premature_reads(), 0, "{}", path.display());
        }
    });
}

#[test]
fn unsafe_fix_is_caught_and_counted() {
    let path = corpus().join("self_print_fix.moo");
    let (prelude, src) = load(&path);
    let (reads, res) = minioo::with_big_stack(move || {
        let (store, res) = driver::run(prelude.as_ref(), &src, Store::capture());
        (store.premature_reads(), res.map(|_| ()))
    });
    match res {
        Err(Failure::Fault(f)) => assert_eq!(f.kind, FaultKind::PrematureSelfAccess),
        other => panic!("{other:?}"),
    }
    assert_eq!(reads, 1);
}

#[test]
fn printed_values() {
    let (out, res) = run_program(
        "let main = do { print 9; print (5, \"red\"); print (); print 2.5; print (1.0 / 0.0); print \"a\\\"b\"; print True }",
    );
    assert!(res.is_ok());
    assert_eq!(out, "9\n(5,\"red\")\n()\n2.5\nInfinity\n\"a\\\"b\"\nTrue\n");
}

#[test]
fn main_result_is_returned() {
    let (_, res) = run_program("let main = return (2 + 3)");
    assert_eq!(res.unwrap().as_deref(), Some("5"));
}

#[test]
fn user_failures_and_division() {
    let (out, res) = run_program("let main = do { print 1; failIO \"stop\"; print 2 }");
    assert_eq!(out, "1\n");
    match res {
        Err(Failure::Fault(f)) => {
            assert_eq!(f.kind, FaultKind::UserFail);
            assert!(f.to_string().contains("runtime fault[UserFail]: stop"));
        }
        other => panic!("{other:?}"),
    }
    let (out, res) = run_program("let main = do { print (7 / 2); print (7.0 / 2.0); print (1 / 0) }");
    assert_eq!(out, "3\n3.5\n");
    assert!(matches!(res, Err(Failure::Fault(f)) if f.kind == FaultKind::DivisionByZero));
}

#[test]
fn narrowing_hides_fields_at_run_time() {
    let (out, res) = run_program(
        "let main = do {\n  let r = (getX = 1) .*. (getY = 2) .*. emptyRecord;\n  let n = narrow r : { getX : Int };\n  print (n # getX)\n}",
    );
    assert!(res.is_ok(), "{res:?}");
    assert_eq!(out, "1\n");
}

#[test]
fn update_and_left_union() {
    let (out, res) = run_program(
        "let main = do {\n  let a = (getX = 1) .*. (getY = 2) .*. emptyRecord;\n  let b = (getX = 10) .<. a;\n  let c = ((getX = 100) .*. emptyRecord) .<++. a;\n  print (b # getX, b # getY);\n  print (c # getX, c # getY)\n}",
    );
    assert!(res.is_ok(), "{res:?}");
    assert_eq!(out, "(10,2)\n(100,2)\n");
}

/// Programs whose bindings refer to later bindings; the REPL checks one
/// declaration at a time, so these can only be loaded as files.
const FORWARD_REFERENCES: [&str; 1] = ["listobj"];

/// Feeding a program's declarations to the REPL one at a time and then
/// running `main` prints what the batch run prints.
#[test]
fn repl_matches_batch_runs() {
    minioo::with_big_stack(|| {
        for path in output_cases() {
            if FORWARD_REFERENCES.iter().any(|n| path.file_stem().is_some_and(|s| s == *n)) {
                continue;
            }
            let (prelude, src) = load(&path);
            let (batch, res) = run_captured(prelude.as_ref(), &src);
            assert!(res.is_ok());
            let mut repl = Repl::new(DiagOptions::default());
            if let Some(p) = &prelude {
                repl.load(p).unwrap();
            }
            let mut ctx = ParseContext::default();
            if let Some(p) = &prelude {
                parse_source(&p.text, &p.name, &mut ctx).unwrap();
            }
            let program = parse_source(&src.text, &src.name, &mut ctx).unwrap();
            let mut printed = String::new();
            for d in &program.decls {
                if matches!(&d.kind, DeclKind::Let { name, .. } if name == "main") {
                    continue;
                }
                let r = repl.feed(&decl_to_string(d));
                assert!(!r.message.contains("error["), "{}: {}", path.display(), r.message);
                printed.push_str(&r.output);
            }
            let main = program
                .decls
                .iter()
                .find_map(|d| match &d.kind {
                    DeclKind::Let { name, body, .. } if name == "main" => Some(body),
                    _ => None,
                })
                .unwrap();
            let r = repl.feed(&minioo::syntax::pretty::expr_to_string(main));
            printed.push_str(&r.output);
            assert_eq!(printed, batch, "{}: {}", path.display(), r.message);
        }
    });
}
