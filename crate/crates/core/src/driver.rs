//! Parse, check and run whole programs.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use crate::eval::{Interpreter, RuntimeFault, Store, Value};
use crate::infer::{check_program, CheckOutput, Elaborations, ErrorKind, Scheme, TypeEnv, TypeError};
use crate::syntax::{parse_source, DeclKind, ParseContext, Program, SourceSpan, SyntaxError};
use crate::typesys::Type;

/// Name of the label file loaded before every program in its directory.
pub const PRELUDE: &str = "prelude.moo";

#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Source {
        Source {
            name: name.into(),
            text: text.into(),
        }
    }

    pub fn read(path: &Path) -> io::Result<Source> {
        Ok(Source::new(path.display().to_string(), fs::read_to_string(path)?))
    }

    /// The prelude next to `path`, unless `path` is the prelude itself.
    pub fn prelude_for(path: &Path) -> io::Result<Option<Source>> {
        let dir = path.parent().unwrap_or(Path::new("."));
        let candidate = dir.join(PRELUDE);
        if path.file_name().is_some_and(|n| n == PRELUDE) || !candidate.is_file() {
            return Ok(None);
        }
        Source::read(&candidate).map(Some)
    }
}

/// Why a program did not finish.
#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    Syntax(SyntaxError),
    Type(Vec<TypeError>),
    Fault(RuntimeFault),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Syntax(_) | Failure::Type(_) => 1,
            Failure::Fault(_) => 2,
        }
    }

    /// The kind of the first diagnostic.
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Syntax(e) => e.kind.as_str(),
            Failure::Type(es) => es.first().map_or("TypeError", |e| e.kind.as_str()),
            Failure::Fault(f) => f.kind.as_str(),
        }
    }

    /// One rendered diagnostic per error.
    pub fn lines(&self) -> Vec<String> {
        match self {
            Failure::Syntax(e) => vec![e.to_string()],
            Failure::Type(es) => es.iter().map(ToString::to_string).collect(),
            Failure::Fault(f) => vec![f.to_string()],
        }
    }
}

/// A program that parsed and typechecked, together with the state needed
/// to run it or to continue from it.
pub struct Checked {
    pub prelude: Program,
    pub program: Program,
    /// Results for `program` only.
    pub output: CheckOutput,
    pub env: TypeEnv,
    pub ctx: ParseContext,
    /// Elaborations for the prelude and the program.
    pub elabs: Elaborations,
}

impl Checked {
    pub fn scheme(&self, name: &str) -> Option<&Scheme> {
        self.output.schemes.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    /// An interpreter with the prelude and program loaded.
    pub fn interpreter(&self, store: Store) -> Interpreter {
        let mut it = Interpreter::new(store);
        it.load(&self.prelude, &self.elabs);
        it.load(&self.program, &Elaborations::new());
        it
    }
}

/// Parses and checks `src` after `prelude`.
pub fn check(prelude: Option<&Source>, src: &Source) -> Result<Checked, Failure> {
    let mut ctx = ParseContext::default();
    let mut env = TypeEnv::new();
    let mut elabs = Elaborations::new();
    let prelude = match prelude {
        Some(p) => {
            let prog = parse_source(&p.text, &p.name, &mut ctx).map_err(Failure::Syntax)?;
            let out = check_program(&prog, &mut env);
            if !out.errors.is_empty() {
                return Err(Failure::Type(out.errors));
            }
            elabs.extend(out.elabs);
            prog
        }
        None => Program::default(),
    };
    let program = parse_source(&src.text, &src.name, &mut ctx).map_err(Failure::Syntax)?;
    let output = check_program(&program, &mut env);
    if !output.errors.is_empty() {
        return Err(Failure::Type(output.errors));
    }
    elabs.extend(output.elabs.iter().map(|(k, v)| (*k, v.clone())));
    Ok(Checked {
        prelude,
        program,
        output,
        env,
        ctx,
        elabs,
    })
}

fn file_start(name: &str) -> SourceSpan {
    SourceSpan::new(Arc::from(name), 1, 1, 0, 0)
}

/// Checks that the program has a `main` action and returns its span.
pub fn main_span(checked: &Checked, file: &str) -> Result<SourceSpan, Failure> {
    let Some(decl) = checked
        .program
        .decls
        .iter()
        .find(|d| matches!(&d.kind, DeclKind::Let { name, .. } if name == "main"))
    else {
        return Err(Failure::Type(vec![TypeError::new(
            ErrorKind::UnboundName,
            &file_start(file),
            "the program has no `main` binding",
        )]));
    };
    let scheme = checked.scheme("main").expect("checked bindings have schemes");
    if !matches!(scheme.ty, Type::Action(_)) || !scheme.preds.is_empty() {
        return Err(Failure::Type(vec![TypeError::new(
            ErrorKind::Mismatch,
            &decl.span,
            format!("`main` must be an action, but it has type `{scheme}`"),
        )]));
    }
    Ok(decl.span.clone())
}

/// Checks `src` and runs its `main`, writing output to `store`.
pub fn run(prelude: Option<&Source>, src: &Source, store: Store) -> (Store, Result<Value, Failure>) {
    let checked = match check(prelude, src) {
        Ok(c) => c,
        Err(f) => return (store, Err(f)),
    };
    let span = match main_span(&checked, &src.name) {
        Ok(s) => s,
        Err(f) => return (store, Err(f)),
    };
    let mut it = checked.interpreter(store);
    let res = it.run_main(&span).map_err(Failure::Fault);
    (it.into_store(), res)
}

/// Runs `src` with captured output.
pub fn run_captured(prelude: Option<&Source>, src: &Source) -> (String, Result<Value, Failure>) {
    let (mut store, res) = run(prelude, src, Store::capture());
    (store.take_output(), res)
}
