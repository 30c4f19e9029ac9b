//! Golden-output test corpus: `<name>.moo` with `<name>.out` (expected
//! standard output) or `<name>.err` (expected error kind on the first
//! line and a message substring on the second).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use similar::TextDiff;

use crate::driver::{run_captured, Failure, Source, PRELUDE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Output(String),
    Error { kind: String, substring: String },
}

impl Expectation {
    pub fn parse_err(text: &str) -> Expectation {
        let mut lines = text.lines();
        let kind = lines.next().unwrap_or("").trim().to_string();
        let substring = lines.next().unwrap_or("").trim().to_string();
        Expectation::Error { kind, substring }
    }
}

#[derive(Clone, Debug)]
pub struct GoldenCase {
    pub name: String,
    pub program: PathBuf,
    pub expect: Result<Expectation, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub name: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub cases: Vec<CaseReport>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.outcome == Outcome::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            match &c.outcome {
                Outcome::Pass => writeln!(out, "PASS {}", c.name).unwrap(),
                Outcome::Fail(why) => {
                    writeln!(out, "FAIL {}", c.name).unwrap();
                    for line in why.lines() {
                        writeln!(out, "    {line}").unwrap();
                    }
                }
            }
        }
        let n = self.cases.len();
        let noun = if n == 1 { "case" } else { "cases" };
        writeln!(out, "{n} {noun}: {} passed, {} failed", self.passed(), self.failed()).unwrap();
        out
    }
}

/// Every `.moo` file in `dir` except the prelude, by name.
pub fn discover(dir: &Path) -> io::Result<Vec<GoldenCase>> {
    let mut cases = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_none_or(|e| e != "moo") || path.file_name().is_some_and(|n| n == PRELUDE) {
            continue;
        }
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let out = path.with_extension("out");
        let err = path.with_extension("err");
        let expect = match (out.is_file(), err.is_file()) {
            (true, false) => fs::read_to_string(&out)
                .map(Expectation::Output)
                .map_err(|e| format!("cannot read {}: {e}", out.display())),
            (false, true) => fs::read_to_string(&err)
                .map(|t| Expectation::parse_err(&t))
                .map_err(|e| format!("cannot read {}: {e}", err.display())),
            (true, true) => Err("both .out and .err exist".into()),
            (false, false) => Err("neither .out nor .err exists".into()),
        };
        cases.push(GoldenCase {
            name,
            program: path,
            expect,
        });
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(cases)
}

fn normalize(s: &str) -> &str {
    s.trim_end_matches('\n')
}

/// A unified diff from `expected` to `actual`.
pub fn diff(expected: &str, actual: &str) -> String {
    TextDiff::from_lines(expected, actual)
        .unified_diff()
        .header("expected", "actual")
        .to_string()
}

/// Compares one program's result with its expectation.
pub fn judge(expect: &Expectation, output: &str, result: &Result<(), Failure>) -> Outcome {
    match (expect, result) {
        (Expectation::Output(want), Ok(())) => {
            let (want, got) = (normalize(want), normalize(output));
            if want == got {
                Outcome::Pass
            } else {
                Outcome::Fail(diff(&format!("{want}\n"), &format!("{got}\n")))
            }
        }
        (Expectation::Output(_), Err(f)) => Outcome::Fail(format!("expected output, got:\n{}", f.lines().join("\n"))),
        (Expectation::Error { kind, .. }, Ok(())) => {
            Outcome::Fail(format!("expected error[{kind}], but the program succeeded"))
        }
        (Expectation::Error { kind, substring }, Err(f)) => {
            let lines = f.lines();
            let matched = lines
                .iter()
                .any(|l| l.contains(&format!("[{kind}]:")) && l.contains(substring.as_str()));
            if matched {
                Outcome::Pass
            } else {
                Outcome::Fail(format!(
                    "expected error[{kind}] mentioning {substring:?}, got:\n{}",
                    lines.join("\n")
                ))
            }
        }
    }
}

pub fn run_case(case: &GoldenCase) -> Outcome {
    let expect = match &case.expect {
        Ok(e) => e,
        Err(why) => return Outcome::Fail(why.clone()),
    };
    let src = match Source::read(&case.program) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(format!("cannot read {}: {e}", case.program.display())),
    };
    let prelude = match Source::prelude_for(&case.program) {
        Ok(p) => p,
        Err(e) => return Outcome::Fail(format!("cannot read the prelude: {e}")),
    };
    let (output, result) = run_captured(prelude.as_ref(), &src);
    judge(expect, &output, &result.map(|_| ()))
}

/// Runs every case in `dir` in parallel; the report is in name order.
pub fn run_suite(dir: &Path) -> io::Result<Report> {
    let cases = discover(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .stack_size(crate::STACK_SIZE)
        .build()
        .map_err(io::Error::other)?;
    let reports = pool.install(|| {
        cases
            .par_iter()
            .map(|c| CaseReport {
                name: c.name.clone(),
                outcome: run_case(c),
            })
            .collect()
    });
    Ok(Report { cases: reports })
}
