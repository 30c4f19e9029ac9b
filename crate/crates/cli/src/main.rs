use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use minioo::diagnostic::{render, DiagOptions};
use minioo::driver::{self, Failure, Source};
use minioo::golden;
use minioo::repl::Repl;
use minioo::Store;

const USAGE_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "minioo", version, about = "Run, typecheck and test MiniOO programs")]
struct Cli {
    /// Print diagnostics without ANSI color.
    #[arg(long, global = true)]
    no_color: bool,
    /// Show at most this many errors; 0 shows all.
    #[arg(long, global = true, default_value_t = 20)]
    max_errors: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Typecheck a program and run its `main`.
    Run { file: PathBuf },
    /// Print the inferred type of every top-level binding.
    Check {
        file: PathBuf,
        /// Only print this binding.
        #[arg(long)]
        binding: Option<String>,
    },
    /// Run every golden case in a directory.
    Test { dir: PathBuf },
    /// Start an interactive session.
    Repl {
        /// Load these files before reading input.
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let color = !cli.no_color
        && std::env::var("MINIOO_COLOR").map_or(true, |v| v != "0")
        && io::stderr().is_terminal();
    let diag = DiagOptions {
        color,
        max_errors: cli.max_errors,
    };
    let code = minioo::with_big_stack(move || match cli.command {
        Command::Run { file } => cmd_run(&file, diag),
        Command::Check { file, binding } => cmd_check(&file, binding.as_deref(), diag),
        Command::Test { dir } => cmd_test(&dir),
        Command::Repl { files } => cmd_repl(&files, diag),
    });
    ExitCode::from(code)
}

fn report(f: &Failure, diag: DiagOptions) -> u8 {
    eprint!("{}", render(&f.lines(), diag));
    f.exit_code() as u8
}

fn load(file: &Path) -> Result<(Option<Source>, Source), u8> {
    let read = |p: &Path| {
        Source::read(p).map_err(|e| {
            eprintln!("minioo: cannot read {}: {e}", p.display());
            USAGE_ERROR
        })
    };
    let src = read(file)?;
    let prelude = Source::prelude_for(file).map_err(|e| {
        eprintln!("minioo: cannot read the prelude for {}: {e}", file.display());
        USAGE_ERROR
    })?;
    Ok((prelude, src))
}

fn cmd_run(file: &Path, diag: DiagOptions) -> u8 {
    let (prelude, src) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (_, res) = driver::run(prelude.as_ref(), &src, Store::stdout());
    match res {
        Ok(_) => 0,
        Err(f) => report(&f, diag),
    }
}

fn cmd_check(file: &Path, binding: Option<&str>, diag: DiagOptions) -> u8 {
    let (prelude, src) = match load(file) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let checked = match driver::check(prelude.as_ref(), &src) {
        Ok(c) => c,
        Err(f) => return report(&f, diag),
    };
    let mut out = io::stdout().lock();
    let mut found = false;
    for (name, scheme) in &checked.output.schemes {
        if binding.is_none_or(|b| b == name) {
            found = true;
            let _ = writeln!(out, "{name} :: {scheme}");
        }
    }
    if let Some(b) = binding.filter(|_| !found) {
        eprintln!("minioo: {} has no binding named `{b}`", file.display());
        return USAGE_ERROR;
    }
    0
}

fn cmd_test(dir: &Path) -> u8 {
    match golden::run_suite(dir) {
        Ok(report) => {
            print!("{}", report.render());
            if report.all_passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("minioo: cannot read {}: {e}", dir.display());
            USAGE_ERROR
        }
    }
}

fn cmd_repl(files: &[PathBuf], diag: DiagOptions) -> u8 {
    let mut repl = Repl::new(diag);
    let mut loaded = Vec::new();
    for file in files {
        let (prelude, src) = match load(file) {
            Ok(x) => x,
            Err(code) => return code,
        };
        for s in prelude.iter().chain(std::iter::once(&src)) {
            if loaded.contains(&s.name) {
                continue;
            }
            loaded.push(s.name.clone());
            if let Err(f) = repl.load(s) {
                return report(&f, diag);
            }
        }
    }
    let stdin = io::stdin();
    let prompt = stdin.is_terminal();
    match repl.run(stdin.lock(), io::stdout(), io::stderr(), prompt) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("minioo: {e}");
            USAGE_ERROR
        }
    }
}
