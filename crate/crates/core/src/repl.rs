//! Interactive sessions: declarations accumulate, expressions are checked
//! and evaluated, actions are run.

use std::io::{self, BufRead, Write};

use crate::diagnostic::{render, DiagOptions};
use crate::driver::{Failure, Source};
use crate::eval::{show_value, Interpreter, Store, Value};
use crate::infer::{check_expr, check_program, Scheme, TypeEnv};
use crate::syntax::{parse_repl_input, parse_source, DeclKind, ParseContext, Program, ReplInput};
use crate::typesys::Type;

/// What one input produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Response {
    /// Text the program printed.
    pub output: String,
    /// Types, values and diagnostics for the user.
    pub message: String,
    pub quit: bool,
    /// The input is an unfinished prefix; more lines are needed.
    pub incomplete: bool,
}

pub struct Repl {
    ctx: ParseContext,
    env: TypeEnv,
    interp: Interpreter,
    diag: DiagOptions,
    entries: usize,
}

impl Repl {
    pub fn new(diag: DiagOptions) -> Repl {
        Repl {
            ctx: ParseContext::default(),
            env: TypeEnv::new(),
            interp: Interpreter::new(Store::capture()),
            diag,
            entries: 0,
        }
    }

    /// Loads a file's declarations into the session.
    pub fn load(&mut self, src: &Source) -> Result<(), Failure> {
        let mut ctx = self.ctx.clone();
        let prog = parse_source(&src.text, &src.name, &mut ctx).map_err(Failure::Syntax)?;
        let mut env = self.env.clone();
        let out = check_program(&prog, &mut env);
        if !out.errors.is_empty() {
            return Err(Failure::Type(out.errors));
        }
        self.ctx = ctx;
        self.env = env;
        self.interp.load(&prog, &out.elabs);
        Ok(())
    }

    fn fail(&self, f: Failure) -> Response {
        Response {
            message: render(&f.lines(), self.diag),
            ..Response::default()
        }
    }

    /// Handles one complete entry.
    pub fn feed(&mut self, text: &str) -> Response {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Response::default();
        }
        if trimmed == ":quit" || trimmed == ":q" {
            return Response {
                quit: true,
                ..Response::default()
            };
        }
        self.entries += 1;
        let file = format!("<repl:{}>", self.entries);
        if let Some(rest) = trimmed.strip_prefix(":t ").or_else(|| trimmed.strip_prefix(":type ")) {
            return self.type_of(rest, &file);
        }
        if trimmed.starts_with(':') {
            return Response {
                message: format!("unknown command `{trimmed}`; try :t EXPR or :quit\n"),
                ..Response::default()
            };
        }
        let input = match parse_repl_input(text, &file, &mut self.ctx) {
            Ok(i) => i,
            Err(e) if e.at_eof => {
                return Response {
                    incomplete: true,
                    ..Response::default()
                }
            }
            Err(e) => return self.fail(Failure::Syntax(e)),
        };
        let res = match input {
            ReplInput::Decl(d) => self.declare(Program { decls: vec![d] }),
            ReplInput::Bind(x, e) => self.bind(&x, &e),
            ReplInput::Expr(e) => self.evaluate(&e),
        };
        let output = self.interp.store_mut().take_output();
        match res {
            Ok(message) => Response {
                output,
                message,
                ..Response::default()
            },
            Err(f) => Response {
                output,
                ..self.fail(f)
            },
        }
    }

    fn type_of(&mut self, text: &str, file: &str) -> Response {
        let mut ctx = self.ctx.clone();
        let e = match parse_repl_input(text, file, &mut ctx) {
            Ok(ReplInput::Expr(e)) => e,
            Ok(_) => {
                return Response {
                    message: ":t expects an expression\n".into(),
                    ..Response::default()
                }
            }
            Err(e) => return self.fail(Failure::Syntax(e)),
        };
        match check_expr(&e, &self.env) {
            Ok((s, _)) => Response {
                message: format!("{s}\n"),
                ..Response::default()
            },
            Err(es) => self.fail(Failure::Type(es)),
        }
    }

    fn declare(&mut self, prog: Program) -> Result<String, Failure> {
        let mut env = self.env.clone();
        let out = check_program(&prog, &mut env);
        if !out.errors.is_empty() {
            return Err(Failure::Type(out.errors));
        }
        self.env = env;
        self.interp.load(&prog, &out.elabs);
        Ok(match &prog.decls[0].kind {
            DeclKind::Let { name, .. } => format!("{name} :: {}\n", out.schemes[0].1),
            _ => String::new(),
        })
    }

    fn bind(&mut self, x: &str, e: &crate::syntax::Expr) -> Result<String, Failure> {
        let (scheme, elabs) = check_expr(e, &self.env).map_err(Failure::Type)?;
        let Type::Action(inner) = &scheme.ty else {
            return Err(Failure::Type(vec![crate::infer::TypeError::new(
                crate::infer::ErrorKind::Mismatch,
                &e.span,
                format!("only actions can be bound with `<-`; this has type `{scheme}`"),
            )]));
        };
        self.interp.add_elaborations(&elabs);
        let v = self.interp.eval_expr(e).map_err(Failure::Fault)?;
        let r = self.interp.run_action(v, &e.span).map_err(Failure::Fault)?;
        let bound = Scheme {
            vars: scheme.vars.clone(),
            preds: scheme.preds.clone(),
            ty: (**inner).clone(),
        };
        self.interp.define_value(x, r);
        let msg = format!("{x} :: {bound}\n");
        self.env.schemes.insert(x.to_string(), bound);
        Ok(msg)
    }

    fn evaluate(&mut self, e: &crate::syntax::Expr) -> Result<String, Failure> {
        let (scheme, elabs) = check_expr(e, &self.env).map_err(Failure::Type)?;
        self.interp.add_elaborations(&elabs);
        let v = self.interp.eval_expr(e).map_err(Failure::Fault)?;
        let (v, ty) = match &scheme.ty {
            Type::Action(t) => (self.interp.run_action(v, &e.span).map_err(Failure::Fault)?, (**t).clone()),
            t => (v, t.clone()),
        };
        Ok(describe(&v, &ty, &scheme))
    }

    /// Reads entries from `input` until end of input or `:quit`.
    pub fn run(&mut self, input: impl BufRead, mut out: impl Write, mut err: impl Write, prompt: bool) -> io::Result<()> {
        let mut pending = String::new();
        let mut lines = input.lines();
        loop {
            if prompt {
                write!(out, "{}", if pending.is_empty() { "minioo> " } else { "      | " })?;
                out.flush()?;
            }
            let Some(line) = lines.next() else {
                if !pending.trim().is_empty() {
                    let r = self.feed_final(&pending);
                    self.emit(&r, &mut out, &mut err)?;
                }
                return Ok(());
            };
            let line = line?;
            pending.push_str(&line);
            pending.push('\n');
            let r = self.feed(&pending);
            if r.incomplete {
                if line.trim().is_empty() {
                    let r = self.feed_final(&pending);
                    pending.clear();
                    self.emit(&r, &mut out, &mut err)?;
                }
                continue;
            }
            pending.clear();
            self.emit(&r, &mut out, &mut err)?;
            if r.quit {
                return Ok(());
            }
        }
    }

    /// Like [`Repl::feed`], but an unfinished entry is a syntax error.
    fn feed_final(&mut self, text: &str) -> Response {
        let r = self.feed(text);
        if !r.incomplete {
            return r;
        }
        let file = format!("<repl:{}>", self.entries);
        match parse_repl_input(text, &file, &mut self.ctx.clone()) {
            Err(e) => self.fail(Failure::Syntax(e)),
            Ok(_) => r,
        }
    }

    fn emit(&self, r: &Response, out: &mut impl Write, err: &mut impl Write) -> io::Result<()> {
        out.write_all(r.output.as_bytes())?;
        out.flush()?;
        if r.message.contains("error[") || r.message.contains("runtime fault[") {
            err.write_all(r.message.as_bytes())?;
            err.flush()
        } else {
            out.write_all(r.message.as_bytes())?;
            out.flush()
        }
    }
}

fn describe(v: &Value, ty: &Type, scheme: &Scheme) -> String {
    if *ty == Type::Unit {
        return String::new();
    }
    match show_value(v) {
        Some(s) => format!("{s}\n"),
        None => format!("<{}> :: {scheme}\n", v.kind_name()),
    }
}
