//! Source printer. Output re-parses to a structurally identical program.

use super::ast::*;

/// Binding strength of an expression form; a child printed in a context
/// demanding more strength gets parentheses.
fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Lam(..)
        | ExprKind::Let(..)
        | ExprKind::If(..)
        | ExprKind::NUpCast(..) => 0,
        ExprKind::Annot(k, ..) if *k != AnnotKind::Ascribe => 0,
        ExprKind::UnionLeft(..) => 1,
        ExprKind::Extend(..) | ExprKind::Update(..) => 2,
        ExprKind::BinOp(BinOp::Eq, ..) => 3,
        ExprKind::BinOp(BinOp::Add | BinOp::Sub, ..) => 4,
        ExprKind::BinOp(BinOp::Mul | BinOp::Div, ..) => 5,
        ExprKind::Invoke(..) => 6,
        ExprKind::App(..) => {
            if matches!(spine(e).0.kind, ExprKind::Invoke(..)) {
                6
            } else {
                7
            }
        }
        ExprKind::LubCons(..)
        | ExprKind::UnionCons(..)
        | ExprKind::Nominate(..)
        | ExprKind::Anonymize(..) => 7,
        ExprKind::Lit(Lit::Int(n)) if *n < 0 => 7,
        ExprKind::Lit(Lit::Float(x)) if x.is_sign_negative() => 7,
        _ => 8,
    }
}

fn spine(e: &Expr) -> (&Expr, Vec<&Expr>) {
    let mut args = Vec::new();
    let mut cur = e;
    while let ExprKind::App(f, a) = &cur.kind {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_at(e: &Expr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Lit(l) => write_lit(l, out),
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::Builtin(b) => out.push_str(b.name()),
        ExprKind::Lam(ps, body) => {
            out.push('\\');
            out.push_str(&ps.join(" "));
            out.push_str(" -> ");
            write_at(body, 0, out);
        }
        ExprKind::App(..) => {
            let (head, args) = spine(e);
            if let ExprKind::Invoke(..) = head.kind {
                write_expr(head, out);
            } else {
                write_at(head, 7, out);
            }
            for a in args {
                out.push(' ');
                write_at(a, 8, out);
            }
        }
        ExprKind::Let(x, bound, body) => {
            out.push_str("let ");
            out.push_str(x);
            out.push_str(" = ");
            write_at(bound, 0, out);
            out.push_str(" in ");
            write_at(body, 0, out);
        }
        ExprKind::If(c, t, f) => {
            out.push_str("if ");
            write_at(c, 0, out);
            out.push_str(" then ");
            write_at(t, 0, out);
            out.push_str(" else ");
            write_at(f, 0, out);
        }
        ExprKind::Do(stmts) => {
            out.push_str("do { ");
            for (i, s) in stmts.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                match s {
                    Stmt::Bind(x, e, _) => {
                        out.push_str(x);
                        out.push_str(" <- ");
                        write_at(e, 0, out);
                    }
                    Stmt::Let(x, e, _) => {
                        out.push_str("let ");
                        out.push_str(x);
                        out.push_str(" = ");
                        write_at(e, 0, out);
                    }
                    Stmt::Expr(e) => write_at(e, 0, out),
                }
            }
            out.push_str(" }");
        }
        ExprKind::Invoke(r, l) => {
            write_at(r, 6, out);
            out.push_str(" # ");
            out.push_str(l);
        }
        ExprKind::EmptyRecord => out.push_str("emptyRecord"),
        ExprKind::Extend(l, v, rest) | ExprKind::Update(l, v, rest) => {
            out.push('(');
            out.push_str(l);
            out.push_str(" = ");
            write_at(v, 0, out);
            out.push_str(if matches!(e.kind, ExprKind::Extend(..)) {
                ") .*. "
            } else {
                ") .<. "
            });
            write_at(rest, 2, out);
        }
        ExprKind::UnionLeft(a, b) => {
            write_at(a, 2, out);
            out.push_str(" .<++. ");
            write_at(b, 1, out);
        }
        ExprKind::Annot(AnnotKind::Ascribe, inner, ty) => {
            out.push('(');
            write_at(inner, 0, out);
            out.push_str(" : ");
            write_type(ty, 0, out);
            out.push(')');
        }
        ExprKind::Annot(k, inner, ty) => {
            out.push_str(k.keyword());
            out.push(' ');
            write_at(inner, 3, out);
            out.push_str(" : ");
            write_type(ty, 0, out);
        }
        ExprKind::LubNil => out.push_str("lubNil"),
        ExprKind::UnionNil => out.push_str("unionNil"),
        ExprKind::LubCons(h, t) | ExprKind::UnionCons(h, t) => {
            out.push_str(if matches!(e.kind, ExprKind::LubCons(..)) {
                "lubCons "
            } else {
                "unionCons "
            });
            write_at(h, 8, out);
            out.push(' ');
            write_at(t, 8, out);
        }
        ExprKind::Nominate(n, x) => {
            out.push_str("nominate ");
            out.push_str(n);
            out.push(' ');
            write_at(x, 8, out);
        }
        ExprKind::Anonymize(x) => {
            out.push_str("anonymize ");
            write_at(x, 8, out);
        }
        ExprKind::NUpCast(x, n) => {
            out.push_str("nUpCast ");
            write_at(x, 3, out);
            out.push_str(" : ");
            out.push_str(n);
        }
        ExprKind::BinOp(op, a, b) => {
            let (l, r) = match op {
                BinOp::Eq => (4, 4),
                BinOp::Add | BinOp::Sub => (4, 5),
                BinOp::Mul | BinOp::Div => (5, 6),
            };
            write_at(a, l, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_at(b, r, out);
        }
        ExprKind::Pair(a, b) => {
            out.push('(');
            write_at(a, 0, out);
            out.push_str(", ");
            write_at(b, 0, out);
            out.push(')');
        }
        ExprKind::List(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_at(x, 0, out);
            }
            out.push(']');
        }
    }
}

fn write_lit(l: &Lit, out: &mut String) {
    match l {
        Lit::Int(n) => out.push_str(&n.to_string()),
        Lit::Float(x) => {
            let s = x.to_string();
            out.push_str(&s);
            if !s.contains('.') {
                out.push_str(".0");
            }
        }
        Lit::Str(s) => out.push_str(&quote(s)),
        Lit::Bool(b) => out.push_str(if *b { "True" } else { "False" }),
        Lit::Unit => out.push_str("()"),
    }
}

/// Quotes a string using the language's escapes.
pub fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

pub fn type_to_string(t: &TypeExpr) -> String {
    let mut out = String::new();
    write_type(t, 0, &mut out);
    out
}

fn type_level(t: &TypeExpr) -> u8 {
    match t {
        TypeExpr::Fun(..) => 0,
        TypeExpr::Io(_)
        | TypeExpr::Ref(_)
        | TypeExpr::NotFixed(_)
        | TypeExpr::Either(..)
        | TypeExpr::Nominal(..) => 1,
        TypeExpr::Named(_, args) if !args.is_empty() => 1,
        _ => 2,
    }
}

fn write_type(t: &TypeExpr, min: u8, out: &mut String) {
    if type_level(t) < min {
        out.push('(');
        write_type(t, 0, out);
        out.push(')');
        return;
    }
    match t {
        TypeExpr::Int => out.push_str("Int"),
        TypeExpr::Float => out.push_str("Float"),
        TypeExpr::Bool => out.push_str("Bool"),
        TypeExpr::String => out.push_str("String"),
        TypeExpr::Unit => out.push_str("()"),
        TypeExpr::Io(a) => {
            out.push_str("IO ");
            write_type(a, 2, out);
        }
        TypeExpr::Ref(a) => {
            out.push_str("Ref ");
            write_type(a, 2, out);
        }
        TypeExpr::NotFixed(a) => {
            out.push_str("NotFixed ");
            write_type(a, 2, out);
        }
        TypeExpr::Fun(a, b) => {
            write_type(a, 1, out);
            out.push_str(" -> ");
            write_type(b, 0, out);
        }
        TypeExpr::Record(fs) => {
            out.push('{');
            for (i, (l, t)) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(l);
                out.push_str(": ");
                write_type(t, 0, out);
            }
            out.push('}');
        }
        TypeExpr::Either(a, b) => {
            out.push_str("Either ");
            write_type(a, 2, out);
            out.push(' ');
            write_type(b, 2, out);
        }
        TypeExpr::Nominal(n, a) => {
            out.push_str("N ");
            out.push_str(n);
            out.push(' ');
            write_type(a, 2, out);
        }
        TypeExpr::List(a) => {
            out.push('[');
            write_type(a, 0, out);
            out.push(']');
        }
        TypeExpr::Pair(a, b) => {
            out.push('(');
            write_type(a, 0, out);
            out.push_str(", ");
            write_type(b, 0, out);
            out.push(')');
        }
        TypeExpr::Named(n, args) => {
            out.push_str(n);
            for a in args {
                out.push(' ');
                write_type(a, 2, out);
            }
        }
        TypeExpr::Var(v) => out.push_str(v),
    }
}

pub fn decl_to_string(d: &Decl) -> String {
    match &d.kind {
        DeclKind::Label(l) => format!("label {l}"),
        DeclKind::Nominal { name, parents } if parents.is_empty() => format!("nominal {name}"),
        DeclKind::Nominal { name, parents } => {
            format!("nominal {name} extends {{{}}}", parents.join(", "))
        }
        DeclKind::Type { name, params, body } => {
            let mut s = format!("type {name}");
            for p in params {
                s.push(' ');
                s.push_str(p);
            }
            s.push_str(" = ");
            s.push_str(&type_to_string(body));
            s
        }
        DeclKind::Let { name, params, body } => {
            let mut s = format!("let {name}");
            for p in params {
                s.push(' ');
                s.push_str(p);
            }
            s.push_str(" = ");
            s.push_str(&expr_to_string(body));
            s
        }
    }
}

pub fn program_to_string(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&decl_to_string(d));
        out.push('\n');
    }
    out
}
