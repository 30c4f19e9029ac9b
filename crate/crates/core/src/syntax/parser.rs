//! Recursive-descent parser.
//!
//! Precedence from loosest to tightest: lambda/let/if/annotations,
//! `.<++.`, the record operators `.*.` `.<.`, `==`, `+ -`, `* /`, method
//! invocation `#`, application. Record operators are right-associative.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::span::SourceSpan;
use super::SyntaxError;

/// Names declared so far. Labels, nominations and named types must be
/// declared before they are used; the context grows as declarations are
/// parsed and is shared between the prelude, a program and REPL lines.
#[derive(Clone, Debug, Default)]
pub struct ParseContext {
    pub labels: BTreeSet<String>,
    pub nominations: BTreeSet<String>,
    /// Named type to parameter count.
    pub types: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReplInput {
    Decl(Decl),
    Bind(String, Expr),
    Expr(Expr),
}

const SPECIAL_NAMES: &[&str] = &[
    "emptyRecord",
    "lubNil",
    "lubCons",
    "unionNil",
    "unionCons",
    "nominate",
    "anonymize",
    "narrow",
    "deepNarrow",
    "downCast",
    "dynUpCast",
    "dynDownCast",
    "nUpCast",
    "True",
    "False",
];

pub fn is_reserved(name: &str) -> bool {
    SPECIAL_NAMES.contains(&name) || Builtin::from_name(name).is_some()
}

fn is_upper(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Tokenizes and parses a whole source file.
pub fn parse_source(
    source: &str,
    file: &str,
    ctx: &mut ParseContext,
) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source, file)?;
    parse_program(tokens, ctx)
}

pub fn parse_program(tokens: Vec<Token>, ctx: &mut ParseContext) -> Result<Program, SyntaxError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        ctx,
    };
    let mut decls: Vec<Decl> = Vec::new();
    let mut bound = BTreeSet::new();
    while !p.at(&TokenKind::Eof) {
        let d = p.decl()?;
        if let DeclKind::Let { name, .. } = &d.kind {
            if !bound.insert(name.clone()) {
                return Err(SyntaxError::name(
                    d.span.clone(),
                    format!("`{name}` is defined more than once"),
                ));
            }
        }
        decls.push(d);
    }
    Ok(Program { decls })
}

/// Parses one REPL entry: a declaration, an `x <- e` binding or an
/// expression.
pub fn parse_repl_input(
    text: &str,
    file: &str,
    ctx: &mut ParseContext,
) -> Result<ReplInput, SyntaxError> {
    let tokens = tokenize(text, file)?;
    let mut scratch = ctx.clone();
    let mut p = Parser {
        tokens,
        pos: 0,
        ctx: &mut scratch,
    };
    let input = match p.peek_kind() {
        TokenKind::Keyword(Keyword::Label | Keyword::Nominal | Keyword::Type) => {
            ReplInput::Decl(p.decl()?)
        }
        TokenKind::Keyword(Keyword::Let) => {
            let save = p.pos;
            let d = p.decl()?;
            if p.at(&TokenKind::Keyword(Keyword::In)) {
                p.pos = save;
                ReplInput::Expr(p.expr()?)
            } else {
                ReplInput::Decl(d)
            }
        }
        TokenKind::Ident(name) if p.nth_kind(1) == &TokenKind::BindArrow => {
            let name = name.clone();
            let span = p.peek().span.clone();
            p.check_bindable(&name, &span)?;
            p.pos += 2;
            ReplInput::Bind(name, p.expr()?)
        }
        _ => ReplInput::Expr(p.expr()?),
    };
    p.expect(&TokenKind::Eof)?;
    *ctx = scratch;
    Ok(input)
}

struct Parser<'c> {
    tokens: Vec<Token>,
    pos: usize,
    ctx: &'c mut ParseContext,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'c> Parser<'c> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn nth_kind(&self, n: usize) -> &TokenKind {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)].kind
    }

    fn at(&self, k: &TokenKind) -> bool {
        self.peek_kind() == k
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, k: &TokenKind) -> bool {
        if self.at(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> SyntaxError {
        let t = self.peek();
        let mut e = SyntaxError::parse(t.span.clone(), format!("expected {expected}, found {}", t.kind));
        e.at_eof = t.kind == TokenKind::Eof;
        e
    }

    fn expect(&mut self, k: &TokenKind) -> PResult<Token> {
        if self.at(k) {
            Ok(self.bump())
        } else {
            Err(self.error_here(&k.to_string()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek_kind().clone() {
            TokenKind::Ident(s) => {
                let t = self.bump();
                Ok((s, t.span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn lower_ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek_kind() {
            TokenKind::Ident(s) if !is_upper(s) => self.ident(what),
            _ => Err(self.error_here(what)),
        }
    }

    fn upper_ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek_kind() {
            TokenKind::Ident(s) if is_upper(s) => self.ident(what),
            _ => Err(self.error_here(what)),
        }
    }

    fn label(&mut self) -> PResult<String> {
        let (l, span) = self.lower_ident("a label")?;
        if !self.ctx.labels.contains(&l) {
            return Err(SyntaxError::name(span, format!("undeclared label `{l}`")));
        }
        Ok(l)
    }

    fn nomination(&mut self) -> PResult<String> {
        let (n, span) = self.upper_ident("a nomination name")?;
        if !self.ctx.nominations.contains(&n) {
            return Err(SyntaxError::name(span, format!("undeclared nomination `{n}`")));
        }
        Ok(n)
    }

    fn check_bindable(&self, name: &str, span: &SourceSpan) -> PResult<()> {
        if is_reserved(name) {
            return Err(SyntaxError::name(
                span.clone(),
                format!("`{name}` is a reserved name and cannot be bound"),
            ));
        }
        if is_upper(name) {
            return Err(SyntaxError::parse(
                span.clone(),
                format!("variable names must start with a lowercase letter, found `{name}`"),
            ));
        }
        Ok(())
    }

    fn binder(&mut self) -> PResult<String> {
        let (n, span) = self.ident("a variable name")?;
        self.check_bindable(&n, &span)?;
        Ok(n)
    }

    // ---- declarations ----

    fn decl(&mut self) -> PResult<Decl> {
        let start = self.peek().span.clone();
        let kind = match self.peek_kind() {
            TokenKind::Keyword(Keyword::Label) => {
                self.bump();
                let (l, _) = self.lower_ident("a label name")?;
                self.ctx.labels.insert(l.clone());
                DeclKind::Label(l)
            }
            TokenKind::Keyword(Keyword::Nominal) => {
                self.bump();
                let (name, span) = self.upper_ident("a nomination name")?;
                if self.ctx.nominations.contains(&name) {
                    return Err(SyntaxError::name(
                        span,
                        format!("nomination `{name}` is already declared"),
                    ));
                }
                let mut parents = Vec::new();
                if self.eat(&TokenKind::Keyword(Keyword::Extends)) {
                    self.expect(&TokenKind::LBrace)?;
                    if !self.at(&TokenKind::RBrace) {
                        loop {
                            parents.push(self.nomination()?);
                            if !self.eat(&TokenKind::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(&TokenKind::RBrace)?;
                }
                self.ctx.nominations.insert(name.clone());
                DeclKind::Nominal { name, parents }
            }
            TokenKind::Keyword(Keyword::Type) => {
                self.bump();
                let (name, span) = self.upper_ident("a type name")?;
                if self.ctx.types.contains_key(&name) || is_builtin_type(&name) {
                    return Err(SyntaxError::name(
                        span,
                        format!("type `{name}` is already declared"),
                    ));
                }
                let mut params = Vec::new();
                while let TokenKind::Ident(p) = self.peek_kind() {
                    if is_upper(p) {
                        break;
                    }
                    params.push(self.bump_ident());
                }
                self.expect(&TokenKind::Equals)?;
                self.ctx.types.insert(name.clone(), params.len());
                let body_start = self.peek().span.clone();
                let body = match self.ty() {
                    Ok(b) => b,
                    Err(e) => {
                        self.ctx.types.remove(&name);
                        return Err(e);
                    }
                };
                let mut vars = BTreeSet::new();
                type_vars(&body, &mut vars);
                if let Some(v) = vars.iter().find(|v| !params.contains(v)) {
                    self.ctx.types.remove(&name);
                    return Err(SyntaxError::name(
                        body_start,
                        format!("type variable `{v}` is not a parameter of `{name}`"),
                    ));
                }
                DeclKind::Type { name, params, body }
            }
            TokenKind::Keyword(Keyword::Let) => {
                self.bump();
                let name = self.binder()?;
                let mut params = Vec::new();
                while !self.at(&TokenKind::Equals) {
                    params.push(self.binder()?);
                }
                self.expect(&TokenKind::Equals)?;
                let body = self.expr()?;
                DeclKind::Let { name, params, body }
            }
            _ => return Err(self.error_here("a declaration (`label`, `nominal`, `type` or `let`)")),
        };
        Ok(Decl {
            kind,
            span: start.to(&self.prev_span()),
        })
    }

    fn bump_ident(&mut self) -> String {
        match self.bump().kind {
            TokenKind::Ident(s) => s,
            _ => unreachable!("caller checked for an identifier"),
        }
    }

    // ---- expressions ----

    fn mk(&self, kind: ExprKind, start: &SourceSpan) -> Expr {
        Expr::new(kind, start.to(&self.prev_span()))
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        match self.peek_kind().clone() {
            TokenKind::Backslash => {
                self.bump();
                let mut params = vec![self.binder()?];
                while !self.at(&TokenKind::Arrow) {
                    params.push(self.binder()?);
                }
                self.expect(&TokenKind::Arrow)?;
                let body = self.expr()?;
                Ok(self.mk(ExprKind::Lam(params, Box::new(body)), &start))
            }
            TokenKind::Keyword(Keyword::Let) => {
                self.bump();
                let (name, bound) = self.let_binding(&start)?;
                self.expect(&TokenKind::Keyword(Keyword::In))?;
                let body = self.expr()?;
                Ok(self.mk(ExprKind::Let(name, Box::new(bound), Box::new(body)), &start))
            }
            TokenKind::Keyword(Keyword::If) => {
                self.bump();
                let c = self.expr()?;
                self.expect(&TokenKind::Keyword(Keyword::Then))?;
                let t = self.expr()?;
                self.expect(&TokenKind::Keyword(Keyword::Else))?;
                let e = self.expr()?;
                Ok(self.mk(ExprKind::If(Box::new(c), Box::new(t), Box::new(e)), &start))
            }
            TokenKind::Ident(ref s) if AnnotKind::from_keyword(s).is_some() => {
                let kind = AnnotKind::from_keyword(s).unwrap();
                self.bump();
                let e = self.eq_expr()?;
                self.expect(&TokenKind::Colon)?;
                let ty = self.ty()?;
                Ok(self.mk(ExprKind::Annot(kind, Box::new(e), ty), &start))
            }
            TokenKind::Ident(ref s) if s == "nUpCast" => {
                self.bump();
                let e = self.eq_expr()?;
                self.expect(&TokenKind::Colon)?;
                let n = self.nomination()?;
                Ok(self.mk(ExprKind::NUpCast(Box::new(e), n), &start))
            }
            _ => self.union_expr(),
        }
    }

    /// `x params = e`, the params becoming a lambda.
    fn let_binding(&mut self, start: &SourceSpan) -> PResult<(String, Expr)> {
        let name = self.binder()?;
        let mut params = Vec::new();
        while !self.at(&TokenKind::Equals) {
            params.push(self.binder()?);
        }
        self.expect(&TokenKind::Equals)?;
        let body = self.expr()?;
        if params.is_empty() {
            Ok((name, body))
        } else {
            Ok((name, self.mk(ExprKind::Lam(params, Box::new(body)), start)))
        }
    }

    fn at_field_pair(&self) -> bool {
        self.at(&TokenKind::LParen)
            && matches!(self.nth_kind(1), TokenKind::Ident(_))
            && self.nth_kind(2) == &TokenKind::Equals
    }

    fn field_pair(&mut self) -> PResult<(String, Expr)> {
        self.expect(&TokenKind::LParen)?;
        let l = self.label()?;
        self.expect(&TokenKind::Equals)?;
        let v = self.expr()?;
        self.expect(&TokenKind::RParen)?;
        Ok((l, v))
    }

    /// `a .<++. b`, binding looser than extension and update.
    fn union_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let lhs = self.rec_expr()?;
        if self.eat(&TokenKind::UnionLeft) {
            let rhs = match self.peek_kind() {
                TokenKind::Ident(s) if AnnotKind::from_keyword(s).is_some() || s == "nUpCast" => self.expr()?,
                _ => self.union_expr()?,
            };
            return Ok(self.mk(ExprKind::UnionLeft(Box::new(lhs), Box::new(rhs)), &start));
        }
        Ok(lhs)
    }

    fn rec_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        if self.at_field_pair() {
            let (l, v) = self.field_pair()?;
            let extend = match self.peek_kind() {
                TokenKind::Extend => true,
                TokenKind::Update => false,
                _ => return Err(self.error_here("`.*.` or `.<.` after a field pair")),
            };
            self.bump();
            let rest = self.rec_operand()?;
            let kind = if extend {
                ExprKind::Extend(l, Box::new(v), Box::new(rest))
            } else {
                ExprKind::Update(l, Box::new(v), Box::new(rest))
            };
            return Ok(self.mk(kind, &start));
        }
        let lhs = self.eq_expr()?;
        match self.peek_kind() {
            TokenKind::Extend | TokenKind::Update => Err(SyntaxError::parse(
                self.peek().span.clone(),
                format!(
                    "the left operand of {} must be a field pair `(label = expr)`",
                    self.peek_kind()
                ),
            )),
            _ => Ok(lhs),
        }
    }

    /// Right operand of `.*.` and `.<.`: another extension or update, or
    /// an annotated form.
    fn rec_operand(&mut self) -> PResult<Expr> {
        match self.peek_kind() {
            TokenKind::Ident(s) if AnnotKind::from_keyword(s).is_some() || s == "nUpCast" => {
                self.expr()
            }
            _ => self.rec_expr(),
        }
    }

    fn eq_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let lhs = self.add_expr()?;
        if self.eat(&TokenKind::EqEq) {
            let rhs = self.add_expr()?;
            if self.at(&TokenKind::EqEq) {
                return Err(SyntaxError::parse(
                    self.peek().span.clone(),
                    "`==` is non-associative; add parentheses",
                ));
            }
            return Ok(self.mk(ExprKind::BinOp(BinOp::Eq, Box::new(lhs), Box::new(rhs)), &start));
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = self.mk(ExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), &start);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let mut lhs = self.hash_expr()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.hash_expr()?;
            lhs = self.mk(ExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), &start);
        }
    }

    fn hash_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let mut e = self.app_expr()?;
        while self.eat(&TokenKind::Hash) {
            let l = self.label()?;
            e = self.mk(ExprKind::Invoke(Box::new(e), l), &start);
            while self.at_atom_start() {
                let arg = self.atom(false)?;
                e = self.mk(ExprKind::App(Box::new(e), Box::new(arg)), &start);
            }
        }
        Ok(e)
    }

    fn at_atom_start(&self) -> bool {
        match self.peek_kind() {
            TokenKind::Int(_)
            | TokenKind::Float(_)
            | TokenKind::Str(_)
            | TokenKind::LParen
            | TokenKind::LBrace
            | TokenKind::LBracket
            | TokenKind::Keyword(Keyword::Do) => true,
            TokenKind::Ident(s) => !matches!(
                s.as_str(),
                "lubCons" | "unionCons" | "nominate" | "anonymize" | "nUpCast"
            ) && AnnotKind::from_keyword(s).is_none(),
            _ => false,
        }
    }

    fn app_expr(&mut self) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let mut f = match self.peek_kind().clone() {
            TokenKind::Ident(s) if s == "lubCons" || s == "unionCons" => {
                self.bump();
                let h = self.atom(false)?;
                let t = self.atom(false)?;
                let kind = if s == "lubCons" {
                    ExprKind::LubCons(Box::new(h), Box::new(t))
                } else {
                    ExprKind::UnionCons(Box::new(h), Box::new(t))
                };
                self.mk(kind, &start)
            }
            TokenKind::Ident(s) if s == "nominate" => {
                self.bump();
                let n = self.nomination()?;
                let e = self.atom(false)?;
                self.mk(ExprKind::Nominate(n, Box::new(e)), &start)
            }
            TokenKind::Ident(s) if s == "anonymize" => {
                self.bump();
                let e = self.atom(false)?;
                self.mk(ExprKind::Anonymize(Box::new(e)), &start)
            }
            _ => self.atom(true)?,
        };
        while self.at_atom_start() {
            let arg = self.atom(false)?;
            f = self.mk(ExprKind::App(Box::new(f), Box::new(arg)), &start);
        }
        Ok(f)
    }

    fn atom(&mut self, allow_neg: bool) -> PResult<Expr> {
        let start = self.peek().span.clone();
        let kind = match self.peek_kind().clone() {
            TokenKind::Minus if allow_neg => {
                self.bump();
                match self.peek_kind().clone() {
                    TokenKind::Int(n) => {
                        self.bump();
                        ExprKind::Lit(Lit::Int(-n))
                    }
                    TokenKind::Float(x) => {
                        self.bump();
                        ExprKind::Lit(Lit::Float(-x))
                    }
                    _ => return Err(self.error_here("a numeric literal after unary `-`")),
                }
            }
            TokenKind::Int(n) => {
                self.bump();
                ExprKind::Lit(Lit::Int(n))
            }
            TokenKind::Float(x) => {
                self.bump();
                ExprKind::Lit(Lit::Float(x))
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Lit(Lit::Str(s))
            }
            TokenKind::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "True" => ExprKind::Lit(Lit::Bool(true)),
                    "False" => ExprKind::Lit(Lit::Bool(false)),
                    "emptyRecord" => ExprKind::EmptyRecord,
                    "lubNil" => ExprKind::LubNil,
                    "unionNil" => ExprKind::UnionNil,
                    "lubCons" | "unionCons" | "nominate" | "anonymize" | "nUpCast" | "narrow"
                    | "deepNarrow" | "downCast" | "dynUpCast" | "dynDownCast" => {
                        return Err(SyntaxError::parse(
                            start,
                            format!("`{s}` cannot appear here; add parentheses around the form"),
                        ))
                    }
                    _ => {
                        if let Some(b) = Builtin::from_name(&s) {
                            ExprKind::Builtin(b)
                        } else if is_upper(&s) {
                            return Err(SyntaxError::parse(
                                start,
                                format!("unexpected constructor name `{s}` in expression"),
                            ));
                        } else {
                            ExprKind::Var(s)
                        }
                    }
                }
            }
            TokenKind::LParen => {
                if self.nth_kind(1) == &TokenKind::RParen {
                    self.bump();
                    self.bump();
                    ExprKind::Lit(Lit::Unit)
                } else if self.at_field_pair() {
                    self.field_pair()?;
                    return Err(self.error_here("`.*.` or `.<.` after a field pair"));
                } else {
                    self.bump();
                    let e = self.expr()?;
                    if self.eat(&TokenKind::Comma) {
                        let e2 = self.expr()?;
                        self.expect(&TokenKind::RParen)?;
                        ExprKind::Pair(Box::new(e), Box::new(e2))
                    } else if self.eat(&TokenKind::Colon) {
                        let ty = self.ty()?;
                        self.expect(&TokenKind::RParen)?;
                        ExprKind::Annot(AnnotKind::Ascribe, Box::new(e), ty)
                    } else {
                        self.expect(&TokenKind::RParen)?;
                        return Ok(e);
                    }
                }
            }
            TokenKind::LBrace => {
                self.bump();
                let mut fields = Vec::new();
                if !self.at(&TokenKind::RBrace) {
                    loop {
                        let lspan = self.peek().span.clone();
                        let l = self.label()?;
                        self.expect(&TokenKind::Equals)?;
                        let v = self.expr()?;
                        fields.push((l, v, lspan));
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&TokenKind::RBrace)?;
                let end = self.prev_span();
                let mut acc = Expr::new(ExprKind::EmptyRecord, end.clone());
                for (l, v, lspan) in fields.into_iter().rev() {
                    acc = Expr::new(
                        ExprKind::Extend(l, Box::new(v), Box::new(acc)),
                        lspan.to(&end),
                    );
                }
                acc.span = start.to(&end);
                return Ok(acc);
            }
            TokenKind::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&TokenKind::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&TokenKind::RBracket)?;
                ExprKind::List(items)
            }
            TokenKind::Keyword(Keyword::Do) => {
                self.bump();
                ExprKind::Do(self.do_block()?)
            }
            _ => return Err(self.error_here("an expression")),
        };
        Ok(self.mk(kind, &start))
    }

    fn do_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(&TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        loop {
            if self.at(&TokenKind::RBrace) && !stmts.is_empty() {
                break;
            }
            stmts.push(self.stmt()?);
            if !self.eat(&TokenKind::Semi) {
                break;
            }
        }
        let close = self.expect(&TokenKind::RBrace)?;
        match stmts.last() {
            Some(Stmt::Expr(_)) => Ok(stmts),
            Some(s) => Err(SyntaxError::parse(
                s.span().clone(),
                "the last statement of a do block must be an expression",
            )),
            None => Err(SyntaxError::parse(close.span, "empty do block")),
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().span.clone();
        match self.peek_kind().clone() {
            TokenKind::Ident(name) if self.nth_kind(1) == &TokenKind::BindArrow => {
                self.check_bindable(&name, &start)?;
                self.pos += 2;
                let e = self.expr()?;
                Ok(Stmt::Bind(name, e, start.to(&self.prev_span())))
            }
            TokenKind::Keyword(Keyword::Let) => {
                self.bump();
                let (name, bound) = self.let_binding(&start)?;
                if self.eat(&TokenKind::Keyword(Keyword::In)) {
                    let body = self.expr()?;
                    let e = self.mk(ExprKind::Let(name, Box::new(bound), Box::new(body)), &start);
                    Ok(Stmt::Expr(e))
                } else {
                    Ok(Stmt::Let(name, bound, start.to(&self.prev_span())))
                }
            }
            _ => Ok(Stmt::Expr(self.expr()?)),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<TypeExpr> {
        let lhs = self.btype()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.ty()?;
            return Ok(TypeExpr::Fun(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn btype(&mut self) -> PResult<TypeExpr> {
        let TokenKind::Ident(name) = self.peek_kind().clone() else {
            return self.aty();
        };
        match name.as_str() {
            "IO" => {
                self.bump();
                Ok(TypeExpr::Io(Box::new(self.aty()?)))
            }
            "Ref" => {
                self.bump();
                Ok(TypeExpr::Ref(Box::new(self.aty()?)))
            }
            "NotFixed" => {
                self.bump();
                Ok(TypeExpr::NotFixed(Box::new(self.aty()?)))
            }
            "Either" => {
                self.bump();
                let a = self.aty()?;
                let b = self.aty()?;
                Ok(TypeExpr::Either(Box::new(a), Box::new(b)))
            }
            "N" => {
                self.bump();
                let n = self.nomination()?;
                Ok(TypeExpr::Nominal(n, Box::new(self.aty()?)))
            }
            _ if self.ctx.types.get(&name).is_some_and(|&n| n > 0) => {
                let span = self.bump().span;
                let arity = self.ctx.types[&name];
                let mut args = Vec::new();
                while args.len() < arity && self.at_aty_start() {
                    args.push(self.aty()?);
                }
                if args.len() != arity {
                    return Err(SyntaxError::parse(
                        span,
                        format!("type `{name}` expects {arity} argument(s), found {}", args.len()),
                    ));
                }
                Ok(TypeExpr::Named(name, args))
            }
            _ => self.aty(),
        }
    }

    fn at_aty_start(&self) -> bool {
        matches!(
            self.peek_kind(),
            TokenKind::Ident(_) | TokenKind::LParen | TokenKind::LBrace | TokenKind::LBracket
        )
    }

    fn aty(&mut self) -> PResult<TypeExpr> {
        let start = self.peek().span.clone();
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "Int" => Ok(TypeExpr::Int),
                    "Float" => Ok(TypeExpr::Float),
                    "Bool" => Ok(TypeExpr::Bool),
                    "String" => Ok(TypeExpr::String),
                    "IO" | "Ref" | "NotFixed" | "Either" | "N" => Err(SyntaxError::parse(
                        start,
                        format!("type constructor `{name}` needs arguments here; add parentheses"),
                    )),
                    _ if !is_upper(&name) => Ok(TypeExpr::Var(name)),
                    _ => match self.ctx.types.get(&name) {
                        Some(0) => Ok(TypeExpr::Named(name, Vec::new())),
                        Some(n) => Err(SyntaxError::parse(
                            start,
                            format!("type `{name}` expects {n} argument(s); add parentheses"),
                        )),
                        None => Err(SyntaxError::name(start, format!("undeclared type `{name}`"))),
                    },
                }
            }
            TokenKind::LParen => {
                self.bump();
                if self.eat(&TokenKind::RParen) {
                    return Ok(TypeExpr::Unit);
                }
                let a = self.ty()?;
                if self.eat(&TokenKind::Comma) {
                    let b = self.ty()?;
                    self.expect(&TokenKind::RParen)?;
                    return Ok(TypeExpr::Pair(Box::new(a), Box::new(b)));
                }
                self.expect(&TokenKind::RParen)?;
                Ok(a)
            }
            TokenKind::LBrace => {
                self.bump();
                let mut fields: Vec<(String, TypeExpr)> = Vec::new();
                if !self.at(&TokenKind::RBrace) {
                    loop {
                        let lspan = self.peek().span.clone();
                        let l = self.label()?;
                        if fields.iter().any(|(m, _)| *m == l) {
                            return Err(SyntaxError::parse(
                                lspan,
                                format!("label `{l}` occurs twice in a record type"),
                            ));
                        }
                        self.expect(&TokenKind::Colon)?;
                        fields.push((l, self.ty()?));
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&TokenKind::RBrace)?;
                Ok(TypeExpr::Record(fields))
            }
            TokenKind::LBracket => {
                self.bump();
                let t = self.ty()?;
                self.expect(&TokenKind::RBracket)?;
                Ok(TypeExpr::List(Box::new(t)))
            }
            _ => Err(self.error_here("a type")),
        }
    }
}

fn is_builtin_type(name: &str) -> bool {
    matches!(
        name,
        "Int" | "Float" | "Bool" | "String" | "IO" | "Ref" | "NotFixed" | "Either" | "N"
    )
}

pub fn type_vars(t: &TypeExpr, out: &mut BTreeSet<String>) {
    match t {
        TypeExpr::Var(v) => {
            out.insert(v.clone());
        }
        TypeExpr::Int | TypeExpr::Float | TypeExpr::Bool | TypeExpr::String | TypeExpr::Unit => {}
        TypeExpr::Io(a) | TypeExpr::Ref(a) | TypeExpr::NotFixed(a) | TypeExpr::List(a) => {
            type_vars(a, out)
        }
        TypeExpr::Nominal(_, a) => type_vars(a, out),
        TypeExpr::Fun(a, b) | TypeExpr::Either(a, b) | TypeExpr::Pair(a, b) => {
            type_vars(a, out);
            type_vars(b, out);
        }
        TypeExpr::Record(fs) => fs.iter().for_each(|(_, t)| type_vars(t, out)),
        TypeExpr::Named(_, args) => args.iter().for_each(|t| type_vars(t, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_with(labels: &[&str]) -> ParseContext {
        let mut c = ParseContext::default();
        c.labels.extend(labels.iter().map(|s| s.to_string()));
        c
    }

    fn parse(src: &str, labels: &[&str]) -> Program {
        parse_source(src, "t.moo", &mut ctx_with(labels)).unwrap()
    }

    fn body(p: &Program) -> &Expr {
        match &p.decls.last().unwrap().kind {
            DeclKind::Let { body, .. } => body,
            k => panic!("not a binding: {k:?}"),
        }
    }

    #[test]
    fn identity_binding() {
        let p = parse("let id = \\x -> x", &[]);
        assert_eq!(p.decls.len(), 1);
        assert!(matches!(&body(&p).kind, ExprKind::Lam(ps, _) if ps == &["x".to_string()]));
    }

    #[test]
    fn extend_over_super() {
        let p = parse("let f super color = (getColor = return color) .*. super", &["getColor"]);
        match &body(&p).kind {
            ExprKind::Extend(l, v, rest) => {
                assert_eq!(l, "getColor");
                assert!(matches!(&v.kind, ExprKind::App(..)));
                assert!(matches!(&rest.kind, ExprKind::Var(s) if s == "super"));
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn record_operators_nest_to_the_right() {
        let p = parse("let r = (a = 1) .*. (b = 2) .*. emptyRecord", &["a", "b"]);
        match &body(&p).kind {
            ExprKind::Extend(a, _, rest) => {
                assert_eq!(a, "a");
                assert!(matches!(&rest.kind, ExprKind::Extend(b, _, _) if b == "b"));
            }
            k => panic!("{k:?}"),
        }
        let p = parse("let r = x .<++. y .<++. z", &[]);
        match &body(&p).kind {
            ExprKind::UnionLeft(x, rest) => {
                assert!(matches!(&x.kind, ExprKind::Var(_)));
                assert!(matches!(&rest.kind, ExprKind::UnionLeft(..)));
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn method_arguments_bind_after_hash() {
        let p = parse("let m p = p # moveX 3", &["moveX"]);
        match &body(&p).kind {
            ExprKind::App(f, a) => {
                assert!(matches!(&f.kind, ExprKind::Invoke(_, l) if l == "moveX"));
                assert!(matches!(&a.kind, ExprKind::Lit(Lit::Int(3))));
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn duplicate_binding_is_name_error() {
        let err = parse_source("let f = 1\nlet f = 2", "t.moo", &mut ParseContext::default()).unwrap_err();
        assert_eq!(err.kind, super::super::SyntaxErrorKind::NameError);
        assert!(err.message.contains("`f`"));
    }

    #[test]
    fn undeclared_label_is_name_error() {
        let err = parse_source("let f p = p # getX", "t", &mut ParseContext::default()).unwrap_err();
        assert_eq!(err.kind, super::super::SyntaxErrorKind::NameError);
        assert!(err.message.contains("getX"));
    }

    #[test]
    fn printable_point_generator() {
        let src = r#"
            label varX label getX label moveX label print
            let printable_point x_init s = do {
                x <- newRef x_init;
                return ((varX = x)
                    .*. (getX = readRef x)
                    .*. (moveX = \d -> modifyRef x (\v -> v + d))
                    .*. (print = do { v <- s # getX; print v })
                    .*. emptyRecord)
            }
        "#;
        let p = parse(src, &[]);
        let DeclKind::Let { params, body, .. } = &p.decls[4].kind else {
            panic!()
        };
        assert_eq!(params, &["x_init".to_string(), "s".to_string()]);
        let ExprKind::Do(stmts) = &body.kind else { panic!() };
        assert_eq!(stmts.len(), 2);
        let Stmt::Expr(ret) = &stmts[1] else { panic!() };
        let ExprKind::App(_, rec) = &ret.kind else { panic!() };
        let mut n = 0;
        let mut cur = &**rec;
        while let ExprKind::Extend(_, _, rest) = &cur.kind {
            n += 1;
            cur = rest;
        }
        assert_eq!(n, 4);
        assert!(matches!(cur.kind, ExprKind::EmptyRecord));
    }

    #[test]
    fn repl_dispatch() {
        let mut ctx = ParseContext::default();
        assert!(matches!(
            parse_repl_input("label moveX", "r", &mut ctx).unwrap(),
            ReplInput::Decl(Decl { kind: DeclKind::Label(_), .. })
        ));
        assert!(ctx.labels.contains("moveX"));
        ctx.labels.insert("print".into());
        assert!(matches!(
            parse_repl_input("p # print", "r", &mut ctx).unwrap(),
            ReplInput::Expr(_)
        ));
        parse_repl_input("nominal PP", "r", &mut ctx).unwrap();
        match parse_repl_input("nominal CP extends {PP}", "r", &mut ctx).unwrap() {
            ReplInput::Decl(Decl {
                kind: DeclKind::Nominal { name, parents },
                ..
            }) => {
                assert_eq!(name, "CP");
                assert_eq!(parents, vec!["PP".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_repl_input("p <- return 1", "r", &mut ctx).unwrap(),
            ReplInput::Bind(..)
        ));
        assert!(matches!(
            parse_repl_input("let x = 1 in x", "r", &mut ctx).unwrap(),
            ReplInput::Expr(_)
        ));
    }

    #[test]
    fn failed_repl_line_leaves_context_untouched() {
        let mut ctx = ParseContext::default();
        assert!(parse_repl_input("label a b", "r", &mut ctx).is_err());
        assert!(ctx.labels.is_empty());
    }

    #[test]
    fn unfinished_input_reports_eof() {
        let err = parse_source("let f = do { x <- return 1;", "t", &mut ParseContext::default())
            .unwrap_err();
        assert!(err.at_eof);
    }

    #[test]
    fn do_block_must_end_in_expression() {
        let err = parse_source("let f = do { x <- return 1 }", "t", &mut ParseContext::default())
            .unwrap_err();
        assert!(err.message.contains("last statement"));
    }

    #[test]
    fn field_pair_needs_record_operator() {
        let err = parse_source("let f = g (x = 1)", "t", &mut ctx_with(&["x"])).unwrap_err();
        assert!(err.message.contains(".*."));
    }

    #[test]
    fn annotation_types() {
        let src = "type PP = {getX: IO Int, moveX: Int -> IO ()}\nlet f p = narrow p : PP";
        let p = parse(src, &["getX", "moveX"]);
        let b = body(&p);
        assert!(matches!(&b.kind, ExprKind::Annot(AnnotKind::Narrow, _, TypeExpr::Named(n, _)) if n == "PP"));
        let DeclKind::Type { body, .. } = &p.decls[0].kind else { panic!() };
        let TypeExpr::Record(fs) = body else { panic!() };
        assert!(matches!(&fs[1].1, TypeExpr::Fun(a, r)
            if **a == TypeExpr::Int && **r == TypeExpr::Io(Box::new(TypeExpr::Unit))));
    }

    #[test]
    fn recursive_named_type() {
        let src = "label isEmpty\ntype ListObj a = {isEmpty: IO Bool, tail: IO (ListObj a)}";
        let err = parse_source(src, "t", &mut ctx_with(&[])).unwrap_err();
        assert_eq!(err.kind, super::super::SyntaxErrorKind::NameError);
        let p = parse(src.replace("tail", "isEmpty2").as_str(), &["isEmpty2"]);
        assert_eq!(p.decls.len(), 2);
    }

    #[test]
    fn reserved_names_cannot_be_bound() {
        let err = parse_source("let print = 1", "t", &mut ParseContext::default()).unwrap_err();
        assert_eq!(err.kind, super::super::SyntaxErrorKind::NameError);
    }

    #[test]
    fn special_forms() {
        let p = parse(
            "nominal PP\nlet l a b = lubCons a (lubCons b lubNil)\nlet n p = nUpCast (nominate PP p) : PP",
            &[],
        );
        assert!(matches!(&body_of(&p, 1).kind, ExprKind::LubCons(..)));
        let b = body_of(&p, 2);
        assert!(matches!(&b.kind, ExprKind::NUpCast(inner, n)
            if n == "PP" && matches!(inner.kind, ExprKind::Nominate(..))));
    }

    fn body_of(p: &Program, i: usize) -> &Expr {
        match &p.decls[i].kind {
            DeclKind::Let { body, .. } => body,
            _ => panic!(),
        }
    }

    #[test]
    fn spans_lie_inside_source() {
        let src = "label getX\nlet f p = p # getX\nlet main = return ()";
        let p = parse(src, &[]);
        for d in &p.decls {
            assert!(d.span.end() as usize <= src.chars().count());
            if let DeclKind::Let { body, .. } = &d.kind {
                walk_expr(body, &mut |e| {
                    assert!(e.span.line >= 1 && e.span.column >= 1);
                    assert!(e.span.end() as usize <= src.chars().count());
                });
            }
        }
    }
}
