//! Program representation produced by the parser.

use std::sync::atomic::{AtomicU32, Ordering};

use super::span::SourceSpan;

/// Identity of an expression node. Unique across every parse in the
/// process, so elaborations keyed by it never collide between the prelude,
/// a program and REPL lines.
pub type NodeId = u32;

static NEXT_NODE: AtomicU32 = AtomicU32::new(1);

pub fn fresh_node_id() -> NodeId {
    NEXT_NODE.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub id: NodeId,
    pub span: SourceSpan,
    pub kind: ExprKind,
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Expr {
        Expr {
            id: fresh_node_id(),
            span,
            kind,
        }
    }
}

/// Span- and id-insensitive structural equality.
impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lit {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
        }
    }
}

/// Reserved names that denote primitive functions and actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Fix,
    New,
    Construct,
    Return,
    NewRef,
    ReadRef,
    WriteRef,
    ModifyRef,
    Print,
    PutStr,
    PutStrLn,
    Show,
    Abs,
    MapM,
    Maybe,
    FailIO,
    Fst,
    Snd,
}

impl Builtin {
    pub const ALL: [Builtin; 18] = [
        Builtin::Fix,
        Builtin::New,
        Builtin::Construct,
        Builtin::Return,
        Builtin::NewRef,
        Builtin::ReadRef,
        Builtin::WriteRef,
        Builtin::ModifyRef,
        Builtin::Print,
        Builtin::PutStr,
        Builtin::PutStrLn,
        Builtin::Show,
        Builtin::Abs,
        Builtin::MapM,
        Builtin::Maybe,
        Builtin::FailIO,
        Builtin::Fst,
        Builtin::Snd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Fix => "fix",
            Builtin::New => "new",
            Builtin::Construct => "construct",
            Builtin::Return => "return",
            Builtin::NewRef => "newRef",
            Builtin::ReadRef => "readRef",
            Builtin::WriteRef => "writeRef",
            Builtin::ModifyRef => "modifyRef",
            Builtin::Print => "print",
            Builtin::PutStr => "putStr",
            Builtin::PutStrLn => "putStrLn",
            Builtin::Show => "show",
            Builtin::Abs => "abs",
            Builtin::MapM => "mapM_",
            Builtin::Maybe => "maybe",
            Builtin::FailIO => "failIO",
            Builtin::Fst => "fst",
            Builtin::Snd => "snd",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == s)
    }

    /// Number of arguments consumed before the builtin does its work.
    pub fn arity(self) -> usize {
        match self {
            Builtin::Construct
            | Builtin::WriteRef
            | Builtin::ModifyRef
            | Builtin::MapM => 2,
            Builtin::Maybe => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnnotKind {
    Narrow,
    DeepNarrow,
    DownCast,
    DynUpCast,
    DynDownCast,
    /// `(e : T)`
    Ascribe,
}

impl AnnotKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AnnotKind::Narrow => "narrow",
            AnnotKind::DeepNarrow => "deepNarrow",
            AnnotKind::DownCast => "downCast",
            AnnotKind::DynUpCast => "dynUpCast",
            AnnotKind::DynDownCast => "dynDownCast",
            AnnotKind::Ascribe => "",
        }
    }

    pub fn from_keyword(s: &str) -> Option<AnnotKind> {
        Some(match s {
            "narrow" => AnnotKind::Narrow,
            "deepNarrow" => AnnotKind::DeepNarrow,
            "downCast" => AnnotKind::DownCast,
            "dynUpCast" => AnnotKind::DynUpCast,
            "dynDownCast" => AnnotKind::DynDownCast,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lit(Lit),
    Var(String),
    Builtin(Builtin),
    Lam(Vec<String>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Do(Vec<Stmt>),
    /// `e # l`
    Invoke(Box<Expr>, String),
    EmptyRecord,
    /// `(l = v) .*. rest`
    Extend(String, Box<Expr>, Box<Expr>),
    /// `(l = v) .<. rest`
    Update(String, Box<Expr>, Box<Expr>),
    /// `a .<++. b`
    UnionLeft(Box<Expr>, Box<Expr>),
    Annot(AnnotKind, Box<Expr>, TypeExpr),
    LubNil,
    LubCons(Box<Expr>, Box<Expr>),
    UnionNil,
    UnionCons(Box<Expr>, Box<Expr>),
    Nominate(String, Box<Expr>),
    Anonymize(Box<Expr>),
    NUpCast(Box<Expr>, String),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    List(Vec<Expr>),
}

#[derive(Clone, Debug)]
pub enum Stmt {
    Bind(String, Expr, SourceSpan),
    Let(String, Expr, SourceSpan),
    Expr(Expr),
}

impl Stmt {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Stmt::Bind(_, _, s) | Stmt::Let(_, _, s) => s,
            Stmt::Expr(e) => &e.span,
        }
    }
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Stmt) -> bool {
        match (self, other) {
            (Stmt::Bind(a, e, _), Stmt::Bind(b, f, _)) => a == b && e == f,
            (Stmt::Let(a, e, _), Stmt::Let(b, f, _)) => a == b && e == f,
            (Stmt::Expr(e), Stmt::Expr(f)) => e == f,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExpr {
    Int,
    Float,
    Bool,
    String,
    Unit,
    Io(Box<TypeExpr>),
    Ref(Box<TypeExpr>),
    Fun(Box<TypeExpr>, Box<TypeExpr>),
    Record(Vec<(String, TypeExpr)>),
    Either(Box<TypeExpr>, Box<TypeExpr>),
    Nominal(String, Box<TypeExpr>),
    NotFixed(Box<TypeExpr>),
    List(Box<TypeExpr>),
    Pair(Box<TypeExpr>, Box<TypeExpr>),
    Named(String, Vec<TypeExpr>),
    Var(String),
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: SourceSpan,
}

impl PartialEq for Decl {
    fn eq(&self, other: &Decl) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    Label(String),
    Nominal {
        name: String,
        parents: Vec<String>,
    },
    Type {
        name: String,
        params: Vec<String>,
        body: TypeExpr,
    },
    Let {
        name: String,
        params: Vec<String>,
        body: Expr,
    },
}

impl Decl {
    pub fn name(&self) -> &str {
        match &self.kind {
            DeclKind::Label(n) => n,
            DeclKind::Nominal { name, .. }
            | DeclKind::Type { name, .. }
            | DeclKind::Let { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn binding(&self, name: &str) -> Option<&Decl> {
        self.decls
            .iter()
            .find(|d| matches!(&d.kind, DeclKind::Let { name: n, .. } if n == name))
    }
}

/// Visits every expression node below and including `e`, parents first.
pub fn walk_expr<'a>(e: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(e);
    match &e.kind {
        ExprKind::Lit(_)
        | ExprKind::Var(_)
        | ExprKind::Builtin(_)
        | ExprKind::EmptyRecord
        | ExprKind::LubNil
        | ExprKind::UnionNil => {}
        ExprKind::Lam(_, b)
        | ExprKind::Invoke(b, _)
        | ExprKind::Annot(_, b, _)
        | ExprKind::Nominate(_, b)
        | ExprKind::Anonymize(b)
        | ExprKind::NUpCast(b, _) => walk_expr(b, f),
        ExprKind::App(a, b)
        | ExprKind::Let(_, a, b)
        | ExprKind::Extend(_, a, b)
        | ExprKind::Update(_, a, b)
        | ExprKind::UnionLeft(a, b)
        | ExprKind::LubCons(a, b)
        | ExprKind::UnionCons(a, b)
        | ExprKind::BinOp(_, a, b)
        | ExprKind::Pair(a, b) => {
            walk_expr(a, f);
            walk_expr(b, f);
        }
        ExprKind::If(a, b, c) => {
            walk_expr(a, f);
            walk_expr(b, f);
            walk_expr(c, f);
        }
        ExprKind::Do(stmts) => {
            for s in stmts {
                match s {
                    Stmt::Bind(_, e, _) | Stmt::Let(_, e, _) | Stmt::Expr(e) => walk_expr(e, f),
                }
            }
        }
        ExprKind::List(es) => {
            for e in es {
                walk_expr(e, f);
            }
        }
    }
}
