//! Source text to [`Program`]: tokenizer, recursive-descent parser and a
//! round-trip pretty printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod span;

use std::fmt;

pub use ast::{
    BinOp, Builtin, Decl, DeclKind, Expr, ExprKind, Lit, NodeId, Program, Stmt, TypeExpr,
};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_program, parse_repl_input, parse_source, ParseContext, ReplInput};
pub use span::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyntaxErrorKind {
    LexError,
    ParseError,
    NameError,
}

impl SyntaxErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntaxErrorKind::LexError => "LexError",
            SyntaxErrorKind::ParseError => "ParseError",
            SyntaxErrorKind::NameError => "NameError",
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{span}: error[{}]: {message}", kind.as_str())]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub span: SourceSpan,
    pub message: String,
    /// Set when the parser ran out of input; the REPL uses this to keep
    /// reading continuation lines.
    pub at_eof: bool,
}

impl SyntaxError {
    pub fn lex(span: SourceSpan, message: impl Into<String>) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::LexError,
            span,
            message: message.into(),
            at_eof: false,
        }
    }

    pub fn parse(span: SourceSpan, message: impl Into<String>) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::ParseError,
            span,
            message: message.into(),
            at_eof: false,
        }
    }

    pub fn name(span: SourceSpan, message: impl Into<String>) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::NameError,
            span,
            message: message.into(),
            at_eof: false,
        }
    }
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
