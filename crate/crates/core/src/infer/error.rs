use std::fmt;

use crate::syntax::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    UnboundName,
    Mismatch,
    InfiniteType,
    MissingField,
    DuplicateLabel,
    StupidCast,
    NotNarrowable,
    NotDeepSubtype,
    NotAncestor,
    NotConcrete,
    AbstractUse,
    PrematureSelfAccess,
    AmbiguousRow,
    ClassError,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 14] = [
        ErrorKind::UnboundName,
        ErrorKind::Mismatch,
        ErrorKind::InfiniteType,
        ErrorKind::MissingField,
        ErrorKind::DuplicateLabel,
        ErrorKind::StupidCast,
        ErrorKind::NotNarrowable,
        ErrorKind::NotDeepSubtype,
        ErrorKind::NotAncestor,
        ErrorKind::NotConcrete,
        ErrorKind::AbstractUse,
        ErrorKind::PrematureSelfAccess,
        ErrorKind::AmbiguousRow,
        ErrorKind::ClassError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::UnboundName => "UnboundName",
            ErrorKind::Mismatch => "Mismatch",
            ErrorKind::InfiniteType => "InfiniteType",
            ErrorKind::MissingField => "MissingField",
            ErrorKind::DuplicateLabel => "DuplicateLabel",
            ErrorKind::StupidCast => "StupidCast",
            ErrorKind::NotNarrowable => "NotNarrowable",
            ErrorKind::NotDeepSubtype => "NotDeepSubtype",
            ErrorKind::NotAncestor => "NotAncestor",
            ErrorKind::NotConcrete => "NotConcrete",
            ErrorKind::AbstractUse => "AbstractUse",
            ErrorKind::PrematureSelfAccess => "PrematureSelfAccess",
            ErrorKind::AmbiguousRow => "AmbiguousRow",
            ErrorKind::ClassError => "ClassError",
        }
    }

    pub fn from_name(s: &str) -> Option<ErrorKind> {
        ErrorKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: error[{kind}]: {message}")]
pub struct TypeError {
    pub kind: ErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl TypeError {
    pub fn new(kind: ErrorKind, span: &SourceSpan, message: impl Into<String>) -> TypeError {
        TypeError {
            kind,
            span: span.clone(),
            message: message.into(),
        }
    }
}
