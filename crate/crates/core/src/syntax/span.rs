use std::fmt;
use std::sync::Arc;

/// A region of source text. Lines and columns are 1-based; `length` and
/// `offset` count characters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    pub length: u32,
    pub offset: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, line: u32, column: u32, offset: u32, length: u32) -> Self {
        SourceSpan {
            file,
            line,
            column,
            length,
            offset,
        }
    }

    /// A placeholder span for synthesized nodes and builtins.
    pub fn synthetic() -> Self {
        SourceSpan::new(Arc::from("<builtin>"), 1, 1, 0, 0)
    }

    /// The span covering `self` through the end of `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let end = (other.offset + other.length).max(self.offset + self.length);
        SourceSpan {
            file: self.file.clone(),
            line: self.line,
            column: self.column,
            offset: self.offset,
            length: end.saturating_sub(self.offset),
        }
    }

    pub fn end(&self) -> u32 {
        self.offset + self.length
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}
