//! Tokenizer. Comments run from `--` to end of line.

use std::fmt;
use std::sync::Arc;

use super::span::SourceSpan;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Keyword(Keyword),
    Backslash,
    Arrow,
    BindArrow,
    Equals,
    EqEq,
    Hash,
    Extend,
    Update,
    UnionLeft,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Label,
    Nominal,
    Extends,
    Type,
    Let,
    In,
    Do,
    If,
    Then,
    Else,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "label" => Keyword::Label,
            "nominal" => Keyword::Nominal,
            "extends" => Keyword::Extends,
            "type" => Keyword::Type,
            "let" => Keyword::Let,
            "in" => Keyword::In,
            "do" => Keyword::Do,
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Label => "label",
            Keyword::Nominal => "nominal",
            Keyword::Extends => "extends",
            Keyword::Type => "type",
            Keyword::Let => "let",
            Keyword::In => "in",
            Keyword::Do => "do",
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(n) => write!(f, "integer {n}"),
            TokenKind::Float(x) => write!(f, "float {x}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.symbol()),
        }
    }
}

impl TokenKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Backslash => "\\",
            TokenKind::Arrow => "->",
            TokenKind::BindArrow => "<-",
            TokenKind::Equals => "=",
            TokenKind::EqEq => "==",
            TokenKind::Hash => "#",
            TokenKind::Extend => ".*.",
            TokenKind::Update => ".<.",
            TokenKind::UnionLeft => ".<++.",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: Arc<str>,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn span_from(&self, line: u32, col: u32, start: usize) -> SourceSpan {
        SourceSpan::new(
            self.file.clone(),
            line,
            col,
            start as u32,
            (self.pos - start) as u32,
        )
    }
}

/// Splits `source` into tokens, ending with a single `Eof` token.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file: Arc::from(file),
        _src: source,
    };
    let mut out = Vec::new();
    loop {
        // whitespace and comments
        while let Some(c) = lx.peek() {
            if c.is_whitespace() {
                lx.bump();
            } else if lx.starts_with("--") {
                while let Some(c) = lx.peek() {
                    if c == '\n' {
                        break;
                    }
                    lx.bump();
                }
            } else {
                break;
            }
        }
        let (line, col, start) = (lx.line, lx.col, lx.pos);
        let Some(c) = lx.peek() else {
            out.push(Token {
                kind: TokenKind::Eof,
                span: lx.span_from(line, col, start),
            });
            return Ok(out);
        };

        let kind = if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = lx.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            match Keyword::from_ident(&s) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(s),
            }
        } else if c.is_ascii_digit() {
            lex_number(&mut lx, line, col, start)?
        } else if c == '"' {
            lex_string(&mut lx, line, col, start)?
        } else if lx.starts_with(".<++.") {
            advance(&mut lx, 5);
            TokenKind::UnionLeft
        } else if lx.starts_with(".*.") {
            advance(&mut lx, 3);
            TokenKind::Extend
        } else if lx.starts_with(".<.") {
            advance(&mut lx, 3);
            TokenKind::Update
        } else if lx.starts_with("->") {
            advance(&mut lx, 2);
            TokenKind::Arrow
        } else if lx.starts_with("<-") {
            advance(&mut lx, 2);
            TokenKind::BindArrow
        } else if lx.starts_with("==") {
            advance(&mut lx, 2);
            TokenKind::EqEq
        } else {
            lx.bump();
            match c {
                '\\' => TokenKind::Backslash,
                '=' => TokenKind::Equals,
                '#' => TokenKind::Hash,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ',' => TokenKind::Comma,
                ';' => TokenKind::Semi,
                ':' => TokenKind::Colon,
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                other => {
                    return Err(SyntaxError::lex(
                        lx.span_from(line, col, start),
                        format!("illegal character {other:?}"),
                    ))
                }
            }
        };
        out.push(Token {
            kind,
            span: lx.span_from(line, col, start),
        });
    }
}

fn advance(lx: &mut Lexer<'_>, n: usize) {
    for _ in 0..n {
        lx.bump();
    }
}

fn lex_number(
    lx: &mut Lexer<'_>,
    line: u32,
    col: u32,
    start: usize,
) -> Result<TokenKind, SyntaxError> {
    let mut s = String::new();
    while let Some(c) = lx.peek().filter(|c| c.is_ascii_digit()) {
        s.push(c);
        lx.bump();
    }
    let is_float =
        lx.peek() == Some('.') && lx.peek_at(1).is_some_and(|c| c.is_ascii_digit());
    if is_float {
        s.push('.');
        lx.bump();
        while let Some(c) = lx.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            lx.bump();
        }
        return s
            .parse()
            .map(TokenKind::Float)
            .map_err(|_| SyntaxError::lex(lx.span_from(line, col, start), "malformed float"));
    }
    s.parse().map(TokenKind::Int).map_err(|_| {
        SyntaxError::lex(
            lx.span_from(line, col, start),
            "integer literal out of range",
        )
    })
}

fn lex_string(
    lx: &mut Lexer<'_>,
    line: u32,
    col: u32,
    start: usize,
) -> Result<TokenKind, SyntaxError> {
    lx.bump();
    let mut s = String::new();
    loop {
        match lx.bump() {
            None | Some('\n') => {
                return Err(SyntaxError::lex(
                    lx.span_from(line, col, start),
                    "unterminated string literal",
                ))
            }
            Some('"') => return Ok(TokenKind::Str(s)),
            Some('\\') => match lx.bump() {
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some('n') => s.push('\n'),
                other => {
                    return Err(SyntaxError::lex(
                        lx.span_from(line, col, start),
                        format!("unsupported escape sequence \\{}", other.unwrap_or(' ')),
                    ))
                }
            },
            Some(c) => s.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let mut toks: Vec<_> = tokenize(src, "t").unwrap().into_iter().map(|t| t.kind).collect();
        assert_eq!(toks.pop(), Some(TokenKind::Eof));
        toks
    }

    fn ident(s: &str) -> TokenKind {
        TokenKind::Ident(s.to_string())
    }

    #[test]
    fn method_invocation() {
        assert_eq!(
            kinds("p # getX"),
            vec![ident("p"), TokenKind::Hash, ident("getX")]
        );
    }

    #[test]
    fn bind_statement() {
        assert_eq!(
            kinds("x <- readRef r"),
            vec![ident("x"), TokenKind::BindArrow, ident("readRef"), ident("r")]
        );
    }

    #[test]
    fn string_keeps_inner_dash() {
        assert_eq!(
            kinds(r#""so far - ""#),
            vec![TokenKind::Str("so far - ".into())]
        );
    }

    #[test]
    fn record_operators_and_comments() {
        assert_eq!(
            kinds("a .*. b .<. c .<++. d -- trailing comment\n"),
            vec![
                ident("a"),
                TokenKind::Extend,
                ident("b"),
                TokenKind::Update,
                ident("c"),
                TokenKind::UnionLeft,
                ident("d")
            ]
        );
    }

    #[test]
    fn escapes() {
        assert_eq!(
            kinds(r#""a\"b\\c\n""#),
            vec![TokenKind::Str("a\"b\\c\n".into())]
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(
            kinds("12 2.5 3 .*. x"),
            vec![
                TokenKind::Int(12),
                TokenKind::Float(2.5),
                TokenKind::Int(3),
                TokenKind::Extend,
                ident("x")
            ]
        );
    }

    #[test]
    fn unterminated_string_is_error() {
        let err = tokenize("\"abc", "f.moo").unwrap_err();
        assert!(err.message.contains("unterminated"));
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 1);
    }

    #[test]
    fn illegal_character_is_error() {
        let err = tokenize("x @ y", "f.moo").unwrap_err();
        assert_eq!(err.span.column, 3);
    }

    #[test]
    fn spans_track_lines() {
        let toks = tokenize("a\n  bb", "f").unwrap();
        assert_eq!((toks[1].span.line, toks[1].span.column, toks[1].span.length), (2, 3, 2));
    }
}
