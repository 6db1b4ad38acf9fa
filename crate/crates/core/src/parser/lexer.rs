use std::fmt;

use crate::diag::{Code, Diagnostic, Span};

pub const KEYWORDS: &[&str] = &[
    "dial", "dialect", "diagram", "node", "data", "edge", "as", "detail", "for", "table", "embedding", "extend",
    "perf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Ident,
    Str,
    Number,
    Punct,
    Arrow,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Ident => "identifier",
            TokenKind::Str => "string",
            TokenKind::Number => "number",
            TokenKind::Punct => "punctuation",
            TokenKind::Arrow => "arrow",
            TokenKind::Eof => "end of input",
        })
    }
}

/// A lexeme. `text` is the exact source slice, quotes included for
/// strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn end(&self) -> usize {
        self.span.offset + self.span.len as usize
    }

    /// Decoded value of a string token.
    pub fn string_value(&self) -> String {
        let inner = &self.text[1..self.text.len() - 1];
        let mut out = String::with_capacity(inner.len());
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(other) => out.push(other),
                    None => {}
                }
            } else {
                out.push(c);
            }
        }
        out
    }
}

const PUNCT: &str = "{}()[],:;.=@^*";

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, u32, u32)) -> Span {
        Span::new(start.0, start.1, start.2, (self.pos - start.0) as u32)
    }
}

/// Splits source text into tokens, ending with an `Eof` token. Every
/// lexical error is reported; no tokens are returned if any occurred.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let start = (cur.pos, cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek_at(1) == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let kind = if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_char) {
                cur.bump();
            }
            if KEYWORDS.contains(&&src[start.0..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() || (c == '-' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            cur.bump();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            TokenKind::Number
        } else if c == '"' {
            cur.bump();
            let mut closed = false;
            let mut bad_escape = None;
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                let here = (cur.pos, cur.line, cur.col);
                cur.bump();
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.peek() {
                        Some('"' | '\\' | 'n' | 't') => {
                            cur.bump();
                        }
                        _ => bad_escape = bad_escape.or(Some(here)),
                    },
                    _ => {}
                }
            }
            if !closed {
                errors.push(Diagnostic::at(
                    Code::E001,
                    cur.span_from(start),
                    "unterminated string literal",
                ));
                continue;
            }
            if let Some(at) = bad_escape {
                errors.push(Diagnostic::at(
                    Code::E001,
                    Span::new(at.0, at.1, at.2, 1),
                    "invalid escape sequence in string",
                ));
                continue;
            }
            TokenKind::Str
        } else if let Some(len) = arrow_len(&src[cur.pos..]) {
            for _ in 0..len {
                cur.bump();
            }
            TokenKind::Arrow
        } else if PUNCT.contains(c) {
            cur.bump();
            TokenKind::Punct
        } else {
            cur.bump();
            errors.push(Diagnostic::at(
                Code::E001,
                cur.span_from(start),
                format!("illegal character {c:?}"),
            ));
            continue;
        };
        tokens.push(Token {
            kind,
            text: src[start.0..cur.pos].to_string(),
            span: cur.span_from(start),
        });
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        span: Span::new(cur.pos, cur.line, cur.col, 0),
    });
    Ok(tokens)
}

fn arrow_len(rest: &str) -> Option<usize> {
    for arrow in ["<->", "|->", "->", "?>", "~>"] {
        if rest.starts_with(arrow) {
            return Some(arrow.len());
        }
    }
    // `-o` must not swallow the start of an identifier such as `-out`.
    if rest.starts_with("-o") && !rest[2..].chars().next().is_some_and(is_ident_char) {
        return Some(2);
    }
    None
}
