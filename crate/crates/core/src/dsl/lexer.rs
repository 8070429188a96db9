use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Caret,
    At,
    Eq,
    Dash,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Caret => "`^`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Dash => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits `src` into tokens, ending with a single [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |start: usize, end: usize, line: usize, col: usize| SourceSpan {
        start,
        end,
        line,
        column: col,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let (start, sline, scol) = (i, line, col);
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            match src[start..i].parse() {
                Ok(n) => Tok::Int(n),
                Err(_) => {
                    return Err(ParseError {
                        span: span(start, i, sline, scol),
                        expected: vec!["integer below 2^64".into()],
                        found: src[start..i].to_string(),
                        message: "integer literal out of range".into(),
                    })
                }
            }
        } else {
            i += 1;
            match c {
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b';' => Tok::Semi,
                b':' => Tok::Colon,
                b',' => Tok::Comma,
                b'^' => Tok::Caret,
                b'@' => Tok::At,
                b'=' => Tok::Eq,
                b'-' if bytes.get(i) == Some(&b'>') => {
                    i += 1;
                    Tok::Arrow
                }
                b'-' => Tok::Dash,
                _ => {
                    let ch = src[start..].chars().next().expect("in bounds");
                    let end = start + ch.len_utf8();
                    return Err(ParseError {
                        span: span(start, end, sline, scol),
                        expected: vec!["token".into()],
                        found: format!("`{}`", ch.escape_default()),
                        message: "unexpected character".into(),
                    });
                }
            }
        };
        col += src[start..i].chars().count();
        out.push(Token {
            tok,
            span: span(start, i, sline, scol),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span(src.len(), src.len(), line, col),
    });
    Ok(out)
}
