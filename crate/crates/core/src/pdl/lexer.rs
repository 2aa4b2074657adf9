use super::{PdlError, PdlErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Quoted identifier; never a keyword.
    Quoted(String),
    Number(f64),
    Colon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Caret,
    Hole,
    Arrow,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("\"{s}\""),
            Tok::Number(x) => format!("number {x}"),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Hole => "`?`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, PdlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, kind| PdlError { line, col, kind };

    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let single = |t: Tok| Token { tok: t, line: l0, col: c0 };
        match c {
            '\n' => {
                out.push(single(Tok::Newline));
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            ':' => out.push(single(Tok::Colon)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '{' => out.push(single(Tok::LBrace)),
            '}' => out.push(single(Tok::RBrace)),
            ',' => out.push(single(Tok::Comma)),
            '=' => out.push(single(Tok::Eq)),
            '+' => out.push(single(Tok::Plus)),
            '*' => out.push(single(Tok::Star)),
            '^' => out.push(single(Tok::Caret)),
            '?' => out.push(single(Tok::Hole)),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push(single(Tok::Arrow));
                    i += 2;
                    col += 2;
                    continue;
                }
                out.push(single(Tok::Minus));
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                let mut ccol = col + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(err(l0, c0, PdlErrorKind::UnterminatedString));
                        }
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                _ => return Err(err(line, ccol, PdlErrorKind::BadEscape)),
                            }
                            j += 2;
                            ccol += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                            ccol += 1;
                        }
                    }
                }
                if s.is_empty() {
                    return Err(err(l0, c0, PdlErrorKind::EmptyName));
                }
                out.push(single(Tok::Quoted(s)));
                col = ccol + 1;
                i = j + 1;
                continue;
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| err(l0, c0, PdlErrorKind::BadNumber(text.clone())))?;
                if !value.is_finite() {
                    return Err(err(l0, c0, PdlErrorKind::BadNumber(text)));
                }
                col += i - start;
                out.push(single(Tok::Number(value)));
                continue;
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                col += i - start;
                out.push(single(Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => return Err(err(l0, c0, PdlErrorKind::UnexpectedChar(other))),
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
