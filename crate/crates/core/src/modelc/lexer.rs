use std::fmt;

use super::ModelError;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    DotDot,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Prime,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(i) => return write!(f, "`{i}`"),
            Tok::Real(r) => return write!(f, "`{r}`"),
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::DotDot => "..",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "!",
            Tok::Prime => "'",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

/// Splits `src` into tokens. `//` starts a comment running to the end
/// of the line. The last token is always [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ModelError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && peek == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            number(&chars, &mut i, pos)?
        } else {
            let (tok, len) = match (c, peek) {
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('!', Some('=')) => (Tok::Neq, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('/', _) => (Tok::Slash, 1),
                ('%', _) => (Tok::Percent, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('&', _) => (Tok::And, 1),
                ('|', _) => (Tok::Or, 1),
                ('!', _) => (Tok::Not, 1),
                ('\'', _) => (Tok::Prime, 1),
                _ => {
                    return Err(ModelError::Syntax {
                        pos,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            };
            i += len;
            tok
        };
        col += (i - start) as u32;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Integer or real literal. A dot followed by another dot ends the
/// number, so `0..3` lexes as `0`, `..`, `3`.
fn number(chars: &[char], i: &mut usize, pos: Pos) -> Result<Tok, ModelError> {
    let start = *i;
    let digits = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(i);
    let mut real = false;
    if *i + 1 < chars.len() && chars[*i] == '.' && chars[*i + 1].is_ascii_digit() {
        real = true;
        *i += 1;
        digits(i);
    }
    if *i < chars.len() && (chars[*i] == 'e' || chars[*i] == 'E') {
        let mut j = *i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            real = true;
            *i = j;
            digits(i);
        }
    }
    let text: String = chars[start..*i].iter().collect();
    let bad = |_| ModelError::Syntax {
        pos,
        msg: format!("bad number literal {text:?}"),
    };
    if real {
        text.parse().map(Tok::Real).map_err(|e: std::num::ParseFloatError| bad(e.to_string()))
    } else {
        text.parse().map(Tok::Int).map_err(|e: std::num::ParseIntError| bad(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.0).collect()
    }

    #[test]
    fn ranges_and_reals() {
        assert_eq!(
            toks("[0..3] 0.25 1e-3"),
            vec![
                Tok::LBracket,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(3),
                Tok::RBracket,
                Tok::Real(0.25),
                Tok::Real(1e-3),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn update_syntax() {
        assert_eq!(
            toks("(x'=x+1) & (y'=0) -> <= != // note\n!"),
            vec![
                Tok::LParen,
                Tok::Ident("x".into()),
                Tok::Prime,
                Tok::Eq,
                Tok::Ident("x".into()),
                Tok::Plus,
                Tok::Int(1),
                Tok::RParen,
                Tok::And,
                Tok::LParen,
                Tok::Ident("y".into()),
                Tok::Prime,
                Tok::Eq,
                Tok::Int(0),
                Tok::RParen,
                Tok::Arrow,
                Tok::Le,
                Tok::Neq,
                Tok::Not,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions() {
        let t = tokenize("a\n  bb").unwrap();
        assert_eq!(t[0].1, Pos { line: 1, col: 1 });
        assert_eq!(t[1].1, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x # y").unwrap_err();
        assert!(err.to_string().contains("1:3"), "{err}");
    }
}
