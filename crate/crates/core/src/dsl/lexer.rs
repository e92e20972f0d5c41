use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Slash,
    Colon,
    Assign,
    Eq,
    Ne,
    And,
    Or,
    Not,
    Star,
    Semi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Not => "`!`".into(),
            Tok::Star => "`*`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits source text into tokens. `#` starts a comment. Identifiers may
/// contain inner dashes; the parser only accepts them in program names.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut bump = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                bump(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let two = chars.get(i + 1).copied();
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '/' => Tok::Slash,
            ';' => Tok::Semi,
            '*' => Tok::Star,
            '&' => Tok::And,
            '|' => Tok::Or,
            '=' => Tok::Eq,
            ':' if two == Some('=') => {
                bump(1, &mut i);
                Tok::Assign
            }
            ':' => Tok::Colon,
            '!' if two == Some('=') => {
                bump(1, &mut i);
                Tok::Ne
            }
            '!' => Tok::Not,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                let n = text.parse().map_err(|_| ParseError {
                    line: l0,
                    col: c0,
                    msg: format!("number `{text}` out of range"),
                })?;
                out.push(Token {
                    tok: Tok::Num(n),
                    line: l0,
                    col: c0,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric()
                        || chars[i] == '_'
                        || (chars[i] == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric())))
                {
                    i += 1;
                }
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: l0,
                    col: c0,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(1, &mut i);
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
