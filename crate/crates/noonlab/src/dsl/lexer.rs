use super::{ErrorKind, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Label, keyword, identifier or number.
    Word(String),
    Eq,
    Arrow,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Eq => "'='".into(),
            Tok::Arrow => "'->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based character column.
    pub column: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

/// Splits one source line (without its newline) into tokens.
pub(crate) fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_word_char(c) {
            let start = i;
            let numeric = c.is_ascii_digit() || c == '.';
            while i < chars.len() && is_word_char(chars[i]) {
                // exponent of a numeric literal, e.g. 1e-3
                if numeric
                    && matches!(chars[i], 'e' | 'E')
                    && chars[start..i]
                        .iter()
                        .all(|c| c.is_ascii_digit() || *c == '.')
                    && matches!(chars.get(i + 1), Some('+' | '-'))
                    && chars.get(i + 2).is_some_and(char::is_ascii_digit)
                {
                    i += 2;
                }
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..i].iter().collect()),
                column,
            });
            continue;
        }
        let tok = match c {
            '=' => Tok::Eq,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '-' => Tok::Minus,
            other => {
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    line_no,
                    column,
                    format!("unexpected character '{other}'"),
                ))
            }
        };
        i += 1;
        out.push(Token { tok, column });
    }
    Ok(out)
}
