use crate::error::{DslError, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Deg,
    Rad,
}

impl Unit {
    pub fn from_word(s: &str) -> Option<Self> {
        match s {
            "deg" => Some(Unit::Deg),
            "rad" => Some(Unit::Rad),
            _ => None,
        }
    }

    pub fn to_radians(self, v: f64) -> f64 {
        match self {
            Unit::Deg => v.to_radians(),
            Unit::Rad => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    /// Numeric literal with an optional attached unit suffix.
    Number { value: f64, text: String, unit: Option<Unit> },
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
    Arrow,
    Amp,
    Pipe,
    Bang,
    Newline,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Str(s) => format!("string \"{s}\""),
            TokenKind::Number { text, .. } => format!("number {text}"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Amp => "`&`".into(),
            TokenKind::Pipe => "`|`".into(),
            TokenKind::Bang => "`!`".into(),
            TokenKind::Newline => "end of line".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }
}

fn lex_error(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::Lex { pos, msg: msg.into() }
}

/// Split an experiment description into tokens. `#` starts a comment that
/// runs to the end of the line; newlines are significant.
pub fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    let mut cur = Cursor {
        chars: text.char_indices().peekable(),
        src: text,
        line: 1,
        col: 1,
    };
    let mut out: Vec<Token> = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        let single = |kind| Token { kind, pos };
        match c {
            ' ' | '\t' | '\r' => {
                cur.bump();
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            '\n' => {
                cur.bump();
                out.push(single(TokenKind::Newline));
            }
            '(' | ')' | '[' | ']' | ',' | '=' | '&' | '|' | '!' => {
                cur.bump();
                out.push(single(match c {
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ',' => TokenKind::Comma,
                    '=' => TokenKind::Eq,
                    '&' => TokenKind::Amp,
                    '|' => TokenKind::Pipe,
                    _ => TokenKind::Bang,
                }));
            }
            '-' if cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                out.push(single(TokenKind::Arrow));
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None | Some('\n') => return Err(lex_error(pos, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            _ => return Err(lex_error(cur.pos(), "invalid escape in string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                out.push(single(TokenKind::Str(s)));
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let tok = lex_number(&mut cur, pos)?;
                out.push(tok);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(ch) = cur.peek().filter(|ch| ch.is_alphanumeric() || *ch == '_') {
                    s.push(ch);
                    cur.bump();
                }
                // A unit word directly after a number (spaces allowed) belongs to it.
                if let (Some(unit), Some(Token { kind: TokenKind::Number { unit: slot @ None, .. }, .. })) =
                    (Unit::from_word(&s), out.last_mut())
                {
                    *slot = Some(unit);
                    continue;
                }
                out.push(single(TokenKind::Ident(s)));
            }
            other => {
                return Err(lex_error(pos, format!("illegal character {other:?}")));
            }
        }
    }
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<Token, DslError> {
    let start = cur.offset();
    if cur.peek() == Some('-') {
        cur.bump();
    }
    let mut digits = 0;
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        digits += 1;
    }
    if cur.peek() == Some('.') {
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
            digits += 1;
        }
    }
    if digits == 0 {
        return Err(lex_error(pos, "malformed number"));
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        cur.bump();
        if matches!(cur.peek(), Some('+' | '-')) {
            cur.bump();
        }
        let mut exp_digits = 0;
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
            exp_digits += 1;
        }
        if exp_digits == 0 {
            return Err(lex_error(pos, "malformed exponent in number"));
        }
    }
    if cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '.') {
        // `90deg` is allowed; anything else glued to a number is not.
        let word_start = cur.offset();
        let save = cur.chars.clone();
        let (line, col) = (cur.line, cur.col);
        let mut word = String::new();
        while let Some(ch) = cur.peek().filter(|ch| ch.is_alphanumeric() || *ch == '_') {
            word.push(ch);
            cur.bump();
        }
        let text = cur.src[start..word_start].to_string();
        if let Some(unit) = Unit::from_word(&word) {
            let value = parse_f64(&text, pos)?;
            return Ok(Token { kind: TokenKind::Number { value, text, unit: Some(unit) }, pos });
        }
        cur.chars = save;
        cur.line = line;
        cur.col = col;
        return Err(lex_error(pos, "malformed number"));
    }
    let end = cur.offset();
    let text = cur.src[start..end].to_string();
    let value = parse_f64(&text, pos)?;
    Ok(Token { kind: TokenKind::Number { value, text, unit: None }, pos })
}

fn parse_f64(text: &str, pos: Pos) -> Result<f64, DslError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| lex_error(pos, format!("number `{text}` out of range")))
}
