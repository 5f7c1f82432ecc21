//! Tokenizer for the supported Gallina dialect.
//!
//! Comments `(* ... *)` nest and are dropped. Columns count Unicode scalar
//! values; `\r\n` and `\n` both end a line.

use std::fmt;

use crate::ast::{Diagnostic, Phase, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Inductive,
    Fixpoint,
    Definition,
    Lemma,
    Type,
    Match,
    With,
    End,
    Forall,
}

impl Keyword {
    pub const ALL: [Keyword; 9] = [
        Keyword::Inductive,
        Keyword::Fixpoint,
        Keyword::Definition,
        Keyword::Lemma,
        Keyword::Type,
        Keyword::Match,
        Keyword::With,
        Keyword::End,
        Keyword::Forall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Inductive => "Inductive",
            Keyword::Fixpoint => "Fixpoint",
            Keyword::Definition => "Definition",
            Keyword::Lemma => "Lemma",
            Keyword::Type => "Type",
            Keyword::Match => "match",
            Keyword::With => "with",
            Keyword::End => "end",
            Keyword::Forall => "forall",
        }
    }

    pub fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }

    /// Keywords that open a top-level command.
    pub fn starts_command(self) -> bool {
        matches!(self, Keyword::Inductive | Keyword::Fixpoint | Keyword::Definition | Keyword::Lemma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Punct {
    ColonEq,
    Colon,
    Dot,
    Bar,
    LParen,
    RParen,
    Comma,
    FatArrow,
    Arrow,
    Plus,
    Minus,
    Star,
    Lt,
    Gt,
    Eq,
    Question,
}

impl Punct {
    /// Longest spellings first so the scan is maximal-munch.
    const TABLE: [(&'static str, Punct); 16] = [
        (":=", Punct::ColonEq),
        ("=>", Punct::FatArrow),
        ("->", Punct::Arrow),
        (":", Punct::Colon),
        (".", Punct::Dot),
        ("|", Punct::Bar),
        ("(", Punct::LParen),
        (")", Punct::RParen),
        (",", Punct::Comma),
        ("+", Punct::Plus),
        ("-", Punct::Minus),
        ("*", Punct::Star),
        ("<", Punct::Lt),
        (">", Punct::Gt),
        ("=", Punct::Eq),
        ("?", Punct::Question),
    ];

    pub fn as_str(self) -> &'static str {
        Punct::TABLE.iter().find(|(_, p)| *p == self).map(|(s, _)| *s).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    Identifier,
    NaturalLiteral,
    Punct(Punct),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Identifier => f.write_str("identifier"),
            TokenKind::NaturalLiteral => f.write_str("natural number"),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: Punct) -> bool {
        self.kind == TokenKind::Punct(p)
    }

    pub fn is_keyword(&self, k: Keyword) -> bool {
        self.kind == TokenKind::Keyword(k)
    }

    pub fn is_ident(&self, text: &str) -> bool {
        self.kind == TokenKind::Identifier && self.lexeme == text
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// True when `name` lexes as a single identifier token.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c))
        && chars.all(is_ident_continue)
        && Keyword::from_word(name).is_none()
}

struct Cursor<'a> {
    rest: std::iter::Peekable<std::str::Chars<'a>>,
    lookahead: &'a str,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(source: &'a str) -> Cursor<'a> {
        Cursor { rest: source.chars().peekable(), lookahead: source, line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.rest.peek().copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.lookahead.starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.next()?;
        self.lookahead = &self.lookahead[c.len_utf8()..];
        match c {
            '\n' => {
                self.line += 1;
                self.col = 1;
            }
            // `\r` before `\n` is part of the line terminator; it takes no column.
            '\r' if self.lookahead.starts_with('\n') => {}
            _ => self.col += 1,
        }
        Some(c)
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn span_from(&self, (line, col): (u32, u32)) -> Span {
        Span::new(line, col, self.line, self.col)
    }
}

/// Splits `source` into tokens. All lexical errors are reported, not just the first.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.here();
        if c.is_whitespace() {
            cur.bump();
        } else if cur.starts_with("(*") {
            if !skip_comment(&mut cur) {
                let open = Span::new(start.0, start.1, start.0, start.1 + 2);
                errors.push(Diagnostic::error(Phase::Lex, open, "unterminated comment"));
            }
        } else if is_ident_start(c) {
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(|&c| is_ident_continue(c)) {
                word.push(c);
                cur.bump();
            }
            let kind = match Keyword::from_word(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Identifier,
            };
            tokens.push(Token { kind, lexeme: word, span: cur.span_from(start) });
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                digits.push(c);
                cur.bump();
            }
            tokens.push(Token {
                kind: TokenKind::NaturalLiteral,
                lexeme: digits,
                span: cur.span_from(start),
            });
        } else if let Some(&(text, punct)) = Punct::TABLE.iter().find(|(s, _)| cur.starts_with(s)) {
            for _ in 0..text.len() {
                cur.bump();
            }
            tokens.push(Token {
                kind: TokenKind::Punct(punct),
                lexeme: text.to_string(),
                span: cur.span_from(start),
            });
        } else {
            cur.bump();
            errors.push(Diagnostic::error(
                Phase::Lex,
                cur.span_from(start),
                format!("illegal character {c:?}"),
            ));
        }
    }

    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

/// Consumes a comment at the cursor. Returns false if input ends inside it.
fn skip_comment(cur: &mut Cursor<'_>) -> bool {
    let mut depth = 0usize;
    loop {
        if cur.starts_with("(*") {
            cur.bump();
            cur.bump();
            depth += 1;
        } else if cur.starts_with("*)") {
            cur.bump();
            cur.bump();
            depth -= 1;
            if depth == 0 {
                return true;
            }
        } else if cur.bump().is_none() {
            return false;
        }
    }
}
