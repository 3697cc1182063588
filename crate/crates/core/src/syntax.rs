//! Shared lexical machinery for the small text formats of the crate.

use std::fmt;

use thiserror::Error;

/// A syntax error with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

/// Labels reserved for the process-level alphabet. Atomic actions may not use
/// these names, otherwise rendered labels would be ambiguous.
pub const RESERVED_LABELS: &[&str] = &["tau", "i", "stop", "stop_bar", "stop_star", "delta"];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// True if `s` matches `[a-zA-Z_][a-zA-Z0-9_]*`.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char)
}

/// Method names additionally admit `:` after the first character (`set:T`, `push:x`).
pub fn is_method(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c))
        && chars.all(|c| is_ident_char(c) || c == ':')
}

/// True if `s` can name an atomic action without clashing with the reserved alphabet.
pub fn is_atomic_action(s: &str) -> bool {
    is_ident(s)
        && !RESERVED_LABELS.contains(&s)
        && !s.starts_with("snd_")
        && !s.starts_with("rcv_")
}

/// A whitespace-skipping cursor over a string.
#[derive(Clone)]
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl fmt::Debug for Cursor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cursor({:?})", &self.src[self.pos..])
    }
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Peek without skipping whitespace first.
    pub fn peek_raw(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, message)
    }

    /// Consume `token` if it comes next (after whitespace).
    pub fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn take_while(&mut self, first: fn(char) -> bool, rest: fn(char) -> bool) -> Option<&'a str> {
        self.skip_ws();
        let s = self.rest();
        let mut chars = s.char_indices();
        match chars.next() {
            Some((_, c)) if first(c) => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !rest(c))
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        self.pos += end;
        Some(&s[..end])
    }

    pub fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.take_while(is_ident_start, is_ident_char)
            .ok_or_else(|| self.error("expected identifier"))
    }

    pub fn method(&mut self) -> Result<&'a str, ParseError> {
        self.take_while(is_ident_start, |c| is_ident_char(c) || c == ':')
            .ok_or_else(|| self.error("expected method name"))
    }

    pub fn nat(&mut self) -> Result<u64, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let digits = self
            .take_while(|c| c.is_ascii_digit(), |c| c.is_ascii_digit())
            .ok_or_else(|| self.error("expected natural number"))?;
        digits
            .parse()
            .map_err(|_| ParseError::new(start, "natural number out of range"))
    }
}
