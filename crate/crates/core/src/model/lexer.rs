use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    NonnumericLiteral,
    NumericLiteral,
    Picture,
    Period,
    /// Punctuation and operators: `,` `;` `(` `)` `:` `=` `<` `>` `+` `-` ...
    Separator,
    /// `*>` floating comment running to the end of the line.
    InlineComment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte range in the tokenized text.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_word(&self, upper: &str) -> bool {
        self.kind == TokenKind::Word && self.text.eq_ignore_ascii_case(upper)
    }

    /// Quote character of a nonnumeric literal (after any `X`/`N`/`Z` prefix).
    pub fn quote(&self) -> Option<char> {
        if self.kind != TokenKind::NonnumericLiteral {
            return None;
        }
        self.text.chars().find(|c| *c == '\'' || *c == '"')
    }
}

/// Tokenize free-form code text. Whitespace between tokens is not
/// represented; token spans index the input so the text between consecutive
/// spans is exactly the original whitespace.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    Lexer::new(text, false).run()
}

/// Like [`tokenize`], but a literal still open at the end of a line runs to
/// the end of that line instead of failing. Used for per-line scans of
/// fixed-form source where literals may be continued.
pub fn tokenize_lenient(text: &str) -> Vec<Token> {
    Lexer::new(text, true)
        .run()
        .expect("lenient lexing is infallible")
}

const LITERAL_PREFIXES: &[&str] = &["X", "N", "G", "Z", "B", "NX", "BX", "U", "UX"];

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    lenient: bool,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, lenient: bool) -> Self {
        Lexer {
            text,
            pos: 0,
            lenient,
            tokens: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, byte: usize) -> Option<char> {
        self.text.get(byte..).and_then(|s| s.chars().next())
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        self.tokens.push(Token {
            kind,
            text: self.text[start..end].to_string(),
            span: start..end,
        });
        self.pos = end;
    }

    fn run(mut self) -> Result<Vec<Token>> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
                continue;
            }
            if self.text[start..].starts_with("*>") {
                let end = self.text[start..]
                    .find('\n')
                    .map(|i| start + i)
                    .unwrap_or(self.text.len());
                let end = trim_cr(self.text, start, end);
                self.push(TokenKind::InlineComment, start, end);
                continue;
            }
            if self.expect_picture() {
                self.picture(start);
                continue;
            }
            if c == '\'' || c == '"' {
                self.literal(start, start)?;
                continue;
            }
            if (c == '+' || c == '-') && self.sign_allowed() {
                if let Some(d) = self.peek_at(start + 1) {
                    if d.is_ascii_digit() || d == '.' {
                        self.number(start, start + 1);
                        continue;
                    }
                }
            }
            if is_word_char(c) && c != '-' {
                self.word_or_number(start)?;
                continue;
            }
            if c == '.' {
                let next = self.peek_at(start + 1);
                if next.is_some_and(|d| d.is_ascii_digit()) && self.preceded_by_space(start) {
                    self.number(start, start);
                    continue;
                }
                self.push(TokenKind::Period, start, start + 1);
                continue;
            }
            let two = self.text.get(start..start + 2).unwrap_or("");
            if matches!(two, ">=" | "<=" | "**" | "==") {
                self.push(TokenKind::Separator, start, start + 2);
                continue;
            }
            self.push(TokenKind::Separator, start, start + c.len_utf8());
        }
        Ok(self.tokens)
    }

    fn preceded_by_space(&self, at: usize) -> bool {
        self.text[..at]
            .chars()
            .next_back()
            .is_none_or(|c| c.is_whitespace() || c == '(')
    }

    fn sign_allowed(&self) -> bool {
        if !self.preceded_by_space(self.pos) {
            return false;
        }
        match self.tokens.last() {
            None => true,
            Some(t) => match t.kind {
                TokenKind::Word | TokenKind::NumericLiteral | TokenKind::NonnumericLiteral => false,
                TokenKind::Separator => t.text != ")",
                _ => true,
            },
        }
    }

    fn expect_picture(&self) -> bool {
        let n = self.tokens.len();
        let is_pic = |t: &Token| t.is_word("PIC") || t.is_word("PICTURE");
        match self.tokens.last() {
            Some(t) if is_pic(t) => true,
            Some(t) if t.is_word("IS") => n >= 2 && is_pic(&self.tokens[n - 2]),
            _ => false,
        }
    }

    fn picture(&mut self, start: usize) {
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| c.is_whitespace())
            .unwrap_or(rest.len());
        let mut end = start + len;
        // A trailing separator period belongs to the sentence, not the picture.
        if end > start + 1 && self.text[..end].ends_with('.') {
            end -= 1;
        }
        if end > start && self.text[start..end].eq_ignore_ascii_case("IS") {
            self.push(TokenKind::Word, start, end);
            return;
        }
        self.push(TokenKind::Picture, start, end);
    }

    fn literal(&mut self, start: usize, quote_at: usize) -> Result<()> {
        let quote = self.peek_at(quote_at).expect("quote present");
        let mut i = quote_at + 1;
        loop {
            match self.peek_at(i) {
                None | Some('\n') => {
                    if self.lenient {
                        let end = trim_cr(self.text, start, i);
                        self.push(TokenKind::NonnumericLiteral, start, end);
                        return Ok(());
                    }
                    return Err(Error::UnterminatedLiteral { offset: start });
                }
                Some(c) if c == quote => {
                    if self.peek_at(i + 1) == Some(quote) {
                        i += 2;
                        continue;
                    }
                    self.push(TokenKind::NonnumericLiteral, start, i + 1);
                    return Ok(());
                }
                Some(c) => i += c.len_utf8(),
            }
        }
    }

    fn word_or_number(&mut self, start: usize) -> Result<()> {
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !is_word_char(c))
            .unwrap_or(rest.len());
        let end = start + len;
        let run = &self.text[start..end];
        if let Some(q) = self.peek_at(end) {
            if (q == '\'' || q == '"')
                && LITERAL_PREFIXES.iter().any(|p| p.eq_ignore_ascii_case(run))
            {
                return self.literal(start, end);
            }
        }
        if run.chars().all(|c| c.is_ascii_digit()) {
            self.number(start, start);
            return Ok(());
        }
        let kind = if run.chars().any(|c| c.is_alphabetic()) {
            TokenKind::Word
        } else {
            TokenKind::Separator
        };
        self.push(kind, start, end);
        Ok(())
    }

    /// Numeric literal starting at `start`; digits begin at `digits`.
    fn number(&mut self, start: usize, digits: usize) {
        let bytes = self.text.as_bytes();
        let mut i = digits;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        // Digits glued to letters form a word such as 1ST-ITEM.
        if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'-' || bytes[i] == b'_')
            && start == digits
        {
            let rest = &self.text[start..];
            let len = rest.find(|c: char| !is_word_char(c)).unwrap_or(rest.len());
            let run = &self.text[start..start + len];
            let kind = if run.chars().any(|c| c.is_alphabetic()) {
                TokenKind::Word
            } else {
                TokenKind::Separator
            };
            self.push(kind, start, start + len);
            return;
        }
        self.push(TokenKind::NumericLiteral, start, i);
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn trim_cr(text: &str, start: usize, end: usize) -> usize {
    if end > start && text[..end].ends_with('\r') {
        end - 1
    } else {
        end
    }
}
