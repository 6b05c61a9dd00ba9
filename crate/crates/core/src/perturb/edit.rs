use crate::model::{is_blank, LineToken, TokenKind};

/// Replace bytes `start..end` of line `line` with `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edit {
    pub line: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

impl Edit {
    pub fn new(line: usize, start: usize, end: usize, text: impl Into<String>) -> Self {
        Edit {
            line,
            start,
            end,
            text: text.into(),
        }
    }
}

/// Apply non-overlapping edits (any order).
pub(crate) fn apply_edits(raws: &mut [String], mut edits: Vec<Edit>) {
    edits.sort_by(|a, b| (b.line, b.start).cmp(&(a.line, a.start)));
    for e in edits {
        raws[e.line].replace_range(e.start..e.end, &e.text);
    }
}

/// Byte length of the leading blank run.
pub(crate) fn leading_blanks(s: &str) -> usize {
    s.len() - s.trim_start_matches(is_blank).len()
}

/// Code tokens of a line, inline comments excluded.
pub(crate) fn code_tokens(tokens: &[LineToken]) -> Vec<&LineToken> {
    tokens
        .iter()
        .filter(|t| t.kind != TokenKind::InlineComment)
        .collect()
}

pub(crate) fn has_inline_comment(tokens: &[LineToken]) -> bool {
    tokens.iter().any(|t| t.kind == TokenKind::InlineComment)
}

/// Random lowercase words separated by single spaces, exactly `len` characters.
pub(crate) fn random_words(rng: &mut super::RngStream, len: usize) -> String {
    let mut out = String::with_capacity(len);
    while out.len() < len {
        if !out.is_empty() {
            out.push(' ');
            if out.len() == len {
                break;
            }
        }
        let word = rng.between(2, 8).min(len - out.len());
        for _ in 0..word {
            out.push((b'a' + rng.pick(26) as u8) as char);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edits_apply_right_to_left() {
        let mut raws = vec!["MOVE A TO B".to_string()];
        apply_edits(
            &mut raws,
            vec![Edit::new(0, 5, 6, "XX"), Edit::new(0, 10, 11, "YY")],
        );
        assert_eq!(raws[0], "MOVE XX TO YY");
    }

    #[test]
    fn random_words_have_exact_length() {
        let mut rng = super::super::RngStream::new(3);
        for len in 0..40 {
            let w = random_words(&mut rng, len);
            assert_eq!(w.len(), len);
            assert!(w.chars().all(|c| c == ' ' || c.is_ascii_lowercase()));
        }
    }
}
