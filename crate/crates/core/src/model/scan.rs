use super::lexer::{tokenize_lenient, TokenKind};
use super::{CobolUnit, LineClass};

/// A token located on one physical line of a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineToken {
    pub line: usize,
    pub kind: TokenKind,
    pub text: String,
    /// Byte range within the line's `raw` text.
    pub start: usize,
    pub end: usize,
    /// Inside an `EXEC ... END-EXEC` block (both delimiters included).
    pub exec: bool,
    /// On a debug line.
    pub debug: bool,
}

impl LineToken {
    pub fn is_word(&self, upper: &str) -> bool {
        self.kind == TokenKind::Word && self.text.eq_ignore_ascii_case(upper)
    }

    /// Skipped by every perturbation.
    pub fn opaque(&self) -> bool {
        self.exec || self.debug
    }
}

/// Tokenize every code and continuation line of `unit` independently,
/// tracking `EXEC` blocks across lines. Inline comments are kept as tokens.
pub fn scan_unit(unit: &CobolUnit) -> Vec<LineToken> {
    let mut out = Vec::new();
    let mut in_exec = false;
    for (idx, line) in unit.lines.iter().enumerate() {
        if !matches!(line.class, LineClass::Code | LineClass::Continuation) {
            continue;
        }
        let mut base = line.content.start;
        let mut content = line.content_str();
        if unit.form == super::SourceForm::Free && line.debug {
            // Skip the `>>D` marker itself.
            base += 3;
            content = &content[3..];
        }
        for tok in tokenize_lenient(content) {
            let starts = !in_exec && tok.is_word("EXEC");
            if starts {
                in_exec = true;
            }
            let exec = in_exec;
            if in_exec && tok.is_word("END-EXEC") {
                in_exec = false;
            }
            out.push(LineToken {
                line: idx,
                kind: tok.kind,
                text: tok.text,
                start: base + tok.span.start,
                end: base + tok.span.end,
                exec,
                debug: line.debug,
            });
        }
    }
    out
}
