//! Line-level and lexical model of COBOL source.
//!
//! A [`CobolUnit`] is an ordered list of classified lines plus the source
//! form. The model is deliberately shallow: lines, tokens, the
//! division/section/paragraph skeleton and data-entry names. Nothing here
//! understands statements.

mod identifiers;
mod lexer;
mod scan;
mod structure;
pub mod words;

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use identifiers::{
    extract_data_identifiers, extract_data_identifiers_with, IdentifierEntry, IdentifierOrigin,
    LineSpan, RegisterCatalog,
};
pub use lexer::{tokenize, tokenize_lenient, Token, TokenKind};
pub use scan::{scan_unit, LineToken};
pub use structure::{
    extract_paragraph, extract_structure, procedure_start, DivisionInfo, ParagraphInfo, ProgramStructure,
    SectionInfo,
};

/// Maximum length of a fixed-form line (sequence area, indicator, areas A and B).
pub const FIXED_LINE_MAX: usize = 72;
/// Columns 1-7 (sequence area plus indicator) that precede fixed-form content.
pub const FIXED_PREFIX: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceForm {
    Fixed,
    Free,
}

impl fmt::Display for SourceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceForm::Fixed => "fixed",
            SourceForm::Free => "free",
        })
    }
}

impl std::str::FromStr for SourceForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(SourceForm::Fixed),
            "free" => Ok(SourceForm::Free),
            other => Err(format!("unknown source form `{other}` (expected fixed|free)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineClass {
    Code,
    Comment,
    Blank,
    Continuation,
    Directive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Area {
    AreaA,
    AreaB,
}

impl Area {
    /// Area for a first non-space character at `leading` spaces, counted in
    /// the fixed-form frame (columns 1-7 included).
    pub fn from_leading(leading: usize) -> Option<Area> {
        match leading {
            7..=10 => Some(Area::AreaA),
            l if l >= 11 => Some(Area::AreaB),
            _ => None,
        }
    }

    /// Inclusive range of fixed-frame leading-space counts that stay in this area.
    pub fn leading_range(self) -> (usize, usize) {
        match self {
            Area::AreaA => (7, 10),
            Area::AreaB => (11, usize::MAX),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitKind {
    Program,
    Paragraph,
    Section,
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitKind::Program => "program",
            UnitKind::Paragraph => "paragraph",
            UnitKind::Section => "section",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobolLine {
    pub raw: String,
    pub class: LineClass,
    /// Only set for code lines.
    pub area: Option<Area>,
    /// Fixed `D` indicator or free `>>D` prefix. Debug lines are code but
    /// never targeted by perturbations.
    pub debug: bool,
    /// Byte range of the code content inside `raw` (fixed: columns 8-72,
    /// free: the whole line).
    pub content: Range<usize>,
}

impl CobolLine {
    pub fn content_str(&self) -> &str {
        &self.raw[self.content.clone()]
    }

    pub fn is_code(&self) -> bool {
        self.class == LineClass::Code
    }

    /// Code line that perturbations may touch.
    pub fn is_target_code(&self) -> bool {
        self.class == LineClass::Code && !self.debug
    }

    /// Fixed-frame leading-space count of the first non-space content
    /// character; `None` when the content is blank.
    pub fn fixed_frame_leading(&self) -> Option<usize> {
        let content = self.content_str();
        let lead = content.chars().take_while(|c| is_blank(*c)).count();
        if lead == content.chars().count() {
            return None;
        }
        // Fixed content starts at column 8; free lines are the fixed
        // content with columns 1-7 dropped, so both share the same frame.
        Some(FIXED_PREFIX + lead)
    }
}

pub(crate) fn is_blank(c: char) -> bool {
    c == ' ' || c == '\t'
}

pub(crate) fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of the `n`-th character (or `s.len()` past the end).
pub(crate) fn byte_at_char(s: &str, n: usize) -> usize {
    s.char_indices().nth(n).map(|(b, _)| b).unwrap_or(s.len())
}

const DIRECTIVE_WORDS: &[&str] = &["EJECT", "SKIP1", "SKIP2", "SKIP3"];

fn is_directive_text(content: &str) -> bool {
    let t = content.trim();
    if t.starts_with(">>") {
        return true;
    }
    let word = t.trim_end_matches('.').to_ascii_uppercase();
    DIRECTIVE_WORDS.contains(&word.as_str())
}

/// Classify one physical line.
pub fn classify_line(raw: &str, form: SourceForm) -> Result<CobolLine> {
    if raw.contains('\n') {
        return Err(Error::EmbeddedNewline);
    }
    match form {
        SourceForm::Fixed => classify_fixed(raw),
        SourceForm::Free => Ok(classify_free(raw)),
    }
}

fn classify_fixed(raw: &str) -> Result<CobolLine> {
    let len = char_len(raw);
    if len > FIXED_LINE_MAX {
        return Err(Error::FixedLineTooLong { line: 0, len });
    }
    let indicator = raw.chars().nth(6).unwrap_or(' ');
    let content = byte_at_char(raw, FIXED_PREFIX)..raw.len();
    let body = &raw[content.clone()];
    let mut line = CobolLine {
        raw: raw.to_string(),
        class: LineClass::Code,
        area: None,
        debug: false,
        content,
    };
    match indicator {
        '*' | '/' => line.class = LineClass::Comment,
        '-' => line.class = LineClass::Continuation,
        ' ' | 'D' | 'd' => {
            if body.chars().all(is_blank) {
                line.class = if indicator == ' ' {
                    LineClass::Blank
                } else {
                    LineClass::Code
                };
                line.debug = indicator != ' ';
            } else if indicator == ' ' && is_directive_text(body) {
                line.class = LineClass::Directive;
            } else {
                line.debug = indicator != ' ';
                line.area = line
                    .fixed_frame_leading()
                    .and_then(Area::from_leading);
            }
        }
        _ => line.class = LineClass::Directive,
    }
    Ok(line)
}

fn classify_free(raw: &str) -> CobolLine {
    let trimmed = raw.trim_start_matches(is_blank);
    let mut line = CobolLine {
        raw: raw.to_string(),
        class: LineClass::Code,
        area: None,
        debug: false,
        content: 0..raw.len(),
    };
    if trimmed.trim_end().is_empty() {
        line.class = LineClass::Blank;
    } else if trimmed.starts_with("*>") {
        line.class = LineClass::Comment;
    } else if raw.starts_with(">>D") && raw[3..].chars().next().is_none_or(is_blank) {
        line.debug = true;
    } else if trimmed.starts_with(">>") || is_directive_text(trimmed) {
        line.class = LineClass::Directive;
    } else {
        line.area = line
            .fixed_frame_leading()
            .and_then(Area::from_leading);
    }
    line
}

/// Determine the area of a code line.
pub fn detect_area(line: &CobolLine) -> Result<Area> {
    if line.class != LineClass::Code {
        return Err(Error::NotCodeLine);
    }
    line.area.ok_or(Error::NotCodeLine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Newline {
    Lf,
    CrLf,
}

impl Newline {
    pub fn as_str(self) -> &'static str {
        match self {
            Newline::Lf => "\n",
            Newline::CrLf => "\r\n",
        }
    }
}

/// A program, section or paragraph of COBOL source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobolUnit {
    pub lines: Vec<CobolLine>,
    pub form: SourceForm,
    pub kind: UnitKind,
    pub newline: Newline,
    /// Whether the text ends with a newline after the last line.
    pub trailing_newline: bool,
}

impl CobolUnit {
    pub fn parse(text: &str, form: SourceForm, kind: UnitKind) -> Result<CobolUnit> {
        let newline = if text.contains("\r\n") && !text.replace("\r\n", "").contains('\n') {
            Newline::CrLf
        } else {
            Newline::Lf
        };
        let trailing_newline = text.ends_with(newline.as_str());
        let body = if trailing_newline {
            &text[..text.len() - newline.as_str().len()]
        } else {
            text
        };
        let raws: Vec<String> = if text.is_empty() {
            Vec::new()
        } else {
            body.split(newline.as_str()).map(str::to_string).collect()
        };
        CobolUnit::from_raw_lines(raws, form, kind, newline, trailing_newline)
    }

    pub fn from_raw_lines(
        raws: Vec<String>,
        form: SourceForm,
        kind: UnitKind,
        newline: Newline,
        trailing_newline: bool,
    ) -> Result<CobolUnit> {
        let mut lines = Vec::with_capacity(raws.len());
        for (idx, raw) in raws.into_iter().enumerate() {
            let line = classify_line(&raw, form).map_err(|e| match e {
                Error::FixedLineTooLong { len, .. } => Error::FixedLineTooLong { line: idx + 1, len },
                other => other,
            })?;
            lines.push(line);
        }
        let unit = CobolUnit {
            lines,
            form,
            kind,
            newline,
            trailing_newline,
        };
        unit.validate()?;
        Ok(unit)
    }

    /// Rebuild with new raw lines, keeping form, kind and newline style.
    pub fn with_lines(&self, raws: Vec<String>) -> Result<CobolUnit> {
        CobolUnit::from_raw_lines(raws, self.form, self.kind, self.newline, self.trailing_newline)
    }

    /// Same lines reinterpreted in another form (no conversion).
    pub fn with_form_lines(&self, raws: Vec<String>, form: SourceForm) -> Result<CobolUnit> {
        CobolUnit::from_raw_lines(raws, form, self.kind, self.newline, self.trailing_newline)
    }

    fn validate(&self) -> Result<()> {
        if self.form != SourceForm::Fixed {
            return Ok(());
        }
        let mut prev: Option<LineClass> = None;
        for (idx, line) in self.lines.iter().enumerate() {
            if line.class == LineClass::Continuation {
                match prev {
                    None => {
                        return Err(Error::MisplacedContinuation {
                            line: idx + 1,
                            reason: "is the first line",
                        })
                    }
                    Some(LineClass::Code) | Some(LineClass::Continuation) => {}
                    Some(_) => {
                        return Err(Error::MisplacedContinuation {
                            line: idx + 1,
                            reason: "does not follow a code line",
                        })
                    }
                }
            }
            prev = Some(line.class);
        }
        Ok(())
    }

    pub fn raw_lines(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.raw.clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let nl = self.newline.as_str();
        let mut out = String::new();
        for (i, line) in self.lines.iter().enumerate() {
            if i > 0 {
                out.push_str(nl);
            }
            out.push_str(&line.raw);
        }
        if self.trailing_newline && !self.lines.is_empty() {
            out.push_str(nl);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Whether line `idx` is followed by a continuation line.
    pub fn is_continued(&self, idx: usize) -> bool {
        self.lines
            .get(idx + 1)
            .is_some_and(|l| l.class == LineClass::Continuation)
    }
}

/// Heuristic form detection: every line fits in 72 columns and the
/// indicator column is in use (or every code line leaves columns 1-7 blank).
pub fn detect_form(text: &str) -> SourceForm {
    let lines: Vec<&str> = text.lines().collect();
    if lines.iter().any(|l| char_len(l) > FIXED_LINE_MAX) {
        return SourceForm::Free;
    }
    let mut indicator_seen = false;
    let mut all_offset = true;
    for l in lines.iter().filter(|l| !l.trim().is_empty()) {
        let ind = l.chars().nth(6);
        if matches!(ind, Some('*') | Some('-') | Some('/')) {
            indicator_seen = true;
        }
        let prefix: String = l.chars().take(FIXED_PREFIX).collect();
        if l.trim_start().starts_with("*>") && l.find("*>").unwrap_or(0) < FIXED_PREFIX {
            return SourceForm::Free;
        }
        if char_len(&prefix) < FIXED_PREFIX
            || !prefix.chars().take(6).all(|c| c == ' ' || c.is_ascii_digit())
        {
            all_offset = false;
        }
    }
    if indicator_seen || all_offset {
        SourceForm::Fixed
    } else {
        SourceForm::Free
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_fixed_lines() {
        let c = classify_line("      * note", SourceForm::Fixed).unwrap();
        assert_eq!(c.class, LineClass::Comment);
        let c = classify_line("      -    'DEF'", SourceForm::Fixed).unwrap();
        assert_eq!(c.class, LineClass::Continuation);
        let c = classify_line("", SourceForm::Fixed).unwrap();
        assert_eq!(c.class, LineClass::Blank);
        let c = classify_line("000100", SourceForm::Fixed).unwrap();
        assert_eq!(c.class, LineClass::Blank);
        let c = classify_line("      D    DISPLAY X", SourceForm::Fixed).unwrap();
        assert!(c.is_code() && c.debug);
        let c = classify_line("       >>SOURCE FORMAT FIXED", SourceForm::Fixed).unwrap();
        assert_eq!(c.class, LineClass::Directive);
    }

    #[test]
    fn classify_free_lines() {
        assert_eq!(classify_line("", SourceForm::Free).unwrap().class, LineClass::Blank);
        assert_eq!(
            classify_line("   *> hi", SourceForm::Free).unwrap().class,
            LineClass::Comment
        );
        let d = classify_line(">>D DISPLAY X", SourceForm::Free).unwrap();
        assert!(d.debug && d.is_code());
        assert_eq!(
            classify_line(">>SOURCE FREE", SourceForm::Free).unwrap().class,
            LineClass::Directive
        );
    }

    #[test]
    fn fixed_too_long() {
        let raw = " ".repeat(73);
        assert!(matches!(
            classify_line(&raw, SourceForm::Fixed),
            Err(Error::FixedLineTooLong { len: 73, .. })
        ));
        assert!(classify_line(&" ".repeat(72), SourceForm::Fixed).is_ok());
    }

    #[test]
    fn areas() {
        let a = |n: usize| {
            let raw = format!("{}X.", " ".repeat(n));
            detect_area(&classify_line(&raw, SourceForm::Fixed).unwrap()).unwrap()
        };
        assert_eq!(a(7), Area::AreaA);
        assert_eq!(a(10), Area::AreaA);
        assert_eq!(a(11), Area::AreaB);
        let free = classify_line("    MOVE A TO B", SourceForm::Free).unwrap();
        assert_eq!(detect_area(&free).unwrap(), Area::AreaB);
        let free = classify_line("PARA.", SourceForm::Free).unwrap();
        assert_eq!(detect_area(&free).unwrap(), Area::AreaA);
        let blank = classify_line("", SourceForm::Free).unwrap();
        assert!(matches!(detect_area(&blank), Err(Error::NotCodeLine)));
    }

    #[test]
    fn lossless_text_round_trip() {
        for text in [
            "",
            "A\n",
            "A",
            "A\n\nB\n",
            "X\r\nY\r\n",
            "\n\n",
        ] {
            let u = CobolUnit::parse(text, SourceForm::Free, UnitKind::Program).unwrap();
            assert_eq!(u.to_text(), text);
        }
    }

    #[test]
    fn continuation_placement() {
        let bad = "      -    'X'\n";
        assert!(CobolUnit::parse(bad, SourceForm::Fixed, UnitKind::Program).is_err());
        let bad = "       MOVE 'A\n      * c\n      -    'B'.\n";
        assert!(CobolUnit::parse(bad, SourceForm::Fixed, UnitKind::Program).is_err());
        let ok = "       MOVE 'A\n      -    'B'.\n";
        assert!(CobolUnit::parse(ok, SourceForm::Fixed, UnitKind::Program).is_ok());
    }

    #[test]
    fn form_detection() {
        assert_eq!(
            detect_form("      * c\n       IDENTIFICATION DIVISION.\n"),
            SourceForm::Fixed
        );
        assert_eq!(detect_form("IDENTIFICATION DIVISION.\n*> c\n"), SourceForm::Free);
    }
}
