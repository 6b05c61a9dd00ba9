//! Fixed-form <-> free-form conversion.
//!
//! `fixed_to_free` is many-to-one: continuation layout is forgotten.
//! `free_to_fixed_sfx` produces the standard fixed form (SFX), where only
//! lines longer than 72 characters are split, each split as late as legally
//! possible, continuation content resuming at column 12.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    is_blank, tokenize_lenient, CobolUnit, LineClass, SourceForm, TokenKind, FIXED_LINE_MAX,
    FIXED_PREFIX,
};

/// Content capacity of the first physical line (columns 8-72).
pub const FIRST_CAPACITY: usize = FIXED_LINE_MAX - FIXED_PREFIX;
/// Prefix of an SFX continuation line: blank sequence area, `-`, four spaces.
pub const CONTINUATION_PREFIX: &str = "      -    ";
/// Content capacity of a continuation line (columns 12-72).
pub const CONTINUATION_CAPACITY: usize = FIXED_LINE_MAX - 11;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversionTrace {
    pub joined_continuations: usize,
    pub comma_spaces_inserted: usize,
    pub comments_restyled: usize,
    pub lines_split: usize,
    pub trailing_spaces_dropped: usize,
}

fn require_form(unit: &CobolUnit, expected: SourceForm) -> Result<()> {
    if unit.form != expected {
        return Err(Error::FormMismatch {
            expected,
            actual: unit.form,
        });
    }
    Ok(())
}

/// Quote character of a nonnumeric literal left open at the end of `text`.
pub(crate) fn open_literal(text: &str) -> Option<char> {
    let last = tokenize_lenient(text).pop()?;
    if last.kind != TokenKind::NonnumericLiteral {
        return None;
    }
    let quote = last.quote()?;
    let open_at = last.text.find(quote)?;
    let body = &last.text[open_at + 1..];
    // Closed when the body ends with an unpaired quote.
    let trailing = body.chars().rev().take_while(|c| *c == quote).count();
    if trailing % 2 == 1 {
        None
    } else {
        Some(quote)
    }
}

pub fn fixed_to_free(unit: &CobolUnit) -> Result<(CobolUnit, ConversionTrace)> {
    require_form(unit, SourceForm::Fixed)?;
    let mut trace = ConversionTrace::default();
    let mut out: Vec<String> = Vec::with_capacity(unit.len());
    let mut code_lines: Vec<usize> = Vec::new();
    let mut idx = 0;
    while idx < unit.lines.len() {
        let line = &unit.lines[idx];
        match line.class {
            LineClass::Comment => {
                trace.comments_restyled += 1;
                out.push(format!("*>{}", line.content_str()));
            }
            LineClass::Blank | LineClass::Directive => out.push(line.content_str().to_string()),
            LineClass::Code | LineClass::Continuation => {
                let mut acc = line.content_str().to_string();
                while unit.is_continued(idx) {
                    idx += 1;
                    trace.joined_continuations += 1;
                    let cont = unit.lines[idx].content_str();
                    match open_literal(&acc) {
                        Some(q) => {
                            let rest = cont.trim_start_matches(is_blank);
                            let Some(after) = rest.strip_prefix(q) else {
                                return Err(Error::MalformedContinuation { line: idx + 1 });
                            };
                            acc.push_str(after);
                        }
                        None => acc.push_str(cont.trim_start_matches(is_blank)),
                    }
                }
                if line.debug {
                    acc.insert_str(0, ">>D");
                }
                code_lines.push(out.len());
                out.push(acc);
            }
        }
        idx += 1;
    }
    let count = out.len();
    for n in code_lines {
        let followed_by_newline = n + 1 < count || unit.trailing_newline;
        if followed_by_newline && (out[n].ends_with(',') || out[n].ends_with(';')) {
            out[n].push(' ');
            trace.comma_spaces_inserted += 1;
        }
    }
    Ok((unit.with_form_lines(out, SourceForm::Free)?, trace))
}

/// A legal place to break a code line, as a character index into its content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPoint {
    pub at: usize,
    /// Quote to re-open on the continuation line when the split is inside a literal.
    pub quote: Option<char>,
}

/// All legal split points of a free-form code line's content: whitespace
/// gaps before a token, and positions strictly inside a literal body away
/// from any quote character. Nothing at or after an inline comment.
pub fn split_points(content: &str) -> Vec<SplitPoint> {
    let chars: Vec<char> = content.chars().collect();
    let n = chars.len();
    // Byte offset -> char index.
    let mut char_at = vec![0usize; content.len() + 1];
    for (ci, (b, _)) in content.char_indices().enumerate() {
        char_at[b] = ci;
    }
    char_at[content.len()] = n;

    let mut literal = vec![false; n];
    let mut body_quote: Vec<Option<char>> = vec![None; n];
    let mut limit = n;
    for tok in tokenize_lenient(content) {
        let s = char_at[tok.span.start];
        let e = char_at[tok.span.end];
        match tok.kind {
            TokenKind::InlineComment => {
                limit = limit.min(s);
            }
            TokenKind::NonnumericLiteral => {
                let q = tok.quote().expect("literal has a quote");
                let open = s + tok.text[..tok.text.find(q).unwrap()].chars().count();
                let closed = open_literal(&tok.text).is_none();
                let body_end = if closed { e - 1 } else { e };
                for flag in literal.iter_mut().take(e).skip(s) {
                    *flag = true;
                }
                for slot in body_quote.iter_mut().take(body_end).skip(open + 1) {
                    *slot = Some(q);
                }
            }
            _ => {}
        }
    }

    let mut points = Vec::new();
    let mut seen_text = false;
    for p in 1..limit {
        seen_text |= !is_blank(chars[p - 1]);
        if seen_text && is_blank(chars[p - 1]) && !is_blank(chars[p]) && !literal[p - 1] {
            points.push(SplitPoint { at: p, quote: None });
            continue;
        }
        if let (Some(q), Some(q2)) = (body_quote[p - 1], body_quote[p]) {
            if q == q2 && chars[p - 1] != q && chars[p] != q {
                points.push(SplitPoint { at: p, quote: Some(q) });
            }
        }
    }
    points
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Emitted {
    pub lines: Vec<String>,
    pub trailing_dropped: usize,
}

/// Lay out one code line's content as fixed-form physical lines. `forced`
/// lists extra split points (character indices, each from [`split_points`])
/// to honour before any split needed for length. On failure returns the
/// character length of the unsplittable remainder.
pub(crate) fn emit_fixed_line(
    content: &str,
    indicator: char,
    forced: &[usize],
) -> std::result::Result<Emitted, usize> {
    let chars: Vec<char> = content.chars().collect();
    let points = split_points(content);
    let mut out = Emitted::default();
    let mut pos = 0;
    let mut resume: Option<char> = None;
    loop {
        let first = out.lines.is_empty();
        let mut line = if first {
            format!("      {indicator}")
        } else {
            CONTINUATION_PREFIX.to_string()
        };
        if let Some(q) = resume {
            line.push(q);
        }
        let cap = FIXED_LINE_MAX - line.chars().count();
        let rest = &chars[pos..];
        let next_forced = forced.iter().copied().filter(|&f| f > pos).min();
        let fits = |end: usize| end - pos <= cap;

        let split = match next_forced {
            Some(f) if fits(f) => points.iter().find(|p| p.at == f).copied(),
            _ if rest.len() <= cap => None,
            _ => {
                let trimmed = rest.len() - rest.iter().rev().take_while(|c| is_blank(**c)).count();
                if trimmed <= cap {
                    out.trailing_dropped += rest.len() - cap;
                    line.extend(&rest[..cap]);
                    out.lines.push(line);
                    return Ok(out);
                }
                let best = points.iter().rev().find(|p| p.at > pos && fits(p.at));
                match best {
                    Some(p) => Some(*p),
                    None => return Err(rest.len()),
                }
            }
        };
        match split {
            Some(p) => {
                line.extend(&chars[pos..p.at]);
                out.lines.push(line);
                pos = p.at;
                resume = p.quote;
            }
            None => {
                line.extend(rest);
                out.lines.push(line);
                return Ok(out);
            }
        }
    }
}

pub fn free_to_fixed_sfx(unit: &CobolUnit) -> Result<(CobolUnit, ConversionTrace)> {
    free_to_fixed_with(unit, |_| Vec::new())
}

/// Free-to-fixed conversion with caller-chosen extra split points per line.
pub(crate) fn free_to_fixed_with(
    unit: &CobolUnit,
    mut forced: impl FnMut(usize) -> Vec<usize>,
) -> Result<(CobolUnit, ConversionTrace)> {
    require_form(unit, SourceForm::Free)?;
    let mut trace = ConversionTrace::default();
    let mut out: Vec<String> = Vec::with_capacity(unit.len());
    for (idx, line) in unit.lines.iter().enumerate() {
        let raw = line.raw.as_str();
        match line.class {
            LineClass::Blank | LineClass::Directive => {
                if raw.is_empty() {
                    out.push(String::new());
                    continue;
                }
                let mut fixed = format!("       {raw}");
                let len = fixed.chars().count();
                if len > FIXED_LINE_MAX {
                    let keep = fixed.trim_end().chars().count();
                    if keep > FIXED_LINE_MAX {
                        return Err(Error::UnsplittableLine { line: idx + 1, len });
                    }
                    trace.trailing_spaces_dropped += len - FIXED_LINE_MAX;
                    fixed = fixed.chars().take(FIXED_LINE_MAX).collect();
                }
                out.push(fixed);
            }
            LineClass::Comment => {
                trace.comments_restyled += 1;
                let at = raw.find("*>").expect("comment marker");
                let text: Vec<char> = raw[at + 2..].chars().collect();
                let mut len = text.len();
                let trimmed = len - text.iter().rev().take_while(|c| is_blank(**c)).count();
                if len > FIRST_CAPACITY && trimmed <= FIRST_CAPACITY {
                    trace.trailing_spaces_dropped += len - FIRST_CAPACITY;
                    len = FIRST_CAPACITY;
                }
                if len <= FIRST_CAPACITY {
                    out.push(format!("      *{}", text[..len].iter().collect::<String>()));
                    continue;
                }
                trace.lines_split += 1;
                for chunk in text[..trimmed].chunks(FIRST_CAPACITY) {
                    out.push(format!("      *{}", chunk.iter().collect::<String>()));
                }
            }
            LineClass::Code | LineClass::Continuation => {
                let (content, indicator) = if line.debug {
                    (&raw[3..], 'D')
                } else {
                    (raw, ' ')
                };
                let emitted = emit_fixed_line(content, indicator, &forced(idx)).map_err(
                    |len| Error::UnsplittableLine { line: idx + 1, len },
                )?;
                if emitted.lines.len() > 1 {
                    trace.lines_split += 1;
                }
                trace.trailing_spaces_dropped += emitted.trailing_dropped;
                out.extend(emitted.lines);
            }
        }
    }
    Ok((unit.with_form_lines(out, SourceForm::Fixed)?, trace))
}

/// Whether a fixed-form unit is already in standard fixed form.
pub fn is_sfx(unit: &CobolUnit) -> Result<bool> {
    require_form(unit, SourceForm::Fixed)?;
    let (free, _) = fixed_to_free(unit)?;
    let (back, _) = free_to_fixed_sfx(&free)?;
    Ok(back.to_text() == unit.to_text())
}

/// Convert to `form` (identity when already there).
pub fn convert_to(unit: &CobolUnit, form: SourceForm) -> Result<CobolUnit> {
    match (unit.form, form) {
        (a, b) if a == b => Ok(unit.clone()),
        (SourceForm::Fixed, SourceForm::Free) => Ok(fixed_to_free(unit)?.0),
        _ => Ok(free_to_fixed_sfx(unit)?.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UnitKind;

    fn fixed(text: &str) -> CobolUnit {
        CobolUnit::parse(text, SourceForm::Fixed, UnitKind::Program).unwrap()
    }

    fn free(text: &str) -> CobolUnit {
        CobolUnit::parse(text, SourceForm::Free, UnitKind::Program).unwrap()
    }

    #[test]
    fn literal_continuation_joins() {
        let u = fixed("       MOVE 'ABC\n      -    'DEF' TO X\n");
        let (f, t) = fixed_to_free(&u).unwrap();
        assert_eq!(f.to_text(), "MOVE 'ABCDEF' TO X\n");
        assert_eq!(t.joined_continuations, 1);
    }

    #[test]
    fn word_continuation_discards_leading_space() {
        let u = fixed("       MOVE A\n      -        TO X\n");
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), "MOVE ATO X\n");
        let u = fixed("       MOVE A \n      -        TO X\n");
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), "MOVE A TO X\n");
    }

    #[test]
    fn malformed_literal_continuation() {
        let u = fixed("       MOVE 'ABC\n      -    DEF' TO X\n");
        assert!(matches!(
            fixed_to_free(&u),
            Err(Error::MalformedContinuation { line: 2 })
        ));
    }

    #[test]
    fn comma_gets_space() {
        let u = fixed("       MOVE A,\n       B\n");
        let (f, t) = fixed_to_free(&u).unwrap();
        assert_eq!(f.to_text(), "MOVE A, \nB\n");
        assert_eq!(t.comma_spaces_inserted, 1);
        let u = fixed("       X;");
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), "X;");
    }

    #[test]
    fn comment_restyle() {
        let u = fixed("      * hello\n");
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), "*> hello\n");
        let back = free_to_fixed_sfx(&free("*> hello\n")).unwrap().0;
        assert_eq!(back.to_text(), "      * hello\n");
    }

    #[test]
    fn short_line_unchanged() {
        let line = format!("    {}", "A".repeat(36));
        let (u, t) = free_to_fixed_sfx(&free(&line)).unwrap();
        assert_eq!(u.to_text(), format!("       {line}"));
        assert_eq!(t.lines_split, 0);
    }

    #[test]
    fn long_line_splits_at_last_gap() {
        // Words of 9 characters separated by single spaces.
        let words: Vec<String> = (0..10).map(|i| format!("WORD{i:05}")).collect();
        let line = words.join(" ");
        let (u, _) = free_to_fixed_sfx(&free(&line)).unwrap();
        let lines = u.raw_lines();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.chars().count() <= 72));
        assert!(lines[1].starts_with("      -    WORD"));
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), line);
    }

    #[test]
    fn long_literal_splits_inside() {
        let line = format!("'{}'", "Z".repeat(88));
        let (u, _) = free_to_fixed_sfx(&free(&line)).unwrap();
        let lines = u.raw_lines();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].chars().count(), 72);
        assert!(lines[1].starts_with("      -    'Z"));
        assert_eq!(fixed_to_free(&u).unwrap().0.to_text(), line);
    }

    #[test]
    fn unsplittable_word() {
        let line = format!("    MOVE {} TO X", "A".repeat(70));
        assert!(matches!(
            free_to_fixed_sfx(&free(&line)),
            Err(Error::UnsplittableLine { line: 1, .. })
        ));
    }

    #[test]
    fn sfx_detection() {
        let sfx = fixed("       MOVE 'A' TO X.\n");
        assert!(is_sfx(&sfx).unwrap());
        let early = fixed("       MOVE 'A'\n      -    TO X.\n");
        assert!(!is_sfx(&early).unwrap());
        let comma = fixed("       MOVE A,\n       B.\n");
        assert!(!is_sfx(&comma).unwrap());
    }

    #[test]
    fn debug_lines_round_trip() {
        let u = fixed("      D    DISPLAY X\n");
        let (f, _) = fixed_to_free(&u).unwrap();
        assert_eq!(f.to_text(), ">>D    DISPLAY X\n");
        assert_eq!(free_to_fixed_sfx(&f).unwrap().0, u);
    }

    #[test]
    fn long_comment_splits_into_comments() {
        let text = "x".repeat(100);
        let (u, t) = free_to_fixed_sfx(&free(&format!("*>{text}"))).unwrap();
        let lines = u.raw_lines();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.starts_with("      *")));
        assert_eq!(t.lines_split, 1);
    }

    #[test]
    fn trailing_space_overflow_dropped() {
        let line = format!("    MOVE A TO B{}", " ".repeat(70));
        let (u, t) = free_to_fixed_sfx(&free(&line)).unwrap();
        assert_eq!(u.raw_lines()[0].chars().count(), 72);
        assert_eq!(t.trailing_spaces_dropped, line.chars().count() + 7 - 72);
    }

    #[test]
    fn split_point_catalog() {
        let pts = split_points("MOVE 'AB''C' TO X *> a b");
        let ats: Vec<usize> = pts.iter().map(|p| p.at).collect();
        // Gaps before 'AB''C', TO, X; literal interior between A and B only.
        assert_eq!(ats, vec![5, 7, 13, 16]);
        assert_eq!(pts[1].quote, Some('\''));
    }
}
