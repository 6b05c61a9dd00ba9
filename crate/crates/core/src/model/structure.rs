use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lexer::{tokenize_lenient, Token, TokenKind};
use super::words::is_reserved;
use super::{Area, CobolLine, CobolUnit, LineClass, UnitKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphInfo {
    pub name: String,
    /// Header line through the last code line before the next header.
    pub lines: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionInfo {
    /// `None` for paragraphs that precede any section header.
    pub name: Option<String>,
    pub lines: Range<usize>,
    pub paragraphs: Vec<ParagraphInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionInfo {
    /// Upper-cased first word of the header (`IDENTIFICATION`, `DATA`, ...).
    pub name: String,
    pub lines: Range<usize>,
    pub sections: Vec<SectionInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramStructure {
    pub divisions: Vec<DivisionInfo>,
}

impl ProgramStructure {
    pub fn division(&self, name: &str) -> Option<&DivisionInfo> {
        self.divisions
            .iter()
            .find(|d| d.name.eq_ignore_ascii_case(name))
    }

    /// Procedure-division paragraphs in source order.
    pub fn paragraphs(&self) -> Vec<&ParagraphInfo> {
        self.divisions
            .iter()
            .filter(|d| d.name == "PROCEDURE")
            .flat_map(|d| d.sections.iter())
            .flat_map(|s| s.paragraphs.iter())
            .collect()
    }

    pub fn paragraph(&self, name: &str) -> Option<&ParagraphInfo> {
        self.paragraphs()
            .into_iter()
            .find(|p| p.name.eq_ignore_ascii_case(name))
    }
}

enum Header {
    Division(String),
    Section(String),
    Paragraph(String),
    /// `END PROGRAM`, `END DECLARATIVES`, `DECLARATIVES`.
    Boundary,
}

fn line_tokens(line: &CobolLine) -> Vec<Token> {
    tokenize_lenient(line.content_str())
        .into_iter()
        .filter(|t| t.kind != TokenKind::InlineComment)
        .collect()
}

fn classify_header(line: &CobolLine, in_procedure: bool) -> Option<Header> {
    if !line.is_target_code() {
        return None;
    }
    let toks = line_tokens(line);
    let first = toks.first()?;
    if toks.len() >= 2 && toks[1].is_word("DIVISION") && first.kind == TokenKind::Word {
        return Some(Header::Division(first.text.to_ascii_uppercase()));
    }
    if line.area != Some(Area::AreaA) {
        return None;
    }
    if first.is_word("END")
        && toks
            .get(1)
            .is_some_and(|t| t.is_word("PROGRAM") || t.is_word("DECLARATIVES"))
    {
        return Some(Header::Boundary);
    }
    if first.is_word("DECLARATIVES") {
        return Some(Header::Boundary);
    }
    let name_like = |t: &Token| match t.kind {
        TokenKind::Word => !is_reserved(&t.text),
        TokenKind::NumericLiteral => t.text.chars().all(|c| c.is_ascii_digit()),
        _ => false,
    };
    if toks.len() >= 2 && toks[1].is_word("SECTION") && (name_like(first) || !in_procedure) {
        return Some(Header::Section(first.text.clone()));
    }
    if in_procedure
        && name_like(first)
        && toks.get(1).is_some_and(|t| t.kind == TokenKind::Period)
    {
        return Some(Header::Paragraph(first.text.clone()));
    }
    None
}

/// Extend `end` backwards over trailing blank and comment lines.
fn trim_tail(unit: &CobolUnit, start: usize, mut end: usize) -> usize {
    while end > start + 1
        && matches!(
            unit.lines[end - 1].class,
            LineClass::Blank | LineClass::Comment
        )
    {
        end -= 1;
    }
    end
}

pub fn extract_structure(unit: &CobolUnit) -> Result<ProgramStructure> {
    if unit.kind != UnitKind::Program {
        return Err(Error::WrongUnitKind {
            expected: "program",
        });
    }
    let mut divisions: Vec<DivisionInfo> = Vec::new();
    let mut in_procedure = false;
    // Open paragraph: (name, header line).
    let mut open_para: Option<(String, usize)> = None;

    fn close_para(
        unit: &CobolUnit,
        divisions: &mut [DivisionInfo],
        open: &mut Option<(String, usize)>,
        at: usize,
    ) {
        if let Some((name, start)) = open.take() {
            let end = trim_tail(unit, start, at);
            if let Some(sec) = divisions.last_mut().and_then(|d| d.sections.last_mut()) {
                sec.paragraphs.push(ParagraphInfo {
                    name,
                    lines: start..end,
                });
            }
        }
    }

    for (idx, line) in unit.lines.iter().enumerate() {
        let Some(header) = classify_header(line, in_procedure) else {
            continue;
        };
        close_para(unit, &mut divisions, &mut open_para, idx);
        match header {
            Header::Division(name) => {
                in_procedure = name == "PROCEDURE";
                divisions.push(DivisionInfo {
                    name,
                    lines: idx..idx,
                    sections: vec![SectionInfo {
                        name: None,
                        lines: idx..idx,
                        paragraphs: Vec::new(),
                    }],
                });
            }
            Header::Section(name) => {
                if let Some(div) = divisions.last_mut() {
                    div.sections.push(SectionInfo {
                        name: Some(name),
                        lines: idx..idx,
                        paragraphs: Vec::new(),
                    });
                }
            }
            Header::Paragraph(name) => {
                if !divisions.is_empty() {
                    open_para = Some((name, idx));
                }
            }
            Header::Boundary => {
                in_procedure = in_procedure
                    && !line_tokens(line)
                        .get(1)
                        .is_some_and(|t| t.is_word("PROGRAM"));
            }
        }
    }
    close_para(unit, &mut divisions, &mut open_para, unit.lines.len());

    // Fill in division and section extents.
    let total = unit.lines.len();
    let starts: Vec<usize> = divisions.iter().map(|d| d.lines.start).collect();
    for (k, div) in divisions.iter_mut().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(total);
        div.lines.end = end;
        let sec_starts: Vec<usize> = div.sections.iter().map(|s| s.lines.start).collect();
        for (s, sec) in div.sections.iter_mut().enumerate() {
            sec.lines.end = sec_starts.get(s + 1).copied().unwrap_or(end);
        }
        // Drop the implicit leading section when nothing lives in it.
        if div.sections.len() > 1 && div.sections[0].paragraphs.is_empty() {
            div.sections.remove(0);
        }
    }
    if !divisions.iter().any(|d| d.name == "PROCEDURE") {
        return Err(Error::NoProcedureDivision);
    }
    Ok(ProgramStructure { divisions })
}

/// Index of the PROCEDURE DIVISION header line. Paragraph and section units
/// are procedure code throughout, so they report line 0.
pub fn procedure_start(unit: &CobolUnit) -> Option<usize> {
    if unit.kind != UnitKind::Program {
        return Some(0);
    }
    unit.lines.iter().position(|l| {
        l.is_target_code() && {
            let toks = line_tokens(l);
            toks.len() >= 2 && toks[0].is_word("PROCEDURE") && toks[1].is_word("DIVISION")
        }
    })
}

pub fn extract_paragraph(program: &CobolUnit, name: &str) -> Result<CobolUnit> {
    let structure = extract_structure(program)?;
    let para = structure
        .paragraph(name)
        .ok_or_else(|| Error::UnknownParagraph(name.to_string()))?;
    Ok(CobolUnit {
        lines: program.lines[para.lines.clone()].to_vec(),
        form: program.form,
        kind: UnitKind::Paragraph,
        newline: program.newline,
        trailing_newline: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourceForm;

    const PROGRAM: &str = "\
       IDENTIFICATION DIVISION.
       PROGRAM-ID. DEMO.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-A PIC 9.
       PROCEDURE DIVISION.
       MAIN-PARA.
           PERFORM PARA-A
           STOP RUN.

      * helper
       para-a.
           MOVE 1 TO WS-A
           DISPLAY WS-A
           ADD 1 TO WS-A
           .
";

    fn program() -> CobolUnit {
        CobolUnit::parse(PROGRAM, SourceForm::Fixed, UnitKind::Program).unwrap()
    }

    #[test]
    fn paragraphs_found() {
        let s = extract_structure(&program()).unwrap();
        let names: Vec<_> = s.paragraphs().iter().map(|p| p.name.clone()).collect();
        assert_eq!(names, ["MAIN-PARA", "para-a"]);
        assert_eq!(s.paragraphs()[0].lines, 6..9);
        assert_eq!(s.paragraphs()[1].lines, 11..16);
        let data = s.division("data").unwrap();
        assert_eq!(data.sections[0].name.as_deref(), Some("WORKING-STORAGE"));
    }

    #[test]
    fn paragraph_extraction() {
        let p = extract_paragraph(&program(), "PARA-A").unwrap();
        assert_eq!(p.kind, UnitKind::Paragraph);
        assert_eq!(p.len(), 5);
        assert_eq!(p, extract_paragraph(&program(), "para-a").unwrap());
        assert!(matches!(
            extract_paragraph(&program(), "NOPE"),
            Err(Error::UnknownParagraph(_))
        ));
    }

    #[test]
    fn empty_procedure_division() {
        let u = CobolUnit::parse(
            "       IDENTIFICATION DIVISION.\n       PROCEDURE DIVISION.\n",
            SourceForm::Fixed,
            UnitKind::Program,
        )
        .unwrap();
        assert!(extract_structure(&u).unwrap().paragraphs().is_empty());
        let u = CobolUnit::parse(
            "       IDENTIFICATION DIVISION.\n",
            SourceForm::Fixed,
            UnitKind::Program,
        )
        .unwrap();
        assert!(matches!(
            extract_structure(&u),
            Err(Error::NoProcedureDivision)
        ));
    }

    #[test]
    fn procedure_start_line() {
        assert_eq!(procedure_start(&program()), Some(5));
    }
}
