use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexer::TokenKind;
use super::scan::{scan_unit, LineToken};
use super::words::{is_reserved, SPECIAL_REGISTERS};
use super::CobolUnit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentifierOrigin {
    DataDivision,
    SpecialRegister,
    CopybookFixed,
    Filler,
}

/// One occurrence of a word: line index and byte range within that line's raw text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    pub line: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifierEntry {
    /// Spelling at the first declaration (or first use for non-declared origins).
    pub name: String,
    pub origin: IdentifierOrigin,
    pub occurrences: Vec<LineSpan>,
    /// Referenced inside an EXEC block or on a debug line; never renamed.
    pub pinned: bool,
}

impl IdentifierEntry {
    pub fn renamable(&self) -> bool {
        self.origin == IdentifierOrigin::DataDivision && !self.pinned
    }
}

/// Special-register names exempt from renaming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterCatalog {
    names: HashSet<String>,
}

impl Default for RegisterCatalog {
    fn default() -> Self {
        RegisterCatalog {
            names: SPECIAL_REGISTERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RegisterCatalog {
    /// Read one register name per line; `#` starts a comment. Replaces the
    /// built-in list entirely.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_names(text.lines().map(|l| {
            l.split('#').next().unwrap_or("").trim()
        })))
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        RegisterCatalog {
            names: names
                .into_iter()
                .filter(|n| !n.is_empty())
                .map(|n| n.to_ascii_uppercase())
                .collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.names.contains(&word.to_ascii_uppercase())
    }
}

const LEVELS: &[u32] = &[66, 77, 88];

fn is_level(tok: &LineToken) -> bool {
    if tok.kind != TokenKind::NumericLiteral || !tok.text.chars().all(|c| c.is_ascii_digit()) {
        return false;
    }
    tok.text
        .parse::<u32>()
        .is_ok_and(|n| (1..=49).contains(&n) || LEVELS.contains(&n))
}

pub fn extract_data_identifiers(program: &CobolUnit) -> Vec<IdentifierEntry> {
    extract_data_identifiers_with(program, &RegisterCatalog::default())
}

pub fn extract_data_identifiers_with(
    program: &CobolUnit,
    registers: &RegisterCatalog,
) -> Vec<IdentifierEntry> {
    let toks = scan_unit(program);
    let (data_start, data_end) = data_division_range(&toks);

    let mut order: Vec<(String, String, IdentifierOrigin)> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut copy_words: HashSet<String> = HashSet::new();

    // COPY targets (and REPLACING operands) up to the closing period.
    let mut in_copy = false;
    for t in &toks {
        if t.is_word("COPY") {
            in_copy = true;
            continue;
        }
        if in_copy {
            if t.kind == TokenKind::Period {
                in_copy = false;
            } else if t.kind == TokenKind::Word && !is_reserved(&t.text) {
                copy_words.insert(t.text.to_ascii_uppercase());
            }
        }
    }

    let mut push = |name: &str, origin: IdentifierOrigin, order: &mut Vec<_>| {
        let key = name.to_ascii_uppercase();
        if seen.insert(key.clone()) {
            order.push((key, name.to_string(), origin));
        }
    };

    let mut after_period = true;
    for (k, t) in toks.iter().enumerate() {
        let in_data = k >= data_start && k < data_end;
        if in_data && after_period && is_level(t) {
            if let Some(next) = toks.get(k + 1) {
                if next.is_word("FILLER") {
                    push(&next.text, IdentifierOrigin::Filler, &mut order);
                } else if next.kind == TokenKind::Word && !is_reserved(&next.text) {
                    let origin = if copy_words.contains(&next.text.to_ascii_uppercase()) {
                        IdentifierOrigin::CopybookFixed
                    } else {
                        IdentifierOrigin::DataDivision
                    };
                    push(&next.text, origin, &mut order);
                }
            }
        }
        after_period = t.kind == TokenKind::Period;
    }
    for t in &toks {
        if t.kind != TokenKind::Word {
            continue;
        }
        if registers.contains(&t.text) {
            push(&t.text, IdentifierOrigin::SpecialRegister, &mut order);
        } else if copy_words.contains(&t.text.to_ascii_uppercase()) {
            push(&t.text, IdentifierOrigin::CopybookFixed, &mut order);
        }
    }

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut entries: Vec<IdentifierEntry> = order
        .into_iter()
        .enumerate()
        .map(|(n, (key, name, origin))| {
            index.insert(key, n);
            IdentifierEntry {
                name,
                origin,
                occurrences: Vec::new(),
                pinned: false,
            }
        })
        .collect();
    for t in &toks {
        if t.kind != TokenKind::Word {
            continue;
        }
        if let Some(&n) = index.get(&t.text.to_ascii_uppercase()) {
            let e = &mut entries[n];
            e.occurrences.push(LineSpan {
                line: t.line,
                start: t.start,
                end: t.end,
            });
            e.pinned |= t.opaque();
        }
    }
    entries
}

/// Token index range of the DATA DIVISION (header to next division header).
fn data_division_range(toks: &[LineToken]) -> (usize, usize) {
    let is_div = |k: usize| {
        toks.get(k + 1).is_some_and(|t| t.is_word("DIVISION")) && toks[k].kind == TokenKind::Word
    };
    let Some(start) = (0..toks.len()).find(|&k| is_div(k) && toks[k].is_word("DATA")) else {
        return (0, 0);
    };
    let end = (start + 2..toks.len()).find(|&k| is_div(k)).unwrap_or(toks.len());
    (start, end)
}
