//! END-IF / END-EVALUATE / END-PERFORM edits.
//!
//! A scope stack over explicit-scope openers decides which terminators can
//! be replaced by a period without changing what the period closes.

use std::collections::HashSet;

use super::edit::{apply_edits, Edit};
use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::{is_blank, words::is_reserved, LineToken, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BlockKeyword {
    If,
    Evaluate,
    Perform,
}

impl BlockKeyword {
    fn terminator(self) -> &'static str {
        match self {
            BlockKeyword::If => "END-IF",
            BlockKeyword::Evaluate => "END-EVALUATE",
            BlockKeyword::Perform => "END-PERFORM",
        }
    }

    fn from_terminator(word: &str) -> Option<Self> {
        match word {
            "END-IF" => Some(BlockKeyword::If),
            "END-EVALUATE" => Some(BlockKeyword::Evaluate),
            "END-PERFORM" => Some(BlockKeyword::Perform),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EndBlockMode {
    ReplaceWithPeriod,
    RemoveKeepPeriod,
}

/// Words that open an implicit scope (conditional phrases) or jump to the
/// next period; a sentence holding one is never given an extra period.
const CONFUSERS: &[&str] = &[
    "AT",
    "INVALID",
    "SIZE",
    "EXCEPTION",
    "OVERFLOW",
    "EOP",
    "END-OF-PAGE",
    "SEARCH",
    "NEXT",
];

#[derive(Debug, Clone)]
struct Site {
    tok: usize,
    kw: BlockKeyword,
    /// Open explicit scopes including this one; `None` when the stack did
    /// not match.
    depth: Option<usize>,
    sentence: usize,
    before_period: bool,
}

fn inline_perform(toks: &[&LineToken], k: usize) -> bool {
    match toks.get(k + 1) {
        Some(t) if t.kind == TokenKind::NumericLiteral => true,
        Some(t) if t.kind == TokenKind::Word && is_reserved(&t.text) => true,
        Some(t) if t.kind == TokenKind::Word => toks.get(k + 2).is_some_and(|n| n.is_word("TIMES")),
        _ => false,
    }
}

fn sites(toks: &[&LineToken]) -> (Vec<Site>, HashSet<usize>) {
    let mut stack: Vec<BlockKeyword> = Vec::new();
    let mut sentence = 0;
    let mut confused = HashSet::new();
    let mut out = Vec::new();
    for (k, t) in toks.iter().enumerate() {
        if t.kind == TokenKind::Period {
            sentence += 1;
            stack.clear();
            continue;
        }
        if t.kind != TokenKind::Word {
            continue;
        }
        let word = t.text.to_ascii_uppercase();
        match word.as_str() {
            "IF" => stack.push(BlockKeyword::If),
            "EVALUATE" => stack.push(BlockKeyword::Evaluate),
            "PERFORM" if inline_perform(toks, k) => stack.push(BlockKeyword::Perform),
            w if CONFUSERS.contains(&w) => {
                confused.insert(sentence);
            }
            w => {
                let Some(kw) = BlockKeyword::from_terminator(w) else {
                    if w.starts_with("END-") {
                        confused.insert(sentence);
                    }
                    continue;
                };
                let depth = if stack.last() == Some(&kw) {
                    let d = stack.len();
                    stack.pop();
                    Some(d)
                } else {
                    confused.insert(sentence);
                    if let Some(pos) = stack.iter().rposition(|s| *s == kw) {
                        stack.truncate(pos);
                    }
                    None
                };
                out.push(Site {
                    tok: k,
                    kw,
                    depth,
                    sentence,
                    before_period: toks.get(k + 1).is_some_and(|n| n.kind == TokenKind::Period),
                });
            }
        }
    }
    (out, confused)
}

pub(crate) fn end_block_edit(ctx: &Ctx, kw: BlockKeyword, mode: EndBlockMode) -> Result<Attempt> {
    let toks: Vec<&LineToken> = ctx
        .tokens
        .iter()
        .flatten()
        .filter(|t| t.kind != TokenKind::InlineComment && !t.opaque())
        .collect();
    let (all, confused) = sites(&toks);
    let mut raws = ctx.raws();
    let mut edits = Vec::new();
    for site in all.iter().filter(|s| s.kw == kw) {
        let t = toks[site.tok];
        debug_assert!(t.text.eq_ignore_ascii_case(kw.terminator()));
        match mode {
            EndBlockMode::ReplaceWithPeriod => {
                if site.depth != Some(1) || site.before_period || confused.contains(&site.sentence) {
                    continue;
                }
                let before = &raws[t.line][..t.start];
                let trimmed = before.trim_end_matches(is_blank);
                let start = if trimmed.is_empty() { t.start } else { trimmed.len() };
                edits.push(Edit::new(t.line, start, t.end, "."));
            }
            EndBlockMode::RemoveKeepPeriod => {
                if site.before_period {
                    edits.push(Edit::new(t.line, t.start, t.end, ""));
                }
            }
        }
    }
    if edits.is_empty() {
        return Ok(Attempt::NoTarget);
    }
    apply_edits(&mut raws, edits);
    Ok(Attempt::Lines(raws))
}

pub(crate) fn end_if_to_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::If, EndBlockMode::ReplaceWithPeriod)
}

pub(crate) fn end_if_drop_keep_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::If, EndBlockMode::RemoveKeepPeriod)
}

pub(crate) fn end_evaluate_to_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::Evaluate, EndBlockMode::ReplaceWithPeriod)
}

pub(crate) fn end_evaluate_drop_keep_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::Evaluate, EndBlockMode::RemoveKeepPeriod)
}

pub(crate) fn end_perform_to_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::Perform, EndBlockMode::ReplaceWithPeriod)
}

pub(crate) fn end_perform_drop_keep_period(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    end_block_edit(ctx, BlockKeyword::Perform, EndBlockMode::RemoveKeepPeriod)
}
