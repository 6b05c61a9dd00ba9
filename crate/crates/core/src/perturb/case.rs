use std::collections::HashSet;

use super::edit::{apply_edits, Edit};
use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::words::is_reserved;
use crate::model::{LineToken, TokenKind};

/// (line, start) of every word inside a COPY statement; copybook names
/// are resolved by the file system and keep their spelling.
fn copy_positions(ctx: &Ctx) -> HashSet<(usize, usize)> {
    let mut out = HashSet::new();
    let mut in_copy = false;
    for t in ctx.tokens.iter().flatten() {
        if t.is_word("COPY") {
            in_copy = true;
        } else if t.kind == TokenKind::Period {
            in_copy = false;
        } else if in_copy && t.kind == TokenKind::Word {
            out.insert((t.line, t.start));
        }
    }
    out
}

/// Word tokens on editable lines that pass `keep`.
fn words<'a>(ctx: &'a Ctx, keep: impl Fn(&LineToken) -> bool) -> Vec<&'a LineToken> {
    let copy = copy_positions(ctx);
    (0..ctx.unit.len())
        .filter(|&i| ctx.editable(i))
        .flat_map(|i| ctx.tokens[i].iter())
        .filter(|t| t.kind == TokenKind::Word && !copy.contains(&(t.line, t.start)))
        .filter(|t| keep(t))
        .collect()
}

fn identifiers<'a>(ctx: &'a Ctx) -> Vec<&'a LineToken> {
    words(ctx, |t| !is_reserved(&t.text))
}

fn recase(ctx: &Ctx, targets: Vec<&LineToken>, mut f: impl FnMut(&str) -> String) -> Attempt {
    if targets.is_empty() {
        return Attempt::NoTarget;
    }
    let edits = targets
        .into_iter()
        .filter_map(|t| {
            let new = f(&t.text);
            (new != t.text).then(|| Edit::new(t.line, t.start, t.end, new))
        })
        .collect();
    let mut raws = ctx.raws();
    apply_edits(&mut raws, edits);
    Attempt::Lines(raws)
}

pub(crate) fn identifiers_lowercase(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    Ok(recase(ctx, identifiers(ctx), |w| w.to_ascii_lowercase()))
}

pub(crate) fn identifiers_uppercase(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    Ok(recase(ctx, identifiers(ctx), |w| w.to_ascii_uppercase()))
}

pub(crate) fn identifiers_random_case(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    Ok(recase(ctx, identifiers(ctx), |w| {
        if rng.coin() {
            w.to_ascii_uppercase()
        } else {
            w.to_ascii_lowercase()
        }
    }))
}

pub(crate) fn keywords_lowercase(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    Ok(recase(ctx, words(ctx, |t| is_reserved(&t.text)), |w| {
        w.to_ascii_lowercase()
    }))
}
