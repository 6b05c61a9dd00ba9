use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::edit::{apply_edits, Edit};
use super::{Attempt, Ctx, RenameMap, RngStream, MAX_TRIES};
use crate::error::{Error, Result};
use crate::model::words::{is_reserved, is_valid_user_word};
use crate::model::{extract_data_identifiers, IdentifierEntry, TokenKind};

/// How new identifier names are made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenameStyle {
    Gibberish,
    Sequential,
    HashDerived,
    Permutation,
    Suffix,
    HyphenStrip,
    Prefix,
}

impl RenameStyle {
    pub const ALL: [RenameStyle; 7] = [
        RenameStyle::Gibberish,
        RenameStyle::Sequential,
        RenameStyle::HashDerived,
        RenameStyle::Permutation,
        RenameStyle::Suffix,
        RenameStyle::HyphenStrip,
        RenameStyle::Prefix,
    ];

    /// Catalog id of the method using this style.
    pub fn method_id(self) -> &'static str {
        match self {
            RenameStyle::Gibberish => "rename_gibberish",
            RenameStyle::Sequential => "rename_sequential",
            RenameStyle::HashDerived => "rename_hash",
            RenameStyle::Permutation => "rename_permute",
            RenameStyle::Suffix => "rename_suffix",
            RenameStyle::HyphenStrip => "rename_hyphen_strip",
            RenameStyle::Prefix => "rename_prefix",
        }
    }
}

const PRESERVE_BASE: usize = 28;
const SUFFIX: &str = "-X";
const PREFIX: &str = "R-";

/// First `PRESERVE_BASE` characters, trailing hyphens removed.
fn base(name: &str) -> String {
    let cut: String = name.chars().take(PRESERVE_BASE).collect();
    cut.trim_end_matches('-').to_string()
}

fn hash_name(name: &str) -> String {
    let digest = Sha256::digest(name.to_ascii_uppercase().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02X}")).collect();
    format!("H-{}", &hex[..8])
}

fn gibberish_name(rng: &mut RngStream) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    let len = rng.between(6, 10);
    let mut s = String::with_capacity(len);
    s.push(LETTERS[rng.pick(LETTERS.len())] as char);
    for _ in 1..len {
        s.push(ALNUM[rng.pick(ALNUM.len())] as char);
    }
    s
}

fn rename(ctx: &Ctx, style: RenameStyle, rng: &mut RngStream) -> Result<Attempt> {
    let targets: Vec<IdentifierEntry> = extract_data_identifiers(ctx.unit)
        .into_iter()
        .filter(IdentifierEntry::renamable)
        .collect();
    let min = if style == RenameStyle::Permutation { 2 } else { 1 };
    if targets.len() < min {
        return Ok(Attempt::NoTarget);
    }
    // Every word already spelled in the unit, plus names handed out so far.
    let mut taken: HashSet<String> = ctx
        .tokens
        .iter()
        .flatten()
        .filter(|t| t.kind == TokenKind::Word)
        .map(|t| t.text.to_ascii_uppercase())
        .collect();
    let free = |name: &str, taken: &HashSet<String>| {
        is_valid_user_word(name) && !is_reserved(name) && !taken.contains(&name.to_ascii_uppercase())
    };

    let mut map = RenameMap::new();
    match style {
        RenameStyle::Permutation => {
            let mut names: Vec<String> = targets.iter().map(|e| e.name.clone()).collect();
            rng.shuffle(&mut names);
            for (e, new) in targets.iter().zip(names) {
                if !new.eq_ignore_ascii_case(&e.name) {
                    map.insert(e.name.clone(), new);
                }
            }
        }
        RenameStyle::Sequential => {
            let mut counter = 1;
            for e in &targets {
                let new = loop {
                    let cand = format!("VAR-{counter:04}");
                    counter += 1;
                    if free(&cand, &taken) {
                        break cand;
                    }
                };
                taken.insert(new.clone());
                map.insert(e.name.clone(), new);
            }
        }
        RenameStyle::Gibberish => {
            for e in &targets {
                let new = (0..MAX_TRIES)
                    .map(|_| gibberish_name(rng))
                    .find(|c| free(c, &taken))
                    .ok_or_else(|| Error::RenameCollision { name: e.name.clone() })?;
                taken.insert(new.clone());
                map.insert(e.name.clone(), new);
            }
        }
        RenameStyle::HashDerived
        | RenameStyle::Suffix
        | RenameStyle::HyphenStrip
        | RenameStyle::Prefix => {
            for e in &targets {
                let new = match style {
                    RenameStyle::HashDerived => hash_name(&e.name),
                    RenameStyle::Suffix => format!("{}{SUFFIX}", base(&e.name)),
                    RenameStyle::Prefix => format!("{PREFIX}{}", base(&e.name)),
                    _ => e.name.replace('-', ""),
                };
                if new.eq_ignore_ascii_case(&e.name) || !free(&new, &taken) {
                    continue;
                }
                taken.insert(new.to_ascii_uppercase());
                map.insert(e.name.clone(), new);
            }
        }
    }

    let mut edits = Vec::new();
    for e in &targets {
        if let Some(new) = map.get(&e.name) {
            edits.extend(e.occurrences.iter().map(|o| Edit::new(o.line, o.start, o.end, new.clone())));
        }
    }
    let mut raws = ctx.raws();
    apply_edits(&mut raws, edits);
    Ok(Attempt::Renamed(raws, map))
}

pub(crate) fn gibberish(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::Gibberish, rng)
}

pub(crate) fn sequential(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::Sequential, rng)
}

pub(crate) fn hash(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::HashDerived, rng)
}

pub(crate) fn permute(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::Permutation, rng)
}

pub(crate) fn suffix(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::Suffix, rng)
}

pub(crate) fn hyphen_strip(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::HyphenStrip, rng)
}

pub(crate) fn prefix(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    rename(ctx, RenameStyle::Prefix, rng)
}
