use super::edit::random_words;
use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::{byte_at_char, char_len, CobolLine, LineClass, SourceForm, FIXED_PREFIX};

/// Split a comment line into its marker prefix and its text.
fn marker_split(line: &CobolLine, form: SourceForm) -> (&str, &str) {
    let at = match form {
        SourceForm::Fixed => byte_at_char(&line.raw, FIXED_PREFIX),
        SourceForm::Free => line.raw.find("*>").map_or(0, |i| i + 2),
    };
    line.raw.split_at(at)
}

fn has_comments(ctx: &Ctx) -> bool {
    ctx.unit.lines.iter().any(|l| l.class == LineClass::Comment)
}

pub(crate) fn remove_all(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    if !has_comments(ctx) {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(
        ctx.unit
            .lines
            .iter()
            .filter(|l| l.class != LineClass::Comment)
            .map(|l| l.raw.clone())
            .collect(),
    ))
}

pub(crate) fn blank_content(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    if !has_comments(ctx) {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(
        ctx.unit
            .lines
            .iter()
            .map(|l| match l.class {
                LineClass::Comment => marker_split(l, ctx.unit.form).0.to_string(),
                _ => l.raw.clone(),
            })
            .collect(),
    ))
}

pub(crate) fn randomize_content(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut eligible = false;
    let mut out = Vec::with_capacity(ctx.unit.len());
    for l in &ctx.unit.lines {
        if l.class != LineClass::Comment {
            out.push(l.raw.clone());
            continue;
        }
        let (marker, text) = marker_split(l, ctx.unit.form);
        let len = char_len(text);
        if len == 0 {
            out.push(l.raw.clone());
            continue;
        }
        eligible = true;
        if rng.coin() {
            out.push(format!("{marker}{}", random_words(rng, len)));
        } else {
            out.push(l.raw.clone());
        }
    }
    if !eligible {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(out))
}
