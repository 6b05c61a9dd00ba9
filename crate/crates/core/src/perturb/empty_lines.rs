use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::LineClass;

/// Line indices before which an empty line may go: between two existing
/// lines, never in front of a continuation line.
fn gaps(ctx: &Ctx) -> Vec<usize> {
    (1..ctx.unit.len())
        .filter(|&i| ctx.unit.lines[i].class != LineClass::Continuation)
        .collect()
}

fn insert_before(ctx: &Ctx, at: &[usize]) -> Vec<String> {
    let mut out = Vec::with_capacity(ctx.unit.len() + at.len());
    let mut next = at.iter().peekable();
    for (i, raw) in ctx.raws().into_iter().enumerate() {
        if next.peek() == Some(&&i) {
            out.push(String::new());
            next.next();
        }
        out.push(raw);
    }
    out
}

pub(crate) fn insert_random(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let gaps = gaps(ctx);
    if gaps.is_empty() {
        return Ok(Attempt::NoTarget);
    }
    let chosen: Vec<usize> = gaps.into_iter().filter(|_| rng.coin()).collect();
    Ok(Attempt::Lines(insert_before(ctx, &chosen)))
}

pub(crate) fn insert_every_line(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    let gaps = gaps(ctx);
    if gaps.is_empty() {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(insert_before(ctx, &gaps)))
}

pub(crate) fn remove_all(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    if !ctx.unit.lines.iter().any(|l| l.class == LineClass::Blank) {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(
        ctx.unit
            .lines
            .iter()
            .filter(|l| l.class != LineClass::Blank)
            .map(|l| l.raw.clone())
            .collect(),
    ))
}
