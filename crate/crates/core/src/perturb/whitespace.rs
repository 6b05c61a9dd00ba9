use super::edit::{apply_edits, leading_blanks, Edit};
use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::{char_len, Area, SourceForm, FIXED_PREFIX};

/// Widest Area B indentation the reindent method draws (fixed-frame count).
const AREA_B_MAX: usize = 24;

/// Gaps between consecutive tokens of an editable line, as byte ranges.
fn gaps(ctx: &Ctx, idx: usize) -> Vec<(usize, usize)> {
    let toks = &ctx.tokens[idx];
    toks.windows(2)
        .map(|w| (w[0].end, w[1].start))
        .filter(|(a, b)| b > a)
        .collect()
}

pub(crate) fn collapse_single(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    let mut edits = Vec::new();
    for idx in 0..ctx.unit.len() {
        if !ctx.editable(idx) {
            continue;
        }
        for (a, b) in gaps(ctx, idx) {
            if &ctx.unit.lines[idx].raw[a..b] != " " {
                edits.push(Edit::new(idx, a, b, " "));
            }
        }
    }
    if edits.is_empty() {
        return Ok(Attempt::NoTarget);
    }
    let mut raws = ctx.raws();
    apply_edits(&mut raws, edits);
    Ok(Attempt::Lines(raws))
}

pub(crate) fn expand_random(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut raws = ctx.raws();
    let mut any_gap = false;
    for idx in 0..ctx.unit.len() {
        if !ctx.editable(idx) {
            continue;
        }
        let gs = gaps(ctx, idx);
        any_gap |= !gs.is_empty();
        let mut line_edits = Vec::new();
        let mut grown = char_len(&raws[idx]);
        for (a, b) in gs {
            if !rng.coin() {
                continue;
            }
            let width = rng.between(2, 6);
            let current = char_len(&raws[idx][a..b]);
            if width <= current || ctx.room_for(grown) < width - current {
                continue;
            }
            grown += width - current;
            line_edits.push(Edit::new(idx, a, b, " ".repeat(width)));
        }
        apply_edits(&mut raws, line_edits);
    }
    if !any_gap {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(raws))
}

pub(crate) fn reindent_within_area(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut raws = ctx.raws();
    let mut eligible = false;
    for (idx, line) in ctx.unit.lines.iter().enumerate() {
        if !ctx.editable(idx) {
            continue;
        }
        let (Some(area), Some(current)) = (line.area, line.fixed_frame_leading()) else {
            continue;
        };
        let body = line.content_str().trim_start_matches(crate::model::is_blank);
        let (lo, hi) = match area {
            Area::AreaA => (7, 10),
            Area::AreaB => (11, AREA_B_MAX),
        };
        // Frame leading plus the text must stay within 72 columns when the
        // line ends up in fixed form.
        let hi = if ctx.unit.form == SourceForm::Fixed || ctx.dest == SourceForm::Fixed {
            hi.min(72usize.saturating_sub(char_len(body)))
        } else {
            hi
        };
        if hi < lo {
            continue;
        }
        eligible = true;
        if !rng.coin() {
            continue;
        }
        let target = rng.between(lo, hi);
        if target == current {
            continue;
        }
        let indent = " ".repeat(target - FIXED_PREFIX);
        let start = line.content.start;
        let lead = leading_blanks(line.content_str());
        raws[idx].replace_range(start..start + lead, &indent);
    }
    if !eligible {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(raws))
}

pub(crate) fn trailing_pad(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut raws = ctx.raws();
    let mut eligible = false;
    for idx in 0..ctx.unit.len() {
        if !ctx.editable(idx) || ctx.unit.is_continued(idx) {
            continue;
        }
        let room = ctx.room_for(char_len(&raws[idx]));
        if room == 0 {
            continue;
        }
        eligible = true;
        if !rng.coin() {
            continue;
        }
        let pad = rng.between(1, 8).min(room);
        raws[idx].push_str(&" ".repeat(pad));
    }
    if !eligible {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(raws))
}

#[cfg(test)]
mod tests {
    use super::super::{apply_method, method, RngStream};
    use crate::model::{CobolUnit, SourceForm, UnitKind};

    fn apply(id: &str, text: &str, form: SourceForm, dest: SourceForm, seed: u64) -> (bool, String) {
        let u = CobolUnit::parse(text, form, UnitKind::Paragraph).unwrap();
        let out = apply_method(method(id).unwrap(), &u, &mut RngStream::new(seed), dest).unwrap();
        (out.changed, out.output.to_text())
    }

    #[test]
    fn collapse() {
        let (c, t) = apply(
            "ws_collapse_single",
            "    MOVE  A   TO B.  *> x\n",
            SourceForm::Free,
            SourceForm::Free,
            0,
        );
        assert!(c);
        assert_eq!(t, "    MOVE A TO B. *> x\n");
        let (c, _) = apply("ws_collapse_single", "    MOVE A TO B.\n", SourceForm::Free, SourceForm::Free, 0);
        assert!(!c);
    }

    #[test]
    fn expand_keeps_tokens_and_bound() {
        for seed in 0..20 {
            let line = format!("    MOVE {} TO B.\n", "A".repeat(45));
            let (_, t) = apply("ws_expand_random", &line, SourceForm::Free, SourceForm::Fixed, seed);
            assert!(t.trim_end().chars().count() <= 65);
            assert_eq!(
                t.split_whitespace().collect::<Vec<_>>(),
                line.split_whitespace().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn reindent_stays_in_area() {
        let text = "       PARA-A.\n           MOVE A TO B.\n";
        for seed in 0..20 {
            let (_, t) = apply("ws_reindent_within_area", text, SourceForm::Fixed, SourceForm::Fixed, seed);
            let lines: Vec<&str> = t.lines().collect();
            let lead = |s: &str| s.len() - s.trim_start().len();
            assert!((7..=10).contains(&lead(lines[0])));
            assert!((11..=24).contains(&lead(lines[1])));
        }
    }

    #[test]
    fn trailing_pad_respects_72() {
        let text = format!("       {}\n", "A".repeat(64));
        for seed in 0..10 {
            let (_, t) = apply("ws_trailing_pad", &text, SourceForm::Fixed, SourceForm::Fixed, seed);
            assert!(t.lines().all(|l| l.chars().count() <= 72));
        }
    }
}
