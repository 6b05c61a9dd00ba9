use super::edit::{code_tokens, has_inline_comment, leading_blanks};
use super::{Attempt, Ctx, RngStream};
use crate::convert::{free_to_fixed_with, split_points};
use crate::error::Result;
use crate::model::{char_len, procedure_start, Area, TokenKind};

/// Extra indentation of the second half of a split line.
const SPLIT_INDENT: usize = 4;

fn ends_sentence(ctx: &Ctx, idx: usize) -> bool {
    code_tokens(&ctx.tokens[idx])
        .last()
        .is_some_and(|t| t.kind == TokenKind::Period)
}

pub(crate) fn join_sentence_lines(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let n = ctx.unit.len();
    let eligible = |i: usize| {
        i + 1 < n
            && ctx.editable(i)
            && ctx.editable(i + 1)
            && !code_tokens(&ctx.tokens[i]).is_empty()
            && !code_tokens(&ctx.tokens[i + 1]).is_empty()
            && !ends_sentence(ctx, i)
            && !has_inline_comment(&ctx.tokens[i])
            && ctx.unit.lines[i + 1].area == Some(Area::AreaB)
    };
    let pairs: Vec<bool> = (0..n).map(eligible).collect();
    if !pairs.iter().any(|p| *p) {
        return Ok(Attempt::NoTarget);
    }
    let join: Vec<bool> = pairs.iter().map(|&p| p && rng.coin()).collect();
    let raws = ctx.raws();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut cur = raws[i].clone();
        while join[i] {
            let candidate = format!(
                "{} {}",
                cur.trim_end(),
                raws[i + 1].trim_start_matches(crate::model::is_blank)
            );
            if !ctx.fits(&candidate) {
                break;
            }
            cur = candidate;
            i += 1;
        }
        out.push(cur);
        i += 1;
    }
    Ok(Attempt::Lines(out))
}

pub(crate) fn split_token_boundary(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut out = Vec::with_capacity(ctx.unit.len());
    let mut eligible = false;
    for (idx, raw) in ctx.raws().into_iter().enumerate() {
        let toks = code_tokens(&ctx.tokens[idx]);
        let splittable = ctx.editable(idx)
            && ctx.unit.lines[idx].area == Some(Area::AreaB)
            && toks.len() >= 2;
        if !splittable {
            out.push(raw);
            continue;
        }
        eligible = true;
        if !rng.coin() {
            out.push(raw);
            continue;
        }
        let g = rng.pick(toks.len() - 1);
        let (a, b) = (toks[g].end, toks[g + 1].start);
        let indent = " ".repeat(leading_blanks(&raw) + SPLIT_INDENT);
        out.push(raw[..a].to_string());
        out.push(format!("{indent}{}", &raw[b..]));
    }
    if !eligible {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(out))
}

pub(crate) fn period_newline(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    let proc_start = procedure_start(ctx.unit).unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(ctx.unit.len());
    let mut changed = false;
    for (idx, raw) in ctx.raws().into_iter().enumerate() {
        let toks = code_tokens(&ctx.tokens[idx]);
        let splits: Vec<usize> = (0..toks.len().saturating_sub(1))
            .filter(|&k| toks[k].kind == TokenKind::Period)
            .collect();
        if !ctx.editable(idx) || splits.is_empty() {
            out.push(raw);
            continue;
        }
        changed = true;
        let own = &raw[..leading_blanks(&raw)];
        let area_a = ctx.unit.lines[idx].area == Some(Area::AreaA);
        let mut from = 0;
        let mut prefix = String::new();
        for k in splits {
            out.push(format!("{prefix}{}", &raw[from..toks[k].end]));
            let next = toks[k + 1];
            // Area A text after a period stays in Area A only for entries that
            // belong there (level numbers, headers); the rest moves to Area B.
            let keep = !area_a
                || (idx < proc_start
                    && (next.kind == TokenKind::NumericLiteral
                        || toks.get(k + 2).is_some_and(|t| {
                            t.is_word("DIVISION") || t.is_word("SECTION")
                        })));
            prefix = if keep {
                own.to_string()
            } else {
                " ".repeat(SPLIT_INDENT)
            };
            from = next.start;
        }
        out.push(format!("{prefix}{}", &raw[from..]));
    }
    if !changed {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Lines(out))
}

pub(crate) fn split_literal_continuation(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut forced: Vec<Vec<usize>> = vec![Vec::new(); ctx.unit.len()];
    let mut any = false;
    for (idx, line) in ctx.unit.lines.iter().enumerate() {
        if !ctx.editable(idx) {
            continue;
        }
        let points = split_points(&line.raw);
        for t in code_tokens(&ctx.tokens[idx]) {
            if t.kind != TokenKind::NonnumericLiteral {
                continue;
            }
            let s = char_len(&line.raw[..t.start]);
            let e = s + char_len(&t.text);
            let inside: Vec<usize> = points
                .iter()
                .filter(|p| p.quote.is_some() && p.at > s && p.at < e)
                .map(|p| p.at)
                .collect();
            if inside.is_empty() {
                continue;
            }
            any = true;
            forced[idx].push(inside[rng.pick(inside.len())]);
        }
    }
    if !any {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Unit(
        free_to_fixed_with(ctx.unit, |idx| forced[idx].clone())?.0,
    ))
}

pub(crate) fn random_line_continuation_split(ctx: &Ctx, rng: &mut RngStream) -> Result<Attempt> {
    let mut forced: Vec<Vec<usize>> = vec![Vec::new(); ctx.unit.len()];
    let mut any = false;
    for (idx, line) in ctx.unit.lines.iter().enumerate() {
        if !ctx.editable(idx) {
            continue;
        }
        let points = split_points(&line.raw);
        if points.is_empty() {
            continue;
        }
        any = true;
        if rng.coin() {
            forced[idx].push(points[rng.pick(points.len())].at);
        }
    }
    if !any {
        return Ok(Attempt::NoTarget);
    }
    Ok(Attempt::Unit(
        free_to_fixed_with(ctx.unit, |idx| forced[idx].clone())?.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{apply_method, method, normal_tokens, RngStream};
    use crate::convert::{fixed_to_free, is_sfx};
    use crate::model::{CobolUnit, SourceForm, UnitKind};

    fn free(text: &str, kind: UnitKind) -> CobolUnit {
        CobolUnit::parse(text, SourceForm::Free, kind).unwrap()
    }

    fn apply(id: &str, u: &CobolUnit, dest: SourceForm, seed: u64) -> super::super::PerturbOutcome {
        apply_method(method(id).unwrap(), u, &mut RngStream::new(seed), dest).unwrap()
    }

    #[test]
    fn period_newline_splits_sentences() {
        let u = free("PARA-A. MOVE 1 TO X. DISPLAY X.\n    ADD 1 TO X. *> c\n", UnitKind::Paragraph);
        let out = apply("period_newline_end_of_sent", &u, SourceForm::Free, 0);
        assert_eq!(
            out.output.to_text(),
            "PARA-A.\n    MOVE 1 TO X.\n    DISPLAY X.\n    ADD 1 TO X. *> c\n"
        );
    }

    #[test]
    fn join_and_split_keep_tokens() {
        let u = free(
            "    MOVE A\n        TO B\n    DISPLAY A B C D.\n",
            UnitKind::Paragraph,
        );
        for seed in 0..10 {
            for id in ["lb_join_sentence_lines", "lb_split_token_boundary"] {
                let out = apply(id, &u, SourceForm::Free, seed);
                assert!(out.changed);
                assert_eq!(normal_tokens(&out.output).unwrap(), normal_tokens(&u).unwrap());
            }
        }
    }

    #[test]
    fn literal_split_round_trips() {
        let u = free("    MOVE 'ABCD' TO X.\n", UnitKind::Paragraph);
        for seed in 0..10 {
            let out = apply("split_literal_continuation", &u, SourceForm::Fixed, seed);
            assert!(out.changed);
            assert_eq!(out.output.form, SourceForm::Fixed);
            assert!(!is_sfx(&out.output).unwrap());
            assert_eq!(fixed_to_free(&out.output).unwrap().0, u);
        }
        let none = free("    MOVE A TO X.\n", UnitKind::Paragraph);
        assert!(!apply("split_literal_continuation", &none, SourceForm::Fixed, 0).changed);
    }

    #[test]
    fn random_split_round_trips() {
        let u = free(
            "    MOVE A TO B.\n    DISPLAY 'HELLO' X.\n    ADD 1 TO C.\n",
            UnitKind::Paragraph,
        );
        let out = apply("random_line_continuation_split", &u, SourceForm::Fixed, 5);
        assert!(out.changed);
        assert!(!is_sfx(&out.output).unwrap());
        assert_eq!(fixed_to_free(&out.output).unwrap().0, u);
    }
}
