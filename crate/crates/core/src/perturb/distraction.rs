use std::collections::HashMap;

use super::edit::{apply_edits, Edit};
use super::{Attempt, Ctx, RngStream};
use crate::error::Result;
use crate::model::words::{is_condition_word, is_reserved, is_verb};
use crate::model::{char_len, LineToken, TokenKind};

const NOISE: &str = "THEN ";

/// Token index of the statement that follows the condition of the IF at
/// `k`, or `None` when THEN is already present or the condition holds a
/// reserved word we do not recognise.
fn condition_end(toks: &[&LineToken], k: usize) -> Option<usize> {
    for (j, t) in toks.iter().enumerate().skip(k + 1) {
        match t.kind {
            TokenKind::Period => return None,
            TokenKind::Word => {
                let w = t.text.to_ascii_uppercase();
                if w == "THEN" || w == "ELSE" || w == "END-IF" {
                    return None;
                }
                if is_verb(&w) {
                    return (j > k + 1).then_some(j);
                }
                if is_reserved(&w) && !is_condition_word(&w) {
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

pub(crate) fn insert_noise_then(ctx: &Ctx, _: &mut RngStream) -> Result<Attempt> {
    let toks: Vec<&LineToken> = ctx
        .tokens
        .iter()
        .flatten()
        .filter(|t| t.kind != TokenKind::InlineComment && !t.opaque())
        .collect();
    let mut growth: HashMap<usize, usize> = HashMap::new();
    let mut edits = Vec::new();
    for (k, t) in toks.iter().enumerate() {
        if !t.is_word("IF") {
            continue;
        }
        let Some(j) = condition_end(&toks, k) else {
            continue;
        };
        let at = toks[j];
        let grown = growth.entry(at.line).or_insert(0);
        let len = char_len(&ctx.unit.lines[at.line].raw) + *grown;
        if ctx.room_for(len) < NOISE.len() {
            continue;
        }
        *grown += NOISE.len();
        edits.push(Edit::new(at.line, at.start, at.start, NOISE));
    }
    if edits.is_empty() {
        return Ok(Attempt::NoTarget);
    }
    let mut raws = ctx.raws();
    apply_edits(&mut raws, edits);
    Ok(Attempt::Lines(raws))
}

#[cfg(test)]
mod tests {
    use super::super::{apply_method, method, RngStream};
    use crate::model::{CobolUnit, SourceForm, UnitKind};

    fn run(text: &str) -> (bool, String) {
        let u = CobolUnit::parse(text, SourceForm::Free, UnitKind::Paragraph).unwrap();
        let o = apply_method(
            method("insert_noise_then").unwrap(),
            &u,
            &mut RngStream::new(0),
            SourceForm::Free,
        )
        .unwrap();
        (o.changed, o.output.to_text())
    }

    #[test]
    fn inserts_before_first_statement() {
        assert_eq!(
            run("    IF A = B\n        MOVE 1 TO X\n    END-IF.\n").1,
            "    IF A = B\n        THEN MOVE 1 TO X\n    END-IF.\n"
        );
        assert_eq!(
            run("    IF A IF B DISPLAY X.\n").1,
            "    IF A THEN IF B THEN DISPLAY X.\n"
        );
    }

    #[test]
    fn skips_existing_then_and_unknown_words() {
        assert!(!run("    IF A THEN DISPLAY X.\n").0);
        assert!(!run("    IF A CORRESPONDING B DISPLAY X.\n").0);
    }
}
