//! Routing of one perturbation request between source forms.
//!
//! Parse-requiring methods always see free form; the others act on the
//! input as given. Terminal node numbers identify which exit of the
//! routing flowchart produced the result.

use serde::{Deserialize, Serialize};

use crate::convert::{fixed_to_free, free_to_fixed_sfx, is_sfx};
use crate::error::{Error, Result};
use crate::model::{CobolUnit, SourceForm};
use crate::perturb::{
    apply_method, derive_seed, list_methods, MethodDescriptor, MethodFilter, RenameMap, RngStream,
};

/// Changed, parse-requiring, free output.
pub const NODE_PARSE_FREE: u8 = 8;
/// Changed, parse-requiring, fixed output (SFX rendering).
pub const NODE_PARSE_FIXED: u8 = 9;
/// Changed, no parse, forms match.
pub const NODE_DIRECT: u8 = 13;
/// Changed, no parse, free input converted to fixed.
pub const NODE_DIRECT_TO_FIXED: u8 = 15;
/// Changed, no parse, fixed input converted to free.
pub const NODE_DIRECT_TO_FREE: u8 = 16;
/// Unchanged, forms match: the input itself.
pub const NODE_UNCHANGED: u8 = 17;
pub const NODE_UNCHANGED_TO_FIXED: u8 = 19;
pub const NODE_UNCHANGED_TO_FREE: u8 = 20;

pub const TERMINAL_NODES: [u8; 8] = [
    NODE_PARSE_FREE,
    NODE_PARSE_FIXED,
    NODE_DIRECT,
    NODE_DIRECT_TO_FIXED,
    NODE_DIRECT_TO_FREE,
    NODE_UNCHANGED,
    NODE_UNCHANGED_TO_FIXED,
    NODE_UNCHANGED_TO_FREE,
];

#[derive(Debug, Clone)]
pub struct PerturbRequest<'a> {
    pub input: &'a CobolUnit,
    pub method: &'static MethodDescriptor,
    pub desired_output_form: SourceForm,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbResult {
    pub output: CobolUnit,
    pub changed: bool,
    pub terminal_node: u8,
    pub method_id: String,
    pub rename_map: Option<RenameMap>,
    /// Changed result of a parse-requiring method on non-SFX fixed input:
    /// continuation breaks were re-laid in SFX along with the edit.
    pub sfx_normalized: bool,
    pub tries_used: usize,
}

/// JSON record printed per call by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbRecord {
    pub method_id: String,
    pub terminal_node: u8,
    pub changed: bool,
    pub sfx_normalized: bool,
    pub seed: u64,
}

impl PerturbResult {
    pub fn record(&self, seed: u64) -> PerturbRecord {
        PerturbRecord {
            method_id: self.method_id.clone(),
            terminal_node: self.terminal_node,
            changed: self.changed,
            sfx_normalized: self.sfx_normalized,
            seed,
        }
    }
}

/// Methods that may be applied to `input` when the result must be in `form`.
pub fn valid_methods(input: &CobolUnit, form: SourceForm) -> Vec<&'static MethodDescriptor> {
    list_methods(&MethodFilter {
        category: None,
        unit_kind: Some(input.kind),
        output_form: Some(form),
    })
}

fn convert(unit: &CobolUnit, to: SourceForm) -> Result<CobolUnit> {
    Ok(match to {
        SourceForm::Fixed => free_to_fixed_sfx(unit)?.0,
        SourceForm::Free => fixed_to_free(unit)?.0,
    })
}

pub fn perturb(req: &PerturbRequest) -> Result<PerturbResult> {
    let m = req.method;
    let (input, dest) = (req.input, req.desired_output_form);
    if !valid_methods(input, dest).iter().any(|d| d.id == m.id) {
        return Err(Error::InvalidRequest(format!(
            "`{}` cannot be applied to a {} unit with {} output",
            m.id, input.kind, dest
        )));
    }
    let mut rng = RngStream::new(req.seed);
    let same_form = input.form == dest;

    let (outcome, output, node, sfx_normalized) = if m.requires_free_parse {
        let free = match input.form {
            SourceForm::Free => input.clone(),
            SourceForm::Fixed => fixed_to_free(input)?.0,
        };
        let outcome = apply_method(m, &free, &mut rng, dest)?;
        if outcome.changed {
            match dest {
                SourceForm::Free => {
                    let out = outcome.output.clone();
                    (outcome, out, NODE_PARSE_FREE, false)
                }
                SourceForm::Fixed => {
                    // The continuation-split methods already render fixed form.
                    let out = if outcome.output.form == SourceForm::Fixed {
                        outcome.output.clone()
                    } else {
                        free_to_fixed_sfx(&outcome.output)?.0
                    };
                    let normalized = input.form == SourceForm::Fixed && !is_sfx(input)?;
                    (outcome, out, NODE_PARSE_FIXED, normalized)
                }
            }
        } else {
            (outcome, input.clone(), 0, false)
        }
    } else {
        let outcome = apply_method(m, input, &mut rng, dest)?;
        if outcome.changed {
            let (out, node) = if same_form {
                (outcome.output.clone(), NODE_DIRECT)
            } else if input.form == SourceForm::Free {
                (convert(&outcome.output, dest)?, NODE_DIRECT_TO_FIXED)
            } else {
                (convert(&outcome.output, dest)?, NODE_DIRECT_TO_FREE)
            };
            (outcome, out, node, false)
        } else {
            (outcome, input.clone(), 0, false)
        }
    };

    let (output, node) = if outcome.changed {
        (output, node)
    } else if same_form {
        (input.clone(), NODE_UNCHANGED)
    } else if input.form == SourceForm::Free {
        (convert(input, dest)?, NODE_UNCHANGED_TO_FIXED)
    } else {
        (convert(input, dest)?, NODE_UNCHANGED_TO_FREE)
    };
    Ok(PerturbResult {
        output,
        changed: outcome.changed,
        terminal_node: node,
        method_id: m.id.to_string(),
        rename_map: outcome.rename_map,
        sfx_normalized,
        tries_used: outcome.tries_used,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredResult {
    pub output: CobolUnit,
    pub method_ids: Vec<String>,
    /// One per layer, in application order.
    pub layers: Vec<PerturbResult>,
}

/// Apply `methods` in order, each to the previous layer's output. Layer `k`
/// draws from `derive_seed(seed, k)`.
pub fn perturb_layered(
    input: &CobolUnit,
    methods: &[&'static MethodDescriptor],
    form: SourceForm,
    seed: u64,
) -> Result<LayeredResult> {
    if methods.is_empty() {
        return Err(Error::InvalidRequest("no layers given".into()));
    }
    for (i, a) in methods.iter().enumerate() {
        if methods[..i].iter().any(|b| b.id == a.id) {
            return Err(Error::InvalidRequest(format!("method `{}` repeated", a.id)));
        }
    }
    let mut current = input.clone();
    let mut layers = Vec::with_capacity(methods.len());
    for (k, m) in methods.iter().enumerate() {
        let result = perturb(&PerturbRequest {
            input: &current,
            method: m,
            desired_output_form: form,
            seed: derive_seed(seed, k as u64),
        })?;
        if !result.changed {
            return Err(Error::LayerNoEffect {
                layer: k,
                method: m.id.to_string(),
            });
        }
        current = result.output.clone();
        layers.push(result);
    }
    Ok(LayeredResult {
        output: current,
        method_ids: methods.iter().map(|m| m.id.to_string()).collect(),
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UnitKind;
    use crate::perturb::method;

    fn para(text: &str, form: SourceForm) -> CobolUnit {
        CobolUnit::parse(text, form, UnitKind::Paragraph).unwrap()
    }

    fn run(u: &CobolUnit, id: &str, dest: SourceForm) -> Result<PerturbResult> {
        perturb(&PerturbRequest {
            input: u,
            method: method(id).unwrap(),
            desired_output_form: dest,
            seed: 7,
        })
    }

    #[test]
    fn valid_method_counts() {
        let p = para("       A.\n", SourceForm::Fixed);
        assert_eq!(valid_methods(&p, SourceForm::Free).len(), 24);
        assert_eq!(valid_methods(&p, SourceForm::Fixed).len(), 26);
    }

    #[test]
    fn fixed_only_method_rejected_for_free_output() {
        let u = para("    MOVE 'AB' TO X.\n", SourceForm::Free);
        assert!(matches!(
            run(&u, "split_literal_continuation", SourceForm::Free),
            Err(Error::InvalidRequest(_))
        ));
    }

    #[test]
    fn unchanged_returns_input_bytes() {
        // Non-SFX layout: the literal is split although it would fit.
        let u = para("       MOVE 'AB\n      -    'CD' TO X.\n", SourceForm::Fixed);
        let r = run(&u, "empty_remove_all", SourceForm::Fixed).unwrap();
        assert_eq!((r.changed, r.terminal_node), (false, NODE_UNCHANGED));
        assert_eq!(r.output.to_text(), u.to_text());
        let r = run(&u, "identifiers_uppercase", SourceForm::Fixed).unwrap();
        assert_eq!((r.changed, r.terminal_node), (false, NODE_UNCHANGED));
        assert_eq!(r.output.to_text(), u.to_text());
    }

    #[test]
    fn parse_change_on_non_sfx_is_normalized() {
        let u = para("       MOVE 'AB\n      -    'CD' TO x.\n", SourceForm::Fixed);
        let r = run(&u, "identifiers_uppercase", SourceForm::Fixed).unwrap();
        assert_eq!(r.terminal_node, NODE_PARSE_FIXED);
        assert!(r.sfx_normalized);
        assert_eq!(r.output.to_text(), "       MOVE 'ABCD' TO X.\n");
    }

    #[test]
    fn layered_needs_each_layer_to_change() {
        let u = para("       DISPLAY X.\n       DISPLAY Y.\n", SourceForm::Fixed);
        let layers = [
            method("empty_insert_every_line").unwrap(),
            method("empty_remove_all").unwrap(),
        ];
        let r = perturb_layered(&u, &layers, SourceForm::Fixed, 1).unwrap();
        assert_eq!(r.output, u);
        let rev = [layers[1], layers[0]];
        assert!(matches!(
            perturb_layered(&u, &rev, SourceForm::Fixed, 1),
            Err(Error::LayerNoEffect { layer: 0, .. })
        ));
    }
}
