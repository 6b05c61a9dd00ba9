//! The perturbation catalog: 33 meaning-preserving methods in 9 categories.
//!
//! Every method targets one feature of the source with one action. Methods
//! flagged `requires_free_parse` receive free-form input; the others work on
//! the unit in its original form. Routing between forms lives in the
//! pipeline module.

mod case;
mod comments;
mod distraction;
mod edit;
mod empty_lines;
mod end_block;
mod line_breaks;
mod rename;
pub mod rng;
mod whitespace;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::convert::{fixed_to_free, free_to_fixed_sfx, FIRST_CAPACITY};
use crate::error::{Error, Result};
use crate::model::{
    char_len, scan_unit, tokenize, CobolUnit, LineToken, SourceForm, TokenKind, UnitKind,
    FIXED_LINE_MAX,
};

pub use rename::RenameStyle;
pub use rng::{derive_seed, salt_of, RngStream, RNG_ALGORITHM};

/// Probabilistic methods get this many attempts before giving up.
pub const MAX_TRIES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    EndBlock,
    WithinLineWhitespace,
    LineBreaks,
    Distraction,
    EmptyLines,
    Comments,
    Case,
    IdentifierRenamingObfuscation,
    IdentifierRenamingPreserve,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::EndBlock,
        Category::WithinLineWhitespace,
        Category::LineBreaks,
        Category::Distraction,
        Category::EmptyLines,
        Category::Comments,
        Category::Case,
        Category::IdentifierRenamingObfuscation,
        Category::IdentifierRenamingPreserve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::EndBlock => "end_block",
            Category::WithinLineWhitespace => "within_line_whitespace",
            Category::LineBreaks => "line_breaks",
            Category::Distraction => "distraction",
            Category::EmptyLines => "empty_lines",
            Category::Comments => "comments",
            Category::Case => "case",
            Category::IdentifierRenamingObfuscation => "identifier_renaming_obfuscation",
            Category::IdentifierRenamingPreserve => "identifier_renaming_preserve",
        }
    }

    pub fn is_renaming(self) -> bool {
        matches!(
            self,
            Category::IdentifierRenamingObfuscation | Category::IdentifierRenamingPreserve
        )
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Determinism {
    Deterministic,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    AnyUnit,
    ProgramOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodDescriptor {
    pub id: &'static str,
    pub category: Category,
    pub determinism: Determinism,
    pub requires_free_parse: bool,
    pub scope: Scope,
    pub fixed_output_only: bool,
}

impl MethodDescriptor {
    pub fn is_probabilistic(&self) -> bool {
        self.determinism == Determinism::Probabilistic
    }

    pub fn applies_to(&self, kind: UnitKind) -> bool {
        self.scope == Scope::AnyUnit || kind == UnitKind::Program
    }
}

const fn m(
    id: &'static str,
    category: Category,
    probabilistic: bool,
    requires_free_parse: bool,
) -> MethodDescriptor {
    let scope = match category {
        Category::IdentifierRenamingObfuscation | Category::IdentifierRenamingPreserve => {
            Scope::ProgramOnly
        }
        _ => Scope::AnyUnit,
    };
    MethodDescriptor {
        id,
        category,
        determinism: if probabilistic {
            Determinism::Probabilistic
        } else {
            Determinism::Deterministic
        },
        requires_free_parse,
        scope,
        fixed_output_only: false,
    }
}

const fn fixed_only(mut d: MethodDescriptor) -> MethodDescriptor {
    d.fixed_output_only = true;
    d
}

use Category::*;

static CATALOG: [MethodDescriptor; 33] = [
    m("end_if_to_period", EndBlock, false, true),
    m("end_if_drop_keep_period", EndBlock, false, true),
    m("end_evaluate_to_period", EndBlock, false, true),
    m("end_evaluate_drop_keep_period", EndBlock, false, true),
    m("end_perform_to_period", EndBlock, false, true),
    m("end_perform_drop_keep_period", EndBlock, false, true),
    m("ws_collapse_single", WithinLineWhitespace, false, true),
    m("ws_expand_random", WithinLineWhitespace, true, true),
    m("ws_reindent_within_area", WithinLineWhitespace, true, false),
    m("ws_trailing_pad", WithinLineWhitespace, true, false),
    m("lb_join_sentence_lines", LineBreaks, true, true),
    m("lb_split_token_boundary", LineBreaks, true, true),
    m("period_newline_end_of_sent", LineBreaks, false, true),
    fixed_only(m("split_literal_continuation", LineBreaks, true, true)),
    fixed_only(m("random_line_continuation_split", LineBreaks, true, true)),
    m("insert_noise_then", Distraction, false, true),
    m("empty_insert_random", EmptyLines, true, false),
    m("empty_insert_every_line", EmptyLines, false, false),
    m("empty_remove_all", EmptyLines, false, false),
    m("comments_remove_all", Comments, false, false),
    m("comments_blank_content", Comments, false, false),
    m("comments_randomize_content", Comments, true, false),
    m("identifiers_lowercase", Case, false, true),
    m("identifiers_uppercase", Case, false, true),
    m("identifiers_random_case", Case, true, true),
    m("keywords_lowercase", Case, false, true),
    m("rename_gibberish", IdentifierRenamingObfuscation, true, true),
    m("rename_sequential", IdentifierRenamingObfuscation, false, true),
    m("rename_hash", IdentifierRenamingObfuscation, false, true),
    m("rename_permute", IdentifierRenamingObfuscation, true, true),
    m("rename_suffix", IdentifierRenamingPreserve, false, true),
    m("rename_hyphen_strip", IdentifierRenamingPreserve, false, true),
    m("rename_prefix", IdentifierRenamingPreserve, false, true),
];

/// The whole catalog in category order.
pub fn catalog() -> &'static [MethodDescriptor] {
    &CATALOG
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MethodFilter {
    pub category: Option<Category>,
    /// Keep only methods applicable to this unit kind.
    pub unit_kind: Option<UnitKind>,
    /// Keep only methods that can produce this output form.
    pub output_form: Option<SourceForm>,
}

/// Catalog entries passing `filter`, sorted by id.
pub fn list_methods(filter: &MethodFilter) -> Vec<&'static MethodDescriptor> {
    let mut out: Vec<_> = CATALOG
        .iter()
        .filter(|d| filter.category.is_none_or(|c| d.category == c))
        .filter(|d| filter.unit_kind.is_none_or(|k| d.applies_to(k)))
        .filter(|d| filter.output_form != Some(SourceForm::Free) || !d.fixed_output_only)
        .collect();
    out.sort_by_key(|d| d.id);
    out
}

pub fn method(id: &str) -> Result<&'static MethodDescriptor> {
    CATALOG
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownMethod(id.to_string()))
}

/// Old name -> new name, keyed by the declared spelling.
pub type RenameMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbOutcome {
    pub changed: bool,
    pub output: CobolUnit,
    pub tries_used: usize,
    pub rename_map: Option<RenameMap>,
}

/// Result of one attempt of a method.
pub(crate) enum Attempt {
    /// Nothing in the unit the method could act on; retrying is pointless.
    NoTarget,
    Lines(Vec<String>),
    Renamed(Vec<String>, RenameMap),
    /// Form-changing output (the continuation-split methods).
    Unit(CobolUnit),
}

/// What a method sees: the unit, its tokens grouped by line, and the form
/// the result is headed for.
pub(crate) struct Ctx<'a> {
    pub unit: &'a CobolUnit,
    pub dest: SourceForm,
    pub tokens: Vec<Vec<LineToken>>,
}

impl<'a> Ctx<'a> {
    fn new(unit: &'a CobolUnit, dest: SourceForm) -> Self {
        let mut tokens = vec![Vec::new(); unit.len()];
        for t in scan_unit(unit) {
            let line = t.line;
            tokens[line].push(t);
        }
        Ctx { unit, dest, tokens }
    }

    pub fn raws(&self) -> Vec<String> {
        self.unit.raw_lines()
    }

    /// Whether a rewritten line still fits where it is headed: fixed lines
    /// stay within 72 columns, free lines bound for fixed form stay within
    /// one fixed line.
    pub fn fits(&self, line: &str) -> bool {
        match (self.unit.form, self.dest) {
            (SourceForm::Fixed, _) => char_len(line) <= FIXED_LINE_MAX,
            (SourceForm::Free, SourceForm::Fixed) => char_len(line) <= FIRST_CAPACITY,
            (SourceForm::Free, SourceForm::Free) => true,
        }
    }

    /// Characters a line of length `len` may still grow by.
    pub fn room_for(&self, len: usize) -> usize {
        match (self.unit.form, self.dest) {
            (SourceForm::Fixed, _) => FIXED_LINE_MAX.saturating_sub(len),
            (SourceForm::Free, SourceForm::Fixed) => FIRST_CAPACITY.saturating_sub(len),
            (SourceForm::Free, SourceForm::Free) => usize::MAX,
        }
    }

    /// Line holds code that methods may edit: a non-debug code line with no
    /// EXEC-block tokens.
    pub fn editable(&self, idx: usize) -> bool {
        self.unit.lines[idx].is_target_code() && !self.tokens[idx].iter().any(|t| t.opaque())
    }
}

type Runner = fn(&Ctx, &mut RngStream) -> Result<Attempt>;

fn runner(id: &str) -> Runner {
    match id {
        "end_if_to_period" => end_block::end_if_to_period,
        "end_if_drop_keep_period" => end_block::end_if_drop_keep_period,
        "end_evaluate_to_period" => end_block::end_evaluate_to_period,
        "end_evaluate_drop_keep_period" => end_block::end_evaluate_drop_keep_period,
        "end_perform_to_period" => end_block::end_perform_to_period,
        "end_perform_drop_keep_period" => end_block::end_perform_drop_keep_period,
        "ws_collapse_single" => whitespace::collapse_single,
        "ws_expand_random" => whitespace::expand_random,
        "ws_reindent_within_area" => whitespace::reindent_within_area,
        "ws_trailing_pad" => whitespace::trailing_pad,
        "lb_join_sentence_lines" => line_breaks::join_sentence_lines,
        "lb_split_token_boundary" => line_breaks::split_token_boundary,
        "period_newline_end_of_sent" => line_breaks::period_newline,
        "split_literal_continuation" => line_breaks::split_literal_continuation,
        "random_line_continuation_split" => line_breaks::random_line_continuation_split,
        "insert_noise_then" => distraction::insert_noise_then,
        "empty_insert_random" => empty_lines::insert_random,
        "empty_insert_every_line" => empty_lines::insert_every_line,
        "empty_remove_all" => empty_lines::remove_all,
        "comments_remove_all" => comments::remove_all,
        "comments_blank_content" => comments::blank_content,
        "comments_randomize_content" => comments::randomize_content,
        "identifiers_lowercase" => case::identifiers_lowercase,
        "identifiers_uppercase" => case::identifiers_uppercase,
        "identifiers_random_case" => case::identifiers_random_case,
        "keywords_lowercase" => case::keywords_lowercase,
        "rename_gibberish" => rename::gibberish,
        "rename_sequential" => rename::sequential,
        "rename_hash" => rename::hash,
        "rename_permute" => rename::permute,
        "rename_suffix" => rename::suffix,
        "rename_hyphen_strip" => rename::hyphen_strip,
        "rename_prefix" => rename::prefix,
        other => unreachable!("catalog id `{other}` has no implementation"),
    }
}

/// Apply one method. `dest` is the form the result will finally be
/// rendered in; it bounds line growth and gates the fixed-output methods.
pub fn apply_method(
    method: &MethodDescriptor,
    unit: &CobolUnit,
    rng: &mut RngStream,
    dest: SourceForm,
) -> Result<PerturbOutcome> {
    if !method.applies_to(unit.kind) {
        return Err(Error::ScopeViolation {
            method: method.id.to_string(),
        });
    }
    if method.requires_free_parse && unit.form != SourceForm::Free {
        return Err(Error::FormViolation {
            method: method.id.to_string(),
            required: "free-form",
        });
    }
    if method.fixed_output_only && dest != SourceForm::Fixed {
        return Err(Error::FormViolation {
            method: method.id.to_string(),
            required: "fixed-form output",
        });
    }
    let run = runner(method.id);
    let ctx = Ctx::new(unit, dest);
    let baseline = if method.fixed_output_only {
        free_to_fixed_sfx(unit)?.0.to_text()
    } else {
        unit.to_text()
    };
    let tries = if method.is_probabilistic() { MAX_TRIES } else { 1 };
    let mut used = 0;
    for _ in 0..tries {
        used += 1;
        let (output, rename_map) = match run(&ctx, rng)? {
            Attempt::NoTarget => break,
            Attempt::Lines(lines) => (unit.with_lines(lines)?, None),
            Attempt::Renamed(lines, map) => (unit.with_lines(lines)?, Some(map)),
            Attempt::Unit(u) => (u, None),
        };
        if output.to_text() != baseline {
            return Ok(PerturbOutcome {
                changed: true,
                output,
                tries_used: used,
                rename_map: rename_map.filter(|m| !m.is_empty()),
            });
        }
    }
    Ok(PerturbOutcome {
        changed: false,
        output: unit.clone(),
        tries_used: used,
        rename_map: None,
    })
}

/// Normalized token stream used to check meaning preservation: the free-form
/// rendering tokenized, comments dropped, words upper-cased, whitespace gone.
pub fn normal_tokens(unit: &CobolUnit) -> Result<Vec<String>> {
    let free;
    let unit = if unit.form == SourceForm::Fixed {
        free = fixed_to_free(unit)?.0;
        &free
    } else {
        unit
    };
    let mut code = String::new();
    for line in &unit.lines {
        if line.is_code() {
            code.push_str(line.content_str().strip_prefix(">>D").unwrap_or(line.content_str()));
            code.push('\n');
        }
    }
    Ok(tokenize(&code)?
        .into_iter()
        .filter(|t| t.kind != TokenKind::InlineComment)
        .map(|t| {
            if t.kind == TokenKind::Word {
                t.text.to_ascii_uppercase()
            } else {
                t.text
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        assert_eq!(CATALOG.len(), 33);
        let per: Vec<usize> = Category::ALL
            .iter()
            .map(|c| CATALOG.iter().filter(|d| d.category == *c).count())
            .collect();
        assert_eq!(per, [6, 4, 5, 1, 3, 3, 4, 4, 3]);
        for d in &CATALOG {
            assert_eq!(d.scope == Scope::ProgramOnly, d.category.is_renaming());
            assert!(!d.fixed_output_only || d.category == LineBreaks);
            runner(d.id);
        }
    }

    #[test]
    fn filters() {
        assert_eq!(list_methods(&MethodFilter::default()).len(), 33);
        let free = MethodFilter {
            output_form: Some(SourceForm::Free),
            ..Default::default()
        };
        assert_eq!(list_methods(&free).len(), 31);
        let para = MethodFilter {
            unit_kind: Some(UnitKind::Paragraph),
            ..Default::default()
        };
        assert_eq!(list_methods(&para).len(), 26);
        let d = MethodFilter {
            category: Some(Distraction),
            ..Default::default()
        };
        assert_eq!(list_methods(&d)[0].id, "insert_noise_then");
        let ids: Vec<_> = list_methods(&MethodFilter::default()).iter().map(|d| d.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn category_names_round_trip() {
        for c in Category::ALL {
            assert_eq!(c.as_str().parse::<Category>().unwrap(), c);
        }
    }
}
