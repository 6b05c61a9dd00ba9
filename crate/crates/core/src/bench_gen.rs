//! Corpus expansion: renaming and syntactic program variants, paragraph
//! records and the benchmark manifest.
//!
//! Layout of an expanded benchmark directory:
//!
//! ```text
//! manifest.json
//! programs/<program>__orig.<ext>
//! programs/<program>__ren<k>.<ext>
//! programs/<program>__syn<k>.<ext>
//! ```
//!
//! Paragraph records point into the program files by line range.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{detect_form, extract_paragraph, extract_structure, CobolUnit, SourceForm, UnitKind};
use crate::perturb::{
    catalog, derive_seed, salt_of, Category, MethodDescriptor, RenameMap, RngStream,
};
use crate::pipeline::{perturb, valid_methods, PerturbRequest, PerturbResult};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PROGRAMS_DIR: &str = "programs";

const SOURCE_EXTENSIONS: &[&str] = &["cbl", "cob", "cobol", "cpy"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramEntry {
    pub id: String,
    pub path: PathBuf,
    pub form: SourceForm,
    pub paragraphs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub programs: Vec<ProgramEntry>,
    pub paragraph_count: usize,
}

impl CorpusManifest {
    /// Build a manifest from in-memory sources `(id, path, text)`.
    pub fn from_sources<'a>(
        sources: impl IntoIterator<Item = (&'a str, PathBuf, &'a str)>,
    ) -> Result<Self> {
        let mut programs = Vec::new();
        for (id, path, text) in sources {
            let form = detect_form(text);
            let unit = CobolUnit::parse(text, form, UnitKind::Program)?;
            let structure = extract_structure(&unit)?;
            let mut seen = HashSet::new();
            let mut paragraphs = Vec::new();
            for p in structure.paragraphs() {
                if seen.insert(p.name.to_ascii_uppercase()) {
                    paragraphs.push(p.name.clone());
                } else {
                    warn!("{id}: duplicate paragraph `{}` skipped", p.name);
                }
            }
            programs.push(ProgramEntry {
                id: id.to_string(),
                path,
                form,
                paragraphs,
            });
        }
        let paragraph_count = programs.iter().map(|p| p.paragraphs.len()).sum();
        Ok(CorpusManifest {
            programs,
            paragraph_count,
        })
    }

    /// Every COBOL source file directly under `dir`, in file-name order.
    pub fn scan(dir: &Path) -> Result<Self> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension().and_then(|e| e.to_str()).is_some_and(|e| {
                        SOURCE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str())
                    })
            })
            .collect();
        files.sort();
        let mut texts = Vec::new();
        for f in &files {
            let text = fs::read_to_string(f).map_err(|e| Error::io(f, e))?;
            let id = f.file_stem().and_then(|s| s.to_str()).unwrap_or("program").to_string();
            texts.push((id, f.clone(), text));
        }
        Self::from_sources(texts.iter().map(|(id, p, t)| (id.as_str(), p.clone(), t.as_str())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionPlan {
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "R_r")]
    pub r_r: usize,
    #[serde(rename = "R_s")]
    pub r_s: usize,
    pub seed: u64,
    pub boost_rare: bool,
}

/// Dry-run result: how many syntactic methods change each paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Applicability {
    pub per_paragraph: Vec<usize>,
    /// Syntactic methods that change at least one paragraph.
    pub effective_methods: usize,
}

/// `(R_r, R_s)` for a target of `r` paragraph appearances per method.
///
/// `R_r = ceil(r * renaming / N)`. `R_s` is the smallest `k` such that
/// drawing `k` distinct methods per paragraph gives every effective
/// syntactic method at least `r` paragraphs on average; when no `k`
/// reaches `r`, the largest useful `k` is returned.
pub fn compute_multipliers(r: usize, renaming: usize, app: &Applicability) -> (usize, usize) {
    let n = app.per_paragraph.len().max(1);
    let r_r = (r * renaming).div_ceil(n).max(1);
    let max_a = app.per_paragraph.iter().copied().max().unwrap_or(0);
    if app.effective_methods == 0 || max_a == 0 {
        return (r_r, 1);
    }
    let need = r * app.effective_methods;
    let r_s = (1..=max_a)
        .find(|&k| app.per_paragraph.iter().map(|&a| a.min(k)).sum::<usize>() >= need)
        .unwrap_or(max_a);
    (r_r, r_s.max(1))
}

fn renaming_methods() -> Vec<&'static MethodDescriptor> {
    catalog().iter().filter(|d| d.category.is_renaming()).collect()
}

fn load_program(entry: &ProgramEntry) -> Result<(String, CobolUnit)> {
    let text = fs::read_to_string(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
    let unit = CobolUnit::parse(&text, entry.form, UnitKind::Program)?;
    Ok((text, unit))
}

/// Perturb and require the final text to differ from the input text.
fn try_method(
    unit: &CobolUnit,
    m: &'static MethodDescriptor,
    seed: u64,
) -> Option<PerturbResult> {
    match perturb(&PerturbRequest {
        input: unit,
        method: m,
        desired_output_form: unit.form,
        seed,
    }) {
        Ok(r) if r.changed && r.output.to_text() != unit.to_text() => Some(r),
        Ok(_) => None,
        Err(e) => {
            debug!("{}: {e}", m.id);
            None
        }
    }
}

fn syntactic_seed(seed: u64, program: &str, paragraph: &str, variant: usize, m: &str) -> u64 {
    derive_seed(seed, salt_of(&format!("{program}/{paragraph}/syn{variant}/{m}")))
}

/// Count, per paragraph, the syntactic methods that change it.
pub fn scan_applicability(manifest: &CorpusManifest, seed: u64) -> Result<Applicability> {
    let mut per_paragraph = Vec::new();
    let mut effective = HashSet::new();
    for entry in &manifest.programs {
        let (_, program) = load_program(entry)?;
        for name in &entry.paragraphs {
            let para = extract_paragraph(&program, name)?;
            let mut count = 0;
            for m in valid_methods(&para, para.form) {
                if try_method(&para, m, syntactic_seed(seed, &entry.id, name, 0, m.id)).is_some() {
                    count += 1;
                    effective.insert(m.id);
                }
            }
            per_paragraph.push(count);
        }
    }
    Ok(Applicability {
        per_paragraph,
        effective_methods: effective.len(),
    })
}

/// Plan for target `r`; `r_r` / `r_s` override the computed multipliers.
pub fn plan_expansion(
    manifest: &CorpusManifest,
    r: usize,
    r_r: Option<usize>,
    r_s: Option<usize>,
    seed: u64,
    boost_rare: bool,
) -> Result<ExpansionPlan> {
    if r == 0 || manifest.paragraph_count == 0 {
        return Err(Error::InvalidRequest(
            "expansion needs R >= 1 and at least one paragraph".into(),
        ));
    }
    let (cr, cs) = match (r_r, r_s) {
        (Some(a), Some(b)) => (a, b),
        _ => compute_multipliers(r, renaming_methods().len(), &scan_applicability(manifest, seed)?),
    };
    Ok(ExpansionPlan {
        r,
        r_r: r_r.unwrap_or(cr).max(1),
        r_s: r_s.unwrap_or(cs).max(1),
        seed,
        boost_rare,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Original,
    Renaming,
    Syntactic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramVariant {
    pub id: String,
    pub program_id: String,
    pub kind: VariantKind,
    /// 0 for the original, `k` for the k-th renaming or syntactic variant.
    pub index: usize,
    /// Relative to the benchmark directory.
    pub path: PathBuf,
    pub method_id: Option<String>,
    pub rename_map: Option<RenameMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub i: usize,
    pub j: usize,
    pub program_id: String,
    pub paragraph: String,
    pub program_variant: String,
    /// Empty for the original.
    pub method_id: String,
    pub category: Option<Category>,
    pub path: PathBuf,
    /// Line range `[start, end)` of the paragraph in `path`.
    pub lines: (usize, usize),
    pub form: SourceForm,
    pub terminal_node: Option<u8>,
    pub sfx_normalized: bool,
    /// Program variant whose `rename_map` applies.
    pub rename_map_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedVariant {
    pub program_id: String,
    pub paragraph: Option<String>,
    pub program_variant: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedBenchmark {
    pub programs: Vec<ProgramEntry>,
    pub plan: ExpansionPlan,
    pub program_variants: Vec<ProgramVariant>,
    pub records: Vec<VariantRecord>,
    pub skipped: Vec<SkippedVariant>,
}

impl ExpandedBenchmark {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Paragraph text of `rec`, read from the benchmark directory `dir`.
    pub fn paragraph_text(&self, dir: &Path, rec: &VariantRecord) -> Result<String> {
        let path = dir.join(&rec.path);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let unit = CobolUnit::parse(&text, rec.form, UnitKind::Program)?;
        let (a, b) = rec.lines;
        if b > unit.len() || a > b {
            return Err(Error::Manifest(format!(
                "record ({}, {}) line range {a}..{b} outside {}",
                rec.i,
                rec.j,
                path.display()
            )));
        }
        Ok(CobolUnit {
            lines: unit.lines[a..b].to_vec(),
            kind: UnitKind::Paragraph,
            trailing_newline: true,
            ..unit
        }
        .to_text())
    }

    pub fn paragraph_unit(&self, dir: &Path, rec: &VariantRecord) -> Result<CobolUnit> {
        CobolUnit::parse(&self.paragraph_text(dir, rec)?, rec.form, UnitKind::Paragraph)
    }

    /// n(i): number of perturbed records per group.
    pub fn group_sizes(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            let n = out.entry(r.i).or_insert(0);
            if r.j > 0 {
                *n += 1;
            }
        }
        out
    }

    pub fn record(&self, i: usize, j: usize) -> Option<&VariantRecord> {
        self.records.iter().find(|r| r.i == i && r.j == j)
    }
}

struct Pending {
    paragraph: usize,
    variant: String,
    method: &'static MethodDescriptor,
    result_lines: (usize, usize),
    terminal_node: u8,
    sfx_normalized: bool,
    renaming: bool,
}

/// Order candidate methods: those not yet used on this target first, then
/// the rest. Within each part, shuffled; with `boost`, globally least-used
/// first.
fn draw_order(
    candidates: &[&'static MethodDescriptor],
    used_here: &HashSet<&'static str>,
    usage: Option<&BTreeMap<&'static str, usize>>,
    rng: &mut RngStream,
) -> Vec<&'static MethodDescriptor> {
    let (mut fresh, mut stale): (Vec<_>, Vec<_>) =
        candidates.iter().copied().partition(|m| !used_here.contains(m.id));
    rng.shuffle(&mut fresh);
    rng.shuffle(&mut stale);
    if let Some(usage) = usage {
        fresh.sort_by_key(|m| usage.get(m.id).copied().unwrap_or(0));
    }
    fresh.extend(stale);
    fresh
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("cbl")
}

fn write_program(dir: &Path, rel: &Path, unit: &CobolUnit) -> Result<()> {
    let path = dir.join(rel);
    fs::write(&path, unit.to_text()).map_err(|e| Error::io(&path, e))
}

/// Expand the corpus into `out`, writing program variants and the manifest.
pub fn expand_corpus(
    manifest: &CorpusManifest,
    plan: &ExpansionPlan,
    out: &Path,
) -> Result<ExpandedBenchmark> {
    if plan.r_r == 0 || plan.r_s == 0 {
        return Err(Error::InvalidRequest("R_r and R_s must be at least 1".into()));
    }
    let programs_dir = out.join(PROGRAMS_DIR);
    fs::create_dir_all(&programs_dir).map_err(|e| Error::io(&programs_dir, e))?;

    let renaming = renaming_methods();
    let mut usage: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut bench = ExpandedBenchmark {
        programs: manifest.programs.clone(),
        plan: *plan,
        program_variants: Vec::new(),
        records: Vec::new(),
        skipped: Vec::new(),
    };
    let mut group_base = 0;

    for entry in &manifest.programs {
        let (_, program) = load_program(entry)?;
        let structure = extract_structure(&program)?;
        let ranges: Vec<(usize, usize)> = entry
            .paragraphs
            .iter()
            .map(|name| {
                let p = structure.paragraph(name).expect("manifest paragraph");
                (p.lines.start, p.lines.end)
            })
            .collect();
        let ext = extension(&entry.path).to_string();
        let rel = |suffix: &str| PathBuf::from(PROGRAMS_DIR).join(format!("{}__{suffix}.{ext}", entry.id));

        // Originals.
        let orig_id = format!("{}__orig", entry.id);
        let orig_path = rel("orig");
        write_program(out, &orig_path, &program)?;
        bench.program_variants.push(ProgramVariant {
            id: orig_id.clone(),
            program_id: entry.id.clone(),
            kind: VariantKind::Original,
            index: 0,
            path: orig_path.clone(),
            method_id: None,
            rename_map: None,
        });
        let originals: Vec<String> = entry
            .paragraphs
            .iter()
            .map(|n| extract_paragraph(&program, n).map(|u| u.to_text()))
            .collect::<Result<_>>()?;

        let mut pending: Vec<Pending> = Vec::new();

        // Renaming variants: one method over the whole program.
        let mut rng = RngStream::new(derive_seed(plan.seed, salt_of(&format!("{}/rename", entry.id))));
        let mut used: HashSet<&'static str> = HashSet::new();
        for k in 1..=plan.r_r {
            let vid = format!("{}__ren{k}", entry.id);
            let order = draw_order(&renaming, &used, None, &mut rng);
            let seed = derive_seed(plan.seed, salt_of(&vid));
            let Some((m, result)) = order.into_iter().find_map(|m| try_method(&program, m, seed).map(|r| (m, r)))
            else {
                bench.skipped.push(SkippedVariant {
                    program_id: entry.id.clone(),
                    paragraph: None,
                    program_variant: vid,
                    reason: "no renaming method changes the program".into(),
                });
                continue;
            };
            used.insert(m.id);
            let path = rel(&format!("ren{k}"));
            write_program(out, &path, &result.output)?;
            let renamed = extract_structure(&result.output)?;
            for (pi, name) in entry.paragraphs.iter().enumerate() {
                let Some(p) = renamed.paragraph(name) else {
                    continue;
                };
                pending.push(Pending {
                    paragraph: pi,
                    variant: vid.clone(),
                    method: m,
                    result_lines: (p.lines.start, p.lines.end),
                    terminal_node: result.terminal_node,
                    sfx_normalized: result.sfx_normalized,
                    renaming: true,
                });
            }
            bench.program_variants.push(ProgramVariant {
                id: vid,
                program_id: entry.id.clone(),
                kind: VariantKind::Renaming,
                index: k,
                path,
                method_id: Some(m.id.to_string()),
                rename_map: result.rename_map,
            });
        }

        // Syntactic variants: each paragraph perturbed on its own.
        let mut used_per_para: Vec<HashSet<&'static str>> = vec![HashSet::new(); entry.paragraphs.len()];
        let mut rng = RngStream::new(derive_seed(plan.seed, salt_of(&format!("{}/syntactic", entry.id))));
        for k in 1..=plan.r_s {
            let vid = format!("{}__syn{k}", entry.id);
            let mut raws = program.raw_lines();
            let mut replaced: Vec<(usize, &'static MethodDescriptor, PerturbResult)> = Vec::new();
            for (pi, name) in entry.paragraphs.iter().enumerate() {
                let para = extract_paragraph(&program, name)?;
                let candidates = valid_methods(&para, para.form);
                let usage_ref = plan.boost_rare.then_some(&usage);
                let order = draw_order(&candidates, &used_per_para[pi], usage_ref, &mut rng);
                let found = order.into_iter().find_map(|m| {
                    try_method(&para, m, syntactic_seed(plan.seed, &entry.id, name, k, m.id))
                        .filter(|r| r.output.to_text() != originals[pi])
                        .map(|r| (m, r))
                });
                match found {
                    Some((m, r)) => {
                        used_per_para[pi].insert(m.id);
                        *usage.entry(m.id).or_insert(0) += 1;
                        replaced.push((pi, m, r));
                    }
                    None => bench.skipped.push(SkippedVariant {
                        program_id: entry.id.clone(),
                        paragraph: Some(name.clone()),
                        program_variant: vid.clone(),
                        reason: Error::ExhaustedMethods {
                            program: entry.id.clone(),
                            paragraph: name.clone(),
                        }
                        .to_string(),
                    }),
                }
            }
            // Splice in file order, tracking how far later ranges moved.
            let mut shift: isize = 0;
            let mut order: Vec<usize> = (0..replaced.len()).collect();
            order.sort_by_key(|&x| ranges[replaced[x].0].0);
            let mut spans = vec![(0usize, 0usize); replaced.len()];
            for &x in &order {
                let (pi, _, ref r) = replaced[x];
                let (a, b) = ranges[pi];
                let new_lines = r.output.raw_lines();
                let start = (a as isize + shift) as usize;
                let end = (b as isize + shift) as usize;
                let len = new_lines.len();
                raws.splice(start..end, new_lines);
                spans[x] = (start, start + len);
                shift += len as isize - (b - a) as isize;
            }
            let unit = program.with_lines(raws)?;
            let path = rel(&format!("syn{k}"));
            write_program(out, &path, &unit)?;
            for (x, (pi, m, r)) in replaced.into_iter().enumerate() {
                pending.push(Pending {
                    paragraph: pi,
                    variant: vid.clone(),
                    method: m,
                    result_lines: spans[x],
                    terminal_node: r.terminal_node,
                    sfx_normalized: r.sfx_normalized,
                    renaming: false,
                });
            }
            bench.program_variants.push(ProgramVariant {
                id: vid,
                program_id: entry.id.clone(),
                kind: VariantKind::Syntactic,
                index: k,
                path,
                method_id: None,
                rename_map: None,
            });
        }

        // Records, group by group.
        let variant_path: BTreeMap<String, PathBuf> = bench
            .program_variants
            .iter()
            .filter(|v| v.program_id == entry.id)
            .map(|v| (v.id.clone(), v.path.clone()))
            .collect();
        for (pi, name) in entry.paragraphs.iter().enumerate() {
            let i = group_base + pi;
            bench.records.push(VariantRecord {
                i,
                j: 0,
                program_id: entry.id.clone(),
                paragraph: name.clone(),
                program_variant: orig_id.clone(),
                method_id: String::new(),
                category: None,
                path: orig_path.clone(),
                lines: ranges[pi],
                form: entry.form,
                terminal_node: None,
                sfx_normalized: false,
                rename_map_ref: None,
            });
            let mut j = 0;
            for p in pending.iter().filter(|p| p.paragraph == pi) {
                let rec = VariantRecord {
                    i,
                    j: j + 1,
                    program_id: entry.id.clone(),
                    paragraph: name.clone(),
                    program_variant: p.variant.clone(),
                    method_id: p.method.id.to_string(),
                    category: Some(p.method.category),
                    path: variant_path[&p.variant].clone(),
                    lines: p.result_lines,
                    form: entry.form,
                    terminal_node: Some(p.terminal_node),
                    sfx_normalized: p.sfx_normalized,
                    rename_map_ref: p.renaming.then(|| p.variant.clone()),
                };
                // A renamed program can leave a paragraph untouched.
                if p.renaming && bench.paragraph_text(out, &rec)? == originals[pi] {
                    bench.skipped.push(SkippedVariant {
                        program_id: entry.id.clone(),
                        paragraph: Some(name.clone()),
                        program_variant: p.variant.clone(),
                        reason: "renaming leaves the paragraph unchanged".into(),
                    });
                    continue;
                }
                j += 1;
                bench.records.push(rec);
            }
        }
        group_base += entry.paragraphs.len();
    }
    bench.save(out)?;
    Ok(bench)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipliers() {
        let app = |v: Vec<usize>, e| Applicability {
            per_paragraph: v,
            effective_methods: e,
        };
        assert_eq!(compute_multipliers(5, 7, &app(vec![26; 22], 26)).0, 2);
        assert_eq!(compute_multipliers(1, 1, &app(vec![1], 1)), (1, 1));
        // Two paragraphs, each changed by 3 of 4 effective methods: k=2
        // gives (2+2)/4 = 1 appearance per method.
        assert_eq!(compute_multipliers(1, 7, &app(vec![3, 3], 4)).1, 2);
        // Unreachable target: capped at the largest applicability.
        assert_eq!(compute_multipliers(9, 7, &app(vec![3, 1], 4)).1, 3);
    }
}
