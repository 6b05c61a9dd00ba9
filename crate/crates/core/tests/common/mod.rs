//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cobperturb::bench_gen::{expand_corpus, CorpusManifest, ExpandedBenchmark, ExpansionPlan};
use cobperturb::harness::{
    run_benchmark, BuiltinChecker, CheckerSet, ResultTable, RunOptions, RunRecord, StubKind,
    SystemAdapter,
};
use cobperturb::metrics::ChangeRow;
use cobperturb::model::{extract_paragraph, LineClass};
use cobperturb::perturb::{apply_method, normal_tokens};
use cobperturb::synth::{write_synth_corpus, SYNTH_PROGRAMS};
use cobperturb::{fixed_to_free, free_to_fixed_sfx, is_sfx, Category, CobolUnit, PerturbResult, RngStream, SourceForm, UnitKind};

// ---------------------------------------------------------------------------
// Random free-form programs

const WORDS: &[&str] = &[
    "MOVE", "TO", "ADD", "GIVING", "IF", "ELSE", "END-IF", "DISPLAY", "PERFORM", "UNTIL",
    "COMPUTE", "WS-TOTAL", "WS-COUNT", "CUSTOMER-RECORD-AREA", "X", "Y", "A1", "OF", "IN",
    "EVALUATE", "WHEN", "OTHER", "END-EVALUATE", "SET", "STRING", "DELIMITED", "BY", "SIZE",
];

const LITERAL_CHARS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -.,/";

fn random_identifier(rng: &mut RngStream) -> String {
    let len = rng.between(1, 30);
    let mut s = String::with_capacity(len);
    for k in 0..len {
        let c = if k == 0 || k == len - 1 {
            (b'A' + rng.pick(26) as u8) as char
        } else {
            match rng.pick(8) {
                0 => '-',
                1 => (b'0' + rng.pick(10) as u8) as char,
                _ => (b'A' + rng.pick(26) as u8) as char,
            }
        };
        s.push(c);
    }
    s
}

fn random_literal(rng: &mut RngStream) -> String {
    let quote = if rng.coin() { '\'' } else { '"' };
    let len = if rng.pick(4) == 0 { rng.between(50, 140) } else { rng.between(1, 30) };
    let body: String = (0..len)
        .map(|_| LITERAL_CHARS[rng.pick(LITERAL_CHARS.len())] as char)
        .collect();
    format!("{quote}{body}{quote}")
}

fn random_code_line(rng: &mut RngStream) -> String {
    let mut line = " ".repeat(rng.between(0, 11));
    let target = rng.between(5, 200);
    let mut first = true;
    while line.len() < target {
        if !first {
            line.push_str(if rng.pick(5) == 0 { "   " } else { " " });
        }
        first = false;
        match rng.pick(20) {
            0..=7 => line.push_str(WORDS[rng.pick(WORDS.len())]),
            8..=11 => line.push_str(&random_identifier(rng)),
            12..=14 => line.push_str(&rng.between(0, 999_999).to_string()),
            15..=18 => line.push_str(&random_literal(rng)),
            _ => {
                line.push_str(WORDS[rng.pick(WORDS.len())]);
                line.push(',');
            }
        }
    }
    // No comma right before the newline: that layout is not SFX.
    if line.ends_with(',') {
        line.pop();
    }
    if rng.pick(3) == 0 {
        line.push('.');
    }
    line
}

/// A random free-form source: code lines of 5 to 200 characters with long
/// literals, full-line comments and blank lines.
pub fn random_free_program(seed: u64) -> String {
    let mut rng = RngStream::new(seed);
    let mut out = String::new();
    for _ in 0..rng.between(1, 25) {
        match rng.pick(10) {
            0 => {}
            1 => {
                // Kept within one fixed comment line; longer comments are
                // split into several.
                let mut c = String::from("*>");
                for _ in 0..rng.between(0, 8) {
                    let w = WORDS[rng.pick(WORDS.len())].to_ascii_lowercase();
                    if c.len() + 1 + w.len() > 65 {
                        break;
                    }
                    c.push(' ');
                    c.push_str(&w);
                }
                out.push_str(&c);
            }
            _ => out.push_str(&random_code_line(&mut rng)),
        }
        out.push('\n');
    }
    out
}

pub fn free_unit(text: &str) -> CobolUnit {
    CobolUnit::parse(text, SourceForm::Free, UnitKind::Program).unwrap()
}

/// Continuation-split methods that render non-SFX fixed form.
pub const SPLIT_METHODS: [&str; 2] = ["split_literal_continuation", "random_line_continuation_split"];

/// Conversion properties on one random program. Returns the first violation
/// and how many continuation-split variants were checked.
pub fn conversion_violation(seed: u64) -> (Option<String>, usize) {
    let text = random_free_program(seed);
    let free = free_unit(&text);
    let sfx = match free_to_fixed_sfx(&free) {
        Ok((u, _)) => u,
        Err(e) => return (Some(format!("seed {seed}: free_to_fixed_sfx failed: {e}")), 0),
    };
    if let Some(l) = sfx.raw_lines().iter().find(|l| l.chars().count() > 72) {
        return (Some(format!("seed {seed}: line over 72 columns: {l:?}")), 0);
    }
    if !is_sfx(&sfx).unwrap() {
        return (Some(format!("seed {seed}: SFX output not recognised as SFX")), 0);
    }
    let back = fixed_to_free(&sfx).unwrap().0;
    if free_to_fixed_sfx(&back).unwrap().0.to_text() != sfx.to_text() {
        return (Some(format!("seed {seed}: SFX round trip not byte-identical")), 0);
    }
    if back.to_text() != text {
        return (Some(format!("seed {seed}: free -> SFX -> free changed the text")), 0);
    }
    let again = fixed_to_free(&free_to_fixed_sfx(&back).unwrap().0).unwrap().0;
    if again.to_text() != back.to_text() {
        return (Some(format!("seed {seed}: normalization not idempotent")), 0);
    }
    let mut checked = 0;
    for id in SPLIT_METHODS {
        let m = cobperturb::method(id).unwrap();
        let out = match apply_method(m, &free, &mut RngStream::new(seed ^ 0x5eed), SourceForm::Fixed) {
            Ok(o) => o,
            Err(e) => return (Some(format!("seed {seed}: {id} failed: {e}")), checked),
        };
        if !out.changed {
            continue;
        }
        checked += 1;
        if out.output.raw_lines().iter().any(|l| l.chars().count() > 72) {
            return (Some(format!("seed {seed}: {id} output over 72 columns")), checked);
        }
        match fixed_to_free(&out.output) {
            Ok((f, _)) if f.to_text() == back.to_text() => {}
            Ok(_) => return (Some(format!("seed {seed}: {id} output does not join back")), checked),
            Err(e) => return (Some(format!("seed {seed}: {id} output does not convert: {e}")), checked),
        }
    }
    (None, checked)
}

// ---------------------------------------------------------------------------
// Fixture corpus

/// 50 units: the 9 synthetic programs and their 22 paragraphs in fixed form,
/// the programs in free form, and the first 10 paragraphs in free form.
pub fn fixture_units() -> Vec<(String, CobolUnit)> {
    let mut fixed_programs = Vec::new();
    let mut paragraphs = Vec::new();
    let texts: Vec<String> = SYNTH_PROGRAMS.iter().map(|p| p.text()).collect();
    let manifest = CorpusManifest::from_sources(
        SYNTH_PROGRAMS
            .iter()
            .zip(&texts)
            .map(|(p, t)| (p.id, Path::new(p.id).to_path_buf(), t.as_str())),
    )
    .unwrap();
    for ((prog, text), entry) in SYNTH_PROGRAMS.iter().zip(&texts).zip(&manifest.programs) {
        let unit = CobolUnit::parse(text, SourceForm::Fixed, UnitKind::Program).unwrap();
        for name in &entry.paragraphs {
            paragraphs.push((format!("{}/{name}", prog.id), extract_paragraph(&unit, name).unwrap()));
        }
        fixed_programs.push((prog.id.to_string(), unit));
    }
    let mut out = Vec::new();
    for (id, u) in &fixed_programs {
        out.push((format!("{id} fixed"), u.clone()));
    }
    for (id, u) in &paragraphs {
        out.push((format!("{id} fixed"), u.clone()));
    }
    for (id, u) in &fixed_programs {
        out.push((format!("{id} free"), fixed_to_free(u).unwrap().0));
    }
    for (id, u) in paragraphs.iter().take(10) {
        out.push((format!("{id} free"), fixed_to_free(u).unwrap().0));
    }
    out
}

// ---------------------------------------------------------------------------
// Meaning-preservation oracle

fn same_or_only_then_added(input: &[String], output: &[String]) -> bool {
    let mut k = 0;
    let mut added = 0;
    for t in output {
        if k < input.len() && &input[k] == t {
            k += 1;
        } else if t == "THEN" {
            added += 1;
        } else {
            return false;
        }
    }
    k == input.len() && added > 0
}

fn end_block_edit_only(input: &[String], output: &[String], terminator: &str, to_period: bool) -> bool {
    let mut o = 0;
    let mut edits = 0;
    for (k, t) in input.iter().enumerate() {
        if output.get(o) == Some(t) {
            o += 1;
            continue;
        }
        if t != terminator {
            return false;
        }
        if to_period {
            if output.get(o).map(String::as_str) != Some(".") {
                return false;
            }
            o += 1;
        } else if input.get(k + 1).map(String::as_str) != Some(".") {
            // A dropped terminator must have been followed by a period.
            return false;
        }
        edits += 1;
    }
    o == output.len() && edits > 0
}

fn non_comment_lines(unit: &CobolUnit) -> Vec<String> {
    unit.lines
        .iter()
        .filter(|l| l.class != LineClass::Comment)
        .map(|l| l.raw.clone())
        .collect()
}

/// Check one changed result against the invariant of its category.
/// Returns a description of the violation, if any.
pub fn meaning_violation(input: &CobolUnit, category: Category, method_id: &str, r: &PerturbResult) -> Option<String> {
    let a = normal_tokens(input).ok()?;
    let b = match normal_tokens(&r.output) {
        Ok(b) => b,
        Err(e) => return Some(format!("output does not tokenize: {e}")),
    };
    if r.output.form == SourceForm::Fixed {
        if let Some(l) = r.output.raw_lines().iter().find(|l| l.chars().count() > 72) {
            return Some(format!("fixed line over 72 columns: {l:?}"));
        }
    }
    let ok = match category {
        Category::WithinLineWhitespace | Category::EmptyLines | Category::LineBreaks | Category::Case => a == b,
        Category::Comments => {
            a == b
                && (input.form != r.output.form || non_comment_lines(input) == non_comment_lines(&r.output))
        }
        Category::Distraction => same_or_only_then_added(&a, &b),
        Category::EndBlock => {
            let terminator = if method_id.starts_with("end_if") {
                "END-IF"
            } else if method_id.starts_with("end_evaluate") {
                "END-EVALUATE"
            } else {
                "END-PERFORM"
            };
            end_block_edit_only(&a, &b, terminator, method_id.ends_with("to_period"))
        }
        Category::IdentifierRenamingObfuscation | Category::IdentifierRenamingPreserve => {
            let Some(map) = &r.rename_map else {
                return Some("renaming result without a map".into());
            };
            let inverse: BTreeMap<String, String> = map
                .iter()
                .map(|(old, new)| (new.to_ascii_uppercase(), old.to_ascii_uppercase()))
                .collect();
            if inverse.len() != map.len() {
                return Some("rename map is not injective".into());
            }
            let restored: Vec<String> = b
                .iter()
                .map(|t| inverse.get(t).cloned().unwrap_or_else(|| t.clone()))
                .collect();
            restored == a
        }
    };
    (!ok).then(|| {
        let at = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        format!(
            "token streams diverge at {at}: {:?} vs {:?}",
            &a[at.saturating_sub(2)..(at + 3).min(a.len())],
            &b[at.saturating_sub(2)..(at + 3).min(b.len())]
        )
    })
}

/// Form a method is asked to produce for `unit`: its own form, except that
/// the continuation-split methods always produce fixed form.
pub fn destination(unit: &CobolUnit, m: &cobperturb::MethodDescriptor) -> SourceForm {
    if m.fixed_output_only {
        SourceForm::Fixed
    } else {
        unit.form
    }
}

#[derive(Debug, Default)]
pub struct OracleTally {
    pub applied: usize,
    pub changed: usize,
    pub per_category_changed: BTreeMap<Category, usize>,
    pub violations: Vec<String>,
}

/// Every applicable method on every fixture unit under `seed`.
pub fn meaning_oracle(units: &[(String, CobolUnit)], seed: u64) -> OracleTally {
    let mut tally = OracleTally::default();
    for (name, unit) in units {
        for m in cobperturb::catalog() {
            let dest = destination(unit, m);
            if !cobperturb::pipeline::valid_methods(unit, dest).iter().any(|d| d.id == m.id) {
                continue;
            }
            tally.applied += 1;
            let req = cobperturb::PerturbRequest { input: unit, method: m, desired_output_form: dest, seed };
            let r = match cobperturb::perturb(&req) {
                Ok(r) => r,
                Err(e) => {
                    tally.violations.push(format!("{name} / {}: error {e}", m.id));
                    continue;
                }
            };
            if !r.changed {
                continue;
            }
            tally.changed += 1;
            *tally.per_category_changed.entry(m.category).or_default() += 1;
            if let Some(v) = meaning_violation(unit, m.category, m.id, &r) {
                tally.violations.push(format!("{name} / {}: {v}", m.id));
            }
        }
    }
    tally
}

// ---------------------------------------------------------------------------
// Worked example: two groups of three variants, three metrics.

pub const EXAMPLE_IDS: [&str; 3] = ["mu_1", "mu_2", "mu_3"];

/// (group, metric values) with the original first in each group.
pub fn example_values() -> Vec<(usize, [f64; 2], bool)> {
    vec![
        (1, [1.0, 5.0], true),
        (1, [1.0, 5.0], true),
        (1, [2.0, 5.0], false),
        (1, [1.0, 4.0], true),
        (2, [3.0, 7.0], false),
        (2, [3.0, 6.0], false),
        (2, [3.0, 5.0], true),
        (2, [3.0, 7.0], false),
    ]
}

/// The published delta columns: (group, j, [d1, d2, d3], any).
pub const EXAMPLE_PRINTED: [(usize, usize, [bool; 3], bool); 6] = [
    (1, 1, [false, false, false], false),
    (1, 2, [true, false, true], true),
    (1, 3, [true, false, false], true),
    (2, 1, [false, true, false], true),
    (2, 2, [false, true, true], true),
    (2, 3, [false, false, false], false),
];

pub fn example_result_table() -> ResultTable {
    use cobperturb::harness::ResultRow;
    use cobperturb::MetricValue;
    let mut rows = Vec::new();
    let mut j_of = BTreeMap::new();
    for (g, nums, flag) in example_values() {
        let j = j_of.entry(g).or_insert(0usize);
        rows.push(ResultRow {
            i: g,
            j: *j,
            method_id: if *j == 0 { String::new() } else { format!("method_{}", *j) },
            category: if *j == 0 { String::new() } else { "cat".into() },
            values: vec![MetricValue::Num(nums[0]), MetricValue::Num(nums[1]), MetricValue::Bool(flag)],
            error: None,
        });
        *j += 1;
    }
    ResultTable {
        metric_ids: EXAMPLE_IDS.iter().map(|s| s.to_string()).collect(),
        rows,
    }
}

// ---------------------------------------------------------------------------
// Brute-force aggregation

/// Rates recomputed straight from the rows: each row contributes
/// `delta / (n(i) * N)` (or `/ (v(i) * |I_D|)` for a method or category),
/// with no per-input means in between.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteRates {
    pub per_metric: Vec<f64>,
    pub any: f64,
    pub per_method: BTreeMap<String, (f64, Vec<f64>)>,
    pub per_category: BTreeMap<String, (f64, Vec<f64>)>,
    pub per_input: BTreeMap<usize, (f64, Vec<f64>)>,
}

fn brute_conditional(rows: &[ChangeRow], m: usize, key: impl Fn(&ChangeRow) -> &str) -> BTreeMap<String, (f64, Vec<f64>)> {
    let keys: BTreeSet<&str> = rows.iter().map(&key).collect();
    let mut out = BTreeMap::new();
    for d in keys {
        let inputs: BTreeSet<usize> = rows.iter().filter(|r| key(r) == d).map(|r| r.i).collect();
        let mut any = 0.0;
        let mut per = vec![0.0; m];
        for r in rows.iter().filter(|r| key(r) == d) {
            let v = rows.iter().filter(|s| s.i == r.i && key(s) == d).count() as f64;
            let w = 1.0 / (v * inputs.len() as f64);
            any += r.any as u8 as f64 * w;
            for k in 0..m {
                per[k] += r.deltas[k] as u8 as f64 * w;
            }
        }
        out.insert(d.to_string(), (any, per));
    }
    out
}

pub fn brute_force(rows: &[ChangeRow], m: usize) -> BruteRates {
    let inputs: BTreeSet<usize> = rows.iter().map(|r| r.i).collect();
    let big_n = inputs.len() as f64;
    let n_of = |i: usize| rows.iter().filter(|r| r.i == i).count() as f64;
    let mut any = 0.0;
    let mut per_metric = vec![0.0; m];
    let mut per_input: BTreeMap<usize, (f64, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let n = n_of(r.i);
        any += r.any as u8 as f64 / (n * big_n);
        let e = per_input.entry(r.i).or_insert((0.0, vec![0.0; m]));
        e.0 += r.any as u8 as f64 / n;
        for k in 0..m {
            per_metric[k] += r.deltas[k] as u8 as f64 / (n * big_n);
            e.1[k] += r.deltas[k] as u8 as f64 / n;
        }
    }
    BruteRates {
        per_metric,
        any,
        per_method: brute_conditional(rows, m, |r| &r.method_id),
        per_category: brute_conditional(rows, m, |r| &r.category),
        per_input,
    }
}

pub const METHOD_POOL: [(&str, &str); 8] = [
    ("m_a", "cat_x"),
    ("m_b", "cat_x"),
    ("m_c", "cat_y"),
    ("m_d", "cat_y"),
    ("m_e", "cat_y"),
    ("m_f", "cat_z"),
    ("m_g", "cat_w"),
    ("m_h", "cat_w"),
];

/// Random change rows: up to `max_n` groups of 1..=`max_v` variants with
/// `m` metrics and random method assignments (repeats allowed).
pub fn random_rows(rng: &mut RngStream, max_n: usize, max_v: usize, m: usize) -> Vec<ChangeRow> {
    let groups = rng.between(1, max_n);
    let mut rows = Vec::new();
    for i in 0..groups {
        for j in 1..=rng.between(1, max_v) {
            let (method_id, category) = METHOD_POOL[rng.pick(METHOD_POOL.len())];
            let bias = rng.pick(4);
            let deltas: Vec<bool> = (0..m).map(|_| rng.pick(4) < bias).collect();
            let any = deltas.iter().any(|d| *d);
            rows.push(ChangeRow {
                i: i * 3 + 1,
                j,
                method_id: method_id.into(),
                category: category.into(),
                deltas,
                any,
            });
        }
    }
    rows
}

/// Largest absolute difference between `aggregate` and the brute force.
pub fn max_discrepancy(agg: &cobperturb::RobustnessAggregate, brute: &BruteRates) -> f64 {
    let mut worst: f64 = 0.0;
    let mut see = |a: f64, b: f64| worst = worst.max((a - b).abs());
    see(agg.any.to_f64(), brute.any);
    for (r, b) in agg.per_metric.iter().zip(&brute.per_metric) {
        see(r.to_f64(), *b);
    }
    for (list, map) in [(&agg.per_method, &brute.per_method), (&agg.per_category, &brute.per_category)] {
        if list.len() != map.len() {
            return f64::INFINITY;
        }
        for c in list {
            let Some((any, per)) = map.get(&c.key) else { return f64::INFINITY };
            see(c.any.to_f64(), *any);
            for (r, b) in c.per_metric.iter().zip(per) {
                see(r.to_f64(), *b);
            }
        }
    }
    if agg.per_input.len() != brute.per_input.len() {
        return f64::INFINITY;
    }
    for p in &agg.per_input {
        let Some((any, per)) = brute.per_input.get(&p.i) else { return f64::INFINITY };
        see(p.any.to_f64(), *any);
        for (r, b) in p.per_metric.iter().zip(per) {
            see(r.to_f64(), *b);
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Synthetic benchmark and stub runs

pub fn synth_benchmark(root: &Path, seed: u64) -> (ExpandedBenchmark, std::path::PathBuf) {
    let corpus = root.join("corpus");
    write_synth_corpus(&corpus).unwrap();
    let manifest = CorpusManifest::scan(&corpus).unwrap();
    let out = root.join("bench");
    let plan = ExpansionPlan { r: 5, r_r: 2, r_s: 7, seed, boost_rare: false };
    let bench = expand_corpus(&manifest, &plan, &out).unwrap();
    (bench, out)
}

pub fn stub_run(
    bench: &ExpandedBenchmark,
    bench_dir: &Path,
    stub: StubKind,
    checkers: &[BuiltinChecker],
    results: &Path,
    jobs: usize,
) -> (CheckerSet, Vec<RunRecord>) {
    let set = CheckerSet::builtin(checkers);
    let records = run_benchmark(
        bench,
        bench_dir,
        &SystemAdapter::BuiltinStub(stub),
        &set,
        &RunOptions { jobs, results: results.to_path_buf() },
    )
    .unwrap();
    (set, records)
}

/// Records with timing zeroed, for comparisons across runs.
pub fn untimed(records: &[RunRecord]) -> Vec<RunRecord> {
    records
        .iter()
        .cloned()
        .map(|mut r| {
            r.wall_ms = 0;
            r
        })
        .collect()
}

pub fn aggregate_run(
    bench: &ExpandedBenchmark,
    set: &CheckerSet,
    records: &[RunRecord],
) -> cobperturb::RobustnessAggregate {
    let table = ResultTable::from_records(&set.ids(), records);
    let rows = cobperturb::metrics::change_rows(&table, &cobperturb::ComparisonPolicy::default()).unwrap();
    cobperturb::metrics::aggregate(&rows, &table.metric_ids, &bench.group_sizes()).unwrap()
}

/// Pairs `(i, j)` whose any-change flag is set but whose output bytes equal
/// the original's. Must be empty: a metric is a function of the output.
pub fn implication_failures(results: &Path, set: &CheckerSet, records: &[RunRecord]) -> Vec<(usize, usize)> {
    let table = ResultTable::from_records(&set.ids(), records);
    let rows = cobperturb::metrics::change_rows(&table, &cobperturb::ComparisonPolicy::default()).unwrap();
    let dir = results.parent().unwrap();
    let output = |i: usize, j: usize| {
        let r = records.iter().find(|r| r.i == i && r.j == j).unwrap();
        r.output_path.as_ref().map(|p| std::fs::read(dir.join(p)).unwrap())
    };
    rows.iter()
        .filter(|r| r.any && output(r.i, r.j) == output(r.i, 0))
        .map(|r| (r.i, r.j))
        .collect()
}
