//! Static report output: JSON, CSV tables and self-contained HTML.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use similar::{ChangeTag, TextDiff};

use crate::error::{Error, Result};
use crate::bench_gen::ExpandedBenchmark;
use crate::harness::{output_file, MetricValue, ResultTable};
use crate::metrics::{change_indicator, ComparisonPolicy, ConditionalRate, Rate, RobustnessAggregate};

/// Cells at or above this are highlighted yellow...
pub const WARN_THRESHOLD: f64 = 0.25;
/// ...and above this, red.
pub const ALERT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Html,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "html" => Ok(ReportFormat::Html),
            other => Err(Error::InvalidRequest(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub label: String,
    pub policy: ComparisonPolicy,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    meta: &'a ReportMeta,
    #[serde(flatten)]
    aggregate: &'a RobustnessAggregate,
}

fn write(path: PathBuf, text: String) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn csv_text(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidRequest(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn rate_cells(rates: &[Rate]) -> Vec<String> {
    rates.iter().map(|r| r.to_f64().to_string()).collect()
}

/// Method table: `category, method_id, any, <metrics>`.
pub fn methods_csv(agg: &RobustnessAggregate) -> Result<String> {
    let mut header = vec!["category".to_string(), "method_id".into(), "any".into()];
    header.extend(agg.metric_ids.iter().cloned());
    let rows = agg
        .per_method
        .iter()
        .map(|r| {
            let mut row = vec![r.category.clone().unwrap_or_default(), r.key.clone(), r.any.to_f64().to_string()];
            row.extend(rate_cells(&r.per_metric));
            row
        })
        .collect();
    csv_text(header, rows)
}

pub fn categories_csv(agg: &RobustnessAggregate) -> Result<String> {
    let mut header = vec!["category".to_string(), "any".into()];
    header.extend(agg.metric_ids.iter().cloned());
    let rows = agg
        .per_category
        .iter()
        .map(|r| {
            let mut row = vec![r.key.clone(), r.any.to_f64().to_string()];
            row.extend(rate_cells(&r.per_metric));
            row
        })
        .collect();
    csv_text(header, rows)
}

pub fn overall_csv(agg: &RobustnessAggregate) -> Result<String> {
    let mut header = agg.metric_ids.clone();
    header.push("any".into());
    let mut row = rate_cells(&agg.per_metric);
    row.push(agg.any.to_f64().to_string());
    csv_text(header, vec![row])
}

pub fn inputs_csv(agg: &RobustnessAggregate) -> Result<String> {
    let mut header = vec!["i".to_string(), "n".into(), "any".into()];
    header.extend(agg.metric_ids.iter().cloned());
    let rows = agg
        .per_input
        .iter()
        .map(|r| {
            let mut row = vec![r.i.to_string(), r.variants.to_string(), r.any.to_f64().to_string()];
            row.extend(rate_cells(&r.per_metric));
            row
        })
        .collect();
    csv_text(header, rows)
}

/// Write the report in each requested format under `out`.
pub fn emit_report(
    agg: &RobustnessAggregate,
    meta: &ReportMeta,
    formats: &[ReportFormat],
    out: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                let mut text = serde_json::to_string_pretty(&JsonReport { meta, aggregate: agg })?;
                text.push('\n');
                written.push(write(out.join("report.json"), text)?);
            }
            ReportFormat::Csv => {
                written.push(write(out.join("overall.csv"), overall_csv(agg)?)?);
                written.push(write(out.join("categories.csv"), categories_csv(agg)?)?);
                written.push(write(out.join("methods.csv"), methods_csv(agg)?)?);
                written.push(write(out.join("inputs.csv"), inputs_csv(agg)?)?);
            }
            ReportFormat::Html => written.push(write(out.join("report.html"), render_html(agg, meta))?),
        }
    }
    Ok(written)
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

const STYLE: &str = "<style>
body{font-family:sans-serif;margin:1.5em;color:#222}
table{border-collapse:collapse;margin:0.5em 0 1.5em}
th,td{border:1px solid #bbb;padding:3px 7px;text-align:right;font-size:13px}
th{background:#eee}
td.name{text-align:left}
td.warn{background:#fff2a8}
td.alert{background:#f5a3a3}
td.flag{background:#f5a3a3}
.bar{background:#4a78b5;height:11px}
pre{background:#f7f7f7;padding:6px;font-size:12px;white-space:pre-wrap}
ins{background:#b7f0b1;text-decoration:none}
del{background:#f5b5b5}
</style>";

/// CSS class for a rate cell; empty below the warning threshold.
pub fn highlight(v: f64) -> &'static str {
    if v > ALERT_THRESHOLD {
        "alert"
    } else if v >= WARN_THRESHOLD {
        "warn"
    } else {
        ""
    }
}

fn rate_td(r: &Rate) -> String {
    let v = r.to_f64();
    let class = highlight(v);
    if class.is_empty() {
        format!("<td title=\"{}\">{v:.3}</td>", r.exact())
    } else {
        format!("<td class=\"{class}\" title=\"{}\">{v:.3}</td>", r.exact())
    }
}

fn header_row(first: &[&str], ids: &[String]) -> String {
    let mut s = String::from("<tr>");
    for h in first {
        let _ = write!(s, "<th>{}</th>", escape(h));
    }
    for id in ids {
        let _ = write!(s, "<th>{}</th>", escape(id));
    }
    s.push_str("</tr>\n");
    s
}

fn bars(rows: &[&ConditionalRate], label: &str) -> String {
    let mut s = format!("<table>\n<tr><th>{label}</th><th>any change</th><th></th></tr>\n");
    for r in rows {
        let name = match &r.category {
            Some(c) => format!("{} <small>[{}]</small>", escape(&r.key), escape(c)),
            None => escape(&r.key),
        };
        let _ = writeln!(
            s,
            "<tr><td class=\"name\">{name}</td>{}<td class=\"name\" style=\"width:240px\"><div class=\"bar\" style=\"width:{:.1}%\"></div></td></tr>",
            rate_td(&r.any),
            r.any.to_f64() * 100.0
        );
    }
    s.push_str("</table>\n");
    s
}

fn matrix(rows: &[ConditionalRate], ids: &[String], label: &str) -> String {
    let mut s = String::from("<table>\n");
    s.push_str(&header_row(&[label, "inputs", "any"], ids));
    for r in rows {
        let _ = write!(
            s,
            "<tr><td class=\"name\">{}</td><td>{}</td>{}",
            escape(&r.key),
            r.inputs,
            rate_td(&r.any)
        );
        for v in &r.per_metric {
            s.push_str(&rate_td(v));
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n");
    s
}

pub fn render_html(agg: &RobustnessAggregate, meta: &ReportMeta) -> String {
    let mut s = format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Robustness report: {0}</title>{STYLE}</head><body>\n<h1>Robustness report: {0}</h1>\n",
        escape(&meta.label)
    );
    let _ = writeln!(
        s,
        "<p>{} inputs. Missing vs present counts as {}.</p>",
        agg.inputs,
        match meta.policy.missing_vs_present {
            crate::metrics::MissingPolicy::Change => "a change",
            crate::metrics::MissingPolicy::NoChange => "no change",
        }
    );

    s.push_str("<h2>Overall rate of change</h2>\n<table>\n");
    let mut ids = agg.metric_ids.clone();
    ids.push("any".into());
    s.push_str(&header_row(&[], &ids));
    s.push_str("<tr>");
    for r in agg.per_metric.iter().chain(std::iter::once(&agg.any)) {
        s.push_str(&rate_td(r));
    }
    s.push_str("</tr>\n</table>\n");

    let mut cats: Vec<&ConditionalRate> = agg.per_category.iter().collect();
    cats.sort_by(|a, b| b.any.cmp(&a.any).then(a.key.cmp(&b.key)));
    s.push_str("<h2>By category</h2>\n");
    s.push_str(&bars(&cats, "category"));
    let mut methods: Vec<&ConditionalRate> = agg.per_method.iter().collect();
    methods.sort_by(|a, b| b.any.cmp(&a.any).then(a.key.cmp(&b.key)));
    s.push_str("<h2>By method</h2>\n");
    s.push_str(&bars(&methods, "method"));

    s.push_str("<h2>Category by metric</h2>\n");
    s.push_str(&matrix(&agg.per_category, &agg.metric_ids, "category"));
    s.push_str("<h2>Method by metric</h2>\n");
    s.push_str(&matrix(&agg.per_method, &agg.metric_ids, "method"));

    s.push_str("<h2>By input</h2>\n<table>\n");
    s.push_str(&header_row(&["i", "n", "any"], &agg.metric_ids));
    for r in &agg.per_input {
        let _ = write!(s, "<tr><td>{}</td><td>{}</td>{}", r.i, r.variants, rate_td(&r.any));
        for v in &r.per_metric {
            s.push_str(&rate_td(v));
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n</body></html>\n");
    s
}

/// Side-by-side overall and per-category rates of several runs.
pub fn comparison_html(runs: &[(String, RobustnessAggregate)]) -> String {
    let mut s = format!("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Run comparison</title>{STYLE}</head><body>\n<h1>Run comparison</h1>\n");
    let labels: Vec<String> = runs.iter().map(|(l, _)| l.clone()).collect();

    let mut metric_ids: Vec<String> = Vec::new();
    for (_, a) in runs {
        for id in &a.metric_ids {
            if !metric_ids.contains(id) {
                metric_ids.push(id.clone());
            }
        }
    }
    metric_ids.push("any".into());
    s.push_str("<h2>Overall</h2>\n<table>\n");
    s.push_str(&header_row(&["metric"], &labels));
    for id in &metric_ids {
        let _ = write!(s, "<tr><td class=\"name\">{}</td>", escape(id));
        for (_, a) in runs {
            let r = if id == "any" { Some(&a.any) } else { a.metric(id) };
            match r {
                Some(r) => s.push_str(&rate_td(r)),
                None => s.push_str("<td></td>"),
            }
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n");

    let mut cats: Vec<String> = runs.iter().flat_map(|(_, a)| a.per_category.iter().map(|c| c.key.clone())).collect();
    cats.sort();
    cats.dedup();
    s.push_str("<h2>By category (any change)</h2>\n<table>\n");
    s.push_str(&header_row(&["category"], &labels));
    for c in &cats {
        let _ = write!(s, "<tr><td class=\"name\">{}</td>", escape(c));
        for (_, a) in runs {
            match a.category(c) {
                Some(r) => s.push_str(&rate_td(&r.any)),
                None => s.push_str("<td></td>"),
            }
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n</body></html>\n");
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    Equal,
    Insert,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffSpan {
    pub kind: SpanKind,
    pub text: String,
}

/// Character diff of `old` -> `new`, adjacent characters of one kind merged.
pub fn diff_spans(old: &str, new: &str) -> Vec<DiffSpan> {
    let diff = TextDiff::from_chars(old, new);
    let mut out: Vec<DiffSpan> = Vec::new();
    for change in diff.iter_all_changes() {
        let kind = match change.tag() {
            ChangeTag::Equal => SpanKind::Equal,
            ChangeTag::Insert => SpanKind::Insert,
            ChangeTag::Delete => SpanKind::Delete,
        };
        match out.last_mut() {
            Some(last) if last.kind == kind => last.text.push_str(change.value()),
            _ => out.push(DiffSpan {
                kind,
                text: change.value().to_string(),
            }),
        }
    }
    out
}

fn diff_html(old: &str, new: &str) -> String {
    let mut s = String::from("<pre>");
    for span in diff_spans(old, new) {
        let t = escape(&span.text);
        match span.kind {
            SpanKind::Equal => s.push_str(&t),
            SpanKind::Insert => {
                let _ = write!(s, "<ins>{t}</ins>");
            }
            SpanKind::Delete => {
                let _ = write!(s, "<del>{t}</del>");
            }
        }
    }
    s.push_str("</pre>\n");
    s
}

/// Texts of one variant of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMember {
    pub j: usize,
    pub input: String,
    /// `None` when the system failed.
    pub output: Option<String>,
}

/// Inputs of group `i` from the benchmark, outputs from a run's output
/// directory (absent files read as no output).
pub fn group_members(
    bench: &ExpandedBenchmark,
    bench_dir: &Path,
    results: &Path,
    i: usize,
) -> Result<Vec<GroupMember>> {
    let mut recs: Vec<_> = bench.records.iter().filter(|r| r.i == i).collect();
    if recs.is_empty() {
        return Err(Error::UnknownGroup(i));
    }
    recs.sort_by_key(|r| r.j);
    recs.into_iter()
        .map(|r| {
            Ok(GroupMember {
                j: r.j,
                input: bench.paragraph_text(bench_dir, r)?,
                output: fs::read_to_string(output_file(results, r.i, r.j)).ok(),
            })
        })
        .collect()
}

/// HTML page for group `i`: metric table with changed cells flagged, then
/// input diffs and output diffs against the original.
pub fn debug_group_report(
    i: usize,
    table: &ResultTable,
    members: &[GroupMember],
    policy: &ComparisonPolicy,
) -> Result<String> {
    let mut rows: Vec<_> = table.rows.iter().filter(|r| r.i == i).collect();
    rows.sort_by_key(|r| r.j);
    let base = match rows.first() {
        Some(r) if r.j == 0 => *r,
        _ => return Err(Error::UnknownGroup(i)),
    };
    let vector = |values: &[MetricValue]| {
        crate::harness::MetricVector(table.metric_ids.iter().cloned().zip(values.iter().copied()).collect())
    };
    let base_vec = vector(&base.values);

    let mut s = format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Group {i}</title>{STYLE}</head><body>\n<h1>Group {i}</h1>\n<table>\n"
    );
    s.push_str(&header_row(&["j", "method", "category", "any_checker_changed"], &table.metric_ids));
    for r in &rows {
        let (deltas, any) = if r.j == 0 {
            (vec![false; table.metric_ids.len()], false)
        } else {
            change_indicator(&base_vec, &vector(&r.values), policy)?
        };
        let _ = write!(
            s,
            "<tr><td>{}</td><td class=\"name\">{}</td><td class=\"name\">{}</td>",
            r.j,
            escape(&r.method_id),
            escape(&r.category)
        );
        let any_cell = if r.j == 0 { String::new() } else { any.to_string() };
        let _ = write!(s, "<td{}>{any_cell}</td>", if any { " class=\"flag\"" } else { "" });
        for (v, d) in r.values.iter().zip(deltas) {
            let _ = write!(
                s,
                "<td{}>{}</td>",
                if d { " class=\"flag\"" } else { "" },
                escape(&v.to_cell())
            );
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n");

    let original = members.iter().find(|m| m.j == 0);
    s.push_str("<h2>Inputs</h2>\n");
    for m in members {
        let _ = writeln!(s, "<h3>j = {}</h3>", m.j);
        match original {
            Some(o) if m.j != 0 => s.push_str(&diff_html(&o.input, &m.input)),
            _ => {
                let _ = writeln!(s, "<pre>{}</pre>", escape(&m.input));
            }
        }
    }
    s.push_str("<h2>System outputs</h2>\n");
    for m in members {
        let _ = writeln!(s, "<h3>j = {}</h3>", m.j);
        match (&m.output, original.and_then(|o| o.output.as_ref())) {
            (None, _) => s.push_str("<p><em>no output</em></p>\n"),
            (Some(out), Some(base)) if m.j != 0 => s.push_str(&diff_html(base, out)),
            (Some(out), _) => {
                let _ = writeln!(s, "<pre>{}</pre>", escape(out));
            }
        }
    }
    s.push_str("</body></html>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn highlight_bands() {
        assert_eq!(highlight(0.0), "");
        assert_eq!(highlight(0.2499), "");
        assert_eq!(highlight(0.25), "warn");
        assert_eq!(highlight(0.5), "warn");
        assert_eq!(highlight(0.51), "alert");
    }

    #[test]
    fn spans_merge() {
        let spans = diff_spans("MOVE  A", "MOVE A");
        let deleted: String = spans
            .iter()
            .filter(|s| s.kind == SpanKind::Delete)
            .map(|s| s.text.as_str())
            .collect();
        assert_eq!(deleted, " ");
        assert!(spans.iter().all(|s| s.kind != SpanKind::Insert));
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("<a href='x'>&</a>"), "&lt;a href=&#39;x&#39;&gt;&amp;&lt;/a&gt;");
    }
}
