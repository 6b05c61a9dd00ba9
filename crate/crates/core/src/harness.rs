//! Running a system under test over a benchmark and collecting checker values.
//!
//! Systems and checkers are adapters: an external command, an HTTP endpoint
//! (systems only) or a builtin stub. Results are journaled one JSON line per
//! record so an interrupted run resumes where it stopped; the results CSV is
//! rewritten in `(i, j)` order when the run completes.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench_gen::{ExpandedBenchmark, VariantRecord};
use crate::convert::fixed_to_free;
use crate::error::{Error, Result};
use crate::model::words::is_reserved;
use crate::model::{tokenize_lenient, CobolUnit, SourceForm, TokenKind};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

/// The checker ids of the reference evaluation, in report order.
pub const DEFAULT_METRIC_IDS: [&str; 12] = [
    "parsable",
    "translated",
    "not_empty",
    "non_empty_exec",
    "not_eq_sig",
    "proc_invoke_pass",
    "var_acc_pass",
    "sql",
    "file",
    "compilation_passed",
    "uninjected_compilation_passed",
    "laj_pass",
];

const CONSTANT_OUTPUT: &str = "public class Translated {\n}\n";

/// Tokens dropped by the case-sensitive echo stub: optional keywords and
/// scope terminators whose presence does not change a statement.
const ECHO_DROPPED: &[&str] = &["THEN", "END-IF", "END-EVALUATE", "END-PERFORM", "."];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StubKind {
    /// Same canned output for every input.
    Constant,
    /// Output embeds the SHA-256 of the input bytes.
    EchoHash,
    /// Normalized token stream, identifiers verbatim, everything else
    /// upper-cased.
    CaseSensitiveEcho,
}

impl std::str::FromStr for StubKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(StubKind::Constant),
            "echo-hash" => Ok(StubKind::EchoHash),
            "case-sensitive-echo" => Ok(StubKind::CaseSensitiveEcho),
            other => Err(Error::InvalidRequest(format!("unknown stub `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemAdapter {
    /// Input on stdin, output on stdout; a non-zero exit is a failure.
    ExternalCommand { argv: Vec<String>, timeout: Duration },
    /// POST the input as text/plain, response body is the output.
    HttpEndpoint { url: String, timeout: Duration },
    BuiltinStub(StubKind),
}

impl SystemAdapter {
    /// `stub:NAME`, an `http(s)://` URL, or a whitespace-separated command line.
    pub fn parse(spec: &str, timeout: Duration) -> Result<Self> {
        if let Some(name) = spec.strip_prefix("stub:") {
            return Ok(SystemAdapter::BuiltinStub(name.parse()?));
        }
        if spec.starts_with("http://") || spec.starts_with("https://") {
            return Ok(SystemAdapter::HttpEndpoint {
                url: spec.to_string(),
                timeout,
            });
        }
        let argv: Vec<String> = spec.split_whitespace().map(str::to_string).collect();
        if argv.is_empty() {
            return Err(Error::InvalidRequest("empty system command".into()));
        }
        Ok(SystemAdapter::ExternalCommand { argv, timeout })
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn case_sensitive_echo(unit: &CobolUnit) -> Result<String> {
    let free;
    let unit = if unit.form == SourceForm::Fixed {
        free = fixed_to_free(unit)?.0;
        &free
    } else {
        unit
    };
    let mut code = String::new();
    for line in unit.lines.iter().filter(|l| l.is_code()) {
        let c = line.content_str();
        code.push_str(c.strip_prefix(">>D").unwrap_or(c));
        code.push('\n');
    }
    let words: Vec<String> = tokenize_lenient(&code)
        .into_iter()
        .filter(|t| t.kind != TokenKind::InlineComment)
        .map(|t| {
            if t.kind == TokenKind::Word && !is_reserved(&t.text) {
                t.text
            } else {
                t.text.to_ascii_uppercase()
            }
        })
        .filter(|t| !ECHO_DROPPED.contains(&t.as_str()))
        .collect();
    Ok(words.join(" ") + "\n")
}

/// Run `argv`, feeding `stdin`, and return stdout. Killed after `timeout`.
fn run_command(argv: &[String], stdin: &[u8], timeout: Duration) -> std::result::Result<Vec<u8>, String> {
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("{}: {e}", argv[0]))?;
    let mut pipe_in = child.stdin.take().expect("piped stdin");
    let input = stdin.to_vec();
    let writer = std::thread::spawn(move || {
        // A command that ignores its input closes the pipe early.
        let _ = pipe_in.write_all(&input);
    });
    let mut pipe_out = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        pipe_out.read_to_end(&mut buf).map(|_| buf)
    });
    let deadline = Instant::now() + timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break s,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("timed out after {}s", timeout.as_secs_f64()));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(e.to_string()),
        }
    };
    let _ = writer.join();
    let out = reader
        .join()
        .map_err(|_| "reader thread panicked".to_string())?
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("exit status {status}"));
    }
    Ok(out)
}

/// Output of the system for `unit`, or `Error::Translation`.
pub fn run_system(adapter: &SystemAdapter, unit: &CobolUnit) -> Result<String> {
    let text = unit.to_text();
    match adapter {
        SystemAdapter::BuiltinStub(StubKind::Constant) => Ok(CONSTANT_OUTPUT.to_string()),
        SystemAdapter::BuiltinStub(StubKind::EchoHash) => Ok(format!(
            "// input sha256 {}\npublic class Echo {{\n}}\n",
            hex_digest(text.as_bytes())
        )),
        SystemAdapter::BuiltinStub(StubKind::CaseSensitiveEcho) => {
            case_sensitive_echo(unit).map_err(|e| Error::Translation(e.to_string()))
        }
        SystemAdapter::ExternalCommand { argv, timeout } => {
            let out = run_command(argv, text.as_bytes(), *timeout).map_err(Error::Translation)?;
            String::from_utf8(out).map_err(|e| Error::Translation(e.to_string()))
        }
        SystemAdapter::HttpEndpoint { url, timeout } => {
            let agent = ureq::AgentBuilder::new().timeout(*timeout).build();
            agent
                .post(url)
                .set("Content-Type", "text/plain; charset=utf-8")
                .send_string(&text)
                .map_err(|e| Error::Translation(e.to_string()))?
                .into_string()
                .map_err(|e| Error::Translation(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Bool(bool),
    Num(f64),
    Missing,
}

impl MetricValue {
    /// `true|false|<number>|missing`, surrounding whitespace ignored.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "true" | "True" | "TRUE" => Some(MetricValue::Bool(true)),
            "false" | "False" | "FALSE" => Some(MetricValue::Bool(false)),
            "missing" | "" => Some(MetricValue::Missing),
            other => other.parse::<f64>().ok().filter(|v| v.is_finite()).map(MetricValue::Num),
        }
    }

    /// CSV cell: missing values are empty.
    pub fn to_cell(self) -> String {
        match self {
            MetricValue::Bool(b) => b.to_string(),
            MetricValue::Num(v) => v.to_string(),
            MetricValue::Missing => String::new(),
        }
    }

    pub fn is_missing(self) -> bool {
        self == MetricValue::Missing
    }
}

/// Metric values in checker-set order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricVector(pub Vec<(String, MetricValue)>);

impl MetricVector {
    pub fn ids(&self) -> Vec<&str> {
        self.0.iter().map(|(id, _)| id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<MetricValue> {
        self.0.iter().find(|(k, _)| k == id).map(|(_, v)| *v)
    }

    pub fn values(&self) -> Vec<MetricValue> {
        self.0.iter().map(|(_, v)| *v).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinChecker {
    /// The system produced output.
    Translated,
    /// Output has a non-whitespace character.
    NotEmpty,
    /// Always true.
    Constant,
    /// Output byte length is odd.
    LenBucket,
    /// First 48 bits of the output's SHA-256, as a number.
    OutputDigest,
    LineCount,
}

impl BuiltinChecker {
    fn eval(self, output: &str) -> MetricValue {
        match self {
            BuiltinChecker::Translated | BuiltinChecker::Constant => MetricValue::Bool(true),
            BuiltinChecker::NotEmpty => MetricValue::Bool(!output.trim().is_empty()),
            BuiltinChecker::LenBucket => MetricValue::Bool(output.len() % 2 == 1),
            BuiltinChecker::OutputDigest => {
                let d = Sha256::digest(output.as_bytes());
                let v = d[..6].iter().fold(0u64, |acc, b| acc << 8 | *b as u64);
                MetricValue::Num(v as f64)
            }
            BuiltinChecker::LineCount => MetricValue::Num(output.lines().count() as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckerKind {
    Builtin { builtin: BuiltinChecker },
    /// Invoked as `argv... INPUT_FILE OUTPUT_FILE`; prints one value.
    Command { command: Vec<String> },
    /// Id without an adapter: always missing.
    Unconfigured {},
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerSpec {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckerKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerSet {
    pub checkers: Vec<CheckerSpec>,
    #[serde(default = "default_checker_timeout", with = "secs")]
    pub timeout: Duration,
}

fn default_checker_timeout() -> Duration {
    Duration::from_secs(60)
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

impl Default for CheckerSet {
    /// The twelve reference ids; only `translated` and `not_empty` have
    /// builtin implementations, the rest need external adapters.
    fn default() -> Self {
        CheckerSet {
            checkers: DEFAULT_METRIC_IDS
                .iter()
                .map(|id| CheckerSpec {
                    id: id.to_string(),
                    kind: match *id {
                        "translated" => CheckerKind::Builtin {
                            builtin: BuiltinChecker::Translated,
                        },
                        "not_empty" => CheckerKind::Builtin {
                            builtin: BuiltinChecker::NotEmpty,
                        },
                        _ => CheckerKind::Unconfigured {},
                    },
                })
                .collect(),
            timeout: default_checker_timeout(),
        }
    }
}

impl CheckerSet {
    /// Builtin checkers, each under its own kebab-case name.
    pub fn builtin(kinds: &[BuiltinChecker]) -> Self {
        CheckerSet {
            checkers: kinds
                .iter()
                .map(|k| CheckerSpec {
                    id: serde_json::to_value(k)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    kind: CheckerKind::Builtin { builtin: *k },
                })
                .collect(),
            timeout: default_checker_timeout(),
        }
    }

    /// JSON file: either `{"checkers": [...], "timeout": secs}` or a bare
    /// array of checker entries.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set = match serde_json::from_str::<CheckerSet>(&text) {
            Ok(s) => s,
            Err(_) => CheckerSet {
                checkers: serde_json::from_str(&text)?,
                timeout: default_checker_timeout(),
            },
        };
        let mut seen = HashSet::new();
        for c in &set.checkers {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::MetricSetMismatch(format!("checker id `{}` repeated", c.id)));
            }
        }
        Ok(set)
    }

    pub fn ids(&self) -> Vec<String> {
        self.checkers.iter().map(|c| c.id.clone()).collect()
    }
}

static SCRATCH: AtomicUsize = AtomicUsize::new(0);

fn run_external_checker(argv: &[String], input: &str, output: &str, timeout: Duration) -> MetricValue {
    if argv.is_empty() {
        return MetricValue::Missing;
    }
    let n = SCRATCH.fetch_add(1, Ordering::Relaxed);
    let base = std::env::temp_dir().join(format!("cobperturb-{}-{n}", std::process::id()));
    let (in_path, out_path) = (base.with_extension("in.cbl"), base.with_extension("out.txt"));
    let value = (|| {
        fs::write(&in_path, input).ok()?;
        fs::write(&out_path, output).ok()?;
        let mut full = argv.to_vec();
        full.push(in_path.display().to_string());
        full.push(out_path.display().to_string());
        let stdout = run_command(&full, b"", timeout).ok()?;
        let text = String::from_utf8(stdout).ok()?;
        MetricValue::parse(text.lines().next().unwrap_or(""))
    })();
    let _ = fs::remove_file(&in_path);
    let _ = fs::remove_file(&out_path);
    value.unwrap_or(MetricValue::Missing)
}

/// Evaluate every checker. A failed translation sets `translated` to false
/// and leaves every other value missing.
pub fn run_checkers(set: &CheckerSet, input: &CobolUnit, output: &Result<String>) -> MetricVector {
    let text = input.to_text();
    MetricVector(
        set.checkers
            .iter()
            .map(|c| {
                let v = match (output, &c.kind) {
                    (Err(_), CheckerKind::Builtin { builtin: BuiltinChecker::Translated }) => {
                        MetricValue::Bool(false)
                    }
                    (Err(_), _) => MetricValue::Missing,
                    (Ok(out), CheckerKind::Builtin { builtin }) => builtin.eval(out),
                    (Ok(out), CheckerKind::Command { command }) => {
                        run_external_checker(command, &text, out, set.timeout)
                    }
                    (Ok(_), CheckerKind::Unconfigured {}) => MetricValue::Missing,
                };
                (c.id.clone(), v)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub i: usize,
    pub j: usize,
    pub method_id: String,
    pub category: String,
    /// Relative to the results file's directory.
    pub output_path: Option<PathBuf>,
    pub metrics: MetricVector,
    pub wall_ms: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub jobs: usize,
    pub results: PathBuf,
}

/// `results.csv` -> `results.jsonl`.
pub fn journal_path(results: &Path) -> PathBuf {
    results.with_extension("jsonl")
}

/// `results.csv` -> `results_outputs/`.
pub fn outputs_dir(results: &Path) -> PathBuf {
    let stem = results.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    results.with_file_name(format!("{stem}_outputs"))
}

fn output_file_name(i: usize, j: usize) -> String {
    format!("{i}_{j}.txt")
}

/// Where the system output of record `(i, j)` is kept.
pub fn output_file(results: &Path, i: usize, j: usize) -> PathBuf {
    outputs_dir(results).join(output_file_name(i, j))
}

fn read_journal(path: &Path, ids: &[String]) -> Result<Vec<RunRecord>> {
    let Ok(file) = File::open(path) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        // A run killed mid-write leaves a truncated last line.
        let Ok(rec) = serde_json::from_str::<RunRecord>(&line) else {
            warn!("{}: ignoring unreadable journal line", path.display());
            continue;
        };
        let rec_ids: Vec<&str> = rec.metrics.ids();
        if rec_ids != ids.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::MetricSetMismatch(format!(
                "{} was written with checkers {:?}, current set is {:?}",
                path.display(),
                rec_ids,
                ids
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

fn run_one(
    bench: &ExpandedBenchmark,
    bench_dir: &Path,
    rec: &VariantRecord,
    adapter: &SystemAdapter,
    checkers: &CheckerSet,
    outputs: &Path,
) -> Result<RunRecord> {
    let unit = bench.paragraph_unit(bench_dir, rec)?;
    let start = Instant::now();
    let output = run_system(adapter, &unit);
    let metrics = run_checkers(checkers, &unit, &output);
    let wall_ms = start.elapsed().as_millis() as u64;
    let output_path = match &output {
        Ok(text) => {
            let name = output_file_name(rec.i, rec.j);
            let path = outputs.join(&name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            Some(PathBuf::from(outputs.file_name().unwrap_or_default()).join(name))
        }
        Err(_) => None,
    };
    Ok(RunRecord {
        i: rec.i,
        j: rec.j,
        method_id: rec.method_id.clone(),
        category: rec.category.map(|c| c.to_string()).unwrap_or_default(),
        output_path,
        metrics,
        wall_ms,
        error: output.err().map(|e| e.to_string()),
    })
}

/// Run the system and checkers over every record of `bench` (originals
/// included), resuming from the journal next to `opts.results`.
pub fn run_benchmark(
    bench: &ExpandedBenchmark,
    bench_dir: &Path,
    adapter: &SystemAdapter,
    checkers: &CheckerSet,
    opts: &RunOptions,
) -> Result<Vec<RunRecord>> {
    let ids = checkers.ids();
    let journal = journal_path(&opts.results);
    let outputs = outputs_dir(&opts.results);
    fs::create_dir_all(&outputs).map_err(|e| Error::io(&outputs, e))?;

    let mut done: BTreeMap<(usize, usize), RunRecord> = BTreeMap::new();
    for r in read_journal(&journal, &ids)? {
        done.insert((r.i, r.j), r);
    }
    let todo: Vec<&VariantRecord> = bench
        .records
        .iter()
        .filter(|r| !done.contains_key(&(r.i, r.j)))
        .collect();
    info!("{} records done, {} to run", done.len(), todo.len());

    // Rewrite the journal without any truncated tail before appending.
    {
        let mut f = File::create(&journal).map_err(|e| Error::io(&journal, e))?;
        for r in done.values() {
            writeln!(f, "{}", serde_json::to_string(r)?).map_err(|e| Error::io(&journal, e))?;
        }
    }
    let sink = Mutex::new(
        OpenOptions::new()
            .append(true)
            .open(&journal)
            .map_err(|e| Error::io(&journal, e))?,
    );
    let next = AtomicUsize::new(0);
    let fresh = Mutex::new(Vec::new());
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..opts.jobs.max(1) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(rec) = todo.get(k) else { break };
                if failure.lock().unwrap().is_some() {
                    break;
                }
                let result = run_one(bench, bench_dir, rec, adapter, checkers, &outputs).and_then(|r| {
                    let mut line = serde_json::to_string(&r)?;
                    line.push('\n');
                    let mut f = sink.lock().unwrap();
                    f.write_all(line.as_bytes()).and_then(|_| f.flush()).map_err(|e| Error::io(&journal, e))?;
                    Ok(r)
                });
                match result {
                    Ok(r) => fresh.lock().unwrap().push(r),
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    for r in fresh.into_inner().unwrap() {
        done.insert((r.i, r.j), r);
    }
    let records: Vec<RunRecord> = done.into_values().collect();
    write_results_csv(&opts.results, &ids, &records)?;
    Ok(records)
}

pub fn write_results_csv(path: &Path, ids: &[String], records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["i".to_string(), "j".into(), "method_id".into(), "category".into()];
    header.extend(ids.iter().cloned());
    header.push("error".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.i.to_string(), r.j.to_string(), r.method_id.clone(), r.category.clone()];
        row.extend(r.metrics.values().into_iter().map(MetricValue::to_cell));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub i: usize,
    pub j: usize,
    pub method_id: String,
    pub category: String,
    pub values: Vec<MetricValue>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub metric_ids: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn from_records(ids: &[String], records: &[RunRecord]) -> Self {
        ResultTable {
            metric_ids: ids.to_vec(),
            rows: records
                .iter()
                .map(|r| ResultRow {
                    i: r.i,
                    j: r.j,
                    method_id: r.method_id.clone(),
                    category: r.category.clone(),
                    values: r.metrics.values(),
                    error: r.error.clone(),
                })
                .collect(),
        }
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        let fixed = ["i", "j", "method_id", "category"];
        if header.len() < 5 || header[..4] != fixed || header.last().map(String::as_str) != Some("error") {
            return Err(Error::Manifest(format!(
                "{}: expected columns i, j, method_id, category, <metrics>, error",
                path.display()
            )));
        }
        let metric_ids = header[4..header.len() - 1].to_vec();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let field = |k: usize| rec.get(k).unwrap_or("");
            let num = |k: usize| {
                field(k)
                    .parse::<usize>()
                    .map_err(|_| Error::Manifest(format!("bad index `{}` in {}", field(k), path.display())))
            };
            let values = (4..4 + metric_ids.len())
                .map(|k| {
                    MetricValue::parse(field(k)).ok_or_else(|| {
                        Error::Manifest(format!("bad metric value `{}` in {}", field(k), path.display()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let error = field(header.len() - 1);
            rows.push(ResultRow {
                i: num(0)?,
                j: num(1)?,
                method_id: field(2).to_string(),
                category: field(3).to_string(),
                values,
                error: (!error.is_empty()).then(|| error.to_string()),
            });
        }
        Ok(ResultTable { metric_ids, rows })
    }
}
