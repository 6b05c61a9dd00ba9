//! `cobperturb` command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cobperturb::bench_gen::{expand_corpus, plan_expansion, CorpusManifest, ExpandedBenchmark};
use cobperturb::harness::{run_benchmark, CheckerSet, ResultTable, RunOptions, SystemAdapter};
use cobperturb::metrics::{aggregate, change_rows, MissingPolicy};
use cobperturb::perturb::{list_methods, MethodFilter};
use cobperturb::pipeline::{perturb_layered, PerturbRecord};
use cobperturb::report::{
    comparison_html, debug_group_report, emit_report, group_members, ReportFormat, ReportMeta,
};
use cobperturb::{
    detect_form, fixed_to_free, free_to_fixed_sfx, method, perturb, Category, CobolUnit,
    ComparisonPolicy, PerturbRequest, SourceForm, UnitKind,
};

#[derive(Parser)]
#[command(name = "cobperturb", version, about = "Meaning-preserving COBOL perturbations and robustness metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Fixed,
    Free,
}

impl From<Form> for SourceForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Fixed => SourceForm::Fixed,
            Form::Free => SourceForm::Free,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Program,
    Paragraph,
}

impl From<Kind> for UnitKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Program => UnitKind::Program,
            Kind::Paragraph => UnitKind::Paragraph,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert between fixed and free form.
    Convert {
        #[arg(long, value_enum)]
        from: Form,
        #[arg(long, value_enum)]
        to: Form,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the conversion counters here as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Apply one method (or several, layered) and print the JSON record.
    Perturb {
        /// Repeat to layer methods in order.
        #[arg(long = "method", required = true)]
        methods: Vec<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        form: Form,
        #[arg(long, value_enum)]
        out_form: Form,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "program")]
        kind: Kind,
        /// Write the rename map (old -> new) here when one is produced.
        #[arg(long)]
        rename_map: Option<PathBuf>,
    },
    /// Inspect the method catalog.
    Methods {
        #[command(subcommand)]
        command: MethodsCommand,
    },
    /// Expand a corpus into a benchmark.
    Expand {
        #[arg(long)]
        corpus: PathBuf,
        /// Target paragraph appearances per method.
        #[arg(long = "R", default_value_t = 5)]
        r: usize,
        #[arg(long)]
        rr: Option<usize>,
        #[arg(long)]
        rs: Option<usize>,
        /// Try methods that have been used least first.
        #[arg(long)]
        boost_rare: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a system and its checkers over a benchmark.
    Run(RunArgs),
    /// Aggregate a results table into reports.
    Report(ReportArgs),
    /// Side-by-side comparison of several runs.
    Compare {
        /// `LABEL=RESULTS_CSV`, repeated; paired in order with --benchmark.
        #[arg(long = "run", required = true)]
        runs: Vec<String>,
        #[arg(long = "benchmark", required = true)]
        benchmarks: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Guess whether a file is fixed or free form.
    DetectForm { file: PathBuf },
    /// Write the built-in synthetic corpus (9 programs, 22 paragraphs).
    SynthCorpus {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MethodsCommand {
    List {
        #[arg(long)]
        category: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    benchmark: PathBuf,
    /// Command line, http(s) URL, or `stub:constant|echo-hash|case-sensitive-echo`.
    #[arg(long)]
    system: String,
    /// Checker set JSON; defaults to the twelve reference ids.
    #[arg(long)]
    checkers: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seconds before the system call is abandoned.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PolicyArgs {
    /// Count missing vs present as no change.
    #[arg(long)]
    missing_no_change: bool,
    /// `ID=TOL` absolute tolerance for a numeric metric; repeatable.
    #[arg(long = "tolerance")]
    tolerances: Vec<String>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<ComparisonPolicy> {
        let mut p = ComparisonPolicy::default();
        if self.missing_no_change {
            p.missing_vs_present = MissingPolicy::NoChange;
        }
        for t in &self.tolerances {
            let (id, v) = t.split_once('=').with_context(|| format!("bad tolerance `{t}`"))?;
            let v: f64 = v.parse().with_context(|| format!("bad tolerance `{t}`"))?;
            if v < 0.0 {
                bail!("tolerance for `{id}` is negative");
            }
            p.numeric_tolerance.insert(id.to_string(), v);
        }
        Ok(p)
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    benchmark: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated: html, csv, json.
    #[arg(long, default_value = "html,csv,json")]
    format: String,
    /// Also write the debug page of this group.
    #[arg(long)]
    group: Option<usize>,
    #[arg(long)]
    label: Option<String>,
    #[command(flatten)]
    policy: PolicyArgs,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn aggregate_results(
    results: &Path,
    bench_dir: &Path,
    policy: &ComparisonPolicy,
) -> Result<(ResultTable, cobperturb::RobustnessAggregate)> {
    let bench = ExpandedBenchmark::load(bench_dir)?;
    let table = ResultTable::read_csv(results)?;
    let rows = change_rows(&table, policy)?;
    let agg = aggregate(&rows, &table.metric_ids, &bench.group_sizes())?;
    Ok((table, agg))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Convert { from, to, input, out, trace } => {
            let from = SourceForm::from(from);
            let unit = CobolUnit::parse(&read(&input)?, from, UnitKind::Program)?;
            let (converted, counters) = match (from, SourceForm::from(to)) {
                (SourceForm::Fixed, SourceForm::Free) => fixed_to_free(&unit)?,
                (SourceForm::Free, SourceForm::Fixed) => free_to_fixed_sfx(&unit)?,
                _ => (unit, Default::default()),
            };
            write(&out, &converted.to_text())?;
            if let Some(t) = trace {
                write(&t, &serde_json::to_string_pretty(&counters)?)?;
            }
        }
        Command::Perturb { methods, input, form, out_form, seed, out, kind, rename_map } => {
            let unit = CobolUnit::parse(&read(&input)?, form.into(), kind.into())?;
            let descriptors = methods.iter().map(|m| method(m)).collect::<Result<Vec<_>, _>>()?;
            let dest = SourceForm::from(out_form);
            let (text, map, json) = if let [m] = descriptors[..] {
                let r = perturb(&PerturbRequest { input: &unit, method: m, desired_output_form: dest, seed })?;
                let json = serde_json::to_string(&r.record(seed))?;
                (r.output.to_text(), r.rename_map, json)
            } else {
                let r = perturb_layered(&unit, &descriptors, dest, seed)?;
                let records: Vec<PerturbRecord> = r.layers.iter().map(|l| l.record(seed)).collect();
                let mut map = BTreeMap::new();
                for l in &r.layers {
                    map.extend(l.rename_map.clone().unwrap_or_default());
                }
                let json = serde_json::to_string(&serde_json::json!({ "method_ids": r.method_ids, "seed": seed, "layers": records }))?;
                (r.output.to_text(), (!map.is_empty()).then_some(map), json)
            };
            write(&out, &text)?;
            if let (Some(path), Some(map)) = (rename_map, map) {
                write(&path, &serde_json::to_string_pretty(&map)?)?;
            }
            println!("{json}");
        }
        Command::Methods { command: MethodsCommand::List { category, json } } => {
            let category = category
                .map(|c| c.parse::<Category>())
                .transpose()
                .map_err(anyhow::Error::msg)?;
            let mut list = list_methods(&MethodFilter { category, ..Default::default() });
            list.sort_by_key(|d| (d.category, d.id));
            if json {
                println!("{}", serde_json::to_string_pretty(&list)?);
            } else {
                for d in list {
                    let mut notes = Vec::new();
                    if d.is_probabilistic() {
                        notes.push("probabilistic");
                    }
                    if d.requires_free_parse {
                        notes.push("parse");
                    }
                    if !d.applies_to(UnitKind::Paragraph) {
                        notes.push("program-only");
                    }
                    if d.fixed_output_only {
                        notes.push("fixed-output");
                    }
                    println!("{:<32} {:<32} {}", d.id, d.category, notes.join(","));
                }
            }
        }
        Command::Expand { corpus, r, rr, rs, boost_rare, seed, out } => {
            let manifest = CorpusManifest::scan(&corpus)?;
            let plan = plan_expansion(&manifest, r, rr, rs, seed, boost_rare)?;
            let bench = expand_corpus(&manifest, &plan, &out)?;
            println!(
                "{} programs, {} paragraphs; R_r = {}, R_s = {}; {} program variants, {} records, {} skipped",
                manifest.programs.len(),
                manifest.paragraph_count,
                plan.r_r,
                plan.r_s,
                bench.program_variants.len(),
                bench.records.len(),
                bench.skipped.len()
            );
        }
        Command::Run(a) => {
            let bench = ExpandedBenchmark::load(&a.benchmark)?;
            let adapter = SystemAdapter::parse(&a.system, Duration::from_secs(a.timeout))?;
            let checkers = match &a.checkers {
                Some(p) => CheckerSet::from_file(p)?,
                None => CheckerSet::default(),
            };
            if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let records = run_benchmark(
                &bench,
                &a.benchmark,
                &adapter,
                &checkers,
                &RunOptions { jobs: a.jobs, results: a.out.clone() },
            )?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            println!("{} records, {failed} system failures -> {}", records.len(), a.out.display());
        }
        Command::Report(a) => {
            let policy = a.policy.policy()?;
            let formats = a
                .format
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<ReportFormat>())
                .collect::<Result<Vec<_>, _>>()?;
            let (table, agg) = aggregate_results(&a.results, &a.benchmark, &policy)?;
            let label = a.label.clone().unwrap_or_else(|| a.results.display().to_string());
            for p in emit_report(&agg, &ReportMeta { label, policy: policy.clone() }, &formats, &a.out)? {
                println!("{}", p.display());
            }
            if let Some(i) = a.group {
                let bench = ExpandedBenchmark::load(&a.benchmark)?;
                let members = group_members(&bench, &a.benchmark, &a.results, i)?;
                let html = debug_group_report(i, &table, &members, &policy)?;
                let path = a.out.join(format!("group_{i}.html"));
                write(&path, &html)?;
                println!("{}", path.display());
            }
        }
        Command::Compare { runs, benchmarks, out, policy } => {
            if runs.len() != benchmarks.len() {
                bail!("{} runs but {} benchmarks", runs.len(), benchmarks.len());
            }
            let policy = policy.policy()?;
            let mut aggs = Vec::new();
            for (run, bench) in runs.iter().zip(&benchmarks) {
                let (label, results) = run.split_once('=').with_context(|| format!("expected LABEL=RESULTS, got `{run}`"))?;
                aggs.push((label.to_string(), aggregate_results(Path::new(results), bench, &policy)?.1));
            }
            write(&out, &comparison_html(&aggs))?;
        }
        Command::DetectForm { file } => println!("{}", detect_form(&read(&file)?)),
        Command::SynthCorpus { out } => {
            for p in cobperturb::synth::write_synth_corpus(&out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}
