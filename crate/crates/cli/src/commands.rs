//! The `idiom-forge` subcommands: the offline `extract` and `train` passes,
//! the online `query`, and the `eval` harness.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use idiom_forge_core::align::{
    ingest_clickthrough, load_model, save_model, train_em, Model, DEFAULT_FILTER,
};
use idiom_forge_core::extract::{
    build_index, load_index, save_index, CorpusFile, NameModel, ScsIndex,
};
use idiom_forge_core::rank::DEFAULT_TOP_K;
use idiom_forge_core::registry::{ApiRef, Registry};
use idiom_forge_core::synth::{synthesize, NameOrigin, Snippet, SynthOptions, DEFAULT_DEPTH};

use crate::eval::{average, average_frank, grade_metrics, CaseMetrics, EvalCase};

#[derive(Debug, Parser)]
#[command(
    name = "idiom-forge",
    version,
    about = "Answer programming queries with synthesized, idiomatic snippets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine the call-sequence index and variable-name model from a corpus
    Extract(ExtractArgs),
    /// Train the query-to-API translation model from clickthrough data
    Train(TrainArgs),
    /// Synthesize ranked snippets for a natural-language query
    Query(QueryArgs),
    /// Score queries against an answer key and print a metrics report
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of .mini corpus files (searched recursively)
    #[arg(long)]
    pub corpus: PathBuf,
    /// Registry JSON file
    #[arg(long)]
    pub registry: PathBuf,
    /// Output directory for scs-index.jsonl and names.jsonl
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Clickthrough log: one `query<TAB>doc_id` per line
    #[arg(long)]
    pub clicks: PathBuf,
    /// Directory of documents named `<doc_id>.md`
    #[arg(long)]
    pub docs: PathBuf,
    /// Registry JSON file
    #[arg(long)]
    pub registry: PathBuf,
    /// EM iterations
    #[arg(long, default_value_t = 30)]
    pub iters: usize,
    /// Output model file
    #[arg(long)]
    pub out: PathBuf,
    /// Additive smoothing applied at each re-normalization
    #[arg(long, default_value_t = 0.0)]
    pub smoothing: f64,
    /// Comma-separated query tokens to drop during tokenization
    #[arg(long, default_value = DEFAULT_FILTER[0])]
    pub filter: String,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Trained model file
    #[arg(long)]
    pub model: PathBuf,
    /// Directory holding the extracted index files
    #[arg(long)]
    pub index: PathBuf,
    /// Registry JSON file
    #[arg(long)]
    pub registry: PathBuf,
    /// The query text
    #[arg(long)]
    pub text: String,
    /// Snippets to produce
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Recursive object-construction depth
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    /// Posterior entries kept in the query vector
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    /// Render boolean conditions idiomatically instead of `== false`
    #[arg(long)]
    pub idiomatic_bool: bool,
    /// Also write a machine-readable result file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// JSON file of evaluation cases
    #[arg(long)]
    pub cases: PathBuf,
    /// Trained model file
    #[arg(long)]
    pub model: PathBuf,
    /// Directory holding the extracted index files
    #[arg(long)]
    pub index: PathBuf,
    /// Registry JSON file
    #[arg(long)]
    pub registry: PathBuf,
    /// Snippets to grade per query
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Recursive object-construction depth
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Train(args) => cmd_train(args),
        Command::Query(args) => cmd_query(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

fn load_registry(path: &Path) -> Result<Registry> {
    Registry::load(path).with_context(|| format!("cannot load registry {}", path.display()))
}

fn read_corpus(dir: &Path) -> Result<Vec<CorpusFile>> {
    if !dir.is_dir() {
        bail!("corpus directory {} does not exist", dir.display());
    }
    let mut paths: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "mini"))
        .collect();
    paths.sort();
    let mut files = Vec::with_capacity(paths.len());
    for path in paths {
        let source = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let name = path
            .strip_prefix(dir)
            .unwrap_or(&path)
            .to_string_lossy()
            .into_owned();
        files.push(CorpusFile { name, source });
    }
    Ok(files)
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let reg = load_registry(&args.registry)?;
    let files = read_corpus(&args.corpus)?;
    if files.is_empty() {
        eprintln!("warning: no .mini files under {}", args.corpus.display());
    }
    let (index, names, report) = build_index(&files, &reg);
    for (file, err) in &report.parse_failures {
        eprintln!("skip {file}: {err}");
    }
    save_index(&index, &names, &args.out)
        .with_context(|| format!("cannot write index to {}", args.out.display()))?;
    eprintln!(
        "extract: {} files ({} parsed, {} skipped), {} methods, {} lifetimes, {} groups",
        report.files_total,
        report.files_parsed,
        report.parse_failures.len(),
        report.methods_visited,
        report.lifetimes_extracted,
        index.len()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let reg = load_registry(&args.registry)?;
    let clicks = std::fs::read_to_string(&args.clicks)
        .with_context(|| format!("cannot read click log {}", args.clicks.display()))?;
    if !args.docs.is_dir() {
        bail!("docs directory {} does not exist", args.docs.display());
    }
    let mut docs: HashMap<String, String> = HashMap::new();
    for entry in walkdir::WalkDir::new(&args.docs)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
    {
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "md") {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            docs.insert(id, std::fs::read_to_string(path)?);
        }
    }

    let filter: Vec<String> = if args.filter.trim().is_empty() {
        Vec::new()
    } else {
        args.filter
            .split(',')
            .map(|t| t.trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect()
    };

    let ingested = ingest_clickthrough(&clicks, &docs, &reg, &filter);
    eprintln!(
        "train: {} click lines ({} malformed, {} missing docs, {} dropped), {} pairs",
        ingested.lines_total,
        ingested.lines_malformed,
        ingested.docs_missing,
        ingested.pairs_dropped,
        ingested.pairs.len()
    );
    if ingested.pairs.is_empty() {
        bail!("no usable (query, document) pairs; cannot train");
    }
    let outcome = train_em(&ingested.pairs, args.iters, &reg, args.smoothing)?;
    eprintln!(
        "train: {} EM iterations, log-likelihood {:.6} -> {:.6}",
        outcome.iterations_run,
        outcome.log_likelihoods.first().copied().unwrap_or(f64::NAN),
        outcome.log_likelihoods.last().copied().unwrap_or(f64::NAN),
    );
    let model = Model {
        table: outcome.table,
        stats: ingested.stats,
        filter,
    };
    save_model(&model, &args.out)
        .with_context(|| format!("cannot write model to {}", args.out.display()))?;
    Ok(())
}

struct Artifacts {
    reg: Registry,
    model: Model,
    index: ScsIndex,
    names: NameModel,
}

fn load_artifacts(registry: &Path, model: &Path, index_dir: &Path) -> Result<Artifacts> {
    let reg = load_registry(registry)?;
    let model = load_model(model).with_context(|| {
        format!(
            "cannot load model {} (run `idiom-forge train` first)",
            model.display()
        )
    })?;
    let (index, names) = load_index(index_dir, &reg).with_context(|| {
        format!(
            "cannot load index from {} (run `idiom-forge extract` first)",
            index_dir.display()
        )
    })?;
    Ok(Artifacts {
        reg,
        model,
        index,
        names,
    })
}

#[derive(Serialize)]
struct ResultRecord {
    rank: usize,
    score: f64,
    root_type: String,
    canonical: String,
    snippet: String,
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let artifacts = load_artifacts(&args.registry, &args.model, &args.index)?;
    let options = SynthOptions {
        top_k: args.top_k,
        depth: args.depth,
        idiomatic_bool: args.idiomatic_bool,
    };
    let outcome = synthesize(
        &args.text,
        &artifacts.model,
        &artifacts.index,
        &artifacts.names,
        &artifacts.reg,
        &options,
        args.top,
    )?;
    for diag in &outcome.diagnostics {
        eprintln!("note: {diag}");
    }
    if outcome.snippets.is_empty() {
        eprintln!("no snippets produced for {:?}", args.text);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (i, snippet) in outcome.snippets.iter().enumerate() {
        writeln!(
            out,
            "-- {} -- score {:.4} -- {} --------------------------------",
            i + 1,
            snippet.score,
            snippet.root_type
        )?;
        write!(out, "{}", snippet.text)?;
        writeln!(out)?;
    }
    if let Some(path) = &args.out {
        let records: Vec<ResultRecord> = outcome
            .snippets
            .iter()
            .enumerate()
            .map(|(i, s)| ResultRecord {
                rank: i + 1,
                score: s.score,
                root_type: s.root_type.clone(),
                canonical: s.root_canon.clone(),
                snippet: s.text.clone(),
            })
            .collect();
        std::fs::write(path, serde_json::to_string_pretty(&records)?)
            .with_context(|| format!("cannot write results to {}", path.display()))?;
    }
    Ok(())
}

/// Resolves the answer key's canonical member names against the registry.
fn resolve_answer_key(reg: &Registry, names: &[String]) -> Result<Vec<ApiRef>> {
    let mut apis = Vec::new();
    for name in names {
        let api = reg
            .api_vocab()
            .iter()
            .find(|a| a.canonical() == *name)
            .with_context(|| format!("answer key names unknown member `{name}`"))?;
        apis.push(api.clone());
    }
    Ok(apis)
}

fn snippet_is_relevant(snippet: &Snippet, key: &[ApiRef]) -> bool {
    snippet
        .root_scs
        .actions()
        .iter()
        .any(|api| key.contains(api))
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let artifacts = load_artifacts(&args.registry, &args.model, &args.index)?;
    let cases_text = std::fs::read_to_string(&args.cases)
        .with_context(|| format!("cannot read cases file {}", args.cases.display()))?;
    let cases: Vec<EvalCase> = serde_json::from_str(&cases_text)
        .with_context(|| format!("malformed cases file {}", args.cases.display()))?;
    let options = SynthOptions {
        depth: args.depth,
        ..SynthOptions::default()
    };

    println!("# Relevance is mechanical: a snippet counts as relevant when its call");
    println!("# sequence shares at least one API with the case's answer key. This is");
    println!("# a proxy for human grading and measures something weaker.");
    println!();
    println!(
        "{:<34} {:>5} {:>6} {:>7} {:>8} {:>9} {:>11}",
        "query", "FRank", "%Top5", "%Top10", "names", "fallback", "s/snippet"
    );

    let mut all_metrics: Vec<CaseMetrics> = Vec::new();
    let mut per_snippet_times: Vec<f64> = Vec::new();
    for case in &cases {
        let key = resolve_answer_key(&artifacts.reg, &case.relevant_apis)?;
        let started = Instant::now();
        let outcome = synthesize(
            &case.query,
            &artifacts.model,
            &artifacts.index,
            &artifacts.names,
            &artifacts.reg,
            &options,
            args.top,
        )?;
        let elapsed = started.elapsed().as_secs_f64();
        let graded: Vec<bool> = outcome
            .snippets
            .iter()
            .map(|s| snippet_is_relevant(s, &key))
            .collect();
        let metrics = grade_metrics(&graded);
        let mined: usize = outcome
            .snippets
            .iter()
            .flat_map(|s| &s.bound_names)
            .filter(|b| b.origin != NameOrigin::Fallback)
            .count();
        let fallback: usize = outcome
            .snippets
            .iter()
            .flat_map(|s| &s.bound_names)
            .filter(|b| b.origin == NameOrigin::Fallback)
            .count();
        let per_snippet = if outcome.snippets.is_empty() {
            0.0
        } else {
            elapsed / outcome.snippets.len() as f64
        };
        per_snippet_times.push(per_snippet);
        println!(
            "{:<34} {:>5} {:>6.1} {:>7.1} {:>8} {:>9} {:>11.4}",
            case.query,
            metrics
                .frank
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into()),
            metrics.top5_pct,
            metrics.top10_pct,
            mined,
            fallback,
            per_snippet
        );
        all_metrics.push(metrics);
    }

    let frank_avg = average_frank(&all_metrics)
        .map(|v| format!("{v:.1}"))
        .unwrap_or_else(|| "-".into());
    println!(
        "{:<34} {:>5} {:>6.1} {:>7.1} {:>8} {:>9} {:>11.4}",
        "average",
        frank_avg,
        average(all_metrics.iter().map(|m| m.top5_pct)),
        average(all_metrics.iter().map(|m| m.top10_pct)),
        "",
        "",
        average(per_snippet_times.iter().copied())
    );
    Ok(())
}
