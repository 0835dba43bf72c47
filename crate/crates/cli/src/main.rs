//! `nframes`: batch front end for the narrative frame pipeline.
//!
//! Exit codes: 0 success, 1 domain error (other inputs still processed),
//! 2 usage error. Data goes to stdout, diagnostics to stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use narrative_frames::analytics::{
    agreement_csv, agreement_text, cohens_kappa, compare_corpora, comparison_csv, comparison_text, distribution_csv,
    distribution_text, stored_distribution, CodingDecision, CountingMode,
};
use narrative_frames::annotate::AnnotatorConfig;
use narrative_frames::statement::code_batch;
use narrative_frames::store::{Decision, Document, Store};
use narrative_frames::taxonomy::Taxonomy;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "nframes", version, about = "Narrative frame annotation and corpus analytics")]
struct Cli {
    /// Frame registry (JSON); defaults to the bundled registry.
    #[arg(long, global = true, value_name = "PATH")]
    registry: Option<PathBuf>,
    /// Annotator config (JSON): literal_topics, blend_window_sentences, min_score.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Store directory.
    #[arg(long, global = true, env = "NFRAMES_STORE", default_value = "nframes-store")]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Registry operations.
    Taxonomy {
        #[command(subcommand)]
        action: TaxonomyAction,
    },
    /// Code "X is Y" statements, one per line, to frames.
    CodeStatements {
        /// Input file; stdin when omitted or "-".
        input: Option<PathBuf>,
    },
    /// Add documents to a corpus: JSONL {doc_id, text, metadata} or a directory of .txt files.
    Ingest {
        input: PathBuf,
        /// Corpus id; otherwise taken from the documents' corpus_id metadata.
        #[arg(long)]
        corpus: Option<String>,
    },
    /// Annotate documents that have no assignments yet.
    Analyze {
        /// Corpus to analyze; all corpora when omitted.
        #[arg(long)]
        corpus: Option<String>,
        #[command(flatten)]
        at: Timestamp,
    },
    /// Frame distribution and absent frames of a corpus.
    Report {
        #[arg(long)]
        corpus: String,
        #[command(flatten)]
        counting: Counting,
    },
    /// Log-odds comparison of two corpora.
    Compare {
        a: String,
        b: String,
        #[command(flatten)]
        counting: Counting,
    },
    /// Map study-specific labels onto frames; prints the crosswalk when no label is given.
    Crosswalk { labels: Vec<String> },
    /// Cohen's kappa between two JSONL files of {item_id, label}.
    Kappa { a: PathBuf, b: PathBuf },
    /// Record a review decision on an assignment.
    Decide {
        assignment_id: String,
        #[arg(value_enum)]
        decision: DecisionArg,
        /// Target frame for reassign.
        #[arg(long)]
        frame: Option<String>,
        #[arg(long)]
        annotator: String,
        #[command(flatten)]
        at: Timestamp,
    },
    /// Write a corpus archive (tar.gz).
    Export {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a corpus archive.
    Import {
        archive: PathBuf,
        #[arg(long)]
        corpus: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static assets (the review UI).
        #[arg(long, value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum TaxonomyAction {
    /// Load and validate a registry.
    Validate { path: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecisionArg {
    Accept,
    Reject,
    Reassign,
}

#[derive(Debug, Args)]
struct Counting {
    /// Count reviewed decisions only.
    #[arg(long)]
    accepted_only: bool,
}

impl Counting {
    fn mode(&self) -> CountingMode {
        if self.accepted_only {
            CountingMode::AcceptedOnly
        } else {
            CountingMode::IncludeSuggested
        }
    }
}

#[derive(Debug, Args)]
struct Timestamp {
    /// Decision timestamp (RFC 3339); defaults to now.
    #[arg(long, value_name = "RFC3339")]
    at: Option<DateTime<Utc>>,
}

impl Timestamp {
    fn get(&self) -> DateTime<Utc> {
        self.at.unwrap_or_else(Utc::now)
    }
}

/// Collects per-item diagnostics; any of them makes the exit code 1.
#[derive(Default)]
struct Diagnostics {
    count: usize,
}

impl Diagnostics {
    fn report(&mut self, message: impl std::fmt::Display) {
        eprintln!("{message}");
        self.count += 1;
    }

    fn exit_code(&self) -> ExitCode {
        if self.count == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_taxonomy(path: Option<&Path>) -> Result<Taxonomy> {
    match path {
        None => Ok(Taxonomy::bundled().clone()),
        Some(p) => {
            let source = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Taxonomy::load(&source).with_context(|| format!("loading {}", p.display()))?)
        }
    }
}

fn load_config(path: Option<&Path>, taxonomy: &Taxonomy) -> Result<AnnotatorConfig> {
    match path {
        None => Ok(AnnotatorConfig::default()),
        Some(p) => {
            let source = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(AnnotatorConfig::from_json(&source, taxonomy).with_context(|| format!("loading {}", p.display()))?)
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
    }
}

fn read_stdin() -> Result<String> {
    let mut buf = String::new();
    io::stdin().read_to_string(&mut buf).context("reading stdin")?;
    Ok(buf)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let taxonomy = load_taxonomy(cli.registry.as_deref())?;
    let format = cli.format;
    let mut diag = Diagnostics::default();
    match cli.command {
        Command::Taxonomy {
            action: TaxonomyAction::Validate { path },
        } => {
            let t = match path {
                Some(p) => load_taxonomy(Some(&p))?,
                None => taxonomy,
            };
            let summary = format!(
                "{} frames ({} top-level, {} nested)",
                t.frames().len(),
                t.top_level_count(),
                t.nested_count()
            );
            match format {
                Format::Json => print_json(&serde_json::json!({
                    "version": t.version(),
                    "frames": t.frames().len(),
                    "top_level": t.top_level_count(),
                    "nested": t.nested_count(),
                    "summary": summary,
                }))?,
                _ => println!("{summary}"),
            }
        }
        Command::CodeStatements { input } => {
            let text = read_input(input.as_deref())?;
            let mut out = io::stdout().lock();
            let mut csv_out = (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
            if let Some(w) = csv_out.as_mut() {
                w.write_record(["raw", "topic", "vehicle", "frame", "alternates", "rationale"])?;
            }
            for (line, result) in code_batch(&text, &taxonomy) {
                match result {
                    Ok(record) => match format {
                        Format::Json => writeln!(out, "{}", serde_json::to_string(&record)?)?,
                        Format::Text => writeln!(out, "{}\t{}", record.frame, record.raw)?,
                        Format::Csv => csv_out.as_mut().expect("csv writer").write_record([
                            record.raw.as_str(),
                            &record.topic,
                            &record.vehicle,
                            &record.frame,
                            &record.alternates.join(";"),
                            record.rationale.as_str(),
                        ])?,
                    },
                    Err(e) => diag.report(format_args!("line {line}: {e}")),
                }
            }
            if let Some(w) = csv_out {
                out.write_all(&w.into_inner()?)?;
            }
        }
        Command::Ingest { input, corpus } => {
            let store = Store::open(&cli.store)?;
            let docs = read_documents(&input, &mut diag)?;
            let corpus_id = match corpus {
                Some(c) => c,
                None => corpus_from_metadata(&docs)?,
            };
            let mut seen = std::collections::HashSet::new();
            let docs: Vec<Document> = docs
                .into_iter()
                .filter(|d| {
                    let fresh = store.document(&d.doc_id).is_err() && seen.insert(d.doc_id.clone());
                    if !fresh {
                        diag.report(format_args!("{}: document already exists; skipped", d.doc_id));
                    }
                    fresh
                })
                .collect();
            let count = store.ingest(&corpus_id, taxonomy.version(), docs)?;
            match format {
                Format::Json => print_json(&serde_json::json!({"corpus_id": corpus_id, "documents": count}))?,
                _ => println!("{corpus_id}: {count} documents ingested"),
            }
        }
        Command::Analyze { corpus, at } => {
            let config = load_config(cli.config.as_deref(), &taxonomy)?;
            let store = Store::open(&cli.store)?;
            let corpora = match corpus {
                Some(c) => vec![c],
                None => store.corpus_ids(),
            };
            let mut summaries = Vec::new();
            for c in corpora {
                summaries.push(store.analyze(&c, &taxonomy, &config, at.get())?);
            }
            match format {
                Format::Json => print_json(&summaries)?,
                _ => {
                    for s in summaries {
                        println!(
                            "{}: {} documents analyzed, {} assignments",
                            s.corpus_id, s.documents_analyzed, s.assignments_added
                        );
                    }
                }
            }
        }
        Command::Report { corpus, counting } => {
            let store = Store::open(&cli.store)?;
            let d = stored_distribution(&store, &corpus, &taxonomy, counting.mode())?;
            match format {
                Format::Json => print_json(&d)?,
                Format::Text => print!("{}", distribution_text(&d)),
                Format::Csv => print!("{}", distribution_csv(&d)),
            }
        }
        Command::Compare { a, b, counting } => {
            let store = Store::open(&cli.store)?;
            let da = stored_distribution(&store, &a, &taxonomy, counting.mode())?;
            let db = stored_distribution(&store, &b, &taxonomy, counting.mode())?;
            let r = compare_corpora(&da, &db)?;
            match format {
                Format::Json => print_json(&r)?,
                Format::Text => print!("{}", comparison_text(&r)),
                Format::Csv => print!("{}", comparison_csv(&r)),
            }
        }
        Command::Crosswalk { labels } => {
            let mappings: Vec<_> = if labels.is_empty() {
                taxonomy
                    .crosswalk()
                    .iter()
                    .filter_map(|e| taxonomy.normalize_label(&e.label).ok())
                    .collect()
            } else {
                labels
                    .iter()
                    .filter_map(|l| taxonomy.normalize_label(l).map_err(|e| diag.report(e)).ok())
                    .collect()
            };
            match format {
                Format::Json => print_json(&mappings)?,
                Format::Text => {
                    for m in &mappings {
                        let flag = if m.provisional { " (provisional)" } else { "" };
                        println!("{} -> {}{flag}", m.label, m.frame);
                    }
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout().lock());
                    w.write_record(["label", "frame", "provisional", "source_note"])?;
                    for m in &mappings {
                        w.write_record([m.label.as_str(), &m.frame, &m.provisional.to_string(), &m.source_note])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Kappa { a, b } => {
            let da = read_decisions(&a, &mut diag)?;
            let db = read_decisions(&b, &mut diag)?;
            let name = |p: &Path| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            let r = cohens_kappa(&name(&a), &da, &name(&b), &db)?;
            match format {
                Format::Json => print_json(&r)?,
                Format::Text => print!("{}", agreement_text(&r)),
                Format::Csv => print!("{}", agreement_csv(&r)),
            }
        }
        Command::Decide {
            assignment_id,
            decision,
            frame,
            annotator,
            at,
        } => {
            let decision = match (decision, frame) {
                (DecisionArg::Accept, _) => Decision::Accept,
                (DecisionArg::Reject, _) => Decision::Reject,
                (DecisionArg::Reassign, Some(f)) => Decision::Reassign(f),
                (DecisionArg::Reassign, None) => bail!("reassign requires --frame"),
            };
            let store = Store::open(&cli.store)?;
            let record = store.record_decision(&assignment_id, &decision, &annotator, &taxonomy, None, at.get())?;
            match format {
                Format::Json => print_json(&record)?,
                _ => println!("{} {}", record.assignment_id, record.assignment.status.as_str()),
            }
        }
        Command::Export { corpus, out } => {
            let store = Store::open(&cli.store)?;
            let bytes = store.export_corpus(&corpus)?;
            fs::write(&out, bytes).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Import { archive, corpus } => {
            let store = Store::open(&cli.store)?;
            let bytes = fs::read(&archive).with_context(|| format!("reading {}", archive.display()))?;
            let outcome = store.import_corpus(&bytes, &taxonomy, corpus.as_deref())?;
            for w in &outcome.warnings {
                eprintln!("warning: {w:?}");
            }
            match format {
                Format::Json => print_json(&outcome)?,
                _ => println!(
                    "{}: {} documents, {} assignments imported",
                    outcome.corpus_id, outcome.documents, outcome.assignments
                ),
            }
        }
        Command::Serve { port, host, static_dir } => {
            let config = load_config(cli.config.as_deref(), &taxonomy)?;
            let store = Arc::new(Store::open(&cli.store)?);
            let state = narrative_frames_service::AppState::new(store, Arc::new(taxonomy), config);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port))
                    .await
                    .with_context(|| format!("binding {host}:{port}"))?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                narrative_frames_service::serve(listener, state, static_dir).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(diag.exit_code())
}

/// Documents from a JSONL file (or "-") or a directory of `.txt` files.
fn read_documents(input: &Path, diag: &mut Diagnostics) -> Result<Vec<Document>> {
    if input.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(input)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        let mut docs = Vec::with_capacity(paths.len());
        for p in paths {
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            match fs::read_to_string(&p) {
                Ok(text) => docs.push(Document::new(id, &text)),
                Err(e) => diag.report(format_args!("{}: {e}", p.display())),
            }
        }
        return Ok(docs);
    }
    let text = read_input(Some(input))?;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Document>(line) {
            Ok(d) if d.doc_id.is_empty() => diag.report(format_args!("line {}: empty doc_id", i + 1)),
            Ok(d) => docs.push(d),
            Err(e) => diag.report(format_args!("line {}: {e}", i + 1)),
        }
    }
    Ok(docs)
}

fn corpus_from_metadata(docs: &[Document]) -> Result<String> {
    let mut ids = docs.iter().filter_map(|d| d.corpus_id());
    let Some(first) = ids.next() else {
        bail!("no --corpus given and the documents carry no corpus_id metadata");
    };
    if ids.any(|id| id != first) {
        bail!("documents name several corpora; pass --corpus");
    }
    Ok(first.to_string())
}

fn read_decisions(path: &Path, diag: &mut Diagnostics) -> Result<Vec<CodingDecision>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(d) => out.push(d),
            Err(e) => diag.report(format_args!("{} line {}: {e}", path.display(), i + 1)),
        }
    }
    Ok(out)
}
