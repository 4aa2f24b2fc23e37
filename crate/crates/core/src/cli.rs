//! Command-line front end: `detect`, `split`, `extract`, `gen`, `report`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser as ClapParser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{covered_by, enumerate_trees, linearize};
use crate::compound::{split_compound, to_tree, Lexicon, SplitConfig};
use crate::detect::{
    emit_construction, CandidateKind, DetectError, DetectionReport, Detector, Summary, Verdict,
};
use crate::grammar::{load_grammar, Grammar};
use crate::parser::{ParseStatus, DEFAULT_CAP};
use crate::phrase::{
    build_compound_lexicon, export_lexicon, filter_candidates, load_phrase_table, ExportFormat,
    PhraseFormat, RejectReason,
};
use crate::text::tokenize;
use crate::tree::is_ident_char;

pub const REPORTS_FILE: &str = "reports.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const GF_LEXICON_FILE: &str = "compounds.gf";
pub const TSV_LEXICON_FILE: &str = "compounds.tsv";
pub const REJECTS_FILE: &str = "rejects.tsv";

/// Configuration and IO failures; all map to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn config(msg: impl ToString) -> CliError {
    CliError::Config(msg.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

#[derive(Debug, ClapParser)]
#[command(name = "mwe", version, about = "Multiword-expression detection and German compound lexicon extraction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flag MWE candidates in a parallel corpus and summarize them.
    Detect(DetectArgs),
    /// Split German compounds given as arguments or on stdin, one per line.
    Split(SplitArgs),
    /// Build a compound lexicon from a phrase table.
    Extract(ExtractArgs),
    /// List well-typed trees up to a depth with their linearizations.
    Gen(GenArgs),
    /// Re-render the summary table from a reports file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    /// Language pair, `X,Y`.
    #[arg(long, default_value = "eng,swe")]
    pub langs: String,
    /// Parallel corpus files of `id<TAB>sentence_x<TAB>sentence_y` lines.
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitOptions {
    /// Lexicon of `lemma<TAB>category` lines.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Comma-separated linking morphemes; an empty item is the bare join.
    #[arg(long, default_value = ",s,en", allow_hyphen_values = true)]
    pub linkers: String,
    #[arg(long, default_value_t = 3)]
    pub min_component: usize,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub options: SplitOptions,
    /// Words to split; read from stdin when absent.
    pub words: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    #[command(flatten)]
    pub split: SplitOptions,
    #[arg(long)]
    pub phrase_table: PathBuf,
    #[arg(long, default_value = "moses", value_parser = parse_phrase_format)]
    pub format: PhraseFormat,
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Which moses score column is the probability.
    #[arg(long, default_value_t = 0)]
    pub score_index: usize,
    #[arg(long)]
    pub require_constituent: bool,
    /// Concrete syntax the English side is parsed with.
    #[arg(long, default_value = "eng")]
    pub source_lang: String,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Languages to linearize in, comma-separated; all by default.
    #[arg(long)]
    pub langs: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A reports file written by `detect`.
    pub reports: PathBuf,
}

fn parse_phrase_format(s: &str) -> Result<PhraseFormat, String> {
    s.parse()
}

fn load_grammar_file(path: &Path) -> Result<Grammar, CliError> {
    let src = read(path)?;
    load_grammar(&src).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn split_langs(langs: &str) -> Vec<String> {
    langs.split(',').map(|l| l.trim().to_string()).collect()
}

impl SplitOptions {
    fn load(&self) -> Result<(Lexicon, SplitConfig), CliError> {
        let (lexicon, issues) = Lexicon::from_path(&self.lexicon).map_err(|e| CliError::io(&self.lexicon, e))?;
        for issue in &issues {
            warn!("{}: {issue}", self.lexicon.display());
        }
        info!("loaded {} lexicon entries", lexicon.len());
        let linkers: Vec<&str> = self.linkers.split(',').map(str::trim).collect();
        let cfg = SplitConfig::new(&linkers, self.min_component).map_err(config)?;
        Ok((lexicon, cfg))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffRecord {
    pub path: Vec<usize>,
    pub x: String,
    pub y: String,
}

/// One line of `reports.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub pair_id: String,
    pub lang_x: String,
    pub lang_y: String,
    pub status_x: ParseStatus,
    pub status_y: ParseStatus,
    pub verdict: Verdict,
    pub kind: Option<CandidateKind>,
    pub diffs: Vec<DiffRecord>,
    pub best_pair: Option<(String, String)>,
    #[serde(default)]
    pub constructions: Vec<String>,
}

fn construction_name(pair_id: &str, k: usize, cat: &str) -> String {
    let id: String = pair_id
        .chars()
        .map(|c| if is_ident_char(c) { c } else { '_' })
        .collect();
    format!("mwe_{id}_{k}_{cat}")
}

fn record(report: &DetectionReport, grammar: &Grammar) -> ReportRecord {
    let (lx, ly) = (&report.outcome_x.language, &report.outcome_y.language);
    let mut constructions = Vec::new();
    if report.candidate_kind == Some(CandidateKind::Predicate) {
        for (k, d) in report.diffs.iter().enumerate() {
            let cat = crate::check::category_of(&d.x, grammar)
                .map_or("X".to_string(), ToString::to_string);
            match emit_construction(d, &construction_name(&report.pair_id, k, &cat), grammar, lx, ly) {
                Ok(sig) => constructions.push(sig),
                Err(e) => warn!("pair {}: no construction for diff {k}: {e}", report.pair_id),
            }
        }
    }
    ReportRecord {
        pair_id: report.pair_id.clone(),
        lang_x: lx.clone(),
        lang_y: ly.clone(),
        status_x: report.outcome_x.status,
        status_y: report.outcome_y.status,
        verdict: report.verdict,
        kind: report.candidate_kind,
        diffs: report
            .diffs
            .iter()
            .map(|d| DiffRecord {
                path: d.path.clone(),
                x: d.x.to_string(),
                y: d.y.to_string(),
            })
            .collect(),
        best_pair: report
            .best_pair
            .as_ref()
            .map(|(x, y)| (x.to_string(), y.to_string())),
        constructions,
    }
}

struct CorpusLine {
    id: String,
    tokens_x: Vec<String>,
    tokens_y: Vec<String>,
}

fn read_corpus(path: &Path) -> Result<Vec<CorpusLine>, CliError> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, x, y] = fields.as_slice() else {
            warn!("{}:{}: expected `id<TAB>sentence_x<TAB>sentence_y`, skipped", path.display(), i + 1);
            continue;
        };
        let (tokens_x, tokens_y) = (tokenize(x), tokenize(y));
        if id.trim().is_empty() || tokens_x.is_empty() || tokens_y.is_empty() {
            warn!("{}:{}: empty id or sentence, skipped", path.display(), i + 1);
            continue;
        }
        out.push(CorpusLine {
            id: id.trim().to_string(),
            tokens_x,
            tokens_y,
        });
    }
    Ok(out)
}

/// Runs detection over the corpora and writes the reports and summary to
/// the output directory. Returns the summary.
pub fn cmd_detect(args: &DetectArgs, out: &mut dyn Write) -> Result<Summary, CliError> {
    let grammar = load_grammar_file(&args.grammar)?;
    let langs = split_langs(&args.langs);
    let [lx, ly] = langs.as_slice() else {
        return Err(config(format!("--langs expects two codes `X,Y`, got `{}`", args.langs)));
    };
    if args.cap == 0 {
        return Err(config("--cap must be positive"));
    }
    let detector = Detector::new(&grammar, lx, ly, args.cap).map_err(|e| match e {
        DetectError::UnknownLanguage(e) => config(e),
        other => config(other),
    })?;
    let mut lines = Vec::new();
    for path in &args.corpus {
        lines.extend(read_corpus(path)?);
    }
    let records: Vec<Option<ReportRecord>> = lines
        .par_iter()
        .map(|l| match detector.detect(&l.id, &l.tokens_x, &l.tokens_y) {
            Ok(r) => Some(record(&r, &grammar)),
            Err(e) => {
                warn!("pair {}: {e}, skipped", l.id);
                None
            }
        })
        .collect();
    let mut jsonl = String::new();
    let mut summary = Summary::default();
    for r in records.into_iter().flatten() {
        summary.add(r.verdict, r.kind);
        jsonl.push_str(&serde_json::to_string(&r).expect("records serialize"));
        jsonl.push('\n');
    }
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    write_file(&args.out_dir.join(REPORTS_FILE), &jsonl)?;
    write_file(&args.out_dir.join(SUMMARY_FILE), &summary.to_string())?;
    write!(out, "{summary}").map_err(stdout_err)?;
    Ok(summary)
}

/// The `split` output line for one word.
pub fn split_line(word: &str, lexicon: &Lexicon, config: &SplitConfig) -> String {
    match split_compound(word, lexicon, config) {
        None => format!("{word}\tNONE"),
        Some(s) => match to_tree(&s) {
            Ok(t) => format!("{word}\t{s}\t{t}"),
            Err(e) => format!("{word}\t{s}\t-\t{e}"),
        },
    }
}

pub fn cmd_split(args: &SplitArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let (lexicon, cfg) = args.options.load()?;
    let words: Vec<String> = if args.words.is_empty() {
        input
            .lines()
            .collect::<io::Result<Vec<_>>>()
            .map_err(|e| CliError::io(Path::new("<stdin>"), e))?
            .into_iter()
            .map(|w| w.trim().to_string())
            .filter(|w| !w.is_empty())
            .collect()
    } else {
        args.words.clone()
    };
    let lines: Vec<String> = words.par_iter().map(|w| split_line(w, &lexicon, &cfg)).collect();
    for l in lines {
        writeln!(out, "{l}").map_err(stdout_err)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractCounts {
    pub loaded: usize,
    pub filtered: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
}

impl ExtractCounts {
    pub fn rejected_total(&self) -> usize {
        self.rejected.values().sum()
    }
}

pub fn cmd_extract(args: &ExtractArgs, out: &mut dyn Write) -> Result<ExtractCounts, CliError> {
    let grammar = load_grammar_file(&args.grammar)?;
    let (lexicon, cfg) = args.split.load()?;
    let table = read(&args.phrase_table)?;
    let (entries, issues) = load_phrase_table(&table, args.format, args.score_index)
        .map_err(|e| config(format!("{}: {e}", args.phrase_table.display())))?;
    for issue in &issues {
        warn!("{}: {issue}", args.phrase_table.display());
    }
    let candidates = filter_candidates(&entries, args.threshold, &grammar, &args.source_lang, args.require_constituent)
        .map_err(config)?;
    let (accepted, rejects) = build_compound_lexicon(&candidates, &lexicon, &cfg, &grammar, &args.source_lang)
        .map_err(config)?;

    let mut counts = ExtractCounts {
        loaded: entries.len(),
        filtered: candidates.len(),
        accepted: accepted.len(),
        rejected: RejectReason::ALL.iter().map(|r| (*r, 0)).collect(),
    };
    let mut rejects_tsv = String::from("line\tenglish\tgerman\tprobability\treason\n");
    for r in &rejects {
        *counts.rejected.entry(r.reason).or_default() += 1;
        rejects_tsv.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.entry.line,
            r.entry.source.join(" "),
            r.entry.target.join(" "),
            r.entry.probability,
            r.reason
        ));
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    write_file(&args.out_dir.join(GF_LEXICON_FILE), &export_lexicon(&accepted, ExportFormat::Gf))?;
    write_file(&args.out_dir.join(TSV_LEXICON_FILE), &export_lexicon(&accepted, ExportFormat::Tsv))?;
    write_file(&args.out_dir.join(REJECTS_FILE), &rejects_tsv)?;

    let mut text = format!(
        "loaded\t{}\nfiltered\t{}\naccepted\t{}\nrejected\t{}\n",
        counts.loaded,
        counts.filtered,
        counts.accepted,
        counts.rejected_total()
    );
    for (reason, n) in &counts.rejected {
        text.push_str(&format!("rejected:{reason}\t{n}\n"));
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(counts)
}

/// Lines `tree<TAB>lang<TAB>surface` for every tree up to `depth` and every
/// requested language covering it; `tree<TAB>-<TAB>` when none does.
pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let grammar = load_grammar_file(&args.grammar)?;
    if args.depth == 0 {
        return Err(config("--depth must be positive"));
    }
    let langs: Vec<String> = match &args.langs {
        Some(l) => split_langs(l),
        None => grammar.languages().map(String::from).collect(),
    };
    if let Some(bad) = langs.iter().find(|l| !grammar.has_language(l)) {
        return Err(config(format!("grammar has no concrete syntax for language `{bad}`")));
    }
    let mut w = io::BufWriter::new(out);
    for tree in enumerate_trees(&grammar, args.depth) {
        let mut any = false;
        for lang in &langs {
            if covered_by(&tree, &grammar, lang) {
                let surface = linearize(&tree, &grammar, lang).expect("covered trees linearize");
                writeln!(w, "{tree}\t{lang}\t{}", surface.join(" ")).map_err(stdout_err)?;
                any = true;
            }
        }
        if !any {
            writeln!(w, "{tree}\t-\t").map_err(stdout_err)?;
        }
    }
    w.flush().map_err(stdout_err)
}

/// Recomputes the summary from a reports file; malformed lines are skipped.
pub fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> Result<Summary, CliError> {
    let text = read(&args.reports)?;
    let mut summary = Summary::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ReportRecord>(line) {
            Ok(r) => summary.add(r.verdict, r.kind),
            Err(e) => warn!("{}:{}: {e}, skipped", args.reports.display(), i + 1),
        }
    }
    write!(out, "{summary}").map_err(stdout_err)?;
    Ok(summary)
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Detect(a) => cmd_detect(a, &mut out).map(drop),
        Command::Split(a) => cmd_split(a, &mut io::stdin().lock(), &mut out),
        Command::Extract(a) => cmd_extract(a, &mut out).map(drop),
        Command::Gen(a) => cmd_gen(a, &mut out),
        Command::Report(a) => cmd_report(a, &mut out).map(drop),
    }
}
