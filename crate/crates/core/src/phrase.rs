//! Phrase-table ingestion, candidate filtering and compound lexicon export.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::compound::{split_compound, to_tree, CompoundSplit, Lexicon, SplitConfig};
use crate::grammar::{Category, Grammar};
use crate::parser::{Parser, UnknownLanguage};
use crate::text::LineIssue;
use crate::tree::{is_ident_char, AbstractTree};

/// Category the English side must parse as.
pub const NOUN_PHRASE: &str = "NP";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhraseEntry {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub probability: f64,
    pub is_constituent: bool,
    pub constituent_label: Option<String>,
    /// 1-based line in the phrase table.
    pub line: usize,
}

impl PhraseEntry {
    /// True when the English side was marked as a noun-phrase constituent
    /// (`NP`, or a functional variant such as `NP-SBJ`).
    pub fn is_np_constituent(&self) -> bool {
        self.is_constituent
            && self
                .constituent_label
                .as_deref()
                .is_some_and(|l| l == "NP" || l.starts_with("NP-"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhraseFormat {
    Moses,
    Tsv,
}

impl FromStr for PhraseFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "moses" => Ok(PhraseFormat::Moses),
            "tsv" => Ok(PhraseFormat::Tsv),
            _ => Err(format!("unknown phrase-table format `{s}` (expected moses or tsv)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhraseTableError {
    #[error("phrase table is empty")]
    Empty,
    #[error("tsv phrase tables have a single score column; score index {0} is out of range")]
    ScoreIndex(usize),
}

fn tokens(field: &str) -> Vec<String> {
    field.split_whitespace().map(String::from).collect()
}

fn probability(field: &str) -> Result<f64, String> {
    let p: f64 = field
        .parse()
        .map_err(|_| format!("score {field:?} is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("score {p} is outside [0, 1]"))
    }
}

fn parse_line(
    line: &str,
    line_no: usize,
    format: PhraseFormat,
    score_index: usize,
) -> Result<PhraseEntry, String> {
    let (source, target, score, label) = match format {
        PhraseFormat::Moses => {
            let fields: Vec<&str> = line.split("|||").map(str::trim).collect();
            if fields.len() < 3 {
                return Err("expected `source ||| target ||| scores`".into());
            }
            let scores: Vec<&str> = fields[2].split_whitespace().collect();
            let score = scores
                .get(score_index)
                .ok_or_else(|| format!("no score at index {score_index}"))?;
            (fields[0], fields[1], *score, None)
        }
        PhraseFormat::Tsv => {
            let fields: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&fields.len()) {
                return Err("expected `source<TAB>target<TAB>p[<TAB>label]`".into());
            }
            let label = fields
                .get(3)
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && *l != "-")
                .map(String::from);
            (fields[0], fields[1], fields[2].trim(), label)
        }
    };
    let source = tokens(source);
    let target = tokens(target);
    if source.is_empty() || target.is_empty() {
        return Err("empty source or target phrase".into());
    }
    Ok(PhraseEntry {
        source,
        target,
        probability: probability(score)?,
        is_constituent: label.is_some(),
        constituent_label: label,
        line: line_no,
    })
}

/// Reads a phrase table. Blank lines are skipped silently; malformed lines
/// are skipped and reported. `score_index` picks the moses score column.
pub fn load_phrase_table(
    source: &str,
    format: PhraseFormat,
    score_index: usize,
) -> Result<(Vec<PhraseEntry>, Vec<LineIssue>), PhraseTableError> {
    if format == PhraseFormat::Tsv && score_index != 0 {
        return Err(PhraseTableError::ScoreIndex(score_index));
    }
    if source.trim().is_empty() {
        return Err(PhraseTableError::Empty);
    }
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line, i + 1, format, score_index) {
            Ok(e) => entries.push(e),
            Err(msg) => issues.push(LineIssue::new(i + 1, msg)),
        }
    }
    Ok((entries, issues))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("threshold {0} is outside [0, 1]")]
    Threshold(String),
    #[error(transparent)]
    Language(#[from] UnknownLanguage),
}

/// Keeps, in order, the entries with probability strictly above
/// `threshold`, a one-word German side, an English side parsing as NP in
/// `lang`, and (if required) an NP constituent mark.
pub fn filter_candidates(
    entries: &[PhraseEntry],
    threshold: f64,
    grammar: &Grammar,
    lang: &str,
    require_constituent: bool,
) -> Result<Vec<PhraseEntry>, FilterError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(FilterError::Threshold(threshold.to_string()));
    }
    let parser = Parser::new(grammar, lang)?;
    let np = Category::new(NOUN_PHRASE);
    let keep: Vec<bool> = entries
        .par_iter()
        .map(|e| {
            e.probability > threshold
                && e.target.len() == 1
                && (!require_constituent || e.is_np_constituent())
                && !parser.parse(&e.source, &np, 1).is_empty()
        })
        .collect();
    Ok(entries
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(e, _)| e.clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompoundLexEntry {
    /// First NP parse of the English side.
    pub english_tree: AbstractTree,
    pub german_tree: AbstractTree,
    pub split: CompoundSplit,
    pub source_entry: PhraseEntry,
    pub probability: f64,
}

impl CompoundLexEntry {
    pub fn english_surface(&self) -> String {
        self.source_entry.source.join(" ")
    }

    pub fn german_word(&self) -> &str {
        &self.source_entry.target[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    NoSplit,
    UnsupportedLinker,
    NoNpParse,
    Duplicate,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] = [
        RejectReason::NoSplit,
        RejectReason::UnsupportedLinker,
        RejectReason::NoNpParse,
        RejectReason::Duplicate,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RejectReason::NoSplit => "no-split",
            RejectReason::UnsupportedLinker => "unsupported-linker",
            RejectReason::NoNpParse => "no-np-parse",
            RejectReason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reject {
    pub entry: PhraseEntry,
    pub reason: RejectReason,
}

/// Splits each candidate's German word, pairs its tree with the English NP
/// tree, and deduplicates on the tree pair keeping the most probable entry.
/// Every candidate ends up either accepted or rejected exactly once.
pub fn build_compound_lexicon(
    candidates: &[PhraseEntry],
    lexicon: &Lexicon,
    config: &SplitConfig,
    grammar: &Grammar,
    lang: &str,
) -> Result<(Vec<CompoundLexEntry>, Vec<Reject>), UnknownLanguage> {
    let parser = Parser::new(grammar, lang)?;
    let np = Category::new(NOUN_PHRASE);
    let built: Vec<Result<CompoundLexEntry, RejectReason>> = candidates
        .par_iter()
        .map(|e| {
            let word = e.target.first().ok_or(RejectReason::NoSplit)?;
            let split = split_compound(word, lexicon, config).ok_or(RejectReason::NoSplit)?;
            let german_tree = to_tree(&split).map_err(|_| RejectReason::UnsupportedLinker)?;
            let english_tree = parser
                .parse(&e.source, &np, 1)
                .into_iter()
                .next()
                .ok_or(RejectReason::NoNpParse)?;
            Ok(CompoundLexEntry {
                english_tree,
                german_tree,
                split,
                source_entry: e.clone(),
                probability: e.probability,
            })
        })
        .collect();

    let mut accepted: Vec<CompoundLexEntry> = Vec::new();
    let mut slot: HashMap<(AbstractTree, AbstractTree), usize> = HashMap::new();
    // (candidate index, reject) so rejects come out in input order
    let mut rejects: Vec<(usize, Reject)> = Vec::new();
    let mut accepted_from: Vec<usize> = Vec::new();
    for (i, (result, entry)) in built.into_iter().zip(candidates).enumerate() {
        match result {
            Err(reason) => rejects.push((
                i,
                Reject {
                    entry: entry.clone(),
                    reason,
                },
            )),
            Ok(lex) => {
                let key = (lex.english_tree.clone(), lex.german_tree.clone());
                match slot.get(&key) {
                    None => {
                        slot.insert(key, accepted.len());
                        accepted.push(lex);
                        accepted_from.push(i);
                    }
                    Some(&k) => {
                        let (loser, loser_index) = if lex.probability > accepted[k].probability {
                            let old = std::mem::replace(&mut accepted[k], lex);
                            let old_index = std::mem::replace(&mut accepted_from[k], i);
                            (old.source_entry, old_index)
                        } else {
                            (lex.source_entry, i)
                        };
                        rejects.push((
                            loser_index,
                            Reject {
                                entry: loser,
                                reason: RejectReason::Duplicate,
                            },
                        ));
                    }
                }
            }
        }
    }
    rejects.sort_by_key(|(i, _)| *i);
    Ok((accepted, rejects.into_iter().map(|(_, r)| r).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Gf,
    Tsv,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gf" => Ok(ExportFormat::Gf),
            "tsv" => Ok(ExportFormat::Tsv),
            _ => Err(format!("unknown lexicon format `{s}` (expected gf or tsv)")),
        }
    }
}

pub const TSV_HEADER: &str = "english\tgerman\ttree\tprobability";
pub const GF_HEADER: &str = "-- German compound lexicon: lin <id> = <tree> ; -- <english>";

fn base_id(word: &str) -> String {
    let mut id: String = word
        .chars()
        .map(|c| if is_ident_char(c) { c } else { '_' })
        .collect();
    if !id.starts_with(|c: char| c.is_alphabetic()) {
        id.insert(0, 'w');
    }
    id.push_str("_CN");
    id
}

/// Renders entries in input order after a one-line header.
pub fn export_lexicon(entries: &[CompoundLexEntry], format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::Tsv => {
            out.push_str(TSV_HEADER);
            out.push('\n');
            for e in entries {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    e.english_surface(),
                    e.german_word(),
                    e.german_tree,
                    e.probability
                ));
            }
        }
        ExportFormat::Gf => {
            out.push_str(GF_HEADER);
            out.push('\n');
            let mut seen: HashMap<String, usize> = HashMap::new();
            for e in entries {
                let base = base_id(e.german_word());
                let n = seen.entry(base.clone()).or_insert(0);
                *n += 1;
                let id = if *n == 1 { base } else { format!("{base}_{n}") };
                out.push_str(&format!(
                    "lin {id} = {} ; -- {}\n",
                    e.german_tree,
                    e.english_surface()
                ));
            }
        }
    }
    out
}
