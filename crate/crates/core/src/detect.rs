//! Parse-and-compare detection of multiword-expression candidates.
//!
//! Both sentences of a parallel pair are parsed into the shared abstract
//! syntax. If no tree is common to the two forests, the pair is a candidate;
//! the closest pair of trees is then diffed to localize the subtrees that
//! differ, and the candidate is bucketed as a suspected false positive, a
//! lexical MWE, or a predicate-level construction.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{category_of, linearize, validate_tree, IllTyped, LinearizeError};
use crate::grammar::Grammar;
use crate::parser::{project_chunks, ParseOutcome, ParseStatus, Parser, UnknownLanguage};
use crate::tree::{AbstractTree, TreePath};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    pub lang_x: String,
    pub lang_y: String,
    pub tokens_x: Vec<String>,
    pub tokens_y: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NotCandidate,
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateKind {
    FalsePositiveSuspect,
    LexicalMWE,
    Predicate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A maximal position at which two trees disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDiff {
    pub path: TreePath,
    pub x: AbstractTree,
    pub y: AbstractTree,
}

impl TreeDiff {
    pub fn size(&self) -> usize {
        self.x.size() + self.y.size()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionReport {
    pub pair_id: String,
    pub outcome_x: ParseOutcome,
    pub outcome_y: ParseOutcome,
    pub verdict: Verdict,
    pub candidate_kind: Option<CandidateKind>,
    pub diffs: Vec<TreeDiff>,
    pub best_pair: Option<(AbstractTree, AbstractTree)>,
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error(transparent)]
    UnknownLanguage(#[from] UnknownLanguage),
    #[error("pair `{0}` has the same language on both sides")]
    SameLanguage(String),
    #[error(transparent)]
    Linearize(#[from] LinearizeError),
}

/// Reusable parsers for one language pair.
pub struct Detector<'g> {
    grammar: &'g Grammar,
    parser_x: Parser<'g>,
    parser_y: Parser<'g>,
    cap: usize,
}

impl<'g> Detector<'g> {
    pub fn new(
        grammar: &'g Grammar,
        lang_x: &str,
        lang_y: &str,
        cap: usize,
    ) -> Result<Self, DetectError> {
        if lang_x == lang_y {
            return Err(DetectError::SameLanguage(format!("{lang_x}/{lang_y}")));
        }
        Ok(Detector {
            grammar,
            parser_x: Parser::new(grammar, lang_x)?,
            parser_y: Parser::new(grammar, lang_y)?,
            cap,
        })
    }

    pub fn detect(
        &self,
        id: &str,
        tokens_x: &[String],
        tokens_y: &[String],
    ) -> Result<DetectionReport, DetectError> {
        let outcome_x = self.parser_x.chunk_parse(tokens_x, self.cap);
        let outcome_y = self.parser_y.chunk_parse(tokens_y, self.cap);
        compare_outcomes(id, outcome_x, outcome_y, self.grammar)
    }
}

pub fn detect_pair(
    pair: &SentencePair,
    grammar: &Grammar,
    cap: usize,
) -> Result<DetectionReport, DetectError> {
    Detector::new(grammar, &pair.lang_x, &pair.lang_y, cap)?.detect(
        &pair.id,
        &pair.tokens_x,
        &pair.tokens_y,
    )
}

fn comparison_set(
    outcome: &ParseOutcome,
    other: &ParseOutcome,
    grammar: &Grammar,
) -> Result<Vec<AbstractTree>, LinearizeError> {
    match outcome.status {
        ParseStatus::Failed => Ok(Vec::new()),
        ParseStatus::Chunked => Ok(outcome.chunk_tree.iter().cloned().collect()),
        ParseStatus::Full => {
            let mut set: BTreeSet<AbstractTree> = outcome.forest.iter().cloned().collect();
            if other.status == ParseStatus::Chunked {
                for t in &outcome.forest {
                    set.insert(project_chunks(t, grammar, &outcome.language)?);
                }
            }
            Ok(set.into_iter().collect())
        }
    }
}

fn compare_outcomes(
    id: &str,
    outcome_x: ParseOutcome,
    outcome_y: ParseOutcome,
    grammar: &Grammar,
) -> Result<DetectionReport, DetectError> {
    let set_x = comparison_set(&outcome_x, &outcome_y, grammar)?;
    let set_y = comparison_set(&outcome_y, &outcome_x, grammar)?;
    let shared = forest_intersect(&set_x, &set_y);
    let mut report = DetectionReport {
        pair_id: id.to_string(),
        outcome_x,
        outcome_y,
        verdict: Verdict::NotCandidate,
        candidate_kind: None,
        diffs: Vec::new(),
        best_pair: None,
    };
    if let Some(t) = shared.first() {
        report.best_pair = Some((t.clone(), t.clone()));
        return Ok(report);
    }
    report.verdict = Verdict::Candidate;
    if let Ok((x, y, diffs)) = best_pair(&set_x, &set_y) {
        report.best_pair = Some((x, y));
        report.diffs = diffs;
    }
    report.candidate_kind = classify_candidate(&report).ok();
    Ok(report)
}

/// Trees present in both forests, in tree order.
pub fn forest_intersect(a: &[AbstractTree], b: &[AbstractTree]) -> Vec<AbstractTree> {
    let b: BTreeSet<&AbstractTree> = b.iter().collect();
    let out: BTreeSet<&AbstractTree> = a.iter().filter(|t| b.contains(t)).collect();
    out.into_iter().cloned().collect()
}

/// Maximal mismatching positions between two trees.
pub fn tree_diff(x: &AbstractTree, y: &AbstractTree) -> Vec<TreeDiff> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    diff_at(x, y, &mut path, &mut out);
    out
}

fn diff_at(x: &AbstractTree, y: &AbstractTree, path: &mut TreePath, out: &mut Vec<TreeDiff>) {
    if x == y {
        return;
    }
    let same_head = x.is_token() == y.is_token()
        && x.fun() == y.fun()
        && x.args().len() == y.args().len()
        && !x.args().is_empty();
    if !same_head {
        out.push(TreeDiff {
            path: path.clone(),
            x: x.clone(),
            y: y.clone(),
        });
        return;
    }
    for (i, (cx, cy)) in x.args().iter().zip(y.args()).enumerate() {
        path.push(i);
        diff_at(cx, cy, path, out);
        path.pop();
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot pick a best pair from an empty forest")]
pub struct EmptyForest;

/// The pair of trees whose diffs cover the fewest nodes; ties go to the
/// smallest `(x, y)` in tree order.
pub fn best_pair(
    fx: &[AbstractTree],
    fy: &[AbstractTree],
) -> Result<(AbstractTree, AbstractTree, Vec<TreeDiff>), EmptyForest> {
    let mut best: Option<(usize, &AbstractTree, &AbstractTree, Vec<TreeDiff>)> = None;
    for x in fx {
        for y in fy {
            let diffs = tree_diff(x, y);
            let cost: usize = diffs.iter().map(TreeDiff::size).sum();
            let better = match &best {
                None => true,
                Some((c, bx, by, _)) => (cost, x, y) < (*c, *bx, *by),
            };
            if better {
                best = Some((cost, x, y, diffs));
            }
        }
    }
    best.map(|(_, x, y, d)| (x.clone(), y.clone(), d))
        .ok_or(EmptyForest)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("pair `{0}` is not a candidate")]
pub struct NotACandidate(pub String);

fn is_lexical(t: &AbstractTree) -> bool {
    match t.args() {
        [] => !t.is_token(),
        [only] => is_lexical(only),
        _ => false,
    }
}

/// Both sides are lexical and share no argument a construction could
/// abstract over.
fn is_lexical_diff(d: &TreeDiff) -> bool {
    let mut shared = Vec::new();
    shared_arguments(&d.x, &d.y, &mut shared);
    is_lexical(&d.x) && is_lexical(&d.y) && shared.is_empty()
}

/// Buckets a candidate: parsing problems first, then lexical-only diffs,
/// then everything else as a predicate.
pub fn classify_candidate(report: &DetectionReport) -> Result<CandidateKind, NotACandidate> {
    if report.verdict != Verdict::Candidate {
        return Err(NotACandidate(report.pair_id.clone()));
    }
    let full = |o: &ParseOutcome| o.status == ParseStatus::Full;
    if !full(&report.outcome_x) || !full(&report.outcome_y) {
        return Ok(CandidateKind::FalsePositiveSuspect);
    }
    if !report.diffs.is_empty() && report.diffs.iter().all(is_lexical_diff) {
        Ok(CandidateKind::LexicalMWE)
    } else {
        Ok(CandidateKind::Predicate)
    }
}

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("invalid construction name `{0}`")]
    BadName(String),
    #[error(transparent)]
    IllTyped(#[from] IllTyped),
    #[error("diff site is not a typed subtree")]
    Untyped,
    #[error(transparent)]
    Linearize(#[from] LinearizeError),
}

fn shared_arguments<'a>(x: &'a AbstractTree, y: &AbstractTree, out: &mut Vec<&'a AbstractTree>) {
    for c in x.args() {
        if y.contains_subtree(c) {
            out.push(c);
        } else {
            shared_arguments(c, y, out);
        }
    }
}

/// Renders a construction signature for a diff site, abstracting over the
/// maximal subtrees the two sides share:
/// `fun where_go_QCl : NP -> QCl ; -- where did X go / vart gick X`.
pub fn emit_construction(
    diff: &TreeDiff,
    name: &str,
    grammar: &Grammar,
    lang_x: &str,
    lang_y: &str,
) -> Result<String, ConstructionError> {
    if !crate::tree::is_identifier(name) {
        return Err(ConstructionError::BadName(name.to_string()));
    }
    let result = validate_tree(&diff.x, grammar)?.ok_or(ConstructionError::Untyped)?;
    validate_tree(&diff.y, grammar)?;
    let mut shared = Vec::new();
    shared_arguments(&diff.x, &diff.y, &mut shared);
    let mut sig = format!("fun {name} :");
    for a in shared {
        let cat = category_of(a, grammar).ok_or(ConstructionError::Untyped)?;
        sig.push_str(&format!(" {cat} ->"));
    }
    let surface_x = linearize(&diff.x, grammar, lang_x)?.join(" ");
    let surface_y = linearize(&diff.y, grammar, lang_y)?.join(" ");
    Ok(format!("{sig} {result} ; -- {surface_x} / {surface_y}"))
}

/// Corpus counts in the layout of a not-candidate / candidate breakdown.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub not_candidates: usize,
    pub candidates: usize,
    pub false_positives: usize,
    pub lexical: usize,
    pub predicates: usize,
    pub total: usize,
}

impl Summary {
    pub fn add(&mut self, verdict: Verdict, kind: Option<CandidateKind>) {
        self.total += 1;
        match verdict {
            Verdict::NotCandidate => self.not_candidates += 1,
            Verdict::Candidate => {
                self.candidates += 1;
                match kind {
                    Some(CandidateKind::FalsePositiveSuspect) | None => self.false_positives += 1,
                    Some(CandidateKind::LexicalMWE) => self.lexical += 1,
                    Some(CandidateKind::Predicate) => self.predicates += 1,
                }
            }
        }
    }

    pub fn balances(&self) -> bool {
        self.not_candidates + self.candidates == self.total
            && self.false_positives + self.lexical + self.predicates == self.candidates
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("Not MWE candidates", self.not_candidates),
            ("MWE candidates", self.candidates),
            ("    False positives", self.false_positives),
            ("    Lexical MWEs", self.lexical),
            ("    Predicates", self.predicates),
            ("All sentences", self.total),
        ];
        for (label, n) in rows {
            writeln!(f, "{label:<24}{n:>6}")?;
        }
        Ok(())
    }
}
