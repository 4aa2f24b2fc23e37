//! Chart parsing into abstract trees, with a chunking fallback.
//!
//! The chart holds, for every span and category, the smallest `cap` trees in
//! tree order. Because trees built by one rule are ordered lexicographically
//! by their arguments, truncating every cell to `cap` loses nothing from the
//! `cap` smallest trees of the whole sentence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::LinearizeError;
use crate::grammar::{pass_through_order, Category, Grammar, LinItem, CHUNKS, UNK_CHUNK};
use crate::tree::AbstractTree;

/// Default bound on the number of trees kept per sentence.
pub const DEFAULT_CAP: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("grammar has no concrete syntax for language `{0}`")]
pub struct UnknownLanguage(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseStatus {
    Full,
    Chunked,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub status: ParseStatus,
    /// Non-empty iff `status` is `Full`.
    pub forest: Vec<AbstractTree>,
    /// Present iff `status` is `Chunked`.
    pub chunk_tree: Option<AbstractTree>,
    pub language: String,
}

#[derive(Debug)]
enum Item {
    Lit(String),
    Arg(usize),
}

#[derive(Debug)]
struct CompiledRule {
    fun: String,
    items: Vec<Item>,
    arg_cats: Vec<usize>,
}

/// Parser for one concrete syntax of a grammar.
#[derive(Debug)]
pub struct Parser<'g> {
    grammar: &'g Grammar,
    language: String,
    cat_index: HashMap<&'g Category, usize>,
    /// Categories such that pass-through sources precede their targets.
    order: Vec<usize>,
    rules_by_cat: Vec<Vec<CompiledRule>>,
}

type Cell = Vec<AbstractTree>;

struct Chart {
    n: usize,
    ncat: usize,
    cells: Vec<Cell>,
}

impl Chart {
    fn idx(&self, start: usize, end: usize, cat: usize) -> usize {
        (start * (self.n + 1) + end) * self.ncat + cat
    }

    fn get(&self, start: usize, end: usize, cat: usize) -> &Cell {
        &self.cells[self.idx(start, end, cat)]
    }
}

impl<'g> Parser<'g> {
    pub fn new(grammar: &'g Grammar, language: &str) -> Result<Self, UnknownLanguage> {
        let rules = grammar
            .rules(language)
            .ok_or_else(|| UnknownLanguage(language.to_string()))?;
        let cat_index: HashMap<&Category, usize> = grammar
            .categories()
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let order = pass_through_order(grammar, language)
            .expect("checked when the grammar was loaded")
            .iter()
            .map(|c| cat_index[c])
            .collect();
        let mut rules_by_cat: Vec<Vec<CompiledRule>> =
            (0..grammar.categories().len()).map(|_| Vec::new()).collect();
        for decl in grammar.functions() {
            let Some(rule) = rules.get(&decl.name) else {
                continue;
            };
            let items = rule
                .items
                .iter()
                .map(|it| match it {
                    LinItem::Token(t) => Item::Lit(t.clone()),
                    LinItem::Arg(k) => Item::Arg(*k),
                })
                .collect();
            rules_by_cat[cat_index[&decl.result]].push(CompiledRule {
                fun: decl.name.clone(),
                items,
                arg_cats: decl.args.iter().map(|c| cat_index[c]).collect(),
            });
        }
        Ok(Parser {
            grammar,
            language: language.to_string(),
            cat_index,
            order,
            rules_by_cat,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    fn chart<S: AsRef<str>>(&self, tokens: &[S], cap: usize) -> Chart {
        let n = tokens.len();
        let ncat = self.rules_by_cat.len();
        let mut chart = Chart {
            n,
            ncat,
            cells: vec![Vec::new(); (n + 1) * (n + 1) * ncat],
        };
        for len in 1..=n {
            for start in 0..=n - len {
                let end = start + len;
                for &cat in &self.order {
                    let mut found = Vec::new();
                    for rule in &self.rules_by_cat[cat] {
                        self.apply_rule(rule, tokens, &chart, start, end, cap, &mut found);
                    }
                    found.sort();
                    found.dedup();
                    found.truncate(cap);
                    let i = chart.idx(start, end, cat);
                    chart.cells[i] = found;
                }
            }
        }
        chart
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_rule<S: AsRef<str>>(
        &self,
        rule: &CompiledRule,
        tokens: &[S],
        chart: &Chart,
        start: usize,
        end: usize,
        cap: usize,
        out: &mut Vec<AbstractTree>,
    ) {
        let mut spans = vec![(0, 0); rule.arg_cats.len()];
        let mut assignments = Vec::new();
        match_items(
            rule,
            tokens,
            chart,
            0,
            start,
            end,
            &mut spans,
            &mut assignments,
        );
        for spans in assignments {
            let pools: Vec<&Cell> = spans
                .iter()
                .zip(&rule.arg_cats)
                .map(|(&(s, e), &c)| chart.get(s, e, c))
                .collect();
            // Smallest `cap` argument tuples, in lexicographic order.
            let mut idx = vec![0usize; pools.len()];
            for _ in 0..cap {
                let args = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                out.push(AbstractTree::app(rule.fun.clone(), args));
                let mut k = pools.len();
                let mut carried_out = true;
                while k > 0 {
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < pools[k].len() {
                        carried_out = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if carried_out {
                    break;
                }
            }
        }
    }

    /// All trees of category `start` whose yield is `tokens`, truncated to
    /// the `cap` smallest in tree order.
    pub fn parse<S: AsRef<str>>(
        &self,
        tokens: &[S],
        start: &Category,
        cap: usize,
    ) -> Vec<AbstractTree> {
        assert!(cap >= 1, "ambiguity cap must be positive");
        let Some(&cat) = self.cat_index.get(start) else {
            return Vec::new();
        };
        if tokens.is_empty() {
            return Vec::new();
        }
        let chart = self.chart(tokens, cap);
        chart.get(0, tokens.len(), cat).clone()
    }

    /// Parses at the grammar's start category, falling back to a greedy
    /// left-to-right cover by the longest chunk-category spans.
    pub fn chunk_parse<S: AsRef<str>>(&self, tokens: &[S], cap: usize) -> ParseOutcome {
        assert!(cap >= 1, "ambiguity cap must be positive");
        let outcome = |status, forest, chunk_tree| ParseOutcome {
            status,
            forest,
            chunk_tree,
            language: self.language.clone(),
        };
        if tokens.is_empty() {
            return outcome(ParseStatus::Failed, Vec::new(), None);
        }
        let n = tokens.len();
        let chart = self.chart(tokens, cap);
        let start = self.cat_index[self.grammar.start()];
        let forest = chart.get(0, n, start);
        if !forest.is_empty() {
            return outcome(ParseStatus::Full, forest.clone(), None);
        }
        let chunk_cats: Vec<usize> = self
            .grammar
            .chunk_categories()
            .iter()
            .map(|c| self.cat_index[c])
            .collect();
        let mut children = Vec::new();
        let mut pos = 0;
        while pos < n {
            let best = (pos + 1..=n).rev().find_map(|end| {
                chunk_cats
                    .iter()
                    .find_map(|&c| chart.get(pos, end, c).first())
                    .map(|t| (end, t))
            });
            match best {
                Some((end, tree)) => {
                    children.push(tree.clone());
                    pos = end;
                }
                None => {
                    children.push(unk_chunk(tokens[pos].as_ref()));
                    pos += 1;
                }
            }
        }
        outcome(
            ParseStatus::Chunked,
            Vec::new(),
            Some(AbstractTree::app(CHUNKS, children)),
        )
    }
}

fn unk_chunk(token: &str) -> AbstractTree {
    AbstractTree::app(UNK_CHUNK, vec![AbstractTree::token(token)])
}

/// Enumerates the ways the rule's items can tile `[pos, end)`, recording the
/// span of every argument. Every item covers at least one token.
#[allow(clippy::too_many_arguments)]
fn match_items<S: AsRef<str>>(
    rule: &CompiledRule,
    tokens: &[S],
    chart: &Chart,
    item: usize,
    pos: usize,
    end: usize,
    spans: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if item == rule.items.len() {
        if pos == end {
            out.push(spans.clone());
        }
        return;
    }
    let remaining = rule.items.len() - item - 1;
    if pos + remaining >= end {
        return;
    }
    match &rule.items[item] {
        Item::Lit(t) => {
            if tokens[pos].as_ref() == t {
                match_items(rule, tokens, chart, item + 1, pos + 1, end, spans, out);
            }
        }
        Item::Arg(k) => {
            let cat = rule.arg_cats[*k];
            for arg_end in pos + 1..=end - remaining {
                if !chart.get(pos, arg_end, cat).is_empty() {
                    spans[*k] = (pos, arg_end);
                    match_items(rule, tokens, chart, item + 1, arg_end, end, spans, out);
                }
            }
        }
    }
}

/// Convenience wrapper; an unknown language yields no trees.
pub fn parse<S: AsRef<str>>(
    tokens: &[S],
    grammar: &Grammar,
    language: &str,
    start: &Category,
    cap: usize,
) -> Vec<AbstractTree> {
    match Parser::new(grammar, language) {
        Ok(p) => p.parse(tokens, start, cap),
        Err(_) => Vec::new(),
    }
}

pub fn chunk_parse<S: AsRef<str>>(
    tokens: &[S],
    grammar: &Grammar,
    language: &str,
    cap: usize,
) -> Result<ParseOutcome, UnknownLanguage> {
    Ok(Parser::new(grammar, language)?.chunk_parse(tokens, cap))
}

/// Rewrites a tree as a `Chunks` root over its maximal chunk-category
/// subtrees, in surface order for `language`. Tokens contributed by
/// non-chunk nodes become `UnkChunk` children, so the children's yields
/// concatenate to the tree's yield. A `Chunks` tree is returned unchanged.
pub fn project_chunks(
    tree: &AbstractTree,
    grammar: &Grammar,
    language: &str,
) -> Result<AbstractTree, LinearizeError> {
    if tree.fun() == CHUNKS && !tree.is_token() {
        return Ok(tree.clone());
    }
    crate::check::validate_tree(tree, grammar)?;
    let mut children = Vec::new();
    collect_chunks(tree, grammar, language, &mut children)?;
    Ok(AbstractTree::app(CHUNKS, children))
}

fn collect_chunks(
    tree: &AbstractTree,
    grammar: &Grammar,
    language: &str,
    out: &mut Vec<AbstractTree>,
) -> Result<(), LinearizeError> {
    match tree {
        AbstractTree::Token(t) => out.push(unk_chunk(t)),
        AbstractTree::App { fun, .. } if fun == UNK_CHUNK => out.push(tree.clone()),
        AbstractTree::App { fun, args } => {
            let decl = grammar.function(fun).expect("validated");
            if grammar.is_chunk_category(&decl.result) {
                out.push(tree.clone());
                return Ok(());
            }
            let rule = grammar
                .rule(language, fun)
                .ok_or_else(|| LinearizeError::MissingRule {
                    function: fun.clone(),
                    language: language.to_string(),
                })?;
            for item in &rule.items {
                match item {
                    LinItem::Token(t) => out.push(unk_chunk(t)),
                    LinItem::Arg(k) => collect_chunks(&args[*k], grammar, language, out)?,
                }
            }
        }
    }
    Ok(())
}
