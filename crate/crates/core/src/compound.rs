//! German nominal compound splitting.
//!
//! A split decomposes a word into lexicon nouns, each optionally followed by
//! a linking morpheme; the last (head) component carries no linker. The
//! preferred split has the fewest components, then the longest head, then
//! the smallest serialized form (`Leben+s|Mittel`). It is found exactly by a
//! dynamic program over suffixes of the word.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::grammar::{load_grammar, Category, Grammar};
use crate::text::LineIssue;
use crate::tree::{is_identifier, AbstractTree};

/// Category of the lexicon entries used as compound components.
pub const NOUN: &str = "N";

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeSet<(String, Category)>,
    /// lowercased noun lemma -> canonical spelling
    nouns: HashMap<String, String>,
    max_noun_chars: usize,
    pub source: String,
}

impl Lexicon {
    pub fn new(source: impl Into<String>) -> Self {
        Lexicon {
            source: source.into(),
            ..Default::default()
        }
    }

    pub fn insert(&mut self, lemma: &str, category: Category) {
        if category == NOUN {
            let key = lemma.to_lowercase();
            self.max_noun_chars = self.max_noun_chars.max(key.chars().count());
            let canonical = self.nouns.entry(key).or_insert_with(|| lemma.to_string());
            if lemma < canonical.as_str() {
                *canonical = lemma.to_string();
            }
        }
        self.entries.insert((lemma.to_string(), category));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Category)> {
        self.entries.iter().map(|(l, c)| (l.as_str(), c))
    }

    /// Canonical noun lemma for a lowercased form.
    pub fn noun(&self, lowercase: &str) -> Option<&str> {
        self.nouns.get(lowercase).map(String::as_str)
    }

    /// Noun lemmas in canonical spelling, sorted.
    pub fn noun_lemmas(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.nouns.values().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    pub fn from_path(path: &Path) -> std::io::Result<(Lexicon, Vec<LineIssue>)> {
        let text = std::fs::read_to_string(path)?;
        let (mut lex, issues) = load_lexicon(&text);
        lex.source = path.display().to_string();
        Ok((lex, issues))
    }
}

/// Reads `lemma<TAB>category` lines. Blank lines and `#` comments are
/// ignored; malformed lines are reported and skipped.
pub fn load_lexicon(source: &str) -> (Lexicon, Vec<LineIssue>) {
    let mut lex = Lexicon::new("<text>");
    let mut issues = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        match fields.as_slice() {
            [lemma, cat] if is_identifier(lemma) && is_identifier(cat) => {
                lex.insert(lemma, Category::new(*cat));
            }
            [_, _] => issues.push(LineIssue::new(line_no, "lemma or category is not an identifier")),
            _ => issues.push(LineIssue::new(line_no, "expected `lemma<TAB>category`")),
        }
    }
    (lex, issues)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LongestHead,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("the empty linker must be allowed")]
    MissingEmptyLinker,
    #[error("minimum component length must be at least 1")]
    ZeroMinLength,
    #[error("linker {0:?} must be lowercase letters")]
    BadLinker(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitConfig {
    linkers: Vec<String>,
    min_component_length: usize,
    pub tie_break: TieBreak,
}

impl SplitConfig {
    pub fn new(linkers: &[&str], min_component_length: usize) -> Result<Self, ConfigError> {
        if min_component_length == 0 {
            return Err(ConfigError::ZeroMinLength);
        }
        let mut ls: Vec<String> = Vec::new();
        for l in linkers {
            if !l.chars().all(char::is_lowercase) {
                return Err(ConfigError::BadLinker(l.to_string()));
            }
            if !ls.iter().any(|x| x == l) {
                ls.push(l.to_string());
            }
        }
        if !ls.iter().any(String::is_empty) {
            return Err(ConfigError::MissingEmptyLinker);
        }
        Ok(SplitConfig {
            linkers: ls,
            min_component_length,
            tie_break: TieBreak::LongestHead,
        })
    }

    pub fn linkers(&self) -> &[String] {
        &self.linkers
    }

    pub fn min_component_length(&self) -> usize {
        self.min_component_length
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig::new(&["", "s", "en"], 3).expect("valid defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub lemma: String,
    pub linker: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompoundSplit {
    pub components: Vec<Component>,
    pub surface: String,
}

impl CompoundSplit {
    pub fn head(&self) -> &Component {
        self.components.last().expect("a split has components")
    }

    /// Sort key: fewest components, longest head, smallest serialization.
    pub fn rank_key(&self) -> (usize, Reverse<usize>, String) {
        (
            self.components.len(),
            Reverse(self.head().lemma.chars().count()),
            self.to_string(),
        )
    }

    /// Concatenation of lemmas and linkers.
    pub fn reassemble(&self) -> String {
        self.components
            .iter()
            .flat_map(|c| [c.lemma.as_str(), c.linker.as_str()])
            .collect()
    }
}

impl fmt::Display for CompoundSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str(&c.lemma)?;
            if !c.linker.is_empty() {
                write!(f, "+{}", c.linker)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Best {
    count: usize,
    head_chars: usize,
    serialized: String,
    components: Vec<Component>,
}

impl Best {
    fn key(&self) -> (usize, Reverse<usize>, &str) {
        (self.count, Reverse(self.head_chars), &self.serialized)
    }
}

/// Lemma matches `(end, canonical)` starting at `start` in the lowercased word.
fn lemma_matches<'l>(
    chars: &[char],
    start: usize,
    lexicon: &'l Lexicon,
    config: &SplitConfig,
) -> Vec<(usize, &'l str)> {
    let n = chars.len();
    let longest = lexicon.max_noun_chars.min(n - start);
    (config.min_component_length..=longest)
        .filter_map(|len| {
            let key: String = chars[start..start + len].iter().collect();
            lexicon.noun(&key).map(|lemma| (start + len, lemma))
        })
        .collect()
}

fn linker_fits(chars: &[char], at: usize, linker: &str) -> Option<usize> {
    let mut pos = at;
    for c in linker.chars() {
        if chars.get(pos) != Some(&c) {
            return None;
        }
        pos += 1;
    }
    Some(pos)
}

/// The preferred split of `word`, or `None` when no split into two or more
/// components exists.
pub fn split_compound(word: &str, lexicon: &Lexicon, config: &SplitConfig) -> Option<CompoundSplit> {
    let chars: Vec<char> = word.to_lowercase().chars().collect();
    let n = chars.len();
    if n == 0 {
        return None;
    }
    // best[i]: preferred decomposition of chars[i..] into one or more components.
    let mut best: Vec<Option<Best>> = vec![None; n + 1];
    for start in (0..n).rev() {
        let mut chosen: Option<Best> = None;
        for (end, lemma) in lemma_matches(&chars, start, lexicon, config) {
            let mut options = Vec::new();
            if end == n && start > 0 {
                options.push(Best {
                    count: 1,
                    head_chars: lemma.chars().count(),
                    serialized: lemma.to_string(),
                    components: vec![Component {
                        lemma: lemma.to_string(),
                        linker: String::new(),
                    }],
                });
            }
            for linker in config.linkers() {
                let Some(next) = linker_fits(&chars, end, linker) else {
                    continue;
                };
                let Some(rest) = best.get(next).and_then(Option::as_ref) else {
                    continue;
                };
                let mut serialized = lemma.to_string();
                if !linker.is_empty() {
                    serialized.push('+');
                    serialized.push_str(linker);
                }
                serialized.push('|');
                serialized.push_str(&rest.serialized);
                let mut components = Vec::with_capacity(rest.components.len() + 1);
                components.push(Component {
                    lemma: lemma.to_string(),
                    linker: linker.clone(),
                });
                components.extend(rest.components.iter().cloned());
                options.push(Best {
                    count: rest.count + 1,
                    head_chars: rest.head_chars,
                    serialized,
                    components,
                });
            }
            for o in options {
                if chosen.as_ref().is_none_or(|c| o.key() < c.key()) {
                    chosen = Some(o);
                }
            }
        }
        best[start] = chosen;
    }
    // Position 0 never takes the whole word as a single component.
    best[0].take().map(|b| CompoundSplit {
        components: b.components,
        surface: word.to_string(),
    })
}

/// Every split of `word` with at least two components, in preference order,
/// truncated to `cap`.
pub fn enumerate_splits(
    word: &str,
    lexicon: &Lexicon,
    config: &SplitConfig,
    cap: usize,
) -> Vec<CompoundSplit> {
    assert!(cap >= 1, "cap must be positive");
    let chars: Vec<char> = word.to_lowercase().chars().collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    enumerate_from(&chars, 0, lexicon, config, &mut stack, &mut out, word);
    out.sort_by_cached_key(CompoundSplit::rank_key);
    out.truncate(cap);
    out
}

fn enumerate_from(
    chars: &[char],
    start: usize,
    lexicon: &Lexicon,
    config: &SplitConfig,
    stack: &mut Vec<Component>,
    out: &mut Vec<CompoundSplit>,
    word: &str,
) {
    for (end, lemma) in lemma_matches(chars, start, lexicon, config) {
        if end == chars.len() {
            if !stack.is_empty() {
                let mut components = stack.clone();
                components.push(Component {
                    lemma: lemma.to_string(),
                    linker: String::new(),
                });
                out.push(CompoundSplit {
                    components,
                    surface: word.to_string(),
                });
            }
            continue;
        }
        for linker in config.linkers() {
            if let Some(next) = linker_fits(chars, end, linker) {
                if next < chars.len() {
                    stack.push(Component {
                        lemma: lemma.to_string(),
                        linker: linker.clone(),
                    });
                    enumerate_from(chars, next, lexicon, config, stack, out, word);
                    stack.pop();
                }
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("linker {0:?} has no compounding rule")]
pub struct UnsupportedLinker(pub String);

/// Compounding function for a linker.
pub fn rule_for_linker(linker: &str) -> Option<&'static str> {
    match linker {
        "" => Some("ConsNomCN"),
        "s" => Some("Cons_sCN"),
        "en" => Some("Cons_enCN"),
        _ => None,
    }
}

pub fn noun_function(lemma: &str) -> String {
    format!("{lemma}_{NOUN}")
}

/// Right-folds a split into a CN tree: the head becomes `UseN(head_N)` and
/// each modifier wraps it with the rule for its linker.
pub fn to_tree(split: &CompoundSplit) -> Result<AbstractTree, UnsupportedLinker> {
    let (head, modifiers) = split.components.split_last().expect("a split has components");
    let mut tree = AbstractTree::app("UseN", vec![AbstractTree::leaf(noun_function(&head.lemma))]);
    for c in modifiers.iter().rev() {
        let fun = rule_for_linker(&c.linker).ok_or_else(|| UnsupportedLinker(c.linker.clone()))?;
        tree = AbstractTree::app(fun, vec![AbstractTree::leaf(noun_function(&c.lemma)), tree]);
    }
    Ok(tree)
}

/// The compounding grammar over the lexicon's nouns: categories N and CN,
/// `UseN`, the three linker rules, and one lexical function per noun.
pub fn compound_grammar(lexicon: &Lexicon) -> Grammar {
    let mut src = String::from(
        "cat N ; cat CN ;\nstart CN ;\n\
         fun UseN : N -> CN ;\n\
         fun ConsNomCN : N -> CN -> CN ;\n\
         fun Cons_sCN : N -> CN -> CN ;\n\
         fun Cons_enCN : N -> CN -> CN ;\n",
    );
    for lemma in lexicon.noun_lemmas() {
        src.push_str(&format!("fun {} : N ;\n", noun_function(lemma)));
    }
    load_grammar(&src).expect("generated compound grammar is well-formed")
}
