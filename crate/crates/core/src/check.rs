//! Well-typedness, linearization and tree enumeration.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::grammar::{Category, Grammar, LinItem, CHUNKS, UNK_CHUNK};
use crate::tree::{AbstractTree, TreePath};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("ill-typed tree at {path:?}: {reason}")]
pub struct IllTyped {
    pub path: TreePath,
    pub reason: String,
}

/// Result category of the tree's root function, if it is a declared function.
pub fn category_of<'g>(tree: &AbstractTree, grammar: &'g Grammar) -> Option<&'g Category> {
    match tree {
        AbstractTree::App { fun, .. } => grammar.function(fun).map(|d| &d.result),
        AbstractTree::Token(_) => None,
    }
}

/// Checks arity and argument categories at every node.
///
/// `Chunks` roots are accepted with any number of well-typed children, and
/// `UnkChunk` must wrap exactly one surface token. Returns the root category,
/// or `None` for chunk-level trees.
pub fn validate_tree<'g>(
    tree: &AbstractTree,
    grammar: &'g Grammar,
) -> Result<Option<&'g Category>, IllTyped> {
    let mut path = Vec::new();
    validate_at(tree, grammar, &mut path)
}

fn validate_at<'g>(
    tree: &AbstractTree,
    grammar: &'g Grammar,
    path: &mut TreePath,
) -> Result<Option<&'g Category>, IllTyped> {
    let fail = |path: &TreePath, reason: String| {
        Err(IllTyped {
            path: path.clone(),
            reason,
        })
    };
    let (fun, args) = match tree {
        AbstractTree::Token(t) => return fail(path, format!("bare token {t:?} outside UnkChunk")),
        AbstractTree::App { fun, args } => (fun.as_str(), args),
    };
    match fun {
        CHUNKS => {
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                validate_at(a, grammar, path)?;
                path.pop();
            }
            return Ok(None);
        }
        UNK_CHUNK => {
            return match args.as_slice() {
                [AbstractTree::Token(_)] => Ok(None),
                _ => fail(path, "UnkChunk must wrap a single token".into()),
            };
        }
        _ => {}
    }
    let Some(decl) = grammar.function(fun) else {
        return fail(path, format!("undeclared function `{fun}`"));
    };
    if decl.arity() != args.len() {
        return fail(
            path,
            format!(
                "`{fun}` expects {} argument(s), got {}",
                decl.arity(),
                args.len()
            ),
        );
    }
    for (i, (a, want)) in args.iter().zip(&decl.args).enumerate() {
        path.push(i);
        let got = validate_at(a, grammar, path)?;
        if got != Some(want) {
            let got = got.map_or_else(|| "a chunk".to_string(), Category::to_string);
            return fail(path, format!("expected {want}, found {got}"));
        }
        path.pop();
    }
    Ok(Some(&decl.result))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinearizeError {
    #[error("no `{language}` linearization for `{function}`")]
    MissingRule { function: String, language: String },
    #[error(transparent)]
    IllTyped(#[from] IllTyped),
}

/// Flattens a tree to its surface tokens in `lang`.
pub fn linearize(
    tree: &AbstractTree,
    grammar: &Grammar,
    lang: &str,
) -> Result<Vec<String>, LinearizeError> {
    validate_tree(tree, grammar)?;
    let mut out = Vec::new();
    linearize_into(tree, grammar, lang, &mut out)?;
    Ok(out)
}

fn linearize_into(
    tree: &AbstractTree,
    grammar: &Grammar,
    lang: &str,
    out: &mut Vec<String>,
) -> Result<(), LinearizeError> {
    match tree {
        AbstractTree::Token(t) => out.push(t.clone()),
        AbstractTree::App { fun, args } if fun == CHUNKS || fun == UNK_CHUNK => {
            for a in args {
                linearize_into(a, grammar, lang, out)?;
            }
        }
        AbstractTree::App { fun, args } => {
            let rule = grammar
                .rule(lang, fun)
                .ok_or_else(|| LinearizeError::MissingRule {
                    function: fun.clone(),
                    language: lang.to_string(),
                })?;
            for item in &rule.items {
                match item {
                    LinItem::Token(t) => out.push(t.clone()),
                    LinItem::Arg(k) => linearize_into(&args[*k], grammar, lang, out)?,
                }
            }
        }
    }
    Ok(())
}

/// True if every function in the tree has a rule in `lang`.
pub fn covered_by(tree: &AbstractTree, grammar: &Grammar, lang: &str) -> bool {
    match grammar.rules(lang) {
        Some(rules) => tree.functions().iter().all(|f| rules.contains_key(*f)),
        None => false,
    }
}

/// All well-typed trees of depth at most `depth`, over every category,
/// in tree order.
pub fn enumerate_trees(grammar: &Grammar, depth: usize) -> Vec<AbstractTree> {
    let mut all = BTreeSet::new();
    for trees in enumerate_by_category(grammar, depth).into_values() {
        all.extend(trees);
    }
    all.into_iter().collect()
}

/// Well-typed trees of depth at most `depth`, grouped by result category.
pub fn enumerate_by_category(
    grammar: &Grammar,
    depth: usize,
) -> HashMap<Category, Vec<AbstractTree>> {
    let mut by_cat: HashMap<Category, Vec<AbstractTree>> = grammar
        .categories()
        .iter()
        .map(|c| (c.clone(), Vec::new()))
        .collect();
    for _ in 0..depth {
        let mut next: HashMap<Category, BTreeSet<AbstractTree>> = HashMap::new();
        for decl in grammar.functions() {
            let pools: Vec<&Vec<AbstractTree>> = decl.args.iter().map(|c| &by_cat[c]).collect();
            let bucket = next.entry(decl.result.clone()).or_default();
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; pools.len()];
            loop {
                let args = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                bucket.insert(AbstractTree::app(decl.name.clone(), args));
                // odometer
                let mut k = pools.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < pools[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        for (cat, set) in next {
            by_cat.insert(cat, set.into_iter().collect());
        }
    }
    by_cat
}
