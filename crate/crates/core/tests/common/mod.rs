#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use mwe_core::grammar::LinItem;
use mwe_core::{load_grammar, AbstractTree, Category, Grammar};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn data(name: &str) -> PathBuf {
    data_dir().join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn toy() -> Grammar {
    load_grammar(&read_data("toy.grammar")).expect("toy grammar loads")
}

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

/// Top-down exhaustive parser used as an oracle: tries every rule of the
/// category and every way of cutting the span among its arguments. No
/// chart, no sharing, no cap.
pub fn naive_parse(grammar: &Grammar, lang: &str, tokens: &[String], cat: &Category) -> BTreeSet<AbstractTree> {
    let mut out = BTreeSet::new();
    let Some(rules) = grammar.rules(lang) else {
        return out;
    };
    for decl in grammar.functions().iter().filter(|d| &d.result == cat) {
        let Some(rule) = rules.get(&decl.name) else {
            continue;
        };
        let mut partial: Vec<Vec<Option<AbstractTree>>> = Vec::new();
        match_items(grammar, lang, &rule.items, tokens, &decl.args, vec![None; decl.arity()], &mut partial);
        for args in partial {
            out.insert(AbstractTree::app(decl.name.clone(), args.into_iter().map(Option::unwrap).collect()));
        }
    }
    out
}

fn match_items(
    grammar: &Grammar,
    lang: &str,
    items: &[LinItem],
    tokens: &[String],
    arg_cats: &[Category],
    filled: Vec<Option<AbstractTree>>,
    out: &mut Vec<Vec<Option<AbstractTree>>>,
) {
    let Some((first, rest)) = items.split_first() else {
        if tokens.is_empty() {
            out.push(filled);
        }
        return;
    };
    match first {
        LinItem::Token(t) => {
            if tokens.first() == Some(t) {
                match_items(grammar, lang, rest, &tokens[1..], arg_cats, filled, out);
            }
        }
        LinItem::Arg(k) => {
            // every remaining item yields at least one token
            for cut in 1..=tokens.len().saturating_sub(rest.len()) {
                for sub in naive_parse(grammar, lang, &tokens[..cut], &arg_cats[*k]) {
                    let mut f = filled.clone();
                    f[*k] = Some(sub);
                    match_items(grammar, lang, rest, &tokens[cut..], arg_cats, f, out);
                }
            }
        }
    }
}

pub fn vocabulary(grammar: &Grammar, lang: &str) -> Vec<String> {
    let mut v = BTreeSet::new();
    for rule in grammar.rules(lang).into_iter().flat_map(|r| r.values()) {
        for item in &rule.items {
            if let LinItem::Token(t) = item {
                v.insert(t.clone());
            }
        }
    }
    v.into_iter().collect()
}
