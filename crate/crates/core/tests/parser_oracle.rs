mod common;

use std::collections::BTreeSet;

use common::{naive_parse, toks, toy, vocabulary};
use mwe_core::check::{enumerate_by_category, enumerate_trees, linearize, validate_tree};
use mwe_core::grammar::CHUNKS;
use mwe_core::parser::{chunk_parse, parse, project_chunks, ParseStatus, Parser};
use mwe_core::{load_grammar, AbstractTree, Category, Grammar};
use proptest::prelude::*;

const BIG_CAP: usize = 100_000;

const RIVER: &str = r#"
    cat S ; cat NP ; cat N ;
    fun Swims : NP -> S ;
    fun DetN : N -> NP ;
    fun MassN : N -> NP ;
    fun Conj : NP -> NP -> NP ;
    fun bank_N : N ; fun shore_N : N ; fun fish_N : N ;
    lin eng Swims = $0 "swims" ;
    lin eng DetN = "the" $0 ;
    lin eng MassN = $0 ;
    lin eng Conj = $0 "and" $1 ;
    lin eng bank_N = "bank" ;
    lin eng shore_N = "bank" ;
    lin eng fish_N = "fish" ;
"#;

fn all_sequences(vocab: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for w in vocab {
                let mut s = seq.clone();
                s.push(w.to_string());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.remove(0);
    out
}

#[test]
fn river_grammar_agrees_with_oracle_on_every_sequence_up_to_seven_tokens() {
    let g = load_grammar(RIVER).unwrap();
    let parser = Parser::new(&g, "eng").unwrap();
    let cats: Vec<Category> = g.categories().to_vec();
    let mut parsed_sentences = 0;
    for seq in all_sequences(&["the", "bank", "fish", "and", "swims"], 7) {
        for cat in &cats {
            let got: BTreeSet<AbstractTree> = parser.parse(&seq, cat, BIG_CAP).into_iter().collect();
            let want = naive_parse(&g, "eng", &seq, cat);
            assert_eq!(got, want, "{seq:?} at {cat}");
            if !got.is_empty() && cat == "S" {
                parsed_sentences += 1;
            }
        }
    }
    assert!(parsed_sentences > 50);
}

#[test]
fn river_forest_of_two_matches_enumeration() {
    let g = load_grammar(RIVER).unwrap();
    let by_yield: Vec<AbstractTree> = enumerate_trees(&g, 4)
        .into_iter()
        .filter(|t| validate_tree(t, &g).unwrap() == Some(&Category::from("S")))
        .filter(|t| linearize(t, &g, "eng").unwrap() == toks("the bank swims"))
        .collect();
    assert_eq!(by_yield.len(), 2);
    let forest = parse(&toks("the bank swims"), &g, "eng", &Category::from("S"), 64);
    assert_eq!(forest, by_yield);
}

#[test]
fn cap_keeps_the_smallest_trees() {
    let g = load_grammar(RIVER).unwrap();
    let seq = toks("bank and bank and bank swims");
    let mut all: Vec<AbstractTree> = naive_parse(&g, "eng", &seq, &Category::from("S")).into_iter().collect();
    all.sort();
    assert!(all.len() > 8);
    for cap in [1, 2, 3, 5, 8] {
        let got = parse(&seq, &g, "eng", &Category::from("S"), cap);
        assert_eq!(got, all[..cap].to_vec(), "cap {cap}");
    }
}

fn covered_yields(g: &Grammar, lang: &str, depth: usize, max_len: usize) -> BTreeSet<(Vec<String>, Category)> {
    let mut out = BTreeSet::new();
    for (cat, trees) in enumerate_by_category(g, depth) {
        for t in trees {
            if let Ok(y) = linearize(&t, g, lang) {
                if y.len() <= max_len {
                    out.insert((y, cat.clone()));
                }
            }
        }
    }
    out
}

#[test]
fn toy_grammar_agrees_with_oracle() {
    let g = toy();
    for lang in ["eng", "swe", "ger", "fre"] {
        let parser = Parser::new(&g, lang).unwrap();
        let yields = covered_yields(&g, lang, 3, 7);
        assert!(yields.len() > 100, "{lang}: {}", yields.len());
        for (seq, cat) in &yields {
            let got: BTreeSet<AbstractTree> = parser.parse(seq, cat, BIG_CAP).into_iter().collect();
            assert_eq!(got, naive_parse(&g, lang, seq, cat), "{lang} {seq:?} at {cat}");
        }
    }
}

#[test]
fn toy_sentences_from_deeper_trees_agree_with_oracle() {
    let g = toy();
    let start = g.start().clone();
    let parser = Parser::new(&g, "eng").unwrap();
    for s in [
        "she can hear it well now",
        "I want a cup of coffee",
        "a glass of water please",
        "the very big red dog is very old",
        "where did John go",
        "you can come here",
        "we like the car key of the house",
    ] {
        let seq = toks(s);
        let got: BTreeSet<AbstractTree> = parser.parse(&seq, &start, BIG_CAP).into_iter().collect();
        let want = naive_parse(&g, "eng", &seq, &start);
        assert!(!want.is_empty(), "{s}");
        assert_eq!(got, want, "{s}");
    }
}

#[test]
fn forests_are_sound() {
    let g = toy();
    let start = g.start().clone();
    for s in ["you can come here", "she can hear it well now", "the dog is big"] {
        let forest = parse(&toks(s), &g, "eng", &start, 64);
        assert!(!forest.is_empty());
        for t in &forest {
            assert_eq!(validate_tree(t, &g).unwrap(), Some(&start));
            assert_eq!(linearize(t, &g, "eng").unwrap(), toks(s));
        }
        let mut sorted = forest.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, forest);
    }
}

#[test]
fn swedish_where_go_question() {
    let g = toy();
    let forest = parse(&toks("vart gick X"), &g, "swe", &Category::from("QCl"), 64);
    assert_eq!(forest, vec!["(where_go_QCl X_NP)".parse::<AbstractTree>().unwrap()]);
}

#[test]
fn out_of_grammar_word_becomes_unk_chunk() {
    let g = toy();
    let o = chunk_parse(&toks("the dog is very sleepy"), &g, "eng", 64).unwrap();
    assert_eq!(o.status, ParseStatus::Chunked);
    let t = o.chunk_tree.unwrap();
    assert_eq!(
        t.to_string(),
        "(Chunks (DetCN the_Det (UseN dog_N)) (UnkChunk \"is\") (UnkChunk \"very\") (UnkChunk \"sleepy\"))"
    );
    assert_eq!(linearize(&t, &g, "eng").unwrap(), toks("the dog is very sleepy"));
}

#[test]
fn projection_of_a_sentence() {
    let g = toy();
    let tree: AbstractTree = "(UttCl (PredVP (UsePron she_Pron) (ComplV2 see_V2 (DetCN the_Det (UseN dog_N)))))"
        .parse()
        .unwrap();
    let p = project_chunks(&tree, &g, "eng").unwrap();
    assert_eq!(
        p.to_string(),
        "(Chunks (UsePron she_Pron) (ComplV2 see_V2 (DetCN the_Det (UseN dog_N))))"
    );
    assert_eq!(project_chunks(&p, &g, "eng").unwrap(), p);
    let np: AbstractTree = "(UsePron she_Pron)".parse().unwrap();
    assert_eq!(project_chunks(&np, &g, "eng").unwrap(), AbstractTree::app(CHUNKS, vec![np]));
}

fn vocab_sentence() -> impl Strategy<Value = Vec<String>> {
    let mut vocab = vocabulary(&toy(), "eng");
    vocab.extend(["banana", "quickly"].map(String::from));
    prop::collection::vec(prop::sample::select(vocab), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chunk_cover_holds_for_any_input(tokens in vocab_sentence()) {
        let g = toy();
        let o = chunk_parse(&tokens, &g, "eng", 64).unwrap();
        let full = parse(&tokens, &g, "eng", g.start(), 64);
        match o.status {
            ParseStatus::Full => {
                prop_assert_eq!(&o.forest, &full);
                prop_assert!(o.chunk_tree.is_none());
            }
            ParseStatus::Chunked => {
                prop_assert!(full.is_empty());
                let t = o.chunk_tree.unwrap();
                prop_assert_eq!(linearize(&t, &g, "eng").unwrap(), tokens.clone());
                for child in t.args() {
                    if child.fun() != "UnkChunk" {
                        let cat = validate_tree(child, &g).unwrap().unwrap();
                        prop_assert!(g.is_chunk_category(cat));
                    }
                }
            }
            ParseStatus::Failed => prop_assert!(false, "non-empty input never fails"),
        }
        let again = chunk_parse(&tokens, &g, "eng", 64).unwrap();
        prop_assert_eq!(again.chunk_tree, chunk_parse(&tokens, &g, "eng", 64).unwrap().chunk_tree);
    }
}

#[test]
fn projection_preserves_yield_and_is_idempotent() {
    let g = toy();
    let mut checked = 0;
    for t in enumerate_trees(&g, 3) {
        let Ok(y) = linearize(&t, &g, "eng") else { continue };
        let p = project_chunks(&t, &g, "eng").unwrap();
        assert_eq!(linearize(&p, &g, "eng").unwrap(), y, "{t}");
        assert_eq!(project_chunks(&p, &g, "eng").unwrap(), p);
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn empty_input_fails() {
    let g = toy();
    let o = chunk_parse(&Vec::<String>::new(), &g, "eng", 64).unwrap();
    assert_eq!(o.status, ParseStatus::Failed);
    assert!(o.forest.is_empty() && o.chunk_tree.is_none());
    assert!(chunk_parse(&toks("hello"), &g, "klingon", 64).is_err());
}
