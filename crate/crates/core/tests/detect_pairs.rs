mod common;

use std::sync::OnceLock;

use common::{read_data, toks, toy};
use mwe_core::check::{covered_by, enumerate_trees, linearize, validate_tree};
use mwe_core::detect::{
    best_pair, classify_candidate, detect_pair, emit_construction, forest_intersect, tree_diff,
    CandidateKind, Detector, SentencePair, Summary, TreeDiff, Verdict,
};
use mwe_core::text::tokenize;
use mwe_core::AbstractTree;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn t(s: &str) -> AbstractTree {
    s.parse().unwrap()
}

fn pair(lx: &str, x: &str, ly: &str, y: &str) -> SentencePair {
    SentencePair {
        id: "t".into(),
        lang_x: lx.into(),
        lang_y: ly.into(),
        tokens_x: toks(x),
        tokens_y: toks(y),
    }
}

struct Annotated {
    id: String,
    x: String,
    y: String,
    verdict: Verdict,
    kind: Option<CandidateKind>,
}

fn annotated_corpus() -> Vec<Annotated> {
    let expected: Vec<(String, Verdict, Option<CandidateKind>)> = read_data("corpus_eng_swe.expected.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let verdict = match f[1] {
                "NotCandidate" => Verdict::NotCandidate,
                "Candidate" => Verdict::Candidate,
                v => panic!("bad verdict {v}"),
            };
            let kind = match f[2] {
                "-" => None,
                "FalsePositiveSuspect" => Some(CandidateKind::FalsePositiveSuspect),
                "LexicalMWE" => Some(CandidateKind::LexicalMWE),
                "Predicate" => Some(CandidateKind::Predicate),
                k => panic!("bad kind {k}"),
            };
            (f[0].to_string(), verdict, kind)
        })
        .collect();
    let corpus: Vec<Vec<String>> = read_data("corpus_eng_swe.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split('\t').map(String::from).collect())
        .collect();
    assert_eq!(corpus.len(), expected.len());
    corpus
        .into_iter()
        .zip(expected)
        .map(|(c, (id, verdict, kind))| {
            assert_eq!(c[0], id);
            Annotated {
                id,
                x: c[1].clone(),
                y: c[2].clone(),
                verdict,
                kind,
            }
        })
        .collect()
}

#[test]
fn corpus_matches_annotations() {
    let g = toy();
    let det = Detector::new(&g, "eng", "swe", 64).unwrap();
    let mut summary = Summary::default();
    for a in annotated_corpus() {
        let r = det.detect(&a.id, &tokenize(&a.x), &tokenize(&a.y)).unwrap();
        assert_eq!((r.verdict, r.candidate_kind), (a.verdict, a.kind), "{}: {} / {}", a.id, a.x, a.y);
        summary.add(r.verdict, r.candidate_kind);
    }
    assert_eq!(summary.total, 30);
    assert!(summary.balances());
}

#[test]
fn detection_is_symmetric_on_corpus() {
    let g = toy();
    let fwd = Detector::new(&g, "eng", "swe", 64).unwrap();
    let back = Detector::new(&g, "swe", "eng", 64).unwrap();
    for a in annotated_corpus() {
        let (x, y) = (tokenize(&a.x), tokenize(&a.y));
        let r1 = fwd.detect(&a.id, &x, &y).unwrap();
        let r2 = back.detect(&a.id, &y, &x).unwrap();
        assert_eq!(r1.verdict, r2.verdict, "{}", a.id);
        assert_eq!(r1.candidate_kind, r2.candidate_kind, "{}", a.id);
    }
}

#[test]
fn diff_paths_lead_to_the_diff_subtrees() {
    let g = toy();
    let det = Detector::new(&g, "eng", "swe", 64).unwrap();
    for a in annotated_corpus() {
        let r = det.detect(&a.id, &tokenize(&a.x), &tokenize(&a.y)).unwrap();
        if r.verdict == Verdict::Candidate {
            assert!(!r.diffs.is_empty(), "{}", a.id);
            let (bx, by) = r.best_pair.as_ref().unwrap();
            for d in &r.diffs {
                assert_eq!(bx.subtree(&d.path), Some(&d.x), "{}", a.id);
                assert_eq!(by.subtree(&d.path), Some(&d.y), "{}", a.id);
            }
        } else {
            assert!(r.diffs.is_empty());
        }
    }
}

#[test]
fn where_go_construction() {
    let g = toy();
    let r = detect_pair(&pair("eng", "where did X go", "swe", "vart gick X"), &g, 64).unwrap();
    assert_eq!(r.verdict, Verdict::Candidate);
    assert_eq!(r.candidate_kind, Some(CandidateKind::Predicate));
    assert_eq!(r.diffs.len(), 1);
    assert_eq!(r.diffs[0].x, t("(QDir where_Adv go_V X_NP)"));
    assert_eq!(r.diffs[0].y, t("(where_go_QCl X_NP)"));
    assert_eq!(
        emit_construction(&r.diffs[0], "where_go_QCl", &g, "eng", "swe").unwrap(),
        "fun where_go_QCl : NP -> QCl ; -- where did X go / vart gick X"
    );
}

#[test]
fn weather_construction() {
    let g = toy();
    let r = detect_pair(&pair("eng", "it is warm", "fre", "il fait chaud"), &g, 64).unwrap();
    assert_eq!(r.candidate_kind, Some(CandidateKind::Predicate));
    let d = &r.diffs[0];
    assert_eq!(d.y, t("(weather_adjCl (PositA warm_A))"));
    let sig = emit_construction(d, "weather_adjCl", &g, "eng", "fre").unwrap();
    assert_eq!(sig, "fun weather_adjCl : AP -> Cl ; -- it is warm / il fait chaud");
}

#[test]
fn identical_greeting_is_not_a_candidate() {
    let g = toy();
    let r = detect_pair(&pair("eng", "hello", "swe", "hej"), &g, 64).unwrap();
    assert_eq!(r.verdict, Verdict::NotCandidate);
    assert_eq!(r.best_pair.as_ref().unwrap().0, t("(UttCl (greet_Cl hello_Interj))"));
    assert!(classify_candidate(&r).is_err());
}

#[test]
fn ambiguity_resolves_to_shared_tree() {
    // "il" is both it_Pron and he_Pron in French.
    let g = toy();
    let r = detect_pair(&pair("eng", "he is tired", "fre", "il est fatigué"), &g, 64).unwrap();
    assert_eq!(r.outcome_y.forest.len(), 2);
    assert_eq!(r.verdict, Verdict::NotCandidate);
}

#[test]
fn chunked_side_is_a_false_positive_suspect() {
    let g = toy();
    let r = detect_pair(&pair("eng", "the food is very good today", "swe", "maten är mycket god idag"), &g, 64)
        .unwrap();
    assert_eq!(r.candidate_kind, Some(CandidateKind::FalsePositiveSuspect));
    assert!(!r.diffs.is_empty());
}

#[test]
fn lexical_pairs() {
    let g = toy();
    let r = detect_pair(&pair("eng", "I see the little dog", "swe", "jag ser den liten hund"), &g, 64).unwrap();
    assert_eq!(r.candidate_kind, Some(CandidateKind::LexicalMWE));
    assert_eq!(r.diffs.len(), 1);
    assert_eq!(
        emit_construction(&r.diffs[0], "little_small_A", &g, "eng", "swe").unwrap(),
        "fun little_small_A : A ; -- little / liten"
    );
    let r = detect_pair(&pair("eng", "where is the locker", "swe", "var är den låsbart skåp"), &g, 64).unwrap();
    assert_eq!(r.candidate_kind, Some(CandidateKind::LexicalMWE));
    assert_eq!((r.diffs[0].x.to_string(), r.diffs[0].y.to_string()), ("locker_N".into(), "låsbart_skåp_N".into()));
}

#[test]
fn same_language_pair_is_rejected() {
    let g = toy();
    assert!(detect_pair(&pair("eng", "hello", "eng", "hello"), &g, 64).is_err());
    assert!(detect_pair(&pair("eng", "hello", "tlh", "nuqneH"), &g, 64).is_err());
}

#[test]
fn no_false_negatives_on_generated_parallel_sentences() {
    let g = toy();
    let det = Detector::new(&g, "eng", "swe", 64).unwrap();
    let start = g.start().clone();
    let trees: Vec<AbstractTree> = enumerate_trees(&g, 4)
        .into_iter()
        .filter(|t| validate_tree(t, &g).unwrap() == Some(&start))
        .filter(|t| covered_by(t, &g, "eng") && covered_by(t, &g, "swe"))
        .collect();
    assert!(trees.len() > 100);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for tree in trees.choose_multiple(&mut rng, 150) {
        let x = linearize(tree, &g, "eng").unwrap();
        let y = linearize(tree, &g, "swe").unwrap();
        let r = det.detect("gen", &x, &y).unwrap();
        assert_eq!(r.verdict, Verdict::NotCandidate, "{tree}: {x:?} / {y:?}");
    }
}

/// Node count of every maximal mismatch, computed by a direct recursion.
fn mismatch_cost(x: &AbstractTree, y: &AbstractTree) -> usize {
    if x == y {
        return 0;
    }
    let same = x.is_token() == y.is_token()
        && x.fun() == y.fun()
        && !x.args().is_empty()
        && x.args().len() == y.args().len();
    if same {
        x.args().iter().zip(y.args()).map(|(a, b)| mismatch_cost(a, b)).sum()
    } else {
        x.size() + y.size()
    }
}

fn small_trees() -> &'static [AbstractTree] {
    static POOL: OnceLock<Vec<AbstractTree>> = OnceLock::new();
    POOL.get_or_init(|| {
        enumerate_trees(&toy(), 3)
            .into_iter()
            .filter(|t| t.fun().starts_with("Pred") || t.fun().starts_with("Det") || t.fun() == "UseN")
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn best_pair_matches_exhaustive_scoring(seed in any::<u64>(), nx in 1usize..5, ny in 1usize..5) {
        let pool = small_trees();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fx: Vec<AbstractTree> = pool.choose_multiple(&mut rng, nx).cloned().collect();
        let mut fy: Vec<AbstractTree> = pool.choose_multiple(&mut rng, ny).cloned().collect();
        fx.sort();
        fy.sort();
        let mut scored: Vec<(usize, String, String)> = Vec::new();
        for x in &fx {
            for y in &fy {
                scored.push((mismatch_cost(x, y), x.to_string(), y.to_string()));
            }
        }
        scored.sort();
        let (bx, by, diffs) = best_pair(&fx, &fy).unwrap();
        prop_assert_eq!((bx.to_string(), by.to_string()), (scored[0].1.clone(), scored[0].2.clone()));
        prop_assert_eq!(diffs.iter().map(TreeDiff::size).sum::<usize>(), scored[0].0);
    }

    #[test]
    fn intersection_is_commutative_and_contained(seed in any::<u64>(), na in 0usize..6, nb in 0usize..6) {
        let pool = small_trees();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<AbstractTree> = pool[..40].choose_multiple(&mut rng, na).cloned().collect();
        let b: Vec<AbstractTree> = pool[..40].choose_multiple(&mut rng, nb).cloned().collect();
        let ab = forest_intersect(&a, &b);
        prop_assert_eq!(&ab, &forest_intersect(&b, &a));
        prop_assert!(ab.iter().all(|t| a.contains(t) && b.contains(t)));
        prop_assert!(a.iter().filter(|t| b.contains(t)).all(|t| ab.contains(t)));
    }

    #[test]
    fn diffs_are_empty_iff_trees_are_equal(i in 0usize..10_000, j in 0usize..10_000) {
        let pool = small_trees();
        let (x, y) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        let d = tree_diff(x, y);
        prop_assert_eq!(d.is_empty(), x == y);
        for diff in &d {
            prop_assert_eq!(x.subtree(&diff.path), Some(&diff.x));
            prop_assert_eq!(y.subtree(&diff.path), Some(&diff.y));
        }
    }
}

#[test]
fn best_pair_of_empty_forest_is_an_error() {
    assert!(best_pair(&[], &[t("a")]).is_err());
    let shared = t("(f a)");
    let (x, y, d) = best_pair(&[t("(f b)"), shared.clone()], std::slice::from_ref(&shared)).unwrap();
    assert_eq!((x, y), (shared.clone(), shared));
    assert!(d.is_empty());
}
