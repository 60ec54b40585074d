use std::collections::BTreeMap;
use std::sync::OnceLock;

use mallgames::compose::{check_confluence, check_functoriality, compose, search_functoriality_failure};
use mallgames::corpus::{run_corpus, Corpus, Report};
use mallgames::export::strategy_doc;
use mallgames::focus::{check_focused, extract_focused, focused_proof_search};
use mallgames::formula::{formulas_up_to, literals, Formula};
use mallgames::game::VarEnv;
use mallgames::proof::{Proof, ProofSearch};
use mallgames::strategy::{check_properties, deseq, interpret, Strategy};
use proptest::prelude::*;
use proptest::sample::select;

fn env() -> VarEnv {
    VarEnv::atomic(["X", "Y"])
}

struct Case {
    proof: Proof,
    first: Formula,
    second: Formula,
    strategy: Strategy,
}

/// Courteous interpretations of proofs of `⊢ A, B` for formulas of depth at
/// most two over two atoms.
fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let fs = formulas_up_to(2, &literals(&["X", "Y"]));
        let mut search = ProofSearch::new();
        let mut out = Vec::new();
        for a in &fs {
            for b in &fs {
                let seq = [a.clone(), b.clone()];
                if !search.is_provable(&seq) {
                    continue;
                }
                for proof in search.proofs(&seq, 2) {
                    let strategy = deseq(&interpret(&proof, &env()).unwrap());
                    out.push(Case { proof, first: a.clone(), second: b.clone(), strategy });
                }
            }
        }
        out
    })
}

fn pairs() -> &'static [(usize, usize)] {
    static PAIRS: OnceLock<Vec<(usize, usize)>> = OnceLock::new();
    PAIRS.get_or_init(|| {
        let cs = cases();
        let mut by_first: BTreeMap<&Formula, Vec<usize>> = BTreeMap::new();
        for (j, c) in cs.iter().enumerate() {
            by_first.entry(&c.first).or_default().push(j);
        }
        let mut out = Vec::new();
        for (i, c) in cs.iter().enumerate() {
            if let Some(js) = by_first.get(&c.second.dual()) {
                out.extend(js.iter().map(|&j| (i, j)));
            }
        }
        out
    })
}

#[test]
fn there_are_many_composable_pairs() {
    assert!(pairs().len() > 100, "{}", pairs().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interactions_are_confluent(k in select((0..pairs().len()).collect::<Vec<_>>())) {
        let (i, j) = pairs()[k];
        let (s, t) = (&cases()[i].strategy, &cases()[j].strategy);
        prop_assert_eq!(check_confluence(s, t).unwrap(), None);
    }

    #[test]
    fn composition_stays_ingenuous_and_scheduled(k in select((0..pairs().len()).collect::<Vec<_>>())) {
        let (i, j) = pairs()[k];
        let u = compose(&cases()[i].strategy, &cases()[j].strategy, &env()).unwrap();
        let r = check_properties(&u);
        prop_assert!(r.all_hold(), "{} then {}\n{}", cases()[i].proof, cases()[j].proof, r);
    }

    #[test]
    fn definable_pairs_are_functorial(k in select((0..pairs().len()).collect::<Vec<_>>())) {
        let (i, j) = pairs()[k];
        let f = check_functoriality(&cases()[i].strategy, &cases()[j].strategy, &env()).unwrap();
        prop_assert!(f.holds, "{} then {}\n{}", cases()[i].proof, cases()[j].proof, f);
    }

    #[test]
    fn extraction_is_included_and_certified(k in select((0..cases().len()).collect::<Vec<_>>())) {
        let c = &cases()[k];
        let env = env();
        let (sub, q) = extract_focused(&c.strategy, &env, 10_000).unwrap();
        prop_assert!(sub.is_subset(&c.strategy));
        prop_assert!(check_focused(&sub));
        let seq = [c.first.clone(), c.second.clone()];
        let within = focused_proof_search(&seq, &env, Some(&c.strategy), 10_000).unwrap();
        prop_assert!(within.contains(&q));
        let certified = deseq(&interpret(&q, &env).unwrap());
        prop_assert_eq!(certified.edges(), sub.edges());
    }

    #[test]
    fn focused_search_is_complete(k in select((0..cases().len()).collect::<Vec<_>>())) {
        let c = &cases()[k];
        let seq = [c.first.clone(), c.second.clone()];
        prop_assert!(!focused_proof_search(&seq, &env(), None, 100).unwrap().is_empty());
    }
}

fn corpus(json: serde_json::Value) -> Corpus {
    serde_json::from_value(json).unwrap()
}

fn without_timings(mut r: Report) -> Report {
    for c in &mut r.checks {
        c.millis = 0;
    }
    r
}

#[test]
fn injected_unscheduled_strategy_breaks_functoriality_there() {
    let witness = search_functoriality_failure(5).witness.expect("a witness at size five");
    assert!(witness.left_scheduling.is_some() || witness.right_scheduling.is_some());
    let mut left = serde_json::to_value(strategy_doc(&witness.left)).unwrap();
    left["name"] = "injected".into();
    let mut right = serde_json::to_value(strategy_doc(&witness.right)).unwrap();
    right["name"] = "partner".into();

    let control = corpus(serde_json::json!({
        "proofs": [{"name": "copycat", "proof": "ax(0,1) : |- ~X, X"}],
        "strategies": [right.clone()],
    }));
    let clean = run_corpus(&control).unwrap();
    assert!(clean.check(8).unwrap().pass, "{}", clean.to_json());

    let dirty = corpus(serde_json::json!({
        "proofs": [{"name": "copycat", "proof": "ax(0,1) : |- ~X, X"}],
        "strategies": [left, right],
    }));
    let report = run_corpus(&dirty).unwrap();
    let c8 = report.check(8).unwrap();
    assert!(!c8.pass);
    assert!(c8.failures >= 1);
    for w in &c8.witnesses {
        assert!(w.starts_with("injected") || w.contains("then injected"), "{w}");
    }
    assert!(c8.witnesses.iter().any(|w| w.starts_with("injected") && w.contains("then partner")));
}

#[test]
fn reports_are_deterministic() {
    let c = corpus(serde_json::json!({
        "proofs": [
            {"name": "copycat", "proof": "ax(0,1) : |- ~X, X"},
            {"name": "par", "proof": "par(0, ax(0,1)) : |- (~X | X)"},
        ],
        "generate": {"atoms": ["X"], "depth": 2},
    }));
    let a = without_timings(run_corpus(&c).unwrap());
    let b = without_timings(run_corpus(&c).unwrap());
    assert_eq!(a, b);
    assert!(!a.checks.is_empty());
}
