//! Query answering: grammar route against saturation on random future
//! knowledge bases.

mod common;

use common::Shape;
use proptest::prelude::*;
use telx_core::derive::{saturate, SaturationConfig};
use telx_core::taqa::{answer_taqa_grammar, build_query_tbox, TaqaError, TaqaQuery, TaqaReduction};
use telx_core::{ABox, ConceptName, Fact, KnowledgeBase, TBox, Term};

fn future_kb(seed: u64) -> KnowledgeBase {
    let mut rng = common::rng(seed);
    let t = common::random_tbox(&mut rng, Shape::Future);
    let a = common::random_abox(&mut rng, &t);
    KnowledgeBase::new(t, a)
}

/// A window that is complete for future TBoxes up to time `hi`.
fn future_window(kb: &KnowledgeBase, hi: i64) -> SaturationConfig {
    let (l, _) = kb.abox.time_range().unwrap();
    SaturationConfig::new(l, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grammar_route_agrees_with_saturation(seed in any::<u64>()) {
        let kb = future_kb(seed);
        let reduction = TaqaReduction::new(&kb.tbox, &kb.abox).unwrap();
        let sat = saturate(&kb, future_window(&kb, 9));
        let mut queries = Vec::new();
        for a in kb.abox.individuals() {
            for c in kb.tbox.concepts() {
                for n in -1..=9 {
                    queries.push(TaqaQuery { concept: c.clone(), individual: a.clone(), time: n });
                }
            }
        }
        let verdicts = reduction.answers(&queries).unwrap();
        for (q, v) in queries.iter().zip(&verdicts) {
            prop_assert_eq!(v.answer, sat.contains(&q.fact()), "{}({}, {})", q.concept, q.individual, q.time);
        }
        // Single queries agree with the batch.
        for (q, v) in queries.iter().zip(&verdicts).step_by(17) {
            prop_assert_eq!(&reduction.answer(q).unwrap(), v);
        }
    }

    #[test]
    fn indexed_facts_track_their_time(seed in any::<u64>()) {
        let kb = future_kb(seed);
        let ix = build_query_tbox(&kb.tbox, &kb.abox).unwrap();
        let index: std::collections::BTreeMap<ConceptName, i64> =
            ix.concept_index.iter().map(|((_, k), name)| (name.clone(), *k)).collect();
        for ((_, k), name) in ix.concept_index.iter().filter(|((_, k), _)| *k <= ix.m) {
            let probe = ABox::from_facts([Fact::concept(name.clone(), "a", 0)]).unwrap();
            let sat = saturate(&KnowledgeBase::new(ix.tprime.clone(), probe), SaturationConfig::new(0, ix.m - ix.l + 3));
            for f in sat.facts() {
                if let Fact::Concept { concept, time: n, .. } = f {
                    let l = index[&concept];
                    prop_assert!(l == k + n || (l == ix.m + 1 && k + n > ix.m), "{} at {} from index {}", concept, n, k);
                }
            }
        }
    }

    #[test]
    fn later_facts_do_not_change_earlier_answers(seed in any::<u64>(), extra in 0usize..6) {
        let kb = future_kb(seed);
        let (_, m) = kb.abox.time_range().unwrap();
        let concepts: Vec<ConceptName> = kb.tbox.concepts().iter().cloned().collect();
        let mut bigger = kb.abox.clone();
        bigger.insert(Fact::concept(concepts[extra % concepts.len()].clone(), "a", m + 2)).unwrap();
        let mut queries = Vec::new();
        for a in kb.abox.individuals() {
            for c in &concepts {
                for n in 0..=m + 1 {
                    queries.push(TaqaQuery { concept: c.clone(), individual: a.clone(), time: n });
                }
            }
        }
        let before = TaqaReduction::new(&kb.tbox, &kb.abox).unwrap().answers(&queries).unwrap();
        let after = TaqaReduction::new(&kb.tbox, &bigger).unwrap().answers(&queries).unwrap();
        for ((q, x), y) in queries.iter().zip(&before).zip(&after) {
            prop_assert_eq!(x.answer, y.answer, "{:?}", q);
        }
    }
}

#[test]
fn preconditions() {
    let past = telx_core::text::parse_tbox("A [= X^-1 B\n").unwrap();
    let abox = telx_core::text::parse_abox("A(a, 0)\n").unwrap();
    assert!(matches!(build_query_tbox(&past, &abox), Err(TaqaError::NotFutureFragment(_))));
    assert!(matches!(answer_taqa_grammar(&past, &abox, &TaqaQuery::new("B", "a", 0)), Err(TaqaError::NotFutureFragment(_))));
    assert!(matches!(build_query_tbox(&TBox::new(), &ABox::new()), Err(TaqaError::EmptyABox)));
}

#[test]
fn unknown_individuals_and_early_times_answer_no() {
    let t = telx_core::text::parse_tbox("A [= X A\n").unwrap();
    let abox = telx_core::text::parse_abox("A(a, 3)\n").unwrap();
    for q in [TaqaQuery::new("A", "b", 5), TaqaQuery::new("A", "a", 2)] {
        let v = answer_taqa_grammar(&t, &abox, &q).unwrap();
        assert!(!v.answer && v.nonterminal.is_none());
    }
    let v = answer_taqa_grammar(&t, &abox, &TaqaQuery::new("A", "a", 40)).unwrap();
    assert!(v.answer);
    assert_eq!(v.length, Some(37));
    let _ = Term::ind("a");
}
