//! Round trips between TBoxes and grammars, and the two rigidisations,
//! checked against the saturation oracle on random instances.

mod common;

use std::collections::BTreeSet;

use common::Shape;
use proptest::prelude::*;
use telx_core::derive::{shift_profile, shift_set, SaturationConfig};
use telx_core::grammar::GSymbol;
use telx_core::translate::{
    default_linear_oracle, exists_shift, grammar_to_tbox, linear_tbox_to_cfg, rigidise, rigidise_linear,
    tbox_to_conjunctive_grammar, ShiftBudget, ShiftWitness, TranslateError,
};
use telx_core::{ConceptName, TBox};

fn tbox(seed: u64, shape: Shape) -> TBox {
    common::random_tbox(&mut common::rng(seed), shape)
}

/// Shift sets within `±bound` for every pair of concepts of `names`.
fn shift_table(t: &TBox, names: &BTreeSet<ConceptName>, bound: u64, cfg: SaturationConfig) -> Vec<(ConceptName, ConceptName, BTreeSet<i64>)> {
    let mut out = Vec::new();
    for a in names {
        let profile = shift_profile(t, a, cfg);
        for b in names {
            let s = profile.get(b).cloned().unwrap_or_default();
            out.push((a.clone(), b.clone(), s.into_iter().filter(|n| n.unsigned_abs() <= bound).collect()));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn grammar_of_a_future_tbox_matches_saturation(seed in any::<u64>()) {
        let t = tbox(seed, Shape::Future);
        let pg = tbox_to_conjunctive_grammar(&t, true).unwrap();
        let lengths = pg.grammar.all_language_lengths(12).unwrap();
        for (a, b, shifts) in shift_table(&t, t.concepts(), 12, SaturationConfig::future(12)) {
            let nt = pg.nt(&a, &b).unwrap();
            let from_grammar: BTreeSet<i64> = lengths[nt].iter().map(|&n| n as i64).collect();
            prop_assert_eq!(from_grammar, shifts, "N_{}_{}", a, b);
        }
    }

    #[test]
    fn tbox_of_a_unary_grammar_matches_membership(seed in any::<u64>()) {
        let g = common::random_unary_grammar(&mut common::rng(seed));
        let res = grammar_to_tbox(&g).unwrap();
        prop_assert!(res.tbox.validate().is_empty());
        prop_assert!(res.tbox.classify().is_future && res.tbox.classify().rigid_only);
        let profile = shift_profile(&res.tbox, &res.source_concept, SaturationConfig::future(12));
        for (nt, b) in &res.concept_of {
            let expected: BTreeSet<i64> = g.language_lengths(*nt, 12).unwrap().into_iter().map(|n| n as i64).collect();
            prop_assert_eq!(profile.get(b).cloned().unwrap_or_default(), expected, "{}", b);
        }
    }

    #[test]
    fn index_sequences_sum_their_parts(seed in any::<u64>()) {
        let g = common::random_unary_grammar(&mut common::rng(seed));
        let res = grammar_to_tbox(&g).unwrap();
        let profile = shift_profile(&res.tbox, &res.source_concept, SaturationConfig::future(10));
        let of = |c: &ConceptName| -> BTreeSet<i64> {
            profile.get(c).cloned().unwrap_or_default().into_iter().filter(|&n| n <= 10).collect()
        };
        for (seq, (c, role)) in &res.helpers {
            prop_assert_eq!(role.is_some(), seq.len() >= 2);
            // Sums n₁ + … + n_k with each nⱼ a shift of B_{iⱼ}.
            let mut sums = BTreeSet::from([0i64]);
            for i in seq {
                let parts = of(&ConceptName::new(format!("B_{i}")));
                sums = sums.iter().flat_map(|s| parts.iter().map(move |p| s + p)).filter(|&n| n <= 10).collect();
            }
            prop_assert_eq!(of(c), sums, "{:?}", seq);
        }
    }

    #[test]
    fn grammar_tbox_grammar_keeps_languages(seed in any::<u64>()) {
        let g = common::random_unary_grammar(&mut common::rng(seed));
        let res = grammar_to_tbox(&g).unwrap();
        let pg = tbox_to_conjunctive_grammar(&res.tbox, true).unwrap();
        prop_assert!(pg.grammar.rules().iter().all(|r| r.conjuncts.len() <= 2));
        let lengths = pg.grammar.all_language_lengths(12).unwrap();
        for (nt, b) in &res.concept_of {
            let key = pg.nt(&res.source_concept, b).unwrap();
            prop_assert_eq!(&lengths[key], &g.language_lengths(*nt, 12).unwrap());
        }
    }

    #[test]
    fn rigidise_keeps_shift_sets(seed in any::<u64>(), general in any::<bool>()) {
        let t = tbox(seed, if general { Shape::General } else { Shape::Future });
        let r = rigidise(&t);
        prop_assert!(r.classify().rigid_only);
        prop_assert!(r.validate().is_empty());
        prop_assert_eq!(r.classify().is_future, t.classify().is_future);
        let cfg_t = SaturationConfig::for_shift_bound(&t, 8);
        let cfg_r = SaturationConfig::for_shift_bound(&r, 8);
        prop_assert_eq!(shift_table(&t, t.concepts(), 8, cfg_t), shift_table(&r, t.concepts(), 8, cfg_r));
    }

    #[test]
    fn linear_rigidisation_keeps_shift_sets(seed in any::<u64>()) {
        let t = tbox(seed, Shape::LinearRigid);
        let lin = rigidise_linear(&t, default_linear_oracle(&t)).unwrap();
        prop_assert!(lin.exact);
        prop_assert!(lin.tbox.validate().is_empty());
        let cfg = SaturationConfig::for_shift_bound(&t, 8);
        prop_assert_eq!(shift_table(&t, t.concepts(), 8, cfg), shift_table(&lin.tbox, t.concepts(), 8, cfg));
    }

    #[test]
    fn linear_grammar_balances_are_shifts(seed in any::<u64>()) {
        let t = tbox(seed, Shape::LinearRigid);
        let (pg, exact) = linear_tbox_to_cfg(&t, default_linear_oracle(&t)).unwrap();
        prop_assert!(exact);
        let cfg = SaturationConfig::for_shift_bound(&t, 4);
        let budget = ShiftBudget::new(16);
        for a in t.concepts() {
            for b in t.concepts() {
                let shifts = shift_set(&t, a, b, 4, cfg);
                let nt = pg.nt(a, b).unwrap();
                for n in -4..=4 {
                    match exists_shift(&pg.grammar, nt, n, budget).unwrap() {
                        ShiftWitness::Yes(w) => {
                            let balance = w.chars().filter(|&x| x == 'c').count() as i64 - w.chars().filter(|&x| x == 'd').count() as i64;
                            prop_assert_eq!(balance, n);
                            prop_assert!(pg.grammar.member(nt, &w).is_yes());
                            prop_assert!(shifts.contains(&n), "{} ⊑ X^{} {} witnessed by {:?} but not derived", a, n, b, w);
                        }
                        ShiftWitness::NoWithinBudget => prop_assert!(!shifts.contains(&n), "{} ⊑ X^{} {} missed", a, n, b),
                    }
                }
            }
        }
    }
}

#[test]
fn negative_shift_is_rejected_by_the_future_grammar() {
    let t = telx_core::text::parse_tbox(include_str!("../../../data/linear.tel")).unwrap();
    assert!(matches!(tbox_to_conjunctive_grammar(&t, true), Err(TranslateError::NotFutureFragment(_))));
    let pg = tbox_to_conjunctive_grammar(&t, false).unwrap();
    assert!(pg.grammar.terminals().contains(&'d'));
}

#[test]
fn conjunctions_are_rejected_by_the_linear_translations() {
    let t = telx_core::text::parse_tbox(include_str!("../../../data/alice.tel")).unwrap();
    assert!(matches!(rigidise_linear(&t, default_linear_oracle(&t)), Err(TranslateError::NotLinearFragment(_))));
    assert!(matches!(linear_tbox_to_cfg(&t, default_linear_oracle(&t)), Err(TranslateError::NotLinearFragment(_))));
}

#[test]
fn linear_grammar_is_context_free() {
    let t = telx_core::text::parse_tbox(include_str!("../../../data/local.tel")).unwrap();
    let (pg, exact) = linear_tbox_to_cfg(&t, default_linear_oracle(&t)).unwrap();
    assert!(!exact);
    assert!(pg.grammar.rules().iter().all(|r| r.conjuncts.len() == 1));
    assert!(pg.grammar.rules().iter().all(|r| r.conjuncts[0].iter().all(|s| !matches!(s, GSymbol::Terminal(x) if *x != 'c' && *x != 'd'))));
}

#[test]
fn exists_shift_on_epsilon() {
    let g = telx_core::text::parse_grammar("terminals: c d\nN -> _\n").unwrap().grammar;
    let n = g.nt("N").unwrap();
    assert_eq!(exists_shift(&g, n, 0, ShiftBudget::new(3)).unwrap(), ShiftWitness::Yes(String::new()));
    assert_eq!(exists_shift(&g, n, 1, ShiftBudget::new(3)).unwrap(), ShiftWitness::NoWithinBudget);
}
