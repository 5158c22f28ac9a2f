//! Seeded random corpora of TBoxes, ABoxes, grammars and semilinear sets,
//! plus small independent oracles used by several test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use telx_core::grammar::{GSymbol, Grammar};
use telx_core::semilinear::{LinearSet, SemilinearSet};
use telx_core::{ABox, ConceptInclusion, Fact, Rigidity, TBox};

/// Deterministic generator for a named corpus.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which syntactic fragment to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Shifts in `[0, 3]`, conjunctions allowed.
    Future,
    /// Shifts in `[−3, 3]`, no conjunctions.
    Linear,
    /// Shifts in `[−3, 3]`, no conjunctions, every role rigid.
    LinearRigid,
    /// Shifts in `[−3, 3]`, conjunctions allowed.
    General,
}

const CONCEPTS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
const ROLES: [&str; 3] = ["r", "s", "t"];

/// A random TBox with at most 6 concepts, 3 roles and 8 inclusions.
pub fn random_tbox(rng: &mut ChaCha8Rng, shape: Shape) -> TBox {
    let n_concepts = rng.random_range(2..=CONCEPTS.len());
    let n_roles = rng.random_range(1..=ROLES.len());
    let n_incl = rng.random_range(1..=8);
    let concepts = &CONCEPTS[..n_concepts];
    let mut t = TBox::new();
    for r in &ROLES[..n_roles] {
        let rig = if shape == Shape::LinearRigid || rng.random_bool(0.5) { Rigidity::Rigid } else { Rigidity::Local };
        t.declare_role(*r, rig).unwrap();
    }
    let conj_ok = matches!(shape, Shape::Future | Shape::General);
    let (lo, hi) = if shape == Shape::Future { (0, 3) } else { (-3, 3) };
    let pick = |rng: &mut ChaCha8Rng| *concepts.choose(rng).unwrap();
    while t.len() < n_incl {
        let kind = rng.random_range(0..4);
        let ci = match kind {
            0 => ConceptInclusion::shift(pick(rng), rng.random_range(lo..=hi), pick(rng)),
            1 if conj_ok => ConceptInclusion::conj(pick(rng), pick(rng), pick(rng)),
            1 => ConceptInclusion::shift(pick(rng), rng.random_range(lo..=hi), pick(rng)),
            2 => ConceptInclusion::exists_right(pick(rng), *ROLES[..n_roles].choose(rng).unwrap(), pick(rng)),
            _ => ConceptInclusion::exists_left(*ROLES[..n_roles].choose(rng).unwrap(), pick(rng), pick(rng)),
        };
        t.insert(ci);
    }
    for c in concepts {
        t.declare_concept(*c);
    }
    t
}

/// A random ABox over individuals `a`, `b`, `c` with timestamps in
/// `[0, 3]`, using the concepts and roles of `t`.
pub fn random_abox(rng: &mut ChaCha8Rng, t: &TBox) -> ABox {
    let inds = ["a", "b", "c"];
    let concepts: Vec<_> = t.concepts().iter().cloned().collect();
    let roles: Vec<_> = t.roles().keys().cloned().collect();
    let mut abox = ABox::new();
    let n = rng.random_range(1..=4);
    for _ in 0..n {
        let f = Fact::concept(concepts.choose(rng).unwrap().clone(), inds.choose(rng).unwrap(), rng.random_range(0..=3));
        abox.insert(f).unwrap();
    }
    for _ in 0..rng.random_range(0..=2) {
        if let Some(r) = roles.choose(rng) {
            let f = Fact::role(r.clone(), inds.choose(rng).unwrap(), inds.choose(rng).unwrap(), rng.random_range(0..=3));
            abox.insert(f).unwrap();
        }
    }
    abox
}

/// A random unary grammar over `c` with nonterminals `N1…Nk` (k ≤ 3).
/// Conjuncts are ε, `c^1..3`, or one or two nonterminals.
pub fn random_unary_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let mut g = Grammar::new();
    g.add_terminal('c');
    let k = rng.random_range(1..=3);
    let nts: Vec<_> = (1..=k).map(|i| g.add_nonterminal(format!("N{i}"))).collect();
    g.set_start(Some(nts[0]));
    for &lhs in &nts {
        for _ in 0..rng.random_range(1..=3) {
            let n_conj = if rng.random_bool(0.3) { 2 } else { 1 };
            let conjuncts = (0..n_conj)
                .map(|_| match rng.random_range(0..6) {
                    0 => vec![],
                    1 | 2 => vec![GSymbol::Terminal('c'); rng.random_range(1..=3)],
                    3 => vec![GSymbol::Nonterminal(*nts.choose(rng).unwrap())],
                    _ => vec![GSymbol::Nonterminal(*nts.choose(rng).unwrap()), GSymbol::Nonterminal(*nts.choose(rng).unwrap())],
                })
                .collect();
            g.add_rule(lhs, conjuncts).unwrap();
        }
    }
    g
}

/// A random semilinear set: up to 3 components, offsets and periods in
/// `[−10, 10]`, up to 2 periods each.
pub fn random_semilinear(rng: &mut ChaCha8Rng) -> SemilinearSet {
    let n = rng.random_range(0..=3);
    SemilinearSet::new(
        (0..n)
            .map(|_| {
                let periods: Vec<i64> = (0..rng.random_range(0..=2)).map(|_| rng.random_range(-10..=10)).collect();
                LinearSet::new(rng.random_range(-10..=10), periods)
            })
            .collect::<Vec<_>>(),
    )
}

/// Brute-force members of a linear set within `[−window, window]`, with
/// every coefficient up to `k_max` (at most two periods).
pub fn brute_linear(l: &LinearSet, k_max: i64, window: i64) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let mut push = |v: i64| {
        if v.abs() <= window {
            out.insert(v);
        }
    };
    match l.periods.as_slice() {
        [] => push(l.offset),
        [p] => (0..=k_max).for_each(|k| push(l.offset + k * p)),
        [p, q] => {
            for k in 0..=k_max {
                for j in 0..=k_max {
                    push(l.offset + k * p + j * q);
                }
            }
        }
        _ => panic!("at most two periods"),
    }
    out
}

/// Brute-force members of a semilinear set within `[−window, window]`.
pub fn brute_semilinear(s: &SemilinearSet, k_max: i64, window: i64) -> BTreeSet<i64> {
    s.components.iter().flat_map(|l| brute_linear(l, k_max, window)).collect()
}
