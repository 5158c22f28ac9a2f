//! Semilinear sets against brute-force enumeration.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use telx_core::semilinear::{detect_periodicity, EventuallyPeriodic, LinearSet, SemilinearSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_matches_brute_force(seed in any::<u64>()) {
        let s = common::random_semilinear(&mut common::rng(seed));
        // Mixed-sign periods can need coefficients beyond 100 to reach
        // |n| ≤ 100 (e.g. 5 − 105·1 + 0·6 = −100), hence the larger cap.
        let brute = common::brute_semilinear(&s, 250, 100);
        for n in -100..=100 {
            prop_assert_eq!(s.member(n), brute.contains(&n), "{} in {}", n, s);
        }
    }

    #[test]
    fn eventually_periodic_form_is_exact(seed in any::<u64>()) {
        let s = common::random_semilinear(&mut common::rng(seed));
        let ep = s.to_eventually_periodic();
        for n in -200..=200 {
            prop_assert_eq!(ep.member(n), s.member(n), "{} in {} vs {}", n, s, ep);
        }
        let back = ep.to_semilinear();
        for n in -200..=200 {
            prop_assert_eq!(back.member(n), s.member(n));
        }
        // Normal forms are canonical.
        prop_assert_eq!(back.to_eventually_periodic(), ep);
    }

    #[test]
    fn simple_decomposition_covers_the_set(seed in any::<u64>()) {
        let s = common::random_semilinear(&mut common::rng(seed));
        let d = s.to_simple_sets();
        for n in -150..=150 {
            let covered = d.points.contains(&n) || d.simple.iter().any(|x| x.member(n));
            prop_assert_eq!(covered, s.member(n));
        }
        prop_assert!(d.simple.iter().all(|x| x.period != 0));
    }

    #[test]
    fn detection_recovers_sampled_sets(seed in any::<u64>()) {
        let s = common::random_semilinear(&mut common::rng(seed));
        // The window must hold the true threshold plus two periods, twice over.
        let exact = s.to_eventually_periodic();
        let reach = |p: &Option<telx_core::semilinear::PeriodicPart>| p.as_ref().map_or(0, |p| p.threshold + 2 * p.period);
        let bound = 2 * reach(&exact.future).max(reach(&exact.past)).max(exact.core.iter().map(|n| n.abs()).max().unwrap_or(0)).max(5) + 2;
        prop_assume!(bound <= 1200);
        let samples: BTreeSet<i64> = (-bound..=bound).filter(|&n| s.member(n)).collect();
        let ep = detect_periodicity(&samples, bound as u64).expect("window holds two periods past the threshold");
        prop_assert_eq!(&ep, &exact);
        for n in -3 * bound..=3 * bound {
            prop_assert_eq!(ep.member(n), s.member(n), "{}", n);
        }
    }
}

/// The least size of a semilinear set agreeing with `target` on
/// `[−window, window]`, among unions of at most two linear sets with at most
/// one period each and all numbers in `[−10, 10]`.
fn least_toy_size(target: &dyn Fn(i64) -> bool, window: i64) -> Option<u64> {
    let mut singles = Vec::new();
    for b in -10..=10i64 {
        singles.push(LinearSet::point(b));
        for p in -10..=10i64 {
            if p != 0 {
                singles.push(LinearSet::new(b, [p]));
            }
        }
    }
    let agrees = |s: &SemilinearSet| (-window..=window).all(|n| s.member(n) == target(n));
    let mut best: Option<u64> = None;
    if agrees(&SemilinearSet::empty()) {
        return Some(0);
    }
    for (i, l1) in singles.iter().enumerate() {
        let s = SemilinearSet::new([l1.clone()]);
        if agrees(&s) {
            best = Some(best.map_or(s.size(), |b| b.min(s.size())));
        }
        for l2 in &singles[i + 1..] {
            let s = SemilinearSet::new([l1.clone(), l2.clone()]);
            if best.is_some_and(|b| s.size() >= b) {
                continue;
            }
            if agrees(&s) {
                best = Some(s.size());
            }
        }
    }
    best
}

#[test]
fn detected_representations_are_never_larger_than_the_toy_minimum() {
    let toys = [
        SemilinearSet::new([LinearSet::new(2, [3])]),
        SemilinearSet::new([LinearSet::point(5)]),
        SemilinearSet::new([LinearSet::new(3, [1]), LinearSet::new(-2, [-2])]),
        SemilinearSet::new([LinearSet::new(0, [4])]),
        SemilinearSet::new([LinearSet::new(1, [2]), LinearSet::point(-4)]),
    ];
    for s in toys {
        let samples: BTreeSet<i64> = (-60..=60).filter(|&n| s.member(n)).collect();
        let detected = detect_periodicity(&samples, 60).unwrap().to_semilinear();
        let least = least_toy_size(&|n| s.member(n), 60).unwrap();
        assert!(detected.size() <= least.max(s.size()), "{s}: detected {detected} of size {}", detected.size());
        assert!(least <= s.size());
    }
}

#[test]
fn eventually_periodic_normalisation() {
    // {2 + 3k}: core {2}, future tail from 2 with period 3.
    let ep = EventuallyPeriodic::normalize(|n| n >= 2 && (n - 2) % 3 == 0, (10, 6), (1, 1));
    assert_eq!(ep.core, BTreeSet::from([2]));
    let f = ep.future.unwrap();
    assert_eq!((f.threshold, f.period, f.residues), (2, 3, BTreeSet::from([2])));
    assert!(ep.past.is_none());
}

#[test]
fn mixed_sign_periods_cover_a_lattice() {
    let s = SemilinearSet::new([LinearSet::new(0, [4, -6])]);
    for n in -100..=100 {
        assert_eq!(s.member(n), n % 2 == 0, "{n}");
    }
}

#[test]
fn empty_and_zero_periods() {
    assert!(!SemilinearSet::empty().member(0));
    let s = SemilinearSet::new([LinearSet::new(3, [0, 0])]);
    assert!(s.member(3) && !s.member(4));
    assert_eq!(detect_periodicity(&BTreeSet::new(), 10), Some(EventuallyPeriodic::finite([])));
}

