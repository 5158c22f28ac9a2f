//! Acceptance suite: ten end-to-end checks, each with a time limit. Prints
//! one `PASS`/`FAIL` line per check and exits nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::Shape;
use rand::Rng;
use telx_core::datalog::{emit_datalog, eval_datalog_bounded, fit_shift_sets};
use telx_core::derive::{saturate, shift_profile, shift_set, SaturationConfig};
use telx_core::grammar::Grammar;
use telx_core::semilinear::detect_periodicity;
use telx_core::taqa::{answer_taqa_grammar, answer_taqa_saturation, TaqaQuery};
use telx_core::text::{parse_abox, parse_grammar, parse_tbox};
use telx_core::translate::{
    default_linear_oracle, exists_shift, grammar_to_tbox, linear_tbox_to_cfg, rigidise, rigidise_linear,
    tbox_to_conjunctive_grammar, ShiftBudget, ShiftWitness,
};
use telx_core::{ConceptName, Fact, KnowledgeBase, TBox};

const ALICE_TBOX: &str = include_str!("../../../data/alice.tel");
const ALICE_ABOX: &str = include_str!("../../../data/alice.abox");
const ANBNCN: &str = include_str!("../../../data/anbncn.cg");
const JEZ: &str = include_str!("../../../data/jez.cg");
const FOUR: &str = include_str!("../../../data/four.cg");
const LINEAR: &str = include_str!("../../../data/linear.tel");

type Check = Result<String, String>;

fn c(name: &str) -> ConceptName {
    ConceptName::new(name)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Shift sets within `±bound` between the concepts `names`, by saturation.
fn shift_table(t: &TBox, names: &BTreeSet<ConceptName>, bound: u64, cfg: SaturationConfig) -> BTreeMap<(ConceptName, ConceptName), BTreeSet<i64>> {
    let mut out = BTreeMap::new();
    for a in names {
        let profile = shift_profile(t, a, cfg);
        for b in names {
            let s: BTreeSet<i64> = profile.get(b).into_iter().flatten().copied().filter(|n| n.unsigned_abs() <= bound).collect();
            out.insert((a.clone(), b.clone()), s);
        }
    }
    out
}

fn alice() -> Check {
    let kb = KnowledgeBase::new(parse_tbox(ALICE_TBOX).unwrap(), parse_abox(ALICE_ABOX).unwrap());
    for (year, expected) in [(2026, false), (2027, false), (2028, true)] {
        let q = TaqaQuery::new("Happy", "alice", year);
        let grammar = answer_taqa_grammar(&kb.tbox, &kb.abox, &q).map_err(|e| e.to_string())?.answer;
        let sat = answer_taqa_saturation(&kb, &q, SaturationConfig::default_for(&kb, year - 2025));
        ensure(grammar == expected, || format!("grammar route says {grammar} for {year}"))?;
        ensure(sat.is_yes() == expected, || format!("saturation says {} for {year}", sat.is_yes()))?;
    }
    Ok("Happy(alice, 2028) only, on both routes".into())
}

fn alice_grammar() -> Check {
    let t = parse_tbox(ALICE_TBOX).unwrap();
    let pg = tbox_to_conjunctive_grammar(&t, true).map_err(|e| e.to_string())?;
    let lengths = |a: &str, b: &str| pg.grammar.language_lengths(pg.nt(&c(a), &c(b)).unwrap(), 20).unwrap();
    let happy = lengths("Prof", "Happy");
    let prof = lengths("Prof", "Prof");
    ensure(happy == (3..=20).collect(), || format!("N_Prof_Happy: {happy:?}"))?;
    ensure(prof == (0..=20).collect(), || format!("N_Prof_Prof: {prof:?}"))?;
    // Independent check against saturation.
    let sat = shift_set(&t, &c("Prof"), &c("Happy"), 20, SaturationConfig::future(20));
    ensure(sat == happy.iter().map(|&n| n as i64).collect(), || format!("saturation disagrees: {sat:?}"))?;
    Ok("{3..20} and {0..20}".into())
}

fn in_anbncn(w: &str) -> bool {
    let n = w.len() / 3;
    w.len() % 3 == 0 && *w == format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))
}

fn anbncn() -> Check {
    let doc = parse_grammar(ANBNCN).unwrap();
    let s = doc.grammar.start().unwrap();
    let mut diagonal = 0;
    for i in 0..=6 {
        for j in 0..=6 {
            for k in 0..=6 {
                let w = format!("{}{}{}", "a".repeat(i), "b".repeat(j), "c".repeat(k));
                if w.len() > 18 {
                    continue;
                }
                let yes = doc.grammar.member(s, &w).is_yes();
                ensure(yes == (i == j && j == k), || format!("member({w}) = {yes}"))?;
                diagonal += usize::from(yes);
            }
        }
    }
    let mut rng = common::rng(3);
    let mut off = 0;
    while off < 50 {
        let len = rng.random_range(1..=18);
        let w: String = (0..len).map(|_| ['a', 'b', 'c'][rng.random_range(0..3)]).collect();
        if in_anbncn(&w) {
            continue;
        }
        ensure(!doc.grammar.member(s, &w).is_yes(), || format!("accepted {w}"))?;
        off += 1;
    }
    Ok(format!("{diagonal} diagonal words accepted, 50 random off-language words rejected"))
}

fn jez() -> Check {
    let doc = parse_grammar(JEZ).unwrap();
    let n1 = doc.grammar.nt("N1").unwrap();
    let lengths = doc.grammar.language_lengths(n1, 100).map_err(|e| e.to_string())?;
    ensure(lengths == BTreeSet::from([1, 4, 16, 64]), || format!("lengths {lengths:?}"))?;
    let samples: BTreeSet<i64> = lengths.iter().map(|&n| n as i64).collect();
    let fit = detect_periodicity(&samples, 100);
    ensure(fit.is_none(), || format!("unexpected fit {}", fit.unwrap()))?;
    Ok("{1, 4, 16, 64}; no periodic fit".into())
}

fn four() -> Check {
    let doc = parse_grammar(FOUR).unwrap();
    let res = grammar_to_tbox(&doc.grammar).map_err(|e| e.to_string())?;
    let b1 = doc.grammar.nt("B1").unwrap();
    let shifts = shift_set(&res.tbox, &res.source_concept, &res.concept_of[&b1], 10, SaturationConfig::future(10));
    let lengths: BTreeSet<i64> = doc.grammar.language_lengths(b1, 10).unwrap().into_iter().map(|n| n as i64).collect();
    ensure(shifts == BTreeSet::from([1, 4]), || format!("shift set {shifts:?}"))?;
    ensure(shifts == lengths, || format!("language lengths {lengths:?}"))?;
    Ok("{1, 4} from both sides".into())
}

/// Balances of all words of length ≤ `max_len` over {c, d} in `L(nt)`,
/// enumerated one membership test at a time.
fn enumerated_balances(g: &Grammar, nt: usize, max_len: usize) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for len in 0..=max_len {
        for bits in 0u32..(1 << len) {
            let w: String = (0..len).map(|i| if bits >> i & 1 == 1 { 'd' } else { 'c' }).collect();
            if g.member(nt, &w).is_yes() {
                out.insert((len - 2 * bits.count_ones() as usize) as i64);
            }
        }
    }
    out
}

fn example6(oracle_time: &mut Duration) -> Check {
    let t = parse_tbox(LINEAR).unwrap();
    let (pg, exact) = linear_tbox_to_cfg(&t, default_linear_oracle(&t)).map_err(|e| e.to_string())?;
    ensure(exact, || "rigidisation not exact".into())?;
    let ae = pg.nt(&c("A"), &c("E")).unwrap();
    let w = exists_shift(&pg.grammar, ae, 2, ShiftBudget::new(12)).map_err(|e| e.to_string())?;
    ensure(w == ShiftWitness::Yes("ddcccc".into()), || format!("k = 2: {w:?}"))?;
    for k in [0, 1, 3] {
        let w = exists_shift(&pg.grammar, ae, k, ShiftBudget::new(12)).map_err(|e| e.to_string())?;
        ensure(w == ShiftWitness::NoWithinBudget, || format!("k = {k}: {w:?}"))?;
    }
    let start = Instant::now();
    let balances = enumerated_balances(&pg.grammar, ae, 12);
    *oracle_time = start.elapsed();
    for k in [0, 1, 3] {
        ensure(!balances.contains(&k), || format!("enumeration finds balance {k}"))?;
    }
    ensure(balances.contains(&2), || "enumeration misses balance 2".into())?;
    Ok(format!("witness ddcccc; balances of words up to length 12: {balances:?}"))
}

fn rigidisation() -> Check {
    let mut rng = common::rng(7);
    let mut counts = [0usize; 3];
    for i in 0..200 {
        let shape = [Shape::General, Shape::Future, Shape::LinearRigid][i % 3];
        let t = common::random_tbox(&mut rng, shape);
        let before = shift_table(&t, t.concepts(), 8, SaturationConfig::for_shift_bound(&t, 8));
        let after = if shape == Shape::LinearRigid {
            let lin = rigidise_linear(&t, default_linear_oracle(&t)).map_err(|e| e.to_string())?;
            shift_table(&lin.tbox, t.concepts(), 8, SaturationConfig::for_shift_bound(&t, 8))
        } else {
            let r = rigidise(&t);
            shift_table(&r, t.concepts(), 8, SaturationConfig::for_shift_bound(&r, 8))
        };
        ensure(before == after, || format!("TBox #{i} ({shape:?}) changes its shift sets:\n{}", telx_core::text::serialize_tbox(&t)))?;
        counts[i % 3] += 1;
    }
    Ok(format!("{} general, {} future, {} linear rigid TBoxes agree", counts[0], counts[1], counts[2]))
}

fn round_trips() -> Check {
    let mut rng = common::rng(8);
    let mut pairs = 0usize;
    for i in 0..100 {
        let t = common::random_tbox(&mut rng, Shape::Future);
        let pg = tbox_to_conjunctive_grammar(&t, true).map_err(|e| e.to_string())?;
        let lengths = pg.grammar.all_language_lengths(10).map_err(|e| e.to_string())?;
        for ((a, b), shifts) in shift_table(&t, t.concepts(), 10, SaturationConfig::future(10)) {
            let nt = pg.nt(&a, &b).unwrap();
            let from_grammar: BTreeSet<i64> = lengths[nt].iter().map(|&n| n as i64).collect();
            ensure(from_grammar == shifts, || format!("TBox #{i}: N_{a}_{b}"))?;
            pairs += 1;
        }
    }
    let mut nts = 0usize;
    for i in 0..100 {
        let g = common::random_unary_grammar(&mut rng);
        let res = grammar_to_tbox(&g).map_err(|e| e.to_string())?;
        let profile = shift_profile(&res.tbox, &res.source_concept, SaturationConfig::future(10));
        for (nt, b) in &res.concept_of {
            let expected: BTreeSet<i64> = g.language_lengths(*nt, 10).unwrap().into_iter().map(|n| n as i64).collect();
            let got: BTreeSet<i64> = profile.get(b).into_iter().flatten().copied().filter(|&n| n <= 10).collect();
            ensure(got == expected, || format!("grammar #{i}: {b}"))?;
            nts += 1;
        }
    }
    Ok(format!("{pairs} concept pairs and {nts} nonterminals agree (100%)"))
}

fn datalog() -> Check {
    let mut rng = common::rng(9);
    let (mut refits, mut unconfirmed, mut compared) = (0, 0, 0usize);
    for i in 0..50 {
        let shape = if i % 2 == 0 { Shape::LinearRigid } else { Shape::Linear };
        let t = common::random_tbox(&mut rng, shape);
        let abox = common::random_abox(&mut rng, &t);
        let mut fitted = fit_shift_sets(&t, 10, 30);
        if !fitted.confirmed() {
            refits += 1;
            fitted = fit_shift_sets(&t, 30, 60);
            unconfirmed += usize::from(!fitted.confirmed());
        }
        let p = emit_datalog(&t, &fitted.sets).map_err(|e| e.to_string())?;
        let kb = KnowledgeBase::new(t, abox.clone());
        let keep = |f: &Fact| match f {
            Fact::Concept { concept, .. } => kb.tbox.concepts().contains(concept) && f.is_ground() && f.time().abs() <= 15,
            _ => false,
        };
        let from_program: BTreeSet<Fact> = eval_datalog_bounded(&p, &abox, -60, 60).into_iter().filter(keep).collect();
        let from_saturation: BTreeSet<Fact> = saturate(&kb, SaturationConfig::new(-60, 60)).facts().into_iter().filter(keep).collect();
        ensure(from_program == from_saturation, || {
            let extra: Vec<String> = from_program.difference(&from_saturation).map(|f| f.to_string()).collect();
            let missing: Vec<String> = from_saturation.difference(&from_program).map(|f| f.to_string()).collect();
            format!("KB #{i}: program adds {extra:?}, misses {missing:?}")
        })?;
        compared += from_saturation.len();
    }
    ensure(unconfirmed == 0, || format!("{unconfirmed} TBoxes have unconfirmed shift sets"))?;
    Ok(format!("50 KBs, {compared} facts in [-15, 15] agree; {refits} refits at bound 30"))
}

fn semilinear() -> Check {
    let mut rng = common::rng(10);
    for i in 0..500 {
        let s = common::random_semilinear(&mut rng);
        let brute = common::brute_semilinear(&s, 250, 100);
        for n in -100..=100 {
            ensure(s.member(n) == brute.contains(&n), || format!("set #{i} {s}: member({n})"))?;
        }
        let ep = s.to_eventually_periodic();
        for n in -200..=200 {
            ensure(ep.member(n) == s.member(n), || format!("set #{i} {s}: eventually periodic form differs at {n}"))?;
        }
    }
    Ok("500 sets agree with brute force and their periodic forms".into())
}

/// Runs `f` and returns its outcome with the elapsed time.
fn timed(f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let outcome = f();
    (outcome, start.elapsed())
}

fn main() {
    let secs = Duration::from_secs;
    let mut results: Vec<(usize, &str, Duration, Check, Duration)> = Vec::new();
    let mut push = |id, name, limit, (outcome, elapsed): (Check, Duration)| results.push((id, name, limit, outcome, elapsed));
    push(1, "alice scenario", secs(1), timed(alice));
    push(2, "pair grammar of the alice TBox", secs(1), timed(alice_grammar));
    push(3, "a^n b^n c^n membership", secs(1), timed(anbncn));
    push(4, "powers of four", secs(5), timed(jez));
    push(5, "grammar to TBox", secs(5), timed(four));
    // The exhaustive enumeration is the oracle, not the operation under
    // test, so its time is reported but not charged.
    let mut oracle = Duration::ZERO;
    let (outcome, elapsed) = timed(|| example6(&mut oracle));
    let outcome = outcome.map(|d| format!("{d}; enumeration oracle took {:.3} s", oracle.as_secs_f64()));
    push(6, "linear shift witnesses", secs(1), (outcome, elapsed.saturating_sub(oracle)));
    push(7, "rigidisation keeps shift sets", secs(60), timed(rigidisation));
    push(8, "TBox/grammar round trips", secs(120), timed(round_trips));
    push(9, "datalog against saturation", secs(60), timed(datalog));
    push(10, "semilinear sets", secs(30), timed(semilinear));

    let mut failed = 0;
    for (id, name, limit, outcome, elapsed) in results {
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow (limit {} s)", limit.as_secs())),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} {name} [{:.3} s / {} s]: {detail}", elapsed.as_secs_f64(), limit.as_secs());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
