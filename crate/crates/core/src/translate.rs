//! Translations between TBoxes and grammars.
//!
//! * [`rigidise`] replaces local roles by rigid ones while preserving all
//!   entailments `A ⊑ ○ⁿ B` between the original concept names.
//! * [`tbox_to_conjunctive_grammar`] builds, for a future TBox, a unary
//!   conjunctive grammar with a nonterminal `N_{AB}` per concept pair such
//!   that `cⁿ ∈ L(N_{AB})` iff `T ⊨ A ⊑ ○ⁿ B`.
//! * [`grammar_to_tbox`] goes the other way: a future TBox with a concept
//!   `A` and a concept `B_i` per nonterminal such that
//!   `T ⊨ A ⊑ ○ⁿ B_i` iff `cⁿ ∈ L(B_i)`.
//! * [`rigidise_linear`] and [`linear_tbox_to_cfg`] handle the linear
//!   fragment (no conjunction, shifts of any sign): the grammar is
//!   context-free over `{c, d}` and `T ⊨ A ⊑ ○ⁿ B` iff some word of
//!   `L(N_{AB})` has `#c − #d = n`. [`exists_shift`] searches for such words.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::derive::{shift_profile, SaturationConfig};
use crate::grammar::{GSymbol, Grammar, GrammarClass, GrammarError, GrammarRule, NtId};
use crate::model::{ConceptInclusion, ConceptName, Rigidity, RoleName, TBox};
use crate::text::GrammarDocument;
use crate::util::fresh_name;

/// Why a translation was refused.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    /// A negative shift occurs where the future fragment is required.
    #[error("not in the future fragment: `{0}` shifts into the past")]
    NotFutureFragment(ConceptInclusion),
    /// A conjunction occurs where the linear fragment is required.
    #[error("not in the linear fragment: `{0}` is a conjunction")]
    NotLinearFragment(ConceptInclusion),
    /// The grammar cannot be translated.
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

fn taken_names(tbox: &TBox) -> BTreeSet<String> {
    tbox.concepts()
        .iter()
        .map(|c| c.as_str().to_string())
        .chain(tbox.roles().keys().map(|r| r.as_str().to_string()))
        .collect()
}

/// Replaces every local role by a fresh rigid role, guarding each
/// existential successor so that facts only flow back along the edge at the
/// time point it was created.
///
/// For a local `r`, `A ⊑ ∃r.B` becomes `A ⊑ ∃r'.B_r` and `B_r ⊑ B`, and
/// `∃r.A ⊑ B` becomes `A ⊓ C_r ⊑ A'_r` and `∃r'.A'_r ⊑ B` for every guard
/// `C_r`. Guards are only introduced for fillers of existentials over `r`,
/// the only concepts whose guard can ever hold. Rigid roles are kept.
pub fn rigidise(tbox: &TBox) -> TBox {
    let local: BTreeSet<RoleName> = tbox.used_roles().into_iter().filter(|r| !tbox.is_rigid(r)).collect();
    if local.is_empty() {
        return tbox.clone();
    }
    let mut taken = taken_names(tbox);
    let mut out = TBox::new();
    for (r, rig) in tbox.roles() {
        if *rig == Rigidity::Rigid {
            out.declare_role(r.clone(), Rigidity::Rigid).expect("fresh declaration");
        }
    }
    for c in tbox.concepts() {
        out.declare_concept(c.clone());
    }
    let mut rigid_copy: BTreeMap<RoleName, RoleName> = BTreeMap::new();
    for r in &local {
        let r2 = RoleName::new(fresh_name(format!("{r}'"), &mut taken));
        out.declare_role(r2.clone(), Rigidity::Rigid).expect("fresh role");
        rigid_copy.insert(r.clone(), r2);
    }
    // Guards B_r per (filler, role).
    let mut guards: BTreeMap<(RoleName, ConceptName), ConceptName> = BTreeMap::new();
    for ci in tbox.inclusions() {
        if let ConceptInclusion::ExistsRight { role, filler, .. } = ci {
            if local.contains(role) && !guards.contains_key(&(role.clone(), filler.clone())) {
                let g = ConceptName::new(fresh_name(format!("{filler}_{role}"), &mut taken));
                guards.insert((role.clone(), filler.clone()), g);
            }
        }
    }
    let mut primed: BTreeMap<(RoleName, ConceptName), ConceptName> = BTreeMap::new();
    for ci in tbox.inclusions() {
        match ci {
            ConceptInclusion::ExistsRight { lhs, role, filler } if local.contains(role) => {
                let g = guards[&(role.clone(), filler.clone())].clone();
                out.insert(ConceptInclusion::exists_right(lhs.clone(), rigid_copy[role].clone(), g.clone()));
                out.insert(ConceptInclusion::sub(g, filler.clone()));
            }
            ConceptInclusion::ExistsLeft { role, filler, rhs } if local.contains(role) => {
                let a2 = primed
                    .entry((role.clone(), filler.clone()))
                    .or_insert_with(|| ConceptName::new(fresh_name(format!("{filler}'_{role}"), &mut taken)))
                    .clone();
                for ((gr, _), g) in &guards {
                    if gr == role {
                        out.insert(ConceptInclusion::conj(filler.clone(), g.clone(), a2.clone()));
                    }
                }
                out.insert(ConceptInclusion::exists_left(rigid_copy[role].clone(), a2.clone(), rhs.clone()));
                out.declare_concept(a2);
            }
            other => {
                out.insert(other.clone());
            }
        }
    }
    out
}

/// A grammar with one nonterminal `N_{AB}` per pair of concept names.
#[derive(Clone, Debug)]
pub struct PairGrammar {
    /// The grammar.
    pub grammar: Grammar,
    /// The nonterminal of each concept pair.
    pub keys: BTreeMap<(ConceptName, ConceptName), NtId>,
    /// The (rigid-only) TBox the grammar was built from.
    pub source: TBox,
}

impl PairGrammar {
    /// The nonterminal `N_{AB}`.
    pub fn nt(&self, a: &ConceptName, b: &ConceptName) -> Option<NtId> {
        self.keys.get(&(a.clone(), b.clone())).copied()
    }

    /// The grammar together with its key sidecar, for serialisation.
    pub fn to_document(&self) -> GrammarDocument {
        let mut doc = GrammarDocument::new(self.grammar.clone());
        for ((a, b), &id) in &self.keys {
            doc.keys.insert(id, (a.clone(), b.clone()));
        }
        doc
    }
}

/// Builds the pair grammar of a rigid-only TBox. Negative shifts become
/// `d`-runs; conjunctions become two-conjunct rules.
fn pair_grammar(tbox: &TBox) -> PairGrammar {
    let concepts: Vec<ConceptName> = tbox.concepts().iter().cloned().collect();
    let mut g = Grammar::new();
    g.add_terminal('c');
    let mut taken = BTreeSet::new();
    let mut keys = BTreeMap::new();
    let mut ids = vec![vec![0usize; concepts.len()]; concepts.len()];
    for (i, a) in concepts.iter().enumerate() {
        for (j, b) in concepts.iter().enumerate() {
            let name = fresh_name(format!("N_{a}_{b}"), &mut taken);
            let id = g.add_nonterminal(name);
            ids[i][j] = id;
            keys.insert((a.clone(), b.clone()), id);
        }
    }
    let idx: BTreeMap<&ConceptName, usize> = concepts.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let nt = |a: &ConceptName, b: &ConceptName| GSymbol::Nonterminal(ids[idx[a]][idx[b]]);
    let mut rules: BTreeSet<GrammarRule> = BTreeSet::new();
    let mut push = |lhs: GSymbol, conjuncts: Vec<Vec<GSymbol>>| {
        if let GSymbol::Nonterminal(lhs) = lhs {
            rules.insert(GrammarRule { lhs, conjuncts });
        }
    };
    for a in &concepts {
        push(nt(a, a), vec![vec![]]);
    }
    let existentials: Vec<(&ConceptName, &RoleName, &ConceptName)> = tbox
        .inclusions()
        .filter_map(|ci| match ci {
            ConceptInclusion::ExistsRight { lhs, role, filler } => Some((lhs, role, filler)),
            _ => None,
        })
        .collect();
    for ci in tbox.inclusions() {
        match ci {
            ConceptInclusion::Shift { lhs, delta, rhs } => {
                let letter = if *delta >= 0 { 'c' } else { 'd' };
                let word = vec![GSymbol::Terminal(letter); delta.unsigned_abs() as usize];
                push(nt(lhs, rhs), vec![word]);
            }
            ConceptInclusion::Conj { lhs1, lhs2, rhs } => {
                for a in &concepts {
                    push(nt(a, rhs), vec![vec![nt(a, lhs1)], vec![nt(a, lhs2)]]);
                }
            }
            ConceptInclusion::ExistsLeft { role, filler, rhs } => {
                for &(a, r, c) in &existentials {
                    if r == role {
                        push(nt(a, rhs), vec![vec![nt(c, filler)]]);
                    }
                }
            }
            ConceptInclusion::ExistsRight { .. } => {}
        }
    }
    for a in &concepts {
        for b in &concepts {
            for c in &concepts {
                push(nt(a, b), vec![vec![nt(a, c), nt(c, b)]]);
            }
        }
    }
    for rule in rules {
        g.add_rule(rule.lhs, rule.conjuncts).expect("well-formed rule");
    }
    PairGrammar { grammar: g, keys, source: tbox.clone() }
}

/// The unary conjunctive grammar of a future TBox (rigidised first).
///
/// With `require_future` unset, negative shifts are accepted and become
/// rules over a second letter `d`, so the grammar is no longer unary.
pub fn tbox_to_conjunctive_grammar(tbox: &TBox, require_future: bool) -> Result<PairGrammar, TranslateError> {
    if require_future {
        if let Some(ci) = tbox.inclusions().find(|ci| matches!(ci, ConceptInclusion::Shift { delta, .. } if *delta < 0)) {
            return Err(TranslateError::NotFutureFragment(ci.clone()));
        }
    }
    Ok(pair_grammar(&rigidise(tbox)))
}

/// Output of [`grammar_to_tbox`].
#[derive(Clone, Debug)]
pub struct GrammarToTboxResult {
    /// The TBox.
    pub tbox: TBox,
    /// The source concept `A`.
    pub source_concept: ConceptName,
    /// The concept `B_i` of every nonterminal of the input grammar.
    pub concept_of: BTreeMap<NtId, ConceptName>,
    /// The canonical-form grammar the TBox encodes (the input's
    /// nonterminals keep their ids; helpers follow).
    pub canonical: Grammar,
    /// For every index sequence `ι` (1-based canonical nonterminal
    /// indices), its concept `C_ι` and, for sequences of length at least
    /// two, its rigid role `r_ι`.
    pub helpers: BTreeMap<Vec<usize>, (ConceptName, Option<RoleName>)>,
}

fn seq_tag(seq: &[usize]) -> String {
    seq.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")
}

/// The future TBox `T_G` of a unary grammar.
pub fn grammar_to_tbox(g: &Grammar) -> Result<GrammarToTboxResult, TranslateError> {
    let canonical = g.to_unary_canonical()?;
    let a = ConceptName::new("A");
    let b = |i: NtId| ConceptName::new(format!("B_{}", i + 1));
    let mut tbox = TBox::new();
    tbox.declare_concept(a.clone());
    for i in 0..canonical.nonterminal_count() {
        tbox.declare_concept(b(i));
    }
    let seq_of = |conj: &[GSymbol]| -> Vec<usize> {
        conj.iter()
            .map(|s| match s {
                GSymbol::Nonterminal(n) => n + 1,
                GSymbol::Terminal(_) => unreachable!("canonical conjuncts are nonterminal strings"),
            })
            .collect()
    };
    // The suffix-closed index set.
    let mut index_set: BTreeSet<Vec<usize>> = BTreeSet::new();
    for rule in canonical.rules() {
        if rule.conjuncts.iter().all(|c| c.iter().all(|s| matches!(s, GSymbol::Nonterminal(_)))) {
            for conj in &rule.conjuncts {
                let seq = seq_of(conj);
                for j in 0..seq.len() {
                    index_set.insert(seq[j..].to_vec());
                }
            }
        }
    }
    let mut helpers = BTreeMap::new();
    for seq in &index_set {
        let c = ConceptName::new(format!("C_{}", seq_tag(seq)));
        let r = (seq.len() >= 2).then(|| RoleName::new(format!("r_{}", seq_tag(seq))));
        if let Some(r) = &r {
            tbox.declare_role(r.clone(), Rigidity::Rigid).expect("fresh role");
        }
        tbox.declare_concept(c.clone());
        helpers.insert(seq.clone(), (c, r));
    }
    let c_of = |seq: &[usize]| helpers[seq].0.clone();
    for rule in canonical.rules() {
        let bi = b(rule.lhs);
        match rule.conjuncts.as_slice() {
            [conj] if conj.is_empty() => {
                tbox.insert(ConceptInclusion::sub(a.clone(), bi));
            }
            [conj] if conj.iter().all(|s| matches!(s, GSymbol::Terminal(_))) => {
                tbox.insert(ConceptInclusion::shift(a.clone(), conj.len() as i64, bi));
            }
            [conj] => {
                tbox.insert(ConceptInclusion::sub(c_of(&seq_of(conj)), bi));
            }
            [c1, c2] => {
                tbox.insert(ConceptInclusion::conj(c_of(&seq_of(c1)), c_of(&seq_of(c2)), bi));
            }
            _ => unreachable!("canonical rules have at most two conjuncts"),
        }
    }
    for (seq, (c, r)) in &helpers {
        let i = seq[0];
        match r {
            None => {
                tbox.insert(ConceptInclusion::sub(b(i - 1), c.clone()));
            }
            Some(r) => {
                tbox.insert(ConceptInclusion::exists_right(b(i - 1), r.clone(), a.clone()));
                tbox.insert(ConceptInclusion::exists_left(r.clone(), c_of(&seq[1..]), c.clone()));
            }
        }
    }
    let concept_of = (0..g.nonterminal_count()).map(|i| (i, b(i))).collect();
    Ok(GrammarToTboxResult { tbox, source_concept: a, concept_of, canonical, helpers })
}

/// Output of [`rigidise_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidisedLinear {
    /// The rigid-only linear TBox.
    pub tbox: TBox,
    /// Whether the result is exact: the input had no local roles, so the
    /// added subsumptions are redundant. Otherwise the subsumptions were
    /// certified by a bounded oracle and the result may miss some.
    pub exact: bool,
    /// The subsumptions `A ⊑ B` that were added.
    pub added: Vec<ConceptInclusion>,
}

fn require_linear(tbox: &TBox) -> Result<(), TranslateError> {
    match tbox.inclusions().find(|ci| matches!(ci, ConceptInclusion::Conj { .. })) {
        Some(ci) => Err(TranslateError::NotLinearFragment(ci.clone())),
        None => Ok(()),
    }
}

/// The default oracle window for [`rigidise_linear`]: shifts up to
/// `2·Σ|δ| + 2` in both directions.
pub fn default_linear_oracle(tbox: &TBox) -> SaturationConfig {
    SaturationConfig::for_shift_bound(tbox, 2 * tbox.abs_delta_sum() as u64 + 2)
}

/// Drops every inclusion over a local role and adds `A ⊑ B` for every pair
/// of distinct concept names of the input with `T ⊨ A ⊑ B` certified by
/// saturation under `oracle`.
pub fn rigidise_linear(tbox: &TBox, oracle: SaturationConfig) -> Result<RigidisedLinear, TranslateError> {
    require_linear(tbox)?;
    let exact = tbox.classify().rigid_only;
    let mut out = TBox::new();
    for (r, rig) in tbox.roles() {
        if *rig == Rigidity::Rigid {
            out.declare_role(r.clone(), Rigidity::Rigid).expect("fresh declaration");
        }
    }
    for c in tbox.concepts() {
        out.declare_concept(c.clone());
    }
    for ci in tbox.inclusions() {
        if ci.role().is_none_or(|r| tbox.is_rigid(r)) {
            out.insert(ci.clone());
        }
    }
    let mut added = Vec::new();
    for a in tbox.concepts() {
        for (b, shifts) in shift_profile(tbox, a, oracle) {
            if &b != a && tbox.concepts().contains(&b) && shifts.contains(&0) {
                let ci = ConceptInclusion::sub(a.clone(), b);
                if out.insert(ci.clone()) {
                    added.push(ci);
                }
            }
        }
    }
    Ok(RigidisedLinear { tbox: out, exact, added })
}

/// The context-free grammar over `{c, d}` of a linear TBox, built from
/// [`rigidise_linear`] under `oracle`. The second component tells whether
/// the rigidisation was exact.
pub fn linear_tbox_to_cfg(tbox: &TBox, oracle: SaturationConfig) -> Result<(PairGrammar, bool), TranslateError> {
    let lin = rigidise_linear(tbox, oracle)?;
    let mut pg = pair_grammar(&lin.tbox);
    pg.grammar.add_terminal('d');
    Ok((pg, lin.exact))
}

/// Search limits for [`exists_shift`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftBudget {
    /// Longest word considered.
    pub max_len: usize,
    /// Largest balance magnitude tracked for subwords.
    pub max_balance: i64,
}

impl ShiftBudget {
    /// `max_len = max_balance = 4·(Σ|δ| + |N_C|²)`.
    pub fn default_for(tbox: &TBox) -> Self {
        let n = tbox.concepts().len() as i64;
        let len = 4 * (tbox.abs_delta_sum() + n * n);
        ShiftBudget { max_len: len as usize, max_balance: len }
    }

    /// A budget with equal length and balance bounds.
    pub fn new(max_len: usize) -> Self {
        ShiftBudget { max_len, max_balance: max_len as i64 }
    }
}

/// Result of [`exists_shift`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftWitness {
    /// A shortest word of the language with the requested balance.
    Yes(String),
    /// No word within the budget has the requested balance.
    NoWithinBudget,
}

#[derive(Clone, Copy, Debug)]
enum Back {
    Eps,
    Term,
    Unit(NtId),
    Pair { y: NtId, ly: usize, by: i64, z: NtId },
}

/// Searches `L(nt)` of a context-free grammar over `{c, d}` for a word with
/// `#c − #d = n`, by a fixpoint over (nonterminal, length) → balances.
/// Returns a shortest witness.
pub fn exists_shift(g: &Grammar, nt: NtId, n: i64, budget: ShiftBudget) -> Result<ShiftWitness, GrammarError> {
    if g.classify() == GrammarClass::Conjunctive {
        return Err(GrammarError::NotContextFree);
    }
    let bin = g.to_binary_normal();
    let nts = bin.nonterminal_count();
    let mb = budget.max_balance;
    // sets[len][x]: balances of words of length len derivable from x.
    let mut sets: Vec<Vec<BTreeSet<i64>>> = Vec::new();
    let mut back: BTreeMap<(usize, NtId, i64), Back> = BTreeMap::new();
    let weight = |c: char| match c {
        'c' => 1,
        'd' => -1,
        _ => 0,
    };
    let mut record = |sets: &mut Vec<Vec<BTreeSet<i64>>>, len: usize, x: NtId, found: Vec<(i64, Back)>| -> bool {
        let mut changed = false;
        for (b, how) in found {
            if b.abs() <= mb && sets[len][x].insert(b) {
                back.insert((len, x, b), how);
                changed = true;
            }
        }
        changed
    };
    for len in 0..=budget.max_len {
        sets.push(vec![BTreeSet::new(); nts]);
        // Words made of strictly shorter parts.
        for rule in bin.rules() {
            let mut found: Vec<(i64, Back)> = Vec::new();
            match rule.conjuncts[0].as_slice() {
                [] if len == 0 => found.push((0, Back::Eps)),
                [GSymbol::Terminal(a)] if len == 1 => found.push((weight(*a), Back::Term)),
                [GSymbol::Nonterminal(y), GSymbol::Nonterminal(z)] => {
                    for ly in 1..len {
                        for &by in &sets[ly][*y] {
                            for &bz in &sets[len - ly][*z] {
                                found.push((by + bz, Back::Pair { y: *y, ly, by, z: *z }));
                            }
                        }
                    }
                }
                _ => {}
            }
            record(&mut sets, len, rule.lhs, found);
        }
        // Closure under unit rules and splits with an empty half.
        loop {
            let mut changed = false;
            for rule in bin.rules() {
                let mut found: Vec<(i64, Back)> = Vec::new();
                match rule.conjuncts[0].as_slice() {
                    [GSymbol::Nonterminal(y)] => {
                        found.extend(sets[len][*y].iter().map(|&b| (b, Back::Unit(*y))));
                    }
                    [GSymbol::Nonterminal(y), GSymbol::Nonterminal(z)] => {
                        for ly in if len == 0 { vec![0] } else { vec![0, len] } {
                            for &by in &sets[ly][*y] {
                                for &bz in &sets[len - ly][*z] {
                                    found.push((by + bz, Back::Pair { y: *y, ly, by, z: *z }));
                                }
                            }
                        }
                    }
                    _ => {}
                }
                changed |= record(&mut sets, len, rule.lhs, found);
            }
            if !changed {
                break;
            }
        }
        if sets[len][nt].contains(&n) {
            let mut word = String::new();
            spell(&bin, &back, len, nt, n, &mut word);
            return Ok(ShiftWitness::Yes(word));
        }
    }
    Ok(ShiftWitness::NoWithinBudget)
}

fn spell(bin: &Grammar, back: &BTreeMap<(usize, NtId, i64), Back>, len: usize, x: NtId, b: i64, out: &mut String) {
    match back[&(len, x, b)] {
        Back::Eps => {}
        Back::Term => out.push(if b > 0 { 'c' } else if b < 0 { 'd' } else { single_letter(bin, x) }),
        Back::Unit(y) => spell(bin, back, len, y, b, out),
        Back::Pair { y, ly, by, z } => {
            spell(bin, back, ly, y, by, out);
            spell(bin, back, len - ly, z, b - by, out);
        }
    }
}

/// The letter of a terminal rule with balance zero (a letter other than
/// `c` and `d`).
fn single_letter(bin: &Grammar, x: NtId) -> char {
    bin.rules()
        .iter()
        .filter(|r| r.lhs == x)
        .find_map(|r| match r.conjuncts[0].as_slice() {
            [GSymbol::Terminal(a)] if *a != 'c' && *a != 'd' => Some(*a),
            _ => None,
        })
        .expect("terminal rule")
}
