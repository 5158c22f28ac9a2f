//! Temporal atomic query answering for the future fragment.
//!
//! A query `A(a, n)` over `(T, 𝒜)` is reduced to a concept inclusion over a
//! single anchor: with `l, m` the least and greatest ABox timestamps, every
//! concept `A` gets indexed copies `A_k` for `k ∈ [l, m + 1]` (`A_k` stands
//! for `A_{m+1}` when `k > m`), every individual `a` an anchor concept
//! `C_a` and every ABox role fact `r(a, b, ℓ)` a rigid role `r_ab`. Then
//!
//! `(T, 𝒜) ⊨ A(a, n)` iff `T′ ∪ T_𝒜 ⊨ C_a ⊑ ○^{n−l} A_n`,
//!
//! which is decided by unary conjunctive grammar membership.
//!
//! Generated names: `A@k` for indexed concepts (negative `k` written
//! `A@n3`), `Ind@a` for anchors and `r@a@b` for anchor roles, each made
//! fresh against the input with trailing primes if needed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::derive::{entails_fact, Entailment, SaturationConfig};
use crate::grammar::{GrammarError, NtId};
use crate::model::{
    ABox, ConceptInclusion, ConceptName, Fact, Individual, KnowledgeBase, Rigidity, RoleName, TBox, Term,
};
use crate::translate::{tbox_to_conjunctive_grammar, PairGrammar, TranslateError};
use crate::util::{fresh_name, time_tag};

/// A query `concept(individual, time)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaqaQuery {
    /// The queried concept.
    pub concept: ConceptName,
    /// The queried individual.
    pub individual: Individual,
    /// The queried time point.
    pub time: i64,
}

impl TaqaQuery {
    /// A query.
    pub fn new(concept: impl Into<ConceptName>, individual: impl AsRef<str>, time: i64) -> Self {
        TaqaQuery { concept: concept.into(), individual: Individual::new(individual), time }
    }

    /// The query as a fact.
    pub fn fact(&self) -> Fact {
        Fact::Concept {
            concept: self.concept.clone(),
            subject: Term::Individual(self.individual.clone()),
            time: self.time,
        }
    }
}

/// Why a query could not be answered by the grammar route.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TaqaError {
    /// The TBox has a negative shift.
    #[error("not in the future fragment: `{0}` shifts into the past")]
    NotFutureFragment(ConceptInclusion),
    /// The reduction needs at least one ABox fact.
    #[error("the ABox is empty")]
    EmptyABox,
    /// Translation failed.
    #[error(transparent)]
    Translate(#[from] TranslateError),
    /// Membership failed.
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// The query TBox `T′ ∪ T_𝒜` with its name tables.
#[derive(Clone, Debug)]
pub struct IndexedTBox {
    /// Indexed copies of the input inclusions.
    pub tprime: TBox,
    /// The inclusions encoding the ABox.
    pub tabox: TBox,
    /// Least ABox timestamp.
    pub l: i64,
    /// Greatest ABox timestamp.
    pub m: i64,
    /// `A_k` for every concept `A` and `k ∈ [l, m + 1]`.
    pub concept_index: BTreeMap<(ConceptName, i64), ConceptName>,
    /// `C_a` for every individual of the ABox.
    pub anchor_concepts: BTreeMap<Individual, ConceptName>,
    /// `r_ab` for every ABox role fact `r(a, b, ℓ)`.
    pub anchor_roles: BTreeMap<(RoleName, Individual, Individual), RoleName>,
}

impl IndexedTBox {
    /// `A_k`, with `k > m` clamped to `m + 1`. `None` for unknown concepts
    /// and for `k < l`.
    pub fn indexed(&self, concept: &ConceptName, k: i64) -> Option<&ConceptName> {
        if k < self.l {
            return None;
        }
        self.concept_index.get(&(concept.clone(), k.min(self.m + 1)))
    }

    /// `T′ ∪ T_𝒜`.
    pub fn combined(&self) -> TBox {
        let mut t = self.tprime.clone();
        t.extend(&self.tabox).expect("consistent role declarations");
        t
    }
}

/// Builds `T′` and `T_𝒜` for a future TBox and a nonempty ABox.
pub fn build_query_tbox(tbox: &TBox, abox: &ABox) -> Result<IndexedTBox, TaqaError> {
    if let Some(ci) = tbox.inclusions().find(|ci| matches!(ci, ConceptInclusion::Shift { delta, .. } if *delta < 0)) {
        return Err(TaqaError::NotFutureFragment(ci.clone()));
    }
    let (l, m) = abox.time_range().ok_or(TaqaError::EmptyABox)?;
    let mut taken: BTreeSet<String> = tbox
        .concepts()
        .iter()
        .map(|c| c.as_str().to_string())
        .chain(abox.concepts().iter().map(|c| c.as_str().to_string()))
        .chain(tbox.roles().keys().map(|r| r.as_str().to_string()))
        .collect();
    let concepts: BTreeSet<ConceptName> = tbox.concepts().iter().cloned().chain(abox.concepts()).collect();
    let mut concept_index = BTreeMap::new();
    for c in &concepts {
        for k in l..=m + 1 {
            let name = fresh_name(format!("{c}@{}", time_tag(k)), &mut taken);
            concept_index.insert((c.clone(), k), ConceptName::new(name));
        }
    }
    let idx = |c: &ConceptName, k: i64| concept_index[&(c.clone(), k.min(m + 1))].clone();

    let mut tprime = TBox::new();
    for (r, rig) in tbox.roles() {
        tprime.declare_role(r.clone(), *rig).expect("fresh declaration");
    }
    for name in concept_index.values() {
        tprime.declare_concept(name.clone());
    }
    for k in l..=m + 1 {
        for ci in tbox.inclusions() {
            let indexed = match ci {
                ConceptInclusion::Shift { lhs, delta, rhs } => {
                    ConceptInclusion::shift(idx(lhs, k), *delta, idx(rhs, k + delta))
                }
                ConceptInclusion::Conj { lhs1, lhs2, rhs } => {
                    ConceptInclusion::conj(idx(lhs1, k), idx(lhs2, k), idx(rhs, k))
                }
                ConceptInclusion::ExistsRight { lhs, role, filler } => {
                    ConceptInclusion::exists_right(idx(lhs, k), role.clone(), idx(filler, k))
                }
                ConceptInclusion::ExistsLeft { role, filler, rhs } => {
                    ConceptInclusion::exists_left(role.clone(), idx(filler, k), idx(rhs, k))
                }
            };
            tprime.insert(indexed);
        }
    }

    let mut tabox = TBox::new();
    let mut anchor_concepts = BTreeMap::new();
    for a in abox.individuals() {
        let name = fresh_name(format!("Ind@{a}"), &mut taken);
        anchor_concepts.insert(a, ConceptName::new(name));
    }
    let mut anchor_roles = BTreeMap::new();
    for f in abox.facts() {
        match f {
            Fact::Concept { concept, subject: Term::Individual(a), time } => {
                tabox.insert(ConceptInclusion::shift(anchor_concepts[a].clone(), time - l, idx(concept, *time)));
            }
            Fact::Role { role, subject: Term::Individual(a), object: Term::Individual(b), time } => {
                let key = (role.clone(), a.clone(), b.clone());
                let rab = anchor_roles
                    .entry(key)
                    .or_insert_with(|| RoleName::new(fresh_name(format!("{role}@{a}@{b}"), &mut taken)))
                    .clone();
                tabox.declare_role(rab.clone(), Rigidity::Rigid).expect("fresh role");
                tabox.insert(ConceptInclusion::exists_right(
                    anchor_concepts[a].clone(),
                    rab.clone(),
                    anchor_concepts[b].clone(),
                ));
                let rigid = tbox.is_rigid(role);
                for ci in tbox.inclusions() {
                    if let ConceptInclusion::ExistsLeft { role: r2, filler, rhs } = ci {
                        if r2 != role {
                            continue;
                        }
                        for k in l..=m + 1 {
                            if rigid || k == *time {
                                tabox.insert(ConceptInclusion::exists_left(rab.clone(), idx(filler, k), idx(rhs, k)));
                            }
                        }
                    }
                }
            }
            _ => unreachable!("ABox facts are ground"),
        }
    }
    for c in anchor_concepts.values() {
        tabox.declare_concept(c.clone());
    }
    Ok(IndexedTBox { tprime, tabox, l, m, concept_index, anchor_concepts, anchor_roles })
}

/// A grammar-route answer with the membership test that decided it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaqaVerdict {
    /// Whether the query is entailed.
    pub answer: bool,
    /// The nonterminal tested, if a membership test was run.
    pub nonterminal: Option<String>,
    /// The word length tested, if a membership test was run.
    pub length: Option<usize>,
}

impl TaqaVerdict {
    fn no() -> Self {
        TaqaVerdict { answer: false, nonterminal: None, length: None }
    }
}

/// The reduction of a knowledge base, reusable across queries.
#[derive(Clone, Debug)]
pub struct TaqaReduction {
    /// The query TBox.
    pub indexed: IndexedTBox,
    /// Its conjunctive grammar.
    pub grammar: PairGrammar,
}

impl TaqaReduction {
    /// Builds the query TBox and its grammar.
    pub fn new(tbox: &TBox, abox: &ABox) -> Result<Self, TaqaError> {
        let indexed = build_query_tbox(tbox, abox)?;
        let grammar = tbox_to_conjunctive_grammar(&indexed.combined(), true)?;
        Ok(TaqaReduction { indexed, grammar })
    }

    /// The nonterminal and word length deciding `q`, or `None` when the
    /// answer is trivially negative.
    fn membership_test(&self, q: &TaqaQuery) -> Option<(NtId, usize)> {
        let ix = &self.indexed;
        if q.time < ix.l {
            return None;
        }
        let anchor = ix.anchor_concepts.get(&q.individual)?;
        let target = ix.indexed(&q.concept, q.time)?;
        let nt = self.grammar.nt(anchor, target)?;
        Some((nt, (q.time - ix.l) as usize))
    }

    fn verdict(&self, answer: bool, nt: NtId, length: usize) -> TaqaVerdict {
        TaqaVerdict { answer, nonterminal: Some(self.grammar.grammar.name(nt).to_string()), length: Some(length) }
    }

    /// Answers a query.
    pub fn answer(&self, q: &TaqaQuery) -> Result<TaqaVerdict, TaqaError> {
        match self.membership_test(q) {
            None => Ok(TaqaVerdict::no()),
            Some((nt, length)) => Ok(self.verdict(self.grammar.grammar.member_unary(nt, length)?, nt, length)),
        }
    }

    /// Answers several queries with a single parse up to the longest word.
    pub fn answers(&self, queries: &[TaqaQuery]) -> Result<Vec<TaqaVerdict>, TaqaError> {
        let tests: Vec<_> = queries.iter().map(|q| self.membership_test(q)).collect();
        let Some(bound) = tests.iter().flatten().map(|&(_, n)| n).max() else {
            return Ok(vec![TaqaVerdict::no(); queries.len()]);
        };
        let lengths = self.grammar.grammar.all_language_lengths(bound)?;
        Ok(tests
            .into_iter()
            .map(|t| match t {
                None => TaqaVerdict::no(),
                Some((nt, n)) => self.verdict(lengths[nt].contains(&n), nt, n),
            })
            .collect())
    }
}

/// Decides `(T, 𝒜) ⊨ q` for a future TBox by grammar membership. The
/// answer is complete.
pub fn answer_taqa_grammar(tbox: &TBox, abox: &ABox, q: &TaqaQuery) -> Result<TaqaVerdict, TaqaError> {
    if let Some(ci) = tbox.inclusions().find(|ci| matches!(ci, ConceptInclusion::Shift { delta, .. } if *delta < 0)) {
        return Err(TaqaError::NotFutureFragment(ci.clone()));
    }
    let known = abox.individuals().contains(&q.individual);
    match abox.time_range() {
        Some((l, _)) if known && q.time >= l => TaqaReduction::new(tbox, abox)?.answer(q),
        _ => Ok(TaqaVerdict::no()),
    }
}

/// Answers by saturation: `Yes` with a trace, or `UnknownAtBound`.
pub fn answer_taqa_saturation(kb: &KnowledgeBase, q: &TaqaQuery, cfg: SaturationConfig) -> Entailment {
    entails_fact(kb, &q.fact(), cfg)
}
