//! Bounded forward-chaining saturation with derivation traces.
//!
//! The engine applies the five derivation rules of TEL^X:
//!
//! | rule   | premises                                 | conclusion            |
//! |--------|------------------------------------------|-----------------------|
//! | RIGID  | `r(a,b,n)`, `r` rigid                    | `r(a,b,k)` for any `k`|
//! | SHIFT  | `A(a,n)`, `A ⊑ ○ᵏB`                      | `B(a,n+k)`            |
//! | CONJ   | `A(a,n)`, `A'(a,n)`, `A ⊓ A' ⊑ B`        | `B(a,n)`              |
//! | RETURN | `r(a,b,n)`, `A(b,n)`, `∃r.A ⊑ B`         | `B(a,n)`              |
//! | EXISTS | `A(a,n)`, `A ⊑ ∃r.B`                     | `r(a,b,n)`, `B(b,n)`, `b` fresh |
//!
//! Saturation is restricted to a time window: SHIFT conclusions outside the
//! window are dropped and reported. Every fact derivable about a null
//! introduced for `B` at time `n` follows from `B(b, n)` alone (facts only
//! flow from role successors to predecessors), so the engine keeps a single
//! null per `(B, n)` and connects every predecessor to it. The result is
//! finite, sound, and complete within the window.
//!
//! Traces ([`DerivationTrace`]) are extracted per goal: the backward closure
//! of the goal is replayed with a fresh copy of a null for every use, so
//! every EXISTS step introduces a genuinely new null and the trace can be
//! re-checked rule by rule with [`DerivationTrace::replay`].

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{
    ABox, ConceptInclusion, ConceptName, Fact, Individual, KnowledgeBase, RoleName, TBox, Term,
};

/// Bounds controlling a saturation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturationConfig {
    /// Least time point facts may be derived at.
    pub time_lo: i64,
    /// Greatest time point facts may be derived at.
    pub time_hi: i64,
    /// Maximal nesting of nulls below an individual.
    pub max_chain_depth: u32,
    /// Maximal number of derived facts.
    pub max_steps: u64,
}

impl SaturationConfig {
    /// A window `[time_lo, time_hi]` with no depth or step limit.
    pub fn new(time_lo: i64, time_hi: i64) -> Self {
        assert!(time_lo <= time_hi, "empty saturation window");
        SaturationConfig { time_lo, time_hi, max_chain_depth: u32::MAX, max_steps: u64::MAX }
    }

    /// Sets the depth limit.
    pub fn with_max_chain_depth(mut self, depth: u32) -> Self {
        self.max_chain_depth = depth;
        self
    }

    /// Sets the step limit.
    pub fn with_max_steps(mut self, steps: u64) -> Self {
        self.max_steps = steps;
        self
    }

    /// The default configuration for a knowledge base and a query that may
    /// lie `shift` steps after the last ABox timestamp: the window spans the
    /// ABox timestamps widened by the sum of all shift magnitudes.
    ///
    /// Nulls are shared per concept and time point, so the depth of null
    /// chains is bounded by the window anyway; no depth limit is imposed.
    pub fn default_for(kb: &KnowledgeBase, shift: i64) -> Self {
        let (lo, hi) = kb.abox.time_range().unwrap_or((0, 0));
        let slack = kb.tbox.abs_delta_sum();
        SaturationConfig::new(lo - slack, hi + slack + shift.max(0))
    }

    /// A window suitable for shift sets up to `bound` from time 0.
    pub fn for_shift_bound(tbox: &TBox, bound: u64) -> Self {
        let reach = bound as i64 + tbox.abs_delta_sum();
        SaturationConfig::new(-reach, reach)
    }

    /// The window `[0, bound]`, complete for future-fragment shift queries.
    pub fn future(bound: u64) -> Self {
        SaturationConfig::new(0, bound as i64)
    }

    /// Whether `t` lies in the window.
    pub fn contains(&self, t: i64) -> bool {
        self.time_lo <= t && t <= self.time_hi
    }
}

/// The derivation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// Rigid role propagation.
    Rigid,
    /// Temporal shift.
    Shift,
    /// Conjunction.
    Conj,
    /// Lifting along a role.
    Return,
    /// Existential introduction.
    Exists,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleId::Rigid => "RIGID",
            RuleId::Shift => "SHIFT",
            RuleId::Conj => "CONJ",
            RuleId::Return => "RETURN",
            RuleId::Exists => "EXISTS",
        })
    }
}

/// A premise of a rule application: a fact or an inclusion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// A fact.
    Fact(Fact),
    /// A concept inclusion.
    Inclusion(ConceptInclusion),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Fact(x) => write!(f, "{x}"),
            Formula::Inclusion(x) => write!(f, "{x}"),
        }
    }
}

/// One application of a derivation rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    /// The rule.
    pub rule: RuleId,
    /// Facts and inclusions used.
    pub premises: Vec<Formula>,
    /// Facts derived.
    pub conclusions: Vec<Fact>,
}

/// A derivation: initial formulas and rule applications whose premises are
/// initial or concluded by earlier steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    /// Formulas taken from the knowledge base.
    pub initial: Vec<Formula>,
    /// The rule applications, in order.
    pub steps: Vec<RuleApplication>,
}

/// Why a trace failed to replay.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {reason}")]
pub struct ReplayError {
    /// Index of the failing step (`usize::MAX` for the initial formulas).
    pub step: usize,
    /// Description of the failure.
    pub reason: String,
}

impl DerivationTrace {
    /// Whether `fact` is initial or concluded by some step.
    pub fn concludes(&self, fact: &Fact) -> bool {
        self.initial.iter().any(|f| matches!(f, Formula::Fact(x) if x == fact))
            || self.steps.iter().any(|s| s.conclusions.contains(fact))
    }

    /// Re-checks every step against the rule shapes, the inclusions of
    /// `tbox`, premise availability and freshness of introduced nulls.
    pub fn replay(&self, tbox: &TBox) -> Result<(), ReplayError> {
        let fail = |step: usize, reason: String| Err(ReplayError { step, reason });
        let mut known: BTreeSet<Formula> = BTreeSet::new();
        let mut terms: BTreeSet<Term> = BTreeSet::new();
        for f in &self.initial {
            match f {
                Formula::Inclusion(ci) if !tbox.contains(ci) => {
                    return fail(usize::MAX, format!("inclusion `{ci}` is not in the TBox"))
                }
                Formula::Fact(x) if !x.is_ground() => {
                    return fail(usize::MAX, format!("initial fact `{x}` mentions a null"))
                }
                Formula::Fact(x) => terms.extend(x.terms().cloned()),
                _ => {}
            }
            known.insert(f.clone());
        }
        for (i, step) in self.steps.iter().enumerate() {
            for p in &step.premises {
                if !known.contains(p) {
                    return fail(i, format!("premise `{p}` is not available"));
                }
            }
            let facts: Vec<&Fact> = step
                .premises
                .iter()
                .filter_map(|p| match p {
                    Formula::Fact(f) => Some(f),
                    _ => None,
                })
                .collect();
            let incls: Vec<&ConceptInclusion> = step
                .premises
                .iter()
                .filter_map(|p| match p {
                    Formula::Inclusion(c) => Some(c),
                    _ => None,
                })
                .collect();
            let ok = match (step.rule, facts.as_slice(), incls.as_slice(), step.conclusions.as_slice()) {
                (
                    RuleId::Rigid,
                    [Fact::Role { role, subject, object, .. }],
                    [],
                    [Fact::Role { role: r2, subject: s2, object: o2, .. }],
                ) => tbox.is_rigid(role) && role == r2 && subject == s2 && object == o2,
                (
                    RuleId::Shift,
                    [Fact::Concept { concept, subject, time }],
                    [ConceptInclusion::Shift { lhs, delta, rhs }],
                    [Fact::Concept { concept: c2, subject: s2, time: t2 }],
                ) => concept == lhs && c2 == rhs && subject == s2 && *t2 == time + delta,
                (
                    RuleId::Conj,
                    [Fact::Concept { concept: a, subject: x, time: t }, Fact::Concept { concept: b, subject: y, time: u }],
                    [ConceptInclusion::Conj { lhs1, lhs2, rhs }],
                    [Fact::Concept { concept: c2, subject: s2, time: t2 }],
                ) => a == lhs1 && b == lhs2 && x == y && t == u && c2 == rhs && s2 == x && t2 == t,
                (
                    RuleId::Return,
                    [Fact::Role { role, subject, object, time }, Fact::Concept { concept, subject: y, time: u }],
                    [ConceptInclusion::ExistsLeft { role: r2, filler, rhs }],
                    [Fact::Concept { concept: c2, subject: s2, time: t2 }],
                ) => role == r2 && object == y && time == u && concept == filler && c2 == rhs && s2 == subject && t2 == time,
                (
                    RuleId::Exists,
                    [Fact::Concept { concept, subject, time }],
                    [ConceptInclusion::ExistsRight { lhs, role, filler }],
                    [Fact::Role { role: r2, subject: s2, object, time: t2 }, Fact::Concept { concept: c2, subject: o2, time: t3 }],
                ) => {
                    if object.is_null() && terms.contains(object) {
                        return fail(i, format!("null `{object}` is not fresh"));
                    }
                    concept == lhs
                        && r2 == role
                        && s2 == subject
                        && t2 == time
                        && c2 == filler
                        && o2 == object
                        && t3 == time
                        && object.is_null()
                }
                _ => false,
            };
            if !ok {
                return fail(i, format!("{} step does not match the rule shape", step.rule));
            }
            for c in &step.conclusions {
                terms.extend(c.terms().cloned());
                known.insert(Formula::Fact(c.clone()));
            }
        }
        Ok(())
    }
}

/// Something the saturation wants the caller to know.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationWarning {
    /// A SHIFT conclusion fell outside the window and was dropped.
    WindowTooSmall {
        /// The inclusion whose conclusion was dropped.
        inclusion: ConceptInclusion,
        /// The time point of the dropped conclusion.
        time: i64,
    },
    /// An EXISTS application was blocked by the depth limit.
    DepthLimitReached,
    /// The step limit stopped the saturation before the fixpoint.
    StepLimitReached,
}

impl fmt::Display for SaturationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaturationWarning::WindowTooSmall { inclusion, time } => {
                write!(f, "window too small: `{inclusion}` would derive a fact at time {time}")
            }
            SaturationWarning::DepthLimitReached => f.write_str("null chain depth limit reached"),
            SaturationWarning::StepLimitReached => f.write_str("step limit reached before the fixpoint"),
        }
    }
}

/// Result of [`entails_fact`] and [`entails_ci`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// The goal is derivable; the trace derives it.
    Yes(DerivationTrace),
    /// No derivation exists within the configured bounds.
    UnknownAtBound,
}

impl Entailment {
    /// Whether the answer is `Yes`.
    pub fn is_yes(&self) -> bool {
        matches!(self, Entailment::Yes(_))
    }
}

// ---------------------------------------------------------------------------
// Engine.

type Cid = u32;
type Rid = u32;
type Tid = u32;
type FactId = u32;

#[derive(Clone, Copy, Debug)]
enum CJust {
    Initial,
    Shift { prem: FactId, incl: u32 },
    Conj { p1: FactId, p2: FactId, incl: u32 },
    Return { rfact: u32, time: i64, filler: FactId, incl: u32 },
    Exists,
}

#[derive(Clone, Copy, Debug)]
enum RJust {
    Initial,
    Exists { prem: FactId, incl: u32 },
}

#[derive(Clone, Copy, Debug)]
struct CFact {
    c: Cid,
    x: Tid,
    t: i64,
    just: CJust,
}

#[derive(Clone, Copy, Debug)]
struct RFact {
    r: Rid,
    s: Tid,
    o: Tid,
    t: i64,
    just: RJust,
}

#[derive(Clone, Debug)]
enum TermInfo {
    Ind(Individual),
    Null { depth: u32 },
}

#[derive(Clone, Copy, Debug)]
enum Item {
    C(FactId),
    R(u32),
}

const RIGID_KEY: i64 = i64::MIN;

#[derive(Clone, Debug)]
struct Engine {
    cfg: SaturationConfig,
    concepts: Vec<ConceptName>,
    concept_ids: BTreeMap<ConceptName, Cid>,
    roles: Vec<RoleName>,
    role_ids: BTreeMap<RoleName, Rid>,
    rigid: Vec<bool>,
    incls: Vec<ConceptInclusion>,
    shift_by_lhs: Vec<Vec<(i64, Cid, u32)>>,
    conj_by_lhs: Vec<Vec<(Cid, bool, Cid, u32)>>,
    er_by_lhs: Vec<Vec<(Rid, Cid, u32)>>,
    el_by_filler: Vec<Vec<(Rid, Cid, u32)>>,
    el_by_role: Vec<Vec<(Cid, Cid, u32)>>,
    terms: Vec<TermInfo>,
    individuals: BTreeMap<Individual, Tid>,
    null_index: BTreeMap<(Cid, i64), Tid>,
    null_ordinal: BTreeMap<Tid, u32>,
    cfacts: Vec<CFact>,
    cindex: BTreeMap<(Cid, Tid, i64), FactId>,
    term_facts: Vec<Vec<FactId>>,
    by_term_concept: BTreeMap<(Tid, Cid), Vec<(i64, FactId)>>,
    rfacts: Vec<RFact>,
    rindex: BTreeMap<(Rid, Tid, Tid, i64), u32>,
    parents_local: BTreeMap<(Tid, Rid, i64), Vec<u32>>,
    parents_rigid: BTreeMap<(Tid, Rid), Vec<u32>>,
    queue: VecDeque<Item>,
    steps: u64,
    truncated: bool,
    depth_limited: bool,
    window_warnings: BTreeSet<(u32, i64)>,
}

impl Engine {
    fn new(kb: &KnowledgeBase, cfg: SaturationConfig) -> Self {
        let mut e = Engine {
            cfg,
            concepts: Vec::new(),
            concept_ids: BTreeMap::new(),
            roles: Vec::new(),
            role_ids: BTreeMap::new(),
            rigid: Vec::new(),
            incls: kb.tbox.inclusions().cloned().collect(),
            shift_by_lhs: Vec::new(),
            conj_by_lhs: Vec::new(),
            er_by_lhs: Vec::new(),
            el_by_filler: Vec::new(),
            el_by_role: Vec::new(),
            terms: Vec::new(),
            individuals: BTreeMap::new(),
            null_index: BTreeMap::new(),
            null_ordinal: BTreeMap::new(),
            cfacts: Vec::new(),
            cindex: BTreeMap::new(),
            term_facts: Vec::new(),
            by_term_concept: BTreeMap::new(),
            rfacts: Vec::new(),
            rindex: BTreeMap::new(),
            parents_local: BTreeMap::new(),
            parents_rigid: BTreeMap::new(),
            queue: VecDeque::new(),
            steps: 0,
            truncated: false,
            depth_limited: false,
            window_warnings: BTreeSet::new(),
        };
        for c in kb.tbox.concepts().iter().chain(kb.abox.concepts().iter()) {
            e.concept(c);
        }
        for r in kb.tbox.roles().keys() {
            e.role(r, kb.tbox.is_rigid(r));
        }
        let incls = e.incls.clone();
        for (i, ci) in incls.iter().enumerate() {
            let i = i as u32;
            match ci {
                ConceptInclusion::Shift { lhs, delta, rhs } => {
                    let (a, b) = (e.concept(lhs), e.concept(rhs));
                    e.shift_by_lhs[a as usize].push((*delta, b, i));
                }
                ConceptInclusion::Conj { lhs1, lhs2, rhs } => {
                    let (a, b, c) = (e.concept(lhs1), e.concept(lhs2), e.concept(rhs));
                    e.conj_by_lhs[a as usize].push((b, true, c, i));
                    if a != b {
                        e.conj_by_lhs[b as usize].push((a, false, c, i));
                    }
                }
                ConceptInclusion::ExistsLeft { role, filler, rhs } => {
                    let r = e.role(role, kb.tbox.is_rigid(role));
                    let (a, b) = (e.concept(filler), e.concept(rhs));
                    e.el_by_filler[a as usize].push((r, b, i));
                    e.el_by_role[r as usize].push((a, b, i));
                }
                ConceptInclusion::ExistsRight { lhs, role, filler } => {
                    let r = e.role(role, kb.tbox.is_rigid(role));
                    let (a, b) = (e.concept(lhs), e.concept(filler));
                    e.er_by_lhs[a as usize].push((r, b, i));
                }
            }
        }
        for f in kb.abox.facts() {
            match f {
                Fact::Concept { concept, subject: Term::Individual(a), time } => {
                    let c = e.concept(concept);
                    let x = e.individual(a);
                    e.insert_c(c, x, *time, CJust::Initial);
                }
                Fact::Role { role, subject: Term::Individual(a), object: Term::Individual(b), time } => {
                    let r = e.role(role, kb.tbox.is_rigid(role));
                    let (x, y) = (e.individual(a), e.individual(b));
                    e.insert_r(r, x, y, *time, RJust::Initial);
                }
                _ => unreachable!("ABox facts are ground"),
            }
        }
        e
    }

    fn concept(&mut self, c: &ConceptName) -> Cid {
        if let Some(&id) = self.concept_ids.get(c) {
            return id;
        }
        let id = self.concepts.len() as Cid;
        self.concepts.push(c.clone());
        self.concept_ids.insert(c.clone(), id);
        self.shift_by_lhs.push(Vec::new());
        self.conj_by_lhs.push(Vec::new());
        self.er_by_lhs.push(Vec::new());
        self.el_by_filler.push(Vec::new());
        id
    }

    fn role(&mut self, r: &RoleName, rigid: bool) -> Rid {
        if let Some(&id) = self.role_ids.get(r) {
            return id;
        }
        let id = self.roles.len() as Rid;
        self.roles.push(r.clone());
        self.role_ids.insert(r.clone(), id);
        self.rigid.push(rigid);
        self.el_by_role.push(Vec::new());
        id
    }

    fn individual(&mut self, a: &Individual) -> Tid {
        if let Some(&id) = self.individuals.get(a) {
            return id;
        }
        let id = self.terms.len() as Tid;
        self.terms.push(TermInfo::Ind(a.clone()));
        self.term_facts.push(Vec::new());
        self.individuals.insert(a.clone(), id);
        id
    }

    fn depth(&self, x: Tid) -> u32 {
        match self.terms[x as usize] {
            TermInfo::Ind(_) => 0,
            TermInfo::Null { depth } => depth,
        }
    }

    fn insert_c(&mut self, c: Cid, x: Tid, t: i64, just: CJust) -> Option<FactId> {
        if self.cindex.contains_key(&(c, x, t)) {
            return None;
        }
        if !matches!(just, CJust::Initial) {
            if self.steps >= self.cfg.max_steps {
                self.truncated = true;
                return None;
            }
            self.steps += 1;
        }
        let id = self.cfacts.len() as FactId;
        self.cfacts.push(CFact { c, x, t, just });
        self.cindex.insert((c, x, t), id);
        self.term_facts[x as usize].push(id);
        self.by_term_concept.entry((x, c)).or_default().push((t, id));
        self.queue.push_back(Item::C(id));
        Some(id)
    }

    fn insert_r(&mut self, r: Rid, s: Tid, o: Tid, t: i64, just: RJust) {
        let rigid = self.rigid[r as usize];
        let key = (r, s, o, if rigid { RIGID_KEY } else { t });
        if self.rindex.contains_key(&key) {
            return;
        }
        if !matches!(just, RJust::Initial) {
            if self.steps >= self.cfg.max_steps {
                self.truncated = true;
                return;
            }
            self.steps += 1;
        }
        let id = self.rfacts.len() as u32;
        self.rfacts.push(RFact { r, s, o, t, just });
        self.rindex.insert(key, id);
        if rigid {
            self.parents_rigid.entry((o, r)).or_default().push(id);
        } else {
            self.parents_local.entry((o, r, t)).or_default().push(id);
        }
        self.queue.push_back(Item::R(id));
    }

    fn run(&mut self) {
        while let Some(item) = self.queue.pop_front() {
            if self.truncated {
                break;
            }
            match item {
                Item::C(id) => self.process_c(id),
                Item::R(id) => self.process_r(id),
            }
        }
    }

    fn process_c(&mut self, id: FactId) {
        let CFact { c, x, t, .. } = self.cfacts[id as usize];
        let c = c as usize;
        for k in 0..self.shift_by_lhs[c].len() {
            let (delta, d, incl) = self.shift_by_lhs[c][k];
            let t2 = t + delta;
            if self.cfg.contains(t2) {
                self.insert_c(d, x, t2, CJust::Shift { prem: id, incl });
            } else if self.window_warnings.len() < 64 {
                self.window_warnings.insert((incl, t2));
            }
        }
        for k in 0..self.conj_by_lhs[c].len() {
            let (other, first, d, incl) = self.conj_by_lhs[c][k];
            if let Some(&oid) = self.cindex.get(&(other, x, t)) {
                let (p1, p2) = if first { (id, oid) } else { (oid, id) };
                self.insert_c(d, x, t, CJust::Conj { p1, p2, incl });
            }
        }
        for k in 0..self.er_by_lhs[c].len() {
            let (r, b, incl) = self.er_by_lhs[c][k];
            self.exists(id, x, t, r, b, incl);
        }
        for k in 0..self.el_by_filler[c].len() {
            let (r, d, incl) = self.el_by_filler[c][k];
            let mut parents: Vec<u32> = self.parents_local.get(&(x, r, t)).cloned().unwrap_or_default();
            if self.rigid[r as usize] {
                parents.extend(self.parents_rigid.get(&(x, r)).into_iter().flatten().copied());
            }
            for rf in parents {
                let s = self.rfacts[rf as usize].s;
                self.insert_c(d, s, t, CJust::Return { rfact: rf, time: t, filler: id, incl });
            }
        }
    }

    fn exists(&mut self, prem: FactId, x: Tid, t: i64, r: Rid, b: Cid, incl: u32) {
        let depth = self.depth(x).saturating_add(1);
        let null = match self.null_index.get(&(b, t)) {
            Some(&n) => {
                if depth < self.depth(n) {
                    self.terms[n as usize] = TermInfo::Null { depth };
                    // Applications blocked by the depth limit may now fire.
                    let facts = self.term_facts[n as usize].clone();
                    self.queue.extend(facts.into_iter().map(Item::C));
                }
                n
            }
            None => {
                if depth > self.cfg.max_chain_depth {
                    self.depth_limited = true;
                    return;
                }
                if self.steps >= self.cfg.max_steps {
                    self.truncated = true;
                    return;
                }
                let n = self.terms.len() as Tid;
                self.terms.push(TermInfo::Null { depth });
                self.term_facts.push(Vec::new());
                self.null_index.insert((b, t), n);
                self.null_ordinal.insert(n, self.null_ordinal.len() as u32);
                self.insert_c(b, n, t, CJust::Exists);
                n
            }
        };
        self.insert_r(r, x, null, t, RJust::Exists { prem, incl });
    }

    fn process_r(&mut self, id: u32) {
        let RFact { r, s, o, t, .. } = self.rfacts[id as usize];
        let rigid = self.rigid[r as usize];
        for k in 0..self.el_by_role[r as usize].len() {
            let (f, d, incl) = self.el_by_role[r as usize][k];
            if rigid {
                let times = self.by_term_concept.get(&(o, f)).cloned().unwrap_or_default();
                for (tt, fid) in times {
                    self.insert_c(d, s, tt, CJust::Return { rfact: id, time: tt, filler: fid, incl });
                }
            } else if let Some(&fid) = self.cindex.get(&(f, o, t)) {
                self.insert_c(d, s, t, CJust::Return { rfact: id, time: t, filler: fid, incl });
            }
        }
    }

    fn term(&self, x: Tid) -> Term {
        match &self.terms[x as usize] {
            TermInfo::Ind(a) => Term::Individual(a.clone()),
            TermInfo::Null { .. } => Term::Null(self.null_ordinal[&x]),
        }
    }
}

/// The result of a saturation run.
#[derive(Clone, Debug)]
pub struct Saturation {
    engine: Engine,
}

/// Saturates a knowledge base within the bounds of `cfg`.
pub fn saturate(kb: &KnowledgeBase, cfg: SaturationConfig) -> Saturation {
    let mut engine = Engine::new(kb, cfg);
    engine.run();
    Saturation { engine }
}

impl Saturation {
    /// Whether the fixpoint was reached within the step limit.
    pub fn exhausted(&self) -> bool {
        !self.engine.truncated
    }

    /// The configuration used.
    pub fn config(&self) -> SaturationConfig {
        self.engine.cfg
    }

    /// Number of derived facts (rule applications that added something).
    pub fn steps(&self) -> u64 {
        self.engine.steps
    }

    /// Number of nulls introduced.
    pub fn null_count(&self) -> usize {
        self.engine.null_index.len()
    }

    /// Warnings collected during the run.
    pub fn warnings(&self) -> Vec<SaturationWarning> {
        let e = &self.engine;
        let mut out: Vec<SaturationWarning> = e
            .window_warnings
            .iter()
            .map(|&(incl, time)| SaturationWarning::WindowTooSmall { inclusion: e.incls[incl as usize].clone(), time })
            .collect();
        if e.depth_limited {
            out.push(SaturationWarning::DepthLimitReached);
        }
        if e.truncated {
            out.push(SaturationWarning::StepLimitReached);
        }
        out
    }

    /// Whether the window was large enough for every SHIFT conclusion.
    pub fn window_sufficient(&self) -> bool {
        self.engine.window_warnings.is_empty()
    }

    /// All facts. Rigid role facts are listed at every time point of the
    /// window (and at their origin time).
    pub fn facts(&self) -> BTreeSet<Fact> {
        let e = &self.engine;
        let mut out = BTreeSet::new();
        for f in &e.cfacts {
            out.insert(Fact::Concept { concept: e.concepts[f.c as usize].clone(), subject: e.term(f.x), time: f.t });
        }
        for f in &e.rfacts {
            let (role, subject, object) = (e.roles[f.r as usize].clone(), e.term(f.s), e.term(f.o));
            if e.rigid[f.r as usize] {
                for t in e.cfg.time_lo..=e.cfg.time_hi {
                    out.insert(Fact::Role { role: role.clone(), subject: subject.clone(), object: object.clone(), time: t });
                }
            }
            out.insert(Fact::Role { role, subject, object, time: f.t });
        }
        out
    }

    /// Concept facts about individuals.
    pub fn individual_concept_facts(&self) -> BTreeSet<Fact> {
        let e = &self.engine;
        e.cfacts
            .iter()
            .filter(|f| matches!(e.terms[f.x as usize], TermInfo::Ind(_)))
            .map(|f| Fact::Concept { concept: e.concepts[f.c as usize].clone(), subject: e.term(f.x), time: f.t })
            .collect()
    }

    /// Time points at which `concept` holds for `individual`.
    pub fn times(&self, concept: &ConceptName, individual: &Individual) -> BTreeSet<i64> {
        let e = &self.engine;
        match (e.concept_ids.get(concept), e.individuals.get(individual)) {
            (Some(&c), Some(&x)) => {
                e.by_term_concept.get(&(x, c)).into_iter().flatten().map(|&(t, _)| t).collect()
            }
            _ => BTreeSet::new(),
        }
    }

    /// Whether the fact holds in the saturation.
    pub fn contains(&self, fact: &Fact) -> bool {
        let e = &self.engine;
        let tid = |t: &Term| -> Option<Tid> {
            match t {
                Term::Individual(a) => e.individuals.get(a).copied(),
                Term::Null(k) => e.null_ordinal.iter().find(|(_, &o)| o == *k).map(|(&t, _)| t),
            }
        };
        match fact {
            Fact::Concept { concept, subject, time } => {
                match (e.concept_ids.get(concept), tid(subject)) {
                    (Some(&c), Some(x)) => e.cindex.contains_key(&(c, x, *time)),
                    _ => false,
                }
            }
            Fact::Role { role, subject, object, time } => {
                match (e.role_ids.get(role), tid(subject), tid(object)) {
                    (Some(&r), Some(s), Some(o)) => {
                        if e.rigid[r as usize] {
                            e.rindex.contains_key(&(r, s, o, RIGID_KEY))
                        } else {
                            e.rindex.contains_key(&(r, s, o, *time))
                        }
                    }
                    _ => false,
                }
            }
        }
    }

    /// A derivation of `goal` (a fact over individuals), if it holds.
    pub fn trace_for(&self, goal: &Fact) -> Option<DerivationTrace> {
        let e = &self.engine;
        let mut u = Unfold::new(e);
        match goal {
            Fact::Concept { concept, subject: Term::Individual(a), time } => {
                let c = *e.concept_ids.get(concept)?;
                let x = *e.individuals.get(a)?;
                let id = *e.cindex.get(&(c, x, *time))?;
                u.concept(id, &Term::Individual(a.clone()));
            }
            Fact::Role { role, subject: Term::Individual(a), object: Term::Individual(b), time } => {
                let r = *e.role_ids.get(role)?;
                let (s, o) = (*e.individuals.get(a)?, *e.individuals.get(b)?);
                let key = (r, s, o, if e.rigid[r as usize] { RIGID_KEY } else { *time });
                let rf = *e.rindex.get(&key)?;
                u.role(rf, &Term::Individual(a.clone()), *time);
            }
            _ => return None,
        }
        Some(u.finish())
    }

    /// A single derivation of every concept fact about individuals.
    pub fn trace(&self) -> DerivationTrace {
        let e = &self.engine;
        let mut u = Unfold::new(e);
        for (id, f) in e.cfacts.iter().enumerate() {
            if let TermInfo::Ind(a) = &e.terms[f.x as usize] {
                u.concept(id as FactId, &Term::Individual(a.clone()));
            }
        }
        u.finish()
    }
}

struct Unfold<'e> {
    e: &'e Engine,
    initial: Vec<Formula>,
    initial_set: BTreeSet<Formula>,
    steps: Vec<RuleApplication>,
    memo: BTreeMap<(FactId, Term), Fact>,
    copies: BTreeMap<(Term, u32), Term>,
    rigid_done: BTreeSet<Fact>,
    next_null: u32,
}

impl<'e> Unfold<'e> {
    fn new(e: &'e Engine) -> Self {
        Unfold {
            e,
            initial: Vec::new(),
            initial_set: BTreeSet::new(),
            steps: Vec::new(),
            memo: BTreeMap::new(),
            copies: BTreeMap::new(),
            rigid_done: BTreeSet::new(),
            next_null: 0,
        }
    }

    fn finish(self) -> DerivationTrace {
        DerivationTrace { initial: self.initial, steps: self.steps }
    }

    fn add_initial(&mut self, f: Formula) {
        if self.initial_set.insert(f.clone()) {
            self.initial.push(f);
        }
    }

    fn incl(&mut self, incl: u32) -> Formula {
        let f = Formula::Inclusion(self.e.incls[incl as usize].clone());
        self.add_initial(f.clone());
        f
    }

    fn concept(&mut self, id: FactId, x: &Term) -> Fact {
        if let Some(f) = self.memo.get(&(id, x.clone())) {
            return f.clone();
        }
        let cf = self.e.cfacts[id as usize];
        let fact = Fact::Concept { concept: self.e.concepts[cf.c as usize].clone(), subject: x.clone(), time: cf.t };
        match cf.just {
            CJust::Initial => self.add_initial(Formula::Fact(fact.clone())),
            CJust::Shift { prem, incl } => {
                let p = self.concept(prem, x);
                let i = self.incl(incl);
                self.push(RuleId::Shift, vec![Formula::Fact(p), i], vec![fact.clone()]);
            }
            CJust::Conj { p1, p2, incl } => {
                let a = self.concept(p1, x);
                let b = self.concept(p2, x);
                let i = self.incl(incl);
                self.push(RuleId::Conj, vec![Formula::Fact(a), Formula::Fact(b), i], vec![fact.clone()]);
            }
            CJust::Return { rfact, time, filler, incl } => {
                let (child, role_fact) = self.role(rfact, x, time);
                let f = self.concept(filler, &child);
                let i = self.incl(incl);
                self.push(
                    RuleId::Return,
                    vec![Formula::Fact(role_fact), Formula::Fact(f), i],
                    vec![fact.clone()],
                );
            }
            CJust::Exists => unreachable!("filler facts of nulls are produced with the null copy"),
        }
        self.memo.insert((id, x.clone()), fact.clone());
        fact
    }

    /// The concrete role fact `r(x, child, time)` for a stored role fact,
    /// emitting the EXISTS and RIGID steps it needs.
    fn role(&mut self, rf: u32, x: &Term, time: i64) -> (Term, Fact) {
        let r = self.e.rfacts[rf as usize];
        let role = self.e.roles[r.r as usize].clone();
        let child = match (&self.e.terms[r.o as usize], r.just) {
            (TermInfo::Ind(b), _) => Term::Individual(b.clone()),
            (TermInfo::Null { .. }, RJust::Exists { prem, incl }) => self.copy(rf, x, prem, incl),
            (TermInfo::Null { .. }, RJust::Initial) => unreachable!("ABox role facts are ground"),
        };
        let origin = Fact::Role { role: role.clone(), subject: x.clone(), object: child.clone(), time: r.t };
        if matches!(r.just, RJust::Initial) {
            self.add_initial(Formula::Fact(origin.clone()));
        }
        if time == r.t {
            return (child, origin);
        }
        let moved = Fact::Role { role, subject: x.clone(), object: child.clone(), time };
        if self.rigid_done.insert(moved.clone()) {
            self.push(RuleId::Rigid, vec![Formula::Fact(origin)], vec![moved.clone()]);
        }
        (child, moved)
    }

    fn copy(&mut self, rf: u32, x: &Term, prem: FactId, incl: u32) -> Term {
        if let Some(c) = self.copies.get(&(x.clone(), rf)) {
            return c.clone();
        }
        let r = self.e.rfacts[rf as usize];
        let p = self.concept(prem, x);
        let i = self.incl(incl);
        let null = Term::Null(self.next_null);
        self.next_null += 1;
        let (filler, filler_id) = match &self.e.incls[incl as usize] {
            ConceptInclusion::ExistsRight { filler, .. } => {
                let c = self.e.concept_ids[filler];
                (filler.clone(), self.e.cindex[&(c, r.o, r.t)])
            }
            _ => unreachable!("EXISTS justifications reference existential inclusions"),
        };
        let role_fact = Fact::Role {
            role: self.e.roles[r.r as usize].clone(),
            subject: x.clone(),
            object: null.clone(),
            time: r.t,
        };
        let filler_fact = Fact::Concept { concept: filler, subject: null.clone(), time: r.t };
        self.push(RuleId::Exists, vec![Formula::Fact(p), i], vec![role_fact, filler_fact.clone()]);
        self.memo.insert((filler_id, null.clone()), filler_fact);
        self.copies.insert((x.clone(), rf), null.clone());
        null
    }

    fn push(&mut self, rule: RuleId, premises: Vec<Formula>, conclusions: Vec<Fact>) {
        self.steps.push(RuleApplication { rule, premises, conclusions });
    }
}

/// Name of the individual used for inclusion entailment queries. It cannot
/// be written in the ABox format, so it never clashes with user data.
pub const PROBE: &str = "a*";

/// Decides `(T, A) ⊨ goal` by saturation within `cfg`.
pub fn entails_fact(kb: &KnowledgeBase, goal: &Fact, cfg: SaturationConfig) -> Entailment {
    match saturate(kb, cfg).trace_for(goal) {
        Some(trace) => Entailment::Yes(trace),
        None => Entailment::UnknownAtBound,
    }
}

fn probe_kb(tbox: &TBox, lhs: &ConceptName) -> KnowledgeBase {
    let abox = ABox::from_facts([Fact::concept(lhs.clone(), PROBE, 0)]).expect("ground");
    KnowledgeBase::new(tbox.clone(), abox)
}

/// Decides `T ⊨ lhs ⊑ ○^delta rhs` by saturating `(T, {lhs(a*, 0)})`.
pub fn entails_ci(
    tbox: &TBox,
    lhs: &ConceptName,
    delta: i64,
    rhs: &ConceptName,
    cfg: SaturationConfig,
) -> Entailment {
    entails_fact(&probe_kb(tbox, lhs), &Fact::concept(rhs.clone(), PROBE, delta), cfg)
}

/// `{n : |n| ≤ bound, T ⊨ lhs ⊑ ○ⁿ rhs}` as far as derivable within `cfg`
/// (a lower approximation of the true shift set).
pub fn shift_set(
    tbox: &TBox,
    lhs: &ConceptName,
    rhs: &ConceptName,
    bound: u64,
    cfg: SaturationConfig,
) -> BTreeSet<i64> {
    let b = bound as i64;
    shift_profile(tbox, lhs, cfg).remove(rhs).unwrap_or_default().into_iter().filter(|n| n.abs() <= b).collect()
}

/// For every concept `B`, the shifts `n` in the window of `cfg` with
/// `T ⊨ lhs ⊑ ○ⁿ B` derivable within `cfg`.
pub fn shift_profile(
    tbox: &TBox,
    lhs: &ConceptName,
    cfg: SaturationConfig,
) -> BTreeMap<ConceptName, BTreeSet<i64>> {
    let sat = saturate(&probe_kb(tbox, lhs), cfg);
    let probe = Individual::new(PROBE);
    let e = &sat.engine;
    let mut out = BTreeMap::new();
    if let Some(&x) = e.individuals.get(&probe) {
        for (&(t, c), facts) in e.by_term_concept.range((x, 0)..=(x, Cid::MAX)) {
            debug_assert_eq!(t, x);
            out.insert(e.concepts[c as usize].clone(), facts.iter().map(|&(time, _)| time).collect());
        }
    }
    out
}
