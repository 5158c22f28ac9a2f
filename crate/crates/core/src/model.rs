//! Syntax of TEL^X knowledge bases in normal form.
//!
//! A TBox is a finite set of [`ConceptInclusion`]s, each of one of four
//! shapes; an ABox is a finite set of timestamped [`Fact`]s about named
//! individuals. Role names are either rigid or local; rigidity is an
//! attribute of the name, declared once in the TBox.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

macro_rules! symbol {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            /// Creates a symbol from its textual name.
            pub fn new(name: impl AsRef<str>) -> Self {
                Self(Arc::from(name.as_ref()))
            }

            /// The textual name of the symbol.
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", &self.0)
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                Self::new(name)
            }
        }

        impl From<String> for $name {
            fn from(name: String) -> Self {
                Self(Arc::from(name))
            }
        }

        impl From<&String> for $name {
            fn from(name: &String) -> Self {
                Self::new(name)
            }
        }
    };
}

symbol!(
    /// A concept name (unary predicate), such as `Prof`.
    ConceptName
);
symbol!(
    /// A role name (binary predicate), such as `advisorOf`.
    RoleName
);
symbol!(
    /// A named individual, such as `Alice`.
    Individual
);

/// Whether a role holds at every time point or only where asserted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rigidity {
    /// The extension of the role is the same at every time point.
    Rigid,
    /// The role holds only at the time points where it is derived.
    Local,
}

/// A domain element: a named individual or an anonymous (named) null.
///
/// Nulls are introduced by existential inclusions during saturation; the
/// two namespaces are disjoint by construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    /// A named individual from the ABox.
    Individual(Individual),
    /// An anonymous element, identified by an index.
    Null(u32),
}

impl Term {
    /// Shorthand for an individual term.
    pub fn ind(name: impl AsRef<str>) -> Self {
        Term::Individual(Individual::new(name))
    }

    /// Whether this term is a null.
    pub fn is_null(&self) -> bool {
        matches!(self, Term::Null(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Individual(a) => write!(f, "{a}"),
            Term::Null(n) => write!(f, "_:{n}"),
        }
    }
}

/// A timestamped assertion `A(a, n)` or `r(a, b, n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Fact {
    /// `concept(subject, time)`.
    Concept {
        /// The asserted concept.
        concept: ConceptName,
        /// The element the concept holds for.
        subject: Term,
        /// The time point.
        time: i64,
    },
    /// `role(subject, object, time)`.
    Role {
        /// The asserted role.
        role: RoleName,
        /// The first argument.
        subject: Term,
        /// The second argument.
        object: Term,
        /// The time point.
        time: i64,
    },
}

impl Fact {
    /// `concept(individual, time)`.
    pub fn concept(concept: impl Into<ConceptName>, individual: impl AsRef<str>, time: i64) -> Self {
        Fact::Concept { concept: concept.into(), subject: Term::ind(individual), time }
    }

    /// `role(subject, object, time)` over individuals.
    pub fn role(
        role: impl Into<RoleName>,
        subject: impl AsRef<str>,
        object: impl AsRef<str>,
        time: i64,
    ) -> Self {
        Fact::Role { role: role.into(), subject: Term::ind(subject), object: Term::ind(object), time }
    }

    /// The time point of the fact.
    pub fn time(&self) -> i64 {
        match self {
            Fact::Concept { time, .. } | Fact::Role { time, .. } => *time,
        }
    }

    /// The terms occurring in the fact.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let (a, b) = match self {
            Fact::Concept { subject, .. } => (subject, None),
            Fact::Role { subject, object, .. } => (subject, Some(object)),
        };
        core::iter::once(a).chain(b)
    }

    /// Whether the fact mentions no null.
    pub fn is_ground(&self) -> bool {
        self.terms().all(|t| !t.is_null())
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Concept { concept, subject, time } => write!(f, "{concept}({subject}, {time})"),
            Fact::Role { role, subject, object, time } => {
                write!(f, "{role}({subject}, {object}, {time})")
            }
        }
    }
}

/// A concept inclusion in normal form.
///
/// `A ⊑ B` is the shift with delta 0; `○` and `○⁻` are deltas `1` and `-1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ConceptInclusion {
    /// `lhs ⊑ ○^delta rhs`.
    Shift {
        /// Left-hand concept.
        lhs: ConceptName,
        /// Number of time steps (negative means the past).
        delta: i64,
        /// Right-hand concept.
        rhs: ConceptName,
    },
    /// `lhs1 ⊓ lhs2 ⊑ rhs`.
    Conj {
        /// First conjunct.
        lhs1: ConceptName,
        /// Second conjunct.
        lhs2: ConceptName,
        /// Right-hand concept.
        rhs: ConceptName,
    },
    /// `∃role.filler ⊑ rhs`.
    ExistsLeft {
        /// The role.
        role: RoleName,
        /// Concept required of the role successor.
        filler: ConceptName,
        /// Right-hand concept.
        rhs: ConceptName,
    },
    /// `lhs ⊑ ∃role.filler`.
    ExistsRight {
        /// Left-hand concept.
        lhs: ConceptName,
        /// The role.
        role: RoleName,
        /// Concept of the introduced successor.
        filler: ConceptName,
    },
}

impl ConceptInclusion {
    /// `lhs ⊑ ○^delta rhs`.
    pub fn shift(lhs: impl Into<ConceptName>, delta: i64, rhs: impl Into<ConceptName>) -> Self {
        ConceptInclusion::Shift { lhs: lhs.into(), delta, rhs: rhs.into() }
    }

    /// `lhs ⊑ rhs`, the shift by zero.
    pub fn sub(lhs: impl Into<ConceptName>, rhs: impl Into<ConceptName>) -> Self {
        Self::shift(lhs, 0, rhs)
    }

    /// `lhs1 ⊓ lhs2 ⊑ rhs`.
    pub fn conj(
        lhs1: impl Into<ConceptName>,
        lhs2: impl Into<ConceptName>,
        rhs: impl Into<ConceptName>,
    ) -> Self {
        ConceptInclusion::Conj { lhs1: lhs1.into(), lhs2: lhs2.into(), rhs: rhs.into() }
    }

    /// `∃role.filler ⊑ rhs`.
    pub fn exists_left(
        role: impl Into<RoleName>,
        filler: impl Into<ConceptName>,
        rhs: impl Into<ConceptName>,
    ) -> Self {
        ConceptInclusion::ExistsLeft { role: role.into(), filler: filler.into(), rhs: rhs.into() }
    }

    /// `lhs ⊑ ∃role.filler`.
    pub fn exists_right(
        lhs: impl Into<ConceptName>,
        role: impl Into<RoleName>,
        filler: impl Into<ConceptName>,
    ) -> Self {
        ConceptInclusion::ExistsRight { lhs: lhs.into(), role: role.into(), filler: filler.into() }
    }

    /// The concept names occurring in the inclusion.
    pub fn concepts(&self) -> Vec<&ConceptName> {
        match self {
            ConceptInclusion::Shift { lhs, rhs, .. } => alloc::vec![lhs, rhs],
            ConceptInclusion::Conj { lhs1, lhs2, rhs } => alloc::vec![lhs1, lhs2, rhs],
            ConceptInclusion::ExistsLeft { filler, rhs, .. } => alloc::vec![filler, rhs],
            ConceptInclusion::ExistsRight { lhs, filler, .. } => alloc::vec![lhs, filler],
        }
    }

    /// The role occurring in the inclusion, if any.
    pub fn role(&self) -> Option<&RoleName> {
        match self {
            ConceptInclusion::ExistsLeft { role, .. } | ConceptInclusion::ExistsRight { role, .. } => {
                Some(role)
            }
            _ => None,
        }
    }

    /// Number of symbols needed to write the inclusion, counting a shift
    /// `○ⁿ` as `|n|` symbols.
    pub fn size(&self) -> usize {
        match self {
            ConceptInclusion::Shift { delta, .. } => 2 + delta.unsigned_abs() as usize,
            _ => 3,
        }
    }
}

impl fmt::Display for ConceptInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptInclusion::Shift { lhs, delta: 0, rhs } => write!(f, "{lhs} [= {rhs}"),
            ConceptInclusion::Shift { lhs, delta, rhs } => write!(f, "{lhs} [= X^{delta} {rhs}"),
            ConceptInclusion::Conj { lhs1, lhs2, rhs } => write!(f, "{lhs1} & {lhs2} [= {rhs}"),
            ConceptInclusion::ExistsLeft { role, filler, rhs } => {
                write!(f, "exists {role} . {filler} [= {rhs}")
            }
            ConceptInclusion::ExistsRight { lhs, role, filler } => {
                write!(f, "{lhs} [= exists {role} . {filler}")
            }
        }
    }
}

/// Errors raised when building knowledge bases.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    /// A role was declared both rigid and local.
    #[error("role `{0}` is declared both rigid and local")]
    RigidityConflict(RoleName),
    /// ABoxes contain facts about individuals only.
    #[error("ABox fact `{0}` mentions a null")]
    NullInABox(Fact),
    /// A name must be nonempty.
    #[error("empty name")]
    EmptyName,
}

/// A problem found by [`TBox::validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// The inclusion uses a role that was never declared.
    UndeclaredRole {
        /// The offending role.
        role: RoleName,
        /// The inclusion using it.
        inclusion: ConceptInclusion,
    },
    /// The inclusion uses an empty name.
    EmptyName {
        /// The offending inclusion.
        inclusion: ConceptInclusion,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndeclaredRole { role, inclusion } => {
                write!(f, "undeclared role `{role}` in `{inclusion}`")
            }
            Violation::EmptyName { inclusion } => write!(f, "empty name in `{inclusion}`"),
        }
    }
}

/// The syntactic fragments a TBox belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fragment {
    /// Every shift is non-negative.
    pub is_future: bool,
    /// No conjunction inclusion occurs.
    pub is_linear: bool,
    /// Every role that is used is rigid.
    pub rigid_only: bool,
}

/// A finite set of concept inclusions together with role declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TBox {
    inclusions: BTreeSet<ConceptInclusion>,
    roles: BTreeMap<RoleName, Rigidity>,
    concepts: BTreeSet<ConceptName>,
}

impl TBox {
    /// The empty TBox.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a TBox from inclusions, declaring every role with the given
    /// rigidity lookup (roles not listed in `rigid` are local).
    pub fn from_inclusions<I, R>(inclusions: I, rigid: R) -> Self
    where
        I: IntoIterator<Item = ConceptInclusion>,
        R: IntoIterator,
        R::Item: Into<RoleName>,
    {
        let mut tbox = TBox::new();
        for r in rigid {
            tbox.roles.insert(r.into(), Rigidity::Rigid);
        }
        for ci in inclusions {
            if let Some(r) = ci.role() {
                tbox.roles.entry(r.clone()).or_insert(Rigidity::Local);
            }
            tbox.insert(ci);
        }
        tbox
    }

    /// Declares a role. Redeclaring with the same rigidity is a no-op.
    pub fn declare_role(
        &mut self,
        role: impl Into<RoleName>,
        rigidity: Rigidity,
    ) -> Result<(), ModelError> {
        let role = role.into();
        if role.as_str().is_empty() {
            return Err(ModelError::EmptyName);
        }
        match self.roles.get(&role) {
            Some(&r) if r != rigidity => Err(ModelError::RigidityConflict(role)),
            _ => {
                self.roles.insert(role, rigidity);
                Ok(())
            }
        }
    }

    /// Declares a concept name without using it in an inclusion.
    pub fn declare_concept(&mut self, concept: impl Into<ConceptName>) {
        self.concepts.insert(concept.into());
    }

    /// Adds an inclusion; its concept names are declared automatically,
    /// its role is not. Returns whether the inclusion was new.
    pub fn insert(&mut self, ci: ConceptInclusion) -> bool {
        for c in ci.concepts() {
            self.concepts.insert(c.clone());
        }
        self.inclusions.insert(ci)
    }

    /// Adds an inclusion and declares its role as local if undeclared.
    pub fn insert_declaring(&mut self, ci: ConceptInclusion) -> bool {
        if let Some(r) = ci.role() {
            self.roles.entry(r.clone()).or_insert(Rigidity::Local);
        }
        self.insert(ci)
    }

    /// Removes an inclusion. Declarations are kept.
    pub fn remove(&mut self, ci: &ConceptInclusion) -> bool {
        self.inclusions.remove(ci)
    }

    /// Whether the TBox contains the inclusion.
    pub fn contains(&self, ci: &ConceptInclusion) -> bool {
        self.inclusions.contains(ci)
    }

    /// The inclusions, in a fixed order.
    pub fn inclusions(&self) -> impl Iterator<Item = &ConceptInclusion> + Clone {
        self.inclusions.iter()
    }

    /// Number of inclusions.
    pub fn len(&self) -> usize {
        self.inclusions.len()
    }

    /// Whether there is no inclusion.
    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    /// Declared roles and their rigidity.
    pub fn roles(&self) -> &BTreeMap<RoleName, Rigidity> {
        &self.roles
    }

    /// Roles used by some inclusion.
    pub fn used_roles(&self) -> BTreeSet<RoleName> {
        self.inclusions.iter().filter_map(|ci| ci.role().cloned()).collect()
    }

    /// Declared and used concept names.
    pub fn concepts(&self) -> &BTreeSet<ConceptName> {
        &self.concepts
    }

    /// Rigidity of a role; undeclared roles are local.
    pub fn rigidity(&self, role: &RoleName) -> Rigidity {
        self.roles.get(role).copied().unwrap_or(Rigidity::Local)
    }

    /// Whether a role is declared rigid.
    pub fn is_rigid(&self, role: &RoleName) -> bool {
        self.rigidity(role) == Rigidity::Rigid
    }

    /// Size with shifts counted in unary.
    pub fn size(&self) -> usize {
        self.inclusions.iter().map(ConceptInclusion::size).sum()
    }

    /// Sum of the absolute values of all shifts.
    pub fn abs_delta_sum(&self) -> i64 {
        self.inclusions
            .iter()
            .map(|ci| match ci {
                ConceptInclusion::Shift { delta, .. } => delta.abs(),
                _ => 0,
            })
            .sum()
    }

    /// Number of `A ⊑ ∃r.B` inclusions.
    pub fn exists_right_count(&self) -> usize {
        self.inclusions.iter().filter(|ci| matches!(ci, ConceptInclusion::ExistsRight { .. })).count()
    }

    /// Adds all inclusions and declarations of `other`.
    pub fn extend(&mut self, other: &TBox) -> Result<(), ModelError> {
        for (r, &rig) in &other.roles {
            self.declare_role(r.clone(), rig)?;
        }
        for c in &other.concepts {
            self.concepts.insert(c.clone());
        }
        for ci in &other.inclusions {
            self.insert(ci.clone());
        }
        Ok(())
    }

    /// Lists normal-form violations; empty iff the TBox is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for ci in &self.inclusions {
            if ci.concepts().iter().any(|c| c.as_str().is_empty())
                || ci.role().is_some_and(|r| r.as_str().is_empty())
            {
                out.push(Violation::EmptyName { inclusion: ci.clone() });
            }
            if let Some(r) = ci.role() {
                if !self.roles.contains_key(r) {
                    out.push(Violation::UndeclaredRole { role: r.clone(), inclusion: ci.clone() });
                }
            }
        }
        out
    }

    /// Classifies the TBox into the future / linear / rigid-only fragments.
    pub fn classify(&self) -> Fragment {
        let mut fragment = Fragment { is_future: true, is_linear: true, rigid_only: true };
        for ci in &self.inclusions {
            match ci {
                ConceptInclusion::Shift { delta, .. } if *delta < 0 => fragment.is_future = false,
                ConceptInclusion::Conj { .. } => fragment.is_linear = false,
                _ => {}
            }
            if let Some(r) = ci.role() {
                if !self.is_rigid(r) {
                    fragment.rigid_only = false;
                }
            }
        }
        fragment
    }
}

/// A finite set of timestamped facts about individuals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ABox {
    facts: BTreeSet<Fact>,
}

impl ABox {
    /// The empty ABox.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an ABox, rejecting facts that mention nulls.
    pub fn from_facts(facts: impl IntoIterator<Item = Fact>) -> Result<Self, ModelError> {
        let mut abox = ABox::new();
        for f in facts {
            abox.insert(f)?;
        }
        Ok(abox)
    }

    /// Adds a fact. Returns whether it was new.
    pub fn insert(&mut self, fact: Fact) -> Result<bool, ModelError> {
        if !fact.is_ground() {
            return Err(ModelError::NullInABox(fact));
        }
        Ok(self.facts.insert(fact))
    }

    /// The facts, in a fixed order.
    pub fn facts(&self) -> impl Iterator<Item = &Fact> + Clone {
        self.facts.iter()
    }

    /// Whether the fact is asserted.
    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    /// Number of facts.
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    /// Whether there is no fact.
    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Individuals mentioned in the ABox.
    pub fn individuals(&self) -> BTreeSet<Individual> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            for t in f.terms() {
                if let Term::Individual(a) = t {
                    out.insert(a.clone());
                }
            }
        }
        out
    }

    /// Concept names mentioned in the ABox.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Concept { concept, .. } => Some(concept.clone()),
                _ => None,
            })
            .collect()
    }

    /// Least and greatest timestamps, if the ABox is nonempty.
    pub fn time_range(&self) -> Option<(i64, i64)> {
        let lo = self.facts.iter().map(Fact::time).min()?;
        let hi = self.facts.iter().map(Fact::time).max()?;
        Some((lo, hi))
    }
}

/// A TBox together with an ABox. Role rigidity is taken from the TBox.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    /// The ontology.
    pub tbox: TBox,
    /// The data.
    pub abox: ABox,
}

impl KnowledgeBase {
    /// Pairs a TBox with an ABox.
    pub fn new(tbox: TBox, abox: ABox) -> Self {
        KnowledgeBase { tbox, abox }
    }
}
