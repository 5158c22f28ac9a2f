//! Conjunctive grammars.
//!
//! A rule `N → α₁ & … & αₙ` puts a word `w` in `L(N)` when `w` belongs to
//! the language of every conjunct `αᵢ`. With a single conjunct per rule the
//! grammar is context-free.
//!
//! Membership is decided by a substring-indexed chart over a binary normal
//! form ([`Grammar::to_binary_normal`]). Cells for the empty substring are
//! part of the chart, and each cell is closed under unit conjuncts and
//! splits with an empty half before the next cell is computed, so ε-rules
//! and unit rules need no grammar rewriting.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::util::fresh_name;

/// Index of a nonterminal in a [`Grammar`].
pub type NtId = usize;

/// A grammar symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GSymbol {
    /// A terminal letter.
    Terminal(char),
    /// A nonterminal.
    Nonterminal(NtId),
}

/// A rule `lhs → α₁ & … & αₙ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrammarRule {
    /// The defined nonterminal.
    pub lhs: NtId,
    /// The conjuncts; at least one. An empty conjunct is ε.
    pub conjuncts: Vec<Vec<GSymbol>>,
}

/// The most specific grammar class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarClass {
    /// Every rule has one conjunct of the form ε or `a N`.
    Regular,
    /// Every rule has exactly one conjunct.
    ContextFree,
    /// Some rule has several conjuncts.
    Conjunctive,
}

impl fmt::Display for GrammarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrammarClass::Regular => "regular",
            GrammarClass::ContextFree => "context_free",
            GrammarClass::Conjunctive => "conjunctive",
        })
    }
}

/// Errors raised by grammar operations.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    /// The operation needs a grammar over at most one letter.
    #[error("grammar is not unary (terminals: {0})")]
    NotUnary(String),
    /// The operation needs a context-free grammar.
    #[error("grammar is not context-free")]
    NotContextFree,
    /// A rule mentions a nonterminal id that does not exist.
    #[error("unknown nonterminal id {0}")]
    UnknownNonterminal(NtId),
    /// A rule has no conjunct.
    #[error("a rule needs at least one conjunct")]
    EmptyRule,
}

/// A conjunctive grammar `(N, Σ, S, R)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grammar {
    names: Vec<String>,
    index: BTreeMap<String, NtId>,
    terminals: BTreeSet<char>,
    rules: Vec<GrammarRule>,
    start: Option<NtId>,
}

impl Grammar {
    /// The empty grammar.
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a nonterminal (idempotent) and returns its id.
    pub fn add_nonterminal(&mut self, name: impl AsRef<str>) -> NtId {
        let name = name.as_ref();
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    /// Declares a terminal letter.
    pub fn add_terminal(&mut self, c: char) {
        self.terminals.insert(c);
    }

    /// Adds a rule; terminals it mentions are declared automatically.
    pub fn add_rule(&mut self, lhs: NtId, conjuncts: Vec<Vec<GSymbol>>) -> Result<(), GrammarError> {
        if conjuncts.is_empty() {
            return Err(GrammarError::EmptyRule);
        }
        if lhs >= self.names.len() {
            return Err(GrammarError::UnknownNonterminal(lhs));
        }
        for s in conjuncts.iter().flatten() {
            match *s {
                GSymbol::Terminal(c) => {
                    self.terminals.insert(c);
                }
                GSymbol::Nonterminal(n) if n >= self.names.len() => {
                    return Err(GrammarError::UnknownNonterminal(n))
                }
                GSymbol::Nonterminal(_) => {}
            }
        }
        self.rules.push(GrammarRule { lhs, conjuncts });
        Ok(())
    }

    /// Sets the start symbol.
    pub fn set_start(&mut self, start: Option<NtId>) {
        self.start = start;
    }

    /// The start symbol, if any.
    pub fn start(&self) -> Option<NtId> {
        self.start
    }

    /// Looks a nonterminal up by name.
    pub fn nt(&self, name: &str) -> Option<NtId> {
        self.index.get(name).copied()
    }

    /// The name of a nonterminal.
    pub fn name(&self, id: NtId) -> &str {
        &self.names[id]
    }

    /// Number of nonterminals.
    pub fn nonterminal_count(&self) -> usize {
        self.names.len()
    }

    /// The terminal alphabet.
    pub fn terminals(&self) -> &BTreeSet<char> {
        &self.terminals
    }

    /// The rules, in insertion order.
    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    /// Total number of symbols in all rules (plus one per rule).
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.conjuncts.iter().map(|c| c.len().max(1)).sum::<usize>()).sum()
    }

    /// The single letter of a unary grammar (`c` if there is no terminal).
    pub fn unary_letter(&self) -> Result<char, GrammarError> {
        match self.terminals.len() {
            0 => Ok('c'),
            1 => Ok(*self.terminals.iter().next().expect("one terminal")),
            _ => Err(GrammarError::NotUnary(self.terminals.iter().collect())),
        }
    }

    /// The most specific class of the grammar.
    pub fn classify(&self) -> GrammarClass {
        if self.rules.iter().any(|r| r.conjuncts.len() > 1) {
            return GrammarClass::Conjunctive;
        }
        let regular = self.rules.iter().all(|r| {
            let c = &r.conjuncts[0];
            c.is_empty()
                || (c.len() == 2
                    && matches!(c[0], GSymbol::Terminal(_))
                    && matches!(c[1], GSymbol::Nonterminal(_)))
        });
        if regular {
            GrammarClass::Regular
        } else {
            GrammarClass::ContextFree
        }
    }

    fn fresh_names(&self) -> BTreeSet<String> {
        self.names.iter().cloned().collect()
    }

    /// Converts to a grammar in which every conjunct is ε, one terminal, one
    /// nonterminal, or two nonterminals. Original nonterminals keep their
    /// ids and languages; helpers are appended.
    pub fn to_binary_normal(&self) -> Grammar {
        let bin = Binary::new(self);
        let mut g = Grammar { terminals: self.terminals.clone(), start: self.start, ..Grammar::default() };
        for name in &bin.names {
            g.add_nonterminal(name);
        }
        for rule in &bin.rules {
            let conjuncts = rule
                .conjs
                .iter()
                .map(|c| match *c {
                    BinConj::Eps => vec![],
                    BinConj::Term(a) => vec![GSymbol::Terminal(a)],
                    BinConj::Unit(y) => vec![GSymbol::Nonterminal(y)],
                    BinConj::Pair(y, z) => vec![GSymbol::Nonterminal(y), GSymbol::Nonterminal(z)],
                })
                .collect();
            g.rules.push(GrammarRule { lhs: rule.lhs, conjuncts });
        }
        g
    }

    /// Converts a unary grammar to rules of the shapes `B → ε`, `B → cⁿ`
    /// (`n > 0`), `B → α₁` and `B → α₁ & α₂` with nonempty nonterminal
    /// strings `αᵢ`. Original nonterminals keep their ids and languages.
    pub fn to_unary_canonical(&self) -> Result<Grammar, GrammarError> {
        let letter = self.unary_letter()?;
        let mut taken = self.fresh_names();
        let mut g = Grammar { terminals: self.terminals.clone(), start: self.start, ..Grammar::default() };
        for name in &self.names {
            g.add_nonterminal(name);
        }
        let mut letter_helper: Option<NtId> = None;
        let mut eps_helper: Option<NtId> = None;
        let mut out_rules: Vec<GrammarRule> = Vec::new();
        let mut to_nts = |conj: &[GSymbol], g: &mut Grammar, taken: &mut BTreeSet<String>, out: &mut Vec<GrammarRule>| -> Vec<NtId> {
            if conj.is_empty() {
                let e = *eps_helper.get_or_insert_with(|| {
                    let id = g.add_nonterminal(fresh_name("Eps".to_string(), taken));
                    out.push(GrammarRule { lhs: id, conjuncts: vec![vec![]] });
                    id
                });
                return vec![e];
            }
            conj.iter()
                .map(|s| match *s {
                    GSymbol::Nonterminal(n) => n,
                    GSymbol::Terminal(_) => *letter_helper.get_or_insert_with(|| {
                        let id = g.add_nonterminal(fresh_name(format!("T_{letter}"), taken));
                        out.push(GrammarRule { lhs: id, conjuncts: vec![vec![GSymbol::Terminal(letter)]] });
                        id
                    }),
                })
                .collect()
        };
        let as_symbols = |nts: Vec<NtId>| nts.into_iter().map(GSymbol::Nonterminal).collect::<Vec<_>>();
        let mut helper_count = 0usize;
        for rule in &self.rules {
            if rule.conjuncts.len() == 1 {
                let conj = &rule.conjuncts[0];
                if conj.iter().all(|s| matches!(s, GSymbol::Terminal(_))) {
                    out_rules.push(rule.clone());
                } else {
                    let nts = to_nts(conj, &mut g, &mut taken, &mut out_rules);
                    out_rules.push(GrammarRule { lhs: rule.lhs, conjuncts: vec![as_symbols(nts)] });
                }
                continue;
            }
            let alphas: Vec<Vec<GSymbol>> = rule
                .conjuncts
                .iter()
                .map(|c| as_symbols(to_nts(c, &mut g, &mut taken, &mut out_rules)))
                .collect();
            let mut lhs = rule.lhs;
            let k = alphas.len();
            for (i, alpha) in alphas.iter().enumerate().take(k - 1) {
                if i == k - 2 {
                    out_rules.push(GrammarRule { lhs, conjuncts: vec![alpha.clone(), alphas[k - 1].clone()] });
                } else {
                    helper_count += 1;
                    let h = g.add_nonterminal(fresh_name(format!("Meet{helper_count}"), &mut taken));
                    out_rules.push(GrammarRule {
                        lhs,
                        conjuncts: vec![alpha.clone(), vec![GSymbol::Nonterminal(h)]],
                    });
                    lhs = h;
                }
            }
        }
        g.rules = out_rules;
        Ok(g)
    }

    /// Decides `w ∈ L(nt)`, returning a derivation on success.
    pub fn member(&self, nt: NtId, w: &str) -> Membership {
        let bin = Binary::new(self);
        let word: Vec<char> = w.chars().collect();
        let mut chart = Chart::new(&bin, Mode::General(&word), nt, true);
        chart.fill(word.len());
        if !chart.has(0, word.len(), nt) {
            return Membership::No;
        }
        let mut builder = TraceBuilder { chart: &chart, word: &word, done: BTreeSet::new(), steps: Vec::new() };
        builder.emit(nt, 0, word.len());
        Membership::Yes(GrammarTrace { steps: builder.steps })
    }

    /// Decides `cⁿ ∈ L(nt)` for a unary grammar.
    pub fn member_unary(&self, nt: NtId, n: usize) -> Result<bool, GrammarError> {
        Ok(self.language_lengths(nt, n)?.contains(&n))
    }

    /// The lengths `n ≤ bound` with `cⁿ ∈ L(nt)`.
    pub fn language_lengths(&self, nt: NtId, bound: usize) -> Result<BTreeSet<usize>, GrammarError> {
        let letter = self.unary_letter()?;
        let bin = Binary::new(self);
        let mut chart = Chart::new(&bin, Mode::Unary(letter), nt, false);
        chart.fill(bound);
        Ok((0..=bound).filter(|&n| chart.has(0, n, nt)).collect())
    }

    /// Length sets up to `bound` for every nonterminal of a unary grammar,
    /// indexed by nonterminal id.
    pub fn all_language_lengths(&self, bound: usize) -> Result<Vec<BTreeSet<usize>>, GrammarError> {
        let letter = self.unary_letter()?;
        let bin = Binary::new(self);
        let mut chart = Chart::new_all(&bin, Mode::Unary(letter));
        chart.fill(bound);
        Ok((0..self.names.len())
            .map(|nt| (0..=bound).filter(|&n| chart.has(0, n, nt)).collect())
            .collect())
    }
}

/// The outcome of [`Grammar::member`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The word is in the language, with a derivation.
    Yes(GrammarTrace),
    /// The word is not in the language.
    No,
}

impl Membership {
    /// Whether the answer is `Yes`.
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }
}

/// One derivation step `X¹₁(u¹₁), …, Xⁿₖ(uⁿₖ) ⊢ N(w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarStep {
    /// The derived nonterminal.
    pub nonterminal: NtId,
    /// The derived word.
    pub word: String,
    /// Index of the applied rule in [`Grammar::rules`].
    pub rule: usize,
    /// For each conjunct, the symbols paired with the factors of `word`
    /// they derive (concatenating the factors gives `word`).
    pub parts: Vec<Vec<(GSymbol, String)>>,
}

/// A derivation: each step's premises are derived by earlier steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarTrace {
    /// The steps, premises first; the last step derives the goal.
    pub steps: Vec<GrammarStep>,
}

impl GrammarTrace {
    /// Checks the trace against the grammar: each step instantiates its rule
    /// with factors that concatenate to the word, terminals match, and every
    /// nonterminal premise was derived earlier.
    pub fn verify(&self, g: &Grammar) -> Result<(), String> {
        let mut known: BTreeSet<(NtId, String)> = BTreeSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            let rule = g.rules().get(step.rule).ok_or_else(|| format!("step {i}: no rule {}", step.rule))?;
            if rule.lhs != step.nonterminal || rule.conjuncts.len() != step.parts.len() {
                return Err(format!("step {i}: rule shape mismatch"));
            }
            for (conj, parts) in rule.conjuncts.iter().zip(&step.parts) {
                let syms: Vec<GSymbol> = parts.iter().map(|p| p.0).collect();
                if &syms != conj {
                    return Err(format!("step {i}: conjunct symbols mismatch"));
                }
                let joined: String = parts.iter().map(|p| p.1.as_str()).collect();
                if joined != step.word {
                    return Err(format!("step {i}: factors do not spell the word"));
                }
                for (sym, factor) in parts {
                    match sym {
                        GSymbol::Terminal(c) => {
                            let mut buf = [0u8; 4];
                            if factor.as_str() != c.encode_utf8(&mut buf) {
                                return Err(format!("step {i}: terminal mismatch"));
                            }
                        }
                        GSymbol::Nonterminal(n) => {
                            if !known.contains(&(*n, factor.clone())) {
                                return Err(format!("step {i}: premise not yet derived"));
                            }
                        }
                    }
                }
            }
            known.insert((step.nonterminal, step.word.clone()));
        }
        Ok(())
    }

    /// The conclusion of the last step.
    pub fn goal(&self) -> Option<(NtId, &str)> {
        self.steps.last().map(|s| (s.nonterminal, s.word.as_str()))
    }
}

// ---------------------------------------------------------------------------
// Binary normal form with provenance.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinConj {
    Eps,
    Term(char),
    Unit(NtId),
    Pair(NtId, NtId),
}

#[derive(Clone, Debug)]
struct BinRule {
    lhs: NtId,
    conjs: Vec<BinConj>,
    /// Index of the original rule, or `None` for helper rules.
    origin: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NtKind {
    Original,
    Letter(char),
    Suffix,
}

struct Binary {
    names: Vec<String>,
    kinds: Vec<NtKind>,
    rules: Vec<BinRule>,
}

impl Binary {
    fn new(g: &Grammar) -> Self {
        let mut b = Binary {
            names: g.names.clone(),
            kinds: vec![NtKind::Original; g.names.len()],
            rules: Vec::new(),
        };
        let mut taken = g.fresh_names();
        let mut letters: BTreeMap<char, NtId> = BTreeMap::new();
        let mut suffixes: BTreeMap<Vec<NtId>, NtId> = BTreeMap::new();
        for (idx, rule) in g.rules.iter().enumerate() {
            let conjs = rule
                .conjuncts
                .iter()
                .map(|conj| match conj.as_slice() {
                    [] => BinConj::Eps,
                    [GSymbol::Terminal(a)] => BinConj::Term(*a),
                    [GSymbol::Nonterminal(y)] => BinConj::Unit(*y),
                    _ => {
                        let seq: Vec<NtId> = conj
                            .iter()
                            .map(|s| match *s {
                                GSymbol::Nonterminal(n) => n,
                                GSymbol::Terminal(a) => b.letter(a, &mut letters, &mut taken),
                            })
                            .collect();
                        let rest = b.suffix(&seq[1..], &mut suffixes, &mut taken);
                        BinConj::Pair(seq[0], rest)
                    }
                })
                .collect();
            b.rules.push(BinRule { lhs: rule.lhs, conjs, origin: Some(idx) });
        }
        b
    }

    fn add(&mut self, name: String, kind: NtKind) -> NtId {
        self.names.push(name);
        self.kinds.push(kind);
        self.names.len() - 1
    }

    fn letter(&mut self, a: char, memo: &mut BTreeMap<char, NtId>, taken: &mut BTreeSet<String>) -> NtId {
        if let Some(&id) = memo.get(&a) {
            return id;
        }
        let id = self.add(fresh_name(format!("T_{a}"), taken), NtKind::Letter(a));
        self.rules.push(BinRule { lhs: id, conjs: vec![BinConj::Term(a)], origin: None });
        memo.insert(a, id);
        id
    }

    /// A nonterminal deriving the concatenation of `seq` (`seq` nonempty).
    fn suffix(&mut self, seq: &[NtId], memo: &mut BTreeMap<Vec<NtId>, NtId>, taken: &mut BTreeSet<String>) -> NtId {
        if seq.len() == 1 {
            return seq[0];
        }
        if let Some(&id) = memo.get(seq) {
            return id;
        }
        let rest = self.suffix(&seq[1..], memo, taken);
        let id = self.add(fresh_name(format!("H{}", memo.len() + 1), taken), NtKind::Suffix);
        self.rules.push(BinRule { lhs: id, conjs: vec![BinConj::Pair(seq[0], rest)], origin: None });
        memo.insert(seq.to_vec(), id);
        id
    }
}

// ---------------------------------------------------------------------------
// The chart.

#[derive(Clone, Copy)]
enum Mode<'w> {
    General(&'w [char]),
    Unary(char),
}

#[derive(Clone, Debug)]
struct Just {
    rule: usize,
    splits: Vec<usize>,
}

struct Chart<'b, 'w> {
    bin: &'b Binary,
    mode: Mode<'w>,
    words: usize,
    bits: Vec<u64>,
    /// Justification of the first derivation of each (cell, nonterminal).
    just: Option<BTreeMap<(usize, NtId), Just>>,
    active: Vec<usize>,
    watch: Vec<Vec<usize>>,
}

impl<'b, 'w> Chart<'b, 'w> {
    fn new(bin: &'b Binary, mode: Mode<'w>, goal: NtId, justify: bool) -> Self {
        let productive = productive(bin);
        // Rules reachable from the goal through productive rules.
        let mut by_lhs: Vec<Vec<usize>> = vec![Vec::new(); bin.names.len()];
        for (i, r) in bin.rules.iter().enumerate() {
            if rule_productive(r, &productive) {
                by_lhs[r.lhs].push(i);
            }
        }
        let mut seen = vec![false; bin.names.len()];
        let mut stack = vec![goal];
        seen[goal] = true;
        let mut active = Vec::new();
        while let Some(x) = stack.pop() {
            for &ri in &by_lhs[x] {
                active.push(ri);
                for y in conj_nts(&bin.rules[ri]) {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        active.sort_unstable();
        Self::with_active(bin, mode, active, justify)
    }

    fn new_all(bin: &'b Binary, mode: Mode<'w>) -> Self {
        let productive = productive(bin);
        let active =
            (0..bin.rules.len()).filter(|&i| rule_productive(&bin.rules[i], &productive)).collect();
        Self::with_active(bin, mode, active, false)
    }

    fn with_active(bin: &'b Binary, mode: Mode<'w>, active: Vec<usize>, justify: bool) -> Self {
        let mut watch: Vec<Vec<usize>> = vec![Vec::new(); bin.names.len()];
        for &ri in &active {
            let mut nts: Vec<NtId> = conj_nts(&bin.rules[ri]).collect();
            nts.sort_unstable();
            nts.dedup();
            for y in nts {
                watch[y].push(ri);
            }
        }
        Chart {
            bin,
            mode,
            words: bin.names.len().div_ceil(64).max(1),
            bits: Vec::new(),
            just: if justify { Some(BTreeMap::new()) } else { None },
            active,
            watch,
        }
    }

    fn cell(&self, i: usize, j: usize) -> usize {
        match self.mode {
            Mode::Unary(_) => j - i,
            Mode::General(_) => j * (j + 1) / 2 + i,
        }
    }

    fn has(&self, i: usize, j: usize, x: NtId) -> bool {
        let base = self.cell(i, j) * self.words;
        self.bits.get(base + x / 64).is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    fn set(&mut self, i: usize, j: usize, x: NtId) {
        let base = self.cell(i, j) * self.words;
        self.bits[base + x / 64] |= 1 << (x % 64);
    }

    fn fill(&mut self, n: usize) {
        let cells = match self.mode {
            Mode::Unary(_) => n + 1,
            Mode::General(_) => (n + 1) * (n + 2) / 2,
        };
        self.bits = vec![0; cells * self.words];
        for len in 0..=n {
            match self.mode {
                Mode::Unary(_) => self.fill_cell(0, len),
                Mode::General(_) => {
                    for i in 0..=n - len {
                        self.fill_cell(i, i + len);
                    }
                }
            }
        }
    }

    fn fill_cell(&mut self, i: usize, j: usize) {
        let mut queue: VecDeque<usize> = self.active.iter().copied().collect();
        let mut queued = vec![false; self.bin.rules.len()];
        for &r in &self.active {
            queued[r] = true;
        }
        while let Some(ri) = queue.pop_front() {
            queued[ri] = false;
            let lhs = self.bin.rules[ri].lhs;
            if self.has(i, j, lhs) {
                continue;
            }
            if let Some(splits) = self.check(ri, i, j) {
                self.set(i, j, lhs);
                if let Some(just) = self.just.as_mut() {
                    let c = match self.mode {
                        Mode::Unary(_) => j - i,
                        Mode::General(_) => j * (j + 1) / 2 + i,
                    };
                    just.insert((c, lhs), Just { rule: ri, splits });
                }
                for &w in &self.watch[lhs] {
                    if !queued[w] && !self.has(i, j, self.bin.rules[w].lhs) {
                        queued[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    fn check(&self, ri: usize, i: usize, j: usize) -> Option<Vec<usize>> {
        let rule = &self.bin.rules[ri];
        let mut splits = Vec::with_capacity(rule.conjs.len());
        for conj in &rule.conjs {
            let ok = match *conj {
                BinConj::Eps => i == j,
                BinConj::Term(a) => {
                    j == i + 1
                        && match self.mode {
                            Mode::Unary(c) => a == c,
                            Mode::General(w) => w[i] == a,
                        }
                }
                BinConj::Unit(y) => self.has(i, j, y),
                BinConj::Pair(y, z) => match (i..=j).find(|&k| self.has(i, k, y) && self.has(k, j, z)) {
                    Some(k) => {
                        splits.push(k);
                        true
                    }
                    None => false,
                },
            };
            if !ok {
                return None;
            }
            if !matches!(conj, BinConj::Pair(..)) {
                splits.push(i);
            }
        }
        Some(splits)
    }

    fn justification(&self, i: usize, j: usize, x: NtId) -> &Just {
        let c = self.cell(i, j);
        self.just.as_ref().and_then(|m| m.get(&(c, x))).expect("derived items are justified")
    }
}

fn conj_nts(rule: &BinRule) -> impl Iterator<Item = NtId> + '_ {
    rule.conjs.iter().flat_map(|c| match *c {
        BinConj::Unit(y) => vec![y],
        BinConj::Pair(y, z) => vec![y, z],
        _ => vec![],
    })
}

fn rule_productive(rule: &BinRule, productive: &[bool]) -> bool {
    conj_nts(rule).all(|y| productive[y])
}

/// Nonterminals that may derive some word: an over-approximation of
/// nonemptiness (exact for context-free grammars).
fn productive(bin: &Binary) -> Vec<bool> {
    let mut prod = vec![false; bin.names.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for r in &bin.rules {
            if !prod[r.lhs] && rule_productive(r, &prod) {
                prod[r.lhs] = true;
                changed = true;
            }
        }
    }
    prod
}

struct TraceBuilder<'c, 'b, 'w> {
    chart: &'c Chart<'b, 'w>,
    word: &'w [char],
    /// Items already emitted; equal factors share one derivation.
    done: BTreeSet<(NtId, String)>,
    steps: Vec<GrammarStep>,
}

impl TraceBuilder<'_, '_, '_> {
    fn factor(&self, i: usize, j: usize) -> String {
        self.word[i..j].iter().collect()
    }

    /// Expands a binary-form item into original symbols with their spans.
    fn expand(&self, x: NtId, i: usize, j: usize, out: &mut Vec<(GSymbol, usize, usize)>) {
        match self.chart.bin.kinds[x] {
            NtKind::Original => out.push((GSymbol::Nonterminal(x), i, j)),
            NtKind::Letter(a) => out.push((GSymbol::Terminal(a), i, j)),
            NtKind::Suffix => {
                let just = self.chart.justification(i, j, x);
                let rule = &self.chart.bin.rules[just.rule];
                if let BinConj::Pair(y, z) = rule.conjs[0] {
                    let k = just.splits[0];
                    self.expand(y, i, k, out);
                    self.expand(z, k, j, out);
                }
            }
        }
    }

    fn emit(&mut self, x: NtId, i: usize, j: usize) {
        if !self.done.insert((x, self.factor(i, j))) {
            return;
        }
        let just = self.chart.justification(i, j, x).clone();
        let rule = &self.chart.bin.rules[just.rule];
        let mut parts = Vec::new();
        for (conj, &k) in rule.conjs.iter().zip(&just.splits) {
            let mut spans = Vec::new();
            match *conj {
                BinConj::Eps => {}
                BinConj::Term(a) => spans.push((GSymbol::Terminal(a), i, j)),
                BinConj::Unit(y) => self.expand(y, i, j, &mut spans),
                BinConj::Pair(y, z) => {
                    self.expand(y, i, k, &mut spans);
                    self.expand(z, k, j, &mut spans);
                }
            }
            parts.push(spans);
        }
        for spans in &parts {
            for &(sym, a, b) in spans {
                if let GSymbol::Nonterminal(y) = sym {
                    self.emit(y, a, b);
                }
            }
        }
        self.steps.push(GrammarStep {
            nonterminal: x,
            word: self.factor(i, j),
            rule: rule.origin.expect("original nonterminals use original rules"),
            parts: parts
                .into_iter()
                .map(|spans| spans.into_iter().map(|(s, a, b)| (s, self.factor(a, b))).collect())
                .collect(),
        });
    }
}

/// Renders a symbol using the grammar's names.
pub fn symbol_name(g: &Grammar, s: GSymbol) -> String {
    match s {
        GSymbol::Terminal(c) => c.to_string(),
        GSymbol::Nonterminal(n) => g.name(n).to_string(),
    }
}
