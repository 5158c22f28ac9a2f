//! Linear temporal Datalog programs for linear TBoxes.
//!
//! For a linear TBox (no conjunctions) whose shift sets
//! `S_{AB} = {n : T ⊨ A ⊑ ○ⁿ B}` are known as semilinear sets, the program
//! consists of
//!
//! * per `∃r.A ⊑ B`: `B(x) <- r(x,y), A(y)`, and for rigid `r` also
//!   `B(x) <- DIA r(x,y), A(y)` and `B(x) <- DIA- r(x,y), A(y)` (the role
//!   holds at some later / earlier time point);
//! * per pair `(A, B)` and simple component `{b + kp}` of `S_{AB}`:
//!   `F(x) <- X^-b A(x)`, `F(x) <- X^-p F(x)` and `B(x) <- F(x)`, where `F`
//!   is a fresh predicate.
//!
//! `X^k P(x)` in a body holds at `t` when `P(x)` holds at `t + k`.
//!
//! Text format, one rule per line (`#` starts a comment):
//!
//! ```text
//! B(x) <- r(x,y), A(y)
//! B(x) <- DIA r(x,y), A(y)
//! F_A_B_1(x) <- X^-2 A(x)
//! ```

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::model::{ABox, ConceptInclusion, ConceptName, Fact, Individual, RoleName, TBox, Term};
use crate::derive::{shift_profile, SaturationConfig};
use crate::semilinear::{detect_periodicity, LinearSet, SemilinearSet};
use crate::text::{is_ident_char, ParseError, ParseErrorKind};
use crate::translate::TranslateError;
use crate::util::fresh_name;

/// When the role atom of a role rule must hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleModality {
    /// At the current time point.
    Now,
    /// At some strictly later time point.
    Eventually,
    /// At some strictly earlier time point.
    EventuallyPast,
}

/// A rule of a linear temporal Datalog program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatalogRule {
    /// `head(x) <- [DIA|DIA-] role(x,y), filler(y)`.
    Role {
        /// Head predicate.
        head: ConceptName,
        /// When the role must hold.
        modality: RoleModality,
        /// The role.
        role: RoleName,
        /// The predicate required of the successor.
        filler: ConceptName,
    },
    /// `head(x) <- X^shift body(x)`.
    Shift {
        /// Head predicate.
        head: ConceptName,
        /// Time offset of the body atom.
        shift: i64,
        /// Body predicate.
        body: ConceptName,
    },
}

impl fmt::Display for DatalogRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatalogRule::Role { head, modality, role, filler } => {
                let m = match modality {
                    RoleModality::Now => "",
                    RoleModality::Eventually => "DIA ",
                    RoleModality::EventuallyPast => "DIA- ",
                };
                write!(f, "{head}(x) <- {m}{role}(x,y), {filler}(y)")
            }
            DatalogRule::Shift { head, shift: 0, body } => write!(f, "{head}(x) <- {body}(x)"),
            DatalogRule::Shift { head, shift, body } => write!(f, "{head}(x) <- X^{shift} {body}(x)"),
        }
    }
}

/// A linear temporal Datalog program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatalogProgram {
    /// The rules, in emission order.
    pub rules: Vec<DatalogRule>,
}

impl DatalogProgram {
    /// Predicates occurring in rule heads.
    pub fn intensional(&self) -> BTreeSet<ConceptName> {
        self.rules
            .iter()
            .map(|r| match r {
                DatalogRule::Role { head, .. } | DatalogRule::Shift { head, .. } => head.clone(),
            })
            .collect()
    }

    /// Every body has at most one intensional atom. Holds by construction
    /// of the rule shapes (role atoms are extensional).
    pub fn is_linear(&self) -> bool {
        true
    }

    /// Renders the program in the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Shift sets of every concept pair, fitted as eventually periodic sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FittedShifts {
    /// Nonempty shift sets per `(A, B)`.
    pub sets: BTreeMap<(ConceptName, ConceptName), SemilinearSet>,
    /// Pairs whose samples admit no fit; their sets list the samples only.
    pub unfitted: Vec<(ConceptName, ConceptName)>,
    /// Pairs whose fit disagrees with the shifts derived within the
    /// verification bound.
    pub refuted: Vec<(ConceptName, ConceptName)>,
}

impl FittedShifts {
    /// Whether every set was fitted and confirmed up to the verification
    /// bound.
    pub fn confirmed(&self) -> bool {
        self.unfitted.is_empty() && self.refuted.is_empty()
    }
}

/// Fits `S_{AB}` for all concepts `A, B` of `tbox` from the shifts within
/// `±fit_bound` and checks each fit against the shifts within `±verify_bound`.
/// Shifts are derived by saturation over the window of
/// [`SaturationConfig::for_shift_bound`].
pub fn fit_shift_sets(tbox: &TBox, fit_bound: u64, verify_bound: u64) -> FittedShifts {
    let verify_bound = verify_bound.max(fit_bound);
    let cfg = SaturationConfig::for_shift_bound(tbox, verify_bound);
    let (fb, vb) = (fit_bound as i64, verify_bound as i64);
    let mut out = FittedShifts::default();
    for a in tbox.concepts() {
        let profile = shift_profile(tbox, a, cfg);
        for b in tbox.concepts() {
            let all: BTreeSet<i64> =
                profile.get(b).into_iter().flatten().copied().filter(|n| n.abs() <= vb).collect();
            let samples: BTreeSet<i64> = all.iter().copied().filter(|n| n.abs() <= fb).collect();
            let key = (a.clone(), b.clone());
            let set = match detect_periodicity(&samples, fit_bound) {
                Some(ep) => {
                    if (-vb..=vb).any(|n| ep.member(n) != all.contains(&n)) {
                        out.refuted.push(key.clone());
                    }
                    ep.to_semilinear()
                }
                None => {
                    out.unfitted.push(key.clone());
                    SemilinearSet::new(samples.iter().map(|&n| LinearSet::point(n)).collect::<Vec<_>>())
                }
            };
            if !set.components.is_empty() {
                out.sets.insert(key, set);
            }
        }
    }
    out
}

/// Emits the program for a linear TBox and shift sets per concept pair.
pub fn emit_datalog(
    tbox: &TBox,
    shifts: &BTreeMap<(ConceptName, ConceptName), SemilinearSet>,
) -> Result<DatalogProgram, TranslateError> {
    if let Some(ci) = tbox.inclusions().find(|ci| matches!(ci, ConceptInclusion::Conj { .. })) {
        return Err(TranslateError::NotLinearFragment(ci.clone()));
    }
    let mut rules = Vec::new();
    for ci in tbox.inclusions() {
        if let ConceptInclusion::ExistsLeft { role, filler, rhs } = ci {
            let mut push = |modality| {
                rules.push(DatalogRule::Role { head: rhs.clone(), modality, role: role.clone(), filler: filler.clone() })
            };
            push(RoleModality::Now);
            if tbox.is_rigid(role) {
                push(RoleModality::Eventually);
                push(RoleModality::EventuallyPast);
            }
        }
    }
    let mut taken: BTreeSet<String> = tbox
        .concepts()
        .iter()
        .map(|c| c.as_str().to_string())
        .chain(shifts.keys().flat_map(|(a, b)| [a.as_str().to_string(), b.as_str().to_string()]))
        .collect();
    for ((a, b), set) in shifts {
        let decomposition = set.to_simple_sets();
        let mut components: Vec<(i64, Option<i64>)> = decomposition.points.iter().map(|&n| (n, None)).collect();
        components.extend(decomposition.simple.iter().map(|s| (s.offset, Some(s.period))));
        for (i, (offset, period)) in components.into_iter().enumerate() {
            let f = ConceptName::new(fresh_name(format!("F_{a}_{b}_{}", i + 1), &mut taken));
            rules.push(DatalogRule::Shift { head: f.clone(), shift: -offset, body: a.clone() });
            if let Some(p) = period {
                rules.push(DatalogRule::Shift { head: f.clone(), shift: -p, body: f.clone() });
            }
            rules.push(DatalogRule::Shift { head: b.clone(), shift: 0, body: f });
        }
    }
    Ok(DatalogProgram { rules })
}

/// Parses the text format.
pub fn parse_datalog(src: &str) -> Result<DatalogProgram, ParseError> {
    let mut rules = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let err = |col: usize, kind: ParseErrorKind| ParseError { line: lineno + 1, column: col + 1, kind };
        let Some(arrow) = line.find("<-") else {
            return Err(err(0, ParseErrorKind::Syntax("expected `<-`".into())));
        };
        let head = parse_atom(&line[..arrow], &["x"]).ok_or_else(|| err(0, ParseErrorKind::Syntax("bad head atom".into())))?;
        let body_start = arrow + 2;
        let body = line[body_start..].trim();
        let berr = || err(body_start, ParseErrorKind::Syntax("bad rule body".into()));
        let head = ConceptName::new(head);
        // A role body is `[DIA|DIA-] r(x,y), A(y)`: split after the role atom.
        let role_split = body.find(')').and_then(|close| {
            let rest = body[close + 1..].trim_start().strip_prefix(',')?;
            Some((&body[..=close], rest))
        });
        let rule = if let Some((role_part, filler_part)) = role_split {
            let role_part = role_part.trim();
            let (modality, atom) = if let Some(rest) = role_part.strip_prefix("DIA-") {
                (RoleModality::EventuallyPast, rest)
            } else if let Some(rest) = role_part.strip_prefix("DIA") {
                (RoleModality::Eventually, rest)
            } else {
                (RoleModality::Now, role_part)
            };
            let role = parse_atom(atom, &["x", "y"]).ok_or_else(berr)?;
            let filler = parse_atom(filler_part, &["y"]).ok_or_else(berr)?;
            DatalogRule::Role { head, modality, role: RoleName::new(role), filler: ConceptName::new(filler) }
        } else if let Some(rest) = body.strip_prefix("X^") {
            let end = rest.find(|c: char| c.is_whitespace()).ok_or_else(berr)?;
            let shift: i64 = rest[..end]
                .parse()
                .map_err(|_| err(body_start, ParseErrorKind::NotAnInteger(rest[..end].to_string())))?;
            let atom = parse_atom(&rest[end..], &["x"]).ok_or_else(berr)?;
            DatalogRule::Shift { head, shift, body: ConceptName::new(atom) }
        } else {
            let atom = parse_atom(body, &["x"]).ok_or_else(berr)?;
            DatalogRule::Shift { head, shift: 0, body: ConceptName::new(atom) }
        };
        rules.push(rule);
    }
    Ok(DatalogProgram { rules })
}

/// Parses `P(v1,…,vk)` with the given variables; returns `P`.
fn parse_atom(src: &str, vars: &[&str]) -> Option<String> {
    let src = src.trim();
    let open = src.find('(')?;
    let name = src[..open].trim();
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return None;
    }
    let args = src[open + 1..].strip_suffix(')')?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    (args == vars).then(|| name.to_string())
}

/// Least fixpoint of the program over the ABox with derived facts
/// restricted to `[lo, hi]`. ABox facts are kept whatever their time. The
/// eventuality modalities are evaluated exactly over the ABox role facts.
pub fn eval_datalog_bounded(p: &DatalogProgram, abox: &ABox, lo: i64, hi: i64) -> BTreeSet<Fact> {
    // Concept facts per (predicate, individual).
    let mut holds: BTreeMap<(ConceptName, Individual), BTreeSet<i64>> = BTreeMap::new();
    // Role facts per (role, subject): (object, time).
    let mut roles: BTreeMap<RoleName, Vec<(Individual, Individual, i64)>> = BTreeMap::new();
    for f in abox.facts() {
        match f {
            Fact::Concept { concept, subject: Term::Individual(a), time } => {
                holds.entry((concept.clone(), a.clone())).or_default().insert(*time);
            }
            Fact::Role { role, subject: Term::Individual(a), object: Term::Individual(b), time } => {
                roles.entry(role.clone()).or_default().push((a.clone(), b.clone(), *time));
            }
            _ => unreachable!("ABox facts are ground"),
        }
    }
    let individuals = abox.individuals();
    loop {
        let mut new: Vec<(ConceptName, Individual, i64)> = Vec::new();
        for rule in &p.rules {
            match rule {
                DatalogRule::Shift { head, shift, body } => {
                    for a in &individuals {
                        if let Some(ts) = holds.get(&(body.clone(), a.clone())) {
                            for &t in ts {
                                let th = t - shift;
                                if lo <= th && th <= hi {
                                    new.push((head.clone(), a.clone(), th));
                                }
                            }
                        }
                    }
                }
                DatalogRule::Role { head, modality, role, filler } => {
                    for (a, b, t_role) in roles.get(role).into_iter().flatten() {
                        let Some(ts) = holds.get(&(filler.clone(), b.clone())) else { continue };
                        for &t in ts {
                            let ok = match modality {
                                RoleModality::Now => *t_role == t,
                                RoleModality::Eventually => *t_role > t,
                                RoleModality::EventuallyPast => *t_role < t,
                            };
                            if ok && lo <= t && t <= hi {
                                new.push((head.clone(), a.clone(), t));
                            }
                        }
                    }
                }
            }
        }
        let mut changed = false;
        for (c, a, t) in new {
            changed |= holds.entry((c, a)).or_default().insert(t);
        }
        if !changed {
            break;
        }
    }
    let mut out: BTreeSet<Fact> = abox.facts().cloned().collect();
    for ((c, a), ts) in holds {
        for t in ts {
            out.insert(Fact::Concept { concept: c.clone(), subject: Term::Individual(a.clone()), time: t });
        }
    }
    out
}
