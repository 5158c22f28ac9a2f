//! Semilinear sets of integers and eventual periodicity.
//!
//! A linear set `{b + k₁p₁ + … + kₗpₗ : kᵢ ∈ ℕ}` is decomposed into a finite
//! set and *simple* sets `{b + kp : k ∈ ℕ}`:
//!
//! * with periods of both signs the set is `b + gℤ` for `g` the gcd of the
//!   periods (a positive and a negative period combine to `±g`);
//! * with periods of one sign, dividing by `g` leaves a numerical
//!   semigroup, which is decided exactly through its Apéry set (the least
//!   element of every residue class modulo the smallest generator) and
//!   contains every number from its conductor on.
//!
//! [`EventuallyPeriodic`] is the normalised form: a finite core and a
//! periodic tail towards `+∞` and towards `−∞`.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::util::{gcd, lcm};

/// `{offset + k₁p₁ + … + kₗpₗ : kᵢ ∈ ℕ}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearSet {
    /// The offset `b`.
    pub offset: i64,
    /// The periods `pᵢ`; zero periods are allowed and contribute nothing.
    pub periods: Vec<i64>,
}

/// `{offset + k·period : k ∈ ℕ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleSet {
    /// The offset.
    pub offset: i64,
    /// The period (never zero).
    pub period: i64,
}

impl SimpleSet {
    /// Whether `n` belongs to the set.
    pub fn member(&self, n: i64) -> bool {
        let d = n - self.offset;
        d % self.period == 0 && d / self.period >= 0
    }
}

/// A linear set split into finitely many points and simple sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleDecomposition {
    /// Isolated points.
    pub points: BTreeSet<i64>,
    /// Simple sets.
    pub simple: Vec<SimpleSet>,
}

/// The least element of every residue class modulo the smallest generator
/// in the numerical semigroup generated by `gens` (all positive, gcd 1).
fn apery(gens: &[i64]) -> Vec<i64> {
    let q = *gens.iter().min().expect("nonempty") as usize;
    let mut dist = vec![i64::MAX; q];
    dist[0] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0i64, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &g in gens {
            let nd = d + g;
            let nr = (r + g as usize) % q;
            if nd < dist[nr] {
                dist[nr] = nd;
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    dist
}

/// Membership in the numerical semigroup with the given Apéry table.
fn in_semigroup(table: &[i64], m: i64) -> bool {
    m >= 0 && m >= table[(m % table.len() as i64) as usize]
}

impl LinearSet {
    /// A linear set.
    pub fn new(offset: i64, periods: impl Into<Vec<i64>>) -> Self {
        LinearSet { offset, periods: periods.into() }
    }

    /// The singleton `{offset}`.
    pub fn point(offset: i64) -> Self {
        LinearSet { offset, periods: Vec::new() }
    }

    fn nonzero(&self) -> impl Iterator<Item = i64> + '_ {
        self.periods.iter().copied().filter(|&p| p != 0)
    }

    /// `‖b‖ + Σ‖pᵢ‖` of this representation.
    pub fn size(&self) -> u64 {
        self.offset.unsigned_abs() + self.periods.iter().map(|p| p.unsigned_abs()).sum::<u64>()
    }

    /// Whether `n` belongs to the set (exact).
    pub fn member(&self, n: i64) -> bool {
        let d = n - self.offset;
        let g = self.nonzero().fold(0, gcd);
        if g == 0 {
            return d == 0;
        }
        if d % g != 0 {
            return false;
        }
        let pos = self.nonzero().any(|p| p > 0);
        let neg = self.nonzero().any(|p| p < 0);
        if pos && neg {
            return true;
        }
        let m = if pos { d / g } else { -d / g };
        let gens: Vec<i64> = self.nonzero().map(|p| p.abs() / g).collect();
        in_semigroup(&apery(&gens), m)
    }

    /// Splits the set into points and simple sets with the same union.
    pub fn to_simple_sets(&self) -> SimpleDecomposition {
        let mut out = SimpleDecomposition::default();
        let b = self.offset;
        let g = self.nonzero().fold(0, gcd);
        if g == 0 {
            out.points.insert(b);
            return out;
        }
        let pos = self.nonzero().any(|p| p > 0);
        let neg = self.nonzero().any(|p| p < 0);
        if pos && neg {
            out.simple.push(SimpleSet { offset: b, period: g });
            out.simple.push(SimpleSet { offset: b - g, period: -g });
            return out;
        }
        let sign = if pos { 1 } else { -1 };
        let gens: Vec<i64> = self.nonzero().map(|p| p.abs() / g).collect();
        let table = apery(&gens);
        let q = table.len() as i64;
        // Every m ≥ conductor is in the semigroup; the conductor is the
        // Frobenius number plus one.
        let conductor = table.iter().map(|&t| t - q + 1).max().unwrap_or(0).max(0);
        for m in 0..conductor {
            if in_semigroup(&table, m) {
                out.points.insert(b + sign * g * m);
            }
        }
        out.simple.push(SimpleSet { offset: b + sign * g * conductor, period: sign * g });
        out
    }
}

impl fmt::Display for LinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}", self.offset)?;
        for (i, p) in self.periods.iter().enumerate() {
            write!(f, " {} {}k{}", if *p < 0 { '-' } else { '+' }, p.unsigned_abs(), i + 1)?;
        }
        f.write_str("}")
    }
}

/// A finite union of linear sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemilinearSet {
    /// The linear components.
    pub components: Vec<LinearSet>,
}

impl SemilinearSet {
    /// The union of the given linear sets.
    pub fn new(components: impl Into<Vec<LinearSet>>) -> Self {
        SemilinearSet { components: components.into() }
    }

    /// The empty set.
    pub fn empty() -> Self {
        SemilinearSet::default()
    }

    /// Whether `n` belongs to the set (exact).
    pub fn member(&self, n: i64) -> bool {
        self.components.iter().any(|c| c.member(n))
    }

    /// `Σ ‖Lᵢ‖` of this representation.
    pub fn size(&self) -> u64 {
        self.components.iter().map(LinearSet::size).sum()
    }

    /// Splits every component into points and simple sets.
    pub fn to_simple_sets(&self) -> SimpleDecomposition {
        let mut out = SimpleDecomposition::default();
        for c in &self.components {
            let d = c.to_simple_sets();
            out.points.extend(d.points);
            for s in d.simple {
                if !out.simple.contains(&s) {
                    out.simple.push(s);
                }
            }
        }
        out
    }

    /// The exact eventually periodic form.
    pub fn to_eventually_periodic(&self) -> EventuallyPeriodic {
        let d = self.to_simple_sets();
        let member = |n: i64| d.points.contains(&n) || d.simple.iter().any(|s| s.member(n));
        let (mut p_f, mut m_f, mut p_p, mut m_p) = (1i64, 0i64, 1i64, 1i64);
        for &n in &d.points {
            m_f = m_f.max(n + 1);
            m_p = m_p.max(-n + 1);
        }
        for s in &d.simple {
            if s.period > 0 {
                p_f = lcm(p_f, s.period);
                m_f = m_f.max(s.offset);
                m_p = m_p.max(-s.offset + 1);
            } else {
                p_p = lcm(p_p, -s.period);
                m_p = m_p.max(-s.offset);
                m_f = m_f.max(s.offset + 1);
            }
        }
        EventuallyPeriodic::normalize(member, (m_f, p_f), (m_p, p_p))
    }
}

impl fmt::Display for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A periodic tail: from the threshold on, membership depends only on the
/// residue modulo the period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPart {
    /// The threshold `m`: the tail is `n ≥ m` (future) or `n ≤ −m` (past).
    pub threshold: i64,
    /// The period `p ≥ 1`.
    pub period: i64,
    /// Residues modulo `period` (in `0..period`) of the members in the tail.
    pub residues: BTreeSet<i64>,
}

/// A set of integers in eventually periodic form.
///
/// Normalised: periods are minimal, thresholds are the least ones with
/// `m_F ≥ 0` and `m_P ≥ 1` after which the set is periodic, moved forward
/// to the first member of the tail. A tail without members is absent; the
/// core then holds every member on that side. The core lists the members
/// strictly between the tails together with the two thresholds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    /// Members outside the periodic tails (plus the thresholds themselves).
    pub core: BTreeSet<i64>,
    /// Tail towards `+∞`.
    pub future: Option<PeriodicPart>,
    /// Tail towards `−∞`.
    pub past: Option<PeriodicPart>,
}

/// Normalises one side of a set. `f` is membership on that side, mirrored
/// so the tail goes to `+∞`; `(m, p)` is a valid threshold and period.
/// Returns the tail (if it has members) and the bound beyond which the
/// core need not look.
fn normalize_side(f: &dyn Fn(i64) -> bool, m: i64, p: i64, floor: i64) -> (Option<PeriodicPart>, i64) {
    let mut m = m.max(floor);
    let p = p.max(1);
    let d = (1..=p)
        .filter(|d| p % d == 0)
        .find(|&d| (m..m + p).all(|n| f(n) == f(n + d)))
        .unwrap_or(p);
    while m > floor && f(m - 1) == f(m - 1 + d) {
        m -= 1;
    }
    match (m..m + d).find(|&n| f(n)) {
        Some(first) => {
            let residues = (first..first + d).filter(|&n| f(n)).map(|n| n.rem_euclid(d)).collect();
            (Some(PeriodicPart { threshold: first, period: d, residues }), first)
        }
        None => (None, m),
    }
}

impl EventuallyPeriodic {
    /// Builds the normal form of the set decided by `member`, given a
    /// future threshold and period `(m_F, p_F)` and a past one `(m_P, p_P)`
    /// that are valid (not necessarily minimal).
    pub fn normalize(member: impl Fn(i64) -> bool, future: (i64, i64), past: (i64, i64)) -> Self {
        let fut = |n: i64| member(n);
        let pst = |n: i64| member(-n);
        let (future, hi) = normalize_side(&fut, future.0, future.1, 0);
        let (mut past, lo) = normalize_side(&pst, past.0, past.1, 1);
        // Residues were computed on the mirrored side; store those of the
        // actual (negative) members.
        if let Some(p) = past.as_mut() {
            p.residues = p.residues.iter().map(|r| (-r).rem_euclid(p.period)).collect();
        }
        let core = (-lo..=hi).filter(|&n| member(n)).collect();
        EventuallyPeriodic { core, future, past }
    }

    /// A finite set.
    pub fn finite(core: impl IntoIterator<Item = i64>) -> Self {
        EventuallyPeriodic { core: core.into_iter().collect(), future: None, past: None }
    }

    /// Whether `n` belongs to the set.
    pub fn member(&self, n: i64) -> bool {
        if let Some(f) = &self.future {
            if n >= f.threshold {
                return f.residues.contains(&n.rem_euclid(f.period));
            }
        }
        if let Some(p) = &self.past {
            if n <= -p.threshold {
                return p.residues.contains(&n.rem_euclid(p.period));
            }
        }
        self.core.contains(&n)
    }

    /// An equivalent semilinear set: one point per core element and one
    /// simple set per residue of each tail.
    pub fn to_semilinear(&self) -> SemilinearSet {
        let mut comps: Vec<LinearSet> = Vec::new();
        let in_future = |n: i64| self.future.as_ref().is_some_and(|f| n >= f.threshold);
        let in_past = |n: i64| self.past.as_ref().is_some_and(|p| n <= -p.threshold);
        for &n in &self.core {
            if !in_future(n) && !in_past(n) {
                comps.push(LinearSet::point(n));
            }
        }
        if let Some(f) = &self.future {
            for n in f.threshold..f.threshold + f.period {
                if f.residues.contains(&n.rem_euclid(f.period)) {
                    comps.push(LinearSet::new(n, vec![f.period]));
                }
            }
        }
        if let Some(p) = &self.past {
            for k in 0..p.period {
                let n = -p.threshold - k;
                if p.residues.contains(&n.rem_euclid(p.period)) {
                    comps.push(LinearSet::new(n, vec![-p.period]));
                }
            }
        }
        SemilinearSet::new(comps)
    }
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "core {:?}", self.core)?;
        if let Some(p) = &self.future {
            write!(f, "; future m={} p={} residues {:?}", p.threshold, p.period, p.residues)?;
        }
        if let Some(p) = &self.past {
            write!(f, "; past m={} p={} residues {:?}", p.threshold, p.period, p.residues)?;
        }
        Ok(())
    }
}

/// Smallest `(p, m)` (period first) with `m ≥ floor`, `m + 2p ≤ bound`,
/// `m ≤ bound / 2`, such that `f(n) = f(n + p)` for all `n ∈ [m, bound − p]`.
fn fit_side(f: &dyn Fn(i64) -> bool, bound: i64, floor: i64) -> Option<(i64, i64)> {
    for p in 1..=bound / 2 {
        let hi = (bound / 2).min(bound - 2 * p);
        // The window condition is monotone in m: find the least m for
        // which no mismatch lies at or above it.
        let last_mismatch = (floor..=bound - p).rev().find(|&n| f(n) != f(n + p));
        let m = match last_mismatch {
            Some(n) => n + 1,
            None => floor,
        };
        if m <= hi {
            return Some((p, m));
        }
    }
    None
}

/// Fits an eventually periodic set to samples that are complete within
/// `[−bound, bound]`: for each direction the smallest period `p` and then
/// the smallest threshold `m` with `m + 2p ≤ bound` and `m ≤ bound / 2` that
/// are consistent with the samples. Returns `None` when no such pair exists
/// on either side. The result is certified only against the window.
pub fn detect_periodicity(samples: &BTreeSet<i64>, bound: u64) -> Option<EventuallyPeriodic> {
    let b = bound as i64;
    let fut = |n: i64| n <= b && samples.contains(&n);
    let pst = |n: i64| n <= b && samples.contains(&-n);
    let (pf, mf) = fit_side(&fut, b, 0)?;
    let (pp, mp) = fit_side(&pst, b, 1)?;
    let member = |n: i64| n.abs() <= b && samples.contains(&n);
    let mut ep = EventuallyPeriodic::normalize(member, (mf, pf), (mp, pp));
    ep.core.retain(|n| n.abs() <= b);
    Some(ep)
}
