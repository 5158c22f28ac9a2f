//! JSON encodings of library values. Object keys are sorted, so equal
//! values always serialise to identical bytes.

use serde_json::{json, Value};
use telx_core::datalog::{DatalogProgram, DatalogRule, RoleModality};
use telx_core::derive::{DerivationTrace, Formula};
use telx_core::grammar::{symbol_name, Grammar, GrammarTrace};
use telx_core::semilinear::{EventuallyPeriodic, PeriodicPart, SemilinearSet};
use telx_core::text::GrammarDocument;
use telx_core::{Fact, Fragment};

/// `{"concept": …, "subject": …, "time": …}` or the role variant.
pub fn fact(f: &Fact) -> Value {
    match f {
        Fact::Concept { concept, subject, time } => {
            json!({ "concept": concept.as_str(), "subject": subject.to_string(), "time": time })
        }
        Fact::Role { role, subject, object, time } => json!({
            "role": role.as_str(),
            "subject": subject.to_string(),
            "object": object.to_string(),
            "time": time,
        }),
    }
}

fn formula(f: &Formula) -> Value {
    match f {
        Formula::Fact(x) => json!({ "fact": fact(x) }),
        Formula::Inclusion(ci) => json!({ "inclusion": ci.to_string() }),
    }
}

/// A derivation: initial formulas and rule applications.
pub fn trace(t: &DerivationTrace) -> Value {
    json!({
        "initial": t.initial.iter().map(formula).collect::<Vec<_>>(),
        "steps": t.steps.iter().map(|s| json!({
            "rule_id": s.rule.to_string(),
            "premises": s.premises.iter().map(formula).collect::<Vec<_>>(),
            "conclusions": s.conclusions.iter().map(fact).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// A grammar with its rules written symbol by symbol and its concept-pair
/// annotations.
pub fn grammar(doc: &GrammarDocument) -> Value {
    let g = &doc.grammar;
    json!({
        "terminals": g.terminals().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "start": g.start().map(|s| g.name(s)),
        "nonterminals": (0..g.nonterminal_count()).map(|i| g.name(i)).collect::<Vec<_>>(),
        "rules": g.rules().iter().map(|r| json!({
            "lhs": g.name(r.lhs),
            "conjuncts": r.conjuncts.iter()
                .map(|c| c.iter().map(|s| symbol_name(g, *s)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "keys": doc.keys.iter().map(|(nt, (a, b))| json!({
            "nonterminal": g.name(*nt),
            "lhs": a.as_str(),
            "rhs": b.as_str(),
        })).collect::<Vec<_>>(),
    })
}

/// A grammar derivation.
pub fn grammar_trace(g: &Grammar, t: &GrammarTrace) -> Value {
    json!({
        "steps": t.steps.iter().map(|s| json!({
            "nonterminal": g.name(s.nonterminal),
            "word": s.word,
            "rule": s.rule,
            "conjuncts": s.parts.iter().map(|parts| parts.iter().map(|(sym, w)| json!({
                "symbol": symbol_name(g, *sym),
                "factor": w,
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// A Datalog program, rule by rule, plus its text form.
pub fn program(p: &DatalogProgram) -> Value {
    json!({
        "rules": p.rules.iter().map(|r| match r {
            DatalogRule::Role { head, modality, role, filler } => json!({
                "kind": "role",
                "head": head.as_str(),
                "modality": match modality {
                    RoleModality::Now => "now",
                    RoleModality::Eventually => "eventually",
                    RoleModality::EventuallyPast => "eventually_past",
                },
                "role": role.as_str(),
                "filler": filler.as_str(),
            }),
            DatalogRule::Shift { head, shift, body } => json!({
                "kind": "shift",
                "head": head.as_str(),
                "shift": shift,
                "body": body.as_str(),
            }),
        }).collect::<Vec<_>>(),
        "text": p.to_text(),
    })
}

fn periodic_part(p: &Option<PeriodicPart>) -> Value {
    match p {
        None => Value::Null,
        Some(p) => json!({ "threshold": p.threshold, "period": p.period, "residues": p.residues }),
    }
}

/// An eventually periodic set.
pub fn eventually_periodic(ep: &EventuallyPeriodic) -> Value {
    json!({ "core": ep.core, "future": periodic_part(&ep.future), "past": periodic_part(&ep.past) })
}

/// A semilinear set as a list of `{offset, periods}`.
pub fn semilinear(s: &SemilinearSet) -> Value {
    Value::Array(s.components.iter().map(|l| json!({ "offset": l.offset, "periods": l.periods })).collect())
}

/// Fragment membership.
pub fn fragment(f: &Fragment) -> Value {
    json!({ "is_future": f.is_future, "is_linear": f.is_linear, "rigid_only": f.rigid_only })
}
