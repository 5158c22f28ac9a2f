//! One handler per command.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use telx_core::datalog::{emit_datalog, eval_datalog_bounded, fit_shift_sets, parse_datalog, DatalogProgram};
use telx_core::derive::{entails_ci, entails_fact, saturate, shift_set, DerivationTrace, Entailment, SaturationConfig};
use telx_core::grammar::{GrammarTrace, Membership, NtId};
use telx_core::semilinear::detect_periodicity;
use telx_core::taqa::TaqaQuery;
use telx_core::text::{
    format_word, parse_abox, parse_concept_query, parse_fact, parse_grammar, parse_tbox, parse_word,
    serialize_grammar, serialize_tbox, GrammarDocument,
};
use telx_core::translate::{
    default_linear_oracle, exists_shift, grammar_to_tbox, linear_tbox_to_cfg, tbox_to_conjunctive_grammar,
    ShiftBudget, ShiftWitness,
};
use telx_core::{ABox, ConceptInclusion, ConceptName, Fact, KnowledgeBase, TBox};

use crate::args::{Command, Route, WindowArgs};
use crate::{json as enc, CliError, CommandResult};

type Outcome = Result<CommandResult, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_tbox(path: &Path) -> Result<TBox, CliError> {
    parse_tbox(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn load_abox(path: &Path) -> Result<ABox, CliError> {
    parse_abox(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn load_grammar(path: &Path) -> Result<GrammarDocument, CliError> {
    parse_grammar(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn load_program(path: &Path) -> Result<DatalogProgram, CliError> {
    parse_datalog(&read(path)?).map_err(|e| CliError::parse(path, e))
}

/// The named nonterminal, or the start symbol.
fn nonterminal(doc: &GrammarDocument, name: Option<&str>) -> Result<NtId, CliError> {
    match name {
        Some(n) => doc.grammar.nt(n).ok_or_else(|| CliError::Usage(format!("unknown nonterminal `{n}`"))),
        None => doc.grammar.start().ok_or_else(|| CliError::Usage("no --nt given and the grammar has no start symbol".into())),
    }
}

/// Applies the overrides of `w` to `base`.
fn window(base: SaturationConfig, w: &WindowArgs) -> Result<SaturationConfig, CliError> {
    let lo = w.lo.unwrap_or(base.time_lo);
    let hi = w.hi.unwrap_or(base.time_hi);
    if lo > hi {
        return Err(CliError::Usage(format!("empty window [{lo}, {hi}]")));
    }
    let mut cfg = SaturationConfig { time_lo: lo, time_hi: hi, ..base };
    if let Some(d) = w.depth {
        cfg = cfg.with_max_chain_depth(d);
    }
    if let Some(s) = w.steps {
        cfg = cfg.with_max_steps(s);
    }
    Ok(cfg)
}

fn window_json(cfg: &SaturationConfig) -> Value {
    json!({
        "lo": cfg.time_lo,
        "hi": cfg.time_hi,
        "max_chain_depth": (cfg.max_chain_depth != u32::MAX).then_some(cfg.max_chain_depth),
        "max_steps": (cfg.max_steps != u64::MAX).then_some(cfg.max_steps),
    })
}

fn unknown_at_bound(cfg: &SaturationConfig) -> String {
    format!("no derivation within the window [{}, {}] and limits; the answer is bound-limited", cfg.time_lo, cfg.time_hi)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

fn trace_text(t: &DerivationTrace) -> String {
    let mut out = String::new();
    for f in &t.initial {
        let _ = writeln!(out, "given   {f}");
    }
    for s in &t.steps {
        let premises: Vec<String> = s.premises.iter().map(|p| p.to_string()).collect();
        let conclusions: Vec<String> = s.conclusions.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{:<7} {}  =>  {}", s.rule.to_string(), premises.join(", "), conclusions.join(", "));
    }
    out
}

fn grammar_trace_text(doc: &GrammarDocument, t: &GrammarTrace) -> String {
    let g = &doc.grammar;
    let mut out = String::new();
    for s in &t.steps {
        let conjs: Vec<String> = s
            .parts
            .iter()
            .map(|parts| {
                let items: Vec<String> = parts
                    .iter()
                    .map(|(sym, w)| format!("{}({})", telx_core::grammar::symbol_name(g, *sym), format_word(w)))
                    .collect();
                if items.is_empty() {
                    "_".to_string()
                } else {
                    items.join(" ")
                }
            })
            .collect();
        let _ = writeln!(out, "  {}({}) <- {}", g.name(s.nonterminal), format_word(&s.word), conjs.join(" & "));
    }
    out
}

pub(crate) fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Classify { tbox } => classify(&load_tbox(tbox)?),
        Command::Validate { tbox } => validate(&load_tbox(tbox)?),
        Command::Saturate { tbox, abox, window: w, individuals_only } => {
            saturate_cmd(KnowledgeBase::new(load_tbox(tbox)?, load_abox(abox)?), w, *individuals_only)
        }
        Command::Entails { tbox, abox, fact, ci, window: w } => {
            let t = load_tbox(tbox)?;
            match (fact, ci) {
                (Some(f), _) => {
                    let abox = abox.as_deref().ok_or_else(|| CliError::Usage("--fact needs an ABox file".into()))?;
                    let goal = parse_fact(f).map_err(|e| CliError::parse_arg("fact", e))?;
                    entails_fact_cmd(KnowledgeBase::new(t, load_abox(abox)?), &goal, w, false)
                }
                (None, Some(ci)) => entails_ci_cmd(&t, ci, w),
                (None, None) => Err(CliError::Usage("give --fact or --ci".into())),
            }
        }
        Command::ShiftSet { tbox, lhs, rhs, bound, window: w } => shift_set_cmd(&load_tbox(tbox)?, lhs, rhs, *bound, w),
        Command::ToGrammar { tbox, allow_past } => to_grammar(&load_tbox(tbox)?, *allow_past),
        Command::ToTbox { grammar } => to_tbox(&load_grammar(grammar)?),
        Command::ToCfg { tbox, oracle_bound } => to_cfg(&load_tbox(tbox)?, *oracle_bound),
        Command::Member { grammar, nt, word, no_trace } => member(&load_grammar(grammar)?, nt.as_deref(), word, *no_trace),
        Command::Taqa { tbox, abox, query, route, verbose, window: w } => {
            let (concept, individual, time) = parse_concept_query(query).map_err(|e| CliError::parse_arg("query", e))?;
            let q = TaqaQuery { concept, individual, time };
            taqa(KnowledgeBase::new(load_tbox(tbox)?, load_abox(abox)?), &q, *route, *verbose, w)
        }
        Command::DetectPeriod { samples, grammar, nt, bound } => {
            let samples: BTreeSet<i64> = match (samples, grammar) {
                (Some(s), _) => parse_samples(s)?,
                (None, Some(g)) => {
                    let doc = load_grammar(g)?;
                    let id = nonterminal(&doc, nt.as_deref())?;
                    doc.grammar.language_lengths(id, *bound as usize)?.into_iter().map(|n| n as i64).collect()
                }
                (None, None) => return Err(CliError::Usage("give --samples or --grammar".into())),
            };
            detect_period(&samples, *bound)
        }
        Command::EmitDatalog { tbox, fit_bound, verify_bound } => emit(&load_tbox(tbox)?, *fit_bound, *verify_bound),
        Command::EvalDatalog { program, abox, lo, hi } => {
            if lo > hi {
                return Err(CliError::Usage(format!("empty window [{lo}, {hi}]")));
            }
            eval(&load_program(program)?, &load_abox(abox)?, *lo, *hi)
        }
        Command::Trace { tbox, abox, fact, window: w } => {
            let goal = parse_fact(fact).map_err(|e| CliError::parse_arg("fact", e))?;
            entails_fact_cmd(KnowledgeBase::new(load_tbox(tbox)?, load_abox(abox)?), &goal, w, true)
        }
        Command::ExistsShift { grammar, nt, shift, budget } => {
            let doc = load_grammar(grammar)?;
            let id = nonterminal(&doc, nt.as_deref())?;
            exists_shift_cmd(&doc, id, *shift, ShiftBudget::new(*budget))
        }
    }
}

fn classify(t: &TBox) -> Outcome {
    let f = t.classify();
    let text = format!(
        "future: {}\nlinear: {}\nrigid-only: {}\nsize: {}\nconcepts: {}\nroles: {}\ninclusions: {}",
        yes_no(f.is_future).to_lowercase(),
        yes_no(f.is_linear).to_lowercase(),
        yes_no(f.rigid_only).to_lowercase(),
        t.size(),
        t.concepts().len(),
        t.roles().len(),
        t.len(),
    );
    let mut payload = enc::fragment(&f);
    payload["size"] = json!(t.size());
    payload["concepts"] = json!(t.concepts().iter().map(|c| c.as_str()).collect::<Vec<_>>());
    payload["roles"] = json!(t
        .roles()
        .iter()
        .map(|(r, rig)| json!({ "role": r.as_str(), "rigid": *rig == telx_core::Rigidity::Rigid }))
        .collect::<Vec<_>>());
    payload["inclusions"] = json!(t.len());
    Ok(CommandResult::ok(payload, text))
}

fn validate(t: &TBox) -> Outcome {
    let violations = t.validate();
    if violations.is_empty() {
        Ok(CommandResult::ok(json!({ "valid": true, "violations": [] }), "valid"))
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(CliError::Invalid(msgs.join("; ")))
    }
}

fn saturate_cmd(kb: KnowledgeBase, w: &WindowArgs, individuals_only: bool) -> Outcome {
    let cfg = window(SaturationConfig::default_for(&kb, 0), w)?;
    let sat = saturate(&kb, cfg);
    let facts: BTreeSet<Fact> = if individuals_only { sat.individual_concept_facts() } else { sat.facts() };
    let text: String = facts.iter().map(|f| format!("{f}\n")).collect();
    let mut res = CommandResult::ok(
        json!({
            "window": window_json(&cfg),
            "exhausted": sat.exhausted(),
            "steps": sat.steps(),
            "nulls": sat.null_count(),
            "facts": facts.iter().map(enc::fact).collect::<Vec<_>>(),
        }),
        text,
    );
    let mut warned = BTreeSet::new();
    for warning in sat.warnings() {
        if warned.insert(warning.to_string()) {
            res = res.with_diagnostic(warning.to_string());
        }
    }
    Ok(res)
}

fn entails_fact_cmd(kb: KnowledgeBase, goal: &Fact, w: &WindowArgs, trace_only: bool) -> Outcome {
    let last = kb.abox.time_range().map_or(0, |(_, m)| m);
    let cfg = window(SaturationConfig::default_for(&kb, goal.time() - last), w)?;
    Ok(entailment_result(entails_fact(&kb, goal, cfg), &cfg, goal.to_string(), trace_only))
}

fn entails_ci_cmd(t: &TBox, src: &str, w: &WindowArgs) -> Outcome {
    let mut decl = String::new();
    for (r, rig) in t.roles() {
        if *rig == telx_core::Rigidity::Rigid {
            let _ = writeln!(decl, "rigid {r}");
        }
    }
    decl.push_str(src);
    let parsed = parse_tbox(&decl).map_err(|e| CliError::parse_arg("ci", e))?;
    let mut incls = parsed.inclusions();
    let (Some(ConceptInclusion::Shift { lhs, delta, rhs }), None) = (incls.next(), incls.next()) else {
        return Err(CliError::Usage("--ci must be one inclusion of the form `A [= X^n B`".into()));
    };
    let cfg = window(SaturationConfig::for_shift_bound(t, delta.unsigned_abs()), w)?;
    let label = format!("{lhs} [= X^{delta} {rhs}");
    Ok(entailment_result(entails_ci(t, lhs, *delta, rhs, cfg), &cfg, label, false))
}

fn entailment_result(e: Entailment, cfg: &SaturationConfig, goal: String, trace_only: bool) -> CommandResult {
    match e {
        Entailment::Yes(trace) => {
            let text = if trace_only { trace_text(&trace) } else { format!("Yes\n{}", trace_text(&trace)) };
            CommandResult::ok(
                json!({ "goal": goal, "answer": "Yes", "trace": enc::trace(&trace), "window": window_json(cfg) }),
                text,
            )
        }
        Entailment::UnknownAtBound => CommandResult::ok(
            json!({ "goal": goal, "answer": "UnknownAtBound", "trace": null, "window": window_json(cfg) }),
            "UnknownAtBound",
        )
        .with_diagnostic(unknown_at_bound(cfg)),
    }
}

fn shift_set_cmd(t: &TBox, lhs: &str, rhs: &str, bound: u64, w: &WindowArgs) -> Outcome {
    let future = t.classify().is_future;
    let base = if future { SaturationConfig::future(bound) } else { SaturationConfig::for_shift_bound(t, bound) };
    let cfg = window(base, w)?;
    let (a, b) = (ConceptName::new(lhs), ConceptName::new(rhs));
    let shifts = shift_set(t, &a, &b, bound, cfg);
    let list: Vec<String> = shifts.iter().map(|n| n.to_string()).collect();
    let mut res = CommandResult::ok(
        json!({ "lhs": lhs, "rhs": rhs, "bound": bound, "shifts": shifts, "window": window_json(&cfg) }),
        format!("{{{}}}", list.join(", ")),
    );
    let complete = future && cfg.time_lo <= 0 && cfg.time_hi >= bound as i64 && w.depth.is_none() && w.steps.is_none();
    if !complete {
        res = res.with_diagnostic(format!(
            "shifts derived within the window [{}, {}]; the set is a lower approximation",
            cfg.time_lo, cfg.time_hi
        ));
    }
    Ok(res)
}

fn to_grammar(t: &TBox, allow_past: bool) -> Outcome {
    let pg = tbox_to_conjunctive_grammar(t, !allow_past)?;
    let doc = pg.to_document();
    let text = serialize_grammar(&doc);
    Ok(CommandResult::ok(json!({ "grammar": enc::grammar(&doc), "text": text }), text))
}

fn to_tbox(doc: &GrammarDocument) -> Outcome {
    let res = grammar_to_tbox(&doc.grammar)?;
    let text = serialize_tbox(&res.tbox);
    let concept_of: serde_json::Map<String, Value> = res
        .concept_of
        .iter()
        .map(|(nt, c)| (doc.grammar.name(*nt).to_string(), json!(c.as_str())))
        .collect();
    Ok(CommandResult::ok(
        json!({ "source_concept": res.source_concept.as_str(), "concept_of": concept_of, "text": text }),
        text,
    ))
}

fn to_cfg(t: &TBox, oracle_bound: Option<u64>) -> Outcome {
    let oracle = oracle_bound.map_or_else(|| default_linear_oracle(t), |b| SaturationConfig::for_shift_bound(t, b));
    let (pg, exact) = linear_tbox_to_cfg(t, oracle)?;
    let doc = pg.to_document();
    let text = serialize_grammar(&doc);
    let mut res = CommandResult::ok(json!({ "grammar": enc::grammar(&doc), "exact": exact, "text": text }), text);
    if !exact {
        res = res.with_diagnostic(format!(
            "local roles were dropped using subsumptions certified within the window [{}, {}]; the grammar may miss shifts",
            oracle.time_lo, oracle.time_hi
        ));
    }
    Ok(res)
}

fn member(doc: &GrammarDocument, nt: Option<&str>, word: &str, no_trace: bool) -> Outcome {
    let id = nonterminal(doc, nt)?;
    let w = parse_word(word).map_err(|e| CliError::parse_arg("word", e))?;
    let name = doc.grammar.name(id);
    Ok(match doc.grammar.member(id, &w) {
        Membership::Yes(trace) => {
            let text = if no_trace { "Yes".to_string() } else { format!("Yes\n{}", grammar_trace_text(doc, &trace)) };
            let trace_json = if no_trace { Value::Null } else { enc::grammar_trace(&doc.grammar, &trace) };
            CommandResult::ok(json!({ "nonterminal": name, "word": w, "answer": "Yes", "trace": trace_json }), text)
        }
        Membership::No => {
            CommandResult::ok(json!({ "nonterminal": name, "word": w, "answer": "No", "trace": null }), "No")
        }
    })
}

fn taqa(kb: KnowledgeBase, q: &TaqaQuery, route: Route, verbose: bool, w: &WindowArgs) -> Outcome {
    let future = kb.tbox.classify().is_future;
    let use_grammar = match route {
        Route::Grammar => true,
        Route::Saturation => false,
        Route::Auto => future && !kb.abox.is_empty(),
    };
    let query = q.fact().to_string();
    if use_grammar {
        let v = telx_core::taqa::answer_taqa_grammar(&kb.tbox, &kb.abox, q)?;
        let mut text = yes_no(v.answer).to_string();
        if verbose {
            match (&v.nonterminal, v.length) {
                (Some(nt), Some(n)) => {
                    let _ = write!(text, "\nnonterminal: {nt}\nlength: {n}");
                }
                _ => text.push_str("\nno membership test needed"),
            }
        }
        return Ok(CommandResult::ok(
            json!({
                "query": query,
                "route": "grammar",
                "answer": yes_no(v.answer),
                "nonterminal": v.nonterminal,
                "length": v.length,
            }),
            text,
        ));
    }
    let last = kb.abox.time_range().map_or(0, |(_, m)| m);
    let cfg = window(SaturationConfig::default_for(&kb, q.time - last), w)?;
    let first = kb.abox.time_range().map_or(q.time, |(l, _)| l);
    // For future TBoxes a window from the first ABox timestamp up to the
    // query time is complete, so a missing derivation is a definite No.
    let complete = future && cfg.time_lo <= first && cfg.time_hi >= q.time && w.depth.is_none() && w.steps.is_none();
    let res = match telx_core::taqa::answer_taqa_saturation(&kb, q, cfg) {
        Entailment::Yes(trace) => CommandResult::ok(
            json!({ "query": query, "route": "saturation", "answer": "Yes", "trace": enc::trace(&trace), "window": window_json(&cfg) }),
            if verbose { format!("Yes\n{}", trace_text(&trace)) } else { "Yes".to_string() },
        ),
        Entailment::UnknownAtBound if complete => CommandResult::ok(
            json!({ "query": query, "route": "saturation", "answer": "No", "trace": null, "window": window_json(&cfg) }),
            "No",
        ),
        Entailment::UnknownAtBound => CommandResult::ok(
            json!({ "query": query, "route": "saturation", "answer": "UnknownAtBound", "trace": null, "window": window_json(&cfg) }),
            "UnknownAtBound",
        )
        .with_diagnostic(unknown_at_bound(&cfg)),
    };
    Ok(res)
}

fn parse_samples(src: &str) -> Result<BTreeSet<i64>, CliError> {
    src.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| CliError::Usage(format!("`{s}` is not an integer"))))
        .collect()
}

fn detect_period(samples: &BTreeSet<i64>, bound: u64) -> Outcome {
    Ok(match detect_periodicity(samples, bound) {
        Some(ep) => {
            let sl = ep.to_semilinear();
            CommandResult::ok(
                json!({ "bound": bound, "periodic": enc::eventually_periodic(&ep), "semilinear": enc::semilinear(&sl) }),
                format!("{ep}\nsemilinear: {sl}"),
            )
            .with_diagnostic(format!("the fit is certified only within [-{bound}, {bound}]"))
        }
        None => CommandResult::ok(json!({ "bound": bound, "periodic": null, "semilinear": null }), "absent")
            .with_diagnostic(format!(
                "no threshold m and period p with m + 2p <= {bound} and m <= {} fit the samples",
                bound / 2
            )),
    })
}

fn emit(t: &TBox, fit_bound: u64, verify_bound: u64) -> Outcome {
    let fitted = fit_shift_sets(t, fit_bound, verify_bound);
    let p = emit_datalog(t, &fitted.sets)?;
    let text = p.to_text();
    let mut res = CommandResult::ok(
        json!({
            "program": enc::program(&p),
            "shift_sets": fitted.sets.iter().map(|((a, b), s)| json!({
                "lhs": a.as_str(), "rhs": b.as_str(), "set": enc::semilinear(s),
            })).collect::<Vec<_>>(),
            "confirmed": fitted.confirmed(),
        }),
        text,
    );
    for (a, b) in &fitted.unfitted {
        res = res.with_diagnostic(format!("no periodic fit for the shifts of ({a}, {b}) within ±{fit_bound}; used the samples only"));
    }
    for (a, b) in &fitted.refuted {
        res = res.with_diagnostic(format!("the fitted shift set of ({a}, {b}) disagrees with the shifts within ±{verify_bound}"));
    }
    res = res.with_diagnostic(format!("shift sets were derived within a bounded window (fit ±{fit_bound}, checked ±{verify_bound})"));
    Ok(res)
}

fn eval(p: &DatalogProgram, abox: &ABox, lo: i64, hi: i64) -> Outcome {
    let facts = eval_datalog_bounded(p, abox, lo, hi);
    let text: String = facts.iter().map(|f| format!("{f}\n")).collect();
    Ok(CommandResult::ok(
        json!({ "lo": lo, "hi": hi, "facts": facts.iter().map(enc::fact).collect::<Vec<_>>() }),
        text,
    )
    .with_diagnostic(format!("derived facts are restricted to the window [{lo}, {hi}]")))
}

fn exists_shift_cmd(doc: &GrammarDocument, nt: NtId, shift: i64, budget: ShiftBudget) -> Outcome {
    let name = doc.grammar.name(nt);
    Ok(match exists_shift(&doc.grammar, nt, shift, budget)? {
        ShiftWitness::Yes(w) => CommandResult::ok(
            json!({ "nonterminal": name, "shift": shift, "answer": "Yes", "witness": w }),
            format!("Yes {}", format_word(&w)),
        ),
        ShiftWitness::NoWithinBudget => CommandResult::ok(
            json!({ "nonterminal": name, "shift": shift, "answer": "NoWithinBudget", "witness": null }),
            "NoWithinBudget",
        )
        .with_diagnostic(format!(
            "no word of length <= {} with balance {shift}; longer words were not searched",
            budget.max_len
        )),
    })
}
