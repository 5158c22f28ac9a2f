//! Line-based text formats.
//!
//! **TBox** — one declaration or inclusion per line, `#` starts a comment:
//!
//! ```text
//! rigid advisorOf              # rigid role (must precede first use)
//! local r                      # explicit local role (the default)
//! concept Extra                # declare a concept without using it
//! Prof [= X Prof               # Prof ⊑ ○Prof      (X = X^1)
//! Student [= X^3 Dr            # Student ⊑ ○³Dr
//! B [= X^-2 C                  # B ⊑ ○⁻²C
//! Prof & Proud [= Happy        # Prof ⊓ Proud ⊑ Happy
//! Prof [= exists advisorOf . Student
//! exists advisorOf . Dr [= Proud
//! ```
//!
//! **ABox** — `Concept(ind, time)` and `role(ind, ind, time)`, one per line.
//!
//! **Grammar** — header lines `terminals:`, `nonterminals:` (optional) and
//! `start:` (optional), then rules `N -> alpha & beta | gamma` where symbols
//! are separated by whitespace, `_` is the empty string, and a token made
//! only of terminal characters (e.g. `ccc`) stands for that terminal
//! string. Lines `@key N A B` attach a concept pair to nonterminal `N`.
//!
//! **Words** — literal strings (`aabbcc`), powers (`c^16`), mixtures
//! (`d^2c^4`), and `_` for the empty word.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::grammar::{GSymbol, Grammar, NtId};
use crate::model::{
    ABox, ConceptInclusion, ConceptName, Fact, Individual, Rigidity, RoleName, TBox, Term,
};

/// What went wrong while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// The line does not match any production of the format.
    Syntax(String),
    /// An operator that the format does not know.
    UnknownOperator(String),
    /// A shift exponent or timestamp that is not an integer.
    NotAnInteger(String),
    /// A role was declared rigid after being used as local, or both ways.
    Rigidity(String),
    /// A grammar symbol that is neither a nonterminal nor a terminal string.
    UnknownSymbol(String),
}

/// A parse error with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column number.
    pub column: usize,
    /// The problem.
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownOperator(m) => write!(f, "unknown operator `{m}`"),
            ParseErrorKind::NotAnInteger(m) => write!(f, "expected an integer, found `{m}`"),
            ParseErrorKind::Rigidity(m) => write!(f, "rigidity error: {m}"),
            ParseErrorKind::UnknownSymbol(m) => write!(f, "unknown grammar symbol `{m}`"),
        }
    }
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// Characters allowed in identifiers.
pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '@' | '~' | '$')
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Op(&'static str),
    Unknown(String),
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    col: usize,
}

const OPERATORS: [&str; 8] = ["[=", "&", ".", "^", "-", "(", ")", ","];

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn lex(line: &str) -> Vec<Lexed> {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let col = line[..pos].chars().count() + 1;
        if c.is_whitespace() {
            i += 1;
        } else if is_ident_char(c) {
            let start = pos;
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            let end = if i < chars.len() { chars[i].0 } else { line.len() };
            out.push(Lexed { tok: Tok::Ident(line[start..end].to_string()), col });
        } else {
            let rest = &line[pos..];
            if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
                out.push(Lexed { tok: Tok::Op(op), col });
                i += op.chars().count();
            } else {
                // Group runs of unknown punctuation so that `<=` is reported whole.
                let start = pos;
                while i < chars.len()
                    && !chars[i].1.is_whitespace()
                    && !is_ident_char(chars[i].1)
                    && !OPERATORS.iter().any(|op| line[chars[i].0..].starts_with(*op))
                {
                    i += 1;
                }
                let end = if i < chars.len() { chars[i].0 } else { line.len() };
                out.push(Lexed { tok: Tok::Unknown(line[start..end].to_string()), col });
            }
        }
    }
    out
}

struct Cursor<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Lexed], line: usize, text: &str) -> Self {
        Cursor { toks, pos: 0, line, end_col: text.chars().count() + 1 }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + k).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |l| l.col)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        err(self.line, self.col(), kind)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(Tok::Unknown(s)) => self.error(ParseErrorKind::UnknownOperator(s.clone())),
            Some(Tok::Ident(s)) => {
                self.error(ParseErrorKind::Syntax(format!("expected {expected}, found `{s}`")))
            }
            Some(Tok::Op(s)) => {
                self.error(ParseErrorKind::Syntax(format!("expected {expected}, found `{s}`")))
            }
            None => self.error(ParseErrorKind::Syntax(format!("expected {expected}, found end of line"))),
        }
    }

    fn ident(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn op(&mut self, op: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Op(o)) if *o == op => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{op}`"))),
        }
    }

    fn eat_op(&mut self, op: &'static str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat_op("-");
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let value: i64 = s
                    .parse()
                    .map_err(|_| err(self.line, col, ParseErrorKind::NotAnInteger(s.clone())))?;
                self.pos += 1;
                Ok(if negative { -value } else { value })
            }
            Some(Tok::Unknown(s)) => {
                Err(err(self.line, col, ParseErrorKind::NotAnInteger(s.clone())))
            }
            Some(Tok::Op(s)) => Err(err(self.line, col, ParseErrorKind::NotAnInteger(s.to_string()))),
            None => Err(err(self.line, col, ParseErrorKind::NotAnInteger(String::new()))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

enum Lhs {
    Concept(String),
    Conj(String, String),
    Exists(String, String),
}

enum Rhs {
    Shift(i64, String),
    Exists(String, String),
}

fn parse_lhs(cur: &mut Cursor<'_>) -> Result<Lhs, ParseError> {
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "exists")
        && matches!(cur.peek_at(1), Some(Tok::Ident(_)))
    {
        cur.pos += 1;
        let role = cur.ident("a role name")?;
        cur.op(".")?;
        let filler = cur.ident("a concept name")?;
        return Ok(Lhs::Exists(role, filler));
    }
    let a = cur.ident("a concept name")?;
    if cur.eat_op("&") {
        let b = cur.ident("a concept name")?;
        return Ok(Lhs::Conj(a, b));
    }
    Ok(Lhs::Concept(a))
}

fn parse_rhs(cur: &mut Cursor<'_>) -> Result<Rhs, ParseError> {
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "exists")
        && matches!(cur.peek_at(1), Some(Tok::Ident(_)))
    {
        cur.pos += 1;
        let role = cur.ident("a role name")?;
        cur.op(".")?;
        let filler = cur.ident("a concept name")?;
        return Ok(Rhs::Exists(role, filler));
    }
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "X") {
        match cur.peek_at(1) {
            Some(Tok::Op("^")) => {
                cur.pos += 2;
                let delta = cur.integer()?;
                let b = cur.ident("a concept name")?;
                return Ok(Rhs::Shift(delta, b));
            }
            Some(Tok::Ident(_)) => {
                cur.pos += 1;
                let b = cur.ident("a concept name")?;
                return Ok(Rhs::Shift(1, b));
            }
            _ => {}
        }
    }
    let b = cur.ident("a concept name")?;
    Ok(Rhs::Shift(0, b))
}

/// Parses a TBox.
pub fn parse_tbox(src: &str) -> Result<TBox, ParseError> {
    let mut tbox = TBox::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let toks = lex(line);
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, line_no, line);
        let has_sub = toks.iter().any(|t| t.tok == Tok::Op("[="));
        if let (false, Some(Tok::Ident(kw))) = (has_sub, cur.peek()) {
            if matches!(kw.as_str(), "rigid" | "local" | "concept") {
                let kw = kw.clone();
                cur.pos += 1;
                if cur.peek().is_none() {
                    return Err(cur.unexpected("a name"));
                }
                while cur.peek().is_some() {
                    let col = cur.col();
                    let name = cur.ident("a name")?;
                    match kw.as_str() {
                        "concept" => tbox.declare_concept(name.as_str()),
                        _ => {
                            let rig = if kw == "rigid" { Rigidity::Rigid } else { Rigidity::Local };
                            if rig == Rigidity::Rigid && used.contains(&name) && !tbox.is_rigid(&RoleName::new(&name)) {
                                return Err(err(
                                    line_no,
                                    col,
                                    ParseErrorKind::Rigidity(format!(
                                        "role `{name}` is declared rigid after its first use"
                                    )),
                                ));
                            }
                            tbox.declare_role(name.as_str(), rig).map_err(|e| {
                                err(line_no, col, ParseErrorKind::Rigidity(e.to_string()))
                            })?;
                        }
                    }
                }
                continue;
            }
        }
        let lhs = parse_lhs(&mut cur)?;
        cur.op("[=")?;
        let rhs_col = cur.col();
        let rhs = parse_rhs(&mut cur)?;
        cur.finish()?;
        let ci = match (lhs, rhs) {
            (Lhs::Concept(a), Rhs::Shift(d, b)) => ConceptInclusion::shift(a, d, b),
            (Lhs::Conj(a, b), Rhs::Shift(0, c)) => ConceptInclusion::conj(a, b, c),
            (Lhs::Exists(r, a), Rhs::Shift(0, b)) => ConceptInclusion::exists_left(r, a, b),
            (Lhs::Concept(a), Rhs::Exists(r, b)) => ConceptInclusion::exists_right(a, r, b),
            _ => {
                return Err(err(
                    line_no,
                    rhs_col,
                    ParseErrorKind::Syntax("inclusion is not in normal form".to_string()),
                ))
            }
        };
        if let Some(r) = ci.role() {
            used.insert(r.as_str().to_string());
        }
        tbox.insert_declaring(ci);
    }
    Ok(tbox)
}

/// Serializes a TBox; `parse_tbox` inverts it.
pub fn serialize_tbox(tbox: &TBox) -> String {
    let mut out = String::new();
    let rigid: Vec<&RoleName> =
        tbox.roles().iter().filter(|(_, r)| **r == Rigidity::Rigid).map(|(n, _)| n).collect();
    let local: Vec<&RoleName> =
        tbox.roles().iter().filter(|(_, r)| **r == Rigidity::Local).map(|(n, _)| n).collect();
    for r in rigid {
        let _ = writeln!(out, "rigid {r}");
    }
    for r in local {
        let _ = writeln!(out, "local {r}");
    }
    let used: BTreeSet<&ConceptName> = tbox.inclusions().flat_map(|ci| ci.concepts()).collect();
    for c in tbox.concepts() {
        if !used.contains(c) {
            let _ = writeln!(out, "concept {c}");
        }
    }
    for ci in tbox.inclusions() {
        let _ = writeln!(out, "{ci}");
    }
    out
}

/// Parses a single fact `A(a, n)` or `r(a, b, n)`.
pub fn parse_fact(src: &str) -> Result<Fact, ParseError> {
    let toks = lex(src);
    let mut cur = Cursor::new(&toks, 1, src);
    let fact = parse_fact_tokens(&mut cur)?;
    cur.finish()?;
    Ok(fact)
}

fn parse_fact_tokens(cur: &mut Cursor<'_>) -> Result<Fact, ParseError> {
    let pred = cur.ident("a concept or role name")?;
    cur.op("(")?;
    let mut args = Vec::new();
    loop {
        // The last argument is the timestamp; try an identifier first.
        if matches!(cur.peek(), Some(Tok::Op("-"))) {
            break;
        }
        match (cur.peek(), cur.peek_at(1)) {
            (Some(Tok::Ident(_)), Some(Tok::Op(","))) => {
                args.push(cur.ident("an individual")?);
                cur.pos += 1;
            }
            _ => break,
        }
    }
    let time = cur.integer()?;
    cur.op(")")?;
    match args.len() {
        1 => Ok(Fact::concept(pred, &args[0], time)),
        2 => Ok(Fact::role(pred, &args[0], &args[1], time)),
        n => Err(cur.error(ParseErrorKind::Syntax(format!(
            "a fact has one or two individual arguments, found {n}"
        )))),
    }
}

/// Parses an ABox.
pub fn parse_abox(src: &str) -> Result<ABox, ParseError> {
    let mut abox = ABox::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = strip_comment(raw);
        let toks = lex(line);
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, idx + 1, line);
        let fact = parse_fact_tokens(&mut cur)?;
        cur.finish()?;
        abox.insert(fact).expect("parsed facts are ground");
    }
    Ok(abox)
}

/// Serializes an ABox; `parse_abox` inverts it.
pub fn serialize_abox(abox: &ABox) -> String {
    let mut out = String::new();
    for f in abox.facts() {
        let _ = writeln!(out, "{f}");
    }
    out
}

/// A grammar together with the optional concept-pair annotations of its
/// nonterminals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarDocument {
    /// The grammar.
    pub grammar: Grammar,
    /// Concept pair `(A, B)` named by a nonterminal `N_AB`.
    pub keys: BTreeMap<NtId, (ConceptName, ConceptName)>,
}

impl GrammarDocument {
    /// A document without annotations.
    pub fn new(grammar: Grammar) -> Self {
        GrammarDocument { grammar, keys: BTreeMap::new() }
    }
}

fn token_columns(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

/// Splits a rule body into whitespace-separated tokens, with `&` and `|`
/// always standing alone; columns are 1-based within `body`.
fn body_tokens(body: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let col = |i: usize| body[..i].chars().count() + 1;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() || c == '&' || c == '|' {
            if let Some(s) = start.take() {
                out.push((col(s), &body[s..i]));
            }
            if c != ' ' && !c.is_whitespace() {
                out.push((col(i), &body[i..i + 1]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((col(s), &body[s..]));
    }
    out
}

/// Parses a grammar document.
pub fn parse_grammar(src: &str) -> Result<GrammarDocument, ParseError> {
    let mut g = Grammar::new();
    // First pass: headers and left-hand sides, so that symbol kinds are known.
    let mut rule_lines = Vec::new();
    let mut key_lines = Vec::new();
    let mut start = None;
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("terminals:") {
            for tok in rest.split_whitespace() {
                for c in tok.chars() {
                    g.add_terminal(c);
                }
            }
        } else if let Some(rest) = trimmed.strip_prefix("nonterminals:") {
            for tok in rest.split_whitespace() {
                g.add_nonterminal(tok);
            }
        } else if let Some(rest) = trimmed.strip_prefix("start:") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            if names.len() != 1 {
                let col = line.find("start:").unwrap_or(0) + 1;
                return Err(err(
                    line_no,
                    col,
                    ParseErrorKind::Syntax("`start:` takes exactly one nonterminal".to_string()),
                ));
            }
            start = Some((line_no, names[0].to_string()));
        } else if trimmed.starts_with("@key") {
            key_lines.push((line_no, line));
        } else if let Some(arrow) = line.find("->") {
            let lhs = line[..arrow].trim();
            let col = line.find(lhs).unwrap_or(0) + 1;
            if lhs.is_empty() || !lhs.chars().all(is_ident_char) {
                return Err(err(
                    line_no,
                    col,
                    ParseErrorKind::Syntax(format!("invalid nonterminal `{lhs}`")),
                ));
            }
            g.add_nonterminal(lhs);
            rule_lines.push((line_no, line, arrow));
        } else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(err(
                line_no,
                col,
                ParseErrorKind::Syntax("expected a header, `@key` line or rule `N -> ...`".to_string()),
            ));
        }
    }
    for (line_no, line, arrow) in rule_lines {
        let lhs = g.nt(line[..arrow].trim()).expect("declared in first pass");
        let body = &line[arrow + 2..];
        let offset = line[..arrow + 2].chars().count();
        let mut alternatives: Vec<Vec<Vec<GSymbol>>> = alloc::vec![alloc::vec![Vec::new()]];
        let mut conj_has_eps = false;
        for (col, tok) in body_tokens(body) {
            let col = offset + col;
            match tok {
                "|" => {
                    alternatives.push(alloc::vec![Vec::new()]);
                    conj_has_eps = false;
                }
                "&" => {
                    alternatives.last_mut().expect("nonempty").push(Vec::new());
                    conj_has_eps = false;
                }
                "_" => {
                    let conj = alternatives.last_mut().and_then(|a| a.last_mut()).expect("nonempty");
                    if !conj.is_empty() || conj_has_eps {
                        return Err(err(
                            line_no,
                            col,
                            ParseErrorKind::Syntax("`_` must be a whole conjunct".to_string()),
                        ));
                    }
                    conj_has_eps = true;
                }
                _ => {
                    if conj_has_eps {
                        return Err(err(
                            line_no,
                            col,
                            ParseErrorKind::Syntax("`_` must be a whole conjunct".to_string()),
                        ));
                    }
                    let conj = alternatives.last_mut().and_then(|a| a.last_mut()).expect("nonempty");
                    if let Some(id) = g.nt(tok) {
                        conj.push(GSymbol::Nonterminal(id));
                    } else if tok.chars().all(|c| g.terminals().contains(&c)) {
                        conj.extend(tok.chars().map(GSymbol::Terminal));
                    } else {
                        return Err(err(line_no, col, ParseErrorKind::UnknownSymbol(tok.to_string())));
                    }
                }
            }
        }
        for conjuncts in alternatives {
            g.add_rule(lhs, conjuncts).map_err(|e| {
                err(line_no, offset + 1, ParseErrorKind::Syntax(e.to_string()))
            })?;
        }
    }
    if let Some((line_no, name)) = start {
        let id = g.nt(&name).ok_or_else(|| err(line_no, 1, ParseErrorKind::UnknownSymbol(name.clone())))?;
        g.set_start(Some(id));
    }
    let mut keys = BTreeMap::new();
    for (line_no, line) in key_lines {
        let toks = token_columns(line);
        if toks.len() != 4 {
            return Err(err(
                line_no,
                1,
                ParseErrorKind::Syntax("`@key` takes a nonterminal and two concept names".to_string()),
            ));
        }
        let id = g
            .nt(toks[1].1)
            .ok_or_else(|| err(line_no, toks[1].0, ParseErrorKind::UnknownSymbol(toks[1].1.to_string())))?;
        keys.insert(id, (ConceptName::new(toks[2].1), ConceptName::new(toks[3].1)));
    }
    Ok(GrammarDocument { grammar: g, keys })
}

fn write_conjunct(out: &mut String, g: &Grammar, conj: &[GSymbol]) {
    if conj.is_empty() {
        out.push('_');
        return;
    }
    for (i, s) in conj.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match s {
            GSymbol::Terminal(c) => out.push(*c),
            GSymbol::Nonterminal(n) => out.push_str(g.name(*n)),
        }
    }
}

/// Serializes a grammar document; `parse_grammar` inverts it (nonterminal
/// ids are preserved because all nonterminals are listed in id order).
pub fn serialize_grammar(doc: &GrammarDocument) -> String {
    let g = &doc.grammar;
    let mut out = String::new();
    out.push_str("terminals:");
    for c in g.terminals() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    out.push_str("nonterminals:");
    for id in 0..g.nonterminal_count() {
        let _ = write!(out, " {}", g.name(id));
    }
    out.push('\n');
    if let Some(s) = g.start() {
        let _ = writeln!(out, "start: {}", g.name(s));
    }
    for rule in g.rules() {
        let _ = write!(out, "{} -> ", g.name(rule.lhs));
        for (i, conj) in rule.conjuncts.iter().enumerate() {
            if i > 0 {
                out.push_str(" & ");
            }
            write_conjunct(&mut out, g, conj);
        }
        out.push('\n');
    }
    for (id, (a, b)) in &doc.keys {
        let _ = writeln!(out, "@key {} {a} {b}", g.name(*id));
    }
    out
}

/// Parses a word argument: `aabbcc`, `c^16`, `d^2c^4`, or `_` for ε.
pub fn parse_word(src: &str) -> Result<String, ParseError> {
    let src = src.trim();
    if src == "_" || src.is_empty() {
        return Ok(String::new());
    }
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '^' {
            return Err(err(1, i + 1, ParseErrorKind::Syntax(format!("unexpected `{c}` in word"))));
        }
        i += 1;
        if i < chars.len() && chars[i] == '^' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[start..j].iter().collect();
            let n: usize =
                digits.parse().map_err(|_| err(1, start + 1, ParseErrorKind::NotAnInteger(digits.clone())))?;
            for _ in 0..n {
                out.push(c);
            }
            i = j;
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Renders a word compactly: maximal runs of one letter longer than three
/// become `x^n`, and the empty word is `_`.
pub fn format_word(word: &str) -> String {
    if word.is_empty() {
        return "_".to_string();
    }
    let mut out = String::new();
    let chars: Vec<char> = word.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        if j - i > 3 {
            let _ = write!(out, "{c}^{}", j - i);
        } else {
            for _ in i..j {
                out.push(c);
            }
        }
        i = j;
    }
    out
}

/// Renders a term for use in text output.
pub fn format_term(term: &Term) -> String {
    term.to_string()
}

/// Shorthand used by the query syntax: parses `Happy(Alice, 2028)` into
/// its parts.
pub fn parse_concept_query(src: &str) -> Result<(ConceptName, Individual, i64), ParseError> {
    match parse_fact(src)? {
        Fact::Concept { concept, subject: Term::Individual(a), time } => Ok((concept, a, time)),
        _ => Err(err(1, 1, ParseErrorKind::Syntax("expected a concept fact `A(a, n)`".to_string()))),
    }
}
