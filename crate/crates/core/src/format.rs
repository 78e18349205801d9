//! Line-oriented text formats for grammars and machines.
//!
//! A grammar file is a list of header directives followed by rule lines:
//!
//! ```text
//! kind cfgsc
//! counters 2 reversal 1
//! states q0 q1 qf
//! start_state q0
//! final qf
//! nonterminals S A
//! terminals a b "$"
//! axiom S
//! rule q0 [*,*] S -> q1 [+1,0] a S
//! rule @done q1 [z,z] S -> qf [0,0] eps
//! ```
//!
//! Guard and update brackets are present exactly when the grammar has
//! counters. `@name` after `rule` sets the production label (default
//! `p<i>`). `#` starts a comment; tokens with blanks, `#`, `"` or `$` are
//! written in double quotes.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::grammar::{
    classify, format_update, Acceptance, CcfgsVariant, ControlPartition, CounterSpec, Discipline, Guard,
    NtId, Production, Shape, StateGrammar, StateId, Symbol, TermId, UpdateStyle,
};
use crate::machine::{CounterMachine, Pushdown, Transition};
use crate::transform::{ControlledCFG, Nfa};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn err<T>(line: usize, reason: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, reason: reason.into() })
}

/// A token with its quoting: keywords such as `eps` or `->` only count
/// when written bare, and `@label` only when the `@` itself is bare.
#[derive(Clone, Debug)]
struct Tok {
    text: String,
    bare: bool,
    lead_bare: bool,
}

impl Tok {
    fn is(&self, kw: &str) -> bool {
        self.bare && self.text == kw
    }

    fn label(&self) -> Option<&str> {
        if self.lead_bare {
            self.text.strip_prefix('@')
        } else {
            None
        }
    }
}

/// Splits a line into tokens. Quoted segments join the surrounding token,
/// as in a shell; `#` outside quotes starts a comment.
fn tokenize(line: &str, n: usize) -> Result<Vec<Tok>, ParseError> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            None | Some('#') => break,
            _ => {}
        }
        let mut tok = Tok { text: String::new(), bare: true, lead_bare: true };
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() || c == '#' {
                break;
            }
            chars.next();
            if c != '"' {
                tok.text.push(c);
                continue;
            }
            if tok.text.is_empty() {
                tok.lead_bare = false;
            }
            tok.bare = false;
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e) => tok.text.push(e),
                        None => return err(n, "unterminated quote"),
                    },
                    Some(ch) => tok.text.push(ch),
                    None => return err(n, "unterminated quote"),
                }
            }
        }
        out.push(tok);
    }
    Ok(out)
}

fn quote(name: &str) -> String {
    let plain = !name.is_empty()
        && !matches!(name, "eps" | "->" | "-")
        && !name.starts_with('@')
        && !name.chars().any(|c| c.is_whitespace() || matches!(c, '#' | '"' | '$' | '\\'));
    if plain {
        name.to_string()
    } else {
        let escaped: String = name.chars().flat_map(|c| if matches!(c, '"' | '\\') { vec!['\\', c] } else { vec![c] }).collect();
        format!("\"{escaped}\"")
    }
}

fn names(list: &[String]) -> String {
    list.iter().map(|n| quote(n)).collect::<Vec<_>>().join(" ")
}

fn parse_guard(tok: &str, k: usize, n: usize) -> Result<Vec<Guard>, ParseError> {
    let inner = bracketed(tok, n, "guard")?;
    let parts: Vec<&str> = if inner.is_empty() { vec![] } else { inner.split(',').collect() };
    if parts.len() != k {
        return err(n, format!("guard arity {} does not match {k} counters", parts.len()));
    }
    parts
        .iter()
        .map(|p| {
            let mut cs = p.trim().chars();
            match (cs.next().and_then(Guard::from_char), cs.next()) {
                (Some(g), None) => Ok(g),
                _ => err(n, format!("bad guard {p:?} (expected z, p or *)")),
            }
        })
        .collect()
}

fn parse_update(tok: &str, k: usize, n: usize) -> Result<Vec<i64>, ParseError> {
    let inner = bracketed(tok, n, "update")?;
    let parts: Vec<&str> = if inner.is_empty() { vec![] } else { inner.split(',').collect() };
    if parts.len() != k {
        return err(n, format!("update arity {} does not match {k} counters", parts.len()));
    }
    parts
        .iter()
        .map(|p| {
            let p = p.trim();
            p.strip_prefix('+').unwrap_or(p).parse::<i64>().or_else(|_| err(n, format!("bad update {p:?}")))
        })
        .collect()
}

fn bracketed<'a>(tok: &'a str, n: usize, what: &str) -> Result<&'a str, ParseError> {
    match tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        Some(inner) => Ok(inner),
        None => err(n, format!("expected {what} in brackets, found {tok:?}")),
    }
}

fn guard_text(g: &[Guard]) -> String {
    let parts: Vec<String> = g.iter().map(|g| g.symbol().to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn update_text(u: &[i64]) -> String {
    let parts: Vec<String> = u.iter().map(|&x| format_update(x)).collect();
    format!("[{}]", parts.join(","))
}

fn counters_line(c: &CounterSpec) -> Option<String> {
    let mut s = match &c.discipline {
        Discipline::None if c.count == 0 => return None,
        Discipline::None => format!("counters {}", c.count),
        Discipline::Monotonic => format!("counters {} monotonic", c.count),
        Discipline::ReversalBounded(rs) => {
            let r = match rs.first() {
                Some(&r0) if rs.iter().all(|&r| r == r0) => r0.to_string(),
                Some(_) => rs.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
                None => "1".to_string(),
            };
            format!("counters {} reversal {r}", c.count)
        }
    };
    if c.update_style == UpdateStyle::Generalized {
        s.push_str(" generalized");
    }
    Some(s)
}

fn parse_counters(args: &[String], n: usize) -> Result<CounterSpec, ParseError> {
    let Some(k) = args.first().and_then(|a| a.parse::<usize>().ok()) else {
        return err(n, "counters needs a count");
    };
    let mut spec = CounterSpec { count: k, discipline: Discipline::None, update_style: UpdateStyle::Unit };
    let mut i = 1;
    while i < args.len() {
        match args[i].as_str() {
            "reversal" => {
                let Some(r) = args.get(i + 1) else { return err(n, "reversal needs a bound") };
                let rs = r
                    .split(',')
                    .map(|x| x.parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .or_else(|_| err(n, format!("bad reversal bound {r:?}")))?;
                let rs = match rs.as_slice() {
                    [r] => vec![*r; k],
                    _ if rs.len() == k => rs,
                    _ => return err(n, format!("{} reversal bounds for {k} counters", rs.len())),
                };
                spec.discipline = Discipline::ReversalBounded(rs);
                i += 2;
            }
            "monotonic" => {
                spec.discipline = Discipline::Monotonic;
                i += 1;
            }
            "generalized" => {
                spec.update_style = UpdateStyle::Generalized;
                i += 1;
            }
            other => return err(n, format!("unknown counter option {other:?}")),
        }
    }
    if k > 0 && spec.discipline == Discipline::None {
        spec.discipline = Discipline::ReversalBounded(vec![1; k]);
    }
    Ok(spec)
}

/// Kind keyword used when printing.
pub fn kind_of(g: &StateGrammar) -> &'static str {
    if g.control.is_some() {
        return "ccfgs";
    }
    if g.counters.is_monotonic() {
        return "cfgmc";
    }
    let counters = g.counters.count > 0 || g.counters.discipline != Discipline::None;
    match (classify(g).shape, counters) {
        (Shape::RightLinear, false) => "rlgs",
        (Shape::Linear, false) => "lgs",
        (Shape::ContextFree, false) => "cfgs",
        (Shape::RightLinear, true) => "rlgsc",
        (Shape::Linear, true) => "lgsc",
        (Shape::ContextFree, true) => "cfgsc",
    }
}

fn check_kind(kind: &str, g: &StateGrammar, n: usize) -> Result<(), ParseError> {
    let shape = classify(g).shape;
    let counters = g.counters.count > 0 || g.counters.discipline != Discipline::None;
    let ok = match kind {
        "ccfgs" => g.control.is_some(),
        "cfgmc" => g.counters.is_monotonic(),
        "cfgs" | "cfgsc" => g.control.is_none() && (kind == "cfgsc") == counters,
        "lgs" | "lgsc" => shape != Shape::ContextFree && (kind == "lgsc") == counters,
        "rlgs" | "rlgsc" => shape == Shape::RightLinear && (kind == "rlgsc") == counters,
        _ => return err(n, format!("unknown kind {kind:?}")),
    };
    if ok {
        Ok(())
    } else {
        err(n, format!("grammar does not match kind {kind}"))
    }
}

fn acceptance_word(a: Acceptance) -> &'static str {
    match a {
        Acceptance::FinalState => "final",
        Acceptance::FinalStateZeroCounters => "zero",
        Acceptance::AllCountersEqual => "equal",
    }
}

fn variant_word(v: CcfgsVariant) -> &'static str {
    match v {
        CcfgsVariant::Classic => "classic",
        CcfgsVariant::TerminalsInV2 => "terminals-in-v2",
        CcfgsVariant::NonterminalsInV2 => "nonterminals-in-v2",
    }
}

/// Prints a grammar so that [`parse_grammar_file`] returns it unchanged.
pub fn print_grammar(g: &StateGrammar) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind {}", kind_of(g));
    if let Some(c) = counters_line(&g.counters) {
        let _ = writeln!(s, "{c}");
    }
    let _ = writeln!(s, "states {}", names(&g.states));
    let _ = writeln!(s, "start_state {}", quote(g.state_name(g.initial)));
    let finals: Vec<String> = g.finals.iter().map(|&q| g.state_name(q).to_string()).collect();
    let _ = writeln!(s, "final {}", names(&finals).trim_end());
    let _ = writeln!(s, "nonterminals {}", names(&g.nonterminals));
    if let Some(c) = &g.control {
        let v2: Vec<String> = c.v2.iter().map(|&n| g.nt_name(n).to_string()).collect();
        let _ = writeln!(s, "v2 {}", names(&v2));
        let _ = writeln!(s, "variant {}", variant_word(c.variant));
    }
    let _ = writeln!(s, "terminals {}", names(&g.terminals).trim_end());
    let _ = writeln!(s, "axiom {}", quote(g.nt_name(g.axiom)));
    let _ = writeln!(s, "accept {}", acceptance_word(g.acceptance));
    for (i, p) in g.productions.iter().enumerate() {
        s.push_str("rule ");
        if p.label != format!("p{}", i + 1) {
            let _ = write!(s, "@{} ", quote(&p.label));
        }
        let _ = write!(s, "{} ", quote(g.state_name(p.from)));
        if g.counters.count > 0 {
            let _ = write!(s, "{} ", guard_text(&p.guard));
        }
        let _ = write!(s, "{} -> {} ", quote(g.nt_name(p.lhs)), quote(g.state_name(p.to)));
        if g.counters.count > 0 {
            let _ = write!(s, "{} ", update_text(&p.update));
        }
        if p.rhs.is_empty() {
            s.push_str("eps");
        } else {
            let rhs: Vec<String> = p
                .rhs
                .iter()
                .map(|&x| match x {
                    Symbol::N(a) => quote(g.nt_name(a)),
                    Symbol::T(t) => quote(g.term_name(t)),
                })
                .collect();
            s.push_str(&rhs.join(" "));
        }
        s.push('\n');
    }
    s
}

struct Lines {
    /// `(line number, tokens)` of non-empty lines.
    lines: Vec<(usize, Vec<Tok>)>,
}

impl Lines {
    fn new(text: &str) -> Result<Self, ParseError> {
        let mut lines = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let toks = tokenize(l, i + 1)?;
            if !toks.is_empty() {
                lines.push((i + 1, toks));
            }
        }
        Ok(Lines { lines })
    }
}

fn index_of(list: &[String], what: &str, name: &str, n: usize) -> Result<u32, ParseError> {
    match list.iter().position(|x| x == name) {
        Some(i) => Ok(i as u32),
        None => err(n, format!("undeclared {what} {name:?}")),
    }
}

fn single<'a>(args: &'a [String], directive: &str, n: usize) -> Result<&'a str, ParseError> {
    match args {
        [one] => Ok(one),
        _ => err(n, format!("{directive} takes exactly one name")),
    }
}

/// Parses a grammar file, reporting the first error with its line number.
pub fn parse_grammar_file(text: &str) -> Result<StateGrammar, ParseError> {
    let lines = Lines::new(text)?;
    let mut kind: Option<(String, usize)> = None;
    let mut counters = CounterSpec::none();
    let mut states: Vec<String> = Vec::new();
    let mut start_state: Option<(String, usize)> = None;
    let mut finals: Option<(Vec<String>, usize)> = None;
    let mut nonterminals: Vec<String> = Vec::new();
    let mut terminals: Vec<String> = Vec::new();
    let mut v2: Option<(Vec<String>, usize)> = None;
    let mut variant = CcfgsVariant::Classic;
    let mut axiom: Option<(String, usize)> = None;
    let mut acceptance: Option<Acceptance> = None;
    let mut rules: Vec<(usize, &[Tok])> = Vec::new();
    for (n, toks) in &lines.lines {
        let n = *n;
        let args: Vec<String> = toks[1..].iter().map(|t| t.text.clone()).collect();
        let args = args.as_slice();
        match toks[0].text.as_str() {
            "kind" => kind = Some((single(args, "kind", n)?.to_string(), n)),
            "counters" => counters = parse_counters(args, n)?,
            "states" => states.extend(args.iter().cloned()),
            "start_state" => start_state = Some((single(args, "start_state", n)?.to_string(), n)),
            "final" => finals.get_or_insert_with(|| (Vec::new(), n)).0.extend(args.iter().cloned()),
            "nonterminals" => nonterminals.extend(args.iter().cloned()),
            "terminals" => terminals.extend(args.iter().cloned()),
            "v2" => v2.get_or_insert_with(|| (Vec::new(), n)).0.extend(args.iter().cloned()),
            "variant" => {
                variant = match single(args, "variant", n)? {
                    "classic" => CcfgsVariant::Classic,
                    "terminals-in-v2" => CcfgsVariant::TerminalsInV2,
                    "nonterminals-in-v2" => CcfgsVariant::NonterminalsInV2,
                    v => return err(n, format!("unknown variant {v:?}")),
                }
            }
            "axiom" => axiom = Some((single(args, "axiom", n)?.to_string(), n)),
            "accept" => {
                acceptance = Some(match single(args, "accept", n)? {
                    "final" => Acceptance::FinalState,
                    "zero" => Acceptance::FinalStateZeroCounters,
                    "equal" => Acceptance::AllCountersEqual,
                    a => return err(n, format!("unknown acceptance {a:?}")),
                })
            }
            "rule" => rules.push((n, &toks[1..])),
            d => return err(n, format!("unknown directive {d:?}")),
        }
    }
    let monotonic = counters.is_monotonic();
    if states.is_empty() {
        if monotonic {
            states.push(crate::grammar::MONOTONIC_STATE.to_string());
        } else {
            return err(1, "no states declared");
        }
    }
    for (list, what) in [(&states, "state"), (&nonterminals, "nonterminal"), (&terminals, "terminal")] {
        let mut seen = BTreeSet::new();
        if let Some(dup) = list.iter().find(|x| !seen.insert(x.as_str())) {
            return err(1, format!("{what} {dup:?} declared twice"));
        }
    }
    if let Some(both) = nonterminals.iter().find(|x| terminals.contains(x)) {
        return err(1, format!("{both:?} is both a terminal and a nonterminal"));
    }
    let initial = match &start_state {
        Some((q, n)) => StateId(index_of(&states, "state", q, *n)?),
        None => StateId(0),
    };
    let finals: BTreeSet<StateId> = match &finals {
        Some((fs, n)) => fs.iter().map(|q| index_of(&states, "state", q, *n).map(StateId)).collect::<Result<_, _>>()?,
        None if monotonic => (0..states.len() as u32).map(StateId).collect(),
        None => BTreeSet::new(),
    };
    if nonterminals.is_empty() {
        return err(1, "no nonterminals declared");
    }
    let axiom = match &axiom {
        Some((a, n)) => NtId(index_of(&nonterminals, "nonterminal", a, *n)?),
        None => NtId(0),
    };
    let control = match &v2 {
        Some((names, n)) => {
            let v2 = names
                .iter()
                .map(|a| index_of(&nonterminals, "nonterminal", a, *n).map(NtId))
                .collect::<Result<Vec<_>, _>>()?;
            let v1 = (0..nonterminals.len() as u32).map(NtId).filter(|a| !v2.contains(a)).collect();
            Some(ControlPartition { v1, v2, variant })
        }
        None => None,
    };

    let k = counters.count;
    let nt_ix: HashMap<&str, u32> = nonterminals.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
    let t_ix: HashMap<&str, u32> = terminals.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
    let mut productions = Vec::new();
    for (i, &(n, args)) in rules.iter().enumerate() {
        let mut args = args;
        let mut label = format!("p{}", i + 1);
        if let Some(l) = args.first().and_then(Tok::label) {
            label = l.to_string();
            args = &args[1..];
        }
        let need = if k > 0 { 6 } else { 4 };
        if args.len() < need {
            return err(n, "rule is missing fields (expected: rule q [guards] A -> p [updates] rhs|eps)");
        }
        if args.len() == need {
            return err(n, "rule is missing its right-hand side (use eps for the empty word)");
        }
        let mut it = args.iter();
        let mut next = || &it.next().expect("length checked").text;
        let from = StateId(index_of(&states, "state", next(), n)?);
        let guard = if k > 0 { parse_guard(next(), k, n)? } else { vec![] };
        let lhs = NtId(index_of(&nonterminals, "nonterminal", next(), n)?);
        let arrow = &args[if k > 0 { 3 } else { 2 }];
        let _ = next();
        if !arrow.is("->") {
            return err(n, "expected ->");
        }
        let to = StateId(index_of(&states, "state", next(), n)?);
        let update = if k > 0 { parse_update(next(), k, n)? } else { vec![] };
        let rest: Vec<&Tok> = it.collect();
        let rhs = if rest.len() == 1 && rest[0].is("eps") {
            vec![]
        } else {
            rest.iter()
                .map(|t| &t.text)
                .map(|s| {
                    if let Some(&a) = nt_ix.get(s.as_str()) {
                        Ok(Symbol::N(NtId(a)))
                    } else if let Some(&t) = t_ix.get(s.as_str()) {
                        Ok(Symbol::T(TermId(t)))
                    } else {
                        err(n, format!("undeclared symbol {s:?}"))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        productions.push(Production { label, from, guard, lhs, to, update, rhs });
    }
    let acceptance = acceptance.unwrap_or(if monotonic { Acceptance::AllCountersEqual } else { Acceptance::FinalState });
    let g = StateGrammar {
        nonterminals,
        terminals,
        states,
        productions,
        axiom,
        initial,
        finals,
        counters,
        control,
        acceptance,
    };
    if let Some((kind, n)) = &kind {
        check_kind(kind, &g, *n)?;
    }
    Ok(g)
}

/// Machine files mirror grammar files:
///
/// ```text
/// machine
/// inputs a b
/// counters 1 reversal 1
/// stack Z A          # optional
/// bottom Z           # defaults to the first stack symbol
/// stack_reversal 1   # optional
/// states p q f
/// start_state p
/// accepting f
/// trans @inc p [*] a - -> p [+1] eps
/// ```
///
/// A transition reads an input symbol or `eps`; with a stack it names the
/// popped top (or `-`) after the read and lists pushed symbols (leftmost on
/// top, `eps` for none) after the update. Without a stack both are omitted.
pub fn print_machine(m: &CounterMachine) -> String {
    let mut s = String::from("machine\n");
    let _ = writeln!(s, "inputs {}", names(&m.inputs).trim_end());
    if let Some(c) = counters_line(&m.counters) {
        let _ = writeln!(s, "{c}");
    }
    if let Some(pd) = &m.pushdown {
        let _ = writeln!(s, "stack {}", names(&pd.symbols));
        let _ = writeln!(s, "bottom {}", quote(&pd.symbols[pd.bottom]));
        if let Some(r) = pd.reversal_bound {
            let _ = writeln!(s, "stack_reversal {r}");
        }
    }
    let _ = writeln!(s, "states {}", names(&m.states));
    let _ = writeln!(s, "start_state {}", quote(&m.states[m.initial]));
    let acc: Vec<String> = m.accepting.iter().map(|&q| m.states[q].clone()).collect();
    let _ = writeln!(s, "accepting {}", names(&acc).trim_end());
    let k = m.counters.count;
    for t in &m.transitions {
        let _ = write!(s, "trans @{} {} ", quote(&t.label), quote(&m.states[t.from]));
        if k > 0 {
            let _ = write!(s, "{} ", guard_text(&t.guard));
        }
        let read = t.read.map_or("eps".to_string(), |a| quote(&m.inputs[a.index()]));
        s.push_str(&read);
        if let Some(pd) = &m.pushdown {
            let top = t.top.map_or("-".to_string(), |x| quote(&pd.symbols[x]));
            let _ = write!(s, " {top}");
        }
        let _ = write!(s, " -> {}", quote(&m.states[t.to]));
        if k > 0 {
            let _ = write!(s, " {}", update_text(&t.update));
        }
        if let Some(pd) = &m.pushdown {
            let push: Vec<String> = t.push.iter().map(|&x| quote(&pd.symbols[x])).collect();
            let _ = write!(s, " {}", if push.is_empty() { "eps".to_string() } else { push.join(" ") });
        }
        s.push('\n');
    }
    s
}

pub fn parse_machine_file(text: &str) -> Result<CounterMachine, ParseError> {
    let lines = Lines::new(text)?;
    let mut inputs = Vec::new();
    let mut counters = CounterSpec::none();
    let mut stack: Option<Vec<String>> = None;
    let mut stack_reversal = None;
    let mut states: Vec<String> = Vec::new();
    let mut start: Option<(String, usize)> = None;
    let mut accepting: Vec<(String, usize)> = Vec::new();
    let mut trans: Vec<(usize, &[Tok])> = Vec::new();
    let mut bottom: Option<(String, usize)> = None;
    let mut saw_header = false;
    for (n, toks) in &lines.lines {
        let n = *n;
        let args: Vec<String> = toks[1..].iter().map(|t| t.text.clone()).collect();
        let args = args.as_slice();
        match toks[0].text.as_str() {
            "machine" => saw_header = true,
            "inputs" => inputs.extend(args.iter().cloned()),
            "counters" => counters = parse_counters(args, n)?,
            "stack" => stack.get_or_insert_with(Vec::new).extend(args.iter().cloned()),
            "stack_reversal" => {
                let r = single(args, "stack_reversal", n)?;
                stack_reversal = Some(r.parse::<u32>().or_else(|_| err(n, format!("bad bound {r:?}")))?);
            }
            "states" => states.extend(args.iter().cloned()),
            "start_state" => start = Some((single(args, "start_state", n)?.to_string(), n)),
            "accepting" => accepting.extend(args.iter().map(|a| (a.clone(), n))),
            "bottom" => bottom = Some((single(args, "bottom", n)?.to_string(), n)),
            "trans" => trans.push((n, &toks[1..])),
            d => return err(n, format!("unknown directive {d:?}")),
        }
    }
    if !saw_header {
        return err(1, "missing `machine` header");
    }
    if states.is_empty() {
        return err(1, "no states declared");
    }
    let pushdown = match stack {
        Some(syms) if syms.is_empty() => return err(1, "stack needs at least a bottom marker"),
        Some(symbols) => {
            let bottom = match &bottom {
                Some((z, n)) => index_of(&symbols, "stack symbol", z, *n)? as usize,
                None => 0,
            };
            Some(Pushdown { symbols, bottom, reversal_bound: stack_reversal })
        }
        None => None,
    };
    let initial = match &start {
        Some((q, n)) => index_of(&states, "state", q, *n)? as usize,
        None => 0,
    };
    let accepting = accepting
        .iter()
        .map(|(q, n)| index_of(&states, "state", q, *n).map(|i| i as usize))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let k = counters.count;
    let mut transitions = Vec::new();
    for &(n, args) in &trans {
        let mut args = args;
        let mut label = String::new();
        if let Some(l) = args.first().and_then(Tok::label) {
            label = l.to_string();
            args = &args[1..];
        }
        let mut it = args.iter();
        let mut next = |what: &str| it.next().ok_or_else(|| ParseError { line: n, reason: format!("transition is missing {what}") });
        let from = index_of(&states, "state", &next("a source state")?.text, n)? as usize;
        let guard = if k > 0 { parse_guard(&next("a guard")?.text, k, n)? } else { vec![] };
        let read = match next("an input symbol or eps")? {
            t if t.is("eps") => None,
            t => Some(TermId(index_of(&inputs, "input", &t.text, n)?)),
        };
        let top = match &pushdown {
            Some(pd) => match next("a stack top or -")? {
                t if t.is("-") => None,
                t => Some(index_of(&pd.symbols, "stack symbol", &t.text, n)? as usize),
            },
            None => None,
        };
        if !next("->")?.is("->") {
            return err(n, "expected ->");
        }
        let to = index_of(&states, "state", &next("a target state")?.text, n)? as usize;
        let update = if k > 0 { parse_update(&next("an update")?.text, k, n)? } else { vec![] };
        let rest: Vec<&Tok> = it.collect();
        let push = match &pushdown {
            Some(pd) => match rest.as_slice() {
                [] => return err(n, "transition is missing its push list (use eps)"),
                [e] if e.is("eps") => vec![],
                syms => syms
                    .iter()
                    .map(|x| index_of(&pd.symbols, "stack symbol", &x.text, n).map(|i| i as usize))
                    .collect::<Result<Vec<_>, _>>()?,
            },
            None if rest.is_empty() => vec![],
            None => return err(n, "push list given for a machine without a stack"),
        };
        transitions.push(Transition { label, from, read, guard, top, to, update, push });
    }
    Ok(CounterMachine { states, inputs, counters, pushdown, transitions, initial, accepting })
}

/// A regularly controlled grammar: a grammar file plus control lines
///
/// ```text
/// control_states s0 s1
/// control_start s0
/// control_final s1
/// control_edge s0 p1 s1
/// ```
///
/// where edges are labelled with production labels of the base grammar.
pub fn print_controlled(c: &ControlledCFG) -> String {
    let mut s = print_grammar(&c.base);
    let n = &c.control;
    let _ = writeln!(s, "control_states {}", names(&n.states));
    let _ = writeln!(s, "control_start {}", quote(&n.states[n.initial]));
    let fs: Vec<String> = n.finals.iter().map(|&f| n.states[f].clone()).collect();
    let _ = writeln!(s, "control_final {}", names(&fs).trim_end());
    for (a, l, b) in &n.transitions {
        let _ = writeln!(s, "control_edge {} {} {}", quote(&n.states[*a]), quote(l), quote(&n.states[*b]));
    }
    s
}

pub fn parse_controlled_file(text: &str) -> Result<ControlledCFG, ParseError> {
    let mut grammar_text = String::new();
    let mut control: Vec<(usize, Vec<Tok>)> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let toks = tokenize(l, i + 1)?;
        if toks.first().is_some_and(|t| t.bare && t.text.starts_with("control_")) {
            control.push((i + 1, toks));
            grammar_text.push('\n');
        } else {
            grammar_text.push_str(l);
            grammar_text.push('\n');
        }
    }
    let base = parse_grammar_file(&grammar_text)?;
    let mut states: Vec<String> = Vec::new();
    let mut start = None;
    let mut finals = Vec::new();
    let mut edges = Vec::new();
    for (n, toks) in &control {
        let args: Vec<String> = toks[1..].iter().map(|t| t.text.clone()).collect();
        match toks[0].text.as_str() {
            "control_states" => states.extend(args),
            "control_start" => start = Some((single(&args, "control_start", *n)?.to_string(), *n)),
            "control_final" => finals.extend(args.into_iter().map(|a| (a, *n))),
            "control_edge" => match args.as_slice() {
                [a, l, b] => edges.push((a.clone(), l.clone(), b.clone(), *n)),
                _ => return err(*n, "control_edge takes a state, a label and a state"),
            },
            d => return err(*n, format!("unknown directive {d:?}")),
        }
    }
    if states.is_empty() {
        return err(1, "no control states declared");
    }
    let initial = match &start {
        Some((q, n)) => index_of(&states, "control state", q, *n)? as usize,
        None => 0,
    };
    let finals = finals
        .iter()
        .map(|(q, n)| index_of(&states, "control state", q, *n).map(|i| i as usize))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let mut transitions = Vec::new();
    for (a, l, b, n) in edges {
        if !base.productions.iter().any(|p| p.label == l) {
            return err(n, format!("no production labelled {l:?}"));
        }
        let a = index_of(&states, "control state", &a, n)? as usize;
        let b = index_of(&states, "control state", &b, n)? as usize;
        transitions.push((a, l, b));
    }
    Ok(ControlledCFG { base, control: Nfa { states, initial, finals, transitions } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn corpus_round_trips() {
        for e in corpus::corpus() {
            let text = print_grammar(&e.grammar);
            let back = parse_grammar_file(&text).unwrap_or_else(|x| panic!("{}: {x}\n{text}", e.name));
            assert_eq!(back, e.grammar, "{}", e.name);
        }
    }

    #[test]
    fn missing_rhs_reports_line() {
        let text = "kind cfgs\nstates q0 q1\nnonterminals S\nterminals a\nrule q0 S -> q1\n";
        let e = parse_grammar_file(text).unwrap_err();
        assert_eq!(e.line, 5);
    }

    #[test]
    fn guard_arity() {
        let text = "counters 2\nstates q\nnonterminals S\nterminals a\nrule q [z] S -> q [0,0] a\n";
        let e = parse_grammar_file(text).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.reason.contains("guard arity"), "{e}");
    }

    #[test]
    fn unknown_directive_and_symbol() {
        assert_eq!(parse_grammar_file("bogus x\n").unwrap_err().line, 1);
        let text = "states q\nnonterminals S\nterminals a\n\nrule q S -> q b\n";
        let e = parse_grammar_file(text).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.reason.contains("undeclared"));
    }

    #[test]
    fn quoted_dollar_and_comments() {
        let text = "states q # one state\nnonterminals S\nterminals a \"$\"\nrule q S -> q a \"$\"  # tail\n";
        let g = parse_grammar_file(text).unwrap();
        assert_eq!(g.terminals, vec!["a", "$"]);
        assert!(print_grammar(&g).contains("\"$\""));
    }

    #[test]
    fn kind_is_checked() {
        let text = "kind rlgs\nstates q\nnonterminals S\nterminals a\nrule q S -> q S a\n";
        assert_eq!(parse_grammar_file(text).unwrap_err().line, 1);
    }

    #[test]
    fn transform_outputs_round_trip() {
        use crate::reduce::{subset_sum_to_cfgsc, subset_sum_to_rlgsc, SubsetSumInstance};
        use crate::transform::{cfgmc_to_ccfgs, degeneralize, strip_counters, to_normal_form};
        let inst = SubsetSumInstance::new(vec![3, 5], 6).unwrap();
        let gs = vec![
            to_normal_form(&corpus::blocks_r3()).unwrap(),
            strip_counters(&to_normal_form(&corpus::example2()).unwrap()).unwrap().0,
            cfgmc_to_ccfgs(&corpus::dyck_equal()).unwrap(),
            degeneralize(&subset_sum_to_rlgsc(&inst)).unwrap(),
            subset_sum_to_cfgsc(&inst).0,
        ];
        for g in gs {
            let text = print_grammar(&g);
            assert_eq!(parse_grammar_file(&text).unwrap_or_else(|e| panic!("{e}\n{text}")), g);
        }
    }

    #[test]
    fn machines_round_trip() {
        use crate::machine::{ccfgs_to_npcm, cfgsc_lm_to_npcm, lgsc_to_npcm1, rlgsc_to_ncm};
        use crate::transform::cfgmc_to_ccfgs;
        let ms = vec![
            cfgsc_lm_to_npcm(&corpus::example2()).unwrap(),
            ccfgs_to_npcm(&cfgmc_to_ccfgs(&corpus::dyck_equal()).unwrap()).unwrap(),
            lgsc_to_npcm1(&corpus::blocks_r3()).unwrap(),
            rlgsc_to_ncm(&crate::reduce::subset_sum_to_rlgsc(&crate::reduce::SubsetSumInstance::new(vec![2], 2).unwrap())).unwrap(),
        ];
        for m in ms {
            let text = print_machine(&m);
            assert_eq!(parse_machine_file(&text).unwrap_or_else(|e| panic!("{e}\n{text}")), m);
        }
    }

    #[test]
    fn controlled_round_trip() {
        let c = crate::transform::cfgs_to_regctrl(&corpus::example1(2)).unwrap();
        let text = print_controlled(&c);
        let back = parse_controlled_file(&text).unwrap();
        assert_eq!(back.base, c.base);
        assert_eq!(back.control, c.control);
    }
}
