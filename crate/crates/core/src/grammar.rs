//! Grammar data model shared by every grammar class: plain state grammars,
//! state grammars with reversal-bounded counters, grammars with monotonic
//! counters and controlled state grammars.
//!
//! Symbols are interned per grammar. Productions refer to nonterminals,
//! terminals and states by index; the name tables live on [`StateGrammar`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl NtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One letter of a sentential form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(TermId),
    N(NtId),
}

impl Symbol {
    pub fn is_nonterminal(self) -> bool {
        matches!(self, Symbol::N(_))
    }

    pub fn nonterminal(self) -> Option<NtId> {
        match self {
            Symbol::N(n) => Some(n),
            Symbol::T(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Terminal,
    Nonterminal,
    State,
}

/// A name resolved against one grammar's symbol tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolId {
    pub kind: SymbolKind,
    pub index: u32,
}

/// Counter test carried by a production. `Any` stands for both tests at once
/// (the "v is 0 or 1" shorthand) and is equivalent to two productions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guard {
    Zero,
    Positive,
    Any,
}

impl Guard {
    pub fn admits(self, value: u64) -> bool {
        match self {
            Guard::Zero => value == 0,
            Guard::Positive => value > 0,
            Guard::Any => true,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Guard::Zero => 'z',
            Guard::Positive => 'p',
            Guard::Any => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Guard> {
        match c {
            'z' | '0' => Some(Guard::Zero),
            'p' | '1' => Some(Guard::Positive),
            '*' => Some(Guard::Any),
            _ => None,
        }
    }
}

/// Parses a compact guard string such as `"zp*"`.
pub fn guards(spec: &str) -> Vec<Guard> {
    spec.chars()
        .map(|c| Guard::from_char(c).unwrap_or_else(|| panic!("bad guard character {c:?}")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Discipline {
    None,
    /// Reversal bound per counter.
    ReversalBounded(Vec<u32>),
    Monotonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateStyle {
    Unit,
    /// Increments are arbitrary nonnegative constants, decrements are exactly 1.
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CounterSpec {
    pub count: usize,
    pub discipline: Discipline,
    pub update_style: UpdateStyle,
}

impl CounterSpec {
    pub fn none() -> Self {
        CounterSpec { count: 0, discipline: Discipline::None, update_style: UpdateStyle::Unit }
    }

    pub fn reversal_bounded(count: usize, reversals: u32) -> Self {
        CounterSpec {
            count,
            discipline: Discipline::ReversalBounded(vec![reversals; count]),
            update_style: UpdateStyle::Unit,
        }
    }

    pub fn monotonic(count: usize) -> Self {
        CounterSpec { count, discipline: Discipline::Monotonic, update_style: UpdateStyle::Unit }
    }

    pub fn generalized(mut self) -> Self {
        self.update_style = UpdateStyle::Generalized;
        self
    }

    /// Declared reversal bound of counter `j`, `None` when unbounded in
    /// the sense that the counter never reverses (monotonic) or absent.
    pub fn reversal_bound(&self, j: usize) -> Option<u32> {
        match &self.discipline {
            Discipline::ReversalBounded(rs) => rs.get(j).copied(),
            _ => None,
        }
    }

    pub fn is_reversal_bounded(&self) -> bool {
        matches!(self.discipline, Discipline::ReversalBounded(_))
    }

    pub fn is_monotonic(&self) -> bool {
        matches!(self.discipline, Discipline::Monotonic)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Production {
    pub label: String,
    pub from: StateId,
    pub guard: Vec<Guard>,
    pub lhs: NtId,
    pub to: StateId,
    pub update: Vec<i64>,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn nonterminal_count(&self) -> usize {
        self.rhs.iter().filter(|s| s.is_nonterminal()).count()
    }

    pub fn rhs_contains(&self, n: NtId) -> bool {
        self.rhs.contains(&Symbol::N(n))
    }

    pub fn count_in_rhs(&self, n: NtId) -> usize {
        self.rhs.iter().filter(|&&s| s == Symbol::N(n)).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Acceptance {
    FinalState,
    FinalStateZeroCounters,
    AllCountersEqual,
}

/// Which right-hand sides the `V2` productions of a controlled grammar may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CcfgsVariant {
    /// `V2` rules rewrite into `V2*`.
    Classic,
    /// `V2` rules rewrite into `(V2 ∪ Σ)*`.
    TerminalsInV2,
    /// `V2` rules rewrite into `(V1 ∪ V2)*`.
    NonterminalsInV2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ControlPartition {
    pub v1: Vec<NtId>,
    /// `C_1, ..., C_k` in order.
    pub v2: Vec<NtId>,
    pub variant: CcfgsVariant,
}

impl ControlPartition {
    pub fn position_in_v2(&self, n: NtId) -> Option<usize> {
        self.v2.iter().position(|&c| c == n)
    }

    pub fn is_v2(&self, n: NtId) -> bool {
        self.v2.contains(&n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateGrammar {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub states: Vec<String>,
    pub productions: Vec<Production>,
    pub axiom: NtId,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub counters: CounterSpec,
    pub control: Option<ControlPartition>,
    pub acceptance: Acceptance,
}

impl StateGrammar {
    pub fn counter_count(&self) -> usize {
        self.counters.count
    }

    pub fn nt_name(&self, n: NtId) -> &str {
        &self.nonterminals[n.index()]
    }

    pub fn term_name(&self, t: TermId) -> &str {
        &self.terminals[t.index()]
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn nt(&self, name: &str) -> Option<NtId> {
        self.nonterminals.iter().position(|n| n == name).map(|i| NtId(i as u32))
    }

    pub fn term(&self, name: &str) -> Option<TermId> {
        self.terminals.iter().position(|n| n == name).map(|i| TermId(i as u32))
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(|i| StateId(i as u32))
    }

    pub fn symbol(&self, name: &str) -> Option<SymbolId> {
        if let Some(n) = self.nt(name) {
            return Some(SymbolId { kind: SymbolKind::Nonterminal, index: n.0 });
        }
        if let Some(t) = self.term(name) {
            return Some(SymbolId { kind: SymbolKind::Terminal, index: t.0 });
        }
        self.state(name).map(|q| SymbolId { kind: SymbolKind::State, index: q.0 })
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    pub fn symbol_name(&self, s: Symbol) -> &str {
        match s {
            Symbol::T(t) => self.term_name(t),
            Symbol::N(n) => self.nt_name(n),
        }
    }

    /// Concatenated spelling of a terminal word.
    pub fn render_word(&self, w: &[TermId]) -> String {
        w.iter().map(|&t| self.term_name(t)).collect()
    }

    pub fn render_form(&self, form: &[Symbol]) -> String {
        if form.is_empty() {
            return "λ".to_string();
        }
        form.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join(" ")
    }

    /// Splits a word into terminals using the longest declared names.
    pub fn parse_word(&self, text: &str) -> Option<Vec<TermId>> {
        if text == "<eps>" || text == "eps" {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .terminals
                .iter()
                .enumerate()
                .filter(|(_, name)| !name.is_empty() && rest.starts_with(name.as_str()))
                .max_by_key(|(_, name)| name.len())?;
            out.push(TermId(best.0 as u32));
            rest = &rest[best.1.len()..];
        }
        Some(out)
    }

    pub fn render_production(&self, p: &Production) -> String {
        let mut s = format!("({}", self.state_name(p.from));
        if !p.guard.is_empty() {
            let g: String = p.guard.iter().map(|g| g.symbol()).collect();
            s.push_str(&format!(", {g}"));
        }
        s.push_str(&format!(", {}) -> ({}", self.nt_name(p.lhs), self.state_name(p.to)));
        if !p.update.is_empty() {
            let u: Vec<String> = p.update.iter().map(|u| format_update(*u)).collect();
            s.push_str(&format!(", {}", u.join(",")));
        }
        s.push_str(&format!(", {})", self.render_form(&p.rhs)));
        s
    }

    pub fn v2_position(&self, n: NtId) -> Option<usize> {
        self.control.as_ref().and_then(|c| c.position_in_v2(n))
    }

    pub fn is_v2(&self, n: NtId) -> bool {
        self.v2_position(n).is_some()
    }

    /// Structural equality ignoring production labels.
    pub fn same_structure(&self, other: &StateGrammar) -> bool {
        let strip = |g: &StateGrammar| {
            let mut g = g.clone();
            for p in &mut g.productions {
                p.label.clear();
            }
            g
        };
        strip(self) == strip(other)
    }

    /// Number of productions plus the total length of right-hand sides.
    pub fn size(&self) -> usize {
        self.productions.iter().map(|p| 1 + p.rhs.len()).sum()
    }
}

pub fn format_update(u: i64) -> String {
    match u {
        0 => "0".to_string(),
        u if u > 0 => format!("+{u}"),
        u => format!("{u}"),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("rule `{label}`: guard arity {got}, expected {expected}")]
    GuardArity { label: String, got: usize, expected: usize },
    #[error("rule `{label}`: update arity {got}, expected {expected}")]
    UpdateArity { label: String, got: usize, expected: usize },
    #[error("grammar has no states")]
    NoStates,
}

#[derive(Clone, Debug)]
struct PendingRule {
    label: Option<String>,
    from: String,
    guard: Vec<Guard>,
    lhs: String,
    to: String,
    update: Vec<i64>,
    rhs: Vec<String>,
}

/// Name-based construction of a [`StateGrammar`]. Names are resolved when
/// [`GrammarBuilder::build`] runs; rule right-hand sides are whitespace
/// separated symbol names, with the empty string standing for λ.
#[derive(Clone, Debug)]
pub struct GrammarBuilder {
    nonterminals: Vec<String>,
    terminals: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    finals: Vec<String>,
    axiom: Option<String>,
    counters: CounterSpec,
    control: Option<(Vec<String>, CcfgsVariant)>,
    acceptance: Option<Acceptance>,
    rules: Vec<PendingRule>,
}

impl Default for GrammarBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GrammarBuilder {
    pub fn new() -> Self {
        GrammarBuilder {
            nonterminals: Vec::new(),
            terminals: Vec::new(),
            states: Vec::new(),
            initial: None,
            finals: Vec::new(),
            axiom: None,
            counters: CounterSpec::none(),
            control: None,
            acceptance: None,
            rules: Vec::new(),
        }
    }

    fn push_unique(list: &mut Vec<String>, name: &str) {
        if !list.iter().any(|n| n == name) {
            list.push(name.to_string());
        }
    }

    pub fn nonterminals<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for n in names {
            Self::push_unique(&mut self.nonterminals, n.as_ref());
        }
        self
    }

    pub fn terminals<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for n in names {
            Self::push_unique(&mut self.terminals, n.as_ref());
        }
        self
    }

    pub fn states<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for n in names {
            Self::push_unique(&mut self.states, n.as_ref());
        }
        self
    }

    pub fn initial(mut self, q: &str) -> Self {
        self.initial = Some(q.to_string());
        self
    }

    pub fn finals<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for n in names {
            Self::push_unique(&mut self.finals, n.as_ref());
        }
        self
    }

    pub fn axiom(mut self, s: &str) -> Self {
        self.axiom = Some(s.to_string());
        self
    }

    pub fn counters(mut self, spec: CounterSpec) -> Self {
        self.counters = spec;
        self
    }

    pub fn acceptance(mut self, a: Acceptance) -> Self {
        self.acceptance = Some(a);
        self
    }

    pub fn control<S: AsRef<str>>(
        mut self,
        v2: impl IntoIterator<Item = S>,
        variant: CcfgsVariant,
    ) -> Self {
        self.control = Some((v2.into_iter().map(|s| s.as_ref().to_string()).collect(), variant));
        self
    }

    /// Counter-free rule `(from, lhs) -> (to, rhs)`.
    pub fn rule(self, from: &str, lhs: &str, to: &str, rhs: &str) -> Self {
        let k = self.counters.count;
        self.counter_rule(from, &vec![Guard::Any; k], lhs, to, &vec![0; k], rhs)
    }

    /// Rule with counter guard and update: `(from, guard, lhs) -> (to, update, rhs)`.
    pub fn counter_rule(
        mut self,
        from: &str,
        guard: &[Guard],
        lhs: &str,
        to: &str,
        update: &[i64],
        rhs: &str,
    ) -> Self {
        self.rules.push(PendingRule {
            label: None,
            from: from.to_string(),
            guard: guard.to_vec(),
            lhs: lhs.to_string(),
            to: to.to_string(),
            update: update.to_vec(),
            rhs: rhs.split_whitespace().map(str::to_string).collect(),
        });
        self
    }

    /// Same as [`Self::counter_rule`] with an explicit production label.
    #[allow(clippy::too_many_arguments)]
    pub fn labelled_rule(
        mut self,
        label: &str,
        from: &str,
        guard: &[Guard],
        lhs: &str,
        to: &str,
        update: &[i64],
        rhs: &[&str],
    ) -> Self {
        self.rules.push(PendingRule {
            label: Some(label.to_string()),
            from: from.to_string(),
            guard: guard.to_vec(),
            lhs: lhs.to_string(),
            to: to.to_string(),
            update: update.to_vec(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    /// Monotonic-counter rule `lhs -> (increments, rhs)` over the single
    /// implicit state.
    pub fn monotonic_rule(self, lhs: &str, increments: &[i64], rhs: &str) -> Self {
        let k = self.counters.count;
        self.counter_rule(MONOTONIC_STATE, &vec![Guard::Any; k], lhs, MONOTONIC_STATE, increments, rhs)
    }

    pub fn build(self) -> Result<StateGrammar, BuildError> {
        let mut states = self.states.clone();
        let monotonic = self.counters.is_monotonic();
        if monotonic && states.is_empty() {
            states.push(MONOTONIC_STATE.to_string());
        }
        if states.is_empty() {
            return Err(BuildError::NoStates);
        }
        let nt_ix: HashMap<&str, u32> =
            self.nonterminals.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
        let t_ix: HashMap<&str, u32> =
            self.terminals.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
        let q_ix: HashMap<&str, u32> =
            states.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();

        let state = |name: &str| {
            q_ix.get(name).map(|&i| StateId(i)).ok_or_else(|| BuildError::UnknownState(name.to_string()))
        };
        let nonterminal = |name: &str| {
            nt_ix
                .get(name)
                .map(|&i| NtId(i))
                .ok_or_else(|| BuildError::UnknownNonterminal(name.to_string()))
        };

        let initial = match &self.initial {
            Some(q) => state(q)?,
            None => StateId(0),
        };
        let finals = if monotonic && self.finals.is_empty() {
            states.iter().enumerate().map(|(i, _)| StateId(i as u32)).collect()
        } else {
            self.finals.iter().map(|q| state(q)).collect::<Result<BTreeSet<_>, _>>()?
        };
        let axiom = match &self.axiom {
            Some(s) => nonterminal(s)?,
            None => NtId(0),
        };

        let k = self.counters.count;
        let mut productions = Vec::with_capacity(self.rules.len());
        for (i, r) in self.rules.iter().enumerate() {
            let label = r.label.clone().unwrap_or_else(|| format!("p{}", i + 1));
            if r.guard.len() != k {
                return Err(BuildError::GuardArity { label, got: r.guard.len(), expected: k });
            }
            if r.update.len() != k {
                return Err(BuildError::UpdateArity { label, got: r.update.len(), expected: k });
            }
            let rhs = r
                .rhs
                .iter()
                .map(|s| {
                    if let Some(&n) = nt_ix.get(s.as_str()) {
                        Ok(Symbol::N(NtId(n)))
                    } else if let Some(&t) = t_ix.get(s.as_str()) {
                        Ok(Symbol::T(TermId(t)))
                    } else {
                        Err(BuildError::UnknownSymbol(s.clone()))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            productions.push(Production {
                label,
                from: state(&r.from)?,
                guard: r.guard.clone(),
                lhs: nonterminal(&r.lhs)?,
                to: state(&r.to)?,
                update: r.update.clone(),
                rhs,
            });
        }

        let control = match self.control {
            Some((v2names, variant)) => {
                let v2 = v2names.iter().map(|n| nonterminal(n)).collect::<Result<Vec<_>, _>>()?;
                let v1 = (0..self.nonterminals.len() as u32)
                    .map(NtId)
                    .filter(|n| !v2.contains(n))
                    .collect();
                Some(ControlPartition { v1, v2, variant })
            }
            None => None,
        };

        let acceptance = self.acceptance.unwrap_or(if monotonic {
            Acceptance::AllCountersEqual
        } else {
            Acceptance::FinalState
        });

        Ok(StateGrammar {
            nonterminals: self.nonterminals,
            terminals: self.terminals,
            states,
            productions,
            axiom,
            initial,
            finals,
            counters: self.counters,
            control,
            acceptance,
        })
    }
}

/// Name of the single implicit state of monotonic-counter grammars.
pub const MONOTONIC_STATE: &str = "q";

// ---------------------------------------------------------------------------
// Validation

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }

    fn push(&mut self, message: impl Into<String>) {
        self.violations.push(Violation { message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of the grammar model; violations are
/// reported as data.
pub fn validate(g: &StateGrammar) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nv = g.nonterminals.len();
    let nt = g.terminals.len();
    let nq = g.states.len();
    let k = g.counters.count;

    let mut seen: HashMap<&str, &'static str> = HashMap::new();
    for (names, kind) in [
        (&g.nonterminals, "nonterminal"),
        (&g.terminals, "terminal"),
        (&g.states, "state"),
    ] {
        let mut local = HashSet::new();
        for n in names {
            if !local.insert(n.as_str()) {
                report.push(format!("duplicate {kind} `{n}`"));
            }
            if let Some(prev) = seen.insert(n.as_str(), kind) {
                if prev != kind {
                    report.push(format!("`{n}` declared both as {prev} and {kind}"));
                }
            }
        }
    }

    if g.axiom.index() >= nv {
        report.push("axiom undeclared");
    }
    if g.initial.index() >= nq {
        report.push("initial state undeclared");
    }
    for q in &g.finals {
        if q.index() >= nq {
            report.push(format!("final state #{} undeclared", q.0));
        }
    }

    match &g.counters.discipline {
        Discipline::None => {
            if k != 0 {
                report.push("counter discipline none with nonzero counter count");
            }
        }
        Discipline::ReversalBounded(rs) => {
            if rs.len() != k {
                report.push(format!("{} reversal bounds for {k} counters", rs.len()));
            }
            if rs.iter().any(|&r| r == 0) {
                report.push("reversal bound must be positive");
            }
        }
        Discipline::Monotonic => {
            if g.states.len() != 1 {
                report.push("monotonic grammar must have exactly one state");
            }
        }
    }
    if g.counters.update_style == UpdateStyle::Generalized && !g.counters.is_reversal_bounded() {
        report.push("generalized updates require reversal-bounded counters");
    }
    let equal = g.acceptance == Acceptance::AllCountersEqual;
    if equal != g.counters.is_monotonic() {
        report.push("acceptance AllCountersEqual must coincide with monotonic counters");
    }

    for p in &g.productions {
        let l = &p.label;
        if p.from.index() >= nq || p.to.index() >= nq {
            report.push(format!("rule {l}: undeclared state"));
        }
        if p.lhs.index() >= nv {
            report.push(format!("rule {l}: undeclared nonterminal on left-hand side"));
        }
        for s in &p.rhs {
            let ok = match s {
                Symbol::T(t) => t.index() < nt,
                Symbol::N(n) => n.index() < nv,
            };
            if !ok {
                report.push(format!("rule {l}: undeclared symbol on right-hand side"));
            }
        }
        if p.guard.len() != k {
            report.push(format!("rule {l}: guard arity {} for {k} counters", p.guard.len()));
        }
        if p.update.len() != k {
            report.push(format!("rule {l}: update arity {} for {k} counters", p.update.len()));
        }
        for (j, (&gd, &u)) in p.guard.iter().zip(&p.update).enumerate() {
            if gd == Guard::Zero && u < 0 {
                report.push(format!("rule {l}: decrement of counter {} guarded zero", j + 1));
            }
            match (&g.counters.discipline, g.counters.update_style) {
                (Discipline::Monotonic, _) => {
                    if u < 0 {
                        report.push(format!("rule {l}: negative update in monotonic grammar"));
                    } else if u > 1 {
                        report.push(format!("rule {l}: monotonic increments are 0 or +1"));
                    }
                }
                (_, UpdateStyle::Unit) => {
                    if !(-1..=1).contains(&u) {
                        report.push(format!("rule {l}: unit update out of range"));
                    }
                }
                (_, UpdateStyle::Generalized) => {
                    if u < -1 {
                        report.push(format!("rule {l}: generalized decrement must be exactly 1"));
                    }
                }
            }
        }
    }

    if let Some(c) = &g.control {
        let v1: HashSet<NtId> = c.v1.iter().copied().collect();
        let v2: HashSet<NtId> = c.v2.iter().copied().collect();
        if v1.len() != c.v1.len() || v2.len() != c.v2.len() {
            report.push("control partition lists a nonterminal twice");
        }
        if !v1.is_disjoint(&v2) {
            report.push("control partition V1 and V2 intersect");
        }
        if v1.len() + v2.len() != nv || (0..nv as u32).any(|i| !v1.contains(&NtId(i)) && !v2.contains(&NtId(i))) {
            report.push("control partition does not cover V");
        }
        if !v1.contains(&g.axiom) {
            report.push("axiom not in V1");
        }
        if k != 0 {
            report.push("controlled grammars carry no counters");
        }
        for p in &g.productions {
            if !v2.contains(&p.lhs) {
                continue;
            }
            let ok = p.rhs.iter().all(|s| match (c.variant, s) {
                (_, Symbol::N(n)) if v2.contains(n) => true,
                (CcfgsVariant::TerminalsInV2, Symbol::T(_)) => true,
                (CcfgsVariant::NonterminalsInV2, Symbol::N(_)) => true,
                _ => false,
            });
            if !ok {
                report.push(format!(
                    "rule {}: V2 right-hand side outside the {:?} shape",
                    p.label, c.variant
                ));
            }
        }
    }

    report
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    RightLinear,
    Linear,
    ContextFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GrammarClass {
    pub shape: Shape,
    pub lambda_free: bool,
}

impl fmt::Display for GrammarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match self.shape {
            Shape::RightLinear => "right_linear",
            Shape::Linear => "linear",
            Shape::ContextFree => "context_free",
        };
        write!(f, "{shape} lambda_free={}", self.lambda_free)
    }
}

/// Shape of a single right-hand side.
pub fn rhs_shape(rhs: &[Symbol]) -> Shape {
    let positions: Vec<usize> =
        rhs.iter().enumerate().filter(|(_, s)| s.is_nonterminal()).map(|(i, _)| i).collect();
    match positions.as_slice() {
        [] => Shape::RightLinear,
        [i] if *i + 1 == rhs.len() => Shape::RightLinear,
        [_] => Shape::Linear,
        _ => Shape::ContextFree,
    }
}

pub fn is_linear_rhs(rhs: &[Symbol]) -> bool {
    rhs_shape(rhs) <= Shape::Linear
}

pub fn is_right_linear_rhs(rhs: &[Symbol]) -> bool {
    rhs_shape(rhs) == Shape::RightLinear
}

pub fn classify(g: &StateGrammar) -> GrammarClass {
    let shape = g.productions.iter().map(|p| rhs_shape(&p.rhs)).max().unwrap_or(Shape::RightLinear);
    let lambda_free = g.productions.iter().all(|p| !p.rhs.is_empty());
    GrammarClass { shape, lambda_free }
}
