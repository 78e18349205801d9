//! Derivation relations (free, leftmost, leftish, circular, controlled),
//! bounded language enumeration and membership search with witnesses.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::grammar::{
    Acceptance, CounterSpec, Discipline, Guard, NtId, Production, StateGrammar, StateId, Symbol, TermId,
};

pub type Word = Vec<TermId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    NotStarted,
    Increasing,
    Decreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DerivationConfig {
    pub state: StateId,
    pub counters: Vec<u64>,
    pub phases: Vec<Phase>,
    pub reversals: Vec<u32>,
    pub form: Vec<Symbol>,
    /// Erase-once history for controlled grammars: `erased[i]` is set once a
    /// production erasing `C_{i+1}` fired. Empty when not tracked.
    pub erased: Vec<bool>,
}

impl DerivationConfig {
    pub fn initial(g: &StateGrammar) -> Self {
        let k = g.counters.count;
        DerivationConfig {
            state: g.initial,
            counters: vec![0; k],
            phases: vec![Phase::NotStarted; k],
            reversals: vec![0; k],
            form: vec![Symbol::N(g.axiom)],
            erased: Vec::new(),
        }
    }

    pub fn with_form(g: &StateGrammar, state: StateId, form: Vec<Symbol>) -> Self {
        DerivationConfig { state, form, ..Self::initial(g) }
    }

    pub fn nonterminal_count(&self) -> usize {
        self.form.iter().filter(|s| s.is_nonterminal()).count()
    }

    pub fn terminal_count(&self) -> usize {
        self.form.len() - self.nonterminal_count()
    }

    pub fn is_terminal(&self) -> bool {
        self.form.iter().all(|s| !s.is_nonterminal())
    }

    pub fn word(&self) -> Option<Word> {
        self.form
            .iter()
            .map(|s| match s {
                Symbol::T(t) => Some(*t),
                Symbol::N(_) => None,
            })
            .collect()
    }

    pub fn render(&self, g: &StateGrammar) -> String {
        let mut s = g.state_name(self.state).to_string();
        if !self.counters.is_empty() {
            let c: Vec<String> = self.counters.iter().map(|c| c.to_string()).collect();
            s.push_str(&format!(" [{}]", c.join(",")));
        }
        s.push(' ');
        s.push_str(&g.render_form(&self.form));
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivationMode {
    Free,
    Leftmost,
    Leftish,
    Circular,
    Controlled,
}

impl fmt::Display for DerivationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DerivationMode::Free => "free",
            DerivationMode::Leftmost => "leftmost",
            DerivationMode::Leftish => "leftish",
            DerivationMode::Circular => "circular",
            DerivationMode::Controlled => "controlled",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for DerivationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(DerivationMode::Free),
            "leftmost" | "lm" => Ok(DerivationMode::Leftmost),
            "leftish" | "lt" => Ok(DerivationMode::Leftish),
            "circular" => Ok(DerivationMode::Circular),
            "controlled" => Ok(DerivationMode::Controlled),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Caps on a bounded search. All caps hold simultaneously.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationBudget {
    pub max_steps: usize,
    pub max_form_len: usize,
    pub max_counter: u64,
    pub max_words: Option<usize>,
    /// Terminal-count cap on sentential forms. Terminals are never
    /// rewritten, so this keeps exactly the words of at most this length.
    pub max_word_len: Option<usize>,
}

impl ExplorationBudget {
    pub fn new(max_steps: usize, max_form_len: usize, max_counter: u64) -> Self {
        ExplorationBudget { max_steps, max_form_len, max_counter, max_words: None, max_word_len: None }
    }

    pub fn words_up_to(mut self, len: usize) -> Self {
        self.max_word_len = Some(len);
        self
    }

    pub fn max_words(mut self, n: usize) -> Self {
        self.max_words = Some(n);
        self
    }

    pub fn is_valid(&self) -> bool {
        self.max_steps >= 1
            && self.max_form_len >= 1
            && self.max_counter >= 1
            && self.max_words.is_none_or(|n| n >= 1)
    }
}

/// What was applied between two consecutive configurations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StepLabel {
    Rule(usize),
    /// One circular sweep: the productions used, left to right.
    Sweep(Vec<usize>),
}

impl StepLabel {
    pub fn render(&self, g: &StateGrammar) -> String {
        match self {
            StepLabel::Rule(i) => g.productions[*i].label.clone(),
            StepLabel::Sweep(rs) => {
                rs.iter().map(|&i| g.productions[i].label.as_str()).collect::<Vec<_>>().join("+")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub start: DerivationConfig,
    pub steps: Vec<(StepLabel, DerivationConfig)>,
}

impl Derivation {
    pub fn configs(&self) -> impl Iterator<Item = &DerivationConfig> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, c)| c))
    }

    pub fn last(&self) -> &DerivationConfig {
        self.steps.last().map(|(_, c)| c).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Largest number of nonterminal occurrences in any sentential form.
    pub fn index(&self) -> usize {
        self.configs().map(|c| c.nonterminal_count()).max().unwrap_or(0)
    }

    pub fn labels(&self, g: &StateGrammar) -> Vec<String> {
        self.steps.iter().map(|(l, _)| l.render(g)).collect()
    }

    /// One configuration per line, each annotated with the step that produced it.
    pub fn trace(&self, g: &StateGrammar) -> String {
        let mut out = format!("{}\n", self.start.render(g));
        for (label, c) in &self.steps {
            out.push_str(&format!("{}    <- {}\n", c.render(g), label.render(g)));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes(Derivation),
    NoWithinBudget,
}

impl Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriveError {
    #[error("mode {mode} is not defined for this grammar: {reason}")]
    ModeInvalid { mode: DerivationMode, reason: &'static str },
    #[error("circular sweep needs at least one nonterminal occurrence")]
    NothingToSweep,
    #[error("invalid exploration budget")]
    BadBudget,
    #[error("word contains a symbol outside the terminal alphabet")]
    ForeignWord,
}

pub fn check_mode(g: &StateGrammar, mode: DerivationMode) -> Result<(), DeriveError> {
    match mode {
        DerivationMode::Leftish | DerivationMode::Circular if g.counters.count > 0 => {
            Err(DeriveError::ModeInvalid { mode, reason: "leftish and circular modes are counter-free only" })
        }
        DerivationMode::Controlled if g.control.is_none() => {
            Err(DeriveError::ModeInvalid { mode, reason: "controlled mode needs a V1/V2 partition" })
        }
        _ => Ok(()),
    }
}

/// Productions grouped by `(state, lhs)`.
#[derive(Clone, Debug)]
pub struct RuleIndex {
    by_state_lhs: HashMap<(StateId, NtId), Vec<usize>>,
}

impl RuleIndex {
    pub fn new(g: &StateGrammar) -> Self {
        let mut by_state_lhs: HashMap<(StateId, NtId), Vec<usize>> = HashMap::new();
        for (i, p) in g.productions.iter().enumerate() {
            by_state_lhs.entry((p.from, p.lhs)).or_default().push(i);
        }
        RuleIndex { by_state_lhs }
    }

    pub fn rules(&self, q: StateId, a: NtId) -> &[usize] {
        self.by_state_lhs.get(&(q, a)).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Counter effect of one production, or `None` when a guard fails, a counter
/// would go negative, a monotonic counter would decrease, or a reversal bound
/// would be exceeded.
pub fn apply_counters(
    g: &StateGrammar,
    p: &Production,
    counters: &[u64],
    phases: &[Phase],
    reversals: &[u32],
) -> Option<(Vec<u64>, Vec<Phase>, Vec<u32>)> {
    counter_step(&g.counters, &p.guard, &p.update, counters, phases, reversals)
}

/// The same check for any guarded update under a counter specification;
/// shared with the machine simulator.
pub fn counter_step(
    spec: &CounterSpec,
    guard: &[Guard],
    update: &[i64],
    counters: &[u64],
    phases: &[Phase],
    reversals: &[u32],
) -> Option<(Vec<u64>, Vec<Phase>, Vec<u32>)> {
    let mut c = counters.to_vec();
    let mut ph = phases.to_vec();
    let mut rv = reversals.to_vec();
    for j in 0..c.len() {
        if !guard[j].admits(c[j]) {
            return None;
        }
        let u = update[j];
        if u > 0 {
            c[j] += u as u64;
            if ph[j] == Phase::Decreasing {
                rv[j] += 1;
            }
            ph[j] = Phase::Increasing;
        } else if u < 0 {
            if matches!(spec.discipline, Discipline::Monotonic) {
                return None;
            }
            let d = (-u) as u64;
            if c[j] < d {
                return None;
            }
            c[j] -= d;
            if ph[j] == Phase::Increasing {
                rv[j] += 1;
            }
            ph[j] = Phase::Decreasing;
        }
        if let Some(r) = spec.reversal_bound(j) {
            if rv[j] > r {
                return None;
            }
        }
    }
    Some((c, ph, rv))
}

fn rewrite(form: &[Symbol], pos: usize, rhs: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(form.len() + rhs.len());
    out.extend_from_slice(&form[..pos]);
    out.extend_from_slice(rhs);
    out.extend_from_slice(&form[pos + 1..]);
    out
}

/// Applies production `pi` at position `pos`, honouring guards and the
/// erase-once history when tracked.
fn apply_at(
    g: &StateGrammar,
    c: &DerivationConfig,
    pi: usize,
    pos: usize,
) -> Option<DerivationConfig> {
    let p = &g.productions[pi];
    let (counters, phases, reversals) = apply_counters(g, p, &c.counters, &c.phases, &c.reversals)?;
    let mut erased = c.erased.clone();
    if !erased.is_empty() {
        let control = g.control.as_ref()?;
        for (i, &cn) in control.v2.iter().enumerate() {
            if erased[i] && p.rhs_contains(cn) {
                return None;
            }
        }
        if let Some(i) = control.position_in_v2(p.lhs) {
            if !p.rhs_contains(p.lhs) {
                erased[i] = true;
            }
        }
    }
    Some(DerivationConfig {
        state: p.to,
        counters,
        phases,
        reversals,
        form: rewrite(&c.form, pos, &p.rhs),
        erased,
    })
}

/// Occurrence positions each mode may rewrite, paired with the rules to try there.
fn rewrite_sites<'a>(
    g: &StateGrammar,
    index: &'a RuleIndex,
    mode: DerivationMode,
    c: &DerivationConfig,
) -> Vec<(usize, &'a [usize])> {
    let occurrences = c.form.iter().enumerate().filter_map(|(i, s)| s.nonterminal().map(|n| (i, n)));
    match mode {
        DerivationMode::Free => occurrences.map(|(i, n)| (i, index.rules(c.state, n))).collect(),
        DerivationMode::Leftmost => {
            occurrences.take(1).map(|(i, n)| (i, index.rules(c.state, n))).collect()
        }
        DerivationMode::Leftish => occurrences
            .map(|(i, n)| (i, index.rules(c.state, n)))
            .find(|(_, rules)| !rules.is_empty())
            .into_iter()
            .collect(),
        DerivationMode::Controlled => {
            let control = g.control.as_ref().expect("checked by check_mode");
            let mut sites = Vec::new();
            let mut seen_v1 = false;
            for (i, n) in occurrences {
                if control.is_v2(n) {
                    sites.push((i, index.rules(c.state, n)));
                } else if !seen_v1 {
                    seen_v1 = true;
                    sites.push((i, index.rules(c.state, n)));
                }
            }
            sites
        }
        DerivationMode::Circular => unreachable!("circular steps are sweeps"),
    }
}

fn successors_with(
    g: &StateGrammar,
    index: &RuleIndex,
    mode: DerivationMode,
    c: &DerivationConfig,
) -> Vec<(DerivationConfig, StepLabel)> {
    if mode == DerivationMode::Circular {
        if c.is_terminal() {
            return Vec::new();
        }
        return sweep_with(g, index, c).into_iter().map(|(cfg, rules)| (cfg, StepLabel::Sweep(rules))).collect();
    }
    let mut out = Vec::new();
    for (pos, rules) in rewrite_sites(g, index, mode, c) {
        for &pi in rules {
            if let Some(next) = apply_at(g, c, pi, pos) {
                out.push((next, StepLabel::Rule(pi)));
            }
        }
    }
    out
}

/// Exact one-step successor set. For circular mode one step is a full sweep.
pub fn step(
    g: &StateGrammar,
    mode: DerivationMode,
    c: &DerivationConfig,
) -> Result<Vec<(DerivationConfig, StepLabel)>, DeriveError> {
    check_mode(g, mode)?;
    let index = RuleIndex::new(g);
    Ok(successors_with(g, &index, mode, c))
}

fn sweep_with(g: &StateGrammar, index: &RuleIndex, c: &DerivationConfig) -> Vec<(DerivationConfig, Vec<usize>)> {
    // Segments: v0 A1 v1 ... An vn.
    let mut segments: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut nts = Vec::new();
    for &s in &c.form {
        match s {
            Symbol::N(n) => {
                nts.push(n);
                segments.push(Vec::new());
            }
            t => segments.last_mut().unwrap().push(t),
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut form = segments[0].clone();
    fn go(
        g: &StateGrammar,
        index: &RuleIndex,
        nts: &[NtId],
        segments: &[Vec<Symbol>],
        i: usize,
        state: StateId,
        form: &mut Vec<Symbol>,
        chosen: &mut Vec<usize>,
        base: &DerivationConfig,
        out: &mut Vec<(DerivationConfig, Vec<usize>)>,
    ) {
        if i == nts.len() {
            out.push((
                DerivationConfig { state, form: form.clone(), ..base.clone() },
                chosen.clone(),
            ));
            return;
        }
        for &pi in index.rules(state, nts[i]) {
            let p = &g.productions[pi];
            let mark = form.len();
            form.extend_from_slice(&p.rhs);
            form.extend_from_slice(&segments[i + 1]);
            chosen.push(pi);
            go(g, index, nts, segments, i + 1, p.to, form, chosen, base, out);
            chosen.pop();
            form.truncate(mark);
        }
    }
    go(g, index, &nts, &segments, 0, c.state, &mut form, &mut chosen, c, &mut out);
    out
}

/// All configurations reachable by one circular sweep over every
/// nonterminal occurrence present in `c`.
pub fn sweep_circular(g: &StateGrammar, c: &DerivationConfig) -> Result<Vec<DerivationConfig>, DeriveError> {
    check_mode(g, DerivationMode::Circular)?;
    if c.is_terminal() {
        return Err(DeriveError::NothingToSweep);
    }
    let index = RuleIndex::new(g);
    let mut out: Vec<DerivationConfig> = sweep_with(g, &index, c).into_iter().map(|(c, _)| c).collect();
    out.sort_by(|a, b| a.form.cmp(&b.form).then(a.state.cmp(&b.state)));
    out.dedup();
    Ok(out)
}

pub fn is_accepting(g: &StateGrammar, c: &DerivationConfig) -> bool {
    if !c.is_terminal() || !g.is_final(c.state) {
        return false;
    }
    match g.acceptance {
        Acceptance::FinalState => true,
        Acceptance::FinalStateZeroCounters => c.counters.iter().all(|&v| v == 0),
        Acceptance::AllCountersEqual => c.counters.windows(2).all(|w| w[0] == w[1]),
    }
}

fn within_budget(b: &ExplorationBudget, c: &DerivationConfig) -> bool {
    c.form.len() <= b.max_form_len
        && c.counters.iter().all(|&v| v <= b.max_counter)
        && b.max_word_len.is_none_or(|l| c.terminal_count() <= l)
}

/// How erase-once is enforced in controlled mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EraseOnce {
    /// Expand states with `{+,-}^k` flags first, then derive without history.
    StateExpansion,
    /// Derive on the grammar as given, recording erasures in the configuration.
    HistoryFlags,
}

/// Result of a bounded breadth-first exploration.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub configs: Vec<DerivationConfig>,
    parents: Vec<Option<(usize, StepLabel)>>,
    pub accepted: Vec<usize>,
    pub truncated: bool,
}

impl Exploration {
    pub fn derivation_to(&self, mut i: usize) -> Derivation {
        let mut steps = Vec::new();
        while let Some((parent, label)) = &self.parents[i] {
            steps.push((label.clone(), self.configs[i].clone()));
            i = *parent;
        }
        steps.reverse();
        Derivation { start: self.configs[i].clone(), steps }
    }

    pub fn words(&self) -> BTreeSet<Word> {
        self.accepted.iter().filter_map(|&i| self.configs[i].word()).collect()
    }
}

/// Optional target word for membership pruning.
struct Target<'w> {
    word: &'w [TermId],
}

impl Target<'_> {
    /// Terminals left of the first nonterminal must be a prefix of the
    /// target and terminals right of the last one a suffix.
    fn compatible(&self, form: &[Symbol]) -> bool {
        let mut prefix = 0;
        for s in form {
            match s {
                Symbol::T(t) => {
                    if self.word.get(prefix) != Some(t) {
                        return false;
                    }
                    prefix += 1;
                }
                Symbol::N(_) => break,
            }
        }
        if prefix == form.len() {
            return prefix == self.word.len();
        }
        let mut suffix = 0;
        for s in form.iter().rev() {
            match s {
                Symbol::T(t) => {
                    if self.word.len() < suffix + 1 || self.word[self.word.len() - 1 - suffix] != *t {
                        return false;
                    }
                    suffix += 1;
                }
                Symbol::N(_) => break,
            }
        }
        let terminals = form.iter().filter(|s| !s.is_nonterminal()).count();
        terminals <= self.word.len() && prefix + suffix <= self.word.len()
    }
}

fn explore_from(
    g: &StateGrammar,
    mode: DerivationMode,
    budget: &ExplorationBudget,
    start: DerivationConfig,
    target: Option<Target<'_>>,
) -> Exploration {
    let index = RuleIndex::new(g);
    let mut seen: HashMap<DerivationConfig, usize> = HashMap::new();
    let mut configs = vec![start.clone()];
    let mut parents = vec![None];
    let mut depth = vec![0usize];
    let mut accepted = Vec::new();
    let mut words: BTreeSet<Word> = BTreeSet::new();
    let mut truncated = false;
    seen.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let c = configs[i].clone();
        if is_accepting(g, &c) {
            let w = c.word().expect("accepting forms are terminal");
            let hit = match &target {
                Some(t) => t.word == w.as_slice(),
                None => true,
            };
            if hit {
                accepted.push(i);
                words.insert(w);
                if target.is_some() {
                    break;
                }
                if budget.max_words.is_some_and(|n| words.len() >= n) {
                    truncated = true;
                    break;
                }
            }
        }
        if depth[i] >= budget.max_steps {
            continue;
        }
        for (next, label) in successors_with(g, &index, mode, &c) {
            if !within_budget(budget, &next) {
                continue;
            }
            if let Some(t) = &target {
                if !t.compatible(&next.form) {
                    continue;
                }
            }
            if seen.contains_key(&next) {
                continue;
            }
            let j = configs.len();
            seen.insert(next.clone(), j);
            configs.push(next);
            parents.push(Some((i, label)));
            depth.push(depth[i] + 1);
            queue.push_back(j);
        }
    }
    Exploration { configs, parents, accepted, truncated }
}

fn start_config(g: &StateGrammar, mode: DerivationMode, erase: EraseOnce) -> DerivationConfig {
    let mut c = DerivationConfig::initial(g);
    if mode == DerivationMode::Controlled && erase == EraseOnce::HistoryFlags {
        c.erased = vec![false; g.control.as_ref().map_or(0, |p| p.v2.len())];
    }
    c
}

/// Runs the bounded search and returns every explored configuration.
pub fn explore(
    g: &StateGrammar,
    mode: DerivationMode,
    budget: &ExplorationBudget,
    erase: EraseOnce,
) -> Result<Exploration, DeriveError> {
    check_mode(g, mode)?;
    if !budget.is_valid() {
        return Err(DeriveError::BadBudget);
    }
    Ok(explore_from(g, mode, budget, start_config(g, mode, erase), None))
}

/// Terminal words with an accepting derivation inside the budget.
///
/// Controlled mode enforces erase-once by state expansion; see
/// [`enumerate_controlled`] for the history-flag route.
pub fn enumerate(
    g: &StateGrammar,
    mode: DerivationMode,
    budget: &ExplorationBudget,
) -> Result<BTreeSet<Word>, DeriveError> {
    if mode == DerivationMode::Controlled {
        return enumerate_controlled(g, budget, EraseOnce::StateExpansion);
    }
    Ok(explore(g, mode, budget, EraseOnce::HistoryFlags)?.words())
}

pub fn enumerate_controlled(
    g: &StateGrammar,
    budget: &ExplorationBudget,
    erase: EraseOnce,
) -> Result<BTreeSet<Word>, DeriveError> {
    check_mode(g, DerivationMode::Controlled)?;
    match erase {
        EraseOnce::HistoryFlags => Ok(explore(g, DerivationMode::Controlled, budget, erase)?.words()),
        EraseOnce::StateExpansion => {
            let expanded = crate::transform::expand_ccfgs_states(g)
                .expect("controlled grammars always expand");
            // The expanded grammar's state set carries the flags; mapping
            // terminals back is the identity.
            Ok(explore(&expanded, DerivationMode::Controlled, budget, EraseOnce::StateExpansion)?.words())
        }
    }
}

/// Membership search. Controlled mode uses history flags so the witness
/// replays on `g` itself.
pub fn member(
    g: &StateGrammar,
    mode: DerivationMode,
    w: &[TermId],
    budget: &ExplorationBudget,
) -> Result<Membership, DeriveError> {
    check_mode(g, mode)?;
    if !budget.is_valid() {
        return Err(DeriveError::BadBudget);
    }
    if w.iter().any(|t| t.index() >= g.terminals.len()) {
        return Err(DeriveError::ForeignWord);
    }
    let start = start_config(g, mode, EraseOnce::HistoryFlags);
    let ex = explore_from(g, mode, budget, start, Some(Target { word: w }));
    Ok(match ex.accepted.first() {
        Some(&i) => Membership::Yes(ex.derivation_to(i)),
        None => Membership::NoWithinBudget,
    })
}

/// Checks that every step of `d` is a one-step successor under `mode` and
/// that the derivation ends in an accepting configuration.
pub fn replay(g: &StateGrammar, mode: DerivationMode, d: &Derivation) -> bool {
    let index = RuleIndex::new(g);
    let mut cur = d.start.clone();
    for (label, next) in &d.steps {
        let ok = successors_with(g, &index, mode, &cur).iter().any(|(c, l)| c == next && l == label);
        if !ok {
            return false;
        }
        cur = next.clone();
    }
    is_accepting(g, &cur)
}

/// Smallest index over accepting derivations of `w` within the budget,
/// found by restricting the search to forms with at most `m` nonterminals
/// for increasing `m`.
pub fn min_index_witness(
    g: &StateGrammar,
    mode: DerivationMode,
    w: &[TermId],
    budget: &ExplorationBudget,
    max_index: usize,
) -> Result<Option<Derivation>, DeriveError> {
    check_mode(g, mode)?;
    for m in 1..=max_index {
        let restricted = IndexRestricted { inner: g, m };
        if let Some(d) = restricted.search(mode, w, budget) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

struct IndexRestricted<'g> {
    inner: &'g StateGrammar,
    m: usize,
}

impl IndexRestricted<'_> {
    fn search(&self, mode: DerivationMode, w: &[TermId], budget: &ExplorationBudget) -> Option<Derivation> {
        let g = self.inner;
        let index = RuleIndex::new(g);
        let start = start_config(g, mode, EraseOnce::HistoryFlags);
        let target = Target { word: w };
        let mut seen: HashMap<DerivationConfig, usize> = HashMap::new();
        let mut configs = vec![start.clone()];
        let mut parents: Vec<Option<(usize, StepLabel)>> = vec![None];
        let mut depth = vec![0usize];
        seen.insert(start, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let c = configs[i].clone();
            if is_accepting(g, &c) && c.word().as_deref() == Some(w) {
                let ex = Exploration { configs, parents, accepted: vec![i], truncated: false };
                return Some(ex.derivation_to(i));
            }
            if depth[i] >= budget.max_steps {
                continue;
            }
            for (next, label) in successors_with(g, &index, mode, &c) {
                if next.nonterminal_count() > self.m
                    || !within_budget(budget, &next)
                    || !target.compatible(&next.form)
                    || seen.contains_key(&next)
                {
                    continue;
                }
                let j = configs.len();
                seen.insert(next.clone(), j);
                configs.push(next);
                parents.push(Some((i, label)));
                depth.push(depth[i] + 1);
                queue.push_back(j);
            }
        }
        None
    }
}

/// Renders a word set sorted by spelling, λ as `<eps>`.
pub fn render_words(g: &StateGrammar, words: &BTreeSet<Word>) -> Vec<String> {
    let mut out: Vec<String> = words
        .iter()
        .map(|w| if w.is_empty() { "<eps>".to_string() } else { g.render_word(w) })
        .collect();
    out.sort();
    out
}

/// Guard-free applicability used by tests: does `p` match the state and lhs?
pub fn matches_state(p: &Production, state: StateId, lhs: NtId) -> bool {
    p.from == state && p.lhs == lhs
}

