//! One-way nondeterministic machines with reversal-bounded counters and an
//! optional pushdown (NCM / NPCM), their bounded simulation, and the
//! grammar-to-machine constructions.

mod construct;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::derive::{counter_step, ExplorationBudget, Phase, Word};
use crate::grammar::{CounterSpec, Guard, TermId};

pub use construct::{ccfgs_to_npcm, cfgsc_lm_to_npcm, lgsc_to_npcm1, rlgsc_to_ncm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushdown {
    pub symbols: Vec<String>,
    pub bottom: usize,
    /// Bound on push/pop alternations, `None` for an unrestricted stack.
    pub reversal_bound: Option<u32>,
}

/// `(from, read, guard, top) -> (to, update, push)`. A present `top` is
/// popped; `push` goes on with its leftmost symbol on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: String,
    pub from: usize,
    pub read: Option<TermId>,
    pub guard: Vec<Guard>,
    pub top: Option<usize>,
    pub to: usize,
    pub update: Vec<i64>,
    pub push: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub counters: CounterSpec,
    pub pushdown: Option<Pushdown>,
    pub transitions: Vec<Transition>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine has a pushdown; use bounded simulation instead")]
    HasPushdown,
    #[error("{0}")]
    Construction(String),
    #[error("budget bounds must be at least 1")]
    BadBudget,
}

impl CounterMachine {
    pub fn is_stackless(&self) -> bool {
        self.pushdown.is_none()
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn render_word(&self, w: &[TermId]) -> String {
        w.iter().map(|t| self.inputs[t.index()].as_str()).collect()
    }

    fn stack_name(&self, s: usize) -> &str {
        self.pushdown.as_ref().map_or("?", |p| p.symbols[s].as_str())
    }

    pub fn render_config(&self, c: &MachineConfig) -> String {
        let mut out = format!("[{}", self.states[c.state]);
        if !c.counters.is_empty() {
            let cs: Vec<String> = c.counters.iter().map(u64::to_string).collect();
            out.push_str(&format!(", ({})", cs.join(",")));
        }
        if self.pushdown.is_some() {
            let st: Vec<&str> = c.stack.iter().rev().map(|&s| self.stack_name(s)).collect();
            out.push_str(&format!(", {}", st.join(" ")));
        }
        out.push(']');
        out
    }

    /// Parses an input word, accepting either juxtaposed names or names
    /// separated by spaces.
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        let names: Vec<String> = self.inputs.clone();
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            let mut rest = chunk;
            while !rest.is_empty() {
                let (i, n) = names
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| !n.is_empty() && rest.starts_with(n.as_str()))
                    .max_by_key(|(_, n)| n.len())?;
                out.push(TermId(i as u32));
                rest = &rest[n.len()..];
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub state: usize,
    /// Input read so far; left empty when reads are treated as ε-moves.
    pub consumed: Vec<TermId>,
    pub counters: Vec<u64>,
    pub phases: Vec<Phase>,
    pub reversals: Vec<u32>,
    /// Bottom first, top last.
    pub stack: Vec<usize>,
    pub stack_phase: Phase,
    pub stack_reversals: u32,
}

impl MachineConfig {
    pub fn initial(m: &CounterMachine) -> Self {
        let k = m.counters.count;
        MachineConfig {
            state: m.initial,
            consumed: Vec::new(),
            counters: vec![0; k],
            phases: vec![Phase::NotStarted; k],
            reversals: vec![0; k],
            stack: m.pushdown.as_ref().map(|p| vec![p.bottom]).unwrap_or_default(),
            stack_phase: Phase::NotStarted,
            stack_reversals: 0,
        }
    }
}

/// A run: start configuration plus (transition index, configuration) steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub start: MachineConfig,
    pub steps: Vec<(usize, MachineConfig)>,
}

impl Run {
    pub fn configs(&self) -> impl Iterator<Item = &MachineConfig> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, c)| c))
    }

    pub fn last(&self) -> &MachineConfig {
        self.steps.last().map_or(&self.start, |(_, c)| c)
    }

    /// Input read along the run.
    pub fn word(&self, m: &CounterMachine) -> Word {
        self.steps.iter().filter_map(|&(t, _)| m.transitions[t].read).collect()
    }

    pub fn labels<'a>(&self, m: &'a CounterMachine) -> Vec<&'a str> {
        self.steps.iter().map(|&(t, _)| m.transitions[t].label.as_str()).collect()
    }

    pub fn trace(&self, m: &CounterMachine) -> String {
        let mut out = m.render_config(&self.start);
        out.push('\n');
        for (t, c) in &self.steps {
            out.push_str(&format!("  --{}--> {}\n", m.transitions[*t].label, m.render_config(c)));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineMembership {
    Yes(Run),
    NoWithinBudget,
}

impl MachineMembership {
    pub fn is_yes(&self) -> bool {
        matches!(self, MachineMembership::Yes(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    NonEmpty { word: Word, run: Run },
    EmptyWithinBound(u64),
}

impl Emptiness {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, Emptiness::NonEmpty { .. })
    }
}

/// One step from `c` along transition `t`, or `None` if not enabled.
/// With `track_input` the read symbol is appended to `consumed`.
pub fn fire(m: &CounterMachine, t: &Transition, c: &MachineConfig, track_input: bool) -> Option<MachineConfig> {
    if t.from != c.state {
        return None;
    }
    let mut stack = c.stack.clone();
    if let Some(s) = t.top {
        if stack.last() != Some(&s) {
            return None;
        }
        stack.pop();
    }
    let (counters, phases, reversals) =
        counter_step(&m.counters, &t.guard, &t.update, &c.counters, &c.phases, &c.reversals)?;
    stack.extend(t.push.iter().rev());
    let net = t.push.len() as i64 - t.top.is_some() as i64;
    let (mut sp, mut sr) = (c.stack_phase, c.stack_reversals);
    if net > 0 {
        if sp == Phase::Decreasing {
            sr += 1;
        }
        sp = Phase::Increasing;
    } else if net < 0 {
        if sp == Phase::Increasing {
            sr += 1;
        }
        sp = Phase::Decreasing;
    }
    if let Some(r) = m.pushdown.as_ref().and_then(|p| p.reversal_bound) {
        if sr > r {
            return None;
        }
    }
    let mut consumed = c.consumed.clone();
    if track_input {
        if let Some(a) = t.read {
            consumed.push(a);
        }
    }
    Some(MachineConfig {
        state: t.to,
        consumed,
        counters,
        phases,
        reversals,
        stack,
        stack_phase: sp,
        stack_reversals: sr,
    })
}

/// Every configuration reached by a bounded breadth-first search, with
/// parent links for run reconstruction.
#[derive(Clone, Debug, Default)]
pub struct MachineExploration {
    pub configs: Vec<MachineConfig>,
    pub parents: Vec<Option<(usize, usize)>>,
    pub accepted: Vec<usize>,
    pub truncated: bool,
}

impl MachineExploration {
    pub fn run_to(&self, mut i: usize) -> Run {
        let mut steps = Vec::new();
        while let Some((p, t)) = self.parents[i] {
            steps.push((t, self.configs[i].clone()));
            i = p;
        }
        steps.reverse();
        Run { start: self.configs[i].clone(), steps }
    }

    pub fn words(&self) -> BTreeSet<Word> {
        self.accepted.iter().map(|&i| self.configs[i].consumed.clone()).collect()
    }
}

enum Input<'a> {
    /// Build the input left to right, up to a length cap.
    Free(usize),
    /// Follow a fixed word.
    Fixed(&'a [TermId]),
    /// Reads are ε-moves (emptiness search).
    Ignored,
}

struct Limits {
    steps: usize,
    counter: u64,
    stack: usize,
    stop_at_first: bool,
}

fn search(m: &CounterMachine, input: Input<'_>, limits: Limits) -> MachineExploration {
    let mut by_from: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        by_from.entry(t.from).or_default().push(i);
    }
    let track = !matches!(input, Input::Ignored);
    let start = MachineConfig::initial(m);
    let mut ex = MachineExploration::default();
    let mut index: HashMap<MachineConfig, usize> = HashMap::new();
    let is_accepting = |c: &MachineConfig| {
        m.accepting.contains(&c.state)
            && match input {
                Input::Fixed(w) => c.consumed.len() == w.len(),
                _ => true,
            }
    };
    index.insert(start.clone(), 0);
    ex.configs.push(start);
    ex.parents.push(None);
    let mut depth = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if is_accepting(&ex.configs[i]) {
            ex.accepted.push(i);
            if limits.stop_at_first {
                return ex;
            }
        }
        if depth[i] >= limits.steps {
            ex.truncated = true;
            continue;
        }
        for &ti in by_from.get(&ex.configs[i].state).map(Vec::as_slice).unwrap_or(&[]) {
            let t = &m.transitions[ti];
            match (&input, t.read) {
                (Input::Fixed(w), Some(a)) => {
                    let pos = ex.configs[i].consumed.len();
                    if w.get(pos) != Some(&a) {
                        continue;
                    }
                }
                (Input::Free(cap), Some(_)) if ex.configs[i].consumed.len() >= *cap => {
                    ex.truncated = true;
                    continue;
                }
                _ => {}
            }
            let Some(next) = fire(m, t, &ex.configs[i], track) else { continue };
            if next.counters.iter().any(|&v| v > limits.counter) || next.stack.len() > limits.stack {
                ex.truncated = true;
                continue;
            }
            if index.contains_key(&next) {
                continue;
            }
            let j = ex.configs.len();
            index.insert(next.clone(), j);
            ex.configs.push(next);
            ex.parents.push(Some((i, ti)));
            depth.push(depth[i] + 1);
            queue.push_back(j);
        }
    }
    ex
}

fn check_budget(b: &ExplorationBudget) -> Result<(), MachineError> {
    if b.is_valid() {
        Ok(())
    } else {
        Err(MachineError::BadBudget)
    }
}

/// Exact within-budget acceptance of `w`; the run is a shortest one.
pub fn accepts(m: &CounterMachine, w: &[TermId], b: &ExplorationBudget) -> Result<MachineMembership, MachineError> {
    check_budget(b)?;
    let limits = Limits { steps: b.max_steps, counter: b.max_counter, stack: b.max_form_len, stop_at_first: true };
    let ex = search(m, Input::Fixed(w), limits);
    Ok(match ex.accepted.first() {
        Some(&i) => MachineMembership::Yes(ex.run_to(i)),
        None => MachineMembership::NoWithinBudget,
    })
}

/// Full bounded exploration, for inspecting every run the budget allows.
pub fn explore_machine(m: &CounterMachine, b: &ExplorationBudget) -> Result<MachineExploration, MachineError> {
    check_budget(b)?;
    let cap = b.max_word_len.unwrap_or(b.max_form_len);
    let limits = Limits { steps: b.max_steps, counter: b.max_counter, stack: b.max_form_len, stop_at_first: false };
    Ok(search(m, Input::Free(cap), limits))
}

/// Words with an accepting run inside the budget. Word length is capped
/// by `max_word_len`, or by `max_form_len` when that is unset.
pub fn enumerate_machine(m: &CounterMachine, b: &ExplorationBudget) -> Result<BTreeSet<Word>, MachineError> {
    Ok(explore_machine(m, b)?.words())
}

/// Emptiness of a stackless machine by search over configurations with
/// every counter at most `cap`; reads are ε-moves and the witness word is
/// recovered from the run.
pub fn ncm_empty_bounded(m: &CounterMachine, cap: u64) -> Result<Emptiness, MachineError> {
    if !m.is_stackless() {
        return Err(MachineError::HasPushdown);
    }
    let limits = Limits { steps: usize::MAX, counter: cap, stack: usize::MAX, stop_at_first: true };
    let ex = search(m, Input::Ignored, limits);
    Ok(match ex.accepted.first() {
        Some(&i) => {
            let run = ex.run_to(i);
            Emptiness::NonEmpty { word: run.word(m), run }
        }
        None => Emptiness::EmptyWithinBound(cap),
    })
}

impl fmt::Display for Emptiness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Emptiness::NonEmpty { word, .. } => write!(f, "NONEMPTY (witness of length {})", word.len()),
            Emptiness::EmptyWithinBound(c) => write!(f, "EMPTY within counter cap {c}"),
        }
    }
}

/// Incremental machine construction. Multi-symbol reads and increments
/// larger than one are split into unit steps through fresh states.
#[derive(Clone, Debug, Default)]
pub struct MachineBuilder {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub transitions: Vec<Transition>,
    state_ix: HashMap<String, usize>,
    k: usize,
}

impl MachineBuilder {
    pub fn new(inputs: Vec<String>, k: usize) -> Self {
        MachineBuilder { inputs, k, ..Default::default() }
    }

    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.state_ix.get(name) {
            return i;
        }
        self.states.push(name.to_string());
        self.state_ix.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn fresh_state(&mut self, base: &str) -> usize {
        if !self.state_ix.contains_key(base) {
            return self.state(base);
        }
        let name = (1..).map(|i| format!("{base}_{i}")).find(|n| !self.state_ix.contains_key(n)).unwrap();
        self.state(&name)
    }

    pub fn add(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    /// Adds `from --reads, guard, top/push, update--> to`, splitting into
    /// unit steps. The first step checks the guard, does the stack work,
    /// applies every decrement and the first unit of every increment, and
    /// reads the first symbol; later steps read or increment one unit.
    #[allow(clippy::too_many_arguments)]
    pub fn add_path(
        &mut self,
        label: &str,
        from: usize,
        reads: &[TermId],
        guard: Vec<Guard>,
        top: Option<usize>,
        update: &[i64],
        push: Vec<usize>,
        to: usize,
    ) {
        let first: Vec<i64> = update.iter().map(|&u| u.clamp(-1, 1)).collect();
        let mut rest: Vec<i64> = update.iter().map(|&u| (u - 1).max(0)).collect();
        let mut reads = reads.iter().copied();
        let mut pending: Vec<(Option<TermId>, Vec<i64>)> = Vec::new();
        let read0 = reads.next();
        for a in reads {
            pending.push((Some(a), vec![0; self.k]));
        }
        for j in 0..self.k {
            while rest[j] > 0 {
                let mut u = vec![0; self.k];
                u[j] = 1;
                rest[j] -= 1;
                pending.push((None, u));
            }
        }
        let mut cur = from;
        let n = pending.len();
        let base = format!("{}.{}", self.states[from], label);
        let next_state = |b: &mut Self, last: bool| if last { to } else { b.fresh_state(&base) };
        let target = next_state(self, n == 0);
        self.add(Transition { label: label.to_string(), from: cur, read: read0, guard, top, to: target, update: first, push });
        cur = target;
        for (i, (read, u)) in pending.into_iter().enumerate() {
            let target = next_state(self, i + 1 == n);
            self.add(Transition {
                label: label.to_string(),
                from: cur,
                read,
                guard: vec![Guard::Any; self.k],
                top: None,
                to: target,
                update: u,
                push: vec![],
            });
            cur = target;
        }
    }

    pub fn finish(
        self,
        counters: CounterSpec,
        pushdown: Option<Pushdown>,
        initial: usize,
        accepting: BTreeSet<usize>,
    ) -> CounterMachine {
        CounterMachine {
            states: self.states,
            inputs: self.inputs,
            counters,
            pushdown,
            transitions: self.transitions,
            initial,
            accepting,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `{ a^n b^n | n >= 1 }` with one 1-reversal counter.
    pub(crate) fn anbn() -> CounterMachine {
        let mut b = MachineBuilder::new(vec!["a".into(), "b".into()], 1);
        let p = b.state("p");
        let q = b.state("q");
        let a = Some(TermId(0));
        let bb = Some(TermId(1));
        let t = |label: &str, from, read, guard: Guard, to, u| Transition {
            label: label.into(),
            from,
            read,
            guard: vec![guard],
            top: None,
            to,
            update: vec![u],
            push: vec![],
        };
        b.add(t("inc", p, a, Guard::Any, p, 1));
        b.add(t("dec", p, bb, Guard::Positive, q, -1));
        b.add(t("dec", q, bb, Guard::Positive, q, -1));
        let f = b.state("f");
        b.add(t("done", q, None, Guard::Zero, f, 0));
        b.finish(CounterSpec::reversal_bounded(1, 1), None, p, BTreeSet::from([f]))
    }

    #[test]
    fn anbn_accepts_and_rejects() {
        let m = anbn();
        let b = ExplorationBudget::new(20, 10, 10);
        let w = m.parse_word("aabb").unwrap();
        let MachineMembership::Yes(run) = accepts(&m, &w, &b).unwrap() else { panic!("aabb rejected") };
        assert_eq!(run.word(&m), w);
        assert_eq!(run.steps.len(), 5);
        assert!(!accepts(&m, &m.parse_word("abb").unwrap(), &b).unwrap().is_yes());
    }

    #[test]
    fn anbn_enumerates() {
        let m = anbn();
        let words = enumerate_machine(&m, &ExplorationBudget::new(30, 10, 10).words_up_to(6)).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| m.render_word(w)).collect();
        assert_eq!(rendered, vec!["aaabbb", "aabb", "ab"]);
    }

    #[test]
    fn initial_accepting_is_nonempty_with_empty_witness() {
        let mut m = anbn();
        m.accepting.insert(m.initial);
        match ncm_empty_bounded(&m, 1).unwrap() {
            Emptiness::NonEmpty { word, run } => {
                assert!(word.is_empty());
                assert!(run.steps.is_empty());
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn add_path_splits_reads_and_increments() {
        let mut b = MachineBuilder::new(vec!["a".into(), "b".into()], 1);
        let p = b.state("p");
        let q = b.state("q");
        b.add_path("t", p, &[TermId(0), TermId(1)], vec![Guard::Any], None, &[3], vec![], q);
        assert_eq!(b.transitions.len(), 4);
        assert!(b.transitions.iter().all(|t| t.update[0] <= 1));
        let m = b.finish(CounterSpec::reversal_bounded(1, 1), None, p, BTreeSet::from([q]));
        let Emptiness::NonEmpty { word, run } = ncm_empty_bounded(&m, 3).unwrap() else { panic!() };
        assert_eq!(m.render_word(&word), "ab");
        assert_eq!(run.last().counters, vec![3]);
    }
}
