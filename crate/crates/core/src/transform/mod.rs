//! Constructive conversions between grammar classes.
//!
//! Every pass is a pure function from a grammar to a grammar (or a grammar
//! plus side data). Derived symbols get structured names built from the
//! original name and a tag, so traces stay readable.

mod ccfgs;
mod degeneralize;
mod linear;
mod monotonic;
mod normal_form;
mod regctrl;
mod strip;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::grammar::{
    Acceptance, ControlPartition, CounterSpec, Guard, NtId, Production, StateGrammar, StateId,
    Symbol, TermId,
};

pub use ccfgs::expand_ccfgs_states;
pub use degeneralize::degeneralize;
pub use linear::lgs_to_lg;
pub use monotonic::{cfgmc_to_ccfgs, cfgmc_to_cfgsc};
pub use normal_form::{is_normal_form, normal_form_stages, to_normal_form};
pub use regctrl::{cfgs_to_regctrl, regctrl_to_cfgs, ControlledCFG, Nfa, RegularControl};
pub use strip::{strip_counters, BalancedFilter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("{pass}: {reason}")]
    Precondition { pass: &'static str, reason: String },
}

pub(crate) fn precondition(pass: &'static str, reason: impl Into<String>) -> TransformError {
    TransformError::Precondition { pass, reason: reason.into() }
}

/// Incremental grammar construction with name interning across all three
/// symbol kinds, so fresh names never collide.
#[derive(Clone, Debug, Default)]
pub(crate) struct Draft {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub states: Vec<String>,
    nt_ix: HashMap<String, NtId>,
    t_ix: HashMap<String, TermId>,
    q_ix: HashMap<String, StateId>,
    used: HashSet<String>,
    pub productions: Vec<Production>,
}

impl Draft {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from the symbol tables of `g`, keeping every index stable.
    pub fn symbols_of(g: &StateGrammar) -> Self {
        let mut d = Draft::new();
        for n in &g.nonterminals {
            d.nt(n);
        }
        for t in &g.terminals {
            d.term(t);
        }
        for q in &g.states {
            d.state(q);
        }
        d
    }

    /// Copies nonterminals and terminals of `g`; state names are only
    /// reserved, since the caller builds a new state set.
    pub fn alphabets_of(g: &StateGrammar) -> Self {
        let mut d = Draft::new();
        for n in &g.nonterminals {
            d.nt(n);
        }
        for t in &g.terminals {
            d.term(t);
        }
        d.reserve(&g.states);
        d
    }

    pub fn nt(&mut self, name: &str) -> NtId {
        if let Some(&n) = self.nt_ix.get(name) {
            return n;
        }
        let id = NtId(self.nonterminals.len() as u32);
        self.nonterminals.push(name.to_string());
        self.nt_ix.insert(name.to_string(), id);
        self.used.insert(name.to_string());
        id
    }

    pub fn term(&mut self, name: &str) -> TermId {
        if let Some(&t) = self.t_ix.get(name) {
            return t;
        }
        let id = TermId(self.terminals.len() as u32);
        self.terminals.push(name.to_string());
        self.t_ix.insert(name.to_string(), id);
        self.used.insert(name.to_string());
        id
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.q_ix.get(name) {
            return q;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.q_ix.insert(name.to_string(), id);
        self.used.insert(name.to_string());
        id
    }

    pub fn fresh_name(&self, base: &str) -> String {
        if !self.used.contains(base) {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}_{i}")).find(|n| !self.used.contains(n)).unwrap()
    }

    pub fn fresh_nt(&mut self, base: &str) -> NtId {
        let name = self.fresh_name(base);
        self.nt(&name)
    }

    pub fn fresh_term(&mut self, base: &str) -> TermId {
        let name = self.fresh_name(base);
        self.term(&name)
    }

    pub fn fresh_state(&mut self, base: &str) -> StateId {
        let name = self.fresh_name(base);
        self.state(&name)
    }

    /// Reserves names so that later fresh names avoid them.
    pub fn reserve<S: AsRef<str>>(&mut self, names: impl IntoIterator<Item = S>) {
        for n in names {
            self.used.insert(n.as_ref().to_string());
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        label: impl Into<String>,
        from: StateId,
        guard: Vec<Guard>,
        lhs: NtId,
        to: StateId,
        update: Vec<i64>,
        rhs: Vec<Symbol>,
    ) {
        self.productions.push(Production { label: label.into(), from, guard, lhs, to, update, rhs });
    }

    #[allow(clippy::too_many_arguments)]
    pub fn finish(
        self,
        axiom: NtId,
        initial: StateId,
        finals: BTreeSet<StateId>,
        counters: CounterSpec,
        control: Option<ControlPartition>,
        acceptance: Acceptance,
    ) -> StateGrammar {
        StateGrammar {
            nonterminals: self.nonterminals,
            terminals: self.terminals,
            states: self.states,
            productions: self.productions,
            axiom,
            initial,
            finals,
            counters,
            control,
            acceptance,
        }
    }
}

/// Drops states not reachable from the initial state along productions,
/// together with the productions that start in them. State indices are
/// renumbered in order of first appearance.
pub fn prune_unreachable_states(g: &StateGrammar) -> StateGrammar {
    let mut out_edges: HashMap<StateId, Vec<StateId>> = HashMap::new();
    for p in &g.productions {
        out_edges.entry(p.from).or_default().push(p.to);
    }
    let mut seen = HashSet::from([g.initial]);
    let mut queue = VecDeque::from([g.initial]);
    while let Some(q) = queue.pop_front() {
        for &r in out_edges.get(&q).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(r) {
                queue.push_back(r);
            }
        }
    }
    let mut remap: HashMap<StateId, StateId> = HashMap::new();
    let mut states = Vec::new();
    for (i, name) in g.states.iter().enumerate() {
        let q = StateId(i as u32);
        if seen.contains(&q) {
            remap.insert(q, StateId(states.len() as u32));
            states.push(name.clone());
        }
    }
    let productions = g
        .productions
        .iter()
        .filter(|p| seen.contains(&p.from))
        .map(|p| Production { from: remap[&p.from], to: remap[&p.to], ..p.clone() })
        .collect();
    StateGrammar {
        states,
        productions,
        initial: remap[&g.initial],
        finals: g.finals.iter().filter_map(|q| remap.get(q).copied()).collect(),
        ..g.clone()
    }
}

/// Replaces every terminal in every right-hand side by λ. The result is
/// empty exactly when the input is.
pub fn erase_terminals(g: &StateGrammar) -> StateGrammar {
    let mut out = g.clone();
    for p in &mut out.productions {
        p.rhs.retain(|s| s.is_nonterminal());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn fresh_names_avoid_all_kinds() {
        let mut d = Draft::new();
        d.nt("X");
        d.state("f");
        assert_eq!(d.fresh_name("X"), "X_1");
        assert_eq!(d.fresh_name("f"), "f_1");
        assert_eq!(d.fresh_name("Y"), "Y");
    }

    #[test]
    fn prune_keeps_reachable_part() {
        let g = crate::grammar::GrammarBuilder::new()
            .nonterminals(["S"])
            .terminals(["a"])
            .states(["q0", "dead", "q1"])
            .finals(["q1"])
            .rule("q0", "S", "q1", "a")
            .rule("dead", "S", "q1", "a a")
            .build()
            .unwrap();
        let p = prune_unreachable_states(&g);
        assert_eq!(p.states, vec!["q0", "q1"]);
        assert_eq!(p.productions.len(), 1);
        assert!(p.is_final(p.state("q1").unwrap()));
    }

    #[test]
    fn erase_keeps_nonterminals() {
        let g = erase_terminals(&corpus::example1(2));
        assert!(g.productions.iter().all(|p| p.rhs.iter().all(|s| s.is_nonterminal())));
    }
}
