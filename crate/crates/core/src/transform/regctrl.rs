//! Context-free grammars with regular control over production labels.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::{precondition, Draft, TransformError};
use crate::derive::{ExplorationBudget, Word};
use crate::grammar::{Acceptance, CounterSpec, NtId, StateGrammar, Symbol};

/// Finite automaton over production labels; deterministic when every
/// `(state, label)` pair has at most one successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub states: Vec<String>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<(usize, String, usize)>,
}

impl Nfa {
    pub fn is_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.transitions.iter().all(|(q, l, _)| seen.insert((*q, l.clone())))
    }

    pub fn step(&self, from: &BTreeSet<usize>, label: &str) -> BTreeSet<usize> {
        self.transitions
            .iter()
            .filter(|(q, l, _)| from.contains(q) && l == label)
            .map(|(_, _, r)| *r)
            .collect()
    }

    pub fn accepts(&self, labels: &[&str]) -> bool {
        let mut cur = BTreeSet::from([self.initial]);
        for l in labels {
            cur = self.step(&cur, l);
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    /// Subset construction restricted to subsets reachable from `{initial}`.
    pub fn determinize(&self) -> Nfa {
        let labels: BTreeSet<&String> = self.transitions.iter().map(|(_, l, _)| l).collect();
        let start = BTreeSet::from([self.initial]);
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
        let mut order = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        let mut transitions = Vec::new();
        while let Some(set) = queue.pop_front() {
            let from = index[&set];
            for l in &labels {
                let next = self.step(&set, l);
                if next.is_empty() {
                    continue;
                }
                let to = *index.entry(next.clone()).or_insert_with(|| {
                    order.push(next.clone());
                    queue.push_back(next.clone());
                    order.len() - 1
                });
                transitions.push((from, (*l).clone(), to));
            }
        }
        let states = order
            .iter()
            .map(|s| {
                let names: Vec<&str> = s.iter().map(|&q| self.states[q].as_str()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        let finals = order
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|q| self.finals.contains(q)))
            .map(|(i, _)| i)
            .collect();
        Nfa { states, initial: 0, finals, transitions }
    }
}

pub type RegularControl = Nfa;

/// A single-state, counter-free grammar whose derivations count only when
/// their label sequence is accepted by `control`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlledCFG {
    pub base: StateGrammar,
    pub control: RegularControl,
}

impl ControlledCFG {
    /// Reference interpreter: free derivations of the base grammar, with
    /// the set of control states reachable by the labels used so far.
    pub fn enumerate(&self, budget: &ExplorationBudget) -> BTreeSet<Word> {
        let g = &self.base;
        let mut by_lhs: HashMap<NtId, Vec<usize>> = HashMap::new();
        for (i, p) in g.productions.iter().enumerate() {
            by_lhs.entry(p.lhs).or_default().push(i);
        }
        type Key = (Vec<Symbol>, BTreeSet<usize>);
        let start: Key = (vec![Symbol::N(g.axiom)], BTreeSet::from([self.control.initial]));
        let mut seen: HashSet<Key> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([(start, 0usize)]);
        let mut words = BTreeSet::new();
        while let Some(((form, ctl), depth)) = queue.pop_front() {
            if form.iter().all(|s| !s.is_nonterminal()) {
                if ctl.iter().any(|q| self.control.finals.contains(q)) {
                    words.insert(
                        form.iter()
                            .map(|s| match s {
                                Symbol::T(t) => *t,
                                Symbol::N(_) => unreachable!(),
                            })
                            .collect(),
                    );
                }
                continue;
            }
            if depth >= budget.max_steps {
                continue;
            }
            for (pos, s) in form.iter().enumerate() {
                let Symbol::N(a) = s else { continue };
                for &pi in by_lhs.get(a).map(Vec::as_slice).unwrap_or(&[]) {
                    let p = &g.productions[pi];
                    let next_ctl = self.control.step(&ctl, &p.label);
                    if next_ctl.is_empty() {
                        continue;
                    }
                    let mut next = form[..pos].to_vec();
                    next.extend_from_slice(&p.rhs);
                    next.extend_from_slice(&form[pos + 1..]);
                    let terminals = next.iter().filter(|s| !s.is_nonterminal()).count();
                    if next.len() > budget.max_form_len
                        || budget.max_word_len.is_some_and(|l| terminals > l)
                    {
                        continue;
                    }
                    let key = (next, next_ctl);
                    if seen.insert(key.clone()) {
                        queue.push_back((key, depth + 1));
                    }
                }
            }
        }
        words
    }
}

/// States come from the (determinized) control automaton: each transition
/// `q --p--> q'` with `p` labelling `A -> w` yields `(q,A) -> (q',w)`.
pub fn regctrl_to_cfgs(c: &ControlledCFG) -> Result<StateGrammar, TransformError> {
    let dfa = if c.control.is_deterministic() { c.control.clone() } else { c.control.determinize() };
    let base = &c.base;
    let by_label: HashMap<&str, usize> =
        base.productions.iter().enumerate().map(|(i, p)| (p.label.as_str(), i)).collect();
    let mut d = Draft::new();
    for n in &base.nonterminals {
        d.nt(n);
    }
    for t in &base.terminals {
        d.term(t);
    }
    let ids: Vec<_> = dfa.states.iter().map(|s| d.state(s)).collect();
    for (q, label, r) in &dfa.transitions {
        let &pi = by_label
            .get(label.as_str())
            .ok_or_else(|| precondition("from-regctrl", format!("control label `{label}` names no production")))?;
        let p = &base.productions[pi];
        d.push(format!("{label}@{}", dfa.states[*q]), ids[*q], vec![], p.lhs, ids[*r], vec![], p.rhs.clone());
    }
    let finals = dfa.finals.iter().map(|&q| ids[q]).collect();
    Ok(d.finish(base.axiom, ids[dfa.initial], finals, CounterSpec::none(), None, Acceptance::FinalState))
}

/// Erases states from the rules and moves them into a control automaton
/// that mirrors the state graph. Rules that coincide after erasing states
/// share one label.
pub fn cfgs_to_regctrl(g: &StateGrammar) -> Result<ControlledCFG, TransformError> {
    if g.counters.count > 0 {
        return Err(precondition("to-regctrl", "grammar has counters"));
    }
    if g.control.is_some() {
        return Err(precondition("to-regctrl", "controlled grammars use their own derivation relation"));
    }
    let mut d = Draft::new();
    for n in &g.nonterminals {
        d.nt(n);
    }
    for t in &g.terminals {
        d.term(t);
    }
    d.reserve(&g.states);
    let only = d.fresh_state("q");
    let mut label_of: HashMap<(NtId, Vec<Symbol>), String> = HashMap::new();
    let mut transitions = Vec::new();
    for p in &g.productions {
        let key = (p.lhs, p.rhs.clone());
        let label = match label_of.get(&key) {
            Some(l) => l.clone(),
            None => {
                let l = format!("r{}", label_of.len() + 1);
                label_of.insert(key, l.clone());
                d.push(l.clone(), only, vec![], p.lhs, only, vec![], p.rhs.clone());
                l
            }
        };
        transitions.push((p.from.index(), label, p.to.index()));
    }
    let base = d.finish(g.axiom, only, BTreeSet::from([only]), CounterSpec::none(), None, Acceptance::FinalState);
    let control = Nfa {
        states: g.states.clone(),
        initial: g.initial.index(),
        finals: g.finals.iter().map(|q| q.index()).collect(),
        transitions,
    };
    Ok(ControlledCFG { base, control })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn determinize_merges_branches() {
        let n = Nfa {
            states: vec!["s".into(), "t".into(), "u".into()],
            initial: 0,
            finals: BTreeSet::from([2]),
            transitions: vec![(0, "x".into(), 1), (0, "x".into(), 2), (1, "y".into(), 2)],
        };
        assert!(!n.is_deterministic());
        let dfa = n.determinize();
        assert!(dfa.is_deterministic());
        for w in [vec!["x"], vec!["x", "y"], vec!["y"], vec![]] {
            assert_eq!(n.accepts(&w), dfa.accepts(&w), "{w:?}");
        }
    }

    #[test]
    fn example1_control_mirrors_states() {
        let c = cfgs_to_regctrl(&corpus::example1(2)).unwrap();
        assert_eq!(c.base.states.len(), 1);
        assert_eq!(c.control.states, vec!["q0", "q1"]);
        assert_eq!(c.control.transitions.len(), 5);
    }
}
