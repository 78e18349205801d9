use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{is_normal_form, precondition, Draft, TransformError};
use crate::derive::Word;
use crate::grammar::{Acceptance, CounterSpec, Guard, StateGrammar, StateId, Symbol, TermId};

/// Keeps words with as many `c_i` as `d_i` for every pair, then erases
/// every terminal id `>= sigma` (the counter letters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedFilter {
    pub pairs: Vec<(TermId, TermId)>,
    pub sigma: usize,
}

impl BalancedFilter {
    pub fn accepts(&self, w: &[TermId]) -> bool {
        self.pairs.iter().all(|&(c, d)| {
            w.iter().filter(|&&t| t == c).count() == w.iter().filter(|&&t| t == d).count()
        })
    }

    pub fn project(&self, w: &[TermId]) -> Word {
        w.iter().copied().filter(|t| t.index() < self.sigma).collect()
    }

    pub fn apply(&self, words: &BTreeSet<Word>) -> BTreeSet<Word> {
        words.iter().filter(|w| self.accepts(w)).map(|w| self.project(w)).collect()
    }
}

/// Per-counter phase of a 1-reversal counter, tracked in the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Ph {
    /// Zero, never incremented.
    Z0,
    Up,
    Down,
    /// Guessed back to zero; no further changes.
    Z1,
}

impl Ph {
    fn symbol(self) -> char {
        match self {
            Ph::Z0 => '0',
            Ph::Up => '+',
            Ph::Down => '-',
            Ph::Z1 => '1',
        }
    }

    fn admits(self, g: Guard) -> bool {
        match g {
            Guard::Any => true,
            Guard::Zero => matches!(self, Ph::Z0 | Ph::Z1),
            Guard::Positive => matches!(self, Ph::Up | Ph::Down),
        }
    }

    fn after(self, u: i64) -> Vec<Ph> {
        match (self, u) {
            (p, 0) => vec![p],
            (Ph::Z0 | Ph::Up, 1) => vec![Ph::Up],
            (Ph::Up | Ph::Down, -1) => vec![Ph::Down, Ph::Z1],
            _ => vec![],
        }
    }
}

/// Removes the counters of a normal-form grammar: increments of counter `i`
/// emit `c_i`, decrements emit `d_i`, and the states enforce the
/// zero/up/down/zero phase order. Counting is left to the returned filter.
pub fn strip_counters(g: &StateGrammar) -> Result<(StateGrammar, BalancedFilter), TransformError> {
    let k = g.counters.count;
    if k == 0 {
        return Ok((g.clone(), BalancedFilter { pairs: vec![], sigma: g.terminals.len() }));
    }
    if !is_normal_form(g) {
        return Err(precondition("strip-counters", "grammar is not in normal form"));
    }
    let mut d = Draft::alphabets_of(g);
    let pairs: Vec<(TermId, TermId)> = (1..=k)
        .map(|i| (d.fresh_term(&format!("c{i}")), d.fresh_term(&format!("d{i}"))))
        .collect();
    let mut by_from: HashMap<StateId, Vec<usize>> = HashMap::new();
    for (i, p) in g.productions.iter().enumerate() {
        by_from.entry(p.from).or_default().push(i);
    }
    let name = |q: StateId, phi: &[Ph]| {
        let s: String = phi.iter().map(|p| p.symbol()).collect();
        format!("{}<{s}>", g.state_name(q))
    };

    let start = (g.initial, vec![Ph::Z0; k]);
    let initial = d.state(&name(start.0, &start.1));
    let mut seen = BTreeSet::from([name(start.0, &start.1)]);
    let mut queue = VecDeque::from([start]);
    let mut finals = BTreeSet::new();
    while let Some((q, phi)) = queue.pop_front() {
        let from = d.state(&name(q, &phi));
        if g.is_final(q) && phi.iter().all(|p| matches!(p, Ph::Z0 | Ph::Z1)) {
            finals.insert(from);
        }
        for &pi in by_from.get(&q).map(Vec::as_slice).unwrap_or(&[]) {
            let p = &g.productions[pi];
            if !phi.iter().zip(&p.guard).all(|(ph, &gd)| ph.admits(gd)) {
                continue;
            }
            let mut emitted = Vec::new();
            for (i, &u) in p.update.iter().enumerate() {
                match u {
                    1 => emitted.push(Symbol::T(pairs[i].0)),
                    -1 => emitted.push(Symbol::T(pairs[i].1)),
                    _ => {}
                }
            }
            let mut rhs = emitted;
            rhs.extend_from_slice(&p.rhs);
            // Cartesian product of per-counter successor phases.
            let mut succ: Vec<Vec<Ph>> = vec![vec![]];
            for (ph, &u) in phi.iter().zip(&p.update) {
                let opts = ph.after(u);
                succ = succ
                    .into_iter()
                    .flat_map(|pre| {
                        opts.iter().map(move |&o| {
                            let mut v = pre.clone();
                            v.push(o);
                            v
                        })
                    })
                    .collect();
            }
            for next in succ {
                let nm = name(p.to, &next);
                let to = d.state(&nm);
                let tag: String = next.iter().map(|p| p.symbol()).collect();
                d.push(format!("{}<{tag}>", p.label), from, vec![], p.lhs, to, vec![], rhs.clone());
                if seen.insert(nm) {
                    queue.push_back((p.to, next));
                }
            }
        }
    }
    let sigma = g.terminals.len();
    let out = d.finish(g.axiom, initial, finals, CounterSpec::none(), None, Acceptance::FinalState);
    Ok((out, BalancedFilter { pairs, sigma }))
}
