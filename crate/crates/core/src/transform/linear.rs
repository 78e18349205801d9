use std::collections::BTreeSet;

use super::{precondition, Draft, TransformError};
use crate::grammar::{classify, Acceptance, CounterSpec, Shape, StateGrammar, Symbol};

/// Folds states into nonterminals: `(q,A) -> (p, uBv)` becomes
/// `(q,A) -> u (p,B) v` and a terminating `(q,A) -> (p,u)` survives as
/// `(q,A) -> u` only when `p` is final. The result has a single state.
pub fn lgs_to_lg(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    if classify(g).shape == Shape::ContextFree {
        return Err(precondition("lgs-to-lg", "grammar is not linear"));
    }
    if g.counters.count > 0 || g.control.is_some() {
        return Err(precondition("lgs-to-lg", "grammar carries counters or a control partition"));
    }
    let mut d = Draft::new();
    d.reserve(&g.nonterminals);
    d.reserve(&g.states);
    for t in &g.terminals {
        d.term(t);
    }
    let pair = |q: usize, a: usize| format!("({},{})", g.states[q], g.nonterminals[a]);
    for q in 0..g.states.len() {
        for a in 0..g.nonterminals.len() {
            d.nt(&pair(q, a));
        }
    }
    let only = d.fresh_state("q");
    let axiom = d.nt(&pair(g.initial.index(), g.axiom.index()));
    for p in &g.productions {
        let lhs = d.nt(&pair(p.from.index(), p.lhs.index()));
        let has_nt = p.rhs.iter().any(|s| s.is_nonterminal());
        if !has_nt && !g.is_final(p.to) {
            continue;
        }
        let rhs = p
            .rhs
            .iter()
            .map(|s| match s {
                Symbol::N(b) => Symbol::N(d.nt(&pair(p.to.index(), b.index()))),
                t => *t,
            })
            .collect();
        d.push(p.label.clone(), only, vec![], lhs, only, vec![], rhs);
    }
    Ok(d.finish(axiom, only, BTreeSet::from([only]), CounterSpec::none(), None, Acceptance::FinalState))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grammar::{validate, GrammarBuilder};

    #[test]
    fn rejects_context_free() {
        assert!(lgs_to_lg(&corpus::example1(2)).is_err());
    }

    #[test]
    fn single_state_copy() {
        let g = GrammarBuilder::new()
            .nonterminals(["S"])
            .terminals(["a", "b"])
            .states(["q0"])
            .finals(["q0"])
            .rule("q0", "S", "q0", "a S b")
            .rule("q0", "S", "q0", "")
            .build()
            .unwrap();
        let h = lgs_to_lg(&g).unwrap();
        assert!(validate(&h).is_valid());
        assert_eq!(h.nonterminals, vec!["(q0,S)"]);
        assert_eq!(h.productions.len(), 2);
    }
}
