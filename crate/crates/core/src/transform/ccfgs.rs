use std::collections::BTreeSet;

use super::{precondition, Draft, TransformError};
use crate::grammar::{Symbol, StateGrammar};

fn signs_name(signs: &[bool]) -> String {
    signs.iter().map(|&s| if s { '+' } else { '-' }).collect()
}

/// Expands states to `[q, s1..sk]` with `si` in `{+,-}` so that erase-once
/// holds structurally: a `-` flag records that `C_i` was erased, and rules
/// reintroducing `C_i` are dropped from such states.
pub fn expand_ccfgs_states(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    let control = g
        .control
        .clone()
        .ok_or_else(|| precondition("expand-ccfgs", "grammar has no V1/V2 partition"))?;
    let k = control.v2.len();
    let mut d = Draft::alphabets_of(g);
    let mut flags: Vec<Vec<bool>> = Vec::with_capacity(1 << k);
    for mask in 0..(1u32 << k) {
        // Mask bit i set means sign `-` for C_{i+1}; mask 0 is all `+`.
        flags.push((0..k).map(|i| mask & (1 << i) == 0).collect());
    }
    let name = |q: &str, s: &[bool]| format!("{q}[{}]", signs_name(s));
    let mut ids = Vec::new();
    for q in &g.states {
        let row: Vec<_> = flags.iter().map(|s| d.state(&name(q, s))).collect();
        ids.push(row);
    }
    let id_of = |s: &[bool]| -> usize {
        s.iter().enumerate().map(|(i, &plus)| if plus { 0 } else { 1 << i }).sum()
    };

    for p in &g.productions {
        let contains = |i: usize| p.rhs.contains(&Symbol::N(control.v2[i]));
        for s in &flags {
            let mut next = s.clone();
            let mut ok = true;
            match control.position_in_v2(p.lhs) {
                None => {
                    for i in 0..k {
                        if !s[i] && contains(i) {
                            ok = false;
                        }
                    }
                }
                Some(i) => {
                    if !s[i] && contains(i) {
                        ok = false;
                    }
                    if s[i] && !contains(i) {
                        next[i] = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            let from = ids[p.from.index()][id_of(s)];
            let to = ids[p.to.index()][id_of(&next)];
            d.push(
                format!("{}#{}", p.label, signs_name(s)),
                from,
                p.guard.clone(),
                p.lhs,
                to,
                p.update.clone(),
                p.rhs.clone(),
            );
        }
    }
    let all_plus = vec![true; k];
    let initial = ids[g.initial.index()][id_of(&all_plus)];
    let finals: BTreeSet<_> =
        g.finals.iter().flat_map(|q| ids[q.index()].iter().copied()).collect();
    Ok(super::prune_unreachable_states(&d.finish(
        g.axiom,
        initial,
        finals,
        g.counters.clone(),
        Some(control),
        g.acceptance,
    )))
}
