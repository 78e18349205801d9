use super::{precondition, Draft, TransformError};
use crate::grammar::{CounterSpec, Discipline, Guard, StateGrammar, StateId, Symbol, UpdateStyle};

/// Replaces every increment `+c` with `c >= 2` by a recursive-doubling
/// gadget over fresh 1-reversal auxiliary counters.
///
/// Bit 0 of `c` is added directly. Bit `s >= 1` uses a chain of `s`
/// auxiliary counters: the first is loaded with 2, each one is emptied
/// into the next while adding 2 per decrement, and the last is emptied
/// into the main counter. Gadget states are fresh, so a gadget runs
/// without interleaving, and every gadget rule has the single nonterminal
/// `X^t` on its right-hand side until the original `α` is written.
///
/// Auxiliary counters are 1-reversal, so each gadget is exact for rules
/// that fire at most once per derivation.
pub fn degeneralize(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    if g.counters.update_style != UpdateStyle::Generalized {
        return Err(precondition("degeneralize", "grammar does not use generalized updates"));
    }
    let Discipline::ReversalBounded(bounds) = &g.counters.discipline else {
        return Err(precondition("degeneralize", "counters are not reversal-bounded"));
    };
    if g.productions.iter().any(|p| p.update.iter().any(|&u| u < -1)) {
        return Err(precondition("degeneralize", "decrements must be exactly 1"));
    }
    let k = g.counters.count;

    // Auxiliary counters: per rule, per large increment, per set bit s >= 1, a chain of s.
    struct Chain {
        main: usize,
        aux: Vec<usize>,
    }
    let mut chains: Vec<Vec<Chain>> = Vec::new();
    let mut next_aux = k;
    for p in &g.productions {
        let mut rule = Vec::new();
        for (j, &u) in p.update.iter().enumerate() {
            if u < 2 {
                continue;
            }
            let c = u as u64;
            for s in 1..64 {
                if c >> s & 1 == 1 {
                    rule.push(Chain { main: j, aux: (next_aux..next_aux + s).collect() });
                    next_aux += s;
                }
            }
        }
        chains.push(rule);
    }
    let total = next_aux;

    let mut d = Draft::symbols_of(g);
    let base_guard = |orig: &[Guard]| -> Vec<Guard> {
        orig.iter().copied().chain(std::iter::repeat(Guard::Zero).take(total - k)).collect()
    };
    let any_guard = vec![Guard::Any; total];
    let zero_update = vec![0i64; total];

    for (t, p) in g.productions.iter().enumerate() {
        let rule_chains = &chains[t];
        if rule_chains.is_empty() && p.update.iter().all(|&u| u <= 1) {
            let mut update = p.update.clone();
            update.resize(total, 0);
            d.push(p.label.clone(), p.from, base_guard(&p.guard), p.lhs, p.to, update, p.rhs.clone());
            continue;
        }
        let x = d.fresh_nt(&format!("X^{}", p.label));
        let xs = vec![Symbol::N(x)];
        let fresh = |d: &mut Draft, tag: &str| d.fresh_state(&format!("{}#{}{tag}", g.state_name(p.to), p.label));
        let mut n_step = 0;
        let mut step_label = |what: &str| {
            n_step += 1;
            format!("{}/{what}{n_step}", p.label)
        };

        // Entry: the unit part and bit 0 of every large increment.
        let mut entry = zero_update.clone();
        for (j, &u) in p.update.iter().enumerate() {
            entry[j] = if u >= 2 { u & 1 } else { u };
        }
        let mut cur: StateId = fresh(&mut d, "");
        d.push(step_label("in"), p.from, base_guard(&p.guard), p.lhs, cur, entry, xs.clone());

        for ch in rule_chains {
            let with = |pairs: &[(usize, Guard)]| {
                let mut gd = any_guard.clone();
                for &(i, v) in pairs {
                    gd[i] = v;
                }
                gd
            };
            let add = |pairs: &[(usize, i64)]| {
                let mut u = zero_update.clone();
                for &(i, v) in pairs {
                    u[i] = v;
                }
                u
            };
            // Load the first auxiliary counter with 2.
            let a1 = ch.aux[0];
            let half = fresh(&mut d, "");
            let mut loop_q = fresh(&mut d, "");
            d.push(step_label("load"), cur, any_guard.clone(), x, half, add(&[(a1, 1)]), xs.clone());
            d.push(step_label("load"), half, any_guard.clone(), x, loop_q, add(&[(a1, 1)]), xs.clone());
            // Double a_i into a_{i+1}.
            for w in ch.aux.windows(2) {
                let (ai, an) = (w[0], w[1]);
                let mid = fresh(&mut d, "");
                let next = fresh(&mut d, "");
                d.push(step_label("dbl"), loop_q, with(&[(ai, Guard::Positive), (an, Guard::Any)]), x, mid, add(&[(ai, -1), (an, 1)]), xs.clone());
                d.push(step_label("dbl"), mid, with(&[(ai, Guard::Any), (an, Guard::Positive)]), x, loop_q, add(&[(an, 1)]), xs.clone());
                d.push(step_label("next"), loop_q, with(&[(ai, Guard::Zero), (an, Guard::Any)]), x, next, zero_update.clone(), xs.clone());
                loop_q = next;
            }
            // Empty the last auxiliary counter into the main counter.
            let last = *ch.aux.last().unwrap();
            let done = fresh(&mut d, "");
            d.push(step_label("add"), loop_q, with(&[(last, Guard::Positive)]), x, loop_q, add(&[(last, -1), (ch.main, 1)]), xs.clone());
            d.push(step_label("next"), loop_q, with(&[(last, Guard::Zero)]), x, done, zero_update.clone(), xs.clone());
            cur = done;
        }
        d.push(step_label("out"), cur, any_guard.clone(), x, p.to, zero_update.clone(), p.rhs.clone());
    }

    let mut rs = bounds.clone();
    rs.resize(total, 1);
    let counters = CounterSpec { count: total, discipline: Discipline::ReversalBounded(rs), update_style: UpdateStyle::Unit };
    Ok(d.finish(g.axiom, g.initial, g.finals.clone(), counters, None, g.acceptance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{guards, validate, GrammarBuilder};

    fn plus(c: i64) -> StateGrammar {
        GrammarBuilder::new()
            .nonterminals(["A"])
            .terminals(["a"])
            .states(["q", "p"])
            .finals(["p"])
            .counters(CounterSpec::reversal_bounded(1, 1).generalized())
            .counter_rule("q", &guards("*"), "A", "p", &[c], "a")
            .build()
            .unwrap()
    }

    #[test]
    fn plus_one_passes_through() {
        let h = degeneralize(&plus(1)).unwrap();
        assert_eq!(h.counters.count, 1);
        assert_eq!(h.productions.len(), 1);
    }

    #[test]
    fn plus_five_uses_two_aux_counters() {
        let h = degeneralize(&plus(5)).unwrap();
        assert!(validate(&h).is_valid(), "{}", validate(&h));
        assert_eq!(h.counters.count, 3);
        assert_eq!(h.counters.update_style, UpdateStyle::Unit);
    }

    #[test]
    fn requires_generalized() {
        assert!(degeneralize(&crate::corpus::example2()).is_err());
    }
}
