use std::collections::BTreeSet;

use super::{precondition, Draft, TransformError};
use crate::grammar::{
    Acceptance, CcfgsVariant, ControlPartition, CounterSpec, Guard, NtId, StateGrammar, Symbol,
};

fn require_monotonic(g: &StateGrammar, pass: &'static str) -> Result<(), TransformError> {
    if !g.counters.is_monotonic() || g.acceptance != Acceptance::AllCountersEqual {
        return Err(precondition(pass, "grammar is not a monotonic-counter grammar"));
    }
    Ok(())
}

/// Simulates the monotonic grammar in one working state, then guesses
/// that all counters are equal and drains them in lockstep through a
/// trailing `X`. Counters become 1-reversal; acceptance needs them at zero.
pub fn cfgmc_to_cfgsc(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    require_monotonic(g, "cfgmc-to-cfgsc")?;
    let k = g.counters.count;
    let mut d = Draft::alphabets_of(g);
    let start = d.fresh_nt("S'");
    let x = d.fresh_nt("X");
    let q0 = d.fresh_state("q0");
    let q1 = d.fresh_state("q1");
    let f = d.fresh_state("f");
    d.push("start", q0, vec![Guard::Zero; k], start, q1, vec![0; k], vec![Symbol::N(g.axiom), Symbol::N(x)]);
    for p in &g.productions {
        d.push(p.label.clone(), q1, vec![Guard::Any; k], p.lhs, q1, p.update.clone(), p.rhs.clone());
    }
    if k > 0 {
        d.push("drain", q1, vec![Guard::Positive; k], x, q1, vec![-1; k], vec![Symbol::N(x)]);
    }
    d.push("stop", q1, vec![Guard::Zero; k], x, f, vec![0; k], vec![]);
    Ok(d.finish(
        start,
        q0,
        BTreeSet::from([f]),
        CounterSpec::reversal_bounded(k, 1),
        None,
        Acceptance::FinalStateZeroCounters,
    ))
}

/// Emits one `C_i` per increment of counter `i` and checks equality by
/// erasing `C_1 ... C_k` blocks cyclically through `q_1 .. q_k`.
pub fn cfgmc_to_ccfgs(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    require_monotonic(g, "cfgmc-to-ccfgs")?;
    let k = g.counters.count;
    if k == 0 {
        return Err(precondition("cfgmc-to-ccfgs", "needs at least one counter"));
    }
    let mut d = Draft::new();
    d.reserve(&g.nonterminals);
    d.reserve(&g.terminals);
    d.reserve(&g.states);
    let start = d.fresh_nt("S'");
    for n in &g.nonterminals {
        d.nt(n);
    }
    let c: Vec<NtId> = (1..=k).map(|i| d.fresh_nt(&format!("C{i}"))).collect();
    for t in &g.terminals {
        d.term(t);
    }
    let q0 = d.fresh_state("q0");
    let qs: Vec<_> = (1..=k).map(|i| d.fresh_state(&format!("q{i}"))).collect();
    let qf = d.fresh_state("qf");
    let nt = |n: NtId| Symbol::N(NtId(n.0 + 1));

    let mut first: Vec<Symbol> = c.iter().map(|&ci| Symbol::N(ci)).collect();
    first.push(nt(g.axiom));
    d.push("start", q0, vec![], start, q0, vec![], first);
    for p in &g.productions {
        let mut rhs = Vec::new();
        for (i, &u) in p.update.iter().enumerate() {
            rhs.extend(std::iter::repeat(Symbol::N(c[i])).take(u as usize));
        }
        rhs.extend(p.rhs.iter().map(|&s| match s {
            Symbol::N(n) => nt(n),
            t => t,
        }));
        let lhs = NtId(p.lhs.0 + 1);
        d.push(p.label.clone(), q0, vec![], lhs, q0, vec![], rhs.clone());
        d.push(format!("{}/end", p.label), q0, vec![], lhs, qs[0], vec![], rhs);
    }
    for i in 0..k {
        if i + 1 < k {
            d.push(format!("erase{}", i + 1), qs[i], vec![], c[i], qs[i + 1], vec![], vec![]);
        } else {
            d.push(format!("erase{}", i + 1), qs[i], vec![], c[i], qs[0], vec![], vec![]);
            d.push(format!("erase{}/end", i + 1), qs[i], vec![], c[i], qf, vec![], vec![]);
        }
    }
    let v1 = std::iter::once(start).chain((0..g.nonterminals.len()).map(|i| NtId(i as u32 + 1))).collect();
    let control = ControlPartition { v1, v2: c, variant: CcfgsVariant::Classic };
    Ok(d.finish(start, q0, BTreeSet::from([qf]), CounterSpec::none(), Some(control), Acceptance::FinalState))
}
