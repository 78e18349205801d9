use std::collections::BTreeSet;

use super::{CounterMachine, MachineBuilder, MachineError, Pushdown, Transition};
use crate::grammar::{
    classify, Acceptance, CcfgsVariant, CounterSpec, Guard, Shape, StateGrammar, Symbol, TermId,
    UpdateStyle,
};
use crate::transform::expand_ccfgs_states;

fn fail(reason: impl Into<String>) -> MachineError {
    MachineError::Construction(reason.into())
}

fn fresh_name(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|t| t == base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|n| !taken.iter().any(|t| t == n)).unwrap()
}

fn counter_grammar(g: &StateGrammar, what: &str) -> Result<(), MachineError> {
    if g.control.is_some() {
        return Err(fail(format!("{what}: controlled grammars use ccfgs-npcm")));
    }
    if g.acceptance == Acceptance::AllCountersEqual {
        return Err(fail(format!("{what}: convert monotonic grammars with cfgmc-to-cfgsc first")));
    }
    Ok(())
}

/// Guard of the acceptance check: all counters zero when the grammar
/// demands it.
fn accept_guard(g: &StateGrammar) -> Vec<Guard> {
    let k = g.counters.count;
    if g.acceptance == Acceptance::FinalStateZeroCounters {
        vec![Guard::Zero; k]
    } else {
        vec![Guard::Any; k]
    }
}

/// Stack alphabet `Z, V, Σ` with a bottom name that avoids the grammar's.
fn grammar_stack(g: &StateGrammar) -> Pushdown {
    let mut taken: Vec<String> = g.nonterminals.clone();
    taken.extend(g.terminals.iter().cloned());
    taken.extend(g.states.iter().cloned());
    let mut symbols = vec![fresh_name(&taken, "Z")];
    symbols.extend(g.nonterminals.iter().cloned());
    symbols.extend(g.terminals.iter().cloned());
    Pushdown { symbols, bottom: 0, reversal_bound: None }
}

fn stack_of(g: &StateGrammar, s: Symbol) -> usize {
    match s {
        Symbol::N(n) => 1 + n.index(),
        Symbol::T(t) => 1 + g.nonterminals.len() + t.index(),
    }
}

fn builder_for(g: &StateGrammar, k: usize) -> (MachineBuilder, Vec<usize>) {
    let mut b = MachineBuilder::new(g.terminals.clone(), k);
    let ids = g.states.iter().map(|q| b.state(q)).collect();
    (b, ids)
}

/// Predict/match simulation of leftmost derivations: the stack holds the
/// unexpanded suffix of the sentential form, a nonterminal on top is
/// expanded by a production (checking and updating the counters as the
/// production does), a terminal on top is matched against the input.
pub fn cfgsc_lm_to_npcm(g: &StateGrammar) -> Result<CounterMachine, MachineError> {
    counter_grammar(g, "npcm-lm")?;
    let k = g.counters.count;
    let pd = grammar_stack(g);
    let z = pd.bottom;
    let (mut b, q) = builder_for(g, k);
    let start = b.fresh_state("m0");
    let accept = b.fresh_state("acc");
    b.add(Transition {
        label: "start".into(),
        from: start,
        read: None,
        guard: vec![Guard::Any; k],
        top: Some(z),
        to: q[g.initial.index()],
        update: vec![0; k],
        push: vec![stack_of(g, Symbol::N(g.axiom)), z],
    });
    for p in &g.productions {
        let push = p.rhs.iter().map(|&s| stack_of(g, s)).collect();
        let top = Some(stack_of(g, Symbol::N(p.lhs)));
        b.add_path(&p.label, q[p.from.index()], &[], p.guard.clone(), top, &p.update, push, q[p.to.index()]);
    }
    for &qi in &q {
        for t in 0..g.terminals.len() {
            let a = TermId(t as u32);
            b.add(Transition {
                label: format!("match {}", g.terminals[t]),
                from: qi,
                read: Some(a),
                guard: vec![Guard::Any; k],
                top: Some(stack_of(g, Symbol::T(a))),
                to: qi,
                update: vec![0; k],
                push: vec![],
            });
        }
    }
    for &f in &g.finals {
        b.add(Transition {
            label: "accept".into(),
            from: q[f.index()],
            read: None,
            guard: accept_guard(g),
            top: Some(z),
            to: accept,
            update: vec![0; k],
            push: vec![z],
        });
    }
    let counters = unitize(&g.counters);
    Ok(b.finish(counters, Some(pd), start, BTreeSet::from([accept])))
}

fn unitize(c: &CounterSpec) -> CounterSpec {
    CounterSpec { update_style: UpdateStyle::Unit, ..c.clone() }
}

/// Linear grammars: a production `(q,A) -> (p, x1 B x2)` reads `x1` and
/// replaces `A` on top by `B x2`; a terminating production reads its
/// right-hand side and pops `A`; terminals are matched afterwards. The
/// stack grows until the last nonterminal disappears and only shrinks
/// afterwards, so one reversal suffices.
pub fn lgsc_to_npcm1(g: &StateGrammar) -> Result<CounterMachine, MachineError> {
    counter_grammar(g, "npcm1")?;
    if classify(g).shape == Shape::ContextFree {
        return Err(fail("npcm1: grammar is not linear"));
    }
    let k = g.counters.count;
    let mut pd = grammar_stack(g);
    pd.reversal_bound = Some(1);
    let z = pd.bottom;
    let (mut b, q) = builder_for(g, k);
    let start = b.fresh_state("m0");
    let accept = b.fresh_state("acc");
    b.add(Transition {
        label: "start".into(),
        from: start,
        read: None,
        guard: vec![Guard::Any; k],
        top: Some(z),
        to: q[g.initial.index()],
        update: vec![0; k],
        push: vec![stack_of(g, Symbol::N(g.axiom)), z],
    });
    for p in &g.productions {
        let split = p.rhs.iter().position(|s| s.is_nonterminal()).unwrap_or(p.rhs.len());
        let reads: Vec<TermId> = p.rhs[..split]
            .iter()
            .map(|s| match s {
                Symbol::T(t) => *t,
                Symbol::N(_) => unreachable!(),
            })
            .collect();
        let push = p.rhs[split..].iter().map(|&s| stack_of(g, s)).collect();
        let top = Some(stack_of(g, Symbol::N(p.lhs)));
        b.add_path(&p.label, q[p.from.index()], &reads, p.guard.clone(), top, &p.update, push, q[p.to.index()]);
    }
    for &qi in &q {
        for t in 0..g.terminals.len() {
            let a = TermId(t as u32);
            b.add(Transition {
                label: format!("match {}", g.terminals[t]),
                from: qi,
                read: Some(a),
                guard: vec![Guard::Any; k],
                top: Some(stack_of(g, Symbol::T(a))),
                to: qi,
                update: vec![0; k],
                push: vec![],
            });
        }
    }
    for &f in &g.finals {
        b.add(Transition {
            label: "accept".into(),
            from: q[f.index()],
            read: None,
            guard: accept_guard(g),
            top: Some(z),
            to: accept,
            update: vec![0; k],
            push: vec![z],
        });
    }
    Ok(b.finish(unitize(&g.counters), Some(pd), start, BTreeSet::from([accept])))
}

/// Right-linear grammars need no stack: machine states are pairs `[q,A]`
/// of grammar state and current nonterminal, plus `[q]` once the last
/// nonterminal is gone. Generalized increments are split into unit steps.
pub fn rlgsc_to_ncm(g: &StateGrammar) -> Result<CounterMachine, MachineError> {
    counter_grammar(g, "ncm")?;
    if classify(g).shape != Shape::RightLinear {
        return Err(fail("ncm: grammar is not right-linear"));
    }
    let k = g.counters.count;
    let mut b = MachineBuilder::new(g.terminals.clone(), k);
    let pair = |q: usize, a: usize| format!("[{},{}]", g.states[q], g.nonterminals[a]);
    let done = |q: usize| format!("[{}]", g.states[q]);
    let start = b.state(&pair(g.initial.index(), g.axiom.index()));
    for p in &g.productions {
        let from = b.state(&pair(p.from.index(), p.lhs.index()));
        let reads: Vec<TermId> = p
            .rhs
            .iter()
            .filter_map(|s| match s {
                Symbol::T(t) => Some(*t),
                Symbol::N(_) => None,
            })
            .collect();
        let to = match p.rhs.last() {
            Some(Symbol::N(n)) => b.state(&pair(p.to.index(), n.index())),
            _ => b.state(&done(p.to.index())),
        };
        b.add_path(&p.label, from, &reads, p.guard.clone(), None, &p.update, vec![], to);
    }
    let accept = b.fresh_state("acc");
    for &f in &g.finals {
        let from = b.state(&done(f.index()));
        b.add(Transition {
            label: "accept".into(),
            from,
            read: None,
            guard: accept_guard(g),
            top: None,
            to: accept,
            update: vec![0; k],
            push: vec![],
        });
    }
    Ok(b.finish(unitize(&g.counters), None, start, BTreeSet::from([accept])))
}

/// Controlled grammars: after expanding states with erase flags, `V1`
/// symbols live on the stack (the leftmost one on top) and every `C_i` is
/// a count in counter `i`. A `V1` production pushes its right-hand side
/// without the `V2` symbols and adds their counts; a `V2` production needs
/// `C_i` present and adds the count change. From a final state the
/// machine may switch to a check state that needs all counters zero,
/// matches the remaining terminals, and accepts at the bottom marker.
pub fn ccfgs_to_npcm(g: &StateGrammar) -> Result<CounterMachine, MachineError> {
    let control = g.control.as_ref().ok_or_else(|| fail("ccfgs-npcm: grammar has no V1/V2 partition"))?;
    if control.variant != CcfgsVariant::Classic {
        return Err(fail("ccfgs-npcm: no construction for grammars whose V2 rules write V1 symbols or terminals"));
    }
    let g = expand_ccfgs_states(g).map_err(|e| fail(e.to_string()))?;
    let control = g.control.clone().expect("expansion keeps the partition");
    let k = control.v2.len();
    let pd = grammar_stack(&g);
    let z = pd.bottom;
    let (mut b, q) = builder_for(&g, k);
    let start = b.fresh_state("m0");
    let check = b.fresh_state("chk");
    let accept = b.fresh_state("qf");
    b.add(Transition {
        label: "start".into(),
        from: start,
        read: None,
        guard: vec![Guard::Any; k],
        top: Some(z),
        to: q[g.initial.index()],
        update: vec![0; k],
        push: vec![stack_of(&g, Symbol::N(g.axiom)), z],
    });
    for p in &g.productions {
        let counts: Vec<i64> = control.v2.iter().map(|&c| p.count_in_rhs(c) as i64).collect();
        match control.position_in_v2(p.lhs) {
            None => {
                let push = p
                    .rhs
                    .iter()
                    .filter(|s| !matches!(s, Symbol::N(n) if control.is_v2(*n)))
                    .map(|&s| stack_of(&g, s))
                    .collect();
                let top = Some(stack_of(&g, Symbol::N(p.lhs)));
                b.add_path(&p.label, q[p.from.index()], &[], vec![Guard::Any; k], top, &counts, push, q[p.to.index()]);
            }
            Some(i) => {
                let mut guard = vec![Guard::Any; k];
                guard[i] = Guard::Positive;
                let mut update = counts.clone();
                update[i] -= 1;
                b.add_path(&p.label, q[p.from.index()], &[], guard, None, &update, vec![], q[p.to.index()]);
            }
        }
    }
    for &qi in q.iter().chain([&check]) {
        for t in 0..g.terminals.len() {
            let a = TermId(t as u32);
            b.add(Transition {
                label: format!("match {}", g.terminals[t]),
                from: qi,
                read: Some(a),
                guard: vec![Guard::Any; k],
                top: Some(stack_of(&g, Symbol::T(a))),
                to: qi,
                update: vec![0; k],
                push: vec![],
            });
        }
    }
    for &f in &g.finals {
        b.add(Transition {
            label: "check".into(),
            from: q[f.index()],
            read: None,
            guard: vec![Guard::Zero; k],
            top: None,
            to: check,
            update: vec![0; k],
            push: vec![],
        });
    }
    b.add(Transition {
        label: "accept".into(),
        from: check,
        read: None,
        guard: vec![Guard::Any; k],
        top: Some(z),
        to: accept,
        update: vec![0; k],
        push: vec![z],
    });
    let counters = if k == 0 { CounterSpec::none() } else { CounterSpec::reversal_bounded(k, 1) };
    Ok(b.finish(counters, Some(pd), start, BTreeSet::from([accept])))
}
