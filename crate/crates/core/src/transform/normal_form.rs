use std::collections::BTreeSet;

use super::{precondition, prune_unreachable_states, Draft, TransformError};
use crate::grammar::{
    Acceptance, CounterSpec, Discipline, Guard, NtId, Production, StateGrammar, StateId, Symbol,
    UpdateStyle,
};

const PASS: &str = "normal-form";

#[derive(Clone, Copy)]
enum Tag {
    Zero(usize),
    Up(usize),
    Down(usize),
    Transfer(usize),
}

impl Tag {
    fn suffix(self) -> String {
        match self {
            Tag::Zero(i) => format!("z{i}"),
            Tag::Up(i) => format!("u{i}"),
            Tag::Down(i) => format!("d{i}"),
            Tag::Transfer(i) => format!("t{i}"),
        }
    }
}

/// Replaces the `r`-reversal counter at `pos` by `n = r/2 + 1` one-reversal
/// counters, tagging states with the phase of the active copy.
fn split_counter(g: &StateGrammar, pos: usize) -> StateGrammar {
    let bounds = match &g.counters.discipline {
        Discipline::ReversalBounded(rs) => rs.clone(),
        _ => unreachable!("checked by caller"),
    };
    let r = bounds[pos];
    let n = (r / 2 + 1) as usize;
    let even = r % 2 == 0;

    let mut d = Draft::alphabets_of(g);
    let x = d.fresh_nt("X");
    let name = |p: StateId, t: Tag| format!("{}/{}", g.state_name(p), t.suffix());
    let initial = d.state(&name(g.initial, Tag::Zero(0)));

    // Guard and update vectors: the original counter at `pos` is replaced by
    // the `n` new ones, `active` (1-based) carrying the given entry.
    let widen_g = |orig: &[Guard], active: &[(usize, Guard)]| -> Vec<Guard> {
        let mut mid = vec![Guard::Zero; n];
        for &(i, gd) in active {
            mid[i - 1] = gd;
        }
        orig[..pos].iter().copied().chain(mid).chain(orig[pos + 1..].iter().copied()).collect()
    };
    let widen_u = |orig: &[i64], active: &[(usize, i64)]| -> Vec<i64> {
        let mut mid = vec![0; n];
        for &(i, u) in active {
            mid[i - 1] = u;
        }
        orig[..pos].iter().copied().chain(mid).chain(orig[pos + 1..].iter().copied()).collect()
    };

    let mut transfer_targets: BTreeSet<(usize, StateId)> = BTreeSet::new();
    for p in &g.productions {
        let u = p.update[pos];
        let split: &[Guard] = match p.guard[pos] {
            Guard::Any => &[Guard::Zero, Guard::Positive],
            Guard::Zero => &[Guard::Zero],
            Guard::Positive => &[Guard::Positive],
        };
        let emit = |d: &mut Draft, tag: String, from: Tag, to: Tag, g_act: &[(usize, Guard)], u_act: &[(usize, i64)], rhs: Vec<Symbol>| {
            let from = d.state(&name(p.from, from));
            let to = d.state(&name(p.to, to));
            d.push(
                format!("{}/{tag}", p.label),
                from,
                widen_g(&p.guard, g_act),
                p.lhs,
                to,
                widen_u(&p.update, u_act),
                rhs,
            );
        };
        for &gd in split {
            match (gd, u) {
                (Guard::Zero, -1) => {}
                (Guard::Zero, 0) => {
                    for i in 0..=n {
                        emit(&mut d, format!("s1.{i}"), Tag::Zero(i), Tag::Zero(i), &[], &[], p.rhs.clone());
                    }
                    for i in 1..=n {
                        emit(&mut d, format!("s2.{i}"), Tag::Down(i), Tag::Zero(i), &[], &[], p.rhs.clone());
                    }
                }
                (Guard::Zero, _) => {
                    for i in 0..n {
                        emit(&mut d, format!("s3.{i}"), Tag::Zero(i), Tag::Up(i + 1), &[], &[(i + 1, 1)], p.rhs.clone());
                    }
                    for i in 1..n {
                        emit(&mut d, format!("s4.{i}"), Tag::Down(i), Tag::Up(i + 1), &[], &[(i + 1, 1)], p.rhs.clone());
                    }
                }
                (_, _) => {
                    let pos_i = |i: usize| [(i, Guard::Positive)];
                    if u >= 0 {
                        for i in 1..=n {
                            emit(&mut d, format!("s5.{i}"), Tag::Up(i), Tag::Up(i), &pos_i(i), &[(i, u)], p.rhs.clone());
                        }
                    }
                    if u <= 0 {
                        for i in 1..=n {
                            if u == -1 && even && i == n {
                                continue;
                            }
                            emit(&mut d, format!("s6.{i}"), Tag::Down(i), Tag::Down(i), &pos_i(i), &[(i, u)], p.rhs.clone());
                        }
                    }
                    if u == -1 {
                        for i in 1..=n {
                            if even && i == n {
                                continue;
                            }
                            emit(&mut d, format!("s7.{i}"), Tag::Up(i), Tag::Down(i), &pos_i(i), &[(i, u)], p.rhs.clone());
                        }
                    }
                    if u == 1 {
                        for i in 1..n {
                            let mut rhs = vec![Symbol::N(x)];
                            rhs.extend_from_slice(&p.rhs);
                            emit(&mut d, format!("s8.{i}"), Tag::Down(i), Tag::Transfer(i + 1), &pos_i(i), &[(i + 1, 1)], rhs);
                            transfer_targets.insert((i + 1, p.to));
                        }
                    }
                }
            }
        }
    }

    // Transfer: empty c_{i-1} into c_i through X, then continue increasing c_i.
    let k = g.counters.count;
    for &(i, q) in &transfer_targets {
        let t = d.state(&name(q, Tag::Transfer(i)));
        let up = d.state(&name(q, Tag::Up(i)));
        let any_rest = vec![Guard::Any; k];
        let zero_rest = vec![0i64; k];
        d.push(
            format!("move{i}@{}", g.state_name(q)),
            t,
            widen_g(&any_rest, &[(i - 1, Guard::Positive), (i, Guard::Any)]),
            x,
            t,
            widen_u(&zero_rest, &[(i - 1, -1), (i, 1)]),
            vec![Symbol::N(x)],
        );
        d.push(
            format!("lift{i}@{}", g.state_name(q)),
            t,
            widen_g(&any_rest, &[(i, Guard::Positive)]),
            x,
            up,
            widen_u(&zero_rest, &[]),
            vec![],
        );
    }

    let mut finals = BTreeSet::new();
    for &q in &g.finals {
        let tags = (0..=n).map(Tag::Zero).chain((1..=n).flat_map(|i| [Tag::Up(i), Tag::Down(i)]));
        for t in tags {
            finals.insert(d.state(&name(q, t)));
        }
    }
    let mut rs = bounds[..pos].to_vec();
    rs.extend(std::iter::repeat(1).take(n));
    rs.extend_from_slice(&bounds[pos + 1..]);
    let counters = CounterSpec {
        count: rs.len(),
        discipline: Discipline::ReversalBounded(rs),
        update_style: UpdateStyle::Unit,
    };
    prune_unreachable_states(&d.finish(g.axiom, initial, finals, counters, None, g.acceptance))
}

/// Adds the unique accepting state `f`: any production entering an old
/// final state may instead enter `D` writing a fresh `X_f`, which drains
/// every counter and then hops to `f`.
fn close_final(g: &StateGrammar) -> StateGrammar {
    let k = g.counters.count;
    let mut d = Draft::symbols_of(g);
    let xf: NtId = d.fresh_nt("Xf");
    let drain = d.fresh_state("D");
    let f = d.fresh_state("f");
    for p in &g.productions {
        d.productions.push(p.clone());
        if g.is_final(p.to) {
            let mut rhs = vec![Symbol::N(xf)];
            rhs.extend_from_slice(&p.rhs);
            d.productions.push(Production { label: format!("{}/fin", p.label), to: drain, rhs, ..p.clone() });
        }
    }
    if g.acceptance == Acceptance::FinalState {
        for j in 0..k {
            let mut guard = vec![Guard::Any; k];
            guard[j] = Guard::Positive;
            let mut update = vec![0; k];
            update[j] = -1;
            d.push(format!("drain{}", j + 1), drain, guard, xf, drain, update, vec![Symbol::N(xf)]);
        }
    }
    d.push("accept", drain, vec![Guard::Zero; k], xf, f, vec![0; k], vec![]);
    let counters = CounterSpec::reversal_bounded(k, 1);
    let full = d.finish(g.axiom, g.initial, BTreeSet::from([f]), counters, None, Acceptance::FinalStateZeroCounters);
    let mut out = prune_unreachable_states(&full);
    // An empty language still gets its accepting state.
    if out.finals.is_empty() {
        out.states.push(full.state_name(f).to_string());
        out.finals.insert(StateId(out.states.len() as u32 - 1));
    }
    out
}

fn check_input(g: &StateGrammar) -> Result<(), TransformError> {
    if !g.counters.is_reversal_bounded() {
        return Err(precondition(PASS, "counters are not reversal-bounded"));
    }
    if g.counters.update_style == UpdateStyle::Generalized {
        return Err(precondition(PASS, "generalized updates; degeneralize first"));
    }
    if g.acceptance == Acceptance::AllCountersEqual {
        return Err(precondition(PASS, "equal-counter acceptance"));
    }
    Ok(())
}

/// Every intermediate grammar: one per processed counter, then the grammar
/// with the unique accepting state.
pub fn normal_form_stages(g: &StateGrammar) -> Result<Vec<StateGrammar>, TransformError> {
    check_input(g)?;
    let mut stages = Vec::new();
    let mut cur = g.clone();
    let mut pos = 0;
    for j in 0..g.counters.count {
        let r = g.counters.reversal_bound(j).unwrap_or(1);
        cur = split_counter(&cur, pos);
        pos += (r / 2 + 1) as usize;
        stages.push(cur.clone());
    }
    stages.push(close_final(&cur));
    Ok(stages)
}

/// Every counter 1-reversal, a single accepting state, zero counters at
/// the end.
pub fn to_normal_form(g: &StateGrammar) -> Result<StateGrammar, TransformError> {
    Ok(normal_form_stages(g)?.pop().expect("at least one stage"))
}

/// Structural check: unit 1-reversal counters, one final state and
/// acceptance with zero counters. Counter-free grammars qualify trivially.
pub fn is_normal_form(g: &StateGrammar) -> bool {
    if g.counters.count == 0 {
        return true;
    }
    let one_reversal = matches!(&g.counters.discipline, Discipline::ReversalBounded(rs) if rs.iter().all(|&r| r == 1));
    one_reversal
        && g.counters.update_style == UpdateStyle::Unit
        && g.acceptance == Acceptance::FinalStateZeroCounters
        && g.finals.len() == 1
        && g.productions.iter().all(|p| p.update.iter().all(|u| (-1..=1).contains(u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grammar::validate;

    #[test]
    fn blocks_r3_gets_two_counters() {
        let h = to_normal_form(&corpus::blocks_r3()).unwrap();
        assert!(validate(&h).is_valid(), "{}", validate(&h));
        assert_eq!(h.counters.count, 2);
        assert!(is_normal_form(&h));
        assert_eq!(h.state_name(h.initial), "u/z0");
    }

    #[test]
    fn one_reversal_keeps_count() {
        let h = to_normal_form(&corpus::example2()).unwrap();
        assert!(validate(&h).is_valid(), "{}", validate(&h));
        assert_eq!(h.counters.count, 2);
        assert!(is_normal_form(&h));
        assert_eq!(normal_form_stages(&corpus::example2()).unwrap().len(), 3);
    }

    #[test]
    fn rejects_counter_free() {
        assert!(to_normal_form(&corpus::example1(2)).is_err());
    }
}
