mod common;

use common::*;
use stategram::corpus;
use stategram::decide::{
    cfgsc_index_emptiness, cfgsc_index_emptiness_mode, erase_terminals, index_grammar_to_ncm, prepare, DecideError,
    IndexEmptiness,
};
use stategram::derive::{enumerate, DerivationMode};
use stategram::machine::{fire, ncm_empty_bounded};
use stategram::reduce::{brute_force, subset_sum_to_cfgsc, SubsetSumInstance};

#[test]
fn erased_g2_generates_only_lambda() {
    let h = erase_terminals(&corpus::example1(2));
    assert!(h.terminals.is_empty() || h.productions.iter().all(|p| p.rhs.iter().all(|s| s.is_nonterminal())));
    assert_eq!(lang(&h, DerivationMode::Free, 4), spelled(&[""]));
}

#[test]
fn erased_example2_generates_only_lambda() {
    let h = erase_terminals(&corpus::example2());
    assert_eq!(lang(&h, DerivationMode::Free, 4), spelled(&[""]));
}

#[test]
fn erased_grammar_without_reachable_final_is_empty() {
    let mut g = corpus::example1(2);
    g.finals.clear();
    assert!(lang(&erase_terminals(&g), DerivationMode::Free, 4).is_empty());
    for m in 1..=3 {
        assert!(!cfgsc_index_emptiness(&g, m, 4).unwrap().is_nonempty());
    }
}

#[test]
fn g2_index_machine_shape() {
    let h = prepare(&corpus::example1(2)).unwrap();
    let im = index_grammar_to_ncm(&h, 2).unwrap();
    let m = &im.machine;
    assert!(m.is_stackless());
    assert!(m.transitions.iter().all(|t| t.read.is_none()));
    // |Q| * (1 + |V| + |V|^2) bracket states plus the accepting state.
    assert!(m.states.len() <= 2 * (1 + 3 + 9) + 1);
    for s in m.states.iter().filter(|s| s.starts_with('[')) {
        let w = s.trim_start_matches('[').trim_end_matches(']').split_once(',').unwrap().1;
        assert!(w.is_empty() || w.split('.').count() <= 2, "{s}");
    }
    assert!(ncm_empty_bounded(m, 2).unwrap().is_nonempty());
}

#[test]
fn g2_needs_index_two() {
    let g = corpus::example1(2);
    assert!(cfgsc_index_emptiness(&g, 2, 4).unwrap().is_nonempty());
    let at_one = cfgsc_index_emptiness(&g, 1, 4).unwrap();
    match at_one {
        IndexEmptiness::EmptyWithinBound { m: 1, index_limited: true, .. } => {}
        other => panic!("{other}"),
    }
    assert!(!index_one_nonempty(&g));
    assert!(index_one_nonempty(&corpus::blocks_r3()));
}

#[test]
fn reduction_grammar_through_the_index_machine() {
    let inst = SubsetSumInstance::new(vec![3, 5, 2], 5).unwrap();
    let (g, m, cap) = subset_sum_to_cfgsc(&inst);
    assert_eq!(cap, 15);
    let r = cfgsc_index_emptiness_mode(&g, DerivationMode::Leftmost, m, 10).unwrap();
    assert!(r.is_nonempty(), "{r}");

    let inst = SubsetSumInstance::new(vec![2, 4], 7).unwrap();
    let (g, m, cap) = subset_sum_to_cfgsc(&inst);
    let r = cfgsc_index_emptiness_mode(&g, DerivationMode::Leftmost, m, cap).unwrap();
    assert!(!r.is_nonempty());
    assert!(brute_force(&inst).is_none());
}

#[test]
fn preconditions_are_reported() {
    let h = prepare(&corpus::example1(2)).unwrap();
    assert_eq!(index_grammar_to_ncm(&h, 0).unwrap_err(), DecideError::ZeroIndex);
    assert_eq!(index_grammar_to_ncm(&corpus::example1(2), 2).unwrap_err(), DecideError::HasTerminals);
    assert_eq!(
        index_grammar_to_ncm(&erase_terminals(&corpus::blocks_r3()), 2).unwrap_err(),
        DecideError::NotNormalized
    );
}

#[test]
fn corpus_answers_at_documented_parameters() {
    for e in corpus::corpus() {
        let r = cfgsc_index_emptiness(&e.grammar, e.index, e.cap).unwrap();
        assert_eq!(r.is_nonempty(), e.nonempty, "{}: {r}", e.name);
    }
}

#[test]
fn nonempty_answers_replay_and_are_confirmed_by_derivation() {
    for e in corpus::corpus() {
        let r = cfgsc_index_emptiness(&e.grammar, e.index, e.cap).unwrap();
        let IndexEmptiness::NonEmpty { run, machine } = &r else { continue };
        let mut cur = run.start.clone();
        for (t, next) in &run.steps {
            let fired = fire(machine, &machine.transitions[*t], &cur, false);
            assert_eq!(fired.as_ref(), Some(next), "{}", e.name);
            cur = next.clone();
        }
        assert!(machine.accepting.contains(&cur.state), "{}", e.name);
        let mode = if e.grammar.control.is_some() { DerivationMode::Controlled } else { DerivationMode::Free };
        assert!(!enumerate(&e.grammar, mode, &generous(8)).unwrap().is_empty(), "{}", e.name);
    }
}

#[test]
fn larger_index_keeps_nonempty_answers() {
    for e in corpus::corpus() {
        let mut seen_nonempty = false;
        for m in 1..=e.index + 2 {
            let now = cfgsc_index_emptiness(&e.grammar, m, e.cap).unwrap().is_nonempty();
            assert!(!seen_nonempty || now, "{} lost its witness at m = {m}", e.name);
            seen_nonempty |= now;
        }
    }
}

#[test]
fn display_strings() {
    let g = corpus::example1(2);
    assert_eq!(
        cfgsc_index_emptiness(&g, 1, 4).unwrap().to_string(),
        "EMPTY within index 1 and counter cap 4 (conditional: some derivations need index > 1)"
    );
    let r = cfgsc_index_emptiness(&g, 2, 4).unwrap();
    assert!(r.to_string().starts_with("NONEMPTY (witness run of "), "{r}");
    assert_eq!(r.witness_labels().last().map(String::as_str), Some("accept"));
}
