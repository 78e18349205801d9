mod common;

use std::collections::BTreeSet;

use common::*;
use stategram::corpus;
use stategram::derive::{explore, member, DerivationMode, EraseOnce, ExplorationBudget, Membership};
use stategram::grammar::{
    guards, validate, Acceptance, CounterSpec, GrammarBuilder, Guard, StateGrammar, UpdateStyle,
};
use stategram::machine::{ncm_empty_bounded, rlgsc_to_ncm};
use stategram::reduce::{binary_gadget, brute_force, subset_sum_to_rlgsc, SubsetSumInstance};
use stategram::transform::{
    cfgmc_to_ccfgs, cfgmc_to_cfgsc, cfgs_to_regctrl, degeneralize, expand_ccfgs_states, is_normal_form, lgs_to_lg,
    regctrl_to_cfgs, strip_counters, to_normal_form, ControlledCFG, Nfa,
};

const FREE: DerivationMode = DerivationMode::Free;
const CONTROLLED: DerivationMode = DerivationMode::Controlled;

fn two_state_linear() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["q0", "q1"])
        .initial("q0")
        .finals(["q0"])
        .axiom("S")
        .rule("q0", "S", "q1", "a S")
        .rule("q1", "S", "q0", "b")
        .build()
        .unwrap()
}

fn anbn_linear() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["q0", "f"])
        .initial("q0")
        .finals(["f"])
        .axiom("S")
        .rule("q0", "S", "q0", "a S b")
        .rule("q0", "S", "f", "")
        .build()
        .unwrap()
}

/// Drops counters, guards and updates, keeping the state graph.
fn skeleton(g: &StateGrammar) -> StateGrammar {
    let mut h = g.clone();
    h.counters = CounterSpec::none();
    h.acceptance = Acceptance::FinalState;
    for p in &mut h.productions {
        p.guard.clear();
        p.update.clear();
    }
    h
}

// ---------------------------------------------------------------------------
// Linear state grammars to one-state grammars

#[test]
fn lgs_to_lg_single_state_copy() {
    let g = anbn_linear();
    let h = lgs_to_lg(&g).unwrap();
    assert_eq!(h.states.len(), 1);
    assert_eq!(lang(&h, FREE, 10), lang(&g, FREE, 10));
    assert_eq!(lang(&h, FREE, 10), filter(&["a", "b"], 10, |w| {
        let n = w.len() / 2;
        w.len() % 2 == 0 && w[..n].iter().all(|s| s == "a") && w[n..].iter().all(|s| s == "b")
    }));
}

#[test]
fn lgs_to_lg_threads_two_states() {
    let g = two_state_linear();
    let h = lgs_to_lg(&g).unwrap();
    assert!(validate(&h).is_valid());
    assert_eq!(lang(&h, FREE, 10), lang(&g, FREE, 10));
}

#[test]
fn lgs_to_lg_on_a_reduction_skeleton() {
    let inst = SubsetSumInstance::new(vec![3, 5, 2], 5).unwrap();
    let g = skeleton(&subset_sum_to_rlgsc(&inst));
    assert!(validate(&g).is_valid(), "{}", validate(&g));
    let h = lgs_to_lg(&g).unwrap();
    assert_eq!(lang(&h, FREE, 10), lang(&g, FREE, 10));
}

#[test]
fn lgs_to_lg_rejects_context_free_input() {
    assert!(lgs_to_lg(&corpus::example1(2)).is_err());
}

// ---------------------------------------------------------------------------
// Regular control

fn plain_anbn() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["q"])
        .initial("q")
        .finals(["q"])
        .axiom("S")
        .labelled_rule("p1", "q", &[], "S", "q", &[], &["a", "S", "b"])
        .labelled_rule("p2", "q", &[], "S", "q", &[], &["a", "b"])
        .build()
        .unwrap()
}

fn nfa(states: usize, finals: &[usize], edges: &[(usize, &str, usize)]) -> Nfa {
    Nfa {
        states: (0..states).map(|i| format!("s{i}")).collect(),
        initial: 0,
        finals: finals.iter().copied().collect(),
        transitions: edges.iter().map(|&(a, l, b)| (a, l.to_string(), b)).collect(),
    }
}

#[test]
fn unconstrained_control_gives_the_base_language() {
    let base = plain_anbn();
    let c = ControlledCFG { base: base.clone(), control: nfa(1, &[0], &[(0, "p1", 0), (0, "p2", 0)]) };
    let g = regctrl_to_cfgs(&c).unwrap();
    let b = generous(10);
    assert_eq!(spell(&g, &c.enumerate(&b)), lang(&base, FREE, 10));
    assert_eq!(lang(&g, FREE, 10), lang(&base, FREE, 10));
}

#[test]
fn control_selects_label_sequences() {
    // (p1 p1 p2 + p2)
    let control = nfa(4, &[3], &[(0, "p1", 1), (1, "p1", 2), (2, "p2", 3), (0, "p2", 3)]);
    let c = ControlledCFG { base: plain_anbn(), control };
    let b = generous(6);
    let reference = spell(&c.base, &c.enumerate(&b));
    assert_eq!(reference, spelled(&["a b", "a a a b b b"]));
    let g = regctrl_to_cfgs(&c).unwrap();
    assert_eq!(lang(&g, FREE, 6), reference);
}

#[test]
fn nondeterministic_control_is_determinized() {
    // p1* p2 with a redundant branch on p1.
    let control = nfa(3, &[2], &[(0, "p1", 0), (0, "p1", 1), (1, "p1", 1), (0, "p2", 2), (1, "p2", 2)]);
    let c = ControlledCFG { base: plain_anbn(), control };
    assert!(!c.control.is_deterministic());
    let g = regctrl_to_cfgs(&c).unwrap();
    assert_eq!(lang(&g, FREE, 10), spell(&c.base, &c.enumerate(&generous(10))));
}

#[test]
fn example1_to_control_and_back() {
    for k in [2, 3] {
        let g = corpus::example1(k);
        let c = cfgs_to_regctrl(&g).unwrap();
        assert_eq!(c.base.states.len(), 1);
        assert_eq!(c.base.counters.count, 0);
        let len = 12;
        let original = lang(&g, FREE, len);
        assert_eq!(spell(&c.base, &c.enumerate(&generous(len))), original, "G_{k} controlled");
        let back = regctrl_to_cfgs(&c).unwrap();
        assert_eq!(lang(&back, FREE, len), original, "G_{k} round trip");
    }
}

#[test]
fn one_state_grammar_gets_trivial_control() {
    let g = plain_anbn();
    let c = cfgs_to_regctrl(&g).unwrap();
    assert_eq!(c.control.states.len(), 1);
    assert_eq!(spell(&c.base, &c.enumerate(&generous(8))), lang(&g, FREE, 8));
}

// ---------------------------------------------------------------------------
// Normal form

#[test]
fn already_normal_counters_stay_normal() {
    let h = to_normal_form(&anbn_counter()).unwrap();
    assert!(is_normal_form(&h));
    assert_eq!(h.counters.count, 1);
    assert_eq!(h.acceptance, Acceptance::FinalStateZeroCounters);
    assert_eq!(h.finals.len(), 1);
}

#[test]
fn three_reversal_counter_splits_in_two() {
    let g = corpus::blocks_r3();
    let h = to_normal_form(&g).unwrap();
    assert_eq!(h.counters.count, 2);
    assert!(validate(&h).is_valid());
    let original = lang(&g, FREE, 10);
    assert_eq!(original, filter(&["a", "b"], 10, is_blocks));
    assert_eq!(lang(&h, FREE, 10), original);
    assert_no_increment_after_decrement(&h, 8);
}

#[test]
fn example2_normal_form_preserves_words() {
    let g = corpus::example2();
    let h = to_normal_form(&g).unwrap();
    assert_eq!(lang(&h, FREE, 5), spelled(&["$", "a b $ a b", "b a $ b a"]));
    assert_eq!(lang(&h, FREE, 9), lang(&g, FREE, 9));
    assert_no_increment_after_decrement(&h, 7);
}

#[test]
fn increment_on_a_positive_counter_after_a_decrement() {
    // a^n b^m a^l: up n, down m < n, up again l, no final test.
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["u", "d", "w"])
        .initial("u")
        .finals(["w"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 2))
        .counter_rule("u", &guards("*"), "S", "u", &[1], "a S")
        .counter_rule("u", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("p"), "S", "w", &[1], "a S")
        .counter_rule("w", &guards("p"), "S", "w", &[1], "a S")
        .counter_rule("w", &guards("p"), "S", "w", &[0], "a")
        .build()
        .unwrap();
    let h = to_normal_form(&g).unwrap();
    assert!(validate(&h).is_valid(), "{}", validate(&h));
    assert_eq!(h.counters.count, 2);
    let want = lang(&g, FREE, 9);
    assert!(want.contains(&spelled(&["a a b a a"]).pop_first().unwrap()));
    assert_eq!(lang(&h, FREE, 9), want);
}

// ---------------------------------------------------------------------------
// Stripping counters

#[test]
fn strip_and_filter_recovers_example2() {
    let g = corpus::example2();
    assert_eq!(stripped_words(&g, 5, 2), lang(&g, FREE, 5));
}

#[test]
fn strip_and_filter_recovers_synthetic_grammars() {
    for g in [anbn_counter(), crossed_counts()] {
        let want = lang(&g, FREE, 8);
        assert!(!want.is_empty());
        assert_eq!(stripped_words(&g, 8, 4), want);
    }
}

#[test]
fn unbalanced_increment_filters_to_nothing() {
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a"])
        .states(["q0", "f"])
        .initial("q0")
        .finals(["f"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 1))
        .acceptance(Acceptance::FinalStateZeroCounters)
        .counter_rule("q0", &guards("z"), "S", "f", &[1], "a")
        .build()
        .unwrap();
    assert!(lang(&g, FREE, 4).is_empty());
    assert!(stripped_words(&g, 4, 2).is_empty());
}

#[test]
fn counter_free_strip_is_identity() {
    let g = corpus::example1(2);
    let (h, f) = strip_counters(&g).unwrap();
    assert_eq!(h, g);
    assert!(f.pairs.is_empty());
}

// ---------------------------------------------------------------------------
// Monotonic counters

#[test]
fn dyck_drained_keeps_five_words() {
    let h = cfgmc_to_cfgsc(&corpus::dyck_equal()).unwrap();
    assert!(h.counters.is_reversal_bounded());
    assert_eq!(h.acceptance, Acceptance::FinalStateZeroCounters);
    assert_eq!(lang(&h, FREE, 4), spelled(&["", "a a' b b'", "b b' a a'", "a b b' a'", "b a a' b'"]));
    assert_eq!(lang(&h, FREE, 6), lang(&corpus::dyck_equal(), FREE, 6));
}

#[test]
fn counter_free_monotonic_grammar_passes_through() {
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .axiom("S")
        .counters(CounterSpec::monotonic(0))
        .monotonic_rule("S", &[], "a S b")
        .monotonic_rule("S", &[], "")
        .build()
        .unwrap();
    let h = cfgmc_to_cfgsc(&g).unwrap();
    assert_eq!(lang(&h, FREE, 8), lang(&g, FREE, 8));
}

#[test]
fn drained_gadget_generates_lambda() {
    let g = binary_gadget(&[true, true]).unwrap();
    let h = cfgmc_to_cfgsc(&g).unwrap();
    assert_eq!(lang(&h, FREE, 2), spelled(&[""]));
    // The drain starts from 3 and needs exactly three decrements.
    let ex = explore(&h, FREE, &generous(0), EraseOnce::HistoryFlags).unwrap();
    for &i in &ex.accepted {
        let d = ex.derivation_to(i);
        let peak = d.configs().map(|c| c.counters[0]).max().unwrap();
        assert_eq!(peak, 3);
    }
    assert!(stategram::decide::cfgsc_index_emptiness(&g, 3, 3).unwrap().is_nonempty());
}

#[test]
fn dyck_to_controlled_keeps_five_words() {
    let g = corpus::dyck_equal();
    let h = cfgmc_to_ccfgs(&g).unwrap();
    assert!(validate(&h).is_valid());
    assert_eq!(h.control.as_ref().unwrap().v2.len(), 2);
    assert_eq!(lang(&h, CONTROLLED, 4), lang(&g, FREE, 4));
    let expanded = expand_ccfgs_states(&h).unwrap();
    assert_eq!(lang(&expanded, CONTROLLED, 4), lang(&g, FREE, 4));
}

#[test]
fn single_counter_lambda_rule() {
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a"])
        .axiom("S")
        .counters(CounterSpec::monotonic(1))
        .monotonic_rule("S", &[1], "")
        .build()
        .unwrap();
    assert_eq!(lang(&g, FREE, 3), spelled(&[""]));
    assert_eq!(lang(&cfgmc_to_ccfgs(&g).unwrap(), CONTROLLED, 3), spelled(&[""]));
    assert_eq!(lang(&cfgmc_to_cfgsc(&g).unwrap(), FREE, 3), spelled(&[""]));
}

#[test]
fn forced_imbalance_is_empty_on_both_sides() {
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a"])
        .axiom("S")
        .counters(CounterSpec::monotonic(2))
        .monotonic_rule("S", &[1, 0], "a S")
        .monotonic_rule("S", &[1, 0], "a")
        .build()
        .unwrap();
    for len in [2, 4, 6] {
        assert!(lang(&g, FREE, len).is_empty());
        assert!(lang(&cfgmc_to_ccfgs(&g).unwrap(), CONTROLLED, len).is_empty());
        assert!(lang(&cfgmc_to_cfgsc(&g).unwrap(), FREE, len).is_empty());
    }
}

// ---------------------------------------------------------------------------
// State expansion of controlled grammars

#[test]
fn expanded_remark_grammar_generates_squares() {
    let g = corpus::remark_case1();
    let h = expand_ccfgs_states(&g).unwrap();
    assert!(validate(&h).is_valid());
    let squares = filter(&["a", "b"], 6, is_square);
    assert_eq!(lang(&h, CONTROLLED, 6), squares);
    assert_eq!(lang(&g, CONTROLLED, 6), squares);
}

#[test]
fn expansion_without_erasing_rules_changes_nothing() {
    let g = GrammarBuilder::new()
        .nonterminals(["S", "C1"])
        .terminals(["a"])
        .states(["q"])
        .initial("q")
        .finals(["q"])
        .axiom("S")
        .control(["C1"], stategram::grammar::CcfgsVariant::Classic)
        .rule("q", "S", "q", "a S")
        .rule("q", "S", "q", "a")
        .rule("q", "C1", "q", "C1 C1")
        .build()
        .unwrap();
    let h = expand_ccfgs_states(&g).unwrap();
    for mode_len in [2, 4, 6] {
        assert_eq!(lang(&h, CONTROLLED, mode_len), lang(&g, FREE, mode_len));
    }
}

// ---------------------------------------------------------------------------
// Degeneralization

fn plus(c: i64) -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["A"])
        .terminals(["a"])
        .states(["q", "p"])
        .initial("q")
        .finals(["p"])
        .axiom("A")
        .counters(CounterSpec::reversal_bounded(1, 1).generalized())
        .counter_rule("q", &[Guard::Any], "A", "p", &[c], "a")
        .build()
        .unwrap()
}

/// Counter values of the original counters on every terminal configuration.
fn final_gains(h: &StateGrammar) -> BTreeSet<u64> {
    let ex = explore(h, FREE, &ExplorationBudget::new(200, 8, 64), EraseOnce::HistoryFlags).unwrap();
    ex.configs.iter().filter(|c| c.is_terminal()).map(|c| c.counters[0]).collect()
}

#[test]
fn plus_one_needs_no_gadget() {
    let h = degeneralize(&plus(1)).unwrap();
    assert_eq!(h.productions.len(), 1);
    assert_eq!(final_gains(&h), BTreeSet::from([1]));
}

#[test]
fn plus_five_gains_exactly_five() {
    let h = degeneralize(&plus(5)).unwrap();
    assert_eq!(h.counters.count, 3);
    assert_eq!(h.counters.update_style, UpdateStyle::Unit);
    assert_eq!(final_gains(&h), BTreeSet::from([5]));
    assert_eq!(lang(&h, FREE, 2), spelled(&["a"]));
}

#[test]
fn every_constant_up_to_forty_is_exact() {
    for c in 1..=40 {
        assert_eq!(final_gains(&degeneralize(&plus(c)).unwrap()), BTreeSet::from([c as u64]), "+{c}");
    }
}

#[test]
fn degeneralized_reduction_keeps_its_answer() {
    for (values, target) in [(vec![3, 5, 2], 5), (vec![2, 4], 7), (vec![1], 1), (vec![6], 5)] {
        let inst = SubsetSumInstance::new(values, target).unwrap();
        let g = subset_sum_to_rlgsc(&inst);
        let h = degeneralize(&g).unwrap();
        assert!(validate(&h).is_valid());
        let m = rlgsc_to_ncm(&h).unwrap();
        let answer = ncm_empty_bounded(&m, inst.cap()).unwrap().is_nonempty();
        assert_eq!(answer, brute_force(&inst).is_some(), "{inst}");
    }
}

#[test]
fn degeneralize_keeps_index_one() {
    let inst = SubsetSumInstance::new(vec![3, 5, 2], 5).unwrap();
    let g = subset_sum_to_rlgsc(&inst);
    let h = degeneralize(&g).unwrap();
    let a = [g.term("a").unwrap()];
    let b = ExplorationBudget::new(200, 4, inst.cap()).words_up_to(1);
    let index = |g: &StateGrammar| match member(g, FREE, &a, &b).unwrap() {
        Membership::Yes(d) => d.index(),
        Membership::NoWithinBudget => panic!("instance is solvable"),
    };
    assert_eq!(index(&g), 1);
    assert_eq!(index(&h), index(&g));
}
