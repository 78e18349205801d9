mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use stategram::cli::run_command;
use stategram::decide::cfgsc_index_emptiness_mode;
use stategram::derive::{enumerate, explore, member, replay, DerivationMode, EraseOnce, ExplorationBudget, Membership};
use stategram::format::{parse_grammar_file, print_grammar};
use stategram::grammar::{guards, validate, CounterSpec, GrammarBuilder, StateGrammar};
use stategram::reduce::{
    binary_gadget, bits_value, brute_force, solve_subset_sum, subset_sum_to_cfgsc, Route, SubsetSumInstance,
};
use stategram::transform::{cfgs_to_regctrl, regctrl_to_cfgs, to_normal_form};

const NAMES: [&str; 4] = ["S", "A", "a", "b"];

/// A rule with every field drawn small: states index `q0/q1`, symbols
/// index `NAMES`. Right-hand sides always carry a terminal, so a word of
/// length `n` has derivations of at most `n` steps.
#[derive(Clone, Debug)]
struct Rule {
    from: usize,
    lhs: usize,
    to: usize,
    rhs: Vec<usize>,
    guard: char,
    update: i64,
}

fn rule(states: usize) -> impl Strategy<Value = Rule> {
    (
        0..states,
        0..2usize,
        0..states,
        proptest::collection::vec(0..4usize, 0..3),
        2..4usize,
        prop_oneof![Just('z'), Just('p'), Just('*')],
        -1..=1i64,
    )
        .prop_map(|(from, lhs, to, mut rhs, t, guard, update)| {
            rhs.insert(rhs.len() / 2, t);
            // A decrement needs a positive counter.
            let guard = if update < 0 { 'p' } else { guard };
            Rule { from, lhs, to, rhs, guard, update }
        })
}

fn rhs_text(r: &Rule) -> String {
    r.rhs.iter().map(|&i| NAMES[i]).collect::<Vec<_>>().join(" ")
}

fn builder(states: usize, finals: &[usize]) -> GrammarBuilder {
    let names: Vec<String> = (0..states).map(|q| format!("q{q}")).collect();
    GrammarBuilder::new()
        .nonterminals(["S", "A"])
        .terminals(["a", "b"])
        .states(names.clone())
        .initial("q0")
        .finals(finals.iter().map(|&q| names[q].clone()))
        .axiom("S")
}

fn counter_free(states: usize, finals: &[usize], rules: &[Rule]) -> StateGrammar {
    let mut b = builder(states, finals);
    for r in rules {
        b = b.rule(&format!("q{}", r.from), NAMES[r.lhs], &format!("q{}", r.to), &rhs_text(r));
    }
    b.build().unwrap()
}

fn one_counter(finals: &[usize], reversals: u32, rules: &[Rule]) -> StateGrammar {
    let mut b = builder(2, finals).counters(CounterSpec::reversal_bounded(1, reversals));
    for r in rules {
        let (from, to) = (format!("q{}", r.from), format!("q{}", r.to));
        b = b.counter_rule(&from, &guards(&r.guard.to_string()), NAMES[r.lhs], &to, &[r.update], &rhs_text(r));
    }
    b.build().unwrap()
}

fn single_state() -> impl Strategy<Value = StateGrammar> {
    proptest::collection::vec(rule(1), 1..6).prop_map(|rules| counter_free(1, &[0], &rules))
}

fn two_state() -> impl Strategy<Value = StateGrammar> {
    (proptest::collection::vec(rule(2), 1..7), prop_oneof![Just(vec![0]), Just(vec![1]), Just(vec![0, 1])])
        .prop_map(|(rules, finals)| counter_free(2, &finals, &rules))
}

fn counter_grammar() -> impl Strategy<Value = StateGrammar> {
    (proptest::collection::vec(rule(2), 1..7), prop_oneof![Just(vec![0]), Just(vec![1])], 1..4u32)
        .prop_map(|(rules, finals, r)| one_counter(&finals, r, &rules))
}

fn bits() -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), 1..9)
}

fn instance(max_k: usize, max_x: u64) -> impl Strategy<Value = SubsetSumInstance> {
    (proptest::collection::vec(1..=max_x, 1..=max_k), 1..=max_x)
        .prop_map(|(values, target)| SubsetSumInstance::new(values, target).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_of_rewriting_is_irrelevant_without_states(g in single_state()) {
        let b = ExplorationBudget::new(6, 6, 1).words_up_to(6);
        let free = enumerate(&g, DerivationMode::Free, &b).unwrap();
        prop_assert_eq!(&free, &enumerate(&g, DerivationMode::Leftmost, &b).unwrap());
        prop_assert_eq!(&free, &enumerate(&g, DerivationMode::Leftish, &b).unwrap());
    }

    #[test]
    fn membership_witnesses_replay(g in two_state()) {
        let b = ExplorationBudget::new(5, 5, 1).words_up_to(5);
        for mode in [DerivationMode::Free, DerivationMode::Leftmost] {
            for w in enumerate(&g, mode, &b).unwrap() {
                let Membership::Yes(d) = member(&g, mode, &w, &b).unwrap() else {
                    return Err(TestCaseError::fail("enumerated word is not a member"));
                };
                prop_assert!(replay(&g, mode, &d));
                prop_assert_eq!(d.last().word(), Some(w));
            }
        }
    }

    #[test]
    fn control_round_trip_keeps_words(g in two_state()) {
        let c = cfgs_to_regctrl(&g).unwrap();
        let b = ExplorationBudget::new(6, 6, 1).words_up_to(6);
        let want = spell(&g, &enumerate(&g, DerivationMode::Free, &b).unwrap());
        prop_assert_eq!(&spell(&c.base, &c.enumerate(&b)), &want);
        let back = regctrl_to_cfgs(&c).unwrap();
        prop_assert_eq!(&spell(&back, &enumerate(&back, DerivationMode::Free, &b).unwrap()), &want);
    }

    #[test]
    fn counters_respect_their_discipline(g in counter_grammar()) {
        let bound = g.counters.reversal_bound(0).unwrap();
        let ex = explore(&g, DerivationMode::Free, &generous(6), EraseOnce::HistoryFlags).unwrap();
        for c in &ex.configs {
            prop_assert!(c.reversals[0] <= bound);
        }
    }

    #[test]
    fn normal_form_keeps_words(g in counter_grammar()) {
        let h = to_normal_form(&g).unwrap();
        prop_assert!(validate(&h).is_valid(), "{}\n{}", validate(&h), print_grammar(&g));
        prop_assert_eq!(lang(&h, DerivationMode::Free, 5), lang(&g, DerivationMode::Free, 5));
    }

    #[test]
    fn printed_grammars_parse_back(g in prop_oneof![two_state(), counter_grammar()]) {
        prop_assert_eq!(parse_grammar_file(&print_grammar(&g)).unwrap(), g.clone());
        if g.counters.count > 0 {
            let h = to_normal_form(&g).unwrap();
            prop_assert_eq!(parse_grammar_file(&print_grammar(&h)).unwrap(), h);
        }
    }

    #[test]
    fn gadget_counts_its_value(bits in bits()) {
        let g = binary_gadget(&bits).unwrap();
        prop_assert_eq!(all_final_counters(&g), BTreeSet::from([bits_value(&bits)]));
    }

    #[test]
    fn both_routes_agree_with_brute_force(inst in instance(3, 12)) {
        let want = brute_force(&inst).is_some();
        for route in [Route::Cfgsc, Route::Rlgsc] {
            let ans = solve_subset_sum(&inst, route).unwrap();
            prop_assert_eq!(ans.solvable, want);
            if let Some(s) = ans.subset {
                prop_assert_eq!(s.iter().map(|&i| inst.values[i]).sum::<u64>(), inst.target);
            }
        }
    }

    #[test]
    fn larger_caps_keep_witnesses(inst in instance(2, 6)) {
        let (g, m, cap) = subset_sum_to_cfgsc(&inst);
        let mut seen = false;
        for c in [cap / 2, cap, cap + 2] {
            let now = cfgsc_index_emptiness_mode(&g, DerivationMode::Leftmost, m, c).unwrap().is_nonempty();
            prop_assert!(!seen || now);
            seen |= now;
        }
        prop_assert_eq!(seen, brute_force(&inst).is_some());
    }

    #[test]
    fn cli_reports_are_deterministic(inst in instance(3, 10)) {
        let xs = inst.values.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let argv: Vec<String> = ["stategram", "subset-sum", "--xs", &xs, "--target", &inst.target.to_string()]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let first = run_command(&argv);
        prop_assert_eq!(first.0, if brute_force(&inst).is_some() { 0 } else { 1 });
        prop_assert_eq!(run_command(&argv), first);
    }
}
