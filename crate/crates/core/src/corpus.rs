//! Built-in example grammars with their known emptiness status.

use crate::grammar::{guards, CcfgsVariant, CounterSpec, GrammarBuilder, StateGrammar};

/// A named grammar plus the parameters under which the emptiness pipeline
/// is known to decide it.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub grammar: StateGrammar,
    pub nonempty: bool,
    /// An index bound covering some accepting derivation (when nonempty).
    pub index: usize,
    /// A counter cap covering that derivation.
    pub cap: u64,
}

pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "example1_k2",
            description: "a1^n b1^n a2^n b2^n, two states",
            grammar: example1(2),
            nonempty: true,
            index: 2,
            cap: 1,
        },
        CorpusEntry {
            name: "example1_k3",
            description: "a1^n b1^n a2^n b2^n a3^n b3^n, three states",
            grammar: example1(3),
            nonempty: true,
            index: 3,
            cap: 1,
        },
        CorpusEntry {
            name: "example2_wdollarw",
            description: "w$w with |w|_a = |w|_b, two 1-reversal counters",
            grammar: example2(),
            nonempty: true,
            index: 2,
            cap: 2,
        },
        CorpusEntry {
            name: "dyck_equal",
            description: "Dyck words over a/a', b/b' with as many a as b, monotonic counters",
            grammar: dyck_equal(),
            nonempty: true,
            index: 2,
            cap: 2,
        },
        CorpusEntry {
            name: "remark_case1",
            description: "xx with terminals written by V2 rules",
            grammar: remark_case1(),
            nonempty: true,
            index: 2,
            cap: 1,
        },
        CorpusEntry {
            name: "remark_case2",
            description: "xx with V1 symbols written by V2 rules",
            grammar: remark_case2(),
            nonempty: true,
            index: 2,
            cap: 1,
        },
        CorpusEntry {
            name: "ab_equal_cfgmc",
            description: "words over a, b with equally many of each, monotonic counters",
            grammar: ab_equal_cfgmc(),
            nonempty: true,
            index: 2,
            cap: 2,
        },
        CorpusEntry {
            name: "prop14_sketch",
            description: "controlled grammar simulating ab_equal_cfgmc by erasing C1 C2 blocks",
            grammar: prop14_sketch(),
            nonempty: true,
            index: 3,
            cap: 1,
        },
        CorpusEntry {
            name: "blocks_r3",
            description: "(a^n b^n) repeated once or twice, one 3-reversal counter",
            grammar: blocks_r3(),
            nonempty: true,
            index: 1,
            cap: 2,
        },
        CorpusEntry {
            name: "never_zero",
            description: "empty: the zero test after the first increment never passes",
            grammar: never_zero(),
            nonempty: false,
            index: 1,
            cap: 4,
        },
    ]
}

pub fn get(name: &str) -> Option<StateGrammar> {
    corpus().into_iter().find(|e| e.name == name).map(|e| e.grammar)
}

pub fn names() -> Vec<&'static str> {
    corpus().iter().map(|e| e.name).collect()
}

/// `G_k`: states q0..q(k-1), F = {q0}, L = { a1^n b1^n ... ak^n bk^n | n > 0 }.
pub fn example1(k: usize) -> StateGrammar {
    assert!(k >= 2, "example 1 needs k >= 2");
    let a: Vec<String> = (1..=k).map(|i| format!("A{i}")).collect();
    let q: Vec<String> = (0..k).map(|i| format!("q{i}")).collect();
    let mut b = GrammarBuilder::new()
        .nonterminals(std::iter::once("S".to_string()).chain(a.iter().cloned()))
        .terminals((1..=k).flat_map(|i| [format!("a{i}"), format!("b{i}")]))
        .states(q.iter().cloned())
        .initial("q0")
        .finals(["q0"])
        .axiom("S")
        .rule("q0", "S", "q0", &a.join(" "));
    for i in 1..=k {
        let from = &q[i - 1];
        let to = &q[i % k];
        b = b
            .rule(from, &a[i - 1], to, &format!("a{i} A{i} b{i}"))
            .rule(from, &a[i - 1], to, &format!("a{i} b{i}"));
    }
    b.build().expect("example 1 is well formed")
}

/// `{ w$w | w in {a,b}*, |w|_a = |w|_b }` with two 1-reversal counters.
pub fn example2() -> StateGrammar {
    let any = guards("**");
    GrammarBuilder::new()
        .nonterminals(["S", "A1", "A2"])
        .terminals(["a", "b", "$"])
        .states(["q0", "qa", "qb", "q1", "qf"])
        .initial("q0")
        .finals(["qf"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(2, 1))
        .counter_rule("q0", &guards("zz"), "S", "q0", &[0, 0], "A1 A2")
        .counter_rule("q0", &any, "A1", "qa", &[1, 0], "a A1")
        .counter_rule("q0", &any, "A1", "qb", &[0, 1], "b A1")
        .counter_rule("qa", &any, "A2", "q0", &[0, 0], "a A2")
        .counter_rule("qb", &any, "A2", "q0", &[0, 0], "b A2")
        .counter_rule("q0", &guards("zz"), "A1", "q1", &[0, 0], "A1")
        .counter_rule("q0", &guards("pp"), "A1", "q1", &[0, 0], "A1")
        .counter_rule("q1", &guards("pp"), "A1", "q1", &[-1, -1], "A1")
        .counter_rule("q1", &guards("zz"), "A2", "q1", &[0, 0], "")
        .counter_rule("q1", &guards("zz"), "A1", "qf", &[0, 0], "$")
        .build()
        .expect("example 2 is well formed")
}

/// `S -> (+1,0, S a S a' S) | (0,+1, S b S b' S) | (0,0, λ)`.
pub fn dyck_equal() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "a'", "b", "b'"])
        .axiom("S")
        .counters(CounterSpec::monotonic(2))
        .monotonic_rule("S", &[1, 0], "S a S a' S")
        .monotonic_rule("S", &[0, 1], "S b S b' S")
        .monotonic_rule("S", &[0, 0], "")
        .build()
        .expect("dyck grammar is well formed")
}

/// `S -> (+1,0, a S) | (0,+1, b S) | (0,0, λ)`.
pub fn ab_equal_cfgmc() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .axiom("S")
        .counters(CounterSpec::monotonic(2))
        .monotonic_rule("S", &[1, 0], "a S")
        .monotonic_rule("S", &[0, 1], "b S")
        .monotonic_rule("S", &[0, 0], "")
        .build()
        .expect("ab_equal is well formed")
}

/// The controlled grammar obtained from [`ab_equal_cfgmc`] by emitting a
/// C_i per increment and erasing C1 C2 blocks at the end.
pub fn prop14_sketch() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S'", "S", "C1", "C2"])
        .terminals(["a", "b"])
        .states(["q0", "q1", "q2", "qf"])
        .initial("q0")
        .finals(["qf"])
        .axiom("S'")
        .control(["C1", "C2"], CcfgsVariant::Classic)
        .rule("q0", "S'", "q0", "C1 C2 S")
        .rule("q0", "S", "q0", "C1 a S")
        .rule("q0", "S", "q1", "C1 a S")
        .rule("q0", "S", "q0", "C2 b S")
        .rule("q0", "S", "q1", "C2 b S")
        .rule("q0", "S", "q0", "")
        .rule("q0", "S", "q1", "")
        .rule("q1", "C1", "q2", "")
        .rule("q2", "C2", "q1", "")
        .rule("q2", "C2", "qf", "")
        .build()
        .expect("prop14 sketch is well formed")
}

fn remark_base(v1_terminals: bool) -> GrammarBuilder {
    let (a, b) = if v1_terminals { ("A", "B") } else { ("a", "b") };
    let mut nts = vec!["S"];
    if v1_terminals {
        nts.extend(["A", "B"]);
    }
    nts.extend(["C1", "C2"]);
    let variant = if v1_terminals { CcfgsVariant::NonterminalsInV2 } else { CcfgsVariant::TerminalsInV2 };
    GrammarBuilder::new()
        .nonterminals(nts)
        .terminals(["a", "b"])
        .states(["q0", "q1", "q2", "qa", "qb", "pa", "pb"])
        .initial("q0")
        .finals(["q2"])
        .axiom("S")
        .control(["C1", "C2"], variant)
        .rule("q0", "S", "qa", "C1 C2")
        .rule("q0", "S", "qb", "C1 C2")
        .rule("qa", "C1", "pa", &format!("{a} C1"))
        .rule("qa", "C1", "q1", "")
        .rule("qb", "C1", "pb", &format!("{b} C1"))
        .rule("qb", "C1", "q1", "")
        .rule("q1", "C2", "q2", "")
        .rule("pa", "C2", "qa", &format!("{a} C2"))
        .rule("pa", "C2", "qb", &format!("{a} C2"))
        .rule("pb", "C2", "qa", &format!("{b} C2"))
        .rule("pb", "C2", "qb", &format!("{b} C2"))
}

/// `{ xx | x in {a,b}* }`, V2 rules writing terminals.
pub fn remark_case1() -> StateGrammar {
    remark_base(false).build().expect("remark case 1 is well formed")
}

/// `{ xx | x in {a,b}* }`, V2 rules writing the V1 symbols A and B.
pub fn remark_case2() -> StateGrammar {
    remark_base(true)
        .rule("q2", "A", "q2", "a")
        .rule("q2", "B", "q2", "b")
        .build()
        .expect("remark case 2 is well formed")
}

/// One 3-reversal counter: `(a^n b^n)` once or twice. The grammar itself
/// would loop forever; the reversal bound cuts it at two blocks.
pub fn blocks_r3() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["u", "d", "f"])
        .initial("u")
        .finals(["f"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 3))
        .counter_rule("u", &guards("*"), "S", "u", &[1], "a S")
        .counter_rule("u", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("z"), "S", "u", &[1], "a S")
        .counter_rule("d", &guards("z"), "S", "f", &[0], "")
        .build()
        .expect("blocks grammar is well formed")
}

/// Empty language: once `p` is entered the counter is positive, so the
/// only terminating rule never fires.
pub fn never_zero() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["q", "p", "f"])
        .initial("q")
        .finals(["f"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 1))
        .counter_rule("q", &guards("*"), "S", "p", &[1], "a S")
        .counter_rule("p", &guards("*"), "S", "p", &[1], "a S")
        .counter_rule("p", &guards("z"), "S", "f", &[0], "b")
        .build()
        .expect("never-zero grammar is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{validate, Acceptance};

    #[test]
    fn corpus_validates() {
        for e in corpus() {
            let r = validate(&e.grammar);
            assert!(r.is_valid(), "{}: {r}", e.name);
        }
    }

    #[test]
    fn example1_shape() {
        let g = example1(2);
        assert_eq!(g.states, vec!["q0", "q1"]);
        assert_eq!(g.finals.len(), 1);
        assert!(g.is_final(g.state("q0").unwrap()));
    }

    #[test]
    fn example2_and_dyck_metadata() {
        let g = example2();
        assert_eq!(g.counters.count, 2);
        assert_eq!(g.acceptance, Acceptance::FinalState);
        let d = dyck_equal();
        assert_eq!(d.counters.count, 2);
        assert!(d.counters.is_monotonic());
        assert_eq!(d.acceptance, Acceptance::AllCountersEqual);
    }
}
