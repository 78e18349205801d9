//! Reference predicates and helpers shared by the integration tests. The
//! predicates look only at symbol names, never at a grammar, so they are
//! independent of the engines under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use stategram::derive::{enumerate, explore, DerivationMode, EraseOnce, ExplorationBudget, StepLabel, Word};
use stategram::grammar::{guards, CounterSpec, Discipline, GrammarBuilder, StateGrammar, Symbol};
use stategram::transform::{strip_counters, to_normal_form};

pub type Spelled = Vec<String>;

/// Every word over `alphabet` of length at most `n`.
pub fn all_words(alphabet: &[&str], n: usize) -> Vec<Spelled> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Spelled> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.to_string());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn filter(alphabet: &[&str], n: usize, pred: impl Fn(&[String]) -> bool) -> BTreeSet<Spelled> {
    all_words(alphabet, n).into_iter().filter(|w| pred(w)).collect()
}

pub fn spell(g: &StateGrammar, words: &BTreeSet<Word>) -> BTreeSet<Spelled> {
    words.iter().map(|w| w.iter().map(|&t| g.term_name(t).to_string()).collect()).collect()
}

pub fn spelled(words: &[&str]) -> BTreeSet<Spelled> {
    words.iter().map(|w| w.split_whitespace().map(str::to_string).collect()).collect()
}

/// A budget large enough that only the word length bound matters for the
/// small grammars used here.
pub fn generous(len: usize) -> ExplorationBudget {
    ExplorationBudget::new(400, len + 12, len as u64 + 4).words_up_to(len)
}

/// Words of length at most `len` derivable in `mode`, by spelling.
pub fn lang(g: &StateGrammar, mode: DerivationMode, len: usize) -> BTreeSet<Spelled> {
    spell(g, &enumerate(g, mode, &generous(len)).expect("mode is valid"))
}

pub fn count(w: &[String], a: &str) -> usize {
    w.iter().filter(|s| *s == a).count()
}

/// `a1^n b1^n ... ak^n bk^n` with `n >= 1`.
pub fn is_example1(k: usize, w: &[String]) -> bool {
    if w.is_empty() || w.len() % (2 * k) != 0 {
        return false;
    }
    let n = w.len() / (2 * k);
    (0..2 * k).all(|block| {
        let name = if block % 2 == 0 { format!("a{}", block / 2 + 1) } else { format!("b{}", block / 2 + 1) };
        w[block * n..(block + 1) * n].iter().all(|s| *s == name)
    })
}

/// `x$x` with `|x|_a = |x|_b`.
pub fn is_wdollarw(w: &[String]) -> bool {
    let Some(i) = w.iter().position(|s| s == "$") else {
        return false;
    };
    let (x, y) = (&w[..i], &w[i + 1..]);
    x == y && !x.iter().any(|s| s == "$") && count(x, "a") == count(x, "b")
}

/// Properly nested brackets over `a/a'` and `b/b'`.
pub fn is_dyck2(w: &[String]) -> bool {
    let mut stack = Vec::new();
    for s in w {
        match s.as_str() {
            "a" | "b" => stack.push(s.as_str()),
            "a'" if stack.pop() == Some("a") => {}
            "b'" if stack.pop() == Some("b") => {}
            _ => return false,
        }
    }
    stack.is_empty()
}

pub fn is_dyck_equal(w: &[String]) -> bool {
    is_dyck2(w) && count(w, "a") == count(w, "b")
}

pub fn is_square(w: &[String]) -> bool {
    w.len() % 2 == 0 && w[..w.len() / 2] == w[w.len() / 2..]
}

pub fn is_ab_equal(w: &[String]) -> bool {
    count(w, "a") == count(w, "b")
}

/// `(a^n b^n)` with `n >= 1`, repeated once or twice.
pub fn is_blocks(w: &[String]) -> bool {
    fn block(w: &[String]) -> bool {
        let n = w.len() / 2;
        n >= 1 && w.len() == 2 * n && w[..n].iter().all(|s| s == "a") && w[n..].iter().all(|s| s == "b")
    }
    block(w) || (1..w.len()).any(|i| block(&w[..i]) && block(&w[i..]))
}

// Oracles that walk a grammar by hand, without the derivation engine.

/// Final counter values of every complete derivation of a monotonic
/// grammar, found by expanding the leftmost nonterminal in all ways.
/// Monotonic counters only add, so the order of rewriting is immaterial.
pub fn all_final_counters(g: &StateGrammar) -> BTreeSet<u64> {
    fn go(g: &StateGrammar, form: Vec<Symbol>, counter: u64, out: &mut BTreeSet<u64>) {
        let Some(pos) = form.iter().position(|s| s.is_nonterminal()) else {
            out.insert(counter);
            return;
        };
        let Symbol::N(a) = form[pos] else { unreachable!() };
        for p in g.productions.iter().filter(|p| p.lhs == a) {
            let mut next = form[..pos].to_vec();
            next.extend_from_slice(&p.rhs);
            next.extend_from_slice(&form[pos + 1..]);
            go(g, next, counter + p.update[0] as u64, out);
        }
    }
    let mut out = BTreeSet::new();
    go(g, vec![Symbol::N(g.axiom)], 0, &mut out);
    out
}

/// Index-1 search by hand: forms with at most one nonterminal, any rule,
/// counters ignored. Returns whether a terminal form in a final state is
/// reachable. Sound for counter-free grammars.
pub fn index_one_nonempty(g: &StateGrammar) -> bool {
    let start = (g.initial, vec![Symbol::N(g.axiom)]);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((q, form)) = queue.pop_front() {
        let Some(pos) = form.iter().position(|s| s.is_nonterminal()) else {
            if g.is_final(q) {
                return true;
            }
            continue;
        };
        let Symbol::N(a) = form[pos] else { unreachable!() };
        for p in g.productions.iter().filter(|p| p.from == q && p.lhs == a) {
            let mut next: Vec<Symbol> = form[..pos].to_vec();
            next.extend(p.rhs.iter().copied().filter(|s| s.is_nonterminal()));
            next.extend_from_slice(&form[pos + 1..]);
            if next.iter().filter(|s| s.is_nonterminal()).count() <= 1 && seen.insert((p.to, next.clone())) {
                queue.push_back((p.to, next));
            }
        }
    }
    false
}

// Synthetic counter grammars and transform checks.

pub fn anbn_counter() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["u", "d", "f"])
        .initial("u")
        .finals(["f"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 1))
        .counter_rule("u", &guards("*"), "S", "u", &[1], "a S")
        .counter_rule("u", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("p"), "S", "d", &[-1], "b S")
        .counter_rule("d", &guards("z"), "S", "f", &[0], "")
        .build()
        .unwrap()
}

/// `a^n b^m c^n d^m`, two counters, zero tests at the phase changes.
pub fn crossed_counts() -> StateGrammar {
    GrammarBuilder::new()
        .nonterminals(["S", "T", "U", "V"])
        .terminals(["a", "b", "c", "d"])
        .states(["u", "v", "w", "x", "f"])
        .initial("u")
        .finals(["f"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(2, 1))
        .counter_rule("u", &guards("**"), "S", "u", &[1, 0], "a S")
        .counter_rule("u", &guards("**"), "S", "v", &[0, 0], "T")
        .counter_rule("v", &guards("**"), "T", "v", &[0, 1], "b T")
        .counter_rule("v", &guards("**"), "T", "w", &[0, 0], "U")
        .counter_rule("w", &guards("p*"), "U", "w", &[-1, 0], "c U")
        .counter_rule("w", &guards("z*"), "U", "x", &[0, 0], "V")
        .counter_rule("x", &guards("zp"), "V", "x", &[0, -1], "d V")
        .counter_rule("x", &guards("zz"), "V", "f", &[0, 0], "")
        .build()
        .unwrap()
}

/// The grammar with every reversal bound lifted, so the engine prunes
/// nothing and phase violations would show up in explored derivations.
pub fn unbounded(g: &StateGrammar) -> StateGrammar {
    let mut h = g.clone();
    h.counters.discipline = Discipline::ReversalBounded(vec![1000; g.counters.count]);
    h
}

pub fn assert_no_increment_after_decrement(g: &StateGrammar, len: usize) {
    let relaxed = unbounded(g);
    let ex = explore(&relaxed, DerivationMode::Free, &generous(len), EraseOnce::HistoryFlags).unwrap();
    for i in 0..ex.configs.len() {
        let d = ex.derivation_to(i);
        let mut down = vec![false; g.counters.count];
        for (label, _) in &d.steps {
            let StepLabel::Rule(pi) = label else { unreachable!() };
            for (j, &u) in g.productions[*pi].update.iter().enumerate() {
                assert!(!(down[j] && u > 0), "counter {j} increments after a decrement:\n{}", d.trace(g));
                if u < 0 {
                    down[j] = true;
                }
            }
        }
    }
}

/// Words of `g` up to `len` recovered from the counter-free grammar: the
/// stripped side gets room for every counter letter a word of that length
/// can carry.
pub fn stripped_words(g: &StateGrammar, len: usize, cap: usize) -> BTreeSet<Spelled> {
    let nf = to_normal_form(g).unwrap();
    let (h, filter) = strip_counters(&nf).unwrap();
    assert_eq!(h.counters.count, 0);
    let extra = 2 * nf.counters.count * cap;
    let b = ExplorationBudget::new(600, len + extra + 12, 1).words_up_to(len + extra);
    let kept = filter.apply(&enumerate(&h, DerivationMode::Free, &b).unwrap());
    spell(&h, &kept).into_iter().filter(|w| w.len() <= len).collect()
}
