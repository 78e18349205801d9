//! Enumerates languages under the different derivation relations, finds a
//! membership witness and prints its trace.

use stategram::corpus;
use stategram::derive::{
    enumerate, member, min_index_witness, render_words, sweep_circular, DerivationConfig, DerivationMode,
    ExplorationBudget, Membership,
};

fn main() {
    let g2 = corpus::example1(2);
    let budget = ExplorationBudget::new(64, 20, 8).words_up_to(12);

    for mode in [DerivationMode::Free, DerivationMode::Leftmost, DerivationMode::Circular] {
        let words = enumerate(&g2, mode, &budget).expect("mode applies");
        println!("{mode:?}: {}", render_words(&g2, &words).join(", "));
    }

    // The w$w grammar loses every word under leftmost rewriting: the first
    // nonterminal must be finished before the second one can start.
    let w = corpus::example2();
    for mode in [DerivationMode::Free, DerivationMode::Leftmost] {
        let words = enumerate(&w, mode, &budget.clone().words_up_to(5)).unwrap();
        println!("example2 {mode:?}: {:?}", render_words(&w, &words));
    }

    // One circular sweep rewrites every nonterminal in turn.
    let start = DerivationConfig::initial(&g2);
    for c in sweep_circular(&g2, &start).unwrap() {
        for next in sweep_circular(&g2, &c).unwrap_or_default() {
            println!("sweep: {} => {}", c.render(&g2), next.render(&g2));
        }
    }

    let word: Vec<_> = ["a1", "a1", "b1", "b1", "a2", "a2", "b2", "b2"].iter().map(|s| g2.term(s).unwrap()).collect();
    match member(&g2, DerivationMode::Free, &word, &budget).unwrap() {
        Membership::Yes(d) => println!("\nderivation of index {}:\n{}", d.index(), d.trace(&g2)),
        Membership::NoWithinBudget => println!("not derivable within budget"),
    }
    let narrow = min_index_witness(&g2, DerivationMode::Free, &word, &budget, 3).unwrap();
    println!("smallest index: {:?}", narrow.map(|d| d.index()));
}
