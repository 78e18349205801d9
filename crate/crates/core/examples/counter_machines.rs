//! Builds counter machines from grammars and runs them.

use stategram::corpus;
use stategram::derive::ExplorationBudget;
use stategram::machine::{
    accepts, ccfgs_to_npcm, cfgsc_lm_to_npcm, enumerate_machine, lgsc_to_npcm1, ncm_empty_bounded, rlgsc_to_ncm,
    Emptiness, MachineMembership,
};
use stategram::transform::cfgmc_to_ccfgs;

fn main() {
    let budget = ExplorationBudget::new(400, 20, 8).words_up_to(8);

    // Pushdown machine following leftmost derivations.
    let g2 = corpus::example1(2);
    let m = cfgsc_lm_to_npcm(&g2).unwrap();
    println!("G2 machine: {} states, {} transitions", m.states.len(), m.transitions.len());
    let w: Vec<_> = ["a1", "b1", "a2", "b2"].iter().map(|s| g2.term(s).unwrap()).collect();
    if let MachineMembership::Yes(run) = accepts(&m, &w, &budget).unwrap() {
        println!("accepting run:\n{}", run.trace(&m));
    }

    // Controlled grammar for the Dyck language, then its machine.
    let c = cfgmc_to_ccfgs(&corpus::dyck_equal()).unwrap();
    let m = ccfgs_to_npcm(&c).unwrap();
    let words = enumerate_machine(&m, &budget.clone().words_up_to(4)).unwrap();
    println!("dyck machine words: {:?}", words.iter().map(|w| m.render_word(w)).collect::<Vec<_>>());

    // Right-linear grammars need no pushdown; linear ones reverse it once.
    let blocks = corpus::blocks_r3();
    let ncm = rlgsc_to_ncm(&blocks).unwrap();
    let npcm1 = lgsc_to_npcm1(&blocks).unwrap();
    println!("blocks: stackless {}, one-turn stack {}", ncm.is_stackless(), npcm1.pushdown.is_some());
    match ncm_empty_bounded(&ncm, 3).unwrap() {
        Emptiness::NonEmpty { word, run } => println!("nonempty: {} after {} steps", ncm.render_word(&word), run.steps.len()),
        Emptiness::EmptyWithinBound(cap) => println!("empty up to {cap}"),
    }
}
