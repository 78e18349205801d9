//! Runs the grammar conversions on small inputs and checks that the
//! bounded languages agree.

use stategram::corpus;
use stategram::derive::{enumerate, render_words, DerivationMode, ExplorationBudget};
use stategram::grammar::StateGrammar;
use stategram::transform::{
    cfgmc_to_ccfgs, cfgmc_to_cfgsc, cfgs_to_regctrl, degeneralize, regctrl_to_cfgs, strip_counters, to_normal_form,
};

fn words(g: &StateGrammar, mode: DerivationMode, len: usize) -> Vec<String> {
    let b = ExplorationBudget::new(400, len + 12, len as u64 + 4).words_up_to(len);
    render_words(g, &enumerate(g, mode, &b).unwrap())
}

fn main() {
    let free = DerivationMode::Free;

    // States moved into a control automaton over rule labels, and back.
    let g2 = corpus::example1(2);
    let c = cfgs_to_regctrl(&g2).unwrap();
    println!("control automaton: {} states, {} transitions", c.control.states.len(), c.control.transitions.len());
    let back = regctrl_to_cfgs(&c).unwrap();
    println!("G2 {:?}\nback {:?}", words(&g2, free, 8), words(&back, free, 8));

    // A 3-reversal counter becomes two 1-reversal counters.
    let blocks = corpus::blocks_r3();
    let nf = to_normal_form(&blocks).unwrap();
    println!("\nnormal form: {} counters, {} rules", nf.counters.count, nf.productions.len());
    println!("before {:?}\nafter  {:?}", words(&blocks, free, 6), words(&nf, free, 6));

    // Counters turned into marker letters; the filter keeps balanced words.
    let (stripped, filter) = strip_counters(&to_normal_form(&corpus::example2()).unwrap()).unwrap();
    println!("\nstripped grammar has {} terminals, {} marker pairs", stripped.terminals.len(), filter.pairs.len());

    // Monotonic counters: drained into a reversal-bounded grammar, or
    // simulated by a controlled grammar.
    let dyck = corpus::dyck_equal();
    let drained = cfgmc_to_cfgsc(&dyck).unwrap();
    let controlled = cfgmc_to_ccfgs(&dyck).unwrap();
    println!("\ndyck       {:?}", words(&dyck, free, 4));
    println!("drained    {:?}", words(&drained, free, 4));
    println!("controlled {:?}", words(&controlled, DerivationMode::Controlled, 4));

    // Binary increments replaced by unit steps.
    let inst = stategram::reduce::SubsetSumInstance::new(vec![3, 5], 8).unwrap();
    let g = stategram::reduce::subset_sum_to_rlgsc(&inst);
    let h = degeneralize(&g).unwrap();
    println!("\ndegeneralized: {} -> {} rules, {} -> {} counters", g.productions.len(), h.productions.len(), g.counters.count, h.counters.count);
}
