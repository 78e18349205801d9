//! Builds a two-state grammar by hand, validates and classifies it, and
//! prints it in the line format. Then lists the built-in corpus.

use stategram::corpus;
use stategram::format::print_grammar;
use stategram::grammar::{classify, guards, validate, CounterSpec, GrammarBuilder};

fn main() {
    // a^n b^n with the pairing checked by a 1-reversal counter.
    let g = GrammarBuilder::new()
        .nonterminals(["S"])
        .terminals(["a", "b"])
        .states(["up", "down", "done"])
        .initial("up")
        .finals(["done"])
        .axiom("S")
        .counters(CounterSpec::reversal_bounded(1, 1))
        .counter_rule("up", &guards("*"), "S", "up", &[1], "a S")
        .counter_rule("up", &guards("p"), "S", "down", &[-1], "b S")
        .counter_rule("down", &guards("p"), "S", "down", &[-1], "b S")
        .counter_rule("down", &guards("z"), "S", "done", &[0], "")
        .build()
        .expect("well formed");

    print!("validation: {}", validate(&g));
    let class = classify(&g);
    println!("shape: {:?}, lambda-free: {}", class.shape, class.lambda_free);
    println!("\n{}", print_grammar(&g));

    // A broken grammar reports every violation instead of failing.
    let mut broken = g.clone();
    broken.productions[0].update[0] = 7;
    print!("broken grammar: {}", validate(&broken));

    println!("\ncorpus:");
    for e in corpus::corpus() {
        let class = classify(&e.grammar);
        println!("  {:<18} {:?}, {} counters: {}", e.name, class.shape, e.grammar.counters.count, e.description);
    }
}
