//! Decides emptiness of grammars restricted to derivations of bounded
//! index, with a counter cap.

use stategram::corpus;
use stategram::decide::cfgsc_index_emptiness;

fn main() {
    let g2 = corpus::example1(2);
    for m in [1, 2] {
        let r = cfgsc_index_emptiness(&g2, m, 4).unwrap();
        println!("G2 at index {m}: {r}");
        if r.is_nonempty() {
            println!("  rules used: {}", r.witness_labels().join(" "));
        }
    }
    println!();
    for e in corpus::corpus() {
        let r = cfgsc_index_emptiness(&e.grammar, e.index, e.cap).unwrap();
        println!("{:<18} index {} cap {}: {r}", e.name, e.index, e.cap);
    }
}
