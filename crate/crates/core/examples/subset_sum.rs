//! Subset sum through grammar emptiness. Pass values and a target, e.g.
//! `cargo run --example subset_sum -- 3,5,2 5`.

use stategram::reduce::{
    binary_gadget, bits_of, brute_force, solve_subset_sum, subset_sum_to_cfgsc, Route, SubsetSumInstance,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (xs, target) = match args.as_slice() {
        [xs, t] => (xs.as_str(), t.as_str()),
        _ => ("3,5,2", "5"),
    };
    let inst = SubsetSumInstance::parse(xs, target).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });

    // The gadget for one value: a monotonic grammar whose counter ends at
    // exactly that value.
    let gadget = binary_gadget(&bits_of(inst.target)).unwrap();
    println!("gadget for {}: {} rules", inst.target, gadget.productions.len());

    let (g, m, cap) = subset_sum_to_cfgsc(&inst);
    println!("reduction grammar: {} rules, index {m}, counter cap {cap}", g.productions.len());

    for route in [Route::Cfgsc, Route::Rlgsc] {
        let ans = solve_subset_sum(&inst, route).unwrap();
        println!("{route:?}: solvable {} subset {:?}", ans.solvable, ans.subset);
    }
    println!("brute force: {:?}", brute_force(&inst));
}
