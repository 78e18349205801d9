//! Parses a grammar from text and drives the command-line front end.

use stategram::cli::run_command;
use stategram::format::{parse_grammar_file, print_grammar};

const TEXT: &str = "\
kind cfgsc
counters 1 reversal 1
states up down done
start_state up
final done
nonterminals S
terminals a b
axiom S
rule up [*] S -> up [+1] a S
rule up [p] S -> down [-1] b S
rule down [p] S -> down [-1] b S
rule down [z] S -> done [0] eps
";

fn run(args: &[&str]) {
    let argv: Vec<String> = std::iter::once("stategram").chain(args.iter().copied()).map(String::from).collect();
    let (status, out) = run_command(&argv);
    println!("$ stategram {}\n{out}[exit {status}]\n", args.join(" "));
}

fn main() {
    let g = parse_grammar_file(TEXT).expect("valid file");
    assert_eq!(parse_grammar_file(&print_grammar(&g)).unwrap(), g);

    let dir = std::env::temp_dir().join(format!("stategram-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("anbn.sg");
    std::fs::write(&file, TEXT).unwrap();
    let path = file.to_str().unwrap();

    run(&["classify", path]);
    run(&["enumerate", path, "--max-len", "6"]);
    run(&["member", path, "aabb", "--trace"]);
    run(&["empty", path, "--index", "1", "--cap", "3"]);
    run(&["subset-sum", "--xs", "2,4", "--target", "7"]);

    std::fs::remove_dir_all(&dir).ok();
}
