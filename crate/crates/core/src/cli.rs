//! Command-line front end. [`run_command`] returns the exit status and the
//! report instead of printing, so it can be driven from tests.
//!
//! Exit status: 0 for success or a positive answer, 1 for a negative
//! answer (not a member, empty, invalid), 2 for errors.

use std::fmt::Write as _;
use std::fs;

use clap::{Args, Parser, Subcommand};

use crate::decide::{cfgsc_index_emptiness_mode, IndexEmptiness};
use crate::derive::{enumerate, member, render_words, DerivationMode, ExplorationBudget, Membership};
use crate::format::{
    kind_of, parse_controlled_file, parse_grammar_file, parse_machine_file, print_controlled, print_grammar,
    print_machine,
};
use crate::grammar::{classify, validate, Acceptance, Discipline, StateGrammar};
use crate::machine::{
    accepts, ccfgs_to_npcm, cfgsc_lm_to_npcm, enumerate_machine, lgsc_to_npcm1, ncm_empty_bounded, rlgsc_to_ncm,
    CounterMachine, Emptiness, MachineMembership,
};
use crate::reduce::{binary_gadget, bits_value, parse_bits, solve_subset_sum, Route, SubsetSumInstance};
use crate::transform::{
    cfgmc_to_ccfgs, cfgmc_to_cfgsc, cfgs_to_regctrl, degeneralize, expand_ccfgs_states, lgs_to_lg,
    regctrl_to_cfgs, strip_counters, to_normal_form,
};

#[derive(Parser, Debug)]
#[command(name = "stategram", about = "State grammars with counters: derivations, conversions, machines, emptiness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    /// Longest word to report.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    /// Derivation steps.
    #[arg(long, default_value_t = 64)]
    max_steps: usize,
    /// Largest counter value.
    #[arg(long, default_value_t = 8)]
    max_counter: u64,
    /// Longest sentential form (default: max-len + 8).
    #[arg(long)]
    max_form_len: Option<usize>,
}

impl BudgetArgs {
    fn budget(self) -> ExplorationBudget {
        let form = self.max_form_len.unwrap_or(self.max_len + 8);
        ExplorationBudget::new(self.max_steps, form, self.max_counter).words_up_to(self.max_len)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the well-formedness conditions of a grammar.
    Validate { file: String },
    /// Report kind, shape, λ-freeness, counters and acceptance.
    Classify { file: String },
    /// List the words generated within the budget, one per line.
    Enumerate {
        file: String,
        #[arg(long, default_value = "free")]
        mode: DerivationMode,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Search for a derivation of WORD.
    Member {
        file: String,
        word: String,
        #[arg(long, default_value = "free")]
        mode: DerivationMode,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Apply a conversion and write the resulting grammar.
    Transform {
        file: String,
        #[arg(long)]
        pass: String,
        #[arg(short = 'o', long = "out")]
        out: Option<String>,
    },
    /// Build a counter machine for a grammar.
    ToMachine {
        file: String,
        #[arg(long)]
        target: String,
        #[arg(short = 'o', long = "out")]
        out: Option<String>,
    },
    /// Run, enumerate or check emptiness of a machine file.
    Machine {
        #[command(subcommand)]
        action: MachineAction,
    },
    /// Emptiness through the finite-index counter-machine construction.
    Empty {
        file: String,
        #[arg(long)]
        index: usize,
        #[arg(long)]
        cap: u64,
        /// Defaults to controlled for controlled grammars, free otherwise.
        #[arg(long)]
        mode: Option<DerivationMode>,
    },
    /// Decide a subset-sum instance through a grammar reduction.
    SubsetSum {
        #[arg(long)]
        xs: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "cfgsc")]
        route: Route,
    },
    /// Write the binary-number gadget (bits least significant first).
    Gadget {
        #[arg(long)]
        binary: String,
        #[arg(short = 'o', long = "out")]
        out: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum MachineAction {
    Run {
        file: String,
        word: String,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Enumerate {
        file: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Empty {
        file: String,
        #[arg(long)]
        cap: u64,
    },
}

type Outcome = Result<(i32, String), String>;

/// Runs one invocation; `args[0]` is the program name.
pub fn run_command(args: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            return (status, e.render().to_string());
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => (2, format!("error: {e}\n")),
    }
}

fn read(path: &str) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn load_grammar(path: &str) -> Result<StateGrammar, String> {
    parse_grammar_file(&read(path)?).map_err(|e| format!("{path}: {e}"))
}

fn load_machine(path: &str) -> Result<CounterMachine, String> {
    parse_machine_file(&read(path)?).map_err(|e| format!("{path}: {e}"))
}

/// Writes `text` to `out`, or returns it as the report.
fn emit(text: String, out: Option<String>, summary: String) -> Outcome {
    match out {
        Some(path) => {
            fs::write(&path, text).map_err(|e| format!("{path}: {e}"))?;
            Ok((0, format!("{summary}\nwrote {path}\n")))
        }
        None => Ok((0, text)),
    }
}

fn lines(words: Vec<String>) -> String {
    words.into_iter().map(|w| w + "\n").collect()
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { file } => {
            let g = load_grammar(&file)?;
            let r = validate(&g);
            Ok((if r.is_valid() { 0 } else { 1 }, r.to_string()))
        }
        Command::Classify { file } => {
            let g = load_grammar(&file)?;
            Ok((0, classify_report(&g)))
        }
        Command::Enumerate { file, mode, budget } => {
            let g = load_grammar(&file)?;
            let words = enumerate(&g, mode, &budget.budget()).map_err(|e| e.to_string())?;
            Ok((0, lines(render_words(&g, &words))))
        }
        Command::Member { file, word, mode, trace, budget } => {
            let g = load_grammar(&file)?;
            let w = g.parse_word(&word).ok_or_else(|| format!("{word:?} is not a word over the terminals"))?;
            match member(&g, mode, &w, &budget.budget()).map_err(|e| e.to_string())? {
                Membership::Yes(d) => {
                    let mut s = format!("member ({} steps, index {})\n", d.len(), d.index());
                    if trace {
                        s.push_str(&d.trace(&g));
                    }
                    Ok((0, s))
                }
                Membership::NoWithinBudget => Ok((1, "not a member within budget\n".into())),
            }
        }
        Command::Transform { file, pass, out } => transform(&file, &pass, out),
        Command::ToMachine { file, target, out } => {
            let g = load_grammar(&file)?;
            let m = match target.as_str() {
                "npcm-lm" => cfgsc_lm_to_npcm(&g),
                "ccfgs-npcm" => ccfgs_to_npcm(&g),
                "ncm" => rlgsc_to_ncm(&g),
                "npcm1" => lgsc_to_npcm1(&g),
                t => return Err(format!("unknown target {t:?} (expected npcm-lm, ccfgs-npcm, ncm or npcm1)")),
            }
            .map_err(|e| e.to_string())?;
            let summary = format!("{} states, {} transitions", m.states.len(), m.transitions.len());
            emit(print_machine(&m), out, summary)
        }
        Command::Machine { action } => machine(action),
        Command::Empty { file, index, cap, mode } => {
            let g = load_grammar(&file)?;
            let mode = mode.unwrap_or(if g.control.is_some() { DerivationMode::Controlled } else { DerivationMode::Free });
            let r = cfgsc_index_emptiness_mode(&g, mode, index, cap).map_err(|e| e.to_string())?;
            let mut s = format!("{r}\n");
            if let IndexEmptiness::NonEmpty { .. } = &r {
                let _ = writeln!(s, "rules: {}", r.witness_labels().join(" "));
            }
            Ok((if r.is_nonempty() { 0 } else { 1 }, s))
        }
        Command::SubsetSum { xs, target, route } => {
            let inst = SubsetSumInstance::parse(&xs, &target).map_err(|e| e.to_string())?;
            let a = solve_subset_sum(&inst, route).map_err(|e| e.to_string())?;
            match a.subset {
                Some(ix) => {
                    let vals: Vec<String> = ix.iter().map(|&i| inst.values[i].to_string()).collect();
                    Ok((0, format!("NONEMPTY (subset {{{}}} sums to {})\n", vals.join(","), inst.target)))
                }
                None => Ok((1, format!("EMPTY (no subset sums to {})\n", inst.target))),
            }
        }
        Command::Gadget { binary, out } => {
            let bits = parse_bits(&binary).map_err(|e| e.to_string())?;
            let g = binary_gadget(&bits).map_err(|e| e.to_string())?;
            let summary = format!("value {}, {} productions", bits_value(&bits), g.productions.len());
            emit(print_grammar(&g), out, summary)
        }
    }
}

fn classify_report(g: &StateGrammar) -> String {
    let c = classify(g);
    let mut s = format!("kind {}\n", kind_of(g));
    let shape = c.to_string();
    let _ = writeln!(s, "shape {}", shape.split(' ').next().unwrap_or(""));
    let _ = writeln!(s, "lambda_free {}", c.lambda_free);
    let counters = match &g.counters.discipline {
        Discipline::None => "none".to_string(),
        Discipline::Monotonic => format!("{} monotonic", g.counters.count),
        Discipline::ReversalBounded(rs) => {
            let rs: Vec<String> = rs.iter().map(u32::to_string).collect();
            format!("{} reversal-bounded ({})", g.counters.count, rs.join(","))
        }
    };
    let _ = writeln!(s, "counters {counters}");
    let acc = match g.acceptance {
        Acceptance::FinalState => "final state",
        Acceptance::FinalStateZeroCounters => "final state and zero counters",
        Acceptance::AllCountersEqual => "all counters equal",
    };
    let _ = writeln!(s, "acceptance {acc}");
    let _ = writeln!(s, "productions {}", g.productions.len());
    s
}

fn transform(file: &str, pass: &str, out: Option<String>) -> Outcome {
    if pass == "from-regctrl" {
        let c = parse_controlled_file(&read(file)?).map_err(|e| format!("{file}: {e}"))?;
        let g = regctrl_to_cfgs(&c).map_err(|e| e.to_string())?;
        let summary = format!("{} states, {} productions", g.states.len(), g.productions.len());
        return emit(print_grammar(&g), out, summary);
    }
    let g = load_grammar(file)?;
    if pass == "to-regctrl" {
        let c = cfgs_to_regctrl(&g).map_err(|e| e.to_string())?;
        let summary = format!("{} control states, {} productions", c.control.states.len(), c.base.productions.len());
        return emit(print_controlled(&c), out, summary);
    }
    let mut note = String::new();
    let h = match pass {
        "lgs-to-lg" => lgs_to_lg(&g),
        "normal-form" => to_normal_form(&g),
        "strip-counters" => strip_counters(&g).map(|(h, f)| {
            let pairs: Vec<String> =
                f.pairs.iter().map(|&(c, d)| format!("{}={}", h.term_name(c), h.term_name(d))).collect();
            note = format!("; keep words with {}", if pairs.is_empty() { "no constraint".into() } else { pairs.join(", ") });
            h
        }),
        "cfgmc-to-cfgsc" => cfgmc_to_cfgsc(&g),
        "cfgmc-to-ccfgs" => cfgmc_to_ccfgs(&g),
        "expand-ccfgs" => expand_ccfgs_states(&g),
        "degeneralize" => degeneralize(&g),
        p => return Err(format!("unknown pass {p:?}")),
    }
    .map_err(|e| e.to_string())?;
    let summary = format!("{} states, {} productions{note}", h.states.len(), h.productions.len());
    emit(print_grammar(&h), out, summary)
}

fn machine(action: MachineAction) -> Outcome {
    match action {
        MachineAction::Run { file, word, trace, budget } => {
            let m = load_machine(&file)?;
            let w = m.parse_word(&word).ok_or_else(|| format!("{word:?} is not a word over the inputs"))?;
            match accepts(&m, &w, &budget.budget()).map_err(|e| e.to_string())? {
                MachineMembership::Yes(run) => {
                    let mut s = format!("accepted ({} steps)\n", run.steps.len());
                    if trace {
                        s.push_str(&run.trace(&m));
                    }
                    Ok((0, s))
                }
                MachineMembership::NoWithinBudget => Ok((1, "not accepted within budget\n".into())),
            }
        }
        MachineAction::Enumerate { file, budget } => {
            let m = load_machine(&file)?;
            let words = enumerate_machine(&m, &budget.budget()).map_err(|e| e.to_string())?;
            let mut out: Vec<String> =
                words.iter().map(|w| if w.is_empty() { "<eps>".into() } else { m.render_word(w) }).collect();
            out.sort();
            Ok((0, lines(out)))
        }
        MachineAction::Empty { file, cap } => {
            let m = load_machine(&file)?;
            let r = ncm_empty_bounded(&m, cap).map_err(|e| e.to_string())?;
            let mut s = format!("{r}\n");
            if let Emptiness::NonEmpty { word, .. } = &r {
                let w = if word.is_empty() { "<eps>".to_string() } else { m.render_word(word) };
                let _ = writeln!(s, "witness {w}");
            }
            Ok((if r.is_nonempty() { 0 } else { 1 }, s))
        }
    }
}
