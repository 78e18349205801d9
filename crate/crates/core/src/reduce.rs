//! Subset-sum encodings: a binary-number gadget with one monotonic
//! counter, a one-counter leftmost reduction of bounded index, and an
//! index-1 right-linear reduction with generalized increments.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::decide::{cfgsc_index_emptiness_mode, DecideError, IndexEmptiness};
use crate::derive::DerivationMode;
use crate::grammar::{guards, CounterSpec, GrammarBuilder, Guard, StateGrammar};
use crate::machine::{ncm_empty_bounded, rlgsc_to_ncm, Emptiness, MachineError};
use crate::transform::{degeneralize, TransformError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("an instance needs at least one value")]
    NoValues,
    #[error("values and target must be positive")]
    NonPositive,
    #[error("bit string must be nonempty and use only 0 and 1")]
    BadBits,
    #[error("cannot parse instance: {0}")]
    Parse(String),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Is there a subset of `values` summing to `target`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub values: Vec<u64>,
    pub target: u64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<u64>, target: u64) -> Result<Self, ReduceError> {
        if values.is_empty() {
            return Err(ReduceError::NoValues);
        }
        if target == 0 || values.contains(&0) {
            return Err(ReduceError::NonPositive);
        }
        Ok(SubsetSumInstance { values, target })
    }

    /// Parses a comma-separated list such as `3,5,2`.
    pub fn parse(values: &str, target: &str) -> Result<Self, ReduceError> {
        let xs = values
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|e| ReduceError::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let t = target.trim().parse::<u64>().map_err(|e| ReduceError::Parse(format!("{target:?}: {e}")))?;
        Self::new(xs, t)
    }

    /// Sum of all values and the target; no counter in either reduction
    /// ever exceeds it.
    pub fn cap(&self) -> u64 {
        self.values.iter().sum::<u64>() + self.target
    }

    pub fn max_bits(&self) -> usize {
        self.values.iter().chain([&self.target]).map(|&x| bits_of(x).len()).max().unwrap_or(1)
    }
}

impl fmt::Display for SubsetSumInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.values.iter().map(u64::to_string).collect();
        write!(f, "{{{}}} -> {}", xs.join(","), self.target)
    }
}

/// Binary digits of `x`, least significant first.
pub fn bits_of(x: u64) -> Vec<bool> {
    let mut bits = Vec::new();
    let mut x = x;
    while x > 0 {
        bits.push(x & 1 == 1);
        x >>= 1;
    }
    if bits.is_empty() {
        bits.push(false);
    }
    bits
}

/// Parses a bit string written least significant bit first.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, ReduceError> {
    if s.is_empty() {
        return Err(ReduceError::BadBits);
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(ReduceError::BadBits),
        })
        .collect()
}

pub fn bits_value(bits: &[bool]) -> u64 {
    bits.iter().rev().fold(0, |acc, &b| acc * 2 + b as u64)
}

fn gadget_rules(bits: &[bool], tag: &str) -> Vec<(String, String, i64, Vec<String>)> {
    let cell = |i: usize, b: bool| format!("[{i},{}]{tag}", b as u8);
    let k = bits.len();
    let mut rules = vec![(
        "start".to_string(),
        format!("S{tag}"),
        0,
        bits.iter().enumerate().map(|(i, &b)| cell(i + 1, b)).collect(),
    )];
    for i in 1..=k {
        rules.push((format!("zero{i}"), cell(i, false), 0, vec![]));
    }
    rules.push(("one1".to_string(), cell(1, true), 1, vec![cell(1, false)]));
    for i in 2..=k {
        let mut rhs: Vec<String> = (1..i).map(|j| cell(j, true)).collect();
        rhs.push(cell(i, false));
        rules.push((format!("one{i}"), cell(i, true), 1, rhs));
    }
    rules
}

fn gadget_nonterminals(k: usize, tag: &str) -> Vec<String> {
    std::iter::once(format!("S{tag}"))
        .chain((1..=k).flat_map(|i| [format!("[{i},0]{tag}"), format!("[{i},1]{tag}")]))
        .collect()
}

/// A monotonic-counter grammar over `S` and `[i,0]`, `[i,1]` that
/// generates λ and leaves the number encoded by `bits` (least significant
/// first) in its counter: `[i,1] -> (+1, [1,1]...[i-1,1][i,0])`.
pub fn binary_gadget(bits: &[bool]) -> Result<StateGrammar, ReduceError> {
    if bits.is_empty() {
        return Err(ReduceError::BadBits);
    }
    let mut b = GrammarBuilder::new()
        .nonterminals(gadget_nonterminals(bits.len(), ""))
        .axiom("S")
        .counters(CounterSpec::monotonic(1));
    for (label, lhs, inc, rhs) in gadget_rules(bits, "") {
        let rhs: Vec<&str> = rhs.iter().map(String::as_str).collect();
        b = b.labelled_rule(&label, "q", &[Guard::Any], &lhs, "q", &[inc], &rhs);
    }
    Ok(b.build().expect("gadget is well formed"))
}

/// One-counter leftmost reduction. Returns the grammar, an index bound
/// under which the pipeline finds every witness, and a sound counter cap.
///
/// State `q0` walks `A1..A(k+1)`, optionally splicing in the gadget for
/// each `x_i` (label `splice{i}`). `check` enters `q1` with the gadget for
/// the target, whose increments become decrements, and `accept` writes
/// `a` once the counter is zero.
pub fn subset_sum_to_cfgsc(inst: &SubsetSumInstance) -> (StateGrammar, usize, u64) {
    let k = inst.values.len();
    let chain: Vec<String> = (1..=k + 1).map(|i| format!("A{i}")).collect();
    let gadgets: Vec<Vec<bool>> = inst.values.iter().chain([&inst.target]).map(|&x| bits_of(x)).collect();
    let mut nts = chain.clone();
    nts.push("Z".into());
    for (j, bits) in gadgets.iter().enumerate() {
        nts.extend(gadget_nonterminals(bits.len(), &format!("_{}", j + 1)));
    }
    let any = guards("*");
    let mut b = GrammarBuilder::new()
        .nonterminals(nts)
        .terminals(["a"])
        .states(["q0", "q1", "qf"])
        .initial("q0")
        .finals(["qf"])
        .axiom("A1")
        .counters(CounterSpec::reversal_bounded(1, 1));
    for i in 1..=k {
        let (s, a, next) = (format!("S_{i}"), &chain[i - 1], &chain[i]);
        b = b
            .labelled_rule(&format!("splice{i}"), "q0", &any, a, "q0", &[0], &[&s, next])
            .labelled_rule(&format!("skip{i}"), "q0", &any, a, "q0", &[0], &[next]);
    }
    for (j, bits) in gadgets.iter().enumerate().take(k) {
        for (label, lhs, inc, rhs) in gadget_rules(bits, &format!("_{}", j + 1)) {
            let rhs: Vec<&str> = rhs.iter().map(String::as_str).collect();
            b = b.labelled_rule(&format!("g{}.{label}", j + 1), "q0", &any, &lhs, "q0", &[inc], &rhs);
        }
    }
    let t = format!("S_{}", k + 1);
    b = b.labelled_rule("check", "q0", &any, &chain[k], "q1", &[0], &[&t, "Z"]);
    for (label, lhs, inc, rhs) in gadget_rules(&gadgets[k], &format!("_{}", k + 1)) {
        let rhs: Vec<&str> = rhs.iter().map(String::as_str).collect();
        let label = format!("t.{label}");
        b = if inc == 0 {
            b.labelled_rule(&label, "q1", &any, &lhs, "q1", &[0], &rhs)
        } else {
            b.labelled_rule(&label, "q1", &guards("p"), &lhs, "q1", &[-1], &rhs)
        };
    }
    b = b.labelled_rule("accept", "q1", &guards("z"), "Z", "qf", &[0], &["a"]);
    let g = b.build().expect("reduction grammar is well formed");
    (g, inst.max_bits() + 2, inst.cap())
}

/// Index-1 right-linear reduction with two generalized counters:
/// `add{i}` adds `x_i` to the first, `target` adds the target to the
/// second, `drain` empties both in lockstep and `accept` writes `a`.
pub fn subset_sum_to_rlgsc(inst: &SubsetSumInstance) -> StateGrammar {
    let k = inst.values.len();
    let chain: Vec<String> = (1..=k + 1).map(|i| format!("A{i}")).collect();
    let mut nts = chain.clone();
    nts.push("Z".into());
    let mut b = GrammarBuilder::new()
        .nonterminals(nts)
        .terminals(["a"])
        .states(["q0", "q1", "qf"])
        .initial("q0")
        .finals(["qf"])
        .axiom("A1")
        .counters(CounterSpec::reversal_bounded(2, 1).generalized());
    let free = guards("*z");
    for i in 1..=k {
        let (a, next) = (&chain[i - 1], &chain[i]);
        b = b
            .labelled_rule(&format!("add{i}"), "q0", &free, a, "q0", &[inst.values[i - 1] as i64, 0], &[next])
            .labelled_rule(&format!("skip{i}"), "q0", &free, a, "q0", &[0, 0], &[next]);
    }
    b.labelled_rule("target", "q0", &free, &chain[k], "q1", &[0, inst.target as i64], &["Z"])
        .labelled_rule("drain", "q1", &guards("pp"), "Z", "q1", &[-1, -1], &["Z"])
        .labelled_rule("accept", "q1", &guards("zz"), "Z", "qf", &[0, 0], &["a"])
        .build()
        .expect("reduction grammar is well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Cfgsc,
    Rlgsc,
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cfgsc" => Ok(Route::Cfgsc),
            "rlgsc" => Ok(Route::Rlgsc),
            _ => Err(format!("unknown route {s:?} (expected cfgsc or rlgsc)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumAnswer {
    pub solvable: bool,
    /// Chosen values, as 0-based positions into `values`.
    pub subset: Option<Vec<usize>>,
}

/// Base label of a production after passes that append `/…`, `#…` or `@…`.
fn base_label(label: &str) -> &str {
    label.split(['/', '#', '@']).next().unwrap_or(label)
}

fn chosen(labels: &[String], prefix: &str) -> Vec<usize> {
    let picked: BTreeSet<usize> = labels
        .iter()
        .filter_map(|l| base_label(l).strip_prefix(prefix)?.parse::<usize>().ok())
        .collect();
    picked.into_iter().map(|i| i - 1).collect()
}

/// Decides the instance through a grammar-emptiness pipeline and reads the
/// chosen subset off the witness run.
pub fn solve_subset_sum(inst: &SubsetSumInstance, route: Route) -> Result<SubsetSumAnswer, ReduceError> {
    let (labels, prefix) = match route {
        Route::Cfgsc => {
            let (g, m, cap) = subset_sum_to_cfgsc(inst);
            match cfgsc_index_emptiness_mode(&g, DerivationMode::Leftmost, m, cap)? {
                r @ IndexEmptiness::NonEmpty { .. } => (Some(r.witness_labels()), "splice"),
                IndexEmptiness::EmptyWithinBound { .. } => (None, "splice"),
            }
        }
        Route::Rlgsc => {
            let g = degeneralize(&subset_sum_to_rlgsc(inst))?;
            let m = rlgsc_to_ncm(&g)?;
            match ncm_empty_bounded(&m, inst.cap())? {
                Emptiness::NonEmpty { run, .. } => {
                    (Some(run.labels(&m).into_iter().map(str::to_string).collect()), "add")
                }
                Emptiness::EmptyWithinBound(_) => (None, "add"),
            }
        }
    };
    Ok(match labels {
        Some(l) => SubsetSumAnswer { solvable: true, subset: Some(chosen(&l, prefix)) },
        None => SubsetSumAnswer { solvable: false, subset: None },
    })
}

/// Reference answer by enumerating all subsets.
pub fn brute_force(inst: &SubsetSumInstance) -> Option<Vec<usize>> {
    let k = inst.values.len();
    (0u64..1 << k)
        .find(|mask| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| inst.values[i]).sum::<u64>() == inst.target)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
}
