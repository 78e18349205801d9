//! Finite-index emptiness: erase terminals, normalize counters, build a
//! stackless counter machine whose states are `[q, w]` with `|w| <= m`,
//! and search it for an accepting run.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::derive::DerivationMode;
use crate::grammar::{Acceptance, Guard, NtId, StateGrammar, StateId};
use crate::machine::{ncm_empty_bounded, CounterMachine, Emptiness, MachineBuilder, Run, Transition};
use crate::transform::{cfgmc_to_cfgsc, expand_ccfgs_states, is_normal_form, to_normal_form, TransformError};

pub use crate::transform::erase_terminals;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("index bound must be at least 1")]
    ZeroIndex,
    #[error("counters must be in normal form (1-reversal, unit updates); run the normal-form pass first")]
    NotNormalized,
    #[error("right-hand sides still contain terminals; erase them first")]
    HasTerminals,
    #[error("mode {0} is not supported by the index construction")]
    Mode(DerivationMode),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// The machine plus whether some rule application was dropped because it
/// would exceed `m` nonterminals.
#[derive(Clone, Debug)]
pub struct IndexMachine {
    pub machine: CounterMachine,
    pub index_limited: bool,
}

/// Free-mode construction; see [`index_grammar_to_ncm_mode`].
pub fn index_grammar_to_ncm(g: &StateGrammar, m: usize) -> Result<IndexMachine, DecideError> {
    index_grammar_to_ncm_mode(g, m, DerivationMode::Free)
}

/// States `[q, w]` over reachable pairs, one λ-transition per applicable
/// rule and context `xAy` with `|xvy| <= m`. The mode restricts the
/// position of `A`: anywhere (free), first (leftmost), or first among `V1`
/// unless `A` is in `V2` (controlled, on an erase-flag expanded grammar).
pub fn index_grammar_to_ncm_mode(g: &StateGrammar, m: usize, mode: DerivationMode) -> Result<IndexMachine, DecideError> {
    if m == 0 {
        return Err(DecideError::ZeroIndex);
    }
    if g.counters.count > 0 && !is_normal_form(g) {
        return Err(DecideError::NotNormalized);
    }
    if g.productions.iter().any(|p| p.rhs.iter().any(|s| !s.is_nonterminal())) {
        return Err(DecideError::HasTerminals);
    }
    if !matches!(mode, DerivationMode::Free | DerivationMode::Leftmost | DerivationMode::Controlled) {
        return Err(DecideError::Mode(mode));
    }
    let k = g.counters.count;
    let mut by_state: HashMap<(StateId, NtId), Vec<usize>> = HashMap::new();
    for (i, p) in g.productions.iter().enumerate() {
        by_state.entry((p.from, p.lhs)).or_default().push(i);
    }
    let name = |q: StateId, w: &[NtId]| {
        let parts: Vec<&str> = w.iter().map(|&n| g.nt_name(n)).collect();
        format!("[{},{}]", g.state_name(q), parts.join("."))
    };
    let mut b = MachineBuilder::new(Vec::new(), k);
    let start = (g.initial, vec![g.axiom]);
    let initial = b.state(&name(start.0, &start.1));
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut index_limited = false;
    let mut finals = Vec::new();
    while let Some((q, w)) = queue.pop_front() {
        let from = b.state(&name(q, &w));
        if w.is_empty() {
            if g.is_final(q) {
                finals.push(from);
            }
            continue;
        }
        let first_v1 = w.iter().position(|&n| !g.is_v2(n));
        for (i, &a) in w.iter().enumerate() {
            let allowed = match mode {
                DerivationMode::Leftmost => i == 0,
                DerivationMode::Controlled => g.is_v2(a) || Some(i) == first_v1,
                _ => true,
            };
            if !allowed {
                continue;
            }
            for &pi in by_state.get(&(q, a)).map(Vec::as_slice).unwrap_or(&[]) {
                let p = &g.productions[pi];
                let mut next: Vec<NtId> = w[..i].to_vec();
                next.extend(p.rhs.iter().filter_map(|s| s.nonterminal()));
                next.extend_from_slice(&w[i + 1..]);
                if next.len() > m {
                    index_limited = true;
                    continue;
                }
                let to = b.state(&name(p.to, &next));
                b.add(Transition {
                    label: p.label.clone(),
                    from,
                    read: None,
                    guard: p.guard.clone(),
                    top: None,
                    to,
                    update: p.update.clone(),
                    push: vec![],
                });
                let key = (p.to, next);
                if !seen.contains(&key) {
                    seen.insert(key.clone());
                    queue.push_back(key);
                }
            }
        }
    }
    let accept = b.fresh_state("acc");
    let guard = if g.acceptance == Acceptance::FinalStateZeroCounters { Guard::Zero } else { Guard::Any };
    for from in finals {
        b.add(Transition {
            label: "accept".into(),
            from,
            read: None,
            guard: vec![guard; k],
            top: None,
            to: accept,
            update: vec![0; k],
            push: vec![],
        });
    }
    let machine = b.finish(g.counters.clone(), None, initial, BTreeSet::from([accept]));
    Ok(IndexMachine { machine, index_limited })
}

#[derive(Clone, Debug)]
pub enum IndexEmptiness {
    /// A run of the index machine; it corresponds to an index-`m`
    /// derivation of the grammar, so the grammar is nonempty.
    NonEmpty { run: Run, machine: CounterMachine },
    /// No accepting run with counters up to the cap. When `index_limited`
    /// is set, some derivations were cut by the index bound, so the answer
    /// only covers derivations of index `m`.
    EmptyWithinBound { m: usize, cap: u64, index_limited: bool },
}

impl IndexEmptiness {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, IndexEmptiness::NonEmpty { .. })
    }

    /// Production labels along the witness run.
    pub fn witness_labels(&self) -> Vec<String> {
        match self {
            IndexEmptiness::NonEmpty { run, machine } => run.labels(machine).into_iter().map(str::to_string).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for IndexEmptiness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexEmptiness::NonEmpty { run, .. } => write!(f, "NONEMPTY (witness run of {} steps)", run.steps.len()),
            IndexEmptiness::EmptyWithinBound { m, cap, index_limited } => {
                write!(f, "EMPTY within index {m} and counter cap {cap}")?;
                if *index_limited {
                    write!(f, " (conditional: some derivations need index > {m})")?;
                }
                Ok(())
            }
        }
    }
}

/// The grammar handed to the index construction: terminals erased,
/// monotonic counters drained, controlled states expanded, counters in
/// normal form.
pub fn prepare(g: &StateGrammar) -> Result<StateGrammar, DecideError> {
    let mut h = erase_terminals(g);
    if h.counters.is_monotonic() {
        h = cfgmc_to_cfgsc(&h)?;
    }
    if h.control.is_some() {
        h = expand_ccfgs_states(&h)?;
    }
    if h.counters.count > 0 && !is_normal_form(&h) {
        h = to_normal_form(&h)?;
    }
    Ok(h)
}

/// Free-mode emptiness of `g` restricted to index-`m` derivations with
/// counters bounded by `cap`. Controlled grammars use their own mode.
pub fn cfgsc_index_emptiness(g: &StateGrammar, m: usize, cap: u64) -> Result<IndexEmptiness, DecideError> {
    let mode = if g.control.is_some() { DerivationMode::Controlled } else { DerivationMode::Free };
    cfgsc_index_emptiness_mode(g, mode, m, cap)
}

pub fn cfgsc_index_emptiness_mode(
    g: &StateGrammar,
    mode: DerivationMode,
    m: usize,
    cap: u64,
) -> Result<IndexEmptiness, DecideError> {
    let h = prepare(g)?;
    let IndexMachine { machine, index_limited } = index_grammar_to_ncm_mode(&h, m, mode)?;
    Ok(match ncm_empty_bounded(&machine, cap).expect("index machines are stackless") {
        Emptiness::NonEmpty { run, .. } => IndexEmptiness::NonEmpty { run, machine },
        Emptiness::EmptyWithinBound(_) => IndexEmptiness::EmptyWithinBound { m, cap, index_limited },
    })
}
