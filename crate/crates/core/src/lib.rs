//! State grammars with optional reversal-bounded or monotonic counters.
//!
//! The crate covers the grammar model ([`grammar`]), derivation engines for
//! free, leftmost, leftish, circular and controlled rewriting ([`derive`]),
//! constructive conversions between grammar classes ([`transform`]),
//! counter machines ([`machine`]), a finite-index emptiness check
//! ([`decide`]) and subset-sum reductions ([`reduce`]).

pub mod cli;
pub mod corpus;
pub mod decide;
pub mod derive;
pub mod format;
pub mod grammar;
pub mod machine;
pub mod reduce;
pub mod transform;

pub use derive::{DerivationConfig, DerivationMode, ExplorationBudget, Membership};
pub use grammar::{GrammarBuilder, StateGrammar};
