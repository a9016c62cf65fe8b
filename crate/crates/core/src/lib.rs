//! Tree-adjoining grammars with ordered (extended) derivations.
//!
//! The crate covers the whole pipeline from elementary trees to derivation
//! trees:
//!
//! - [`address`] and [`tree`]: Gorn addresses, syntax trees, adjunction,
//!   substitution and simultaneous adjunction with address updating.
//! - [`grammar`]: elementary trees, adjoining constraints, validation and the
//!   JSON grammar format.
//! - [`derivation`]: ordered derivation trees, the derived trees they denote,
//!   well-formedness in standard and extended mode, and sibling-swap
//!   equivalence.
//! - [`lig`]: compilation of a grammar into linear indexed grammar
//!   productions and their reduced forms.
//! - [`chart`]: an agenda-driven chart recognizer and parser over the
//!   compiled rules that also builds derivation trees.
//! - [`invariant`]: a bounded LIG derivation search that checks chart items
//!   against their intended meaning.
//! - [`oracle`]: brute-force enumeration of derivations, used as ground truth.
//! - [`random`]: seeded generators for small random grammars.

pub mod address;
pub mod chart;
pub mod derivation;
pub mod fixtures;
pub mod grammar;
pub mod invariant;
pub mod lig;
pub mod oracle;
pub mod random;
pub mod tree;

pub use address::{GornAddress, PrefixRelation};
pub use chart::{parse, recognize, Chart, ChartItem, FootSpan, ParseError, ParseOptions};
pub use derivation::{
    canonicalize, derive, equivalent, swap_adjacent, well_formed, DerivationMode, OpKind,
    Operation, OrderedDerivationTree,
};
pub use grammar::{AuxClass, ElementaryTree, NodeRef, SelectiveSet, TagGrammar};
pub use invariant::{check_invariant, Verdict};
pub use lig::{compile, Lig, LigProduction, ReducedRule, RuleType};
pub use oracle::{EnumBounds, Membership, Oracle};
pub use tree::{NodeLabel, SyntaxTree};
