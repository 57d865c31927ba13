//! Ranked delegation for liquid democracy.
//!
//! Voters either vote themselves (casting voters) or rank a few other voters
//! they would trust with their vote. A delegation rule picks, for every
//! voter able to reach a casting voter, one delegation path. This crate
//! implements the sequence rules (depth-first, breadth-first, MinSum,
//! weighted sums, Leximax, Diffusion), Borda branchings, popularity
//! analysis, axiom checkers, instance generators and the experiment
//! pipeline.
//!
//! ```
//! use ranked_delegation::{fixtures, Rule};
//!
//! let inst = fixtures::fig1();
//! let res = Rule::Bfd.resolve(&inst).unwrap();
//! let a = inst.id_of("a").unwrap();
//! assert_eq!(res.path(a).unwrap().display(&inst), "a -> b -> c -> i");
//! ```

pub mod axioms;
pub mod branching;
pub mod edmonds;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod metrics;
pub mod model;
pub mod num;
pub mod oracle;
pub mod order;
pub mod properties;
pub mod resolve;
pub mod rng;
pub mod rule;
pub mod sampling;

pub use branching::{borda_branching, is_popular, majority_margin, min_cost_branching, unpopularity_margin, Branching, PriorityOrder};
pub use error::{Error, Result};
pub use model::{classify, paths_from, reduce, sequence_of, Instance, Path, Rank, RankedEdge, Sequence, VoterClass, VoterId};
pub use order::{comparable, sort_desc, Comparison, RankWeights, SeqOrder};
pub use resolve::{is_confluent_output, resolve_confluent, resolve_dfd, resolve_diffusion_process, truncate_outdegree, Resolution};
pub use rule::Rule;

/// Exact rational used for weights and metrics.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision rational used when averaging many records.
pub type BigRational = num_rational::BigRational;
