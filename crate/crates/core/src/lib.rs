//! Association rule mining over time periods.
//!
//! A categorical transaction table is split into chronological periods
//! ([`dataset`]). Each period is mined with Differential Evolution over a
//! real-valued rule encoding ([`de`]), rules are scored by a weighted mix of
//! confidence and support ([`rule`]), the most mutually similar high-fitness
//! rules are picked per period ([`selector`]), and the result is exported as
//! Sankey flow graphs ([`sankey`]). [`pipeline`] wires the stages together.

pub mod dataset;
pub mod de;
pub mod error;
pub mod pipeline;
pub mod rule;
pub mod sankey;
pub mod selector;

pub use dataset::{load_transactions, partition, tercile_discretize, FeatureCatalog, PartitionSpec, Timestamp, Transaction, TransactionDB};
pub use de::{decode, mine, run_batch, DeParams, Genotype, Miner, RuleArchive};
pub use error::{Error, Result};
pub use rule::{similarity, AssociationRule, FitnessWeights, Item, ScoredRule, SimilarityMatrix};
pub use sankey::{build_flow, emit_json, emit_report, SankeyGraph};
pub use selector::{select, select_dp, select_exact, top_n, RuleSelection, SelectionMode, SelectionParams};
