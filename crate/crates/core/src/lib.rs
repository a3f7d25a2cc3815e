//! Attribute reduction for covering decision systems.
//!
//! A system is a finite universe, a family of named coverings and a decision
//! partition. A reduct is a minimal subfamily of coverings that keeps the
//! positive region of the decision. Reducts are the prime implicants of the
//! related function, a monotone CNF with one clause per object listing the
//! coverings that place the object in an admissible block.
//!
//! [`engine`] computes reducts from scratch and maintains them when a covering
//! is added or deleted; [`io`] reads and writes systems, coverings and caches.

pub mod approximation;
pub mod block;
pub mod coverset;
pub mod engine;
pub mod io;
pub mod minimizer;
pub mod model;
pub mod related;

#[cfg(test)]
mod testutil;

pub use approximation::{regions, Consistency, RegionReport};
pub use block::{Block, ObjectId};
pub use coverset::{CoverSet, MAX_COVERINGS};
pub use engine::{
    add_covering, batch_reducts, delete_covering, oracle_reducts, Engine, EngineError, ReductSet,
    ReductionCache, UpdateOutcome, UpdatePath, UpdateReport,
};
pub use minimizer::{minimal_dnf, Minimizer, MonotoneFormula};
pub use model::{Covering, CoveringDecisionSystem, DecisionPartition, Fingerprint, ModelError};
pub use related::{related_function, related_sets, RelatedFamily};
