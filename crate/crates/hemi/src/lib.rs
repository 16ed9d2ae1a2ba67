//! Entropy-driven hemi-groups and the quantities derived from them.
//!
//! | module         | contents                                                  |
//! |----------------|-----------------------------------------------------------|
//! | `algebra`      | structure traits, finite tables, axiom checkers           |
//! | `comparison`   | m_G, M_G, Ξ, hemi-metrics, hemi-scalar products           |
//! | `instances`    | the catalog of concrete structures                        |
//! | `construction` | entropy from a kernel, scoring-rule correspondence        |
//! | `models`       | stable / max-stable / min-stable simulation               |
//! | `fit`          | risk minimization by ρ_a                                  |
//! | `par`          | rayon execution with a sequential fallback                |

pub mod algebra;
pub mod comparison;
pub mod construction;
pub mod error;
pub mod extreal;
pub mod fit;
pub mod instances;
pub mod models;
pub mod par;
pub mod stats;

pub use algebra::{
    AxiomReport, CheckMode, Comparable, EntropyStructure, FiniteStructure, FormalPair, Merged,
    Sample, Status, Tolerance,
};
pub use comparison::{ComparisonProfile, Sign, XiInterval};
pub use error::{Error, Result};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Default number of sampled cases for randomized checks.
pub const DEFAULT_SAMPLES: usize = 10_000;
