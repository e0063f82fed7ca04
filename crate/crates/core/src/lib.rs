//! Exact and probably approximately correct (PAC) implication bases of formal
//! contexts.
//!
//! The exact side computes the canonical (Duquenne–Guigues) basis by
//! enumerating pseudo-intents in lectic order. The approximate side runs the
//! HORN1 query learner against a membership oracle for the context and an
//! equivalence oracle simulated by sampling; the result is, with probability
//! at least `1 - δ`, within Horn-distance `ε` of the context's theory.
//!
//! ```
//! use fca_pac::{canonical_basis, datagen::star_alliance};
//! let ctx = star_alliance();
//! assert_eq!(canonical_basis(&ctx).unwrap().len(), 13);
//! ```

pub mod attrs;
pub mod context;
pub mod cxt;
pub mod datagen;
mod error;
pub mod experiments;
pub mod implication;
pub mod learn;
pub mod metrics;

pub use attrs::{AttributeSet, AttributeUniverse};
pub use context::FormalContext;
pub use cxt::{parse_context, read_context_file, write_context, ContextFormat};
pub use error::{Error, Result, DEFAULT_ENUMERATION_CAP};
pub use implication::{
    canonical_basis, closure, entails, enumerate_models, equivalent, is_model, is_valid_in,
    parse_implications, Implication, ImplicationList,
};
pub use learn::{horn1, pac_basis, sample_count, PacParams, RunStats};
pub use metrics::{evaluate, horn_distance, horn_distance_sampled, precision, recall, EvalReport};
