//! Sustainability impact scoring for software-architecture evaluation.
//!
//! Quality attributes (QAs) live in one of four sustainability dimensions.
//! Each architectural alternative records the effects (+1, 0, −1) of QAs on
//! each other, either as a decision map (signed graph) or as dependency
//! matrices per ordered dimension pair. [`scoring`] turns those effects and
//! risk/importance priorities into a sustainability impact score (SIS) per
//! pair and benchmarks it against a theoretical optimal alternative.
//! [`analysis`] finds synergy chains and trade-offs and runs what-if edits.

pub mod analysis;
pub mod model;
pub mod rounding;
pub mod scoring;

pub use model::{parse_model, validate_model, AssessmentModel};
pub use scoring::{score_model, ScoreOptions, ScoreReport};
