//! Post-evolution analysis: picking a diverse subset of the archive, comparing
//! how quickly controllers learn each game, and testing survey responses.

pub mod diversity;
pub mod learnability;
pub mod survey;

pub use diversity::{
    diversity_count, pair_diversity, select_diverse, ArchivedGame, DIVERSITY_THRESHOLD,
};
pub use learnability::{
    learnability_experiment, GameLearnability, LearnabilityConfig, LearnabilityReport,
};
pub use survey::{
    aggregate_ratings, correlation_c, p_value, Coding, NullModel, PValue, PValueMethod, Rating,
    RatingCode, SurveySample, DEFAULT_ALPHA,
};
