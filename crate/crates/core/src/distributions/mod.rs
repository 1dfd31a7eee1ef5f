//! Marginals 𝒟 on {±1}ⁿ, joints 𝒟′ on example-label pairs, randomness streams
//! and exact full-support oracles.

pub mod exact;
pub mod joint;
pub mod marginal;
pub mod source;
pub mod stream;
mod text;

pub use exact::{exact_correlation, exact_opt_correlation, exact_opt_error, exact_value_correlation, exact_value_error};
pub use joint::{sample_joint, JointDistribution, LabelLaw};
pub use marginal::{sample_marginal, MarginalDistribution, MAX_ENUMERABLE_DIMENSION};
pub use source::{draw_many, ExampleSource, JointSource, SampleLedger};
pub use stream::RandomnessStream;
