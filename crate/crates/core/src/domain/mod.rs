//! Points, concepts, concept classes, hypotheses and the learner interface.

pub mod class;
pub mod concept;
pub mod hypothesis;
pub mod learner;
pub mod point;

pub use class::{enumerate_class, ClassSpec, ConceptClass, MAX_CLASS_SIZE};
pub use concept::{Concept, ConceptKind, Literal};
pub use hypothesis::{round_value, ConceptHypothesis, FairCoin, RandomizedHypothesis, ScaledConcept, SharedHypothesis};
pub use learner::{erm_learner, AgnosticLearner, ErmLearner};
pub use point::{LabeledExample, Point, Sign, MAX_DIMENSION};
