//! Question-relative knowledge and belief, generated from evidential
//! probability and a normality ordering on centred worlds.
//!
//! The discrete machinery is generic over the probability scalar; use
//! [`Rational`] for exact answers and `f64` for quick exploration.

pub mod density;
pub mod dese;
pub mod error;
pub mod genprob;
pub mod modelspec;
pub mod normality;
pub mod numeric;
pub mod relation;
pub mod relnorm;
pub mod scalar;
pub mod scenarios;

pub use error::{Error, Result};
pub use genprob::{ProbabilityStructure, Question, SufficiencyRule};
pub use normality::{KnowledgeVariant, NormalityStructure, World, WorldId};
pub use scalar::{Probability, Rational};

pub use genprob::ExactProbabilityStructure;
pub type FloatProbabilityStructure = genprob::ProbabilityStructure<f64>;
