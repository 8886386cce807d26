//! Ready-made models of the worked examples.

pub mod continuous;
pub mod flipping;
pub mod heading;
pub mod lottery;
pub mod racing;
