//! Black-box checking of reactive systems against temporal specifications,
//! with automatic strengthening of the specification to find violations
//! earlier.

pub mod engine;
pub mod formula;
pub mod learn;
pub mod machine;
pub mod search;
pub mod strengthen;
pub mod sut;
