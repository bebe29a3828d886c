//! Exact and high-precision machinery for composition semigroups of
//! polynomials: truncated series, Böttcher coordinates, word search and
//! normal forms.

pub mod scalar;
pub mod bottcher;
pub mod decide;
pub mod input;
pub mod polynomial;
pub mod normal_forms;
pub mod properties;
pub mod series;
pub mod words;
