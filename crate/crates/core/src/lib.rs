//! Exact quantum KdV and ILW Hamiltonians, their quantization on the ring of symmetric
//! functions, q-series of the resulting operators and their recognition as quasimodular forms.

pub mod cache;
pub mod cli;
pub mod diffpoly;
pub mod error;
pub mod hierarchy;
pub mod json;
pub mod lambda;
pub mod linalg;
pub mod numbers;
pub mod partition;
pub mod render;
pub mod scalar;
pub mod quantization;
pub mod quasimodular;
