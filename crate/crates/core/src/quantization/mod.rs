//! The quantization map `g ↦ ḡ`, operator matrices and traces on Λ_n, q-series and q-brackets.

pub mod functions;
pub mod operator;
pub mod pairing;

pub use functions::{
    diagonal_function, hook_tk, hopf_eigenvalue, infinite_eigenvalue, infinite_normalizer, l_operator, l_operator_density, moment_sk, q_bracket,
    qk_function, Basis, PartitionFunction,
};
pub use operator::{quantize, OperatorMatrix, QuantizedOperator};
pub use pairing::{pairing_qseries, pairing_qseries_poly};
