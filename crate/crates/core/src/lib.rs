//! Weighted approximation by exponential sampling series on `(0, ∞)`.
//!
//! The crate works in the log domain throughout: a kernel `χ` is stored as
//! `φ(t) = χ(e^t)` and a function `f` as `v ↦ f(e^v)`, so lattice arguments
//! `e^{-k} x^w` become `w log x - k` without rounding through `exp`.

pub mod analysis;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod spaces;

pub use error::{Error, Result};
pub use kernels::{
    algebraic_moment, check_kernel_conditions, check_kernel_conditions_with, discrete_absolute_moment,
    eta_lower_bound, Kernel, KernelShape, MomentReport, ScanPolicy, Tolerances,
};
pub use operators::{
    classical_exponential_formula, evaluate_on_grid, generalized_series, index_set, kantorovich_series,
    max_product_series, take_samples, Evaluation, ExpSamples, GridEvaluation, GridRow, OperatorKind,
    SamplingConfig,
};
pub use spaces::{
    function_from_name, mellin_derivative, psi, weight, weighted_log_modulus, weighted_norm, Abscissa, LogGrid,
    ModulusProfile, WeightedFunction,
};
