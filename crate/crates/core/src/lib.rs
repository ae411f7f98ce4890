//! Max-product Baskakov operator with certified truncation, moduli of
//! continuity, pointwise and weighted error bounds, and numerical lemma checks.

// `!(x >= 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod functions;
pub mod kernel;
pub mod lemma_verify;
pub mod moduli;
pub mod operators;
pub mod report;

pub use error::{Error, Result};
pub use functions::{get_function, max_scale_combine, phi_at, FuncSpec, Growth};
pub use kernel::{interval_index, log_basis_weight, weight_decay_start, weight_ratio_m, LogWeight};
pub use operators::{eval_classical, eval_max_product, eval_phi_error, EvalResult, DEFAULT_TOL};
