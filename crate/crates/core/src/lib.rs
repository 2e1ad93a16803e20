//! Discontinuity jumps (losses) of entropy-like functionals along converging
//! sequences of finite-dimensional quantum states and channels.

pub mod channels;
pub mod energy;
pub mod error;
pub mod info;
pub mod linalg;
pub mod majorization;
pub mod operator;
pub mod random;
pub mod roof;
pub mod sequence;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, SpectralDecomposition};
pub use operator::{
    op_log_on_support, partial_trace, tensor, trace_distance, DensityState, HermitianOperator,
    TraceClassElement,
};
pub use info::{Ensemble, ExtendedReal};
pub use roof::{BoundDirection, BoundedValue, OptimizerBudget, Provenance};
pub use sequence::{
    dj_estimate, suite_claim, suite_ids, suite_run, CheckRow, DjEstimate, StateSequence, SuiteParams, SuiteReport,
};
