//! Strong-stability-preserving two-derivative time integrators.
//!
//! Method tableaux in Shu–Osher and Butcher form ([`tableau`], [`families`],
//! [`registry`]), order-condition residuals ([`order`]), SSP certificates
//! ([`certify`]), time stepping ([`integrate`]) over the model problems in
//! [`problems`], and the experiment drivers in [`sweep`].

// `!(x > 0.0)` rejects NaN on purpose; coefficients keep their quoted digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod certify;
pub mod error;
pub mod families;
pub mod integrate;
pub mod order;
pub mod problems;
pub mod registry;
pub mod roots;
pub mod sweep;
pub mod tableau;

pub use error::{Error, Result};
pub use integrate::{integrate, MonitorReport, Starting, State, System};
pub use registry::{lookup, lookup_with, Method, MethodSpec, Params};
