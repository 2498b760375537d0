//! Numerical core for Bell-inequality tests on two-mode N00N states.
//!
//! Everything in this crate is pure computation over `alloc`: closed-form
//! Q and parity correlators, a truncated Fock-space oracle used to check them,
//! a catalog of Bell functionals, a multi-start simplex optimizer and
//! Gauss–Hermite marginal densities. File formats, the CLI and thread pools
//! live in the `noonbell` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod amplitude;
pub mod correlators;
pub mod error;
pub mod exec;
pub mod fock;
pub mod inequalities;
pub mod marginals;
pub mod optimizer;
pub mod quadrature;
pub mod special;

pub use amplitude::Amplitude;
pub use correlators::NoonParams;
pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use inequalities::{BellFunctional, SettingsVector};
pub use optimizer::{OptimizationResult, OptimizerConfig};
