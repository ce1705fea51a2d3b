//! Numerical core for the nonlocal time-fractional Timoshenko beam with
//! frictional and viscoelastic damping.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`fraccalc`]: Gamma and Mittag-Leffler functions, L1-type Caputo
//!   derivatives of order in (0,1) and (1,2), Riemann-Liouville integrals;
//! - [`memory`]: the exponential relaxation kernel and the memory convolution;
//! - [`spatial`]: the uniform grid, difference stencils, the antiderivative
//!   operators and the moment projection that enforces the integral constraints;
//! - [`solver`]: the implicit time stepper for the coupled system;
//! - [`energy`]: norms, the a priori constants and the estimate checks;
//! - [`gronwall`]: classical and fractional Gronwall bound curves.
//!
//! IO, configuration files and the command line live in the `timofrac` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod energy;
pub mod fraccalc;
pub mod gronwall;
pub mod memory;
pub mod solver;
pub mod spatial;

pub use error::{Error, Result};
pub use fraccalc::{FracOrder, TimeSeries};
pub use memory::{KernelReport, KernelSpec, MemoryKernel};
pub use solver::{BeamConfig, ProblemData, SolverOptions, SpaceTimeField, Trajectory};
pub use spatial::Grid;
