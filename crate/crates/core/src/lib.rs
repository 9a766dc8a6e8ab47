//! Structure-preserving one-step integrators for canonical Hamiltonian systems.
//!
//! The crate implements three members of one family of implicit Runge-Kutta
//! methods built on a truncated Fourier-Legendre expansion of the vector field:
//!
//! * `Gauss`: the classical `s`-stage Gauss collocation method (symplectic,
//!   conserves quadratic invariants).
//! * `HBVM(k, s)`: Hamiltonian Boundary Value Methods: a degree-`s`
//!   polynomial approximation whose coefficients are computed with a
//!   `k`-point Gauss-Legendre rule. Energy is conserved exactly when `H` is a
//!   polynomial of degree at most `floor(2k/s)`.
//! * `EHBVM(k, s)`: the enhanced variant, which rescales the top `nu`
//!   Legendre coefficients by `eta_j = 1 - beta_j` so that `nu` additional
//!   invariants are conserved together with the energy.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the problem
//! registry and the command-line harness live in the companion `hbvm` crate.

#![no_std]
// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
mod error;
pub mod integrator;
pub mod legendre;
pub mod linalg;
pub mod quadrature;
pub mod systems;

pub use error::{Error, Result};
pub use integrator::{Integrator, MethodConfig, MethodKind, StageState, StepResult};
pub use legendre::LegendreTables;
pub use quadrature::GaussRule;
pub use systems::HamiltonianProblem;
