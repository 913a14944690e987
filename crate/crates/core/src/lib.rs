//! Reduced-order modelling laboratory for the two-dimensional incompressible
//! Navier-Stokes equations.
//!
//! The pipeline runs bottom-up:
//!
//! * [`fe`]: quadratic Lagrange velocity space on a structured mesh of the
//!   unit square, mass and stiffness operators, the skew-symmetric
//!   convection form.
//! * [`manufactured`]: closed-form velocity with a moving internal layer and
//!   its matching forcing.
//! * [`pod`]: snapshots, the correlation eigenproblem, POD modes, truncation
//!   errors and the ROM stiffness matrix.
//! * [`filter`]: the ROM differential filter `(I + delta^2 S_r) abar = a`.
//! * [`rom`]: reduced operators and backward-Euler Galerkin / Leray ROM steppers.
//! * [`study`]: parameter sweeps, error metrics and log-log regressions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fe;
pub mod filter;
pub mod linalg;
pub mod manufactured;
pub mod pod;
pub mod rom;
pub mod study;

pub use error::{Result, RomError};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/discretization.md")]
    mod discretization {}
    #[doc = include_str!("../../../book/src/manufactured.md")]
    mod manufactured {}
    #[doc = include_str!("../../../book/src/pod.md")]
    mod pod {}
    #[doc = include_str!("../../../book/src/filter.md")]
    mod filter {}
    #[doc = include_str!("../../../book/src/rom.md")]
    mod rom {}
    #[doc = include_str!("../../../book/src/studies.md")]
    mod studies {}
}
