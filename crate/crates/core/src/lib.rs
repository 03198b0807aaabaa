//! Full-counting statistics of a particle-number operator, estimated from
//! simulated Hadamard-test circuits and checked against exact diagonalization.
//!
//! Layout: [`statevector`] simulates the circuits, [`model`] holds the Ising
//! chain and its exact observables, [`charfunc`] estimates `⟨e^{iθN}⟩`,
//! [`fcs`] turns samples into distributions and cumulants, and [`filter`]
//! removes number sectors before reconstruction.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfunc;
pub mod error;
pub mod fcs;
pub mod filter;
pub mod model;
pub mod number;
pub mod pipeline;
pub mod statevector;

pub use charfunc::{CharFuncSample, Estimation, Part, SamplingGrid};
pub use error::{Error, Result};
pub use fcs::{CumulantSet, Distribution, Stencil};
pub use filter::{AncillaMode, FilterOutcome, FilterSpec, FilterTarget};
pub use model::{MfimParams, Preparation};
pub use number::NumberOperator;
pub use statevector::{DiagonalPhase, Gate, PureState};
