//! Kernel dependence maximization toolkit.
//!
//! Implements the HSIC-based self-supervised objective and everything needed
//! to verify its provable properties at desk scale: exact and
//! random-Fourier-feature estimators of HSIC(Z,Y) and HSIC(Z,Z) under the
//! positive-pair sampling scheme, the InfoNCE connection (Taylor relation,
//! exp-bound lemma, closed-form gamma), the MMD and clustering identities,
//! finite-world population oracles, a minimal reverse-mode autodiff engine
//! with an encoder/projector training loop, and synthetic-world evaluation
//! harness (linear probe, feature-rank diagnostics).

pub mod accum;
pub mod autodiff;
pub mod bessel;
pub mod error;
pub mod harness;
pub mod hsic;
pub mod kernel;
pub mod nn;
pub mod objectives;
pub mod rff;
pub mod stats;
pub mod train;
pub mod verify;

// TEMP-REEXPORTS
pub use error::{Error, Result};


pub use kernel::{GramMatrix, KernelSpec};

pub use rff::{AmplitudePmf, BasisSeed, RffBasis};

