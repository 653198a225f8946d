//! Quantum information capsules (QICs) and partner modes.
//!
//! The crate covers three settings:
//!
//! * multiple-qudit registers ([`algebra`], [`qudit`]): virtual qudits defined
//!   in correlation space, partner construction, QIC construction with SWAP
//!   retrieval, and Fisher information;
//! * pure Gaussian continuous-variable states ([`gaussian`]): shift writes and
//!   the closed-form conjugate QIC operator;
//! * a periodic lattice scalar field ([`lattice`]): vacuum correlations and the
//!   Heisenberg evolution of QIC weighting vectors.
//!
//! [`cli`] drives these from the `qic` binary and writes CSV/SVG output.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
pub mod plot;
pub mod qudit;
pub mod random;
pub mod record;
pub mod suite;

pub use error::{QicError, Result};
