//! Exact simulation of the quantum-clock protocol for out-of-time-ordered
//! correlators, the cavity-QED models whose sign is set by the clock, and the
//! reference computations used to check them.

pub mod crosscheck;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod oracle;
pub mod protocol;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use hilbert::{
    apply, compose, expectation, inner, local_operator, make_space, projector_total_sz, HilbertSpace, LocalOp,
    Operator, SiteKind, StateVector, C64,
};
