//! Exact spectra of the unit-graph on `Mat_n(F_q)`.
//!
//! The unit-graph has the matrices of `Mat_n(F_q)` as vertices and joins `A`
//! and `B` whenever `B - A` is invertible; it is the Cayley graph of the
//! additive group `Mat_n(F_q)` with connection set `GL_n(F_q)`. Its
//! eigenvalues are the sums of additive characters over `GL_n(F_q)`.
//!
//! Everything is exact: field elements are residues, character values live in
//! the cyclotomic integers `Z[ζ_p]`, and eigenvalues and multiplicities are
//! integers.

pub mod chars;
pub mod cli;
pub mod error;
pub mod gap;
pub mod gf;
pub mod matfq;
pub mod oracle;
pub mod partition;
pub mod spectra;

pub use error::{Error, Result};
