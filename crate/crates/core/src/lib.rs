//! Symmetry-resolved spectra of `N` particles with contact interactions in
//! one-dimensional traps.
//!
//! The pipeline runs from one-body trap solutions ([`one_body`]) through
//! contact matrix elements ([`contact_tensor`]) to weak-coupling splittings
//! ([`weak_coupling`]), the strongly interacting limit ([`unitary_limit`])
//! and a brute-force diagonalization oracle ([`exact_diag`]). All spectral
//! work is organised by the representation theory in [`group_theory`].

pub mod contact_tensor;
pub mod error;
pub mod exact_diag;
pub mod group_theory;
pub mod linalg;
pub mod one_body;
pub mod quadrature;
pub mod tolerances;
pub mod unitary_limit;
pub mod verify;
pub mod weak_coupling;

pub use error::{Error, Result};
