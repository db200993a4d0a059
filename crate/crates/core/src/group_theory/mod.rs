//! Symmetric-group arithmetic and representation theory.
//!
//! Permutations compose right to left (`p ∘ q` applies `q` first).
//! Irreps are built in Young's orthogonal form, whose basis is adapted to
//! the canonical subgroup chain `S_N ⊃ S_{N-1} ⊃ ... ⊃ S_2`; parity- or
//! spin-modified chains are not modelled.

mod group;
mod irrep;
mod isotypic;
mod permutation;
mod young;

pub use group::SymmetricGroup;
pub use irrep::{irrep_matrices, jucys_murphy_spectrum, IrrepMatrixSet};
pub use isotypic::{
    project_isotypic, project_isotypic_dense, project_isotypic_permutation, Detail,
    IsotypicBlock, IsotypicDecomposition, SparseVector,
};
pub use permutation::{Permutation, MAX_DEGREE};
pub use young::{partitions, tableau_contents, YoungDiagram};

use crate::error::Result;

/// `p ∘ q`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    p.compose(q)
}

pub fn standard_tableaux_count(lambda: &YoungDiagram) -> u64 {
    lambda.standard_tableaux_count()
}

pub fn semistandard_count(lambda: &YoungDiagram, j: usize) -> u64 {
    lambda.semistandard_count(j)
}
