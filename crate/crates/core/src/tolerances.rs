//! Numerical tolerances shared across modules.

/// Accepted residual of the Coxeter relations for a supplied action.
pub const RELATION_TOL: f64 = 1e-8;

/// Orthonormality of symmetry-adapted and one-body bases.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Orthonormality of one-body orbitals.
pub const ORBITAL_ORTHONORMALITY_TOL: f64 = 1e-8;

/// Symmetry check for grid potentials, `|V(x) - V(-x)|`.
pub const PARITY_TOL: f64 = 1e-12;

/// Advertised accuracy of grid one-body energies, relative to `max(1, |ε|)`.
pub const GRID_ENERGY_TOL: f64 = 1e-4;

/// Largest accepted quadrature error bound for a contact matrix element.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Absolute tolerance for grouping non-interacting energies into levels.
pub const ENERGY_GROUPING_TOL: f64 = 1e-9;

/// Commutator norms and symmetry residuals of assembled Hamiltonians.
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// Largest block that is still solvable by radicals.
pub const SOLVABLE_BLOCK_SIZE: usize = 4;
