use nalgebra::{DMatrix, DVector};

use super::group::SymmetricGroup;
use super::permutation::Permutation;
use super::young::{tableau_contents, YoungDiagram};
use crate::error::{Error, Result};

/// Orthogonal generator matrices of one irrep of `S_N` in Young's
/// orthogonal form, i.e. in the Gelfand-Tsetlin basis adapted to
/// `S_N ⊃ S_{N-1} ⊃ ... ⊃ S_1`.
#[derive(Debug, Clone)]
pub struct IrrepMatrixSet {
    pub diagram: YoungDiagram,
    pub dimension: usize,
    /// `generator_matrices[k-1]` represents `s_k = (k, k+1)`.
    pub generator_matrices: Vec<DMatrix<f64>>,
    tableaux: Vec<Vec<usize>>,
}

impl IrrepMatrixSet {
    pub fn degree(&self) -> usize {
        self.diagram.size()
    }

    /// Standard tableaux labelling the basis, in row-path form.
    pub fn tableaux(&self) -> &[Vec<usize>] {
        &self.tableaux
    }

    /// Representation matrix of an arbitrary permutation.
    pub fn element_matrix(&self, p: &Permutation) -> Result<DMatrix<f64>> {
        let group = SymmetricGroup::get(self.degree())?;
        let mut m = DMatrix::identity(self.dimension, self.dimension);
        for &k in group.word(p)?.iter() {
            m *= &self.generator_matrices[k];
        }
        Ok(m)
    }

    /// Column `col` of the representation matrix of every group element,
    /// in the element order of [`SymmetricGroup`].
    pub fn columns_over_group(&self, group: &SymmetricGroup, col: usize) -> Vec<DVector<f64>> {
        let mut e = DVector::zeros(self.dimension);
        e[col] = 1.0;
        group.propagate(e, &self.generator_matrices, |s, x| s * x)
    }

    /// Largest violation of `s_k^2 = 1`, symmetry, braid and distant
    /// commutation relations.
    pub fn relation_residual(&self) -> f64 {
        relation_residuals(&self.generator_matrices)
            .into_iter()
            .map(|(_, r)| r)
            .fold(0.0, f64::max)
    }
}

/// Young's orthogonal form for `diagram`.
pub fn irrep_matrices(diagram: &YoungDiagram) -> Result<IrrepMatrixSet> {
    let n = diagram.size();
    if n < 2 {
        return Err(Error::DegreeOutOfRange(n));
    }
    let tableaux = diagram.standard_tableaux();
    let dim = tableaux.len();
    let lookup: std::collections::HashMap<&[usize], usize> = tableaux
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let contents: Vec<Vec<i64>> = tableaux.iter().map(|t| tableau_contents(t)).collect();

    let mut gens = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        // s_{k+1} exchanges entries k and k+1 (0-based)
        let mut m = DMatrix::zeros(dim, dim);
        for (i, t) in tableaux.iter().enumerate() {
            let axial = (contents[i][k + 1] - contents[i][k]) as f64;
            let diag = 1.0 / axial;
            m[(i, i)] = diag;
            if t[k] != t[k + 1] {
                let mut swapped = t.clone();
                swapped.swap(k, k + 1);
                if let Some(&j) = lookup.get(swapped.as_slice()) {
                    m[(j, i)] = (1.0 - diag * diag).sqrt();
                }
            }
        }
        gens.push(m);
    }
    Ok(IrrepMatrixSet {
        diagram: diagram.clone(),
        dimension: dim,
        generator_matrices: gens,
        tableaux,
    })
}

/// Eigenvalues of the Jucys-Murphy elements `X_k = Σ_{i<k} (i k)` on each
/// Gelfand-Tsetlin basis vector, read off the diagonal of the represented
/// class sums. Entry `[v][k-1]` is the eigenvalue of `X_k` on vector `v`.
pub fn jucys_murphy_spectrum(diagram: &YoungDiagram) -> Result<Vec<Vec<f64>>> {
    let n = diagram.size();
    if n == 1 {
        return Ok(vec![vec![0.0]]);
    }
    let irrep = irrep_matrices(diagram)?;
    let dim = irrep.dimension;
    let mut out = vec![vec![0.0; n]; dim];
    for k in 1..n {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..k {
            x += irrep.element_matrix(&Permutation::transposition(n, i, k))?;
        }
        let off_diagonal = (0..dim)
            .flat_map(|a| (0..dim).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| x[(a, b)].abs())
            .fold(0.0, f64::max);
        if off_diagonal > 1e-8 {
            return Err(Error::RelationViolated {
                relation: format!("X_{} diagonal in Gelfand-Tsetlin basis", k + 1),
                residual: off_diagonal,
            });
        }
        for (v, row) in out.iter_mut().enumerate() {
            row[k] = x[(v, v)];
        }
    }
    Ok(out)
}

/// Residual of each Coxeter relation for a list of generator matrices.
pub(crate) fn relation_residuals(gens: &[DMatrix<f64>]) -> Vec<(String, f64)> {
    let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut out = Vec::new();
    for (k, s) in gens.iter().enumerate() {
        let id = DMatrix::identity(s.nrows(), s.ncols());
        out.push((format!("s_{0}^2 = 1", k + 1), max_abs(&(s * s - &id))));
    }
    for k in 0..gens.len().saturating_sub(1) {
        let (a, b) = (&gens[k], &gens[k + 1]);
        out.push((
            format!("s_{0} s_{1} s_{0} = s_{1} s_{0} s_{1}", k + 1, k + 2),
            max_abs(&(a * b * a - b * a * b)),
        ));
    }
    for k in 0..gens.len() {
        for j in k + 2..gens.len() {
            let (a, b) = (&gens[k], &gens[j]);
            out.push((
                format!("s_{} s_{} = s_{} s_{}", k + 1, j + 1, j + 1, k + 1),
                max_abs(&(a * b - b * a)),
            ));
        }
    }
    out
}
