use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::group::SymmetricGroup;
use super::irrep::{irrep_matrices, relation_residuals};
use super::young::{partitions, YoungDiagram};
use crate::error::{Error, Result};
use crate::tolerances::{ORTHONORMALITY_TOL, RELATION_TOL};

/// Column vector stored as `(row, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn to_dense(&self, dim: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        for &(i, x) in &self.entries {
            v[i] += x;
        }
        v
    }

    pub fn dot_dense(&self, v: &DVector<f64>) -> f64 {
        self.entries.iter().map(|&(i, x)| x * v[i]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        // entries are sorted by row
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, x) = self.entries[i];
            let (b, y) = other.entries[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    fn from_local(support: &[usize], local: &DVector<f64>) -> SparseVector {
        let mut entries: Vec<(usize, f64)> = support
            .iter()
            .zip(local.iter())
            .filter(|(_, &x)| x != 0.0)
            .map(|(&i, &x)| (i, x))
            .collect();
        entries.sort_by_key(|&(i, _)| i);
        SparseVector { entries }
    }
}

/// All copies of one irrep inside a representation.
#[derive(Debug, Clone)]
pub struct IsotypicBlock {
    pub multiplicity: usize,
    /// Dimension `f_λ` of the irrep.
    pub irrep_dimension: usize,
    /// One vector per copy, each transforming as the first
    /// Gelfand-Tsetlin basis vector of its copy. An operator commuting with
    /// the group reduces to the `multiplicity × multiplicity` matrix in this
    /// basis.
    pub leading: Vec<SparseVector>,
    /// Full orthonormal basis of the component, copy-major:
    /// `basis[c * f + i]` is row `i` of copy `c`. Empty when only the
    /// leading vectors were requested.
    pub basis: Vec<SparseVector>,
}

impl IsotypicBlock {
    /// `Lᵀ A L` for the leading vectors `L`.
    pub fn reduce(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        self.reduce_with(a.nrows(), |v| a * v)
    }

    /// `Lᵀ A L` with `A` given by its action on dense vectors.
    pub fn reduce_with<F>(&self, dim: usize, apply: F) -> DMatrix<f64>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let m = self.multiplicity;
        let images: Vec<DVector<f64>> = self.leading.iter().map(|l| apply(&l.to_dense(dim))).collect();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.leading[i].dot_dense(&images[j]);
            }
        }
        // symmetrize rounding
        (&out + out.transpose()) * 0.5
    }
}

/// Decomposition of an `S_N` representation into isotypic components.
#[derive(Debug, Clone)]
pub struct IsotypicDecomposition {
    pub degree: usize,
    pub dimension: usize,
    pub blocks: BTreeMap<YoungDiagram, IsotypicBlock>,
}

impl IsotypicDecomposition {
    pub fn multiplicity(&self, lambda: &YoungDiagram) -> usize {
        self.blocks.get(lambda).map_or(0, |b| b.multiplicity)
    }

    pub fn multiplicities(&self) -> BTreeMap<YoungDiagram, usize> {
        self.blocks
            .iter()
            .map(|(l, b)| (l.clone(), b.multiplicity))
            .collect()
    }

    /// `max |⟨u|v⟩ - δ_uv|` over the full basis.
    pub fn orthonormality_residual(&self) -> f64 {
        let all: Vec<&SparseVector> = self.blocks.values().flat_map(|b| b.basis.iter()).collect();
        let mut worst = 0.0f64;
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.dot(v) - target).abs());
            }
        }
        worst
    }
}

/// Which parts of the decomposition to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detail {
    /// Leading vectors only (enough to reduce commuting operators).
    Leading,
    /// Leading vectors and the complete orthonormal basis.
    Full,
}

/// Isotypic decomposition of a representation given by dense matrices for
/// the adjacent transpositions `s_1 .. s_{N-1}`.
///
/// The matrices must be orthogonal and satisfy the Coxeter relations of
/// `S_N` within the relation tolerance; otherwise the violated relation is
/// reported.
pub fn project_isotypic(generators: &[DMatrix<f64>]) -> Result<IsotypicDecomposition> {
    project_isotypic_dense(generators, Detail::Full, None)
}

pub fn project_isotypic_dense(
    generators: &[DMatrix<f64>],
    detail: Detail,
    only: Option<&YoungDiagram>,
) -> Result<IsotypicDecomposition> {
    if generators.is_empty() {
        return Err(Error::Projection(
            "at least one generator is required; use degree >= 2".into(),
        ));
    }
    let n = generators.len() + 1;
    let dim = generators[0].nrows();
    if generators.iter().any(|g| g.nrows() != dim || g.ncols() != dim) {
        return Err(Error::Projection("generator matrices must share one square shape".into()));
    }
    for (relation, residual) in relation_residuals(generators) {
        if !(residual <= RELATION_TOL) {
            return Err(Error::RelationViolated { relation, residual });
        }
    }
    let group = SymmetricGroup::get(n)?;
    let identity = DMatrix::<f64>::identity(dim, dim);
    let elements = group.propagate(identity, generators, |s, x| s * x);
    let support: Vec<usize> = (0..dim).collect();

    let mut blocks = BTreeMap::new();
    for lambda in partitions(n) {
        if only.is_some_and(|l| *l != lambda) {
            continue;
        }
        let irrep = irrep_matrices(&lambda)?;
        let f = irrep.dimension;
        let coeffs = irrep.columns_over_group(&group, 0);
        let scale = f as f64 / group.order() as f64;

        let mut p00 = DMatrix::<f64>::zeros(dim, dim);
        for (g, m) in elements.iter().enumerate() {
            p00 += m * (scale * coeffs[g][0]);
        }
        let leading_local = range_basis(&p00)?;
        if leading_local.is_empty() {
            continue;
        }
        let mut block = IsotypicBlock {
            multiplicity: leading_local.len(),
            irrep_dimension: f,
            leading: leading_local
                .iter()
                .map(|b| SparseVector::from_local(&support, b))
                .collect(),
            basis: Vec::new(),
        };
        if detail == Detail::Full {
            for b in &leading_local {
                let images: Vec<DVector<f64>> = elements.iter().map(|m| m * b).collect();
                for i in 0..f {
                    let mut row = DVector::zeros(dim);
                    for (g, img) in images.iter().enumerate() {
                        row.axpy(scale * coeffs[g][i], img, 1.0);
                    }
                    block.basis.push(SparseVector::from_local(&support, &row));
                }
            }
        }
        blocks.insert(lambda, block);
    }
    Ok(IsotypicDecomposition {
        degree: n,
        dimension: dim,
        blocks,
    })
}

/// Isotypic decomposition of a permutation representation: `generators[k]`
/// lists the image of every basis point under `s_{k+1}`.
///
/// Works orbit by orbit, so the cost grows with the orbit sizes (at most
/// `N!`) rather than with the total dimension.
pub fn project_isotypic_permutation(
    dimension: usize,
    generators: &[Vec<usize>],
    detail: Detail,
    only: Option<&YoungDiagram>,
) -> Result<IsotypicDecomposition> {
    let n = generators.len() + 1;
    check_permutation_generators(dimension, generators)?;
    let group = SymmetricGroup::get(n)?;
    let identity: Vec<usize> = (0..dimension).collect();
    let point_maps = group.propagate(identity, generators, |s, h| h.iter().map(|&x| s[x]).collect());
    let orbits = orbits(dimension, generators);

    let mut blocks = BTreeMap::new();
    for lambda in partitions(n) {
        if only.is_some_and(|l| *l != lambda) {
            continue;
        }
        let f = lambda.standard_tableaux_count() as usize;
        let coeffs: Vec<DVector<f64>> = if n == 1 {
            vec![DVector::from_element(1, 1.0)]
        } else {
            irrep_matrices(&lambda)?.columns_over_group(&group, 0)
        };
        let scale = f as f64 / group.order() as f64;
        let mut block = IsotypicBlock {
            multiplicity: 0,
            irrep_dimension: f,
            leading: Vec::new(),
            basis: Vec::new(),
        };
        let mut local_index = vec![usize::MAX; dimension];
        for orbit in &orbits {
            for (li, &x) in orbit.iter().enumerate() {
                local_index[x] = li;
            }
            let d = orbit.len();
            let mut p00 = DMatrix::<f64>::zeros(d, d);
            for (col, &x) in orbit.iter().enumerate() {
                for (g, pm) in point_maps.iter().enumerate() {
                    p00[(local_index[pm[x]], col)] += scale * coeffs[g][0];
                }
            }
            let leading_local = range_basis(&p00)?;
            for b in &leading_local {
                block.leading.push(SparseVector::from_local(orbit, b));
                if detail == Detail::Full {
                    let mut rows = vec![DVector::<f64>::zeros(d); f];
                    for (g, pm) in point_maps.iter().enumerate() {
                        for (col, &x) in orbit.iter().enumerate() {
                            if b[col] == 0.0 {
                                continue;
                            }
                            let target = local_index[pm[x]];
                            for (i, row) in rows.iter_mut().enumerate() {
                                row[target] += scale * coeffs[g][i] * b[col];
                            }
                        }
                    }
                    block
                        .basis
                        .extend(rows.iter().map(|r| SparseVector::from_local(orbit, r)));
                }
            }
            block.multiplicity += leading_local.len();
        }
        if block.multiplicity > 0 {
            blocks.insert(lambda, block);
        }
    }
    Ok(IsotypicDecomposition {
        degree: n,
        dimension,
        blocks,
    })
}

fn check_permutation_generators(dimension: usize, generators: &[Vec<usize>]) -> Result<()> {
    for (k, g) in generators.iter().enumerate() {
        let mut seen = vec![false; dimension];
        if g.len() != dimension || g.iter().any(|&x| x >= dimension || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::Projection(format!("generator s_{} is not a permutation of the basis", k + 1)));
        }
    }
    let violations = |relation: String, count: usize| -> Result<()> {
        if count > 0 {
            Err(Error::RelationViolated {
                relation,
                residual: count as f64,
            })
        } else {
            Ok(())
        }
    };
    for (k, s) in generators.iter().enumerate() {
        let bad = (0..dimension).filter(|&x| s[s[x]] != x).count();
        violations(format!("s_{0}^2 = 1", k + 1), bad)?;
    }
    for k in 0..generators.len().saturating_sub(1) {
        let (a, b) = (&generators[k], &generators[k + 1]);
        let bad = (0..dimension).filter(|&x| a[b[a[x]]] != b[a[b[x]]]).count();
        violations(format!("s_{0} s_{1} s_{0} = s_{1} s_{0} s_{1}", k + 1, k + 2), bad)?;
    }
    for k in 0..generators.len() {
        for j in k + 2..generators.len() {
            let (a, b) = (&generators[k], &generators[j]);
            let bad = (0..dimension).filter(|&x| a[b[x]] != b[a[x]]).count();
            violations(format!("s_{} s_{} = s_{} s_{}", k + 1, j + 1, j + 1, k + 1), bad)?;
        }
    }
    Ok(())
}

/// Orbits of the generated group, each sorted ascending, ordered by their
/// smallest point.
pub(crate) fn orbits(dimension: usize, generators: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; dimension];
    let mut out = Vec::new();
    for start in 0..dimension {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            for g in generators {
                let y = g[x];
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
            head += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Orthonormal basis of the range of a symmetric projector, by
/// Gram-Schmidt with column pivoting. The rank is read off the trace.
fn range_basis(p: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let trace = p.trace();
    let rank = trace.round();
    if (trace - rank).abs() > 1e-6 || rank < 0.0 {
        return Err(Error::Projection(format!(
            "projector trace {trace} is not an integer; the action is not a representation"
        )));
    }
    let rank = rank as usize;
    let d = p.ncols();
    let mut residual = p.clone();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (best, norm) = (0..d)
            .map(|c| (c, residual.column(c).norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm < 1e-6 {
            return Err(Error::Projection("projector range collapsed during pivoting".into()));
        }
        let mut q: DVector<f64> = residual.column(best) / norm;
        for b in &basis {
            let overlap = b.dot(&q);
            q.axpy(-overlap, b, 1.0);
        }
        q /= q.norm();
        for c in 0..d {
            let overlap = q.dot(&residual.column(c));
            let mut col = residual.column_mut(c);
            col.axpy(-overlap, &q, 1.0);
        }
        basis.push(q);
    }
    if let Some(worst) = basis
        .iter()
        .map(|b| (p * b - b).amax())
        .reduce(f64::max)
    {
        if worst > ORTHONORMALITY_TOL.sqrt() {
            return Err(Error::Projection(format!(
                "leading vectors leave the projector range (residual {worst:.2e})"
            )));
        }
    }
    Ok(basis)
}
