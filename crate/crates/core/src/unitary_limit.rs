//! Infinite-coupling spectrum, sector graph and near-unitary splitting.
//!
//! A sector is stored as the permutation `s` sending particle `i` to its
//! position `s(i)` in the ordering. Particle relabelling acts on the right
//! (`s ∘ p⁻¹`), reordering acts on the left (`o ∘ s`). Tunnelling through
//! the coincidence of positions `k` and `k+1` joins `s` and `τ_k ∘ s`, so
//! the effective Hamiltonian commutes with relabelling and mixes orderings.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::contact_tensor::build_tensor;
use crate::error::{Error, Result};
use crate::exact_diag::extrapolated_sector_ground;
use crate::group_theory::{
    partitions, project_isotypic_permutation, Detail, Permutation, SymmetricGroup, YoungDiagram, MAX_DEGREE,
};
use crate::linalg::symmetric_eigenvalues;
use crate::one_body::OneBodyBasis;
use crate::tolerances::{ENERGY_GROUPING_TOL, SOLVABLE_BLOCK_SIZE};
use crate::weak_coupling::{basis_coverage, pairing_multiplicity, Statistics};

/// Level of the infinite-coupling spectrum built from distinct orbitals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryLevel {
    pub orbital_set: Vec<usize>,
    pub energy: f64,
    /// One state per sector, `N!`.
    pub pre_symmetrization_degeneracy: u64,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Sets of `n` distinct orbitals with total energy `≤ e_cut`, ascending.
pub fn unitary_spectrum(basis: &OneBodyBasis, n: usize, e_cut: f64) -> Result<Vec<UnitaryLevel>> {
    if n == 0 {
        return Err(Error::Unitary("particle number must be positive".into()));
    }
    let coverage = basis_coverage(basis, n);
    if e_cut > coverage + ENERGY_GROUPING_TOL {
        return Err(Error::CutoffCoverage { e_cut, coverage });
    }
    let eps = basis.energies();
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    distinct_sets(eps, n, e_cut + ENERGY_GROUPING_TOL, 0, 0.0, &mut stack, &mut out);
    out.sort_by(|a: &UnitaryLevel, b| a.energy.total_cmp(&b.energy).then_with(|| a.orbital_set.cmp(&b.orbital_set)));
    Ok(out)
}

fn distinct_sets(
    eps: &[f64],
    remaining: usize,
    limit: f64,
    min: usize,
    partial: f64,
    stack: &mut Vec<usize>,
    out: &mut Vec<UnitaryLevel>,
) {
    if remaining == 0 {
        out.push(UnitaryLevel {
            orbital_set: stack.clone(),
            energy: partial,
            pre_symmetrization_degeneracy: factorial(stack.len()),
        });
        return;
    }
    for k in min..eps.len() {
        // cheapest completion uses the next `remaining` orbitals
        let floor: f64 = eps[k..].iter().take(remaining).sum();
        if eps.len() - k < remaining || partial + floor > limit {
            break;
        }
        stack.push(k);
        distinct_sets(eps, remaining - 1, limit, k + 1, partial + eps[k], stack, out);
        stack.pop();
    }
}

/// Relabelling particles by `p`: `s ↦ s ∘ p⁻¹`.
pub fn particle_action(p: &Permutation, s: &Permutation) -> Result<Permutation> {
    s.compose(&p.inverse())
}

/// Reordering positions by `o`: `s ↦ o ∘ s`.
pub fn ordering_action(o: &Permutation, s: &Permutation) -> Result<Permutation> {
    o.compose(s)
}

/// Number of physical states in one generic infinite-coupling level.
pub fn degeneracy_count(n: usize, components: usize, statistics: Statistics) -> Result<u64> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    Ok(partitions(n)
        .iter()
        .map(|l| l.standard_tableaux_count() * pairing_multiplicity(l, statistics, components))
        .sum())
}

/// Independent tunnelling amplitudes: `N - 1`, or `⌈(N-1)/2⌉` when the
/// trap is reflection symmetric.
pub fn distinct_tunneling_parameters(n: usize, symmetric: bool) -> usize {
    let edges = n.saturating_sub(1);
    if symmetric {
        edges.div_ceil(2)
    } else {
        edges
    }
}

/// Expands independent amplitudes into `t_1 .. t_{N-1}` with `t_k = t_{N-k}`.
pub fn palindromic_tunneling(n: usize, independent: &[f64]) -> Result<Vec<f64>> {
    let need = distinct_tunneling_parameters(n, true);
    if independent.len() != need {
        return Err(Error::Unitary(format!("{n} particles in a symmetric trap take {need} amplitudes, got {}", independent.len())));
    }
    Ok((0..n - 1).map(|k| independent[k.min(n - 2 - k)]).collect())
}

/// Orderings of `N` particles joined by nearest-neighbour tunnelling.
#[derive(Debug, Clone)]
pub struct SectorGraph {
    particles: usize,
    tunneling: Vec<f64>,
    nodes: Vec<Permutation>,
    /// `edges[k][s]`: node reached from `s` across positions `k+1, k+2`.
    edges: Vec<Vec<usize>>,
}

impl SectorGraph {
    pub fn new(n: usize, tunneling: Vec<f64>) -> Result<SectorGraph> {
        if n < 2 {
            return Err(Error::Unitary("sector graph needs at least two particles".into()));
        }
        let group = SymmetricGroup::get(n)?;
        if tunneling.len() != n - 1 {
            return Err(Error::Unitary(format!("{n} particles need {} tunnelling amplitudes, got {}", n - 1, tunneling.len())));
        }
        if tunneling.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Unitary("tunnelling amplitudes must be finite and non-negative".into()));
        }
        let nodes = group.elements().to_vec();
        let edges = (1..n)
            .map(|k| {
                let swap = Permutation::adjacent(n, k);
                nodes
                    .iter()
                    .map(|s| group.index_of(&swap.compose(s).expect("same degree")).expect("in group"))
                    .collect()
            })
            .collect();
        Ok(SectorGraph {
            particles: n,
            tunneling,
            nodes,
            edges,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn tunneling(&self) -> &[f64] {
        &self.tunneling
    }

    pub fn nodes(&self) -> &[Permutation] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn neighbour(&self, k: usize, s: usize) -> usize {
        self.edges[k][s]
    }

    /// `(s, s', k)` with `s < s'` and 1-based position `k`.
    pub fn edge_list(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (k, matching) in self.edges.iter().enumerate() {
            for (s, &t) in matching.iter().enumerate() {
                if s < t {
                    out.push((s, t, k + 1));
                }
            }
        }
        out
    }

    pub fn is_palindromic(&self) -> bool {
        let t = &self.tunneling;
        let scale = t.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        t.iter().zip(t.iter().rev()).all(|(a, b)| (a - b).abs() <= 1e-12 * scale)
    }

    /// `H_eff v = -Σ_k t_k A_k v`, shifts relative to the unitary level.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for (k, matching) in self.edges.iter().enumerate() {
            let t = self.tunneling[k];
            for (s, &u) in matching.iter().enumerate() {
                out[s] -= t * v[u];
            }
        }
        out
    }

    pub fn effective_matrix(&self) -> DMatrix<f64> {
        let dim = self.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (k, matching) in self.edges.iter().enumerate() {
            for (s, &u) in matching.iter().enumerate() {
                m[(s, u)] -= self.tunneling[k];
            }
        }
        m
    }

    /// Node-index map of an action on sectors.
    fn node_map<F: Fn(&Permutation) -> Permutation>(&self, f: F) -> Vec<usize> {
        let group = SymmetricGroup::get(self.particles).expect("valid degree");
        self.nodes.iter().map(|s| group.index_of(&f(s)).expect("in group")).collect()
    }

    fn commutator_with(&self, map: &[usize]) -> f64 {
        let h = self.effective_matrix();
        let mut worst = 0.0f64;
        for s in 0..self.len() {
            for u in 0..self.len() {
                worst = worst.max((h[(map[s], map[u])] - h[(s, u)]).abs());
            }
        }
        worst
    }

    /// `max |[H_eff, U]|` over all particle relabellings.
    pub fn particle_commutator(&self) -> f64 {
        self.nodes
            .iter()
            .map(|p| self.commutator_with(&self.node_map(|s| particle_action(p, s).unwrap())))
            .fold(0.0, f64::max)
    }

    /// `max |[H_eff, U]|` over all reorderings; nonzero once any `t_k > 0`.
    pub fn ordering_commutator(&self) -> f64 {
        self.nodes
            .iter()
            .map(|o| self.commutator_with(&self.node_map(|s| ordering_action(o, s).unwrap())))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelingBlock {
    pub lambda: YoungDiagram,
    /// Eigenvalue of position reversal on the block, when applied.
    pub reversal: Option<i8>,
    pub size: usize,
    pub irrep_dimension: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearUnitaryReport {
    pub particles: usize,
    pub t: Vec<f64>,
    pub reversal_applied: bool,
    pub blocks: Vec<TunnelingBlock>,
    pub max_block_size: usize,
    pub solvable: bool,
    /// Shift of the totally symmetric combination, `-Σ t_k`.
    pub trivial_shift: f64,
    /// Shift of the totally antisymmetric combination, `+Σ t_k`.
    pub sign_shift: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub statistics_views: Vec<NearUnitaryView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearUnitaryView {
    pub statistics: Statistics,
    pub components: usize,
    /// `(λ, shift, multiplicity)`, ascending in shift.
    pub levels: Vec<(YoungDiagram, f64, u64)>,
}

/// Splits the `N!` sectors of one infinite-coupling level to first order in
/// the tunnelling amplitudes.
///
/// Blocks follow the particle-relabelling irreps. With `trap_symmetric`, the
/// amplitudes must be palindromic and position reversal splits each block
/// further.
pub fn near_unitary_splitting(graph: &SectorGraph, trap_symmetric: bool) -> Result<NearUnitaryReport> {
    if trap_symmetric && !graph.is_palindromic() {
        return Err(Error::Unitary(format!(
            "symmetric trap needs t_k = t_(N-k), got {:?}",
            graph.tunneling()
        )));
    }
    let n = graph.particles();
    let dim = graph.len();
    let generators: Vec<Vec<usize>> = (1..n)
        .map(|k| {
            let p = Permutation::adjacent(n, k);
            graph.node_map(|s| particle_action(&p, s).unwrap())
        })
        .collect();
    let decomposition = project_isotypic_permutation(dim, &generators, Detail::Leading, None)?;
    let reversal = Permutation::reversal(n);
    let reversal_map = graph.node_map(|s| reversal.compose(s).unwrap());

    let mut blocks = Vec::new();
    for (lambda, block) in &decomposition.blocks {
        if block.multiplicity == 0 {
            continue;
        }
        let h = block.reduce_with(dim, |v| graph.apply(v));
        if trap_symmetric {
            let r = block.reduce_with(dim, |v| DVector::from_fn(dim, |s, _| v[reversal_map[s]]));
            let eig = SymmetricEigen::new(r);
            for sign in [1i8, -1] {
                let columns: Vec<DVector<f64>> = (0..block.multiplicity)
                    .filter(|&i| (eig.eigenvalues[i] > 0.0) == (sign > 0))
                    .map(|i| eig.eigenvectors.column(i).into_owned())
                    .collect();
                if columns.is_empty() {
                    continue;
                }
                let v = DMatrix::from_columns(&columns);
                let sub = v.transpose() * &h * &v;
                blocks.push(TunnelingBlock {
                    lambda: lambda.clone(),
                    reversal: Some(sign),
                    size: columns.len(),
                    irrep_dimension: block.irrep_dimension,
                    eigenvalues: symmetric_eigenvalues(&((&sub + sub.transpose()) * 0.5)),
                });
            }
        } else {
            blocks.push(TunnelingBlock {
                lambda: lambda.clone(),
                reversal: None,
                size: block.multiplicity,
                irrep_dimension: block.irrep_dimension,
                eigenvalues: symmetric_eigenvalues(&h),
            });
        }
    }
    let max_block_size = blocks.iter().map(|b| b.size).max().unwrap_or(0);
    let total: f64 = graph.tunneling().iter().sum();
    Ok(NearUnitaryReport {
        particles: n,
        t: graph.tunneling().to_vec(),
        reversal_applied: trap_symmetric,
        blocks,
        max_block_size,
        solvable: max_block_size <= SOLVABLE_BLOCK_SIZE,
        trivial_shift: -total,
        sign_shift: total,
        statistics_views: Vec::new(),
    })
}

impl NearUnitaryReport {
    /// All shifts, each repeated by its irrep dimension, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.eigenvalues.iter().flat_map(move |&e| std::iter::repeat_n(e, b.irrep_dimension)))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn block(&self, lambda: &YoungDiagram) -> Vec<&TunnelingBlock> {
        self.blocks.iter().filter(|b| &b.lambda == lambda).collect()
    }

    pub fn with_views(mut self, views: &[(Statistics, usize)]) -> NearUnitaryReport {
        self.statistics_views = views
            .iter()
            .map(|&(statistics, components)| {
                let mut levels: Vec<(YoungDiagram, f64, u64)> = Vec::new();
                for b in &self.blocks {
                    let m = pairing_multiplicity(&b.lambda, statistics, components);
                    if m > 0 {
                        levels.extend(b.eigenvalues.iter().map(|&e| (b.lambda.clone(), e, m)));
                    }
                }
                levels.sort_by(|a, b| a.1.total_cmp(&b.1));
                NearUnitaryView {
                    statistics,
                    components,
                    levels,
                }
            })
            .collect();
        self
    }
}

/// Fit of the lowest infinite-coupling multiplet width against `1/g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelingFit {
    pub particles: usize,
    pub g_values: Vec<f64>,
    pub unitary_energy: f64,
    /// Gap between the totally antisymmetric and symmetric states.
    pub splittings: Vec<f64>,
    /// `splitting ≈ c/g + d/g²`.
    pub coefficient: f64,
    pub correction: f64,
    pub residual: f64,
    /// Exponent of `g`, from local log-log slopes extrapolated to `1/g → 0`.
    pub exponent: f64,
    /// Single power-law fit over all points.
    pub naive_exponent: f64,
    /// `g · t` for equal amplitudes (two particles, or three in a
    /// symmetric trap).
    pub tunneling: Option<f64>,
    pub cutoffs: Vec<usize>,
}

/// Index-sum cutoffs used by [`tunneling_from_fit`].
pub fn fit_cutoffs(n: usize) -> Vec<usize> {
    if n == 2 {
        vec![24, 32, 48, 64]
    } else {
        vec![12, 16, 24, 32]
    }
}

/// Measures the lowest multiplet width by exact diagonalization at each
/// coupling (extrapolated to infinite cutoff) and fits its `1/g` decay.
pub fn tunneling_from_fit(basis: &OneBodyBasis, n: usize, g_values: &[f64]) -> Result<TunnelingFit> {
    if !(2..=3).contains(&n) {
        return Err(Error::Fit(format!("fits are limited to 2 or 3 particles, got {n}")));
    }
    if g_values.len() < 2 {
        return Err(Error::Fit("need at least two couplings".into()));
    }
    if let Some(g) = g_values.iter().find(|&&g| !(g >= 10.0)) {
        return Err(Error::Fit(format!("coupling {g} below 10 is outside the near-unitary regime")));
    }
    let mut g_sorted = g_values.to_vec();
    g_sorted.sort_by(f64::total_cmp);
    if g_sorted.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Fit("couplings must be distinct".into()));
    }
    let cutoffs = fit_cutoffs(n);
    let highest = *cutoffs.last().unwrap();
    if basis.len() <= highest {
        return Err(Error::Fit(format!("basis needs {} levels, has {}", highest + 1, basis.len())));
    }
    let tensor = build_tensor(basis, highest + 1)?;
    let grounds = extrapolated_sector_ground(basis, &tensor, n, &YoungDiagram::row(n), &g_sorted, &cutoffs)?;
    let unitary_energy: f64 = basis.energies()[..n].iter().sum();
    let splittings: Vec<f64> = grounds.iter().map(|e| unitary_energy - e).collect();
    if splittings.iter().any(|&s| !(s > 0.0)) || splittings.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Fit(format!(
            "splittings {splittings:?} do not decrease monotonically; use larger couplings"
        )));
    }

    // least squares in the basis {1/g, 1/g²}
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&g, &s) in g_sorted.iter().zip(&splittings) {
        let (x1, x2) = (1.0 / g, 1.0 / (g * g));
        a11 += x1 * x1;
        a12 += x1 * x2;
        a22 += x2 * x2;
        b1 += x1 * s;
        b2 += x2 * s;
    }
    let det = a11 * a22 - a12 * a12;
    let (coefficient, correction) = ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det);
    let residual = (g_sorted
        .iter()
        .zip(&splittings)
        .map(|(&g, &s)| (s - coefficient / g - correction / (g * g)).powi(2))
        .sum::<f64>()
        / g_sorted.len() as f64)
        .sqrt();

    let logs: Vec<(f64, f64)> = g_sorted.iter().zip(&splittings).map(|(g, s)| (g.ln(), s.ln())).collect();
    let slopes: Vec<(f64, f64)> = logs
        .windows(2)
        .map(|w| {
            let inv_mid = (-(w[0].0 + w[1].0) / 2.0).exp();
            (inv_mid, (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        })
        .collect();
    let exponent = if slopes.len() == 1 { slopes[0].1 } else { linear_fit(&slopes).0 };
    let naive_exponent = linear_fit(&logs).1;

    let tunneling = match (n, basis.parity().is_some()) {
        (2, _) => Some(coefficient / 2.0),
        (3, true) => Some(coefficient / 4.0),
        _ => None,
    };
    Ok(TunnelingFit {
        particles: n,
        g_values: g_sorted,
        unitary_energy,
        splittings,
        coefficient,
        correction,
        residual,
        exponent,
        naive_exponent,
        tunneling,
        cutoffs,
    })
}

/// Intercept and slope of the least-squares line through `points`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::one_body::{one_body_solve, TrapSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
        let all = Permutation::all(n);
        all[rng.gen_range(0..all.len())].clone()
    }

    #[test]
    fn unitary_levels() {
        let h = one_body_solve(&TrapSpec::Harmonic, 20).unwrap();
        let two = unitary_spectrum(&h, 2, 5.0).unwrap();
        assert_eq!(two[0].energy, 2.0);
        assert_eq!(two[0].pre_symmetrization_degeneracy, 2);
        let three = unitary_spectrum(&h, 3, 6.0).unwrap();
        assert_eq!(three[0].energy, 4.5);
        assert_eq!(three[0].pre_symmetrization_degeneracy, 6);
        for n in 1..=5 {
            for level in unitary_spectrum(&h, n, 12.0).unwrap() {
                assert_eq!(level.pre_symmetrization_degeneracy, factorial(n));
                assert!(level.orbital_set.windows(2).all(|w| w[0] < w[1]));
            }
        }

        let w = one_body_solve(&TrapSpec::InfiniteWell, 8).unwrap();
        let unit = PI * PI / 2.0;
        let levels = unitary_spectrum(&w, 2, 30.0 * unit).unwrap();
        let scaled: Vec<f64> = levels.iter().map(|l| (l.energy / unit).round()).collect();
        assert_eq!(&scaled[..5], &[5.0, 10.0, 13.0, 17.0, 20.0]);
        assert!(unitary_spectrum(&w, 2, 1e4).is_err());
    }

    #[test]
    fn actions_commute_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=6 {
            for _ in 0..20 {
                let (p, o, s) = (random_perm(n, &mut rng), random_perm(n, &mut rng), random_perm(n, &mut rng));
                assert_eq!(particle_action(&Permutation::identity(n), &s).unwrap(), s);
                assert_eq!(ordering_action(&o, &ordering_action(&o.inverse(), &s).unwrap()).unwrap(), s);
                let left = particle_action(&p, &ordering_action(&o, &s).unwrap()).unwrap();
                let right = ordering_action(&o, &particle_action(&p, &s).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
        assert!(particle_action(&Permutation::identity(3), &Permutation::identity(4)).is_err());
    }

    #[test]
    fn degeneracy_counts() {
        for n in 1..=6 {
            assert_eq!(degeneracy_count(n, 1, Statistics::Fermion).unwrap(), 1);
        }
        assert_eq!(degeneracy_count(3, 2, Statistics::Fermion).unwrap(), 8);
        assert_eq!(degeneracy_count(2, 2, Statistics::Boson).unwrap(), 4);
        for n in 1..=6 {
            for j in 1..=4usize {
                for stats in [Statistics::Fermion, Statistics::Boson] {
                    assert_eq!(degeneracy_count(n, j, stats).unwrap(), (j as u64).pow(n as u32));
                }
            }
        }
    }

    #[test]
    fn graph_structure() {
        for n in 2..=5 {
            let g = SectorGraph::new(n, vec![1.0; n - 1]).unwrap();
            assert_eq!(g.len() as u64, factorial(n));
            for k in 0..n - 1 {
                for s in 0..g.len() {
                    let t = g.neighbour(k, s);
                    assert_ne!(t, s);
                    assert_eq!(g.neighbour(k, t), s);
                }
            }
            assert_eq!(g.edge_list().len(), g.len() * (n - 1) / 2);
        }
        assert!(SectorGraph::new(3, vec![1.0]).is_err());
        assert!(SectorGraph::new(3, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn two_and_three_particle_spectra() {
        let r = near_unitary_splitting(&SectorGraph::new(2, vec![0.3]).unwrap(), true).unwrap();
        let s = r.spectrum();
        assert!((s[0] + 0.3).abs() < 1e-12 && (s[1] - 0.3).abs() < 1e-12);

        let t = 0.7;
        let r = near_unitary_splitting(&SectorGraph::new(3, vec![t, t]).unwrap(), true).unwrap();
        let expected = [-2.0 * t, -t, -t, t, t, 2.0 * t];
        for (a, e) in r.spectrum().iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{:?}", r.spectrum());
        }
    }

    #[test]
    fn relabelling_commutes_reordering_does_not() {
        let g = SectorGraph::new(4, vec![0.3, 0.9, 0.4]).unwrap();
        assert!(g.particle_commutator() < 1e-10);
        assert!(g.ordering_commutator() > 0.1);
    }

    #[test]
    fn symmetric_and_sign_blocks_are_one_dimensional() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            let t: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect();
            let total: f64 = t.iter().sum();
            let r = near_unitary_splitting(&SectorGraph::new(n, t).unwrap(), false).unwrap();
            let trivial = r.block(&YoungDiagram::row(n));
            let sign = r.block(&YoungDiagram::column(n));
            assert_eq!((trivial.len(), trivial[0].size), (1, 1));
            assert_eq!((sign.len(), sign[0].size), (1, 1));
            assert!((trivial[0].eigenvalues[0] + total).abs() < 1e-10);
            assert!((sign[0].eigenvalues[0] - total).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_tunneling_spectrum_is_symmetric() {
        for n in 2..=5 {
            let r = near_unitary_splitting(&SectorGraph::new(n, vec![1.0; n - 1]).unwrap(), false).unwrap();
            let s = r.spectrum();
            for (a, b) in s.iter().zip(s.iter().rev()) {
                assert!((a + b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn solvability_pattern() {
        let generic = |n: usize| -> Vec<f64> { (0..n - 1).map(|k| 1.0 + 0.37 * k as f64 + 0.11 * (k * k) as f64).collect() };
        let r = near_unitary_splitting(&SectorGraph::new(3, generic(3)).unwrap(), false).unwrap();
        assert!(r.max_block_size <= 2);
        let r = near_unitary_splitting(&SectorGraph::new(4, generic(4)).unwrap(), false).unwrap();
        assert!(r.solvable && r.max_block_size <= 4);
        let r = near_unitary_splitting(&SectorGraph::new(5, generic(5)).unwrap(), false).unwrap();
        assert!(!r.solvable && r.max_block_size >= 5);
        let r = near_unitary_splitting(&SectorGraph::new(6, generic(6)).unwrap(), false).unwrap();
        assert!(!r.solvable);
        let pal = palindromic_tunneling(5, &[1.0, 1.6]).unwrap();
        let r = near_unitary_splitting(&SectorGraph::new(5, pal).unwrap(), true).unwrap();
        assert!(r.solvable, "max block {}", r.max_block_size);
    }

    #[test]
    fn reversal_requires_palindromic_amplitudes() {
        assert!(near_unitary_splitting(&SectorGraph::new(4, vec![1.0, 2.0, 3.0]).unwrap(), true).is_err());
        let r = near_unitary_splitting(&SectorGraph::new(4, vec![1.0, 2.0, 1.0]).unwrap(), true).unwrap();
        let plain = near_unitary_splitting(&SectorGraph::new(4, vec![1.0, 2.0, 1.0]).unwrap(), false).unwrap();
        for (a, b) in r.spectrum().iter().zip(plain.spectrum()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(distinct_tunneling_parameters(3, true), 1);
        assert_eq!(distinct_tunneling_parameters(3, false), 2);
        assert_eq!(distinct_tunneling_parameters(4, true), 2);
        assert_eq!(distinct_tunneling_parameters(5, true), 2);
        assert_eq!(distinct_tunneling_parameters(4, false), 3);
        assert_eq!(distinct_tunneling_parameters(5, false), 4);
        assert_eq!(palindromic_tunneling(4, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn statistics_views_at_unitarity() {
        let r = near_unitary_splitting(&SectorGraph::new(3, vec![1.0, 1.0]).unwrap(), true)
            .unwrap()
            .with_views(&[(Statistics::Fermion, 1), (Statistics::Fermion, 2)]);
        let spinless = &r.statistics_views[0].levels;
        assert_eq!(spinless.len(), 1);
        assert!((spinless[0].1 - 2.0).abs() < 1e-12);
        let total: u64 = r.statistics_views[1].levels.iter().map(|l| l.2).sum();
        assert_eq!(total, 4 + 2 + 2);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let h = one_body_solve(&TrapSpec::Harmonic, 65).unwrap();
        assert!(tunneling_from_fit(&h, 2, &[20.0]).is_err());
        assert!(tunneling_from_fit(&h, 2, &[5.0, 20.0]).is_err());
        assert!(tunneling_from_fit(&h, 4, &[20.0, 40.0]).is_err());
    }

    #[test]
    fn harmonic_fit_gives_inverse_coupling() {
        let h = one_body_solve(&TrapSpec::Harmonic, 65).unwrap();
        let fit = tunneling_from_fit(&h, 2, &[10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!((fit.exponent + 1.0).abs() < 0.05, "{fit:?}");
        assert!(fit.residual < 1e-3);
    }
}
