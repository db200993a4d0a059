//! Brute-force diagonalization of `H = Σ h(x_i) + g Σ_{i<j} δ(x_i - x_j)`
//! in a truncated product basis, for 2 to 4 particles.
//!
//! The product basis contains every ordering of each admitted orbital
//! multiset, so it is closed under particle permutations and (for
//! symmetric traps) parity. Spectra are computed per permutation irrep on
//! the reduced block spanned by the leading isotypic vectors.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact_tensor::TwoBodyTensor;
use crate::error::{Error, Result};
use crate::group_theory::{project_isotypic_permutation, Detail, Permutation, SparseVector, SymmetricGroup, YoungDiagram};
use crate::linalg::{lanczos_lowest, symmetric_eigenvalues};
use crate::one_body::OneBodyBasis;
use crate::tolerances::ENERGY_GROUPING_TOL;
use crate::weak_coupling::{basis_coverage, distinct_orderings, pair_interaction, ProductState};

pub const MIN_PARTICLES: usize = 2;
pub const MAX_PARTICLES: usize = 4;

/// Reduced blocks above this size use Lanczos for few eigenvalues.
const DENSE_LIMIT: usize = 600;

/// Which product states are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Truncation {
    /// Total non-interacting energy `Σ ε ≤ e_cut`.
    Energy(f64),
    /// Sum of orbital indices `Σ n ≤ K`.
    IndexSum(usize),
}

impl Truncation {
    fn admits(&self, energies: &[f64], multiset: &[usize]) -> bool {
        match *self {
            Truncation::Energy(e_cut) => multiset.iter().map(|&k| energies[k]).sum::<f64>() <= e_cut + ENERGY_GROUPING_TOL,
            Truncation::IndexSum(k) => multiset.iter().sum::<usize>() <= k,
        }
    }

    /// Highest orbital any admitted multiset of `n` particles can use.
    fn highest_orbital(&self, basis: &OneBodyBasis, n: usize) -> Result<usize> {
        match *self {
            Truncation::Energy(e_cut) => {
                let coverage = basis_coverage(basis, n);
                if e_cut > coverage + ENERGY_GROUPING_TOL {
                    return Err(Error::ExactDiag(format!("e_cut {e_cut} exceeds basis coverage {coverage}")));
                }
                let e = basis.energies();
                let room = e_cut - (n as f64 - 1.0) * e[0] + ENERGY_GROUPING_TOL;
                e.iter().rposition(|&x| x <= room).ok_or_else(|| {
                    Error::ExactDiag(format!("e_cut {e_cut} is below the non-interacting ground state"))
                })
            }
            Truncation::IndexSum(k) => {
                if k >= basis.len() {
                    return Err(Error::ExactDiag(format!("index sum {k} needs {} orbitals, basis has {}", k + 1, basis.len())));
                }
                Ok(k)
            }
        }
    }
}

/// Many-body Hamiltonian on a truncated product basis. Matrix elements
/// are generated on demand from the contact tensor.
#[derive(Debug, Clone)]
pub struct ManyBodyMatrix<'a> {
    pub particles: usize,
    pub g: f64,
    pub truncation: Truncation,
    pub basis_hash: String,
    pub trap_symmetric: bool,
    states: Vec<ProductState>,
    energies: Vec<f64>,
    parities: Option<Vec<i8>>,
    tensor: &'a TwoBodyTensor,
}

/// Assembles the Hamiltonian for `n` particles at coupling `g`.
pub fn build_hamiltonian<'a>(
    basis: &OneBodyBasis,
    tensor: &'a TwoBodyTensor,
    n: usize,
    g: f64,
    truncation: Truncation,
) -> Result<ManyBodyMatrix<'a>> {
    if !(MIN_PARTICLES..=MAX_PARTICLES).contains(&n) {
        return Err(Error::ExactDiag(format!("particle number {n} outside {MIN_PARTICLES}..={MAX_PARTICLES}")));
    }
    let highest = truncation.highest_orbital(basis, n)?;
    if highest >= tensor.cutoff() {
        return Err(Error::ExactDiag(format!(
            "truncation reaches orbital {highest}, tensor cutoff is {}",
            tensor.cutoff()
        )));
    }
    let eps = basis.energies();
    let mut multisets = Vec::new();
    let mut stack = Vec::with_capacity(n);
    collect(n, highest, 0, &mut stack, &mut |m| {
        if truncation.admits(eps, m) {
            multisets.push(m.to_vec());
        }
    });
    let mut states = Vec::new();
    for m in &multisets {
        states.extend(distinct_orderings(m));
    }
    let energies = states.iter().map(|s| s.orbitals.iter().map(|&k| eps[k]).sum()).collect();
    let parities = basis
        .parity()
        .map(|p| states.iter().map(|s| s.orbitals.iter().map(|&k| p[k]).product()).collect());
    Ok(ManyBodyMatrix {
        particles: n,
        g,
        truncation,
        basis_hash: basis.hash(),
        trap_symmetric: basis.parity().is_some(),
        states,
        energies,
        parities,
        tensor,
    })
}

fn collect(remaining: usize, highest: usize, min: usize, stack: &mut Vec<usize>, sink: &mut dyn FnMut(&[usize])) {
    if remaining == 0 {
        sink(stack);
        return;
    }
    for k in min..=highest {
        stack.push(k);
        collect(remaining - 1, highest, k, stack, sink);
        stack.pop();
    }
}

impl<'a> ManyBodyMatrix<'a> {
    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    /// Non-interacting energies of the basis states.
    pub fn diagonal_energies(&self) -> &[f64] {
        &self.energies
    }

    /// Contact part per unit coupling.
    pub fn interaction(&self, u: usize, v: usize) -> f64 {
        pair_interaction(&self.states[u].orbitals, &self.states[v].orbitals, self.tensor)
    }

    pub fn element(&self, u: usize, v: usize) -> f64 {
        let diagonal = if u == v { self.energies[u] } else { 0.0 };
        diagonal + self.g * self.interaction(u, v)
    }

    pub fn with_coupling(&self, g: f64) -> ManyBodyMatrix<'a> {
        ManyBodyMatrix { g, ..self.clone() }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dimension();
        let rows: Vec<Vec<f64>> = (0..dim)
            .into_par_iter()
            .map(|u| (0..dim).map(|v| self.element(u, v)).collect())
            .collect();
        DMatrix::from_fn(dim, dim, |u, v| rows[u][v])
    }

    /// Images of the basis states under the slot swaps `s_1 .. s_{N-1}`.
    fn slot_swaps(&self) -> Vec<Vec<usize>> {
        (0..self.particles - 1)
            .map(|k| {
                let p = Permutation::adjacent(self.particles, k + 1);
                (0..self.dimension()).map(|u| self.permuted_index(&p, u)).collect()
            })
            .collect()
    }

    /// Index of the state whose slot `p(i)` holds the orbital of slot `i`.
    fn permuted_index(&self, p: &Permutation, u: usize) -> usize {
        let orbitals = &self.states[u].orbitals;
        let mut image = vec![0; orbitals.len()];
        for (i, &k) in orbitals.iter().enumerate() {
            image[p.apply(i)] = k;
        }
        self.index_of(&image)
    }

    fn index_of(&self, orbitals: &[usize]) -> usize {
        // states are grouped by multiset, each group in lexicographic order
        self.states
            .binary_search_by(|s| {
                let mut a = s.orbitals.clone();
                let mut b = orbitals.to_vec();
                a.sort_unstable();
                b.sort_unstable();
                a.cmp(&b).then_with(|| s.orbitals.as_slice().cmp(orbitals))
            })
            .expect("basis is closed under permutations")
    }

    /// `max |[H, U(p)]|` over every particle permutation `p`.
    pub fn permutation_commutator(&self) -> f64 {
        let group = SymmetricGroup::get(self.particles).expect("supported degree");
        let dim = self.dimension();
        group
            .elements()
            .par_iter()
            .map(|p| {
                let map: Vec<usize> = (0..dim).map(|u| self.permuted_index(p, u)).collect();
                let mut worst = 0.0f64;
                for u in 0..dim {
                    for v in 0..dim {
                        worst = worst.max((self.element(map[u], map[v]) - self.element(u, v)).abs());
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `max |[H, Π]|` for total parity, or `None` for asymmetric traps.
    pub fn parity_commutator(&self) -> Option<f64> {
        let parities = self.parities.as_ref()?;
        let dim = self.dimension();
        Some(
            (0..dim)
                .into_par_iter()
                .map(|u| {
                    (0..dim)
                        .filter(|&v| parities[u] != parities[v])
                        .map(|v| 2.0 * self.element(u, v).abs())
                        .fold(0.0f64, f64::max)
                })
                .reduce(|| 0.0, f64::max),
        )
    }

    /// Largest asymmetry `|H_uv - H_vu|`.
    pub fn symmetry_residual(&self) -> f64 {
        let dim = self.dimension();
        (0..dim)
            .flat_map(|u| (u + 1..dim).map(move |v| (u, v)))
            .map(|(u, v)| (self.element(u, v) - self.element(v, u)).abs())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, by dense diagonalization.
    pub fn spectrum(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.to_dense())
    }
}

/// Kinetic and interaction parts of one irrep's reduced block.
#[derive(Debug, Clone)]
pub struct SectorBlock {
    pub lambda: YoungDiagram,
    /// Number of irrep copies, i.e. the size of the reduced block.
    pub multiplicity: usize,
    pub irrep_dimension: usize,
    pub kinetic: DMatrix<f64>,
    pub interaction: DMatrix<f64>,
}

impl SectorBlock {
    pub fn new(h: &ManyBodyMatrix, lambda: &YoungDiagram) -> Result<SectorBlock> {
        if lambda.size() != h.particles {
            return Err(Error::ExactDiag(format!(
                "diagram {:?} does not label an irrep of S_{}",
                lambda.rows(),
                h.particles
            )));
        }
        let decomposition = project_isotypic_permutation(h.dimension(), &h.slot_swaps(), Detail::Leading, Some(lambda))?;
        let block = &decomposition.blocks[lambda];
        let leading = &block.leading;
        let m = leading.len();
        let sandwich = |a: &SparseVector, b: &SparseVector, f: &dyn Fn(usize, usize) -> f64| -> f64 {
            let mut acc = 0.0;
            for &(u, x) in &a.entries {
                for &(v, y) in &b.entries {
                    acc += x * y * f(u, v);
                }
            }
            acc
        };
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let kin = (0..m)
                    .map(|j| sandwich(&leading[i], &leading[j], &|u, v| if u == v { h.energies[u] } else { 0.0 }))
                    .collect();
                let int = (0..m)
                    .map(|j| if j < i { 0.0 } else { sandwich(&leading[i], &leading[j], &|u, v| h.interaction(u, v)) })
                    .collect();
                (kin, int)
            })
            .collect();
        let kinetic = DMatrix::from_fn(m, m, |i, j| rows[i].0[j]);
        let interaction = DMatrix::from_fn(m, m, |i, j| if j >= i { rows[i].1[j] } else { rows[j].1[i] });
        Ok(SectorBlock {
            lambda: lambda.clone(),
            multiplicity: m,
            irrep_dimension: block.irrep_dimension,
            kinetic,
            interaction,
        })
    }

    pub fn matrix(&self, g: f64) -> DMatrix<f64> {
        &self.kinetic + &self.interaction * g
    }

    /// Lowest `k` eigenvalues at coupling `g` (all of them for `k = None`).
    pub fn eigenvalues(&self, g: f64, k: Option<usize>) -> Vec<f64> {
        let m = self.matrix(g);
        match k {
            Some(k) if self.multiplicity > DENSE_LIMIT && k <= 4 => lanczos_lowest(self.multiplicity, k, |x: &DVector<f64>| &m * x),
            Some(k) => symmetric_eigenvalues(&m).into_iter().take(k).collect(),
            None => symmetric_eigenvalues(&m),
        }
    }
}

/// Lowest `k` eigenvalues in the `λ`-isotypic subspace, each listed once
/// (every one is `f_λ`-fold degenerate in the full space).
pub fn sector_spectrum(h: &ManyBodyMatrix, lambda: &YoungDiagram, k: usize) -> Result<Vec<f64>> {
    Ok(SectorBlock::new(h, lambda)?.eigenvalues(h.g, Some(k)))
}

/// Eigenvalue drift across a schedule of cutoffs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub g: f64,
    pub cutoffs: Vec<Truncation>,
    pub dimensions: Vec<usize>,
    /// `eigenvalues[c][i]`: i-th lowest eigenvalue at cutoff `c`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Change of each eigenvalue between the last two cutoffs.
    pub drift: Vec<f64>,
    pub tolerance: f64,
    /// Eigenvalue indices whose drift exceeds the tolerance.
    pub flagged: Vec<usize>,
}

/// Lowest `k` eigenvalues (over all irreps) at each cutoff of an ascending
/// schedule.
pub fn convergence_probe(
    basis: &OneBodyBasis,
    tensor: &TwoBodyTensor,
    n: usize,
    g: f64,
    schedule: &[Truncation],
    k: usize,
    tolerance: f64,
) -> Result<ConvergenceReport> {
    if schedule.len() < 3 {
        return Err(Error::ExactDiag("convergence probe needs at least three cutoffs".into()));
    }
    let mut eigenvalues = Vec::new();
    let mut dimensions = Vec::new();
    for &t in schedule {
        let h = build_hamiltonian(basis, tensor, n, g, t)?;
        let mut all = Vec::new();
        for lambda in crate::group_theory::partitions(n) {
            let block = SectorBlock::new(&h, &lambda)?;
            all.extend(block.eigenvalues(g, Some(k)));
        }
        all.sort_by(f64::total_cmp);
        all.truncate(k);
        dimensions.push(h.dimension());
        eigenvalues.push(all);
    }
    let last = &eigenvalues[eigenvalues.len() - 1];
    let prev = &eigenvalues[eigenvalues.len() - 2];
    let drift: Vec<f64> = last.iter().zip(prev).map(|(a, b)| (a - b).abs()).collect();
    let flagged = drift
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > tolerance)
        .map(|(i, _)| i)
        .collect();
    Ok(ConvergenceReport {
        g,
        cutoffs: schedule.to_vec(),
        dimensions,
        eigenvalues,
        drift,
        tolerance,
        flagged,
    })
}

/// Value at `x = 0` of the polynomial through the points `(x_i, y_i)`.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut weight = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                weight *= xj / (xj - xi);
            }
        }
        acc += weight * yi;
    }
    acc
}

/// Lowest eigenvalue of a sector at each coupling, extrapolated to an
/// infinite index-sum cutoff.
///
/// Contact-interaction energies converge like `ε_K^{-1/2}` in the energy of
/// the highest admitted orbital, so the polynomial through the values at
/// the given cutoffs is evaluated at `ε_K^{-1/2} = 0`.
pub fn extrapolated_sector_ground(
    basis: &OneBodyBasis,
    tensor: &TwoBodyTensor,
    n: usize,
    lambda: &YoungDiagram,
    couplings: &[f64],
    cutoffs: &[usize],
) -> Result<Vec<f64>> {
    if cutoffs.len() < 2 {
        return Err(Error::ExactDiag("extrapolation needs at least two cutoffs".into()));
    }
    let mut grounds = vec![Vec::with_capacity(cutoffs.len()); couplings.len()];
    let mut xs = Vec::with_capacity(cutoffs.len());
    for &k in cutoffs {
        let h = build_hamiltonian(basis, tensor, n, 0.0, Truncation::IndexSum(k))?;
        let block = SectorBlock::new(&h, lambda)?;
        if block.multiplicity == 0 {
            return Err(Error::ExactDiag(format!("sector {:?} is empty at cutoff {k}", lambda.rows())));
        }
        xs.push(basis.energy(k).abs().powf(-0.5));
        let values: Vec<f64> = couplings.par_iter().map(|&g| block.eigenvalues(g, Some(1))[0]).collect();
        for (store, v) in grounds.iter_mut().zip(values) {
            store.push(v);
        }
    }
    Ok(grounds.iter().map(|ys| extrapolate_to_zero(&xs, ys)).collect())
}

/// Spectrum of one sector for export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub g: f64,
    pub truncation: Truncation,
    pub sector: YoungDiagram,
    pub eigenvalues: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact_tensor::build_tensor;
    use crate::one_body::{one_body_solve, TrapSpec};
    use crate::weak_coupling::enumerate_levels;


    fn harmonic_setup(levels: usize) -> (OneBodyBasis, TwoBodyTensor) {
        let b = one_body_solve(&TrapSpec::Harmonic, levels).unwrap();
        let t = build_tensor(&b, levels).unwrap();
        (b, t)
    }

    #[test]
    fn free_spectrum_matches_level_enumeration() {
        let (b, t) = harmonic_setup(8);
        for n in 2..=3 {
            let e_cut = n as f64 * 0.5 + 4.0;
            let h = build_hamiltonian(&b, &t, n, 0.0, Truncation::Energy(e_cut)).unwrap();
            let spectrum = h.spectrum();
            let mut expected: Vec<f64> = enumerate_levels(&b, n, e_cut)
                .unwrap()
                .iter()
                .flat_map(|l| std::iter::repeat_n(l.energy, l.states.len()))
                .collect();
            expected.sort_by(f64::total_cmp);
            assert_eq!(spectrum.len(), expected.len());
            for (a, e) in spectrum.iter().zip(&expected) {
                assert!((a - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn symmetric_ground_state_below_first_order_bound() {
        let (b, t) = harmonic_setup(14);
        let h = build_hamiltonian(&b, &t, 2, 1.0, Truncation::Energy(12.0)).unwrap();
        let ground = sector_spectrum(&h, &YoungDiagram::row(2), 1).unwrap()[0];
        assert!(ground < 1.0 + 2.0 * 0.399 * 0.5 + 1e-12);
        assert!(ground > 1.0);
        assert!(h.symmetry_residual() < 1e-12);
    }

    #[test]
    fn antisymmetric_sector_is_coupling_independent() {
        let (b, t) = harmonic_setup(10);
        for n in 2..=3 {
            let h0 = build_hamiltonian(&b, &t, n, 0.0, Truncation::Energy(n as f64 * 0.5 + 5.0)).unwrap();
            let free = sector_spectrum(&h0, &YoungDiagram::column(n), 50).unwrap();
            for g in [1.0, 10.0] {
                let strong = sector_spectrum(&h0.with_coupling(g), &YoungDiagram::column(n), 50).unwrap();
                for (a, c) in free.iter().zip(&strong) {
                    assert!((a - c).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sectors_recover_full_spectrum() {
        let (b, t) = harmonic_setup(8);
        let h = build_hamiltonian(&b, &t, 3, 0.7, Truncation::Energy(6.5)).unwrap();
        let full = h.spectrum();
        let mut union = Vec::new();
        for lambda in crate::group_theory::partitions(3) {
            let block = SectorBlock::new(&h, &lambda).unwrap();
            for e in block.eigenvalues(h.g, None) {
                union.extend(std::iter::repeat_n(e, block.irrep_dimension));
            }
        }
        union.sort_by(f64::total_cmp);
        assert_eq!(union.len(), full.len());
        for (a, c) in union.iter().zip(&full) {
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn commutators_vanish() {
        let (b, t) = harmonic_setup(8);
        let h = build_hamiltonian(&b, &t, 3, 2.5, Truncation::Energy(7.5)).unwrap();
        assert!(h.permutation_commutator() < 1e-10);
        assert!(h.parity_commutator().unwrap() < 1e-10);
        let tilted = one_body_solve(&TrapSpec::grid_from_fn(-6.0, 6.0, 2048, |x| 0.5 * x * x + 0.2 * x), 5).unwrap();
        let tt = build_tensor(&tilted, 5).unwrap();
        let h = build_hamiltonian(&tilted, &tt, 2, 1.0, Truncation::IndexSum(4)).unwrap();
        assert!(h.parity_commutator().is_none());
        assert!(h.permutation_commutator() < 1e-10);
    }

    #[test]
    fn fermionization_approached_from_below() {
        let (b, t) = harmonic_setup(33);
        let cutoffs = [12, 16, 24, 32];
        let ground = extrapolated_sector_ground(&b, &t, 3, &YoungDiagram::row(3), &[20.0, 40.0, 80.0], &cutoffs).unwrap();
        assert!(ground[2] < 4.5 && ground[2] > 0.95 * 4.5, "{ground:?}");
        assert!(ground[0] < ground[1] && ground[1] < ground[2]);
    }

    #[test]
    fn two_particle_extrapolation_matches_closed_form() {
        // splittings 1 - ν from the exact two-particle relative-motion solution
        let exact = [0.149312095887568, 0.077486055304567, 0.039359573043119, 0.019819071380485];
        let (b, t) = harmonic_setup(65);
        let ground = extrapolated_sector_ground(&b, &t, 2, &YoungDiagram::row(2), &[10.0, 20.0, 40.0, 80.0], &[24, 32, 48, 64]).unwrap();
        for (e, s) in ground.iter().zip(exact) {
            assert!(((2.0 - e) - s).abs() < 2e-3 * s, "{} vs {s}", 2.0 - e);
        }
    }

    #[test]
    fn probe_reports_drift() {
        let (b, t) = harmonic_setup(16);
        let schedule = [Truncation::Energy(6.0), Truncation::Energy(10.0), Truncation::Energy(14.0)];
        let free = convergence_probe(&b, &t, 2, 0.0, &schedule, 3, 1e-8).unwrap();
        assert!(free.drift.iter().all(|&d| d < 1e-12));
        let weak = convergence_probe(&b, &t, 2, 1.0, &schedule, 1, 1e-8).unwrap();
        let ground: Vec<f64> = weak.eigenvalues.iter().map(|e| e[0]).collect();
        assert!(ground[1] <= ground[0] && ground[2] <= ground[1]);
        assert!(ground[0] - ground[1] > ground[1] - ground[2]);
        // the symmetric ground state converges slowly near the unitary limit
        let strong = convergence_probe(&b, &t, 2, 80.0, &schedule, 2, 1e-3).unwrap();
        assert!(!strong.flagged.is_empty());
        assert!(convergence_probe(&b, &t, 2, 1.0, &schedule[..2], 1, 1e-8).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let (b, t) = harmonic_setup(6);
        assert!(build_hamiltonian(&b, &t, 5, 1.0, Truncation::IndexSum(2)).is_err());
        assert!(build_hamiltonian(&b, &t, 2, 1.0, Truncation::Energy(50.0)).is_err());
        assert!(build_hamiltonian(&b, &t, 2, 1.0, Truncation::IndexSum(6)).is_err());
        let h = build_hamiltonian(&b, &t, 2, 1.0, Truncation::IndexSum(3)).unwrap();
        assert!(sector_spectrum(&h, &YoungDiagram::row(3), 1).is_err());
    }
}
