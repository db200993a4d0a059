//! First-order splitting of degenerate non-interacting levels.
//!
//! A level is the set of product states built from one orbital multiset.
//! The contact perturbation `W = Σ_{i<j} δ(x_i - x_j)` (per unit coupling)
//! commutes with particle permutations, so it is reduced block by block on
//! the isotypic components of the level.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact_tensor::TwoBodyTensor;
use crate::error::{Error, Result};
use crate::group_theory::{project_isotypic_permutation, Detail, YoungDiagram};
use crate::linalg::symmetric_eigenvalues;
use crate::one_body::OneBodyBasis;
use crate::tolerances::{ENERGY_GROUPING_TOL, SOLVABLE_BLOCK_SIZE};

/// Orbital occupied by each particle slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductState {
    pub orbitals: Vec<usize>,
}

/// Product states sharing one non-interacting energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateLevel {
    pub energy: f64,
    /// Sorted orbital indices (the first multiset for merged levels).
    pub multiset: Vec<usize>,
    pub states: Vec<ProductState>,
    /// Other multisets found at the same energy.
    pub accidental_partners: Vec<Vec<usize>>,
    /// Every multiset whose states are included.
    pub multisets: Vec<Vec<usize>>,
}

impl DegenerateLevel {
    /// Level holding every ordering of `multiset`, with no partners recorded.
    pub fn from_multiset(energy: f64, multiset: Vec<usize>) -> DegenerateLevel {
        DegenerateLevel {
            energy,
            states: distinct_orderings(&multiset),
            multisets: vec![multiset.clone()],
            multiset,
            accidental_partners: Vec::new(),
        }
    }

    /// Single multiset whose energy is shared with no other multiset.
    pub fn is_generic(&self) -> bool {
        self.multisets.len() == 1 && self.accidental_partners.is_empty()
    }

    pub fn is_merged(&self) -> bool {
        self.multisets.len() > 1
    }

    /// Joins levels at one energy into a single (non-generic) level.
    pub fn merge(levels: &[DegenerateLevel]) -> Result<DegenerateLevel> {
        let first = levels.first().ok_or_else(|| Error::WeakCoupling("nothing to merge".into()))?;
        let mut multisets: Vec<Vec<usize>> = Vec::new();
        let mut states = Vec::new();
        for level in levels {
            if (level.energy - first.energy).abs() > ENERGY_GROUPING_TOL {
                return Err(Error::WeakCoupling(format!(
                    "cannot merge levels at {} and {}",
                    first.energy, level.energy
                )));
            }
            for (m, chunk) in level.multisets.iter().zip(split_by_multiset(level)) {
                if !multisets.contains(m) {
                    multisets.push(m.clone());
                    states.extend(chunk);
                }
            }
        }
        let accidental_partners = levels
            .iter()
            .flat_map(|l| l.accidental_partners.iter())
            .filter(|p| !multisets.contains(p))
            .cloned()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(DegenerateLevel {
            energy: first.energy,
            multiset: multisets[0].clone(),
            states,
            accidental_partners,
            multisets,
        })
    }

    /// Merges every level at the same energy.
    pub fn merge_all(levels: &[DegenerateLevel]) -> Vec<DegenerateLevel> {
        let mut out: Vec<DegenerateLevel> = Vec::new();
        let mut group: Vec<DegenerateLevel> = Vec::new();
        for level in levels {
            if group.first().is_some_and(|g| (level.energy - g.energy).abs() > ENERGY_GROUPING_TOL) {
                out.push(DegenerateLevel::merge(&group).expect("same energy"));
                group.clear();
            }
            group.push(level.clone());
        }
        if !group.is_empty() {
            out.push(DegenerateLevel::merge(&group).expect("same energy"));
        }
        out
    }
}

fn split_by_multiset(level: &DegenerateLevel) -> Vec<Vec<ProductState>> {
    level
        .multisets
        .iter()
        .map(|m| {
            level
                .states
                .iter()
                .filter(|s| {
                    let mut sorted = s.orbitals.clone();
                    sorted.sort_unstable();
                    &sorted == m
                })
                .cloned()
                .collect()
        })
        .collect()
}

/// Distinct orderings of a multiset in lexicographic order.
pub fn distinct_orderings(multiset: &[usize]) -> Vec<ProductState> {
    let mut current: Vec<usize> = multiset.to_vec();
    current.sort_unstable();
    let mut out = vec![ProductState { orbitals: current.clone() }];
    loop {
        let Some(i) = (0..current.len().saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            return out;
        };
        let j = (i + 1..current.len()).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(ProductState { orbitals: current.clone() });
    }
}

/// Largest total energy whose multisets are guaranteed to lie in the basis.
pub fn basis_coverage(basis: &OneBodyBasis, n: usize) -> f64 {
    let e = basis.energies();
    (n as f64 - 1.0) * e[0] + e[e.len() - 1]
}

/// All orbital multisets of `n` particles with total energy `≤ e_cut`,
/// ordered by energy. Multisets sharing an energy are listed separately,
/// each naming the others as accidental partners.
pub fn enumerate_levels(basis: &OneBodyBasis, n: usize, e_cut: f64) -> Result<Vec<DegenerateLevel>> {
    if n == 0 {
        return Err(Error::WeakCoupling("particle number must be positive".into()));
    }
    let coverage = basis_coverage(basis, n);
    if e_cut > coverage + ENERGY_GROUPING_TOL {
        return Err(Error::CutoffCoverage { e_cut, coverage });
    }
    let energies = basis.energies();
    let mut found: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut stack = Vec::with_capacity(n);
    collect_multisets(energies, n, e_cut + ENERGY_GROUPING_TOL, 0, 0.0, &mut stack, &mut found);
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut levels = Vec::with_capacity(found.len());
    let mut start = 0;
    while start < found.len() {
        let mut end = start + 1;
        while end < found.len() && found[end].0 - found[end - 1].0 <= ENERGY_GROUPING_TOL {
            end += 1;
        }
        for i in start..end {
            let mut level = DegenerateLevel::from_multiset(found[i].0, found[i].1.clone());
            level.accidental_partners = (start..end).filter(|&j| j != i).map(|j| found[j].1.clone()).collect();
            levels.push(level);
        }
        start = end;
    }
    Ok(levels)
}

fn collect_multisets(
    energies: &[f64],
    remaining: usize,
    limit: f64,
    min_index: usize,
    partial: f64,
    stack: &mut Vec<usize>,
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    if remaining == 0 {
        out.push((partial, stack.clone()));
        return;
    }
    for k in min_index..energies.len() {
        // the remaining slots hold orbitals at least as high as k
        if partial + remaining as f64 * energies[k] > limit {
            break;
        }
        stack.push(k);
        collect_multisets(energies, remaining - 1, limit, k, partial + energies[k], stack, out);
        stack.pop();
    }
}

/// Perturbation matrix `Σ_{i<j} ⟨u|δ_ij|v⟩` over the level's states.
pub fn perturbation_matrix(level: &DegenerateLevel, tensor: &TwoBodyTensor) -> Result<DMatrix<f64>> {
    let needed = level.multisets.iter().flatten().max().map_or(0, |m| m + 1);
    if needed > tensor.cutoff() {
        return Err(Error::Tensor(format!(
            "level uses orbital {} beyond tensor cutoff {}",
            needed - 1,
            tensor.cutoff()
        )));
    }
    let states = &level.states;
    let dim = states.len();
    let mut w = DMatrix::zeros(dim, dim);
    for (ui, u) in states.iter().enumerate() {
        for (vi, v) in states.iter().enumerate().skip(ui) {
            let value = pair_interaction(&u.orbitals, &v.orbitals, tensor);
            w[(ui, vi)] = value;
            w[(vi, ui)] = value;
        }
    }
    Ok(w)
}

/// `Σ_{i<j} ⟨u|δ(x_i - x_j)|v⟩` between two product states.
pub(crate) fn pair_interaction(u: &[usize], v: &[usize], tensor: &TwoBodyTensor) -> f64 {
    let n = u.len();
    let mut differing = [0usize; 2];
    let mut count = 0;
    for k in 0..n {
        if u[k] != v[k] {
            if count == 2 {
                return 0.0;
            }
            differing[count] = k;
            count += 1;
        }
    }
    match count {
        0 => {
            let mut acc = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    acc += tensor.get(u[i], u[j], v[i], v[j]);
                }
            }
            acc
        }
        1 => {
            let i = differing[0];
            (0..n)
                .filter(|&j| j != i)
                .map(|j| tensor.get(u[i], u[j], v[i], v[j]))
                .sum()
        }
        _ => {
            let (i, j) = (differing[0], differing[1]);
            tensor.get(u[i], u[j], v[i], v[j])
        }
    }
}

/// Slot-swap generators `s_1 .. s_{N-1}` acting on state indices.
fn slot_swaps(states: &[ProductState]) -> Vec<Vec<usize>> {
    let n = states.first().map_or(0, |s| s.orbitals.len());
    let index: HashMap<&[usize], usize> = states.iter().enumerate().map(|(i, s)| (s.orbitals.as_slice(), i)).collect();
    (0..n.saturating_sub(1))
        .map(|k| {
            states
                .iter()
                .map(|s| {
                    let mut t = s.orbitals.clone();
                    t.swap(k, k + 1);
                    index[t.as_slice()]
                })
                .collect()
        })
        .collect()
}

/// One irrep's share of a split level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitBlock {
    pub lambda: YoungDiagram,
    /// Number of copies of the irrep, which is the size of the reduced block.
    pub size: usize,
    pub irrep_dimension: usize,
    pub matrix: Vec<Vec<f64>>,
    /// Shifts per unit coupling, ascending.
    pub eigenvalues: Vec<f64>,
}

/// First-order shift with its irrep label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledShift {
    pub lambda: YoungDiagram,
    pub shift: f64,
    /// Spatial degeneracy `f_λ`.
    pub degeneracy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl std::str::FromStr for Statistics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Statistics> {
        match s.to_ascii_lowercase().as_str() {
            "fermion" | "fermions" => Ok(Statistics::Fermion),
            "boson" | "bosons" => Ok(Statistics::Boson),
            other => Err(Error::Format(format!("unknown statistics {other:?}"))),
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistics::Fermion => "fermion",
            Statistics::Boson => "boson",
        })
    }
}

/// Shift of a physical level and its internal-state multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalLevel {
    pub lambda: YoungDiagram,
    pub shift: f64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticsView {
    pub statistics: Statistics,
    pub components: usize,
    pub levels: Vec<PhysicalLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub energy: f64,
    pub multiset: Vec<usize>,
    pub multisets: Vec<Vec<usize>>,
    pub dimension: usize,
    /// False when accidental partners were merged in.
    pub generic: bool,
    pub blocks: Vec<SplitBlock>,
    pub solvable: bool,
    pub first_order_energies: Vec<LabeledShift>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub statistics_views: Vec<StatisticsView>,
}

/// Splits a level to first order in the coupling.
///
/// Levels with unmerged accidental partners are refused; merge them with
/// [`DegenerateLevel::merge`] first.
pub fn first_order_splitting(level: &DegenerateLevel, tensor: &TwoBodyTensor) -> Result<SplittingReport> {
    if !level.is_merged() && !level.accidental_partners.is_empty() {
        return Err(Error::AccidentalDegeneracy {
            multiset: level.multiset.clone(),
            partners: level.accidental_partners.clone(),
        });
    }
    let w = perturbation_matrix(level, tensor)?;
    let generators = slot_swaps(&level.states);
    let decomposition = project_isotypic_permutation(level.states.len(), &generators, Detail::Leading, None)?;

    let mut blocks = Vec::new();
    let mut first_order_energies = Vec::new();
    for (lambda, block) in &decomposition.blocks {
        if block.multiplicity == 0 {
            continue;
        }
        let reduced = block.reduce(&w);
        let eigenvalues = symmetric_eigenvalues(&reduced);
        for &shift in &eigenvalues {
            first_order_energies.push(LabeledShift {
                lambda: lambda.clone(),
                shift,
                degeneracy: block.irrep_dimension,
            });
        }
        blocks.push(SplitBlock {
            lambda: lambda.clone(),
            size: block.multiplicity,
            irrep_dimension: block.irrep_dimension,
            matrix: reduced.row_iter().map(|r| r.iter().copied().collect()).collect(),
            eigenvalues,
        });
    }
    first_order_energies.sort_by(|a, b| a.shift.total_cmp(&b.shift));
    let solvable = blocks.iter().all(|b| b.size <= SOLVABLE_BLOCK_SIZE);
    Ok(SplittingReport {
        energy: level.energy,
        multiset: level.multiset.clone(),
        multisets: level.multisets.clone(),
        dimension: level.states.len(),
        generic: level.is_generic(),
        blocks,
        solvable,
        first_order_energies,
        statistics_views: Vec::new(),
    })
}

/// Splits many levels in parallel.
pub fn split_levels(levels: &[DegenerateLevel], tensor: &TwoBodyTensor) -> Vec<Result<SplittingReport>> {
    levels.par_iter().map(|l| first_order_splitting(l, tensor)).collect()
}

/// Physical levels for particles with `components` internal states.
///
/// Bosons keep spatial irrep `λ` paired with internal irrep `λ`, fermions
/// pair it with the conjugate; the internal multiplicity is the number of
/// semistandard tableaux of the partner diagram.
pub fn assemble_statistics(report: &SplittingReport, statistics: Statistics, components: usize) -> Vec<PhysicalLevel> {
    let mut out = Vec::new();
    for block in &report.blocks {
        let multiplicity = pairing_multiplicity(&block.lambda, statistics, components);
        if multiplicity == 0 {
            continue;
        }
        for &shift in &block.eigenvalues {
            out.push(PhysicalLevel {
                lambda: block.lambda.clone(),
                shift,
                multiplicity,
            });
        }
    }
    out.sort_by(|a, b| a.shift.total_cmp(&b.shift));
    out
}

/// Internal-state multiplicity paired with spatial irrep `λ`: the number
/// of semistandard tableaux of `λ` (bosons) or its conjugate (fermions).
pub fn pairing_multiplicity(lambda: &YoungDiagram, statistics: Statistics, components: usize) -> u64 {
    match statistics {
        Statistics::Boson => lambda.semistandard_count(components),
        Statistics::Fermion => lambda.conjugate().semistandard_count(components),
    }
}

impl SplittingReport {
    pub fn with_views(mut self, views: &[(Statistics, usize)]) -> SplittingReport {
        self.statistics_views = views
            .iter()
            .map(|&(statistics, components)| StatisticsView {
                statistics,
                components,
                levels: assemble_statistics(&self, statistics, components),
            })
            .collect();
        self
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size).max().unwrap_or(0)
    }

    pub fn block_sizes(&self) -> BTreeMap<YoungDiagram, usize> {
        self.blocks.iter().map(|b| (b.lambda.clone(), b.size)).collect()
    }

    /// `Σ shift · f_λ`, which equals the trace of the perturbation matrix.
    pub fn weighted_trace(&self) -> f64 {
        self.first_order_energies.iter().map(|s| s.shift * s.degeneracy as f64).sum()
    }
}

/// CSV rows `energy,multiset,lambda,shift,degeneracy` for a set of reports.
pub fn reports_csv(reports: &[SplittingReport]) -> String {
    let mut out = String::from("energy,multiset,lambda,shift,degeneracy,solvable\n");
    for r in reports {
        let multiset = r.multiset.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        for s in &r.first_order_energies {
            let lambda = s.lambda.rows().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(
                out,
                "{:.11e},{multiset},{lambda},{:.11e},{},{}",
                r.energy, s.shift, s.degeneracy, r.solvable
            )
            .unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact_tensor::build_tensor;
    use crate::one_body::{one_body_solve, TrapSpec};
    use std::f64::consts::PI;

    fn harmonic(n: usize) -> OneBodyBasis {
        one_body_solve(&TrapSpec::Harmonic, n).unwrap()
    }

    fn well(n: usize) -> OneBodyBasis {
        one_body_solve(&TrapSpec::InfiniteWell, n).unwrap()
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn harmonic_three_particle_levels() {
        let levels = enumerate_levels(&harmonic(6), 3, 4.0).unwrap();
        let summary: Vec<(f64, Vec<usize>, usize, usize)> = levels
            .iter()
            .map(|l| (l.energy, l.multiset.clone(), l.states.len(), l.accidental_partners.len()))
            .collect();
        assert_eq!(
            summary,
            vec![
                (1.5, vec![0, 0, 0], 1, 0),
                (2.5, vec![0, 0, 1], 3, 0),
                (3.5, vec![0, 0, 2], 3, 1),
                (3.5, vec![0, 1, 1], 3, 1),
            ]
        );
    }

    #[test]
    fn well_pythagorean_coincidence() {
        let levels = enumerate_levels(&well(10), 2, 65.0 * PI * PI / 2.0).unwrap();
        let l07 = levels.iter().find(|l| l.multiset == vec![0, 7]).unwrap();
        assert_eq!(l07.accidental_partners, vec![vec![3, 6]]);
        assert!((l07.energy - 65.0 * PI * PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_particle_levels_are_the_spectrum() {
        let b = well(5);
        let levels = enumerate_levels(&b, 1, b.energy(4)).unwrap();
        let energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        assert_eq!(energies, b.energies());
    }

    #[test]
    fn coverage_is_enforced() {
        assert!(matches!(
            enumerate_levels(&harmonic(4), 2, 5.0),
            Err(Error::CutoffCoverage { .. })
        ));
    }

    #[test]
    fn harmonic_state_counting() {
        for n in 1..=5 {
            let levels = enumerate_levels(&harmonic(8), n, n as f64 * 0.5 + 6.0).unwrap();
            for q in 0..=6 {
                let e = n as f64 * 0.5 + q as f64;
                let count: usize = levels.iter().filter(|l| (l.energy - e).abs() < 1e-9).map(|l| l.states.len()).sum();
                assert_eq!(count, binomial(q + n - 1, n - 1), "N={n} Q={q}");
            }
        }
    }

    #[test]
    fn two_particle_pattern_is_zero_and_twice_the_element() {
        let quartic = one_body_solve(&TrapSpec::grid_from_fn(-8.0, 8.0, 4096, |x| x.powi(4)), 4).unwrap();
        for (basis, multiset) in [(well(4), vec![0, 2]), (harmonic(4), vec![0, 3]), (quartic, vec![1, 2])] {
            let t = build_tensor(&basis, 4).unwrap();
            let level = DegenerateLevel::from_multiset(0.0, multiset.clone());
            let r = first_order_splitting(&level, &t).unwrap();
            let v = t.get(multiset[0], multiset[1], multiset[0], multiset[1]);
            let sizes = r.block_sizes();
            assert_eq!(sizes[&YoungDiagram::row(2)], 1);
            assert_eq!(sizes[&YoungDiagram::column(2)], 1);
            let shifts: Vec<f64> = r.first_order_energies.iter().map(|s| s.shift).collect();
            assert!(shifts[0].abs() < 1e-12);
            assert!((shifts[1] - 2.0 * v).abs() < 1e-12);
        }
    }

    #[test]
    fn block_sizes_for_all_distinct_levels() {
        let b = well(6);
        let t = build_tensor(&b, 6).unwrap();
        for (n, max_block, solvable) in [(2, 1, true), (3, 2, true), (4, 3, true), (5, 6, false)] {
            let level = DegenerateLevel::from_multiset(0.0, (0..n).collect());
            let r = first_order_splitting(&level, &t).unwrap();
            assert_eq!(r.max_block_size(), max_block);
            assert_eq!(r.solvable, solvable);
            for block in &r.blocks {
                assert_eq!(block.size, block.irrep_dimension);
            }
            if n == 5 {
                let mut sizes: Vec<usize> = r.blocks.iter().map(|b| b.size).collect();
                sizes.sort_unstable();
                assert_eq!(sizes, vec![1, 1, 4, 4, 5, 5, 6]);
            }
        }
    }

    #[test]
    fn blocks_reproduce_full_spectrum_and_trace() {
        let t = build_tensor(&harmonic(6), 6).unwrap();
        for multiset in [vec![0, 1, 2], vec![0, 0, 1, 3], vec![0, 1, 1, 2, 3], vec![0, 1, 2, 3]] {
            let level = DegenerateLevel::from_multiset(0.0, multiset);
            let w = perturbation_matrix(&level, &t).unwrap();
            let full = symmetric_eigenvalues(&w);
            let r = first_order_splitting(&level, &t).unwrap();
            let mut union: Vec<f64> = r
                .first_order_energies
                .iter()
                .flat_map(|s| std::iter::repeat_n(s.shift, s.degeneracy))
                .collect();
            union.sort_by(f64::total_cmp);
            assert_eq!(union.len(), full.len());
            for (a, b) in union.iter().zip(&full) {
                assert!((a - b).abs() < 1e-8);
            }
            assert!((r.weighted_trace() - w.trace()).abs() < 1e-8);
            let total: usize = r.blocks.iter().map(|b| b.size * b.irrep_dimension).sum();
            assert_eq!(total, level.states.len());
        }
    }

    #[test]
    fn accidental_levels_need_merging() {
        let b = harmonic(6);
        let t = build_tensor(&b, 6).unwrap();
        let levels = enumerate_levels(&b, 3, 3.5).unwrap();
        let partners: Vec<_> = levels.iter().filter(|l| l.energy == 3.5).cloned().collect();
        assert!(matches!(
            first_order_splitting(&partners[0], &t),
            Err(Error::AccidentalDegeneracy { .. })
        ));
        let merged = DegenerateLevel::merge(&partners).unwrap();
        assert_eq!(merged.states.len(), 6);
        assert!(merged.accidental_partners.is_empty());
        let r = first_order_splitting(&merged, &t).unwrap();
        assert!(!r.generic);
        assert_eq!(DegenerateLevel::merge_all(&levels).len(), 3);
    }

    #[test]
    fn statistics_views() {
        let t = build_tensor(&well(4), 4).unwrap();
        let r3 = first_order_splitting(&DegenerateLevel::from_multiset(0.0, vec![0, 1, 2]), &t).unwrap();
        let f1 = assemble_statistics(&r3, Statistics::Fermion, 1);
        assert!(f1.iter().all(|l| l.lambda == YoungDiagram::column(3)));
        assert_eq!(f1.len(), 1);
        assert!(f1[0].shift.abs() < 1e-10);

        let f2 = assemble_statistics(&r3, Statistics::Fermion, 2);
        let mut seen: BTreeMap<YoungDiagram, u64> = BTreeMap::new();
        for l in &f2 {
            seen.insert(l.lambda.clone(), l.multiplicity);
        }
        assert_eq!(seen.get(&YoungDiagram::column(3)), Some(&4));
        assert_eq!(seen.get(&YoungDiagram::new(vec![2, 1]).unwrap()), Some(&2));
        assert!(!seen.contains_key(&YoungDiagram::row(3)));

        let r2 = first_order_splitting(&DegenerateLevel::from_multiset(0.0, vec![0, 1]), &t).unwrap();
        let b2 = assemble_statistics(&r2, Statistics::Boson, 2);
        let mults: Vec<(YoungDiagram, u64)> = b2.iter().map(|l| (l.lambda.clone(), l.multiplicity)).collect();
        assert!(mults.contains(&(YoungDiagram::row(2), 3)));
        assert!(mults.contains(&(YoungDiagram::column(2), 1)));
    }

    #[test]
    fn report_serialization() {
        let t = build_tensor(&well(4), 4).unwrap();
        let r = first_order_splitting(&DegenerateLevel::from_multiset(5.0, vec![0, 1, 2]), &t)
            .unwrap()
            .with_views(&[(Statistics::Fermion, 2)]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["blocks"][0]["lambda"], serde_json::json!([3]));
        assert_eq!(json["statistics_views"][0]["statistics"], "fermion");
        assert_eq!(reports_csv(&[r]).lines().count(), 1 + 4);
    }

    #[test]
    fn orderings_are_lexicographic() {
        let s: Vec<Vec<usize>> = distinct_orderings(&[1, 0, 1]).into_iter().map(|p| p.orbitals).collect();
        assert_eq!(s, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    }
}
