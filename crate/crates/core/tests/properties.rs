use std::sync::LazyLock;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use spectra1d::contact_tensor::{build_tensor, canonicalize, TwoBodyTensor};
use spectra1d::exact_diag::{build_hamiltonian, Truncation};
use spectra1d::group_theory::{irrep_matrices, partitions, Permutation};
use spectra1d::one_body::{one_body_solve, OneBodyBasis, TrapSpec};
use spectra1d::unitary_limit::{degeneracy_count, ordering_action, particle_action, SectorGraph};
use spectra1d::weak_coupling::{first_order_splitting, perturbation_matrix, DegenerateLevel, Statistics};

static WELL: LazyLock<(OneBodyBasis, TwoBodyTensor)> = LazyLock::new(|| {
    let basis = one_body_solve(&TrapSpec::InfiniteWell, 10).unwrap();
    let tensor = build_tensor(&basis, 10).unwrap();
    (basis, tensor)
});

static HARMONIC: LazyLock<(OneBodyBasis, TwoBodyTensor)> = LazyLock::new(|| {
    let basis = one_body_solve(&TrapSpec::Harmonic, 10).unwrap();
    let tensor = build_tensor(&basis, 10).unwrap();
    (basis, tensor)
});

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

fn triple(min: usize, max: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (min..=max).prop_flat_map(|n| (permutation(n), permutation(n), permutation(n)))
}

fn system(which: bool) -> &'static (OneBodyBasis, TwoBodyTensor) {
    if which {
        &WELL
    } else {
        &HARMONIC
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms((p, q, r) in triple(1, 8)) {
        let n = p.degree();
        let id = Permutation::identity(n);
        let left = p.compose(&q).unwrap().compose(&r).unwrap();
        let right = p.compose(&q.compose(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(p.compose(&id).unwrap(), p.clone());
        prop_assert_eq!(id.compose(&p).unwrap(), p.clone());
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert_eq!(p.compose(&q).unwrap().sign(), p.sign() * q.sign());
    }

    #[test]
    fn relabelling_and_reordering_commute((p, o, s) in triple(1, 6)) {
        let a = particle_action(&p, &ordering_action(&o, &s).unwrap()).unwrap();
        let b = ordering_action(&o, &particle_action(&p, &s).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn irreps_represent_products((p, q, _) in triple(2, 5), pick in any::<prop::sample::Index>()) {
        let shapes = partitions(p.degree());
        let set = irrep_matrices(pick.get(&shapes)).unwrap();
        let pq = set.element_matrix(&p.compose(&q).unwrap()).unwrap();
        let product = set.element_matrix(&p).unwrap() * set.element_matrix(&q).unwrap();
        prop_assert!((pq - product).amax() < 1e-12);
    }

    #[test]
    fn schur_weyl_and_degeneracy_sum_rule(n in 1usize..=6, j in 1usize..=4) {
        let total: u64 = partitions(n)
            .iter()
            .map(|l| l.standard_tableaux_count() * l.semistandard_count(j))
            .sum();
        prop_assert_eq!(total, (j as u64).pow(n as u32));
        for stats in [Statistics::Boson, Statistics::Fermion] {
            prop_assert_eq!(degeneracy_count(n, j, stats).unwrap(), (j as u64).pow(n as u32));
        }
    }

    #[test]
    fn contact_elements_ignore_index_order(which in any::<bool>(), q in [0usize..10, 0usize..10, 0usize..10, 0usize..10], order in permutation(4)) {
        let (_, tensor) = system(which);
        let shuffled: Vec<usize> = (0..4).map(|i| q[order.apply(i)]).collect();
        let base = tensor.get(q[0], q[1], q[2], q[3]);
        prop_assert_eq!(base, tensor.get(shuffled[0], shuffled[1], shuffled[2], shuffled[3]));
        prop_assert_eq!(canonicalize(q), canonicalize([shuffled[0], shuffled[1], shuffled[2], shuffled[3]]));
    }

    #[test]
    fn contact_positivity_and_cauchy_schwarz(which in any::<bool>(), a in 0usize..10, b in 0usize..10) {
        let (_, tensor) = system(which);
        let aaaa = tensor.get(a, a, a, a);
        let bbbb = tensor.get(b, b, b, b);
        prop_assert!(aaaa > 0.0);
        prop_assert!(tensor.get(a, a, b, b) <= (aaaa * bbbb).sqrt() + 1e-12);
    }

    #[test]
    fn first_order_blocks_reproduce_full_matrix(which in any::<bool>(), picks in prop::collection::vec(0usize..6, 2..=4)) {
        let (basis, tensor) = system(which);
        let mut multiset = picks;
        multiset.sort_unstable();
        let energy = multiset.iter().map(|&i| basis.energy(i)).sum();
        let level = DegenerateLevel::from_multiset(energy, multiset);
        let w = perturbation_matrix(&level, tensor).unwrap();
        let report = first_order_splitting(&level, tensor).unwrap();
        prop_assert!((report.weighted_trace() - w.trace()).abs() < 1e-8);

        let mut full: Vec<f64> = SymmetricEigen::new(w).eigenvalues.iter().copied().collect();
        let mut union: Vec<f64> = report
            .blocks
            .iter()
            .flat_map(|b| b.eigenvalues.iter().flat_map(move |&e| std::iter::repeat_n(e, b.irrep_dimension)))
            .collect();
        full.sort_by(f64::total_cmp);
        union.sort_by(f64::total_cmp);
        prop_assert_eq!(full.len(), union.len());
        for (x, y) in full.iter().zip(&union) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn tunnelling_commutes_with_relabelling(n in 2usize..=5, seed in prop::collection::vec(0.0f64..2.0, 4)) {
        let graph = SectorGraph::new(n, seed[..n - 1].to_vec()).unwrap();
        prop_assert!(graph.particle_commutator() < 1e-10);
        for s in 0..graph.len() {
            let mut seen: Vec<usize> = (0..n - 1).map(|k| graph.neighbour(k, s)).collect();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), n - 1);
            for k in 0..n - 1 {
                prop_assert_eq!(graph.neighbour(k, graph.neighbour(k, s)), s);
            }
        }
    }

    #[test]
    fn uniform_tunnelling_spectrum_is_even(n in 2usize..=5, t in 0.1f64..3.0) {
        let graph = SectorGraph::new(n, vec![t; n - 1]).unwrap();
        let mut e: Vec<f64> = SymmetricEigen::new(graph.effective_matrix()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        for (lo, hi) in e.iter().zip(e.iter().rev()) {
            prop_assert!((lo + hi).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hamiltonians_keep_kinematic_symmetry(which in any::<bool>(), n in 2usize..=3, g in -5.0f64..20.0) {
        let (basis, tensor) = system(which);
        let h = build_hamiltonian(basis, tensor, n, g, Truncation::IndexSum(6)).unwrap();
        prop_assert!(h.permutation_commutator() < 1e-10);
        prop_assert!(h.parity_commutator().unwrap() < 1e-10);
    }

    #[test]
    fn eigenvalues_fall_as_truncation_grows(which in any::<bool>(), g in 0.0f64..10.0) {
        let (basis, tensor) = system(which);
        let mut previous: Option<Vec<f64>> = None;
        for cutoff in [4, 6, 8] {
            let e = build_hamiltonian(basis, tensor, 2, g, Truncation::IndexSum(cutoff)).unwrap().spectrum();
            if let Some(prev) = &previous {
                for (old, new) in prev.iter().zip(&e) {
                    prop_assert!(*new <= old + 1e-9);
                }
            }
            previous = Some(e);
        }
    }
}
