//! Contact-interaction matrix elements `V_abcd = ∫ φ_a φ_b φ_c φ_d dx`
//! per unit coupling.
//!
//! Harmonic elements use a Gauss-Hermite rule that is exact for the
//! requested indices, well elements a closed-form sine identity, and grid
//! elements composite Simpson on the native grid with `|Simpson - trapezoid|`
//! as the error bound.
//!
//! Only sorted quadruples `a ≤ b ≤ c ≤ d` are stored; any index order is
//! answered from the canonical entry.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::one_body::{harmonic_orbitals, OneBodyBasis, TrapSpec};
use crate::quadrature::{simpson, trapezoid, GaussHermite};
use crate::tolerances::QUADRATURE_TOL;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Position of a sorted quadruple in the flat storage.
pub fn canonical_rank(q: [usize; 4]) -> usize {
    let [a, b, c, d] = q;
    binomial(d + 3, 4) + binomial(c + 2, 3) + binomial(b + 1, 2) + a
}

/// Number of sorted quadruples with entries below `cutoff`.
pub fn canonical_count(cutoff: usize) -> usize {
    binomial(cutoff + 3, 4)
}

pub fn canonicalize(mut q: [usize; 4]) -> [usize; 4] {
    q.sort_unstable();
    q
}

/// All sorted quadruples below `cutoff`, in storage order.
pub fn canonical_quadruples(cutoff: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(canonical_count(cutoff));
    for d in 0..cutoff {
        for c in 0..=d {
            for b in 0..=c {
                for a in 0..=b {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Precomputed per-basis quadrature data.
enum Integrator<'a> {
    Harmonic {
        nodes_weight: Vec<f64>,
        // table[n][i] = φ_n(y_i / √2) at the non-negative nodes
        table: Vec<Vec<f64>>,
        has_zero_node: bool,
    },
    Well,
    Grid {
        h: f64,
        orbitals: &'a [Vec<f64>],
    },
}

impl<'a> Integrator<'a> {
    /// Rule exact for every element with indices below `cutoff`.
    fn new(basis: &'a OneBodyBasis, cutoff: usize) -> Integrator<'a> {
        match basis.trap() {
            TrapSpec::Harmonic => Integrator::harmonic(cutoff, 2 * cutoff.max(1) - 1),
            TrapSpec::InfiniteWell => Integrator::Well,
            TrapSpec::Grid { .. } => {
                let (_, h, orbitals) = basis.grid().expect("grid basis has samples");
                Integrator::Grid { h, orbitals }
            }
        }
    }

    fn harmonic(cutoff: usize, order: usize) -> Integrator<'a> {
        let rule = GaussHermite::new(order);
        let mut table = vec![Vec::with_capacity(rule.nodes.len()); cutoff];
        for &y in &rule.nodes {
            for (n, v) in harmonic_orbitals(cutoff, y / SQRT_2).into_iter().enumerate() {
                table[n].push(v);
            }
        }
        Integrator::Harmonic {
            nodes_weight: rule.folded_weights.iter().map(|w| w / SQRT_2).collect(),
            table,
            has_zero_node: rule.nodes.first() == Some(&0.0),
        }
    }

    /// Element in the given index order, with its quadrature error bound.
    fn element(&self, q: [usize; 4]) -> (f64, f64) {
        match self {
            Integrator::Harmonic {
                nodes_weight,
                table,
                has_zero_node,
            } => {
                let [a, b, c, d] = q;
                let odd = (a + b + c + d) % 2 == 1;
                let mut acc = 0.0;
                for (i, w) in nodes_weight.iter().enumerate() {
                    let product = table[a][i] * table[b][i] * table[c][i] * table[d][i];
                    // φ_n(-y) = (-1)^n φ_n(y)
                    let pair = if i == 0 && *has_zero_node {
                        product
                    } else if odd {
                        0.0
                    } else {
                        2.0 * product
                    };
                    acc += w * pair;
                }
                (acc, 0.0)
            }
            Integrator::Well => (well_element(q), 0.0),
            Integrator::Grid { h, orbitals } => {
                let [a, b, c, d] = q;
                let integrand: Vec<f64> = (0..orbitals[a].len())
                    .map(|i| orbitals[a][i] * orbitals[b][i] * orbitals[c][i] * orbitals[d][i])
                    .collect();
                let s = simpson(&integrand, *h);
                let t = trapezoid(&integrand, *h);
                (s, (s - t).abs())
            }
        }
    }
}

/// `∫_0^1 Π √2 sin(k_i π x) dx` with `k_i = n_i + 1`, by expanding the
/// product of sines into cosines of the sums and differences.
fn well_element(q: [usize; 4]) -> f64 {
    let [a, b, c, d] = q.map(|n| (n + 1) as i64);
    let delta = |s: i64| if s == 0 { 1.0 } else { 0.0 };
    0.5 * (delta(a - b + c - d) + delta(a - b - c + d) - delta(a - b + c + d) - delta(a - b - c - d)
        - delta(a + b + c - d)
        - delta(a + b - c + d)
        + delta(a + b + c + d)
        + delta(a + b - c - d))
}

fn check_indices(basis: &OneBodyBasis, q: [usize; 4]) -> Result<()> {
    if let Some(&bad) = q.iter().find(|&&n| n >= basis.len()) {
        return Err(Error::Tensor(format!("orbital index {bad} not in a basis of {} levels", basis.len())));
    }
    Ok(())
}

fn quadrature_error(bound: f64, basis: &OneBodyBasis) -> Error {
    let hint = match basis.trap() {
        TrapSpec::Grid { m, .. } => {
            // Simpson error falls as h⁴
            let factor = (bound / (0.25 * QUADRATURE_TOL)).powf(0.25);
            format!("refine the grid to m >= {}", ((*m as f64) * factor).ceil() as usize)
        }
        _ => "increase the quadrature order".to_string(),
    };
    Error::Quadrature {
        bound,
        limit: QUADRATURE_TOL,
        hint,
    }
}

/// `∫ φ_a φ_b φ_c φ_d dx` per unit coupling.
pub fn two_body_element(basis: &OneBodyBasis, a: usize, b: usize, c: usize, d: usize) -> Result<f64> {
    let q = [a, b, c, d];
    check_indices(basis, q)?;
    let cutoff = q.iter().max().unwrap() + 1;
    let (value, bound) = Integrator::new(basis, cutoff).element(q);
    if bound > QUADRATURE_TOL {
        return Err(quadrature_error(bound, basis));
    }
    Ok(value)
}

/// Contact matrix elements for orbitals below a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyTensor {
    basis_hash: String,
    cutoff: usize,
    values: Vec<f64>,
    quadrature_error: f64,
}

/// Computes every canonical element with indices below `cutoff`.
pub fn build_tensor(basis: &OneBodyBasis, cutoff: usize) -> Result<TwoBodyTensor> {
    if cutoff == 0 || cutoff > basis.len() {
        return Err(Error::Tensor(format!("cutoff {cutoff} outside 1..={}", basis.len())));
    }
    let integrator = Integrator::new(basis, cutoff);
    let results: Vec<(f64, f64)> = canonical_quadruples(cutoff)
        .into_par_iter()
        .map(|q| integrator.element(q))
        .collect();
    let mut error = results.iter().fold(0.0f64, |m, r| m.max(r.1));
    if error > QUADRATURE_TOL {
        return Err(quadrature_error(error, basis));
    }
    if let TrapSpec::Harmonic = basis.trap() {
        // exact rule; report the drift against a higher-order rule on the
        // most oscillatory diagonal element
        let top = [cutoff - 1; 4];
        let refined = Integrator::harmonic(cutoff, 2 * cutoff + 3).element(top).0;
        error = (refined - results[canonical_rank(top)].0).abs();
    }
    Ok(TwoBodyTensor {
        basis_hash: basis.hash(),
        cutoff,
        values: results.into_iter().map(|r| r.0).collect(),
        quadrature_error: error,
    })
}

impl TwoBodyTensor {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn basis_hash(&self) -> &str {
        &self.basis_hash
    }

    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    /// Number of stored (canonical) entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Element for any index order.
    ///
    /// # Panics
    /// If an index is not below the cutoff.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let q = canonicalize([a, b, c, d]);
        assert!(q[3] < self.cutoff, "index {} beyond tensor cutoff {}", q[3], self.cutoff);
        self.values[canonical_rank(q)]
    }

    pub fn try_get(&self, a: usize, b: usize, c: usize, d: usize) -> Option<f64> {
        let q = canonicalize([a, b, c, d]);
        (q[3] < self.cutoff).then(|| self.values[canonical_rank(q)])
    }

    /// Canonical entries in storage order.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        canonical_quadruples(self.cutoff).into_iter().zip(self.values.iter().copied())
    }

    pub fn export(&self) -> TensorExport {
        TensorExport {
            basis_hash: self.basis_hash.clone(),
            cutoff: self.cutoff,
            quadrature_error: self.quadrature_error,
            values: self
                .entries()
                .map(|([a, b, c, d], v)| (format!("{a},{b},{c},{d}"), v))
                .collect(),
        }
    }

    /// Restores a tensor, requiring every canonical entry and checking that
    /// entries stored under other index orders agree with it.
    pub fn import(data: TensorExport) -> Result<TwoBodyTensor> {
        let cutoff = data.cutoff;
        let mut values = vec![f64::NAN; canonical_count(cutoff)];
        let mut others = Vec::new();
        for (key, v) in &data.values {
            let q = parse_key(key)?;
            if q.iter().any(|&n| n >= cutoff) {
                return Err(Error::Tensor(format!("key {key} beyond cutoff {cutoff}")));
            }
            if canonicalize(q) == q {
                values[canonical_rank(q)] = *v;
            } else {
                others.push((q, *v));
            }
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            let q = canonical_quadruples(cutoff)[missing];
            return Err(Error::Tensor(format!("missing entry {q:?}")));
        }
        for (q, v) in others {
            let canonical = values[canonical_rank(canonicalize(q))];
            if (v - canonical).abs() > 1e-10 * canonical.abs().max(1.0) {
                return Err(Error::Tensor(format!("entry {q:?} = {v} breaks index-permutation symmetry ({canonical})")));
            }
        }
        Ok(TwoBodyTensor {
            basis_hash: data.basis_hash,
            cutoff,
            values,
            quadrature_error: data.quadrature_error,
        })
    }
}

fn parse_key(key: &str) -> Result<[usize; 4]> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Tensor(format!("bad key {key:?}")))?;
    parts
        .try_into()
        .map_err(|_| Error::Tensor(format!("key {key:?} needs four indices")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorExport {
    pub basis_hash: String,
    pub cutoff: usize,
    pub quadrature_error: f64,
    pub values: BTreeMap<String, f64>,
}

/// Outcome of the index-order symmetry check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub trials: usize,
    pub max_relative_deviation: f64,
    pub worst_quadruple: Option<[usize; 4]>,
}

/// Integrates random quadruples independently in all 24 index orders and
/// reports the largest spread relative to the element's magnitude.
///
/// Elements that vanish by symmetry are measured against the Hölder bound
/// `Π (V_nnnn)^{1/4}` times `1e-6` instead of their own size.
pub fn check_state_permutation_symmetry(basis: &OneBodyBasis, trials: usize, seed: u64) -> SymmetryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = basis.len();
    let integrator = Integrator::new(basis, n);
    let mut worst = 0.0f64;
    let mut worst_q = None;
    let orders = all_orders();
    for _ in 0..trials {
        let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..n));
        let values: Vec<f64> = orders
            .iter()
            .map(|o| integrator.element([q[o[0]], q[o[1]], q[o[2]], q[o[3]]]).0)
            .collect();
        let holder: f64 = q
            .iter()
            .map(|&k| integrator.element([k; 4]).0.abs().powf(0.25))
            .product();
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let size = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let deviation = (hi - lo) / size.max(1e-6 * holder).max(f64::MIN_POSITIVE);
        if deviation > worst || worst_q.is_none() {
            worst = worst.max(deviation);
            worst_q = Some(q);
        }
    }
    SymmetryReport {
        trials,
        max_relative_deviation: worst,
        worst_quadruple: worst_q,
    }
}

fn all_orders() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let o = [a, b, c, d];
                    if canonicalize(o) == [0, 1, 2, 3] {
                        out.push(o);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::one_body::one_body_solve;
    use std::f64::consts::PI;

    fn harmonic(n: usize) -> OneBodyBasis {
        one_body_solve(&TrapSpec::Harmonic, n).unwrap()
    }

    fn well(n: usize) -> OneBodyBasis {
        one_body_solve(&TrapSpec::InfiniteWell, n).unwrap()
    }

    #[test]
    fn ranks_enumerate_sorted_quadruples() {
        for (i, q) in canonical_quadruples(6).into_iter().enumerate() {
            assert_eq!(canonical_rank(q), i);
        }
        assert_eq!(canonical_count(2), 5);
        assert_eq!(all_orders().len(), 24);
    }

    #[test]
    fn harmonic_ground_element() {
        let v = two_body_element(&harmonic(1), 0, 0, 0, 0).unwrap();
        assert!((v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn harmonic_elements_match_fine_grid_integration() {
        let b = harmonic(8);
        let h = 1e-3;
        let xs: Vec<f64> = (0..=24000).map(|i| -12.0 + i as f64 * h).collect();
        let phis: Vec<Vec<f64>> = xs.iter().map(|&x| harmonic_orbitals(8, x)).collect();
        for q in [[0, 0, 1, 1], [0, 1, 2, 3], [1, 3, 5, 7], [2, 2, 6, 6], [7, 7, 7, 7], [0, 0, 0, 2]] {
            let samples: Vec<f64> = phis.iter().map(|p| p[q[0]] * p[q[1]] * p[q[2]] * p[q[3]]).collect();
            let oracle = simpson(&samples, h);
            let v = two_body_element(&b, q[0], q[1], q[2], q[3]).unwrap();
            assert!((v - oracle).abs() < 1e-12, "{q:?}: {v} vs {oracle}");
        }
        assert_eq!(two_body_element(&b, 0, 0, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn well_closed_forms() {
        let b = well(6);
        assert!((two_body_element(&b, 0, 0, 0, 0).unwrap() - 1.5).abs() < 1e-15);
        for k in 1..6 {
            assert_eq!(two_body_element(&b, 0, 0, k, k).unwrap(), 1.0);
            assert_eq!(two_body_element(&b, k, k, k, k).unwrap(), 1.5);
        }
        // direct Simpson oracle for a generic element
        let n = 20000;
        let h = 1.0 / n as f64;
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                let x = i as f64 * h;
                [0, 1, 2, 1].iter().map(|&k| 2f64.sqrt() * ((k + 1) as f64 * PI * x).sin()).product()
            })
            .collect();
        let oracle = simpson(&samples, h);
        assert!((two_body_element(&b, 0, 1, 2, 1).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn tensor_storage_and_retrieval() {
        let t = build_tensor(&harmonic(2), 2).unwrap();
        assert_eq!(t.len(), 5);
        let keys: Vec<_> = t.entries().map(|e| e.0).collect();
        assert_eq!(keys, vec![[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 1], [0, 1, 1, 1], [1, 1, 1, 1]]);
        assert_eq!(t.get(0, 0, 1, 1), t.get(1, 0, 1, 0));
        assert_eq!(t.get(0, 0, 1, 1), t.get(0, 1, 0, 1));
        assert!(t.try_get(0, 0, 0, 2).is_none());

        let w = build_tensor(&well(3), 3).unwrap();
        assert_eq!(w.get(0, 0, 1, 1), 1.0);
        assert_eq!(w.get(0, 0, 2, 2), 1.0);
    }

    #[test]
    fn tensor_invariants() {
        for b in [harmonic(10), well(10)] {
            let t = build_tensor(&b, 10).unwrap();
            for a in 0..10 {
                assert!(t.get(a, a, a, a) > 0.0);
                for c in 0..10 {
                    assert!(t.get(a, a, c, c) <= (t.get(a, a, a, a) * t.get(c, c, c, c)).sqrt() + 1e-14);
                }
            }
        }
    }

    #[test]
    fn harmonic_tensor_agrees_with_single_elements() {
        let b = harmonic(12);
        let t = build_tensor(&b, 12).unwrap();
        assert!(t.quadrature_error() < 1e-12);
        for q in [[0, 3, 5, 11], [11, 11, 11, 11], [2, 4, 6, 8]] {
            let v = two_body_element(&b, q[0], q[1], q[2], q[3]).unwrap();
            assert!((t.get(q[0], q[1], q[2], q[3]) - v).abs() < 1e-13);
        }
    }

    #[test]
    fn permutation_symmetry_reports() {
        assert!(check_state_permutation_symmetry(&harmonic(12), 50, 1).max_relative_deviation < 1e-10);
        assert!(check_state_permutation_symmetry(&well(12), 50, 2).max_relative_deviation < 1e-10);
        let trap = TrapSpec::grid_from_fn(-8.0, 8.0, 4096, |x| x.powi(4));
        let grid = one_body_solve(&trap, 6).unwrap();
        assert!(check_state_permutation_symmetry(&grid, 20, 3).max_relative_deviation < 1e-8);
    }

    #[test]
    fn grid_tensor_has_small_error_bound() {
        let trap = TrapSpec::grid_from_fn(-8.0, 8.0, 4096, |x| x.powi(4));
        let grid = one_body_solve(&trap, 4).unwrap();
        let t = build_tensor(&grid, 4).unwrap();
        assert!(t.quadrature_error() <= QUADRATURE_TOL);
        assert!(t.get(0, 0, 0, 0) > 0.0);
    }

    #[test]
    fn export_import() {
        let t = build_tensor(&harmonic(4), 4).unwrap();
        let mut data = t.export();
        assert_eq!(data.values.len(), 35);
        let back = TwoBodyTensor::import(data.clone()).unwrap();
        assert_eq!(back, t);
        data.values.insert("1,0,0,0".into(), t.get(0, 0, 0, 1));
        assert!(TwoBodyTensor::import(data.clone()).is_ok());
        data.values.insert("3,2,1,0".into(), 42.0);
        assert!(TwoBodyTensor::import(data.clone()).is_err());
        data.values.remove("3,2,1,0");
        data.values.remove("0,0,0,0");
        assert!(TwoBodyTensor::import(data).is_err());
    }

    #[test]
    fn bad_indices() {
        assert!(two_body_element(&harmonic(2), 0, 0, 0, 2).is_err());
        assert!(build_tensor(&harmonic(2), 3).is_err());
    }
}
