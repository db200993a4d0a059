//! One-particle trap problem `H¹ = P²/2 + V¹(X)` in units `ħ = m = 1`.
//!
//! Harmonic (`ω = 1`) and infinite-well (`L = 1`, domain `[0, 1]`) traps
//! are solved analytically. Grid traps use second-order central
//! differences with hard walls at both ends of the sampled interval.
//!
//! Orbitals are real with the first lobe from the left positive. For the
//! harmonic trap this is `(-1)^n` times the usual Hermite function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenpairs;
use crate::quadrature::hermite_functions;
use crate::tolerances::{GRID_ENERGY_TOL, ORBITAL_ORTHONORMALITY_TOL, PARITY_TOL};

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapSpec {
    Harmonic,
    InfiniteWell,
    Grid {
        x_min: f64,
        x_max: f64,
        m: usize,
        v: Vec<f64>,
    },
}

impl TrapSpec {
    /// Samples `potential` on `m` uniform points spanning `[x_min, x_max]`.
    pub fn grid_from_fn<F: Fn(f64) -> f64>(x_min: f64, x_max: f64, m: usize, potential: F) -> TrapSpec {
        let h = (x_max - x_min) / (m.max(2) - 1) as f64;
        TrapSpec::Grid {
            x_min,
            x_max,
            m,
            v: (0..m).map(|i| potential(x_min + i as f64 * h)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let TrapSpec::Grid { x_min, x_max, m, v } = self {
            if *m < MIN_GRID_POINTS {
                return Err(Error::InvalidTrap(format!("grid needs m >= {MIN_GRID_POINTS}, got {m}")));
            }
            if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
                return Err(Error::InvalidTrap(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
            }
            if v.len() != *m {
                return Err(Error::InvalidTrap(format!("{} potential samples for m = {m}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidTrap("potential samples must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrapSpec::Harmonic => "harmonic",
            TrapSpec::InfiniteWell => "infinite_well",
            TrapSpec::Grid { .. } => "grid",
        }
    }

    /// Reflection symmetry: always for the analytic traps, within
    /// [`PARITY_TOL`] (relative) about the interval midpoint for grids.
    pub fn is_symmetric(&self) -> bool {
        match self {
            TrapSpec::Harmonic | TrapSpec::InfiniteWell => true,
            TrapSpec::Grid { v, .. } => v
                .iter()
                .zip(v.iter().rev())
                .all(|(a, b)| (a - b).abs() <= PARITY_TOL * a.abs().max(b.abs()).max(1.0)),
        }
    }

    /// Analytic one-body energy of level `n`, if the trap has one.
    pub fn analytic_energy(&self, n: usize) -> Option<f64> {
        match self {
            TrapSpec::Harmonic => Some(n as f64 + 0.5),
            TrapSpec::InfiniteWell => {
                let k = (n + 1) as f64;
                Some(k * k * PI * PI / 2.0)
            }
            TrapSpec::Grid { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
enum Orbitals {
    Harmonic,
    Well,
    Grid { x: Vec<f64>, h: f64, values: Vec<Vec<f64>> },
}

/// Lowest one-body levels of a trap.
#[derive(Debug, Clone)]
pub struct OneBodyBasis {
    trap: TrapSpec,
    energies: Vec<f64>,
    parity: Option<Vec<i8>>,
    orbitals: Orbitals,
}

/// Solves the trap for its lowest `n_levels` states.
pub fn one_body_solve(trap: &TrapSpec, n_levels: usize) -> Result<OneBodyBasis> {
    trap.validate()?;
    if n_levels == 0 {
        return Err(Error::OneBody("n_levels must be positive".into()));
    }
    match trap {
        TrapSpec::Harmonic | TrapSpec::InfiniteWell => {
            let energies: Vec<f64> = (0..n_levels).map(|n| trap.analytic_energy(n).unwrap()).collect();
            let parity = Some((0..n_levels).map(|n| if n % 2 == 0 { 1 } else { -1 }).collect());
            let orbitals = if *trap == TrapSpec::Harmonic {
                Orbitals::Harmonic
            } else {
                Orbitals::Well
            };
            Ok(OneBodyBasis {
                trap: trap.clone(),
                energies,
                parity,
                orbitals,
            })
        }
        TrapSpec::Grid { x_min, x_max, m, v } => solve_grid(trap, *x_min, *x_max, *m, v, n_levels),
    }
}

fn solve_grid(trap: &TrapSpec, x_min: f64, x_max: f64, m: usize, v: &[f64], n_levels: usize) -> Result<OneBodyBasis> {
    if n_levels > m / 4 {
        return Err(Error::OneBody(format!(
            "{n_levels} levels requested from a {m}-point grid; at most m/4 = {} are reliable",
            m / 4
        )));
    }
    let h = (x_max - x_min) / (m - 1) as f64;
    let kinetic = 1.0 / (h * h);
    let interior = m - 2;
    let diag: Vec<f64> = (1..m - 1).map(|i| kinetic + v[i]).collect();
    let off = vec![-0.5 * kinetic; interior - 1];
    let (values, vectors) = tridiagonal_eigenpairs(&diag, &off, n_levels);

    let mut orbitals = Vec::with_capacity(n_levels);
    for vec in vectors {
        let mut full = Vec::with_capacity(m);
        full.push(0.0);
        full.extend(vec);
        full.push(0.0);
        let norm = (h * full.iter().map(|x| x * x).sum::<f64>()).sqrt();
        full.iter_mut().for_each(|x| *x /= norm);
        fix_phase(&mut full);
        orbitals.push(full);
    }

    for n in 1..values.len() {
        if !(values[n] > values[n - 1]) {
            return Err(Error::OneBody(format!("levels {} and {n} are degenerate on this grid", n - 1)));
        }
    }
    for (n, (phi, &e)) in orbitals.iter().zip(&values).enumerate() {
        let estimate = discretization_error(phi, h);
        let tol = GRID_ENERGY_TOL * e.abs().max(1.0);
        if estimate > tol {
            // error scales as h²; aim for a quarter of the tolerance
            let factor = (estimate / (0.25 * tol)).sqrt();
            let recommended = ((m - 1) as f64 * factor).ceil() as usize + 1;
            return Err(Error::GridTooCoarse {
                level: n,
                estimate,
                recommended_m: recommended.div_ceil(64) * 64,
            });
        }
    }

    let parity = if trap.is_symmetric() {
        Some(
            orbitals
                .iter()
                .map(|phi| {
                    let overlap: f64 = phi.iter().zip(phi.iter().rev()).map(|(a, b)| a * b).sum();
                    if overlap >= 0.0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    let x: Vec<f64> = (0..m).map(|i| x_min + i as f64 * h).collect();
    let basis = OneBodyBasis {
        trap: trap.clone(),
        energies: values,
        parity,
        orbitals: Orbitals::Grid { x, h, values: orbitals },
    };
    let residual = basis.orthonormality_residual();
    if residual > ORBITAL_ORTHONORMALITY_TOL {
        return Err(Error::OneBody(format!("grid orbitals not orthonormal (residual {residual:.2e})")));
    }
    Ok(basis)
}

/// First-order estimate of the energy error of a second-order
/// finite-difference eigenvector, from the gap to a fourth-order stencil.
fn discretization_error(phi: &[f64], h: f64) -> f64 {
    let m = phi.len();
    // odd reflection through the hard walls
    let at = |i: isize| -> f64 {
        if i < 0 {
            -phi[(-i) as usize]
        } else if i as usize >= m {
            -phi[2 * (m - 1) - i as usize]
        } else {
            phi[i as usize]
        }
    };
    let mut acc = 0.0;
    for i in 1..m - 1 {
        let j = i as isize;
        let second = (at(j - 1) - 2.0 * at(j) + at(j + 1)) / (h * h);
        let fourth = (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2)) / (12.0 * h * h);
        acc += phi[i] * (fourth - second);
    }
    (0.5 * h * acc).abs()
}

fn fix_phase(phi: &mut [f64]) {
    let peak = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = phi.iter().find(|x| x.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            phi.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

impl OneBodyBasis {
    pub fn trap(&self) -> &TrapSpec {
        &self.trap
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn parity(&self) -> Option<&[i8]> {
        self.parity.as_deref()
    }

    /// Domain of the orbitals (`(-∞, ∞)` for the harmonic trap).
    pub fn domain(&self) -> (f64, f64) {
        match &self.trap {
            TrapSpec::Harmonic => (f64::NEG_INFINITY, f64::INFINITY),
            TrapSpec::InfiniteWell => (0.0, 1.0),
            TrapSpec::Grid { x_min, x_max, .. } => (*x_min, *x_max),
        }
    }

    /// Grid points and orbital samples for grid traps.
    pub fn grid(&self) -> Option<(&[f64], f64, &[Vec<f64>])> {
        match &self.orbitals {
            Orbitals::Grid { x, h, values } => Some((x, *h, values)),
            _ => None,
        }
    }

    /// Value of orbital `n` at `x`; grid orbitals are linearly interpolated.
    pub fn orbital_value(&self, n: usize, x: f64) -> Result<f64> {
        if n >= self.len() {
            return Err(Error::OneBody(format!("orbital {n} not in a basis of {} levels", self.len())));
        }
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x, min: lo, max: hi });
        }
        Ok(match &self.orbitals {
            Orbitals::Harmonic => harmonic_orbitals(n + 1, x)[n],
            Orbitals::Well => well_orbital(n, x),
            Orbitals::Grid { x: grid, h, values } => {
                let t = (x - grid[0]) / h;
                let i = (t.floor() as usize).min(grid.len() - 2);
                let frac = t - i as f64;
                values[n][i] * (1.0 - frac) + values[n][i + 1] * frac
            }
        })
    }

    /// `max |⟨φ_a|φ_b⟩ - δ_ab|`. Analytic bases are evaluated by
    /// quadrature, grid bases by the discrete inner product.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.len();
        let overlap = |a: usize, b: usize| -> f64 {
            match &self.orbitals {
                Orbitals::Harmonic => {
                    let rule = crate::quadrature::GaussHermite::new(n + 2);
                    rule.integrate(|y| {
                        let psi = harmonic_orbitals(n, y);
                        psi[a] * psi[b]
                    })
                }
                Orbitals::Well => {
                    // trapezoid is exact for trigonometric polynomials of low degree
                    let k = 4 * (n + 2);
                    let h = 1.0 / k as f64;
                    (0..=k).map(|i| well_orbital(a, i as f64 * h) * well_orbital(b, i as f64 * h)).sum::<f64>() * h
                }
                Orbitals::Grid { h, values, .. } => {
                    values[a].iter().zip(&values[b]).map(|(x, y)| x * y).sum::<f64>() * h
                }
            }
        };
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((overlap(a, b) - target).abs());
            }
        }
        worst
    }

    /// Stable identifier of the trap and level count.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(&self.trap).expect("trap serializes"));
        hasher.update((self.len() as u64).to_le_bytes());
        hex::encode(&hasher.finalize()[..8])
    }

    /// Orbitals sampled on a uniform grid (the native grid for grid traps).
    pub fn samples(&self, points: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        if let Orbitals::Grid { x, values, .. } = &self.orbitals {
            return (x.clone(), values.clone());
        }
        let (lo, hi) = match self.trap {
            TrapSpec::Harmonic => {
                let reach = (2.0 * self.len() as f64 + 1.0).sqrt() + 4.0;
                (-reach, reach)
            }
            _ => (0.0, 1.0),
        };
        let h = (hi - lo) / (points.max(2) - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| lo + i as f64 * h).collect();
        let values = (0..self.len())
            .map(|n| xs.iter().map(|&x| self.orbital_value(n, x).unwrap()).collect())
            .collect();
        (xs, values)
    }

    /// Rebuilds a grid basis from exported samples.
    pub(crate) fn from_grid_samples(trap: TrapSpec, energies: Vec<f64>, parity: Option<Vec<i8>>, x: Vec<f64>, values: Vec<Vec<f64>>) -> Result<OneBodyBasis> {
        trap.validate()?;
        if x.len() < 2 || values.len() != energies.len() || values.iter().any(|v| v.len() != x.len()) {
            return Err(Error::OneBody("inconsistent grid samples".into()));
        }
        let h = match &trap {
            TrapSpec::Grid { x_min, x_max, m, .. } if *m == x.len() => (x_max - x_min) / (m - 1) as f64,
            _ => return Err(Error::OneBody("grid samples do not match the trap".into())),
        };
        let basis = OneBodyBasis {
            trap,
            energies,
            parity,
            orbitals: Orbitals::Grid { x, h, values },
        };
        basis.check_invariants()?;
        Ok(basis)
    }

    /// Strictly increasing energies and orthonormal orbitals.
    pub fn check_invariants(&self) -> Result<()> {
        if self.energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::OneBody("energies are not strictly increasing".into()));
        }
        let residual = self.orthonormality_residual();
        if residual > ORBITAL_ORTHONORMALITY_TOL {
            return Err(Error::OneBody(format!("orbitals not orthonormal (residual {residual:.2e})")));
        }
        Ok(())
    }
}

/// Serialized form of a basis: energies, parity labels and orbital samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisExport {
    pub trap: TrapSpec,
    pub basis_hash: String,
    pub energies: Vec<f64>,
    pub parity: Option<Vec<i8>>,
    pub x: Vec<f64>,
    pub orbitals: Vec<Vec<f64>>,
}

impl OneBodyBasis {
    pub fn export(&self, points: usize) -> BasisExport {
        let (x, orbitals) = self.samples(points);
        BasisExport {
            trap: self.trap.clone(),
            basis_hash: self.hash(),
            energies: self.energies.clone(),
            parity: self.parity.clone(),
            x,
            orbitals,
        }
    }

    /// Rebuilds a basis. Analytic traps are re-solved and must reproduce
    /// the stored energies; grid traps are restored from their samples.
    pub fn import(data: BasisExport) -> Result<OneBodyBasis> {
        match data.trap {
            TrapSpec::Grid { .. } => {
                OneBodyBasis::from_grid_samples(data.trap, data.energies, data.parity, data.x, data.orbitals)
            }
            _ => {
                let basis = one_body_solve(&data.trap, data.energies.len())?;
                let drift = basis
                    .energies
                    .iter()
                    .zip(&data.energies)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / a.abs().max(1.0)));
                if drift > 1e-10 {
                    return Err(Error::OneBody(format!("stored energies disagree with the trap (drift {drift:.2e})")));
                }
                Ok(basis)
            }
        }
    }

    /// CSV with header `x,phi_0,...` followed by one row per sample point.
    pub fn to_csv(&self, points: usize) -> String {
        use std::fmt::Write;
        let (x, orbitals) = self.samples(points);
        let mut out = String::from("x");
        for n in 0..orbitals.len() {
            write!(out, ",phi_{n}").unwrap();
        }
        out.push('\n');
        for (i, xi) in x.iter().enumerate() {
            write!(out, "{xi:.11e}").unwrap();
            for phi in &orbitals {
                write!(out, ",{:.11e}", phi[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// CSV of `n,energy,parity`.
    pub fn energies_csv(&self) -> String {
        let mut out = String::from("n,energy,parity\n");
        for (n, e) in self.energies.iter().enumerate() {
            let p = self.parity.as_ref().map(|p| p[n].to_string()).unwrap_or_default();
            out.push_str(&format!("{n},{e:.11e},{p}\n"));
        }
        out
    }
}

/// Phase-fixed harmonic orbitals `φ_0..φ_{n-1}` at `x`.
pub(crate) fn harmonic_orbitals(n: usize, x: f64) -> Vec<f64> {
    let mut psi = hermite_functions(n, x);
    for (k, p) in psi.iter_mut().enumerate() {
        if k % 2 == 1 {
            *p = -*p;
        }
    }
    psi
}

pub(crate) fn well_orbital(n: usize, x: f64) -> f64 {
    2f64.sqrt() * ((n + 1) as f64 * PI * x).sin()
}
