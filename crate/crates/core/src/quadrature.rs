//! Gauss-Hermite rule and composite grid rules used by the contact tensor.

use std::f64::consts::PI;

use crate::linalg::tridiagonal_eigenvalues;

/// Normalized Hermite functions `ψ_0..ψ_{n-1}` at `x` (standard sign
/// convention, positive leading coefficient).
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n > 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Gauss-Hermite rule for `∫ e^{-y²} p(y) dy`, stored with the Gaussian
/// folded into the weights so that `∫ f(y) dy ≈ Σ w̃_i f(y_i)` is exact for
/// `f = e^{-y²} · (polynomial of degree < 2K)`.
///
/// Only the non-negative nodes are kept; each positive node stands for the
/// pair `±y`. Summing `f(y) + f(-y)` per pair makes parity-odd integrands
/// vanish exactly.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub order: usize,
    /// Non-negative nodes, ascending.
    pub nodes: Vec<f64>,
    /// `w_i e^{y_i²}` for each stored node.
    pub folded_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> GaussHermite {
        assert!(order >= 1);
        let diag = vec![0.0; order];
        let off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let mut nodes: Vec<f64> = tridiagonal_eigenvalues(&diag, &off, order)
            .into_iter()
            .filter(|&y| y > -1e-8)
            .map(|y| y.max(0.0))
            .collect();
        // Newton polish on ψ_K(y) = 0
        for y in nodes.iter_mut() {
            if order % 2 == 1 && *y < 1e-6 {
                *y = 0.0;
                continue;
            }
            for _ in 0..3 {
                let psi = hermite_functions(order + 1, *y);
                let value = psi[order];
                let derivative = (2.0 * order as f64).sqrt() * psi[order - 1] - *y * value;
                *y -= value / derivative;
            }
        }
        let folded_weights = nodes
            .iter()
            .map(|&y| 1.0 / hermite_functions(order, y).iter().map(|p| p * p).sum::<f64>())
            .collect();
        GaussHermite {
            order,
            nodes,
            folded_weights,
        }
    }

    /// `∫ f(y) dy` using the paired nodes.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.folded_weights)
            .map(|(&y, &w)| if y == 0.0 { w * f(0.0) } else { w * (f(y) + f(-y)) })
            .sum()
    }
}

/// Composite Simpson rule on uniformly spaced samples (3/8 rule on the last
/// panel when the interval count is odd).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    if intervals == 1 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let (even_part, tail_start) = if intervals.is_multiple_of(2) {
        (intervals, None)
    } else {
        (intervals - 3, Some(intervals - 3))
    };
    let mut acc = 0.0;
    if even_part > 0 {
        acc += values[0] + values[even_part];
        for (i, v) in values.iter().enumerate().take(even_part).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc *= h / 3.0;
    }
    if let Some(s) = tail_start {
        acc += 3.0 * h / 8.0 * (values[s] + 3.0 * values[s + 1] + 3.0 * values[s + 2] + values[s + 3]);
    }
    acc
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        // ∫ e^{-y²} y^{2m} dy = Γ(m + 1/2)
        let rule = GaussHermite::new(12);
        let gamma_half = [1.0, 0.5, 0.75, 1.875, 6.5625, 29.53125];
        for (m, g) in gamma_half.iter().enumerate() {
            let got = rule.integrate(|y| (-y * y).exp() * y.powi(2 * m as i32));
            assert!((got - g * PI.sqrt()).abs() < 1e-12 * g.max(1.0) * 10.0, "m={m}: {got}");
        }
        assert_eq!(rule.integrate(|y| (-y * y).exp() * y.powi(3)), 0.0);
    }

    #[test]
    fn gauss_hermite_high_order_is_normalized() {
        let rule = GaussHermite::new(160);
        for n in [0, 40, 79] {
            let norm = rule.integrate(|y| hermite_functions(n + 1, y)[n].powi(2));
            assert!((norm - 1.0).abs() < 1e-12, "n={n}: {norm}");
        }
    }

    #[test]
    fn simpson_integrates_cubics() {
        for n in [5usize, 6, 7, 64, 65] {
            let h = 2.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| {
                let x = -1.0 + i as f64 * h;
                x * x * x + x * x
            }).collect();
            assert!((simpson(&v, h) - 2.0 / 3.0).abs() < 1e-13, "n={n}");
        }
    }
}
