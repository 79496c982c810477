//! Composite Gauss-Legendre rules for the spectral axes and trapezoid
//! weights for the uniform time grid.

use crate::error::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;

/// Gauss-Legendre order used inside each panel.
pub const PANEL_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n` nodes on [a, b] made of n / PANEL_ORDER equal panels.
pub fn composite_gauss_legendre(a: f64, b: f64, n: usize) -> Result<Rule> {
    if n == 0 || n % PANEL_ORDER != 0 {
        return Err(Error::config(
            "grid",
            format!("spectral node count {n} must be a positive multiple of {PANEL_ORDER}"),
        ));
    }
    if !(b > a) {
        return Err(Error::config("grid", format!("empty interval [{a}, {b}]")));
    }
    let panel = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap());
    let mut ref_pairs: Vec<(f64, f64)> = panel.as_node_weight_pairs().to_vec();
    ref_pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let npan = n / PANEL_ORDER;
    let width = (b - a) / npan as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for p in 0..npan {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        for &(x, w) in &ref_pairs {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    Ok(Rule { nodes, weights })
}

/// Symmetric rule on [-c, 0) ∪ (0, c] with `n` nodes in total; node i and
/// node n-1-i are mirror images.
pub fn symmetric_gauss_legendre(cutoff: f64, n: usize) -> Result<Rule> {
    if n % 2 != 0 {
        return Err(Error::config("grid", format!("symmetric node count {n} must be even")));
    }
    let half = composite_gauss_legendre(0.0, cutoff, n / 2)?;
    let mut nodes: Vec<f64> = half.nodes.iter().rev().map(|x| -x).collect();
    let mut weights: Vec<f64> = half.weights.iter().rev().copied().collect();
    nodes.extend_from_slice(&half.nodes);
    weights.extend_from_slice(&half.weights);
    Ok(Rule { nodes, weights })
}

/// Composite trapezoid weights for `n` uniform nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Cumulative trapezoid integral starting at zero.
pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    for (i, &fi) in f.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * h * (f[i - 1] + fi);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials_per_panel() {
        let r = composite_gauss_legendre(0.0, 5.0, 40).unwrap();
        assert_eq!(r.len(), 40);
        assert_relative_eq!(r.integrate(|x| x.powi(7)), 5f64.powi(8) / 8.0, max_relative = 1e-13);
        assert_relative_eq!(r.integrate(|x| x.sin()), 1.0 - 5f64.cos(), max_relative = 1e-10);
    }

    #[test]
    fn symmetric_rule_is_mirrored_and_avoids_zero() {
        let r = symmetric_gauss_legendre(5.0, 200).unwrap();
        let n = r.len();
        for i in 0..n {
            assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
            assert_eq!(r.weights[i], r.weights[n - 1 - i]);
            assert!(r.nodes[i] != 0.0);
        }
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 10.0, max_relative = 1e-13);
    }

    #[test]
    fn bad_counts_rejected() {
        assert!(composite_gauss_legendre(0.0, 1.0, 6).is_err());
        assert!(symmetric_gauss_legendre(1.0, 12).is_err());
    }

    #[test]
    fn cumulative_trapezoid_of_constant() {
        let x = cumulative_trapezoid(&[2.0; 5], 0.25);
        assert_eq!(x, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
