//! Gauss–Legendre nodes and weights on [−1, 1].
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from the classical Chebyshev-angle initial guess; weights
//! follow from the derivative at the root. An n-point rule integrates
//! polynomials of degree ≤ 2n−1 exactly, which is what makes the
//! composite panels in [`super::quad`] converge so fast for the smooth
//! integrands there.

use std::sync::OnceLock;

/// Compute the n-point Gauss–Legendre rule. Exposed with a node-count
/// parameter so tests can verify refinement stability by doubling n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "a quadrature rule needs at least two nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // initial guess for the i-th root (descending order)
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and its derivative by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// The 20-point rule used by default throughout the crate.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_monomial(nodes: &[f64], weights: &[f64], k: u32) -> f64 {
        nodes
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * x.powi(k as i32))
            .sum()
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 5, 20, 40, 63] {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: Σw = {s}");
        }
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        // ∫_{-1}^{1} x^k dx = 2/(k+1) for even k, 0 for odd k;
        // the 20-point rule must be exact through degree 39
        let (x, w) = gauss_legendre(20);
        for k in 0..=39u32 {
            let got = integrate_monomial(&x, &w, k);
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!(
                (got - want).abs() < 1e-13,
                "degree {k}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let (x, _) = gauss_legendre(21);
        for i in 1..x.len() {
            assert!(x[i] > x[i - 1]);
        }
        for i in 0..x.len() {
            assert!((x[i] + x[x.len() - 1 - i]).abs() < 1e-14);
        }
    }
}
