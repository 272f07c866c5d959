//! Fixed Gauss-Legendre quadrature on (0, 1).

/// Nodes and weights of an n-point Gauss-Legendre rule mapped to (0, 1).
/// Exact for polynomial integrands of degree ≤ 2n − 1.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial,
    /// starting from the Chebyshev-like root estimates.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            // standard weight on (−1, 1), halved by the map to (0, 1)
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = 0.5 * (x + 1.0);
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points().map(|(u, w)| w * f(u)).sum()
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let rule = GaussLegendre::new(32);
        let total: f64 = rule.points().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_monomials_up_to_63() {
        let rule = GaussLegendre::new(32);
        for k in [0u32, 1, 5, 17, 40, 63] {
            let integral = rule.integrate(|u| u.powi(k as i32));
            let exact = 1.0 / (k as f64 + 1.0);
            assert!(
                (integral - exact).abs() <= 1e-14 * exact.max(1.0),
                "degree {}: {} vs {}",
                k,
                integral,
                exact
            );
        }
    }

    #[test]
    fn smooth_integrand() {
        let rule = GaussLegendre::new(32);
        let integral = rule.integrate(f64::exp);
        assert!((integral - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }
}
