//! Gauss–Legendre quadrature.
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from the Chebyshev-style initial guess; an n-node rule is
//! exact for polynomials up to degree 2n - 1.

/// An n-node Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 1..=n {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
            nodes[i - 1] = x;
            weights[i - 1] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node/weight pairs mapped onto [a, b], in fixed order.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }

    /// Integrates f over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence; valid for |x| < 1.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for m in 1..n {
        let m_f = m as f64;
        let next = ((2.0 * m_f + 1.0) * x * p - m_f * p_prev) / (m_f + 1.0);
        p_prev = p;
        p = next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 8, 64, 230] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-13, "n = {n}: {total}");
        }
    }

    #[test]
    fn integrates_monomials_exactly() {
        let rule = GaussLegendre::new(6);
        // Exact for degree <= 11.
        for k in 0..=11u32 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(k as i32));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "x^{k}: {got} vs {want}");
        }
    }

    #[test]
    fn high_order_rule_is_accurate() {
        let rule = GaussLegendre::new(230);
        let got = rule.integrate(0.0, 2.0, |x| (x * x * x * x) - 2.0);
        assert!((got - (32.0 / 5.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn sin_integral() {
        let rule = GaussLegendre::new(24);
        let got = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-13);
    }
}
