//! Assembly of the quadrature functionals and the residual-minimizing
//! coefficient solve.
//!
//! For each basis index k the assembly computes
//!
//! ```text
//! Lambda_k  = p^2/(2 hbar^2 N0) * integral of d^2 B_{4k}(theta mu_k)/dtheta^2
//! Lambda'_k = 1/(2 N0) (E/hbar + (p/hbar)^2) * integral of B_{4k}(theta mu_k)
//! ```
//!
//! over the configured theta interval, and the combined residual row
//! a_k = mu_k^2 Lambda_k + (1/(2 N0)) Lambda'_k. The residual functional is
//! Omega(xi) = |a . xi|; the solver returns a deterministic unit-norm vector
//! in its kernel (for N0 >= 2), so Omega vanishes to machine precision.

use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::poly::{BoubakerBasis, RootTable};
use crate::quad::GaussLegendre;

/// How the mu_k^2 chain-rule factor enters the Lambda_k integrand.
///
/// The written form of the functional carries mu_k^2 both inside the
/// theta-derivative and as an explicit prefactor. `Literal` keeps both;
/// `Single` drops the one inside the integrand, leaving a single factor
/// total as the plain chain rule would.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainRuleMode {
    #[default]
    Literal,
    Single,
}

impl fmt::Display for ChainRuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainRuleMode::Literal => write!(f, "literal"),
            ChainRuleMode::Single => write!(f, "single"),
        }
    }
}

impl FromStr for ChainRuleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ChainRuleMode::Literal),
            "single" => Ok(ChainRuleMode::Single),
            other => Err(Error::InvalidConfig(format!(
                "chain rule mode must be \"literal\" or \"single\", got \"{other}\""
            ))),
        }
    }
}

/// Expansion configuration: order, quadrature resolution, theta interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConfig {
    pub n0: usize,
    pub quad_nodes: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub chain_rule_mode: ChainRuleMode,
}

/// Node count that integrates every assembled polynomial exactly.
pub fn default_quad_nodes(n0: usize) -> usize {
    (4 * n0 + 2).max(64)
}

impl ExpansionConfig {
    /// Defaults: theta on [0, 1], exact-for-polynomials node count,
    /// literal chain-rule mode.
    pub fn new(n0: usize) -> Result<Self> {
        let cfg = ExpansionConfig {
            n0,
            quad_nodes: default_quad_nodes(n0),
            theta_lo: 0.0,
            theta_hi: 1.0,
            chain_rule_mode: ChainRuleMode::Literal,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 {
            return Err(Error::InvalidConfig("n0 must be >= 1".into()));
        }
        if self.quad_nodes < 8 {
            return Err(Error::InvalidConfig("quad_nodes must be >= 8".into()));
        }
        if !(self.theta_lo < self.theta_hi) {
            return Err(Error::InvalidConfig(format!(
                "theta interval is empty: [{}, {}]",
                self.theta_lo, self.theta_hi
            )));
        }
        if !self.theta_lo.is_finite() || !self.theta_hi.is_finite() {
            return Err(Error::InvalidConfig("theta interval must be finite".into()));
        }
        Ok(())
    }
}

/// Assembled quadrature values and the combined residual row.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    n0: usize,
    lambda: Vec<f64>,
    lambda_prime: Vec<f64>,
    row: Vec<f64>,
}

impl AssembledSystem {
    /// Builds a system from precomputed vectors (lengths must agree).
    pub fn from_vectors(lambda: Vec<f64>, lambda_prime: Vec<f64>, row: Vec<f64>) -> Result<Self> {
        let n0 = row.len();
        if n0 == 0 || lambda.len() != n0 || lambda_prime.len() != n0 {
            return Err(Error::InvalidConfig(
                "system vectors must be non-empty and of equal length".into(),
            ));
        }
        if lambda
            .iter()
            .chain(&lambda_prime)
            .chain(&row)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidConfig("system vectors must be finite".into()));
        }
        Ok(AssembledSystem {
            n0,
            lambda,
            lambda_prime,
            row,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_prime(&self) -> &[f64] {
        &self.lambda_prime
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn row_norm(&self) -> f64 {
        self.row.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Recomputes the row from lambda, lambda', and the root table and
    /// checks it against the stored one.
    pub fn row_consistent_with(&self, roots: &RootTable, tol: f64) -> bool {
        if roots.n0() < self.n0 {
            return false;
        }
        (0..self.n0).all(|i| {
            let mu = roots.mu(i + 1);
            let rebuilt = mu * mu * self.lambda[i] + 0.5 / self.n0 as f64 * self.lambda_prime[i];
            (rebuilt - self.row[i]).abs() <= tol * self.row[i].abs().max(1.0)
        })
    }
}

/// Computes Lambda_k, Lambda'_k by Gauss–Legendre quadrature and forms the
/// residual row. Integrals over k run in parallel; each one is summed
/// serially in node order, so results are deterministic.
pub fn assemble(
    config: &ExpansionConfig,
    params: &PhysicalParams,
    basis: &BoubakerBasis,
) -> Result<AssembledSystem> {
    config.validate()?;
    params.validate()?;
    if basis.n0() != config.n0 {
        return Err(Error::InvalidConfig(format!(
            "basis has N0 = {} but the config requests N0 = {}",
            basis.n0(),
            config.n0
        )));
    }

    let rule = GaussLegendre::new(config.quad_nodes);
    let n0f = config.n0 as f64;
    let p_over_h = params.momentum() / params.hbar();
    let lambda_pref = p_over_h * p_over_h / (2.0 * n0f);
    let lambda_prime_pref = 0.5 / n0f * (params.energy() / params.hbar() + p_over_h * p_over_h);

    let pairs: Result<Vec<(f64, f64)>> = (1..=config.n0)
        .into_par_iter()
        .map(|k| {
            let mu = basis.roots().mu(k);
            let chain = match config.chain_rule_mode {
                ChainRuleMode::Literal => mu * mu,
                ChainRuleMode::Single => 1.0,
            };
            let mut second = 0.0;
            let mut plain = 0.0;
            for (theta, w) in rule.mapped(config.theta_lo, config.theta_hi) {
                let arg = theta * mu;
                let d2 = chain * basis.eval_d2_real(k, arg);
                let b = basis.eval_real(k, arg);
                if !d2.is_finite() || !b.is_finite() {
                    return Err(Error::QuadratureNonFinite { k });
                }
                second += w * d2;
                plain += w * b;
            }
            Ok((lambda_pref * second, lambda_prime_pref * plain))
        })
        .collect();
    let pairs = pairs?;

    let lambda: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let lambda_prime: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let row: Vec<f64> = (0..config.n0)
        .map(|i| {
            let mu = basis.roots().mu(i + 1);
            mu * mu * lambda[i] + 0.5 / n0f * lambda_prime[i]
        })
        .collect();

    AssembledSystem::from_vectors(lambda, lambda_prime, row)
}

/// The absolute residual functional Omega(xi) = |row . xi|.
pub fn residual_omega(system: &AssembledSystem, xi: &[f64]) -> f64 {
    assert_eq!(xi.len(), system.n0, "coefficient vector length must be N0");
    system
        .row
        .iter()
        .zip(xi)
        .map(|(a, x)| a * x)
        .sum::<f64>()
        .abs()
}

/// Solved expansion weights, the achieved residual, and the
/// probability-normalization scale applied downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub xi: Vec<f64>,
    pub omega: f64,
    pub scale: f64,
}

impl CoefficientSet {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn sum_xi(&self) -> f64 {
        self.xi.iter().sum()
    }

    pub fn norm(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

/// Deterministic minimizer of Omega over non-null coefficient sets.
///
/// For N0 = 1 the kernel is trivial and the answer is xi = (1) with
/// Omega = |a_1|. Otherwise the all-ones seed is projected onto the kernel
/// of the row functional; if that projection degenerates (the row is
/// parallel to the seed) the kernel vector built from the first two nonzero
/// row entries is used instead. The result is normalized to unit length
/// with its first nonzero component made positive.
pub fn solve_coefficients(system: &AssembledSystem) -> CoefficientSet {
    let n0 = system.n0;
    let row = &system.row;
    if n0 == 1 {
        return CoefficientSet {
            xi: vec![1.0],
            omega: row[0].abs(),
            scale: 1.0,
        };
    }

    let row_dot_row: f64 = row.iter().map(|v| v * v).sum();
    let row_dot_seed: f64 = row.iter().sum();
    let mut xi: Vec<f64> = if row_dot_row > 0.0 {
        let c = row_dot_seed / row_dot_row;
        row.iter().map(|&a| 1.0 - c * a).collect()
    } else {
        vec![1.0; n0]
    };

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm(&xi) < 1e-10 {
        // Seed is parallel to the row; fall back to the two-entry kernel
        // vector (a_j, -a_i) placed at the first two nonzero positions.
        let nz: Vec<usize> = (0..n0).filter(|&i| row[i] != 0.0).collect();
        debug_assert!(nz.len() >= 2, "degenerate projection implies >= 2 nonzeros");
        xi = vec![0.0; n0];
        xi[nz[0]] = row[nz[1]];
        xi[nz[1]] = -row[nz[0]];
    }

    let n = norm(&xi);
    for v in &mut xi {
        *v /= n;
    }
    if let Some(first) = xi.iter().find(|v| **v != 0.0) {
        if *first < 0.0 {
            for v in &mut xi {
                *v = -*v;
            }
        }
    }

    let omega = residual_omega(system, &xi);
    CoefficientSet {
        xi,
        omega,
        scale: 1.0,
    }
}
