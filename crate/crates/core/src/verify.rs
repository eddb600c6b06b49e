//! Independent numerical checks: an alternative polynomial construction
//! path, finite-difference cross-checks of the reduced-equation residual,
//! and the convergence sweep over increasing expansion orders.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{eval_profile_f, PhysicalParams};
use crate::pipeline::{run_pipeline, PipelineConfig};
use crate::poly::BoubakerBasis;
use crate::quad::GaussLegendre;
use crate::solver::{AssembledSystem, ChainRuleMode, CoefficientSet};

/// Central-difference step for the residual cross-check.
pub const FD_STEP: f64 = 1e-5;

/// Residual norms of the reduced equation
/// (p/hbar)^2 f'' + (E/hbar + (p/hbar)^2) f, evaluated along real theta.
///
/// The `pointwise_max`/`integrated_l2` pair uses exact polynomial second
/// derivatives; the `fd_*` pair repeats the computation with central finite
/// differences of the profile. Only the integrated functional is driven to
/// zero by the solve, so pointwise values need not be small; the report
/// states both without judging them.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub pointwise_max: f64,
    pub integrated_l2: f64,
    pub fd_pointwise_max: f64,
    pub fd_integrated_l2: f64,
    pub n_samples: usize,
    pub config_echo: String,
}

impl std::fmt::Display for ResidualReport {
    /// Key/value lines, one quantity per line.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ode_residual_max = {:e}", self.pointwise_max)?;
        writeln!(f, "ode_residual_l2 = {:e}", self.integrated_l2)?;
        writeln!(f, "ode_residual_fd_max = {:e}", self.fd_pointwise_max)?;
        writeln!(f, "ode_residual_fd_l2 = {:e}", self.fd_integrated_l2)?;
        writeln!(f, "ode_residual_samples = {}", self.n_samples)?;
        write!(f, "ode_residual_config = {}", self.config_echo)
    }
}

fn profile_real(theta: f64, basis: &BoubakerBasis, coeffs: &CoefficientSet) -> f64 {
    let n0 = basis.n0();
    let mut acc = 0.0;
    for k in 1..=n0 {
        acc += coeffs.xi[k - 1] * basis.eval_real(k, theta * basis.roots().mu(k));
    }
    acc * coeffs.scale / (2.0 * n0 as f64)
}

fn profile_second_derivative_real(
    theta: f64,
    basis: &BoubakerBasis,
    coeffs: &CoefficientSet,
) -> f64 {
    let n0 = basis.n0();
    let mut acc = 0.0;
    for k in 1..=n0 {
        let mu = basis.roots().mu(k);
        acc += coeffs.xi[k - 1] * mu * mu * basis.eval_d2_real(k, theta * mu);
    }
    acc * coeffs.scale / (2.0 * n0 as f64)
}

/// Evaluates the residual at each sample with exact second derivatives and
/// again with central differences at step [`FD_STEP`].
///
/// `theta_samples` is treated as a sorted grid for the trapezoidal L2 norm
/// and must hold at least three points.
pub fn ode_residual(
    coeffs: &CoefficientSet,
    basis: &BoubakerBasis,
    params: &PhysicalParams,
    theta_samples: &[f64],
) -> ResidualReport {
    assert!(theta_samples.len() >= 3, "need at least 3 samples");
    let p_over_h = params.momentum() / params.hbar();
    let second_coef = p_over_h * p_over_h;
    let zeroth_coef = params.energy() / params.hbar() + p_over_h * p_over_h;

    let exact: Vec<f64> = theta_samples
        .iter()
        .map(|&th| {
            second_coef * profile_second_derivative_real(th, basis, coeffs)
                + zeroth_coef * profile_real(th, basis, coeffs)
        })
        .collect();
    let fd: Vec<f64> = theta_samples
        .iter()
        .map(|&th| {
            let h = FD_STEP;
            let f0 = profile_real(th, basis, coeffs);
            let fp = profile_real(th + h, basis, coeffs);
            let fm = profile_real(th - h, basis, coeffs);
            second_coef * (fp - 2.0 * f0 + fm) / (h * h) + zeroth_coef * f0
        })
        .collect();

    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let l2 = |v: &[f64]| {
        let mut total = 0.0;
        for i in 1..theta_samples.len() {
            let dt = theta_samples[i] - theta_samples[i - 1];
            total += 0.5 * dt * (v[i] * v[i] + v[i - 1] * v[i - 1]);
        }
        total.sqrt()
    };

    ResidualReport {
        pointwise_max: max_abs(&exact),
        integrated_l2: l2(&exact),
        fd_pointwise_max: max_abs(&fd),
        fd_integrated_l2: l2(&fd),
        n_samples: theta_samples.len(),
        config_echo: format!(
            "n0={} hbar={} p={} energy={} fd_step={FD_STEP}",
            basis.n0(),
            params.hbar(),
            params.momentum(),
            params.energy()
        ),
    }
}

/// Signed integral of the residual over [lo, hi] by Gauss–Legendre
/// quadrature.
pub fn integrated_residual(
    coeffs: &CoefficientSet,
    basis: &BoubakerBasis,
    params: &PhysicalParams,
    lo: f64,
    hi: f64,
    quad_nodes: usize,
) -> f64 {
    let p_over_h = params.momentum() / params.hbar();
    let second_coef = p_over_h * p_over_h;
    let zeroth_coef = params.energy() / params.hbar() + p_over_h * p_over_h;
    GaussLegendre::new(quad_nodes).integrate(lo, hi, |th| {
        second_coef * profile_second_derivative_real(th, basis, coeffs)
            + zeroth_coef * profile_real(th, basis, coeffs)
    })
}

/// The same integral rebuilt from the assembled functionals by exchanging
/// sum and integral: sum_k xi_k (Lambda_k + Lambda'_k), where in `Single`
/// mode the chain-rule factor mu_k^2 is restored to Lambda_k.
pub fn integrated_residual_from_system(
    system: &AssembledSystem,
    coeffs: &CoefficientSet,
    mode: ChainRuleMode,
    basis: &BoubakerBasis,
) -> f64 {
    let mut total = 0.0;
    for k in 1..=system.n0() {
        let chain = match mode {
            ChainRuleMode::Literal => 1.0,
            ChainRuleMode::Single => {
                let mu = basis.roots().mu(k);
                mu * mu
            }
        };
        total += coeffs.xi[k - 1] * (chain * system.lambda()[k - 1] + system.lambda_prime()[k - 1]);
    }
    total * coeffs.scale
}

/// Outcome of the independent polynomial reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub k_max: usize,
    pub coeffs_match: bool,
    pub first_mismatch_order: Option<usize>,
    pub constant_sums_ok: bool,
    pub derivative_sums_ok: bool,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.coeffs_match && self.constant_sums_ok && self.derivative_sums_ok
    }
}

impl std::fmt::Display for OracleReport {
    /// Key/value lines, one check per line.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let flag = |ok: bool| if ok { "pass" } else { "fail" };
        writeln!(f, "polynomial_oracle_k_max = {}", self.k_max)?;
        writeln!(f, "polynomial_oracle_coeffs = {}", flag(self.coeffs_match))?;
        if let Some(order) = self.first_mismatch_order {
            writeln!(f, "polynomial_oracle_first_mismatch_order = {order}")?;
        }
        writeln!(
            f,
            "polynomial_oracle_constant_sums = {}",
            flag(self.constant_sums_ok)
        )?;
        write!(
            f,
            "polynomial_oracle_derivative_sums = {}",
            flag(self.derivative_sums_ok)
        )
    }
}

/// Schoolbook product of two coefficient vectors.
fn naive_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn naive_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    out
}

/// Rebuilds the order-m polynomial going through a generic polynomial
/// multiply instead of the production shift-and-subtract path.
fn naive_boubaker(order: usize) -> Vec<BigInt> {
    let x = vec![BigInt::zero(), BigInt::one()];
    let mut prev = vec![BigInt::one()]; // order 0
    if order == 0 {
        return prev;
    }
    let mut cur = x.clone(); // order 1
    for m in 2..=order {
        let mut next = naive_sub(&naive_mul(&x, &cur), &prev);
        if m == 2 {
            // The recurrence seeds B_2 = x^2 + 2, not x * B_1 - B_0.
            next = vec![BigInt::from(2), BigInt::zero(), BigInt::one()];
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Re-derives B_{4k} for k <= k_max in a separate code path and compares
/// coefficients exactly; also validates the boundary-identity sums
/// sum_{q<=N} B_{4q}(0) = -2N and sum_{q<=N} B'_{4q}(0) = 0 for N <= k_max.
pub fn polynomial_oracle(k_max: usize) -> OracleReport {
    assert!(k_max >= 1);
    let mut first_mismatch_order = None;
    let mut const_sum = BigInt::zero();
    let mut deriv_sum = BigInt::zero();
    let mut constant_sums_ok = true;
    let mut derivative_sums_ok = true;

    for k in 1..=k_max {
        let order = 4 * k;
        let naive = naive_boubaker(order);
        let production = crate::poly::build_boubaker(order);
        if first_mismatch_order.is_none() && naive != production.coeffs() {
            first_mismatch_order = Some(order);
        }
        const_sum += &naive[0];
        // B'(0) is the linear coefficient.
        deriv_sum += &naive[1];
        if const_sum != BigInt::from(-2 * k as i64) {
            constant_sums_ok = false;
        }
        if !deriv_sum.is_zero() {
            derivative_sums_ok = false;
        }
    }

    OracleReport {
        k_max,
        coeffs_match: first_mismatch_order.is_none(),
        first_mismatch_order,
        constant_sums_ok,
        derivative_sums_ok,
    }
}

/// Results of the convergence sweep over increasing N0.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub n0_values: Vec<usize>,
    /// Achieved Omega per N0 (NaN where that N0 failed).
    pub omegas: Vec<f64>,
    /// Sup-norm density deltas between consecutive N0 runs.
    pub sup_norm_deltas: Vec<f64>,
    /// First N0 from which every following delta stays under `threshold`.
    pub converged_at: Option<usize>,
    pub threshold: f64,
    /// Per-N0 failures, if any.
    pub failures: Vec<(usize, String)>,
}

/// Runs the full pipeline at every N0 in the strictly increasing list and
/// measures sup-norm deltas of the normalized density between consecutive
/// runs on a shared grid.
pub fn convergence_sweep(
    n0_list: &[usize],
    params: &PhysicalParams,
    base: &PipelineConfig,
    threshold: f64,
) -> Result<ConvergenceReport> {
    if n0_list.len() < 2 {
        return Err(Error::InvalidConfig(
            "convergence sweep needs at least two N0 values".into(),
        ));
    }
    if n0_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "N0 list must be strictly increasing".into(),
        ));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidConfig("threshold must be positive".into()));
    }

    let mut omegas = Vec::with_capacity(n0_list.len());
    let mut densities: Vec<Option<Vec<f64>>> = Vec::with_capacity(n0_list.len());
    let mut failures = Vec::new();
    for &n0 in n0_list {
        let mut cfg = base.clone();
        cfg.n0 = n0;
        cfg.normalize = true;
        match run_pipeline(params, &cfg) {
            Ok(out) => {
                omegas.push(out.coeffs.omega);
                densities.push(Some(out.field.density_data().to_vec()));
            }
            Err(e) => {
                let wrapped = Error::PipelineStage {
                    n0,
                    source: Box::new(e),
                };
                failures.push((n0, wrapped.to_string()));
                omegas.push(f64::NAN);
                densities.push(None);
            }
        }
    }

    let sup_norm_deltas: Vec<f64> = densities
        .windows(2)
        .map(|pair| match (&pair[0], &pair[1]) {
            (Some(a), Some(b)) => a
                .iter()
                .zip(b)
                .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())),
            _ => f64::NAN,
        })
        .collect();

    let mut converged_at = None;
    for i in 0..sup_norm_deltas.len() {
        if sup_norm_deltas[i..]
            .iter()
            .all(|d| d.is_finite() && *d < threshold)
        {
            converged_at = Some(n0_list[i]);
            break;
        }
    }

    Ok(ConvergenceReport {
        n0_values: n0_list.to_vec(),
        omegas,
        sup_norm_deltas,
        converged_at,
        threshold,
        failures,
    })
}

/// f(theta) against u e^{-theta} at a point, for the definitional identity.
pub fn profile_identity_gap(
    x: f64,
    t: f64,
    coeffs: &CoefficientSet,
    basis: &BoubakerBasis,
    params: &PhysicalParams,
) -> f64 {
    let field = crate::model::reconstruct(coeffs, basis, params, &[x], &[t])
        .expect("point inside the domain");
    let u = field.u(0, 0);
    let theta = crate::model::wave_variable(x, t, params);
    let lhs = u * (-theta).exp();
    let rhs = eval_profile_f(theta, basis, coeffs);
    (lhs - rhs).norm() / rhs.norm().max(1e-30)
}

/// Maximum |H_n - B'_{4n}(mu_n)| / |B'_{4n}(mu_n)| over n = 1..=n_max.
pub fn h_vs_derivative_max_rel(n_max: usize, basis: &BoubakerBasis) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 1..=n_max {
        let h = crate::poly::subnorm_h(n, basis.roots())?;
        let d = basis.eval_d1_real(n, basis.roots().mu(n));
        let rel = (h - d).abs() / d.abs().max(1e-30);
        worst = worst.max(rel);
    }
    Ok(worst)
}
