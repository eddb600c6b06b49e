//! Physical parameters, the traveling-wave variable, and reconstruction of
//! the complex field u(x, t) and its probability density on the well domain
//! [0, R] x [0, t_m].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::BoubakerBasis;
use crate::solver::CoefficientSet;

/// Physical parameters of the well problem.
///
/// The nonlinearity exponents are fixed to the worked case n = 2, m = 3;
/// other values are rejected at construction. `coupling` is the model
/// equation's nonlinear coefficient, carried for bookkeeping only — the
/// potential vanishes inside the well, so it never enters the linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    hbar: f64,
    mass: f64,
    momentum: f64,
    energy: f64,
    radius: f64,
    coupling: f64,
    exp_n: u32,
    exp_m: u32,
}

impl Default for PhysicalParams {
    /// Natural units: hbar = mass = p = E = R = 1.
    fn default() -> Self {
        PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            momentum: 1.0,
            energy: 1.0,
            radius: 1.0,
            coupling: 1.0,
            exp_n: 2,
            exp_m: 3,
        }
    }
}

impl PhysicalParams {
    pub fn new(
        hbar: f64,
        mass: f64,
        momentum: f64,
        energy: f64,
        radius: f64,
        coupling: f64,
    ) -> Result<Self> {
        let params = PhysicalParams {
            hbar,
            mass,
            momentum,
            energy,
            radius,
            coupling,
            exp_n: 2,
            exp_m: 3,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.hbar > 0.0, "hbar must be > 0"),
            (self.mass > 0.0, "mass must be > 0"),
            (self.energy > 0.0, "energy must be > 0"),
            (self.radius > 0.0, "radius must be > 0"),
            (self.momentum != 0.0, "momentum must be nonzero"),
            (self.hbar.is_finite(), "hbar must be finite"),
            (self.mass.is_finite(), "mass must be finite"),
            (self.momentum.is_finite(), "momentum must be finite"),
            (self.energy.is_finite(), "energy must be finite"),
            (self.radius.is_finite(), "radius must be finite"),
            (self.coupling.is_finite(), "coupling must be finite"),
            (self.exp_n == 2, "nonlinearity exponent n must be 2"),
            (self.exp_m == 3, "nonlinearity exponent m must be 3"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidConfig(msg.into()));
            }
        }
        Ok(())
    }

    /// Rejects any exponent pair other than (2, 3).
    pub fn with_exponents(mut self, n: u32, m: u32) -> Result<Self> {
        self.exp_n = n;
        self.exp_m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn momentum(&self) -> f64 {
        self.momentum
    }
    pub fn energy(&self) -> f64 {
        self.energy
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn coupling(&self) -> f64 {
        self.coupling
    }
    pub fn exp_n(&self) -> u32 {
        self.exp_n
    }
    pub fn exp_m(&self) -> u32 {
        self.exp_m
    }
}

/// Well potential classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Zero,
    Infinite,
}

/// V(r): zero inside the well, infinite outside. The wall r = R belongs to
/// the infinite region, so the field vanishes there exactly.
pub fn potential(r: f64, params: &PhysicalParams) -> Potential {
    assert!(r >= 0.0, "radial coordinate must be nonnegative");
    if r < params.radius {
        Potential::Zero
    } else {
        Potential::Infinite
    }
}

/// The traveling-wave variable theta = (i p / hbar)(E t - x).
///
/// Purely imaginary for real (x, t): the real part is exactly zero.
pub fn wave_variable(x: f64, t: f64, params: &PhysicalParams) -> Complex64 {
    Complex64::new(0.0, params.momentum / params.hbar * (params.energy * t - x))
}

/// Time-domain extent t_m = 2 pi hbar / E of the reconstructed solution.
pub fn t_max(params: &PhysicalParams) -> f64 {
    2.0 * std::f64::consts::PI * params.hbar / params.energy
}

/// Phase factor exp(-(i/hbar)(p x - E t)); unimodular for real inputs.
pub fn phase_factor(x: f64, t: f64, params: &PhysicalParams) -> Complex64 {
    let phi = (params.momentum * x - params.energy * t) / params.hbar;
    Complex64::from_polar(1.0, -phi)
}

/// The expansion profile f(theta) = (1/2N0) sum_k xi_k B_{4k}(theta mu_k),
/// scaled by the coefficient set's normalization factor.
pub fn eval_profile_f(
    theta: Complex64,
    basis: &BoubakerBasis,
    coeffs: &CoefficientSet,
) -> Complex64 {
    let n0 = basis.n0();
    debug_assert_eq!(coeffs.xi.len(), n0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n0 {
        acc += coeffs.xi[k - 1] * basis.eval(k, theta * basis.roots().mu(k));
    }
    acc * (coeffs.scale / (2.0 * n0 as f64))
}

/// Complex field values and probability density on an (x, t) grid.
#[derive(Debug, Clone)]
pub struct SolutionField {
    x_grid: Vec<f64>,
    t_grid: Vec<f64>,
    u: Vec<Complex64>,
    density: Vec<f64>,
    radius: f64,
}

impl SolutionField {
    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    /// u at grid indices (i, j) = (x index, t index).
    pub fn u(&self, i: usize, j: usize) -> Complex64 {
        self.u[i * self.t_grid.len() + j]
    }

    /// |u|^2 at grid indices (i, j).
    pub fn density(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.t_grid.len() + j]
    }

    /// Row-major (x-major) field data.
    pub fn u_data(&self) -> &[Complex64] {
        &self.u
    }

    /// Row-major (x-major) density data.
    pub fn density_data(&self) -> &[f64] {
        &self.density
    }

    /// Probability density at an arbitrary point: exactly zero outside
    /// [0, R], the nearest grid sample inside.
    pub fn density_at(&self, x: f64, t: f64) -> f64 {
        if x < 0.0 || x > self.radius {
            return 0.0;
        }
        let i = nearest_index(&self.x_grid, x);
        let j = nearest_index(&self.t_grid, t);
        self.density(i, j)
    }

    /// Rescales u by s (and the density by s^2) in place.
    pub fn rescale(&mut self, s: f64) {
        for v in &mut self.u {
            *v *= s;
        }
        for d in &mut self.density {
            *d *= s * s;
        }
    }
}

fn nearest_index(grid: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        let d = (g - v).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Reconstructs the solution field
///
/// ```text
/// u(x, t) = scale/(2 N0) * sum_k xi_k B_{4k}((i/hbar)(p x - E t) mu_k)
///           * exp(-(i/hbar)(p x - E t))
/// ```
///
/// on the given grids, which must lie within [0, R] x [0, t_m].
pub fn reconstruct(
    coeffs: &CoefficientSet,
    basis: &BoubakerBasis,
    params: &PhysicalParams,
    x_grid: &[f64],
    t_grid: &[f64],
) -> Result<SolutionField> {
    let n0 = basis.n0();
    if coeffs.xi.len() != n0 {
        return Err(Error::InvalidConfig(format!(
            "coefficient set has {} entries but the basis has N0 = {n0}",
            coeffs.xi.len()
        )));
    }
    let tm = t_max(params);
    for &x in x_grid {
        if !(0.0..=params.radius).contains(&x) {
            return Err(Error::GridOutOfDomain {
                axis: "x",
                value: x,
                lo: 0.0,
                hi: params.radius,
            });
        }
    }
    for &t in t_grid {
        if !(0.0..=tm).contains(&t) {
            return Err(Error::GridOutOfDomain {
                axis: "t",
                value: t,
                lo: 0.0,
                hi: tm,
            });
        }
    }

    let nt = t_grid.len();
    let prefactor = coeffs.scale / (2.0 * n0 as f64);
    let mus: Vec<f64> = (1..=n0).map(|k| basis.roots().mu(k)).collect();
    let mus = &mus[..];

    let u: Vec<Complex64> = x_grid
        .par_iter()
        .flat_map_iter(|&x| {
            t_grid.iter().map(move |&t| {
                let phi = (params.momentum * x - params.energy * t) / params.hbar;
                let z = Complex64::new(0.0, phi);
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 1..=n0 {
                    acc += coeffs.xi[k - 1] * basis.eval(k, z * mus[k - 1]);
                }
                acc * prefactor * Complex64::from_polar(1.0, -phi)
            })
        })
        .collect();
    let density: Vec<f64> = u.iter().map(|v| v.norm_sqr()).collect();

    debug_assert_eq!(u.len(), x_grid.len() * nt);
    Ok(SolutionField {
        x_grid: x_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        u,
        density,
        radius: params.radius,
    })
}

/// Rescales the field so the trapezoidal integral of |u(x, 0)|^2 over the
/// x grid equals one; returns the applied scale factor.
pub fn normalize_probability(field: &mut SolutionField) -> Result<f64> {
    let integral = density_integral_at_t0(field);
    if !(integral > 0.0) || !integral.is_finite() {
        return Err(Error::ZeroField);
    }
    let s = 1.0 / integral.sqrt();
    field.rescale(s);
    Ok(s)
}

/// Trapezoidal integral of the first time slice of the density over the
/// x grid.
pub fn density_integral_at_t0(field: &SolutionField) -> f64 {
    let xs = field.x_grid();
    let mut total = 0.0;
    for i in 1..xs.len() {
        let dx = xs[i] - xs[i - 1];
        total += 0.5 * dx * (field.density(i, 0) + field.density(i - 1, 0));
    }
    total
}

/// n evenly spaced points from a to b inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}
