//! Boubaker polynomial construction, evaluation, and root isolation.
//!
//! The family is generated by the three-term recurrence
//!
//! ```text
//! B_0(x) = 1,  B_1(x) = x,  B_2(x) = x^2 + 2,
//! B_m(x) = x * B_{m-1}(x) - B_{m-2}(x)   for m >= 3,
//! ```
//!
//! which makes every B_m monic for m >= 1 and yields the order-4k boundary
//! identities B_{4k}(0) = -2, B'_{4k}(0) = 0 that the expansion scheme
//! exploits. Coefficients are kept as exact arbitrary-precision integers so
//! those identities are testable as equalities; evaluation converts to
//! floating point at the call site.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact-integer coefficient vector of one polynomial, ascending power.
///
/// `order` is the recurrence index m for constructed Boubaker polynomials
/// and the degree for derived ones (derivatives).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCoeffs {
    order: usize,
    coeffs: Vec<BigInt>,
}

/// Builds the order-m Boubaker polynomial with exact integer coefficients.
///
/// Overflow is impossible: arithmetic is arbitrary precision throughout.
pub fn build_boubaker(order: usize) -> PolyCoeffs {
    let coeffs = match order {
        0 => vec![BigInt::one()],
        1 => vec![BigInt::zero(), BigInt::one()],
        2 => vec![BigInt::from(2), BigInt::zero(), BigInt::one()],
        _ => {
            let mut prev: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
            let mut cur: Vec<BigInt> = vec![BigInt::from(2), BigInt::zero(), BigInt::one()];
            for m in 3..=order {
                let mut next = Vec::with_capacity(m + 1);
                next.push(BigInt::zero());
                next.extend(cur.iter().cloned()); // x * B_{m-1}
                for (i, c) in prev.iter().enumerate() {
                    next[i] -= c;
                }
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        }
    };
    debug_assert!(order == 0 || coeffs.last().map(|c| c.is_one()) == Some(true));
    PolyCoeffs { order, coeffs }
}

impl PolyCoeffs {
    /// Recurrence index (degree, for derivative results).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Exact coefficients, ascending power.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of x^i, or zero past the end.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Constant term (the value at x = 0, exactly).
    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// Degree of the stored coefficient vector.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True iff every coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficients rounded to f64, ascending power.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Horner evaluation at a complex point.
    ///
    /// Real inputs produce results with exactly zero imaginary part.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner_complex(&self.to_f64_coeffs(), z)
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, x: f64) -> f64 {
        horner_real(&self.to_f64_coeffs(), x)
    }

    /// Exact term-by-term power-rule derivative.
    ///
    /// Constants map to the zero polynomial.
    pub fn derivative(&self) -> PolyCoeffs {
        if self.coeffs.len() <= 1 {
            return PolyCoeffs {
                order: 0,
                coeffs: vec![BigInt::zero()],
            };
        }
        let coeffs: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        PolyCoeffs {
            order: self.order.saturating_sub(1),
            coeffs,
        }
    }

    /// Derivative applied twice, exact.
    pub fn second_derivative(&self) -> PolyCoeffs {
        self.derivative().derivative()
    }

    /// Cauchy upper bound on root magnitude: 1 + max|c_i| / |c_lead|.
    pub fn cauchy_root_bound(&self) -> f64 {
        let lead = match self.coeffs.iter().rposition(|c| !c.is_zero()) {
            Some(i) => &self.coeffs[i],
            None => return 0.0,
        };
        let max_abs = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .expect("non-empty coefficient vector");
        let ratio = (max_abs.to_f64().unwrap_or(f64::INFINITY))
            / (lead.abs().to_f64().unwrap_or(f64::INFINITY));
        1.0 + ratio
    }

    /// Smallest positive real root, certified minimal by a sign-change scan
    /// from the origin (initial step 1e-3) followed by bisection to `tol`
    /// and a bracketed Newton polish.
    ///
    /// A root exactly at x = 0 does not count as positive. Returns
    /// [`Error::NoPositiveRoot`] when the scan reaches the Cauchy bound
    /// without a sign change.
    pub fn minimal_positive_root(&self, tol: f64) -> Result<f64> {
        let coeffs = self.to_f64_coeffs();
        let deriv = self.derivative().to_f64_coeffs();
        let bound = self.cauchy_root_bound();
        let f = |x: f64| horner_real(&coeffs, x);
        let df = |x: f64| horner_real(&deriv, x);

        let mut step = 1e-3;
        let mut x_prev = 0.0_f64;
        let mut f_prev = f(0.0);
        loop {
            if x_prev >= bound || !x_prev.is_finite() {
                return Err(Error::NoPositiveRoot { order: self.order });
            }
            let x = x_prev + step;
            let fx = f(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if f_prev != 0.0 && fx.signum() != f_prev.signum() {
                return Ok(refine_root(&f, &df, x_prev, x, tol));
            }
            if f_prev == 0.0 {
                // Root at the left edge (e.g. the origin): take the sign of
                // the first nonzero sample instead.
                f_prev = fx;
            } else {
                f_prev = fx;
            }
            x_prev = x;
            // Past the oscillatory band the step may coarsen; bisection
            // re-localizes whatever bracket the scan produces.
            if x_prev > 4.0 {
                step *= 1.5;
            }
        }
    }
}

/// Bisect `[a, b]` (which brackets a sign change) down to width `tol`,
/// then polish with Newton steps constrained to the bracket.
fn refine_root<F, D>(f: &F, df: &D, mut a: f64, mut b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fa = f(a);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f(x) / d;
        if !(a..=b).contains(&next) {
            break;
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Certifies that `poly` has no sign change on (0, mu) using a uniform
/// grid of `samples` points.
pub fn certify_minimal(poly: &PolyCoeffs, mu: f64, samples: usize) -> bool {
    let coeffs = poly.to_f64_coeffs();
    let mut prev = horner_real(&coeffs, 0.0);
    for i in 1..=samples {
        let x = mu * i as f64 / (samples + 1) as f64;
        let v = horner_real(&coeffs, x);
        if prev != 0.0 && v != 0.0 && v.signum() != prev.signum() {
            return false;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    true
}

/// Minimal positive roots mu_k of B_{4k} for k = 1..=n0.
#[derive(Debug, Clone)]
pub struct RootTable {
    mus: Vec<f64>,
    residuals: Vec<f64>,
    tol: f64,
}

impl RootTable {
    /// Finds mu_k for k = 1..=n0, each to x-tolerance `x_tol`.
    pub fn build(n0: usize, x_tol: f64) -> Result<Self> {
        if n0 < 1 {
            return Err(Error::InvalidConfig("root table requires n0 >= 1".into()));
        }
        let mut mus = Vec::with_capacity(n0);
        let mut residuals = Vec::with_capacity(n0);
        for k in 1..=n0 {
            let poly = build_boubaker(4 * k);
            let mu = poly.minimal_positive_root(x_tol)?;
            mus.push(mu);
            residuals.push(poly.eval_real(mu).abs());
        }
        let tol = residuals.iter().cloned().fold(0.0, f64::max);
        Ok(RootTable {
            mus,
            residuals,
            tol,
        })
    }

    /// Number of entries (the table's N0).
    pub fn n0(&self) -> usize {
        self.mus.len()
    }

    /// mu_k for k in 1..=n0.
    pub fn mu(&self, k: usize) -> f64 {
        self.mus[k - 1]
    }

    /// |B_{4k}(mu_k)| actually achieved for k in 1..=n0.
    pub fn residual(&self, k: usize) -> f64 {
        self.residuals[k - 1]
    }

    /// All roots in k order.
    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// Largest achieved residual |B_{4k}(mu_k)| over the table.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Re-runs the minimality certification for every entry.
    pub fn certify_minimality(&self, samples: usize) -> bool {
        self.mus
            .iter()
            .enumerate()
            .all(|(i, &mu)| certify_minimal(&build_boubaker(4 * (i + 1)), mu, samples))
    }

    /// Test hook: shifts mu_k by `delta` so downstream checks can observe
    /// a corrupted table.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, k: usize, delta: f64) {
        self.mus[k - 1] += delta;
        self.residuals[k - 1] = build_boubaker(4 * k).eval_real(self.mus[k - 1]).abs();
        self.tol = self.residuals.iter().cloned().fold(0.0, f64::max);
    }
}

/// Subnormalization constant H_n from the closed formula
///
/// ```text
/// H_n = 4 mu_n (2 - mu_n^2) [sum_{q=1..n} B_{4q}^2(mu_n)] / B_{4(n+1)}(mu_n) + 4 mu_n^3.
/// ```
///
/// The q = n term of the sum vanishes by definition of mu_n, so H_1 reduces
/// to 4 mu_1^3 exactly.
pub fn subnorm_h(n: usize, roots: &RootTable) -> Result<f64> {
    if n < 1 || n > roots.n0() {
        return Err(Error::InvalidConfig(format!(
            "subnorm_h: n = {n} outside root table range 1..={}",
            roots.n0()
        )));
    }
    let mu = roots.mu(n);
    let mut sq_sum = 0.0;
    for q in 1..=n {
        let v = build_boubaker(4 * q).eval_real(mu);
        sq_sum += v * v;
    }
    let den = build_boubaker(4 * (n + 1)).eval_real(mu);
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator { n, value: den });
    }
    Ok(4.0 * mu * (2.0 - mu * mu) * sq_sum / den + 4.0 * mu.powi(3))
}

/// The expansion basis: B_{4k} for k = 1..=n0 together with their minimal
/// positive roots and cached f64 coefficient tables for the hot paths.
#[derive(Debug, Clone)]
pub struct BoubakerBasis {
    n0: usize,
    polys: Vec<PolyCoeffs>,
    coeffs: Vec<Vec<f64>>,
    d1_coeffs: Vec<Vec<f64>>,
    d2_coeffs: Vec<Vec<f64>>,
    roots: RootTable,
}

impl BoubakerBasis {
    /// Builds B_{4k} and mu_k for k = 1..=n0.
    pub fn build(n0: usize, root_x_tol: f64) -> Result<Self> {
        let roots = RootTable::build(n0, root_x_tol)?;
        let polys: Vec<PolyCoeffs> = (1..=n0).map(|k| build_boubaker(4 * k)).collect();
        let coeffs = polys.iter().map(|p| p.to_f64_coeffs()).collect();
        let d1_coeffs = polys
            .iter()
            .map(|p| p.derivative().to_f64_coeffs())
            .collect();
        let d2_coeffs = polys
            .iter()
            .map(|p| p.second_derivative().to_f64_coeffs())
            .collect();
        Ok(BoubakerBasis {
            n0,
            polys,
            coeffs,
            d1_coeffs,
            d2_coeffs,
            roots,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn roots(&self) -> &RootTable {
        &self.roots
    }

    /// The exact polynomial B_{4k}, k in 1..=n0.
    pub fn poly(&self, k: usize) -> &PolyCoeffs {
        &self.polys[k - 1]
    }

    /// B_{4k}(z).
    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        horner_complex(&self.coeffs[k - 1], z)
    }

    /// B_{4k}(x) for real x.
    pub fn eval_real(&self, k: usize, x: f64) -> f64 {
        horner_real(&self.coeffs[k - 1], x)
    }

    /// dB_{4k}/dx at real x.
    pub fn eval_d1_real(&self, k: usize, x: f64) -> f64 {
        horner_real(&self.d1_coeffs[k - 1], x)
    }

    /// d^2 B_{4k}/dx^2 at z.
    pub fn eval_d2(&self, k: usize, z: Complex64) -> Complex64 {
        horner_complex(&self.d2_coeffs[k - 1], z)
    }

    /// d^2 B_{4k}/dx^2 at real x.
    pub fn eval_d2_real(&self, k: usize, x: f64) -> f64 {
        horner_real(&self.d2_coeffs[k - 1], x)
    }

    /// Test hook: see [`RootTable::corrupt_entry`].
    #[doc(hidden)]
    pub fn corrupt_root(&mut self, k: usize, delta: f64) {
        self.roots.corrupt_entry(k, delta);
    }
}

pub(crate) fn horner_real(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc *= z;
        acc.re += c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_i64(poly: &PolyCoeffs) -> Vec<i64> {
        poly.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn base_cases() {
        assert_eq!(as_i64(&build_boubaker(0)), vec![1]);
        assert_eq!(as_i64(&build_boubaker(1)), vec![0, 1]);
        assert_eq!(as_i64(&build_boubaker(2)), vec![2, 0, 1]);
    }

    #[test]
    fn b4_is_x4_minus_2() {
        // Hand expansion: B_3 = x^3 + x, B_4 = x*B_3 - B_2 = x^4 - 2.
        assert_eq!(as_i64(&build_boubaker(3)), vec![0, 1, 0, 1]);
        assert_eq!(as_i64(&build_boubaker(4)), vec![-2, 0, 0, 0, 1]);
    }

    #[test]
    fn b8_hand_expansion() {
        // B_5 = x^5 - x^3 - 3x, B_6 = x^6 - 2x^4 - 3x^2 + 2,
        // B_7 = x^7 - 3x^5 - 2x^3 + 5x, B_8 = x^8 - 4x^6 + 8x^2 - 2.
        assert_eq!(
            as_i64(&build_boubaker(8)),
            vec![-2, 0, 8, 0, 0, 0, -4, 0, 1]
        );
    }

    #[test]
    fn order_4k_constant_term_is_minus_two() {
        for k in 1..=20 {
            let b = build_boubaker(4 * k);
            assert_eq!(b.constant_term(), &BigInt::from(-2), "k = {k}");
            assert!(b.coeffs().last().unwrap().is_one(), "monic, k = {k}");
        }
    }

    #[test]
    fn eval_examples() {
        let b4 = build_boubaker(4);
        assert_eq!(b4.eval(Complex64::new(0.0, 0.0)), Complex64::new(-2.0, 0.0));
        let b0 = build_boubaker(0);
        for z in [Complex64::new(3.5, -1.25), Complex64::new(0.0, 7.0)] {
            assert_eq!(b0.eval(z), Complex64::new(1.0, 0.0));
        }
        // B_4(i) = i^4 - 2 = -1
        let v = b4.eval(Complex64::new(0.0, 1.0));
        assert!((v.re + 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn real_inputs_have_exact_zero_imaginary_part() {
        let b12 = build_boubaker(12);
        let v = b12.eval(Complex64::new(1.37, 0.0));
        assert_eq!(v.im, 0.0);
        assert_eq!(v.re, b12.eval_real(1.37));
    }

    #[test]
    fn derivative_examples() {
        let b4 = build_boubaker(4);
        assert_eq!(as_i64(&b4.derivative()), vec![0, 0, 0, 4]);
        assert_eq!(b4.derivative().eval_real(0.0), 0.0);
        assert_eq!(as_i64(&b4.second_derivative()), vec![0, 0, 12]);
        assert_eq!(b4.second_derivative().eval_real(1.0), 12.0);
        assert!(build_boubaker(0).derivative().is_zero());
        assert!(build_boubaker(1).second_derivative().is_zero());
    }

    #[test]
    fn derivative_at_zero_vanishes_for_order_4k() {
        for k in 1..=20 {
            let d = build_boubaker(4 * k).derivative();
            assert!(d.constant_term().is_zero(), "k = {k}");
        }
    }

    #[test]
    fn minimal_root_of_b4_is_fourth_root_of_two() {
        let mu = build_boubaker(4).minimal_positive_root(1e-12).unwrap();
        assert!((mu - 2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn minimal_root_of_b8_certified_by_fine_scan() {
        let b8 = build_boubaker(8);
        let mu = b8.minimal_positive_root(1e-12).unwrap();
        assert!(b8.eval_real(mu).abs() <= 1e-10);
        // Independent oracle: fine-grid sign scan over (0, mu).
        let coeffs = b8.to_f64_coeffs();
        let mut prev = horner_real(&coeffs, 1e-9);
        for i in 1..100_000 {
            let x = mu * i as f64 / 100_000.0;
            let v = horner_real(&coeffs, x);
            assert!(
                v.signum() == prev.signum() || v == 0.0,
                "sign change before mu at x = {x}"
            );
            prev = v;
        }
    }

    #[test]
    fn b1_has_no_positive_root() {
        let err = build_boubaker(1).minimal_positive_root(1e-12).unwrap_err();
        assert_eq!(err, Error::NoPositiveRoot { order: 1 });
    }

    #[test]
    fn b2_has_no_real_root() {
        // B_2 = x^2 + 2 is positive everywhere.
        let err = build_boubaker(2).minimal_positive_root(1e-12).unwrap_err();
        assert_eq!(err, Error::NoPositiveRoot { order: 2 });
    }

    #[test]
    fn root_table_and_residuals() {
        let table = RootTable::build(6, 1e-12).unwrap();
        assert_eq!(table.n0(), 6);
        for k in 1..=6 {
            assert!(table.mu(k) > 0.0);
            assert!(table.residual(k) <= 1e-10, "k = {k}");
        }
        assert!(table.certify_minimality(10_000));
    }

    #[test]
    fn roots_shrink_in_k() {
        // The first positive root moves toward the origin as the order grows.
        let table = RootTable::build(8, 1e-12).unwrap();
        for k in 2..=8 {
            assert!(table.mu(k) < table.mu(k - 1), "k = {k}");
        }
    }

    #[test]
    fn subnorm_h1_is_4_mu_cubed() {
        let table = RootTable::build(2, 1e-12).unwrap();
        let h1 = subnorm_h(1, &table).unwrap();
        assert!((h1 - 4.0 * 2f64.powf(0.75)).abs() < 1e-10);
        // Against the derivative route: B'_4(mu_1) = 4 mu_1^3, same number.
        let d = build_boubaker(4).derivative().eval_real(table.mu(1));
        assert!((h1 - d).abs() < 1e-10);
    }

    #[test]
    fn subnorm_h_out_of_range() {
        let table = RootTable::build(2, 1e-12).unwrap();
        assert!(matches!(subnorm_h(3, &table), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn basis_eval_matches_poly_eval() {
        let basis = BoubakerBasis::build(4, 1e-12).unwrap();
        let z = Complex64::new(0.3, -0.7);
        for k in 1..=4 {
            let direct = build_boubaker(4 * k).eval(z);
            let cached = basis.eval(k, z);
            assert!((direct - cached).norm() < 1e-12);
        }
    }

    #[test]
    fn corrupt_entry_updates_residual() {
        let mut table = RootTable::build(2, 1e-12).unwrap();
        let before = table.residual(1);
        table.corrupt_entry(1, 1e-3);
        assert!(table.residual(1) > before.max(1e-6));
    }
}
