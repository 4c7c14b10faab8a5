//! Kempf's distortion function `T_m` from the kernel series.
//!
//! On `T*S^n \ 0` the diagonal of the weighted kernel reduces to
//!
//! ```text
//! T_1(ξ) = 2^{n-1} e^{-ξ} Σ_j (j+n-2)!/(2j+n-2)! · ξ^{2j}/j!,     T_m(ρ) = m^n T_1(mρ).
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::tyz::GeneratingFunction;
use crate::Rational;

/// Smallest admissible radius `ρ = |x|`.
pub const RHO_CUTOFF: f64 = 1e-6;

/// Above this `ξ` the series is not summed; the closed form takes over.
pub const SERIES_XI_LIMIT: f64 = 300.0;

/// Default relative truncation tolerance of the series.
pub const DEFAULT_TOL: f64 = 1e-17;

const MAX_SERIES_TERMS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeplerParams {
    n: u32,
}

impl KeplerParams {
    pub fn new(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(KeplerParams { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    rho: f64,
    m: u32,
}

impl EvalPoint {
    pub fn new(m: u32, rho: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::Quantization(m));
        }
        if !rho.is_finite() || rho < RHO_CUTOFF {
            return Err(Error::RadiusCutoff {
                rho,
                cutoff: RHO_CUTOFF,
            });
        }
        Ok(EvalPoint { rho, m })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn xi(&self) -> f64 {
        self.m as f64 * self.rho
    }
}

pub(crate) fn check_n(n: u32) -> Result<()> {
    if n < 3 {
        Err(Error::Dimension(n))
    } else {
        Ok(())
    }
}

/// `T_1(ξ)` and how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of series terms summed (0 when substituted).
    pub terms: usize,
    /// True when `ξ` exceeded the series limit and the closed form was used.
    pub substituted: bool,
}

/// Ratio `t_{j+1}/t_j` of consecutive series terms (without the `2^{n-1}e^{-ξ}` prefactor).
pub fn term_ratio(n: u32, j: usize, xi: f64) -> f64 {
    let (j, n) = (j as f64, n as f64);
    (j + n - 1.0) * xi * xi / ((2.0 * j + n - 1.0) * (2.0 * j + n) * (j + 1.0))
}

/// Sums the kernel series for `T_1(ξ)`.
///
/// Terms rise until about `j = ξ/2` and then fall; summation stops only past
/// that peak, once the geometric bound on the omitted tail drops below
/// `tol/2` of the partial sum. The ratio `t_{j+1}/t_j` decreases in `j`, so
/// the bound is rigorous.
pub fn t1_series(n: u32, xi: f64, tol: f64) -> Result<SeriesValue> {
    check_n(n)?;
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::InvalidArgument(format!("xi must be finite and >= 0, got {xi}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if xi > SERIES_XI_LIMIT {
        let f = GeneratingFunction::cached(n)?;
        return Ok(SeriesValue {
            value: 2.0 * f.value(xi)?,
            terms: 0,
            substituted: true,
        });
    }
    let mut acc = NeumaierSum::new();
    let mut term = 1.0f64;
    let mut j = 0usize;
    loop {
        acc.add(term);
        let r = term_ratio(n, j, xi);
        let next = term * r;
        j += 1;
        if next == 0.0 {
            break;
        }
        if 2.0 * j as f64 > xi && r < 1.0 && next / (1.0 - r) < 0.5 * tol * acc.value() {
            break;
        }
        if j >= MAX_SERIES_TERMS {
            return Err(Error::Consistency(format!(
                "series for xi = {xi} did not converge in {MAX_SERIES_TERMS} terms"
            )));
        }
        term = next;
    }
    let value = 2f64.powi(n as i32 - 1) * (-xi).exp() * acc.value();
    Ok(SeriesValue {
        value,
        terms: j,
        substituted: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Closed,
}

/// `T_m(ρ)` by the requested method.
pub fn tm(n: u32, m: u32, rho: f64, method: Method) -> Result<f64> {
    check_n(n)?;
    let pt = EvalPoint::new(m, rho)?;
    let xi = pt.xi();
    let scale = (m as f64).powi(n as i32);
    match method {
        Method::Series => {
            if xi > SERIES_XI_LIMIT {
                return Err(Error::SeriesRange {
                    xi,
                    limit: SERIES_XI_LIMIT,
                });
            }
            Ok(scale * t1_series(n, xi, DEFAULT_TOL)?.value)
        }
        Method::Closed => Ok(2.0 * scale * GeneratingFunction::cached(n)?.value(xi)?),
    }
}

/// `|T_m(ρ) − m^n T_1(mρ)| / T_m(ρ)`, with the left side from the closed form
/// and `T_1` from the series, so the identity is checked across methods.
pub fn scaling_residual(n: u32, m: u32, rho: f64) -> Result<f64> {
    let lhs = tm(n, m, rho, Method::Closed)?;
    if m == 1 {
        // Both sides are literally T_1(ρ).
        return Ok(0.0);
    }
    let xi = m as f64 * rho;
    let rhs = (m as f64).powi(n as i32) * t1_series(n, xi, DEFAULT_TOL)?.value;
    Ok((lhs - rhs).abs() / lhs)
}

/// The cosh baseline `T⁰_m = m^n e^{-ξ} cosh ξ = m^n (1 + e^{-2ξ})/2`.
pub fn cosh_baseline(n: u32, m: u32, rho: f64) -> Result<f64> {
    check_n(n)?;
    let pt = EvalPoint::new(m, rho)?;
    Ok((m as f64).powi(n as i32) * 0.5 * (1.0 + (-2.0 * pt.xi()).exp()))
}

/// Exact `1 + τ_j = Π_{i=1}^{n-2} (j+i)/(j+i/2)`.
pub fn one_plus_tau(n: u32, j: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 1..=(n as i64 - 2) {
        let j = j as i64;
        acc *= Rational::new(BigInt::from(2 * (j + i)), BigInt::from(2 * j + i));
    }
    acc
}

/// `τ_j` as a float.
pub fn tau(n: u32, j: usize) -> f64 {
    let (j, mut acc) = (j as f64, 1.0f64);
    for i in 1..=(n as i32 - 2) {
        let i = i as f64;
        acc *= (j + i) / (j + 0.5 * i);
    }
    acc - 1.0
}

/// `e^{-ξ} Σ_j (1+τ_j) ξ^{2j}/(2j)!`, the cosh-perturbation form of the series.
///
/// Multiplying by `2 m^n` reproduces `T_m`.
pub fn tau_form_sum(n: u32, xi: f64, tol: f64) -> Result<f64> {
    check_n(n)?;
    if xi > SERIES_XI_LIMIT || !(xi >= 0.0) {
        return Err(Error::SeriesRange {
            xi,
            limit: SERIES_XI_LIMIT,
        });
    }
    let mut acc = NeumaierSum::new();
    let mut power = 1.0f64; // ξ^{2j}/(2j)!
    let mut j = 0usize;
    loop {
        let term = (1.0 + tau(n, j)) * power;
        acc.add(term);
        let jf = j as f64;
        power *= xi * xi / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        j += 1;
        if power == 0.0 || (2.0 * j as f64 > xi && power * 4.0 < tol * acc.value()) {
            break;
        }
        if j >= MAX_SERIES_TERMS {
            return Err(Error::Consistency("tau-form series did not converge".into()));
        }
    }
    Ok((-xi).exp() * acc.value())
}

/// `Σ_{j<terms} (j+n-2)!/(2j+n-2)! · ξ^{2j}/j!` summed in exact rationals.
///
/// Slow reference used to check the floating recurrence and the closed form.
pub fn series_sum_exact(n: u32, xi: &Rational, terms: usize) -> Rational {
    let mut acc = Rational::zero();
    let mut term = Rational::one();
    let xi2 = xi * xi;
    for j in 0..terms {
        acc += &term;
        let (jj, nn) = (j as i64, n as i64);
        term = term * &xi2 * Rational::new(
            BigInt::from(jj + nn - 1),
            BigInt::from((2 * jj + nn - 1) * (2 * jj + nn) * (jj + 1)),
        );
    }
    acc
}

/// Exact series term `(j+n-2)!/(2j+n-2)! · 1/j!` from factorials.
pub fn series_term_exact(n: u32, j: usize) -> Rational {
    let fact = |k: u64| -> BigInt { (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i)) };
    let (j, n) = (j as u64, n as u64);
    Rational::new(fact(j + n - 2), fact(2 * j + n - 2) * fact(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_diff;
    use crate::ratio;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn n3_closed(xi: f64) -> f64 {
        2.0 * (-xi).exp() * (xi.sinh() / xi + xi.cosh())
    }

    #[test]
    fn series_at_origin() {
        let v = t1_series(3, 0.0, 1e-14).unwrap();
        assert_eq!(v.value, 4.0);
        assert!(!v.substituted);
    }

    #[test]
    fn series_n3_at_two() {
        let v = t1_series(3, 2.0, 1e-14).unwrap().value;
        assert!(rel_diff(v, 1.509158) < 1e-6);
        assert!(rel_diff(v, n3_closed(2.0)) < 1e-14);
    }

    #[test]
    fn series_n4_matches_closed() {
        for xi in [0.5f64, 5.0, 50.0] {
            // T_1 for n=4 is 2 e^{-ξ}(cosh ξ + 3 sinh ξ/ξ).
            let closed = 2.0 * (-xi).exp() * (xi.cosh() + 3.0 * xi.sinh() / xi);
            let v = t1_series(4, xi, 1e-16).unwrap().value;
            assert!(rel_diff(v, closed) < 1e-12, "xi={xi}");
        }
    }

    #[test]
    fn n4_closed_form_against_exact_series() {
        // At ξ = 1/2, 40 exact terms are far past machine precision.
        let xi = ratio(1, 2);
        let s = series_sum_exact(4, &xi, 40).to_f64().unwrap();
        let x = 0.5f64;
        let expected = (x.cosh() + 3.0 * x.sinh() / x) / 4.0;
        assert!(rel_diff(s, expected) < 1e-15);
    }

    #[test]
    fn large_xi_is_substituted() {
        let v = t1_series(5, 400.0, 1e-14).unwrap();
        assert!(v.substituted);
        assert!(rel_diff(v.value, 1.0) < 0.1);
    }

    #[test]
    fn tm_examples() {
        let v = tm(3, 2, 1.0, Method::Closed).unwrap();
        assert!(rel_diff(v, 8.0 * n3_closed(2.0)) < 1e-14);
        assert!(rel_diff(v, 12.0733) < 1e-5);
        let a = tm(3, 1, 2.0, Method::Series).unwrap();
        let b = tm(3, 1, 2.0, Method::Closed).unwrap();
        assert!(rel_diff(a, b) < 1e-10);
        for n in 3..=8 {
            let big = tm(n, 3, 1e5, Method::Closed).unwrap();
            assert!(rel_diff(big / 3f64.powi(n as i32), 1.0) < 1e-3);
        }
    }

    #[test]
    fn tm_domain_errors() {
        assert!(matches!(tm(2, 1, 1.0, Method::Closed), Err(Error::Dimension(2))));
        assert!(matches!(tm(3, 0, 1.0, Method::Closed), Err(Error::Quantization(0))));
        assert!(matches!(
            tm(5, 1, 1e-9, Method::Closed),
            Err(Error::RadiusCutoff { .. })
        ));
        assert!(matches!(
            tm(4, 1000, 1.0, Method::Series),
            Err(Error::SeriesRange { .. })
        ));
    }

    #[test]
    fn scaling_examples() {
        assert!(scaling_residual(3, 5, 0.7).unwrap() <= 1e-12);
        assert_eq!(scaling_residual(4, 1, 1.3).unwrap(), 0.0);
        assert!(scaling_residual(6, 17, 2.3).unwrap() <= 1e-12);
    }

    #[test]
    fn baseline_examples() {
        assert!(rel_diff(cosh_baseline(3, 1, 2f64.ln()).unwrap(), 0.625) < 1e-15);
        assert_eq!(cosh_baseline(4, 2, 1e3).unwrap(), 8.0);
        for n in 3..=8 {
            let ratio = tm(n, 1, 1e6, Method::Closed).unwrap() / cosh_baseline(n, 1, 1e6).unwrap();
            assert!(rel_diff(ratio, 2.0) < 1e-4);
        }
    }

    #[test]
    fn tau_form_has_prefactor_two() {
        for n in 3..=8 {
            for xi in [0.3, 4.0, 60.0] {
                let t = tm(n, 1, xi, Method::Series).unwrap();
                let form = 2.0 * tau_form_sum(n, xi, 1e-17).unwrap();
                assert!(rel_diff(t, form) < 1e-10, "n={n} xi={xi}");
            }
        }
    }

    #[test]
    fn one_plus_tau_exact_matches_float() {
        for n in 3..=8 {
            for j in 0..10 {
                let exact = one_plus_tau(n, j).to_f64().unwrap();
                assert!(rel_diff(exact, 1.0 + tau(n, j)) < 1e-15);
            }
        }
    }

    #[test]
    fn recurrence_matches_factorials() {
        for n in 3..=8u32 {
            let mut t = Rational::one();
            for j in 0..=40usize {
                assert_eq!(t, series_term_exact(n, j), "n={n} j={j}");
                let (jj, nn) = (j as i64, n as i64);
                t *= Rational::new(
                    BigInt::from(jj + nn - 1),
                    BigInt::from((2 * jj + nn - 1) * (2 * jj + nn) * (jj + 1)),
                );
            }
        }
    }

    #[test]
    fn float_recurrence_tracks_exact_sum() {
        for n in 3..=6 {
            let xi = ratio(7, 2);
            let exact = series_sum_exact(n, &xi, 60).to_f64().unwrap();
            let v = t1_series(n, 3.5, 1e-17).unwrap().value;
            let expected = 2f64.powi(n as i32 - 1) * (-3.5f64).exp() * exact;
            assert!(rel_diff(v, expected) < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn halving_tol_is_monotone(n in 3u32..=8, xi in 0.0f64..300.0, e in 4i32..=14) {
            let tol = 10f64.powi(-e);
            let a = t1_series(n, xi, tol).unwrap().value;
            let b = t1_series(n, xi, tol / 2.0).unwrap().value;
            prop_assert!((a - b).abs() <= tol * a + 4.0 * f64::EPSILON * a);
        }

        #[test]
        fn tm_positive(n in 3u32..=10, m in 1u32..=50, rho in 1e-6f64..20.0) {
            prop_assert!(tm(n, m, rho, Method::Closed).unwrap() > 0.0);
            if m as f64 * rho <= SERIES_XI_LIMIT {
                prop_assert!(tm(n, m, rho, Method::Series).unwrap() > 0.0);
            }
        }
    }
}
