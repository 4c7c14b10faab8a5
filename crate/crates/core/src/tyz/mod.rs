//! The finite TYZ expansion of `T_m`.
//!
//! `T_m(ρ) = 2 m^n F(mρ)` where
//!
//! ```text
//! F(y) = e^{-y} θ^{n-2} [ y^{n-2} (S_n(y) − Q_n(y)) ],    θ = (1/y) d/dy,
//! ```
//!
//! with `S_n = cosh`, `Q_n = Σ_{j ≤ (n-4)/2} y^{2j}/(2j)!` for even `n` and
//! `S_n = sinh`, `Q_n = Σ_{j ≤ (n-5)/2} y^{2j+1}/(2j+1)!` for odd `n`.
//! Expanding, `F(y) = Σ_{j ≤ n-2} b_j y^{-j} + e^{-2y} Σ p_j y^{-j}`, so
//! `T_m = Σ_j a_j(ρ) m^{n-j} + R_m` with `a_j = 2 b_j / ρ^j` and `R_m`
//! exponentially small.

pub mod faa;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub use faa::{
    composition_sum, faa_di_bruno, gamma_composition, kappa_combinatorial, kappa_operator,
    Compositions, GammaTable, KappaTable,
};

use crate::error::{Error, Result};
use crate::exppoly::StableEvaluator;
use crate::kempf::{check_n, t1_series, EvalPoint};
use crate::numeric::{fit_line, rel_diff};
use crate::{ratio, Rational, RationalExpPoly};

/// `F(y)` as an exact exponential-polynomial.
pub fn generating_function(n: u32) -> Result<RationalExpPoly> {
    check_n(n)?;
    let half = ratio(1, 2);
    let odd = n % 2 == 1;
    let minus_branch = if odd { -half.clone() } else { half.clone() };
    let mut head = RationalExpPoly::monomial(half, 0, 1)
        + RationalExpPoly::monomial(minus_branch, 0, -1);
    // Taylor head of cosh (even n) or sinh (odd n) up to degree n-4.
    let mut fact = BigInt::one();
    for k in 0..=(n as i64 - 4) {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        if (k % 2 == 1) == odd {
            head = head - RationalExpPoly::monomial(Rational::new(BigInt::one(), fact.clone()), k as i32, 0);
        }
    }
    Ok(head
        .mul_power(n as i32 - 2)
        .apply_theta_n(n as usize - 2)
        .shift_rate(-1))
}

/// `F`, `F′`, `F″` for one dimension with stable evaluators, built once.
#[derive(Debug)]
pub struct GeneratingFunction {
    n: u32,
    poly: RationalExpPoly,
    eval: [StableEvaluator<Rational>; 3],
}

/// Sample points at which the closed form is checked against the series.
const VALIDATION_POINTS: [(i64, i64); 3] = [(1, 2), (2, 1), (17, 2)];

impl GeneratingFunction {
    pub fn build(n: u32) -> Result<Self> {
        let poly = generating_function(n)?;
        let d1 = poly.differentiate();
        let d2 = d1.differentiate();
        let gf = GeneratingFunction {
            n,
            eval: [
                StableEvaluator::new(poly.clone()),
                StableEvaluator::new(d1),
                StableEvaluator::new(d2),
            ],
            poly,
        };
        for (p, q) in VALIDATION_POINTS {
            let y = p as f64 / q as f64;
            let closed = 2.0 * gf.value(y)?;
            let series = t1_series(n, y, 1e-17)?.value;
            if rel_diff(closed, series) > 1e-12 {
                return Err(Error::Consistency(format!(
                    "closed form disagrees with the series for n = {n} at y = {y}: {closed} vs {series}"
                )));
            }
        }
        Ok(gf)
    }

    /// Shared instance for dimension `n`.
    pub fn cached(n: u32) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<GeneratingFunction>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(gf) = cache.lock().unwrap().get(&n) {
            return Ok(gf.clone());
        }
        let built = Arc::new(Self::build(n)?);
        Ok(cache.lock().unwrap().entry(n).or_insert(built).clone())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> &RationalExpPoly {
        &self.poly
    }

    pub fn value(&self, y: f64) -> Result<f64> {
        self.eval[0].value(y)
    }

    pub fn derivative(&self, y: f64) -> Result<f64> {
        self.eval[1].value(y)
    }

    pub fn second_derivative(&self, y: f64) -> Result<f64> {
        self.eval[2].value(y)
    }
}

/// Exact coefficient lists of `F`: `b` (rate 0), `p` (rate −2), `r` (rate −1).
#[derive(Clone, Debug, PartialEq)]
pub struct TyzExpansion {
    pub n: u32,
    pub b: Vec<Rational>,
    pub p: Vec<Rational>,
    pub r: Vec<Rational>,
}

impl TyzExpansion {
    /// `a_j(ρ)·ρ^j = 2 b_j`.
    pub fn a_scaled(&self, j: usize) -> Rational {
        self.b.get(j).map(|b| b * ratio(2, 1)).unwrap_or_else(Rational::zero)
    }
}

/// Splits `F` by rate into the finite expansion.
pub fn tyz_coefficients(n: u32) -> Result<TyzExpansion> {
    let f = generating_function(n)?;
    let depth = n as i32 - 2;
    let groups = f.group_by_rate();
    let mut lists: [Vec<Rational>; 3] = Default::default();
    for (rate, g) in &groups {
        let slot = match rate {
            0 => 0,
            -2 => 1,
            -1 => 2,
            other => {
                return Err(Error::Consistency(format!(
                    "unexpected rate {other} in F for n = {n}"
                )))
            }
        };
        if g.first_index < 0 || g.last_index() > depth {
            return Err(Error::Consistency(format!(
                "rate {rate} of F for n = {n} has powers outside y^0..y^-{depth}"
            )));
        }
        let len = if slot == 2 { depth } else { depth + 1 };
        lists[slot] = (0..len).map(|j| g.coeff(j)).collect();
    }
    let [b, p, r] = lists;
    let pad = |mut v: Vec<Rational>, len: i32| {
        v.resize(len as usize, Rational::zero());
        v
    };
    Ok(TyzExpansion {
        n,
        b: pad(b, depth + 1),
        p: pad(p, depth + 1),
        r: pad(r, depth),
    })
}

/// Exact expansion for `n`, computed once.
pub fn cached_coefficients(n: u32) -> Result<Arc<TyzExpansion>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<TyzExpansion>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(e) = cache.lock().unwrap().get(&n) {
        return Ok(e.clone());
    }
    let built = Arc::new(tyz_coefficients(n)?);
    Ok(cache.lock().unwrap().entry(n).or_insert(built).clone())
}

/// `a_j(ρ)`, with `beyond_expansion` set (and value 0) for `j > n−2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ACoefficient {
    pub value: f64,
    pub beyond_expansion: bool,
}

pub fn a_coefficient(n: u32, j: usize, rho: f64) -> Result<ACoefficient> {
    check_n(n)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    if j > n as usize - 2 {
        return Ok(ACoefficient {
            value: 0.0,
            beyond_expansion: true,
        });
    }
    let e = cached_coefficients(n)?;
    let two_b = e.a_scaled(j).to_f64().unwrap_or(f64::NAN);
    Ok(ACoefficient {
        value: two_b / rho.powi(j as i32),
        beyond_expansion: false,
    })
}

/// `Σ_{j=0}^{k} a_j(ρ) m^{n-j}`.
pub fn eval_truncated(n: u32, m: u32, rho: f64, k: usize) -> Result<f64> {
    check_n(n)?;
    EvalPoint::new(m, rho)?;
    if k > n as usize - 2 {
        return Err(Error::Index {
            index: k,
            detail: format!("truncation order must be <= n-2 = {}", n - 2),
        });
    }
    let mf = m as f64;
    let mut acc = crate::numeric::NeumaierSum::new();
    for j in 0..=k {
        acc.add(a_coefficient(n, j, rho)?.value * mf.powi(n as i32 - j as i32));
    }
    Ok(acc.value())
}

/// `R_m(ρ) = 2 m^n (Φ + Ψ)(mρ)` from the exponentially small rate groups.
pub fn remainder(n: u32, m: u32, rho: f64) -> Result<f64> {
    check_n(n)?;
    let pt = EvalPoint::new(m, rho)?;
    let e = cached_coefficients(n)?;
    let xi = pt.xi();
    let laurent = |cs: &[Rational]| -> f64 {
        let mut acc = crate::numeric::NeumaierSum::new();
        for (j, c) in cs.iter().enumerate() {
            acc.add(c.to_f64().unwrap_or(f64::NAN) * xi.powi(-(j as i32)));
        }
        acc.value()
    };
    let phi = (-2.0 * xi).exp() * laurent(&e.p);
    let psi = (-xi).exp() * laurent(&e.r);
    Ok(2.0 * (m as f64).powi(n as i32) * (phi + psi))
}

/// One row of a remainder scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderSample {
    pub m: u32,
    pub tm: f64,
    pub truncated: f64,
    pub remainder: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    /// Least-squares slope of `ln|R_m|` against `m`.
    pub slope: f64,
    pub intercept: f64,
    /// Constant of the bound `|R_m| ≤ C₀ e^{-mρ/2}`, anchored at the first `m`.
    pub c0: f64,
    pub bound_ok: bool,
    pub samples: Vec<RemainderSample>,
}

/// Fits the exponential decay of the remainder over `m_list`.
pub fn remainder_decay_fit(n: u32, rho: f64, m_list: &[u32]) -> Result<DecayFit> {
    check_n(n)?;
    if m_list.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 values of m, got {}",
            m_list.len()
        )));
    }
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("m values must be strictly increasing".into()));
    }
    let mut samples = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let r = remainder(n, m, rho)?;
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Underflow { m });
        }
        samples.push(RemainderSample {
            m,
            tm: crate::kempf::tm(n, m, rho, crate::kempf::Method::Closed)?,
            truncated: eval_truncated(n, m, rho, n as usize - 2)?,
            remainder: r,
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.m as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.remainder.abs().ln()).collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::DegenerateFit("collinear m values".into()))?;
    let first = samples[0];
    let c0 = first.remainder.abs() * (0.5 * first.m as f64 * rho).exp();
    let bound_ok = samples
        .iter()
        .all(|s| s.remainder.abs() <= c0 * (-0.5 * s.m as f64 * rho).exp() * (1.0 + 1e-12));
    Ok(DecayFit {
        slope: fit.slope,
        intercept: fit.intercept,
        c0,
        bound_ok,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kempf::{tm, Method};
    use crate::ExpTerm;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn generating_function_n3_n4() {
        let f3 = generating_function(3).unwrap();
        let expect3 = RationalExpPoly::from_terms([
            ExpTerm::new(q(1, 2), 0, 0),
            ExpTerm::new(q(1, 2), -1, 0),
            ExpTerm::new(q(1, 2), 0, -2),
            ExpTerm::new(q(-1, 2), -1, -2),
        ]);
        assert_eq!(f3, expect3);
        let f4 = generating_function(4).unwrap();
        let expect4 = RationalExpPoly::from_terms([
            ExpTerm::new(q(1, 2), 0, 0),
            ExpTerm::new(q(3, 2), -1, 0),
            ExpTerm::new(q(1, 2), 0, -2),
            ExpTerm::new(q(-3, 2), -1, -2),
        ]);
        assert_eq!(f4, expect4);
    }

    #[test]
    fn f_n3_at_two() {
        let v = GeneratingFunction::cached(3).unwrap().value(2.0).unwrap();
        let expected = (-2f64).exp() * (2f64.sinh() / 2.0 + 2f64.cosh());
        assert!(rel_diff(v, expected) < 1e-15);
        assert!(rel_diff(v, 0.754579) < 1e-6);
    }

    #[test]
    fn group_by_rate_n3() {
        let g = generating_function(3).unwrap().group_by_rate();
        assert_eq!(g.len(), 2);
        assert_eq!(g[&0].coeffs, vec![q(1, 2), q(1, 2)]);
        assert_eq!(g[&-2].coeffs, vec![q(1, 2), q(-1, 2)]);
    }

    #[test]
    fn coefficient_examples() {
        let e3 = tyz_coefficients(3).unwrap();
        assert_eq!(e3.b, vec![q(1, 2), q(1, 2)]);
        assert_eq!(e3.p, vec![q(1, 2), q(-1, 2)]);
        assert_eq!(e3.r, vec![q(0, 1)]);
        let e4 = tyz_coefficients(4).unwrap();
        assert_eq!(e4.b, vec![q(1, 2), q(3, 2), q(0, 1)]);
        assert_eq!(e4.p, vec![q(1, 2), q(-3, 2), q(0, 1)]);
        assert!(e4.r.iter().all(Zero::is_zero));
        let e7 = tyz_coefficients(7).unwrap();
        let expected: Vec<Rational> =
            [(1, 2), (15, 2), (45, 2), (-15, 1), (-45, 2), (45, 2)].iter().map(|&(a, b)| q(a, b)).collect();
        assert_eq!(e7.b, expected);
    }

    #[test]
    fn structural_identities() {
        for n in 3..=12u32 {
            let e = tyz_coefficients(n).unwrap();
            assert_eq!(&e.b[0] * q(2, 1), q(1, 1));
            assert_eq!(&e.b[1] * q(2, 1), q(((n - 2) * (n - 1)) as i64, 2));
            for (j, (b, p)) in e.b.iter().zip(&e.p).enumerate() {
                let signed = if j % 2 == 0 { b.clone() } else { -b.clone() };
                assert_eq!(p, &signed, "n={n} j={j}");
            }
            assert!(e.r.iter().all(Zero::is_zero));
            assert_eq!(e.b.len(), n as usize - 1);
            assert_eq!(e.r.len(), n as usize - 2);
        }
    }

    #[test]
    fn a_coefficient_examples() {
        for n in 3..=8 {
            assert_eq!(a_coefficient(n, 0, 1.7).unwrap().value, 1.0);
        }
        assert_eq!(a_coefficient(3, 1, 2.0).unwrap().value, 0.5);
        let beyond = a_coefficient(5, 4, 1.0).unwrap();
        assert_eq!(beyond.value, 0.0);
        assert!(beyond.beyond_expansion);
    }

    #[test]
    fn truncated_examples() {
        assert_eq!(eval_truncated(5, 3, 1.1, 0).unwrap(), 243.0);
        assert_eq!(eval_truncated(4, 10, 1.0, 1).unwrap(), 13000.0);
        assert!(eval_truncated(4, 10, 1.0, 3).is_err());
    }

    #[test]
    fn remainder_examples() {
        assert_eq!(remainder(3, 1, 1.0).unwrap(), 0.0);
        for m in [1u32, 2, 4] {
            let rho = 2.0 / m as f64;
            let expected = (m as f64).powi(3) * (-4f64).exp() / 2.0;
            assert!(rel_diff(remainder(3, m, rho).unwrap(), expected) < 1e-14);
        }
        for m in [10u32, 20, 40, 80] {
            let scaled = remainder(5, m, 1.0).unwrap() * (2.0 * m as f64).exp() / (m as f64).powi(5);
            assert!(scaled.abs() < 2.0);
        }
    }

    #[test]
    fn expansion_plus_remainder_is_tm() {
        for n in 3..=8u32 {
            for &(m, rho) in &[(1u32, 0.7), (3, 1.0), (10, 0.4), (25, 2.0)] {
                let t = tm(n, m, rho, Method::Closed).unwrap();
                let split = eval_truncated(n, m, rho, n as usize - 2).unwrap() + remainder(n, m, rho).unwrap();
                let scale = (m as f64).powi(n as i32);
                assert!((t - split).abs() <= 1e-10 * scale.max(t), "n={n} m={m} rho={rho}");
            }
        }
    }

    #[test]
    fn expansion_identity_exact() {
        for n in 3..=8u32 {
            let f = generating_function(n).unwrap();
            let e = tyz_coefficients(n).unwrap();
            let rebuilt = RationalExpPoly::from_terms(
                e.b.iter().enumerate().map(|(j, b)| ExpTerm::new(b.clone(), -(j as i32), 0))
                    .chain(e.p.iter().enumerate().map(|(j, p)| ExpTerm::new(p.clone(), -(j as i32), -2)))
                    .chain(e.r.iter().enumerate().map(|(j, r)| ExpTerm::new(r.clone(), -(j as i32), -1))),
            );
            assert_eq!(rebuilt, f);
        }
    }

    #[test]
    fn decay_fit_window() {
        let fit = remainder_decay_fit(4, 1.0, &(40..=160).step_by(8).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.1, "slope {}", fit.slope);
        assert!(fit.bound_ok);
        assert!(remainder_decay_fit(4, 1.0, &[1, 2, 3]).is_err());
        assert!(remainder_decay_fit(4, 1.0, &[1, 3, 2, 4]).is_err());
        assert!(matches!(
            remainder_decay_fit(3, 1.0, &[1, 2, 3, 4]),
            Err(Error::Underflow { m: 1 })
        ));
    }
}
