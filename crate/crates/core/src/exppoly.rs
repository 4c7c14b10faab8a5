//! Exponential-polynomials `Σ c·y^k·e^{a·y}` in one variable.
//!
//! Terms are stored canonically keyed by `(power, rate)` with zero
//! coefficients dropped, so two polynomials are symbolically equal exactly when
//! their maps are equal. The class is closed under addition, multiplication,
//! `d/dy`, multiplication by `e^{s·y}` and the singular derivative
//! `θ = (1/y)·d/dy`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive, Num, NumCast, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Requirements on exact or floating coefficients.
pub trait Coeff:
    Num + Clone + Neg<Output = Self> + FromPrimitive + ToPrimitive + fmt::Debug
{
}

impl<T> Coeff for T where
    T: Num + Clone + Neg<Output = T> + FromPrimitive + ToPrimitive + fmt::Debug
{
}

pub(crate) fn coeff_from_i64<C: Coeff>(v: i64) -> C {
    C::from_i64(v).expect("coefficient type cannot represent a machine integer")
}

pub(crate) fn coeff_to_float<C: Coeff, T: Float>(c: &C) -> T {
    <T as NumCast>::from(c.clone()).unwrap_or_else(T::nan)
}

/// A single term `coeff · y^power · e^{rate·y}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm<C> {
    pub coeff: C,
    pub power: i32,
    pub rate: i32,
}

impl<C> ExpTerm<C> {
    pub fn new(coeff: C, power: i32, rate: i32) -> Self {
        ExpTerm { coeff, power, rate }
    }
}

/// Laurent coefficients of one exponential rate.
///
/// `coeffs[i]` multiplies `y^{-(first_index + i)}`. For functions with no
/// positive powers `first_index` is 0, so `coeffs[j]` is the coefficient of
/// `y^{-j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateGroup<C> {
    pub first_index: i32,
    pub coeffs: Vec<C>,
}

impl<C: Coeff> RateGroup<C> {
    /// Coefficient of `y^{-j}`.
    pub fn coeff(&self, j: i32) -> C {
        let i = j - self.first_index;
        if i < 0 {
            return C::zero();
        }
        self.coeffs.get(i as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Largest `j` with a stored (possibly zero) coefficient of `y^{-j}`.
    pub fn last_index(&self) -> i32 {
        self.first_index + self.coeffs.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[derive(Clone, PartialEq)]
pub struct ExpPoly<C> {
    terms: BTreeMap<(i32, i32), C>,
}

impl<C: Coeff> Default for ExpPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> ExpPoly<C> {
    pub fn zero() -> Self {
        ExpPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(coeff: C, power: i32, rate: i32) -> Self {
        let mut p = Self::zero();
        p.accumulate(power, rate, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ExpTerm<C>>>(terms: I) -> Self {
        let mut p = Self::zero();
        for t in terms {
            p.accumulate(t.power, t.rate, t.coeff);
        }
        p
    }

    fn accumulate(&mut self, power: i32, rate: i32, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((power, rate)) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `y^power·e^{rate·y}` (zero when absent).
    pub fn coeff(&self, power: i32, rate: i32) -> C {
        self.terms
            .get(&(power, rate))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Terms in canonical `(power, rate)` order.
    pub fn terms(&self) -> impl Iterator<Item = ExpTerm<C>> + '_ {
        self.terms
            .iter()
            .map(|(&(power, rate), c)| ExpTerm::new(c.clone(), power, rate))
    }

    pub fn rates(&self) -> BTreeSet<i32> {
        self.terms.keys().map(|&(_, a)| a).collect()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().map(|&(k, _)| k).min()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().map(|&(k, _)| k).max()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms().map(|t| ExpTerm {
            coeff: t.coeff * c.clone(),
            ..t
        }))
    }

    /// Multiplies by `y^k`.
    pub fn mul_power(&self, k: i32) -> Self {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(p, a), c)| ((p + k, a), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by `e^{s·y}`.
    pub fn shift_rate(&self, s: i32) -> Self {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(p, a), c)| ((p, a + s), c.clone()))
                .collect(),
        }
    }

    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero();
        for (&(k, a), c) in &self.terms {
            if k != 0 {
                out.accumulate(k - 1, a, c.clone() * coeff_from_i64(k as i64));
            }
            if a != 0 {
                out.accumulate(k, a, c.clone() * coeff_from_i64(a as i64));
            }
        }
        out
    }

    /// One application of `θ = (1/y)·d/dy`.
    pub fn apply_theta(&self) -> Self {
        let mut out = Self::zero();
        for (&(k, a), c) in &self.terms {
            if k != 0 {
                out.accumulate(k - 2, a, c.clone() * coeff_from_i64(k as i64));
            }
            if a != 0 {
                out.accumulate(k - 1, a, c.clone() * coeff_from_i64(a as i64));
            }
        }
        out
    }

    pub fn apply_theta_n(&self, times: usize) -> Self {
        (0..times).fold(self.clone(), |p, _| p.apply_theta())
    }

    /// Partitions the terms by exponential rate.
    pub fn group_by_rate(&self) -> BTreeMap<i32, RateGroup<C>> {
        let mut buckets: BTreeMap<i32, BTreeMap<i32, C>> = BTreeMap::new();
        for (&(k, a), c) in &self.terms {
            buckets.entry(a).or_default().insert(-k, c.clone());
        }
        buckets
            .into_iter()
            .map(|(rate, by_index)| {
                let lo = by_index.keys().next().copied().unwrap_or(0).min(0);
                let hi = by_index.keys().next_back().copied().unwrap_or(0);
                let coeffs = (lo..=hi)
                    .map(|j| by_index.get(&j).cloned().unwrap_or_else(C::zero))
                    .collect();
                (
                    rate,
                    RateGroup {
                        first_index: lo,
                        coeffs,
                    },
                )
            })
            .collect()
    }

    /// Inverse of [`group_by_rate`](Self::group_by_rate).
    pub fn from_rate_groups<'a, I>(groups: I) -> Self
    where
        I: IntoIterator<Item = (&'a i32, &'a RateGroup<C>)>,
        C: 'a,
    {
        let mut out = Self::zero();
        for (&rate, g) in groups {
            for (i, c) in g.coeffs.iter().enumerate() {
                out.accumulate(-(g.first_index + i as i32), rate, c.clone());
            }
        }
        out
    }

    /// Keeps only the terms with the given rate.
    pub fn rate_part(&self, rate: i32) -> Self {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, a), _)| a == rate)
                .map(|(&key, c)| (key, c.clone()))
                .collect(),
        }
    }

    /// Evaluates at `y`, factoring each rate group as `e^{a·y}·(Laurent part)`.
    pub fn evaluate<T: Float>(&self, y: T) -> Result<T> {
        self.evaluate_with_condition(y).map(|(v, _)| v)
    }

    /// Value together with `Σ |c·y^k·e^{a·y}|`, the scale against which the
    /// rounding error of the value is bounded.
    pub fn evaluate_with_condition<T: Float>(&self, y: T) -> Result<(T, T)> {
        if y.is_zero() && self.terms.keys().any(|&(k, _)| k < 0) {
            return Err(Error::SingularPoint);
        }
        let mut total = NeumaierSum::new();
        let mut magnitude = NeumaierSum::new();
        let mut iter = self.terms.iter().peekable();
        // Group by rate without allocating: collect (rate -> Laurent sums).
        let mut groups: BTreeMap<i32, (NeumaierSum<T>, NeumaierSum<T>)> = BTreeMap::new();
        while let Some((&(k, a), c)) = iter.next() {
            let term = coeff_to_float::<C, T>(c) * y.powi(k);
            let entry = groups
                .entry(a)
                .or_insert_with(|| (NeumaierSum::new(), NeumaierSum::new()));
            entry.0.add(term);
            entry.1.add(term.abs());
        }
        for (a, (laurent, abs)) in groups {
            let factor = (T::from(a).unwrap() * y).exp();
            total.add(laurent.value() * factor);
            magnitude.add(abs.value() * factor);
        }
        Ok((total.value(), magnitude.value()))
    }

    /// Coefficients of the power series at `y = 0` through `y^order`.
    ///
    /// Fails unless every negative power cancels exactly, which for exact
    /// coefficient types certifies the function is analytic at the origin.
    pub fn taylor_coefficients(&self, order: usize) -> Result<Vec<C>> {
        let min_power = self.min_power().unwrap_or(0).min(0);
        let lo = min_power as i64;
        let span = (order as i64 - lo + 1) as usize;
        let mut acc = vec![C::zero(); span];
        for (&(k, a), c) in &self.terms {
            let k = k as i64;
            if k > order as i64 {
                continue;
            }
            // c · a^i / i! lands on power k + i.
            let mut weight = c.clone();
            let rate: C = coeff_from_i64(a as i64);
            let mut i = 0i64;
            loop {
                let p = k + i;
                if p > order as i64 {
                    break;
                }
                let slot = (p - lo) as usize;
                acc[slot] = acc[slot].clone() + weight.clone();
                if a == 0 {
                    break;
                }
                i += 1;
                weight = weight * rate.clone() / coeff_from_i64(i);
            }
        }
        let (principal, regular) = acc.split_at(-lo as usize);
        if let Some(pos) = principal.iter().position(|c| !c.is_zero()) {
            return Err(Error::NotAnalytic(format!(
                "coefficient of y^{} is {:?}",
                lo + pos as i64,
                principal[pos]
            )));
        }
        Ok(regular.to_vec())
    }
}

impl<C: Coeff> fmt::Debug for ExpPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<C: Coeff> fmt::Display for ExpPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(k, a), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})")?;
            if k != 0 {
                write!(f, "*y^{k}")?;
            }
            if a != 0 {
                write!(f, "*e^({a}y)")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> Add<&ExpPoly<C>> for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn add(self, rhs: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = self.clone();
        for (&(k, a), c) in &rhs.terms {
            out.accumulate(k, a, c.clone());
        }
        out
    }
}

impl<C: Coeff> Add for ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn add(self, rhs: ExpPoly<C>) -> ExpPoly<C> {
        &self + &rhs
    }
}

impl<C: Coeff> Neg for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn neg(self) -> ExpPoly<C> {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(&key, c)| (key, -c.clone()))
                .collect(),
        }
    }
}

impl<C: Coeff> Neg for ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn neg(self) -> ExpPoly<C> {
        -&self
    }
}

impl<C: Coeff> Sub<&ExpPoly<C>> for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn sub(self, rhs: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = self.clone();
        for (&(k, a), c) in &rhs.terms {
            out.accumulate(k, a, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn sub(self, rhs: ExpPoly<C>) -> ExpPoly<C> {
        &self - &rhs
    }
}

impl<C: Coeff> Mul<&ExpPoly<C>> for &ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn mul(self, rhs: &ExpPoly<C>) -> ExpPoly<C> {
        let mut out = ExpPoly::zero();
        for (&(k1, a1), c1) in &self.terms {
            for (&(k2, a2), c2) in &rhs.terms {
                out.accumulate(k1 + k2, a1 + a2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Mul for ExpPoly<C> {
    type Output = ExpPoly<C>;
    fn mul(self, rhs: ExpPoly<C>) -> ExpPoly<C> {
        &self * &rhs
    }
}

/// Evaluator that switches to an exact Taylor re-expansion wherever direct
/// evaluation would lose digits to cancellation between rate groups.
///
/// Near `y = 0` the terms of an exponential-polynomial that is analytic there
/// cancel catastrophically (each is `O(y^{-k})` while the sum is `O(1)`). The
/// power series of `e^{s·y}·p(y)`, with `s` centring the rates, is computed
/// once in the coefficient ring and summed instead.
#[derive(Clone, Debug)]
pub struct StableEvaluator<C: Coeff> {
    poly: ExpPoly<C>,
    shift: i32,
    taylor: Option<Vec<f64>>,
    condition_limit: f64,
}

/// Taylor order kept by [`StableEvaluator`]; ample for `y` up to ~40.
pub const TAYLOR_ORDER: usize = 160;

impl<C: Coeff> StableEvaluator<C> {
    pub fn new(poly: ExpPoly<C>) -> Self {
        let rates = poly.rates();
        let shift = match (rates.first(), rates.last()) {
            (Some(&lo), Some(&hi)) => -(lo + hi).div_euclid(2),
            _ => 0,
        };
        let taylor = poly
            .shift_rate(shift)
            .taylor_coefficients(TAYLOR_ORDER)
            .ok()
            .map(|cs| cs.iter().map(coeff_to_float::<C, f64>).collect());
        StableEvaluator {
            poly,
            shift,
            taylor,
            condition_limit: 64.0,
        }
    }

    pub fn poly(&self) -> &ExpPoly<C> {
        &self.poly
    }

    pub fn value(&self, y: f64) -> Result<f64> {
        if let Some(series) = &self.taylor {
            if y == 0.0 {
                return Ok(series.first().copied().unwrap_or(0.0));
            }
            let (direct, magnitude) = self.poly.evaluate_with_condition(y)?;
            if magnitude <= self.condition_limit * direct.abs() {
                return Ok(direct);
            }
            if let Some(v) = sum_power_series(series, y) {
                return Ok(v * (-(self.shift as f64) * y).exp());
            }
            Ok(direct)
        } else {
            self.poly.evaluate(y)
        }
    }
}

/// Sums `Σ c_p y^p`, returning `None` if the truncated tail is not negligible.
fn sum_power_series(coeffs: &[f64], y: f64) -> Option<f64> {
    let mut acc = NeumaierSum::new();
    let mut scale = 0.0f64;
    let mut quiet = 0;
    let mut power = 1.0f64;
    for (p, &c) in coeffs.iter().enumerate() {
        let term = c * power;
        acc.add(term);
        scale = scale.max(term.abs());
        if (p as f64) > y.abs() && term.abs() <= 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                return Some(acc.value());
            }
        } else {
            quiet = 0;
        }
        power *= y;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ratio, Rational, RationalExpPoly};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn mono(c: Rational, k: i32, a: i32) -> RationalExpPoly {
        ExpPoly::monomial(c, k, a)
    }

    #[test]
    fn add_examples() {
        let a = mono(q(1, 1), 1, 0);
        assert!((&a + &(-&a)).is_zero());

        let s = &mono(q(1, 2), 0, 0) + &mono(q(1, 2), 0, -2);
        assert_eq!(s.len(), 2);

        let s = &mono(q(2, 1), 3, 1) + &mono(q(3, 1), 3, 1);
        assert_eq!(s, mono(q(5, 1), 3, 1));
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(
            &mono(q(1, 1), -1, 0) * &mono(q(1, 1), 2, 1),
            mono(q(1, 1), 1, 1)
        );
        assert!((&RationalExpPoly::zero() * &mono(q(7, 3), 4, -1)).is_zero());
        let plus = &RationalExpPoly::one() + &mono(q(1, 1), 0, -2);
        let minus = &RationalExpPoly::one() - &mono(q(1, 1), 0, -2);
        assert_eq!(
            &plus * &minus,
            &RationalExpPoly::one() - &mono(q(1, 1), 0, -4)
        );
    }

    #[test]
    fn differentiate_examples() {
        let d = mono(q(1, 1), 1, 1).differentiate();
        assert_eq!(d, &mono(q(1, 1), 0, 1) + &mono(q(1, 1), 1, 1));
        assert!(mono(q(9, 1), 0, 0).differentiate().is_zero());
        assert_eq!(mono(q(1, 1), -1, 0).differentiate(), mono(q(-1, 1), -2, 0));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(mono(q(1, 1), 2, 0).apply_theta(), mono(q(2, 1), 0, 0));
        let t = mono(q(1, 1), 1, 1).apply_theta();
        assert_eq!(t, &mono(q(1, 1), -1, 1) + &mono(q(1, 1), 0, 1));
        let via_derivative = &mono(q(1, 1), -1, 0) * &mono(q(1, 1), 1, 1).differentiate();
        assert_eq!(t, via_derivative);
        assert!(mono(q(5, 1), 0, 0).apply_theta().is_zero());
    }

    #[test]
    fn shift_rate_examples() {
        assert_eq!(mono(q(1, 1), 0, 1).shift_rate(-1), RationalExpPoly::one());
        assert_eq!(mono(q(1, 1), 0, -1).shift_rate(-1), mono(q(1, 1), 0, -2));
        assert_eq!(mono(q(1, 1), 3, 0).shift_rate(-1), mono(q(1, 1), 3, -1));
    }

    #[test]
    fn group_by_rate_examples() {
        assert!(RationalExpPoly::zero().group_by_rate().is_empty());
        let g = mono(q(1, 1), -1, -1).group_by_rate();
        assert_eq!(g.len(), 1);
        assert_eq!(g[&-1].coeffs, vec![q(0, 1), q(1, 1)]);
        assert_eq!(g[&-1].first_index, 0);

        let with_positive = &mono(q(2, 1), 2, 0) + &mono(q(3, 1), -1, 0);
        let g = with_positive.group_by_rate();
        assert_eq!(g[&0].first_index, -2);
        assert_eq!(g[&0].coeff(-2), q(2, 1));
        assert_eq!(g[&0].coeff(1), q(3, 1));
        assert_eq!(RationalExpPoly::from_rate_groups(&g), with_positive);
    }

    #[test]
    fn evaluate_examples() {
        let p = &RationalExpPoly::one() + &mono(q(1, 1), 0, -2);
        assert_eq!(p.evaluate(800.0f64).unwrap(), 1.0);
        assert_eq!(mono(q(1, 1), -1, 0).evaluate(4.0f64).unwrap(), 0.25);
        assert_eq!(
            mono(q(1, 1), -1, 0).evaluate(0.0f64),
            Err(Error::SingularPoint)
        );
        assert_eq!(mono(q(3, 1), 2, 0).evaluate(0.0f64).unwrap(), 0.0);
        let f32_value = mono(q(1, 2), -1, 0).evaluate(4.0f32).unwrap();
        assert_eq!(f32_value, 0.125f32);
    }

    #[test]
    fn evaluate_large_y_does_not_overflow() {
        // e^{y}·e^{-y} cancellation never materialises because each rate is
        // exponentiated on its own.
        let p = &mono(q(1, 1), 3, 0) + &mono(q(1, 1), 5, -1);
        let v = p.evaluate(700.0f64).unwrap();
        assert_eq!(v, 700.0f64.powi(3) + 700.0f64.powi(5) * (-700.0f64).exp());
    }

    #[test]
    fn taylor_of_removable_singularity() {
        // (1 - e^{-2y}) / y = 2 - 2y + (4/3) y^2 - ...
        let p = &mono(q(1, 1), -1, 0) - &mono(q(1, 1), -1, -2);
        let t = p.taylor_coefficients(3).unwrap();
        assert_eq!(t, vec![q(2, 1), q(-2, 1), q(4, 3), q(-2, 3)]);
        assert!(matches!(
            mono(q(1, 1), -1, 0).taylor_coefficients(2),
            Err(Error::NotAnalytic(_))
        ));
    }

    #[test]
    fn stable_evaluator_near_zero() {
        // (1 - e^{-2y}) / y at y = 1e-6: direct evaluation loses ~6 digits.
        let p = &mono(q(1, 1), -1, 0) - &mono(q(1, 1), -1, -2);
        let ev = StableEvaluator::new(p);
        let y = 1e-6f64;
        let exact = -(-2.0 * y).exp_m1() / y;
        assert!((ev.value(y).unwrap() - exact).abs() <= 4e-16 * exact);
        assert!((ev.value(3.0).unwrap() - (1.0 - (-6.0f64).exp()) / 3.0).abs() < 1e-15);
    }

    fn arb_poly() -> impl Strategy<Value = RationalExpPoly> {
        prop::collection::vec((-9i64..=9, 1i64..=4, -3i32..=3, -2i32..=2), 0..6).prop_map(
            |terms| {
                RationalExpPoly::from_terms(
                    terms
                        .into_iter()
                        .map(|(n, d, k, a)| ExpTerm::new(ratio(n, d), k, a)),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn theta_is_derivative_over_y(a in arb_poly()) {
            let inv_y = RationalExpPoly::monomial(ratio(1, 1), -1, 0);
            prop_assert_eq!(a.apply_theta(), &inv_y * &a.differentiate());
        }

        #[test]
        fn group_reassembly(a in arb_poly()) {
            let groups = a.group_by_rate();
            prop_assert_eq!(RationalExpPoly::from_rate_groups(&groups), a);
        }

        #[test]
        fn derivative_matches_finite_difference(a in arb_poly(), y in 1.0f64..10.0) {
            let d = a.differentiate().evaluate(y).unwrap();
            let (_, scale) = a.differentiate().evaluate_with_condition(y).unwrap();
            let h = 1e-5 * y;
            let fd = (a.evaluate(y + h).unwrap() - a.evaluate(y - h).unwrap()) / (2.0 * h);
            let (_, fscale) = a.evaluate_with_condition(y).unwrap();
            // Relative to the term magnitudes, which bound the rounding noise.
            prop_assert!((d - fd).abs() <= 1e-6 * (scale + fscale / y).max(1e-300));
        }
    }
}
