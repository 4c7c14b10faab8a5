//! Truncated series in `1/y`: `Σ_{j=0}^{N} c_j y^{-j} + O(y^{-N-1})`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::exppoly::{coeff_from_i64, coeff_to_float, Coeff, RateGroup};
use crate::numeric::NeumaierSum;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> LaurentSeries<C> {
    /// Series with `coeffs[j]` multiplying `y^{-j}`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        LaurentSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![C::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = C::one();
        s
    }

    /// Reads the non-positive powers of one rate group, padded or truncated to `order`.
    pub fn from_rate_group(group: &RateGroup<C>, order: usize) -> Result<Self> {
        if group.first_index < 0 && group.coeffs[..(-group.first_index) as usize]
            .iter()
            .any(|c| !c.is_zero())
        {
            return Err(Error::InvalidArgument(
                "rate group has positive powers of y".into(),
            ));
        }
        Ok(Self::new(
            (0..=order as i32).map(|j| group.coeff(j)).collect(),
        ))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `y^{-j}`, zero beyond the order.
    pub fn coeff(&self, j: usize) -> C {
        self.coeffs.get(j).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new((0..=order).map(|j| self.coeff(j)).collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        Self::new((0..=order).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        Self::new((0..=order).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        Self::new(
            (0..=order)
                .map(|j| {
                    (0..=j).fold(C::zero(), |acc, i| {
                        acc + self.coeffs[i].clone() * rhs.coeffs[j - i].clone()
                    })
                })
                .collect(),
        )
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Multiplicative inverse; fails when the constant term vanishes.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(Error::InvalidArgument(
                "series with zero constant term has no inverse".into(),
            ));
        }
        let mut out: Vec<C> = Vec::with_capacity(self.coeffs.len());
        out.push(C::one() / c0.clone());
        for j in 1..self.coeffs.len() {
            let s = (1..=j).fold(C::zero(), |acc, i| {
                acc + self.coeffs[i].clone() * out[j - i].clone()
            });
            out.push(-s / c0.clone());
        }
        Ok(Self::new(out))
    }

    /// `d/dy`, truncated at the same order.
    pub fn differentiate(&self) -> Self {
        let mut out = vec![C::zero(); self.coeffs.len()];
        for j in 1..self.coeffs.len() {
            // d/dy c y^{-(j-1)} = -(j-1) c y^{-j}
            out[j] = self.coeffs[j - 1].clone() * coeff_from_i64(-(j as i64 - 1));
        }
        Self::new(out)
    }

    /// Multiplies by `y^{-k}`, dropping what falls beyond the order.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new((0..=self.order()).map(|j| if j >= k { self.coeff(j - k) } else { C::zero() }).collect())
    }

    pub fn evaluate<T: Float>(&self, y: T) -> Result<T> {
        if y.is_zero() {
            return Err(Error::SingularPoint);
        }
        let inv = y.recip();
        let mut acc = NeumaierSum::new();
        let mut p = T::one();
        for c in &self.coeffs {
            acc.add(coeff_to_float::<C, T>(c) * p);
            p = p * inv;
        }
        Ok(acc.value())
    }
}
