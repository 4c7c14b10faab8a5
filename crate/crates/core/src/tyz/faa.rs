//! Composition sums: Faà di Bruno's formula, the Γ table and the κ
//! coefficients of `θ^N (y^r e^{cy})`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, One, Zero};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::{ratio, Rational};

/// Largest `ℓ` kept in the memoized Γ table.
pub const GAMMA_TABLE_MAX: usize = 14;

/// Ordered compositions of `total` into `parts` positive integers.
///
/// Walks the `(parts-1)`-subsets of cut points `{1, …, total-1}` in
/// lexicographic order, without recursion.
#[derive(Clone, Debug)]
pub struct Compositions {
    total: usize,
    cuts: Vec<usize>,
    done: bool,
}

impl Compositions {
    pub fn new(total: usize, parts: usize) -> Self {
        let done = if parts == 0 { total != 0 } else { parts > total };
        let cuts = if done || parts == 0 {
            Vec::new()
        } else {
            (1..parts).collect()
        };
        Compositions { total, cuts, done }
    }

    fn current(&self) -> Vec<usize> {
        if self.total == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        let mut prev = 0;
        for &c in &self.cuts {
            out.push(c - prev);
            prev = c;
        }
        out.push(self.total - prev);
        out
    }

    fn advance(&mut self) {
        let k = self.cuts.len();
        // Cut i can rise to total - (k - i).
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.cuts[i] < self.total - (k - i) {
                self.cuts[i] += 1;
                for t in i + 1..k {
                    self.cuts[t] = self.cuts[t - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current();
        if self.total == 0 {
            self.done = true;
        } else {
            self.advance();
        }
        Some(out)
    }
}

/// `Σ f(parts)` over the ordered compositions of `total` into `parts` pieces.
pub fn composition_sum<T, F>(total: usize, parts: usize, mut f: F) -> T
where
    T: Zero,
    F: FnMut(&[usize]) -> T,
{
    Compositions::new(total, parts).fold(T::zero(), |acc, c| acc + f(&c))
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// `(2k-3)!!` with `(-1)!! = 1`.
pub fn odd_double_factorial(k: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut f = 2 * k as i64 - 3;
    while f > 1 {
        acc *= BigInt::from(f);
        f -= 2;
    }
    acc
}

fn multinomial(total: usize, parts: &[usize]) -> BigInt {
    parts
        .iter()
        .fold(factorial(total), |acc, &p| acc / factorial(p))
}

/// `Γ^{ℓ,j} = Σ ℓ!/(ℓ₁!…ℓ_j!) Π (2ℓ_i − 3)!!` by direct enumeration.
pub fn gamma_enumerate(l: usize, j: usize) -> BigInt {
    composition_sum(l, j, |parts| {
        parts
            .iter()
            .fold(multinomial(l, parts), |acc, &p| acc * odd_double_factorial(p))
    })
}

/// Memoized `Γ^{ℓ,j}` for `0 ≤ j ≤ ℓ ≤ max`, with `Γ^{0,0} = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTable {
    rows: Vec<Vec<BigInt>>,
}

impl GammaTable {
    pub fn new(max_l: usize) -> Self {
        let rows = (0..=max_l)
            .map(|l| (0..=l).map(|j| gamma_enumerate(l, j)).collect())
            .collect();
        GammaTable { rows }
    }

    /// The shared table for `ℓ ≤ GAMMA_TABLE_MAX`.
    pub fn standard() -> &'static GammaTable {
        static TABLE: OnceLock<GammaTable> = OnceLock::new();
        TABLE.get_or_init(|| GammaTable::new(GAMMA_TABLE_MAX))
    }

    pub fn max_l(&self) -> usize {
        self.rows.len() - 1
    }

    /// `Γ^{ℓ,j}`, enumerated on the fly beyond the table. Zero when `j > ℓ`.
    pub fn get(&self, l: usize, j: usize) -> BigInt {
        if j > l {
            return BigInt::zero();
        }
        match self.rows.get(l) {
            Some(row) => row[j].clone(),
            None => gamma_enumerate(l, j),
        }
    }

    /// Copy with one entry replaced; used to check that corruption is detected.
    pub fn with_override(&self, l: usize, j: usize, value: BigInt) -> Result<Self> {
        if l > self.max_l() || j > l {
            return Err(Error::Index {
                index: l,
                detail: format!("no table entry ({l}, {j})"),
            });
        }
        let mut out = self.clone();
        out.rows[l][j] = value;
        Ok(out)
    }
}

/// `Γ^{ℓ,j}` for `1 ≤ j ≤ ℓ`.
pub fn gamma_composition(l: usize, j: usize) -> Result<Rational> {
    if j < 1 || j > l {
        return Err(Error::InvalidArgument(format!(
            "gamma_composition needs 1 <= j <= l, got l={l}, j={j}"
        )));
    }
    Ok(Rational::from_integer(GammaTable::standard().get(l, j)))
}

/// `Γ^{ℓ,j}` for all `j ≤ ℓ ≤ max` from the exponential generating function
/// `Σ_ℓ Γ^{ℓ,j} x^ℓ/ℓ! = (1 − √(1−2x))^j`.
///
/// Shares no code with the enumeration and serves as its oracle.
pub fn gamma_from_generating_function(max_l: usize) -> Vec<Vec<Rational>> {
    // g_k = (2k-3)!!/k! for k ≥ 1.
    let g: Vec<Rational> = (0..=max_l)
        .map(|k| {
            if k == 0 {
                Rational::zero()
            } else {
                Rational::new(odd_double_factorial(k), factorial(k))
            }
        })
        .collect();
    let mut power = vec![Rational::zero(); max_l + 1];
    power[0] = Rational::one();
    let mut rows = vec![vec![Rational::zero(); max_l + 1]; max_l + 1];
    for j in 0..=max_l {
        for l in 0..=max_l {
            rows[l][j] = &power[l] * Rational::from_integer(factorial(l));
        }
        let mut next = vec![Rational::zero(); max_l + 1];
        for (a, pa) in power.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, gb) in g.iter().enumerate().take(max_l + 1 - a) {
                next[a + b] += pa * gb;
            }
        }
        power = next;
    }
    rows
}

/// `D^α (g∘φ)` at a point from the derivatives of `g` at `φ(t)` and of `φ` at `t`.
///
/// `g_derivs[k] = g^{(k)}(φ(t))`, `phi_derivs[k] = φ^{(k)}(t)`; entry 0 of
/// `phi_derivs` is not used. Compositions are ordered, so each block
/// structure is seen `j!` times and the inner sum is divided by `j!`.
pub fn faa_di_bruno<T>(g_derivs: &[T], phi_derivs: &[T], alpha: usize) -> Result<T>
where
    T: Num + Clone + FromPrimitive,
{
    if alpha < 1 || alpha > 20 {
        return Err(Error::InvalidArgument(format!(
            "faa_di_bruno supports 1 <= alpha <= 20, got {alpha}"
        )));
    }
    if g_derivs.len() <= alpha || phi_derivs.len() <= alpha {
        return Err(Error::Index {
            index: alpha,
            detail: format!(
                "need {} derivatives, got g: {}, phi: {}",
                alpha + 1,
                g_derivs.len(),
                phi_derivs.len()
            ),
        });
    }
    let to_t = |v: &BigInt| -> T {
        T::from_u64(u64::try_from(v).expect("multinomial fits in u64 for alpha <= 20"))
            .expect("coefficient type cannot represent an integer")
    };
    let mut total = T::zero();
    for j in 1..=alpha {
        let inner: T = composition_sum(alpha, j, |parts| {
            parts
                .iter()
                .fold(to_t(&multinomial(alpha, parts)), |acc, &p| {
                    acc * phi_derivs[p].clone()
                })
        });
        total = total + g_derivs[j].clone() * inner / to_t(&factorial(j));
    }
    Ok(total)
}

/// Coefficients of `e^{-y} θ^N (y^r e^{cy}) = e^{(c-1)y} y^{r-N} Σ_s κ_s y^{-s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaTable {
    pub order: usize,
    pub r: u32,
    pub c: i32,
    pub kappa: Vec<Rational>,
}

fn check_kappa_args(r: u32, c: i32) -> Result<()> {
    if !(-1..=1).contains(&c) {
        return Err(Error::InvalidArgument(format!("c must be -1, 0 or 1, got {c}")));
    }
    if r > 64 {
        return Err(Error::InvalidArgument(format!("r = {r} is unreasonably large")));
    }
    Ok(())
}

/// κ by applying θ `N` times to the single term `y^r e^{cy}`.
pub fn kappa_operator(order: usize, r: u32, c: i32) -> Result<KappaTable> {
    check_kappa_args(r, c)?;
    let poly = ExpPoly::monomial(Rational::one(), r as i32, c)
        .apply_theta_n(order)
        .shift_rate(-1);
    let mut kappa = vec![Rational::zero(); order + 1];
    let top = r as i32 - order as i32;
    for t in poly.terms() {
        let s = top - t.power;
        if t.rate != c - 1 || s < 0 || s > order as i32 {
            return Err(Error::Consistency(format!(
                "term y^{}e^({}y) outside the expected shape",
                t.power, t.rate
            )));
        }
        kappa[s as usize] = t.coeff;
    }
    Ok(KappaTable {
        order,
        r,
        c,
        kappa,
    })
}

/// κ by the closed combinatorial sum
///
/// ```text
/// κ_s = c^{N-s}/(N-s)! Σ_{ℓ=N-s}^{N} C(N,ℓ) 2^{N-ℓ} Π_{q<N-ℓ}(r/2 − q) (−1)^{ℓ-N+s} Γ^{ℓ,N-s}.
/// ```
///
/// The powers of 2 are those of the `y` variable; in `t = y²/2` they would
/// carry an extra `2^{-r/2}`.
pub fn kappa_combinatorial(order: usize, r: u32, c: i32, gamma: &GammaTable) -> Result<KappaTable> {
    check_kappa_args(r, c)?;
    let n = order;
    let half_r = ratio(r as i64, 2);
    let binomial = |a: usize, b: usize| factorial(a) / (factorial(b) * factorial(a - b));
    let falling = |len: usize| {
        (0..len).fold(Rational::one(), |acc, q| {
            acc * (&half_r - Rational::from_integer(BigInt::from(q)))
        })
    };
    let c_big = Rational::from_integer(BigInt::from(c));
    let mut kappa = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let k = n - s;
        let mut sum = Rational::zero();
        for l in k..=n {
            let g = gamma.get(l, k);
            if g.is_zero() {
                continue;
            }
            let mut term = Rational::from_integer(binomial(n, l) * (BigInt::one() << (n - l)) * g)
                * falling(n - l);
            if (l - k) % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        let pre = num_traits::pow(c_big.clone(), k) / Rational::from_integer(factorial(k));
        kappa.push(pre * sum);
    }
    Ok(KappaTable {
        order,
        r,
        c,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn composition_counts() {
        assert_eq!(Compositions::new(0, 0).count(), 1);
        assert_eq!(Compositions::new(3, 0).count(), 0);
        assert_eq!(Compositions::new(2, 3).count(), 0);
        assert_eq!(Compositions::new(5, 1).collect::<Vec<_>>(), vec![vec![5]]);
        let c: Vec<_> = Compositions::new(4, 2).collect();
        assert_eq!(c, vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        // C(ℓ-1, j-1) compositions.
        assert_eq!(Compositions::new(14, 7).count(), 1716);
    }

    #[test]
    fn gamma_examples() {
        for l in 1..=12 {
            assert_eq!(gamma_composition(l, l).unwrap(), Rational::from_integer(factorial(l)));
        }
        assert_eq!(gamma_composition(2, 1).unwrap(), ratio(1, 1));
        for l in 2..=12usize {
            let expected = Rational::from_integer(factorial(l) * BigInt::from(l - 1)) / ratio(2, 1);
            assert_eq!(gamma_composition(l, l - 1).unwrap(), expected);
        }
        assert!(gamma_composition(3, 0).is_err());
        assert!(gamma_composition(3, 4).is_err());
    }

    #[test]
    fn gamma_enumeration_matches_generating_function() {
        let egf = gamma_from_generating_function(GAMMA_TABLE_MAX);
        let table = GammaTable::standard();
        for l in 0..=GAMMA_TABLE_MAX {
            for j in 0..=l {
                assert_eq!(Rational::from_integer(table.get(l, j)), egf[l][j], "l={l} j={j}");
            }
        }
    }

    #[test]
    fn faa_low_orders() {
        let g = [0.0, 2.0, 3.0, 5.0];
        let phi = [0.0, 7.0, 11.0, 13.0];
        assert_eq!(faa_di_bruno(&g, &phi, 1).unwrap(), 2.0 * 7.0);
        assert_eq!(faa_di_bruno(&g, &phi, 2).unwrap(), 3.0 * 49.0 + 2.0 * 11.0);
        assert!(faa_di_bruno(&g, &phi[..2], 2).is_err());
    }

    #[test]
    fn faa_exp_of_square() {
        // g = exp, φ = t², t = 1.
        let e = 1f64.exp();
        let g = [e; 4];
        let phi = [1.0, 2.0, 2.0, 0.0];
        let d3 = faa_di_bruno(&g, &phi, 3).unwrap();
        let f = |t: f64| (t * t).exp();
        let h = 1e-2;
        let fd = (f(1.0 + 2.0 * h) - 2.0 * f(1.0 + h) + 2.0 * f(1.0 - h) - f(1.0 - 2.0 * h))
            / (2.0 * h * h * h);
        assert!((d3 - fd).abs() / d3 < 1e-3);
        // Exact: (8t³ + 12t) e^{t²} at t = 1.
        assert!((d3 - 20.0 * e).abs() < 1e-12 * d3);
    }

    #[test]
    fn faa_exact_rationals() {
        let g: Vec<Rational> = (0..5).map(|k| ratio(k + 1, 1)).collect();
        let phi: Vec<Rational> = (0..5).map(|k| ratio(1, k + 1)).collect();
        let v = faa_di_bruno(&g, &phi, 2).unwrap();
        assert_eq!(v, ratio(3, 1) * ratio(1, 4) + ratio(2, 1) * ratio(1, 3));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_operator(0, 3, 1).unwrap().kappa, vec![ratio(1, 1)]);
        assert_eq!(
            kappa_operator(1, 2, 1).unwrap().kappa,
            vec![ratio(1, 1), ratio(2, 1)]
        );
        let gamma = GammaTable::standard();
        for (n, r, c) in [(2, 2, 1), (4, 4, -1)] {
            assert_eq!(
                kappa_combinatorial(n, r, c, gamma).unwrap(),
                kappa_operator(n, r, c).unwrap()
            );
        }
    }

    #[test]
    fn kappa_top_entry_product_formula() {
        for n in 0..=6usize {
            for r in 0..=8u32 {
                let top = &kappa_operator(n, r, 1).unwrap().kappa[n];
                let expected = (0..n).fold(Rational::one(), |acc, q| {
                    acc * Rational::from_integer(BigInt::from(r as i64 - 2 * q as i64))
                });
                assert_eq!(top, &expected);
            }
        }
    }

    #[test]
    fn kappa_even_polynomial_dies() {
        for n in 3..=10usize {
            let r = n - 2;
            for k in (0..=(n as i64 - 4)).filter(|k| k % 2 == (n as i64) % 2) {
                let poly = ExpPoly::monomial(Rational::one(), (r as i64 + k) as i32, 0)
                    .apply_theta_n(r);
                assert!(poly.is_zero(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn kappa_agreement_full_grid() {
        let gamma = GammaTable::standard();
        for n in 0..=6usize {
            for r in 0..=8u32 {
                for c in -1..=1 {
                    let a = kappa_combinatorial(n, r, c, gamma).unwrap();
                    let b = kappa_operator(n, r, c).unwrap();
                    assert_eq!(a, b, "N={n} r={r} c={c}");
                }
            }
        }
    }

    #[test]
    fn corrupted_gamma_breaks_kappa() {
        let bad = GammaTable::standard()
            .with_override(3, 2, BigInt::from(7))
            .unwrap();
        let a = kappa_combinatorial(4, 4, 1, &bad).unwrap();
        assert_ne!(a, kappa_operator(4, 4, 1).unwrap());
        assert!(a.kappa[2].to_f64().is_some());
    }
}
