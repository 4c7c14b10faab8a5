//! The obstruction term `(1/2m) ∂∂̄ log T_m` on the isotropic cone.
//!
//! `T_m` is radial: `log T_m = n log(2m) + log F(m|z|/√2)`. Its formal
//! asymptotics come from the algebraic part `A(y) = Σ b_j y^{-j}` of `F`:
//!
//! ```text
//! 1/A² = 1/b₀² + Σ β_j y^{-j},    A″A − A′² = Σ μ_j y^{-j-2},    A′A = Σ ν_j y^{-j-1}.
//! ```
//!
//! Components are reported as `(1/2m) ∂_{z_j} ∂_{z̄_l} log T_m`, the Hermitian
//! matrix of the real (1,1)-form `(i/2m) ∂∂̄ log T_m` in the basis
//! `i dz_j ∧ dz̄_l`.

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kempf::{check_n, EvalPoint};
use crate::numeric::NeumaierSum;
use crate::tyz::{cached_coefficients, GeneratingFunction};
use crate::{Complex, Rational, RationalLaurent};

/// `A(y)` through order `order`, with `b_j = 0` past the finite expansion.
pub fn algebraic_part(n: u32, order: usize) -> Result<RationalLaurent> {
    let e = cached_coefficients(n)?;
    Ok(RationalLaurent::new(
        (0..=order)
            .map(|j| e.b.get(j).cloned().unwrap_or_else(Rational::zero))
            .collect(),
    ))
}

/// `1/A²` through order `order` by squaring and Neumann inversion, checked
/// against the geometric series `1/(1+τ)² = Σ (k+1)(−τ)^k` with
/// `A = b₀(1+τ)`. Entry 0 is `1/b₀²`, entry `j ≥ 1` is `β_j`.
pub fn inverse_square_series_of_laurent(a: &RationalLaurent, order: usize) -> Result<Vec<Rational>> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be >= 1".into()));
    }
    let a = a.truncate(order);
    let by_inversion = a.square().inverse()?;

    let b0 = a.coeff(0);
    let tau = RationalLaurent::new(
        (0..=order)
            .map(|j| if j == 0 { Rational::zero() } else { a.coeff(j) / &b0 })
            .collect(),
    );
    let minus_tau = tau.scale(&-Rational::one());
    let mut power = RationalLaurent::one(order);
    let mut geometric = RationalLaurent::zero(order);
    for k in 0..=order {
        geometric = geometric.add(&power.scale(&Rational::from_integer((k as i64 + 1).into())));
        power = power.mul(&minus_tau);
    }
    let geometric = geometric.scale(&(Rational::one() / (&b0 * &b0)));

    if by_inversion != geometric {
        return Err(Error::Consistency(
            "inverse-square series: inversion and geometric routes disagree".into(),
        ));
    }
    Ok(by_inversion.coeffs().to_vec())
}

/// `[1/b₀², β_1, …, β_N]` for dimension `n`.
pub fn inverse_square_series(n: u32, order: usize) -> Result<Vec<Rational>> {
    inverse_square_series_of_laurent(&algebraic_part(n, order)?, order)
}

/// `|1/F(y)² − (1/b₀² + Σ_{j≤N} β_j y^{-j})|`.
///
/// The algebraic misfit `(1 − A² S_N)/A²` is formed from exact coefficients,
/// since `1 − A² S_N` cancels through order `N`; the exponentially small
/// part `−(2AΦ + Φ²)/(A²F²)` is added in floating point.
pub fn inverse_square_misfit(n: u32, order: usize, y: f64) -> Result<f64> {
    check_n(n)?;
    let degree = 2 * (n as usize - 2) + order;
    let a = algebraic_part(n, degree)?;
    let series = inverse_square_series(n, order)?;
    let s = RationalLaurent::new((0..=degree).map(|j| series.get(j).cloned().unwrap_or_else(Rational::zero)).collect());
    let residual = RationalLaurent::one(degree).sub(&a.square().mul(&s));
    if (0..=order).any(|j| !residual.coeff(j).is_zero()) {
        return Err(Error::Consistency("1 - A^2 S_N does not vanish through order N".into()));
    }
    let a_val = a.evaluate(y)?;
    let algebraic = residual.evaluate(y)? / (a_val * a_val);
    let e = cached_coefficients(n)?;
    let mut phi = NeumaierSum::new();
    for (j, p) in e.p.iter().enumerate() {
        phi.add(p.to_f64().unwrap_or(f64::NAN) * y.powi(-(j as i32)));
    }
    let phi = (-2.0 * y).exp() * phi.value();
    let f = a_val + phi;
    let exponential = -(2.0 * a_val * phi + phi * phi) / (a_val * a_val * f * f);
    Ok((algebraic + exponential).abs())
}

/// Closed-form `μ_j`, `ν_j` for `j = 0..=jmax` (entry 0 is zero).
#[derive(Clone, Debug, PartialEq)]
pub struct MuNu {
    pub mu: Vec<Rational>,
    pub nu: Vec<Rational>,
}

/// Closed forms
/// `μ_j = j(j+1) b₀b_j + Σ_{ℓ=1}^{j-1} ℓ(2ℓ+1−j) b_ℓ b_{j-ℓ}`,
/// `ν_j = −(j b₀b_j + Σ_{ℓ=1}^{j-1} ℓ b_ℓ b_{j-ℓ})`,
/// checked against the Laurent products `A″A − A′²` and `A′A`.
pub fn mu_nu_of_laurent(a: &RationalLaurent, jmax: usize) -> Result<MuNu> {
    let b = |j: usize| a.coeff(j);
    let int = |v: i64| Rational::from_integer(v.into());
    let mut mu = vec![Rational::zero(); jmax + 1];
    let mut nu = vec![Rational::zero(); jmax + 1];
    for j in 1..=jmax {
        let ji = j as i64;
        let mut m = int(ji * (ji + 1)) * b(0) * b(j);
        let mut v = int(ji) * b(0) * b(j);
        for l in 1..j {
            let li = l as i64;
            m += int(li * (2 * li + 1 - ji)) * b(l) * b(j - l);
            v += int(li) * b(l) * b(j - l);
        }
        mu[j] = m;
        nu[j] = -v;
    }

    let order = jmax + 2;
    let a = a.truncate(order);
    let d1 = a.differentiate();
    let d2 = d1.differentiate();
    let mu_product = d2.mul(&a).sub(&d1.square());
    let nu_product = d1.mul(&a);
    for j in 1..=jmax {
        if mu_product.coeff(j + 2) != mu[j] || nu_product.coeff(j + 1) != nu[j] {
            return Err(Error::Consistency(format!(
                "closed-form mu/nu disagree with the Laurent products at j = {j}"
            )));
        }
    }
    Ok(MuNu { mu, nu })
}

pub fn mu_nu_coefficients(n: u32, jmax: usize) -> Result<MuNu> {
    check_n(n)?;
    if jmax > 2 * (n as usize - 2) {
        return Err(Error::Index {
            index: jmax,
            detail: format!("jmax must be <= 2(n-2) = {}", 2 * (n - 2)),
        });
    }
    mu_nu_of_laurent(&algebraic_part(n, jmax + 2)?, jmax)
}

/// `G1 = d/dρ log F(mρ) = m F′/F` and `G2 = d²/dρ² log F(mρ) = m² (F″F − F′²)/F²`.
pub fn log_derivatives(n: u32, m: u32, rho: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    let pt = EvalPoint::new(m, rho)?;
    let f = GeneratingFunction::cached(n)?;
    let y = pt.xi();
    let (v, d1, d2) = (f.value(y)?, f.derivative(y)?, f.second_derivative(y)?);
    let mf = m as f64;
    let g1 = mf * d1 / v;
    let g2 = mf * mf * (d2 / v - (d1 / v) * (d1 / v));
    Ok((g1, g2))
}

/// Largest `|z·z|/|z|²` accepted as on the cone.
pub const CONE_TOLERANCE: f64 = 1e-10;

fn norm(z: &[Complex]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
}

/// Radial data shared by all components at one point.
struct Radial {
    u: f64,
    g1: f64,
    g2: f64,
    m: f64,
}

fn radial(n: u32, m: u32, z: &[Complex]) -> Result<Radial> {
    check_n(n)?;
    if z.len() != n as usize + 1 {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, expected n+1 = {}",
            z.len(),
            n + 1
        )));
    }
    let u = norm(z);
    if !(u >= std::f64::consts::SQRT_2 * crate::kempf::RHO_CUTOFF) {
        return Err(Error::NearVertex { norm: u });
    }
    let quad: Complex = z.iter().map(|w| w * w).sum();
    let residual = quad.norm() / (u * u);
    if residual > CONE_TOLERANCE {
        return Err(Error::OffCone { residual });
    }
    let (g1, g2) = log_derivatives(n, m, u / std::f64::consts::SQRT_2)?;
    Ok(Radial { u, g1, g2, m: m as f64 })
}

impl Radial {
    fn component(&self, z: &[Complex], j: usize, l: usize) -> Complex {
        // G(u) = log F(m u/√2): G′ = G1/√2, G″ = G2/2.
        let gp = self.g1 / std::f64::consts::SQRT_2;
        let gpp = 0.5 * self.g2;
        let u = self.u;
        let w = z[j].conj() * z[l];
        let delta = if j == l { 1.0 } else { 0.0 };
        let ddbar = w * (gpp / (4.0 * u * u) - gp / (4.0 * u * u * u)) + gp * delta / (2.0 * u);
        ddbar / (2.0 * self.m)
    }
}

/// `(1/2m) ∂_{z_j} ∂_{z̄_l} log T_m` at a cone point (0-based indices).
pub fn obstruction_component(n: u32, m: u32, z: &[Complex], j: usize, l: usize) -> Result<Complex> {
    let r = radial(n, m, z)?;
    for idx in [j, l] {
        if idx >= z.len() {
            return Err(Error::Index {
                index: idx,
                detail: format!("component index must be < n+1 = {}", z.len()),
            });
        }
    }
    Ok(r.component(z, j, l))
}

/// All components at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionMatrix {
    pub values: Vec<Vec<Complex>>,
    pub max_abs: f64,
    /// `max |E_{jl} − conj(E_{lj})|` relative to `max_abs`.
    pub hermitian_residual: f64,
}

pub fn obstruction_matrix(n: u32, m: u32, z: &[Complex]) -> Result<ObstructionMatrix> {
    let r = radial(n, m, z)?;
    let dim = z.len();
    let values: Vec<Vec<Complex>> = (0..dim)
        .map(|j| (0..dim).map(|l| r.component(z, j, l)).collect())
        .collect();
    let max_abs = values.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let mut herm = 0.0f64;
    for j in 0..dim {
        for l in 0..dim {
            herm = herm.max((values[j][l] - values[l][j].conj()).norm());
        }
    }
    let hermitian_residual = if max_abs > 0.0 { herm / max_abs } else { herm };
    Ok(ObstructionMatrix {
        values,
        max_abs,
        hermitian_residual,
    })
}

/// `m²|z|³ · max_{j,l} |E_{jl}|`.
pub fn normalized_magnitude(n: u32, m: u32, z: &[Complex]) -> Result<f64> {
    let mat = obstruction_matrix(n, m, z)?;
    let u = norm(z);
    Ok((m as f64).powi(2) * u.powi(3) * mat.max_abs)
}

/// The point `(|z|/√2)(1, i, 0, …, 0)` of the cone.
pub fn canonical_point(n: u32, norm: f64) -> Vec<Complex> {
    let rho = norm / std::f64::consts::SQRT_2;
    let mut z = vec![Complex::new(0.0, 0.0); n as usize + 1];
    z[0] = Complex::new(rho, 0.0);
    z[1] = Complex::new(0.0, rho);
    z
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingConstant {
    /// `(m, m²|z|³ max|E|)` per scanned `m`.
    pub values: Vec<(u32, f64)>,
    /// Richardson extrapolation of the last two values, assuming an `O(1/m)` correction.
    pub limit_estimate: f64,
    /// Relative change over the last doubling.
    pub relative_spread: f64,
    /// False when the spread exceeds 10%.
    pub converged: bool,
}

/// Trend of `m²|z|³ · max|E|` over a geometric list of `m`.
pub fn leading_constant_scan(n: u32, z: &[Complex], m_list: &[u32]) -> Result<LeadingConstant> {
    if m_list.len() < 4 {
        return Err(Error::InvalidArgument("need at least 4 values of m".into()));
    }
    let q = m_list[1] as f64 / m_list[0] as f64;
    let geometric = q > 1.0
        && m_list
            .windows(2)
            .all(|w| ((w[1] as f64 / w[0] as f64) - q).abs() <= 1e-9 * q);
    if !geometric {
        return Err(Error::InvalidArgument("m values must form an increasing geometric sequence".into()));
    }
    let values = m_list
        .iter()
        .map(|&m| normalized_magnitude(n, m, z).map(|v| (m, v)))
        .collect::<Result<Vec<_>>>()?;
    let last = values[values.len() - 1].1;
    let prev = values[values.len() - 2].1;
    let limit_estimate = (q * last - prev) / (q - 1.0);
    let relative_spread = (last - prev).abs() / last.abs();
    Ok(LeadingConstant {
        values,
        limit_estimate,
        relative_spread,
        converged: relative_spread <= 0.10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{central_diff4, rel_diff, second_diff4};
    use crate::ratio;

    #[test]
    fn beta_examples() {
        for n in 3..=8u32 {
            let e = cached_coefficients(n).unwrap();
            let s = inverse_square_series(n, 4).unwrap();
            assert_eq!(s[0], Rational::one() / (&e.b[0] * &e.b[0]));
            let b0 = &e.b[0];
            assert_eq!(s[1], ratio(-2, 1) * &e.b[1] / (b0 * b0 * b0));
        }
        let constant = RationalLaurent::new(vec![ratio(3, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)]);
        let s = inverse_square_series_of_laurent(&constant, 3).unwrap();
        assert_eq!(s[0], ratio(1, 9));
        assert!(s[1..].iter().all(Zero::is_zero));
    }

    #[test]
    fn beta_misfit_decays() {
        for order in 1..=3usize {
            let (y0, y1) = (100.0, 1000.0);
            let m0 = inverse_square_misfit(3, order, y0).unwrap();
            let m1 = inverse_square_misfit(3, order, y1).unwrap();
            let slope = (m1.ln() - m0.ln()) / (y1 / y0).ln();
            assert!(slope <= -(order as f64 + 1.0) + 0.1, "order {order}: slope {slope}");
        }
    }

    #[test]
    fn mu_nu_examples() {
        let mn = mu_nu_coefficients(3, 2).unwrap();
        assert_eq!(mn.mu[1], ratio(1, 2));
        assert_eq!(mn.nu[1], ratio(-1, 4));
        let constant = RationalLaurent::new(vec![ratio(5, 2), ratio(0, 1), ratio(0, 1)]);
        let z = mu_nu_of_laurent(&constant, 4).unwrap();
        assert!(z.mu.iter().chain(&z.nu).all(Zero::is_zero));
        for n in 3..=8u32 {
            let jmax = 2 * (n as usize - 2);
            let mn = mu_nu_coefficients(n, jmax).unwrap();
            let e = cached_coefficients(n).unwrap();
            assert_eq!(mn.mu[1], ratio(2, 1) * &e.b[0] * &e.b[1]);
            assert_eq!(mn.nu[1], -(&e.b[0] * &e.b[1]));
        }
        assert!(mu_nu_coefficients(3, 3).is_err());
    }

    #[test]
    fn log_derivative_limits_and_fd() {
        for n in 3..=6u32 {
            let e = cached_coefficients(n).unwrap();
            let b1_over_b0 = (&e.b[1] / &e.b[0]).to_f64().unwrap();
            let (m, rho) = (4u32, 1e4);
            let (g1, _) = log_derivatives(n, m, rho).unwrap();
            let scaled = rho * rho * m as f64 * g1;
            assert!(rel_diff(scaled, -b1_over_b0) < 1e-3, "n={n}");
        }
        for n in 3..=6u32 {
            for &(m, rho) in &[(1u32, 0.7), (3, 2.0), (8, 1.5)] {
                let lf = |r: f64| GeneratingFunction::cached(n).unwrap().value(m as f64 * r).unwrap().ln();
                let (g1, g2) = log_derivatives(n, m, rho).unwrap();
                let h = 1e-3 * rho;
                assert!(rel_diff(g1, central_diff4(lf, rho, h)) < 1e-6);
                assert!(rel_diff(g2, second_diff4(lf, rho, h)) < 1e-6);
            }
        }
    }

    #[test]
    fn component_guards() {
        let z = canonical_point(3, 2f64.sqrt());
        assert!(obstruction_component(3, 4, &z, 0, 1).is_ok());
        let mut off = z.clone();
        off[2] = Complex::new(0.3, 0.0);
        assert!(matches!(obstruction_component(3, 4, &off, 0, 1), Err(Error::OffCone { .. })));
        let tiny = canonical_point(3, 1e-7);
        assert!(matches!(obstruction_component(3, 4, &tiny, 0, 1), Err(Error::NearVertex { .. })));
        assert!(obstruction_component(3, 4, &z, 0, 4).is_err());
    }

    #[test]
    fn hermitian_and_scaling() {
        let z = canonical_point(4, 2f64.sqrt());
        let mat = obstruction_matrix(4, 16, &z).unwrap();
        assert!(mat.hermitian_residual <= 1e-14);
        let a = obstruction_matrix(4, 64, &z).unwrap().max_abs;
        let b = obstruction_matrix(4, 128, &z).unwrap().max_abs;
        assert!((a / b - 4.0).abs() < 0.2);
    }

    #[test]
    fn leading_constant_matches_asymptotics() {
        // m²|z|³ max|E| → (√2/2)(b₁/b₀) max|3w/4 − δ/2| = (b₁/b₀)/(2√2) at the canonical point.
        let z = canonical_point(3, 2f64.sqrt());
        let scan = leading_constant_scan(3, &z, &[64, 128, 256, 512]).unwrap();
        assert!(scan.converged);
        assert!(rel_diff(scan.limit_estimate, 1.0 / (2.0 * 2f64.sqrt())) < 1e-2, "{scan:?}");
        assert!(leading_constant_scan(3, &z, &[8, 16, 32]).is_err());
        assert!(leading_constant_scan(3, &z, &[8, 16, 24, 32]).is_err());
    }
}
