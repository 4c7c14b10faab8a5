//! Invariant suite and errata report.
//!
//! Each errata entry pairs a printed identity with the form the oracles
//! support. The suite is what `verify` runs; it never panics, every failure
//! is reported by name.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::exppoly::ExpPoly;
use crate::geometry::{constraint_h, sample_cone, SampleMode};
use crate::kempf::{
    cosh_baseline, one_plus_tau, scaling_residual, series_term_exact, tau_form_sum, tm, Method,
};
use crate::numeric::rel_diff;
use crate::obstruction::{
    algebraic_part, canonical_point, inverse_square_series, inverse_square_series_of_laurent,
    mu_nu_coefficients, obstruction_matrix,
};
use crate::tyz::faa::gamma_from_generating_function;
use crate::tyz::{
    generating_function, kappa_combinatorial, kappa_operator, remainder_decay_fit,
    tyz_coefficients, GammaTable, GeneratingFunction,
};
use crate::{ratio, Rational, RationalExpPoly, RationalLaurent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Reconciled,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrataEntry {
    pub id: &'static str,
    pub identity: &'static str,
    pub reference_form: &'static str,
    pub reconciled_form: &'static str,
    pub oracle: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: &'static str,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
    pub errata: Vec<ErrataEntry>,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .chain(self.errata.iter().filter(|e| e.status == Status::Failed).map(|e| e.id))
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Replace `Γ^{ℓ,j}` by a wrong value before running (negative control).
    pub corrupt_gamma: Option<(usize, usize)>,
}

/// Outcome of one oracle: pass flag plus a human-readable summary.
type Outcome = (bool, String);

fn outcome(r: Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| (false, format!("error: {e}")))
}

fn check(name: &'static str, r: Result<Outcome>) -> CheckResult {
    let (passed, detail) = outcome(r);
    CheckResult { name, passed, detail }
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

// ---- invariant checks -------------------------------------------------------

fn series_closed_agreement() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 3..=8 {
        for xi in [0.1, 1.0, 10.0, 100.0, 300.0] {
            let a = tm(n, 1, xi, Method::Series)?;
            let b = tm(n, 1, xi, Method::Closed)?;
            worst = worst.max(rel_diff(a, b));
        }
    }
    Ok((worst <= 1e-10, format!("max relative difference {worst:.3e}")))
}

fn scaling_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 3..=6 {
        for m in [2, 5, 17] {
            for rho in [0.5, 1.0, 3.0] {
                worst = worst.max(scaling_residual(n, m, rho)?);
            }
        }
    }
    Ok((worst <= 1e-12, format!("max residual {worst:.3e}")))
}

fn coefficient_identities() -> Result<Outcome> {
    for n in 3..=12u32 {
        let e = tyz_coefficients(n)?;
        let two = ratio(2, 1);
        if &e.b[0] * &two != Rational::one() {
            return Ok((false, format!("2 b_0 != 1 for n = {n}")));
        }
        if &e.b[1] * &two != ratio(((n - 2) * (n - 1)) as i64, 2) {
            return Ok((false, format!("2 b_1 != (n-2)(n-1)/2 for n = {n}")));
        }
        for (j, (b, p)) in e.b.iter().zip(&e.p).enumerate() {
            let signed = if j % 2 == 0 { b.clone() } else { -b.clone() };
            if *p != signed {
                return Ok((false, format!("p_{j} != (-1)^j b_{j} for n = {n}")));
            }
        }
    }
    Ok((true, "2b_0 = 1, 2b_1 = (n-2)(n-1)/2 and p_j = (-1)^j b_j for n = 3..12".into()))
}

fn finite_expansion() -> Result<Outcome> {
    for n in 3..=12u32 {
        let groups = generating_function(n)?.group_by_rate();
        let rates: Vec<i32> = groups.keys().copied().collect();
        if rates != vec![-2, 0] {
            return Ok((false, format!("n = {n}: rates {rates:?}")));
        }
        for g in groups.values() {
            if g.first_index < 0 || g.last_index() > n as i32 - 2 {
                return Ok((false, format!("n = {n}: Laurent depth exceeds n-2")));
            }
        }
    }
    Ok((true, "rates {0, -2} only, depth <= n-2, n = 3..12".into()))
}

fn gamma_check(table: &GammaTable) -> Result<Outcome> {
    let max = table.max_l();
    let egf = gamma_from_generating_function(max);
    for l in 0..=max {
        for j in 0..=l {
            if Rational::from_integer(table.get(l, j)) != egf[l][j] {
                return Ok((false, format!("Γ^{{{l},{j}}} disagrees with the generating function")));
            }
        }
    }
    for l in 1..=12usize {
        if table.get(l, l) != factorial(l) {
            return Ok((false, format!("Γ^{{{l},{l}}} != {l}!")));
        }
        if l >= 2 && table.get(l, l - 1) * 2 != factorial(l) * BigInt::from(l - 1) {
            return Ok((false, format!("Γ^{{{l},{}}} != ({l}-1) {l}!/2", l - 1)));
        }
    }
    Ok((true, format!("table agrees with (1 - sqrt(1-2x))^j for l <= {max}")))
}

fn kappa_check(table: &GammaTable) -> Result<Outcome> {
    for order in 0..=6 {
        for r in 0..=8 {
            for c in -1..=1 {
                if kappa_combinatorial(order, r, c, table)? != kappa_operator(order, r, c)? {
                    return Ok((false, format!("mismatch at N = {order}, r = {r}, c = {c}")));
                }
            }
        }
    }
    Ok((true, "combinatorial sum equals operator expansion for N <= 6, r <= 8, c in {-1,0,1}".into()))
}

fn mu_nu_check() -> Result<Outcome> {
    for n in 3..=8u32 {
        let f = generating_function(n)?;
        let d1 = f.differentiate();
        let d2 = d1.differentiate();
        let mn = mu_nu_coefficients(n, 2 * (n as usize - 2))?;
        // The rate-0 parts of F-products only see A, so they are exact oracles.
        let mu_poly = (&(&d2 * &f) - &(&d1 * &d1)).rate_part(0);
        let nu_poly = (&d1 * &f).rate_part(0);
        let mu_expected = RationalExpPoly::from_terms(
            mn.mu.iter().enumerate().map(|(j, c)| crate::ExpTerm::new(c.clone(), -(j as i32) - 2, 0)),
        );
        let nu_expected = RationalExpPoly::from_terms(
            mn.nu.iter().enumerate().map(|(j, c)| crate::ExpTerm::new(c.clone(), -(j as i32) - 1, 0)),
        );
        if mu_poly != mu_expected || nu_poly != nu_expected {
            return Ok((false, format!("n = {n}: closed forms differ from F-products")));
        }
    }
    Ok((true, "closed forms equal Laurent and exponential-polynomial products, n = 3..8".into()))
}

fn inverse_square_check() -> Result<Outcome> {
    for n in 3..=8u32 {
        inverse_square_series(n, 2 * (n as usize - 2) + 2)?;
    }
    Ok((true, "inversion and geometric routes agree exactly, n = 3..8".into()))
}

fn geometry_check() -> Result<Outcome> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let draw = |rng: &mut rand_chacha::ChaCha20Rng| -> Vec<f64> {
            (0..n)
                .map(|i| rng.random::<f64>() * if i == 0 { std::f64::consts::TAU } else { std::f64::consts::PI })
                .collect()
        };
        let (phi, psi) = (draw(&mut rng), draw(&mut rng));
        constraint_h(&phi, &psi)?;
    }
    let mut worst = 0.0f64;
    for mode in [SampleMode::Orthopair, SampleMode::Chart] {
        for p in sample_cone(4, 100, 5, mode)? {
            worst = worst
                .max(p.isotropy_residual())
                .max(p.ortho_residual())
                .max((p.norm() / std::f64::consts::SQRT_2 - p.rho).abs() / p.rho);
        }
    }
    Ok((worst <= 1e-12, format!("constraint routes agree; worst cone residual {worst:.3e}")))
}

// ---- errata ----------------------------------------------------------------

fn series_prefactor() -> Result<Outcome> {
    let mut worst_two = 0.0f64;
    let mut worst_half = f64::INFINITY;
    for n in 3..=8 {
        for xi in [0.3, 4.0, 60.0] {
            let t = tm(n, 1, xi, Method::Series)?;
            let s = tau_form_sum(n, xi, 1e-17)?;
            worst_two = worst_two.max(rel_diff(t, 2.0 * s));
            worst_half = worst_half.min(rel_diff(t, 0.5 * s));
        }
    }
    Ok((
        worst_two <= 1e-10 && worst_half > 0.5,
        format!("prefactor 2: max rel diff {worst_two:.2e}; prefactor 1/2: min rel diff {worst_half:.2}"),
    ))
}

fn tau_sign() -> Result<Outcome> {
    for n in 3..=8u32 {
        let scale = Rational::from_integer(BigInt::one() << (n - 2));
        for j in 0..=20usize {
            // 1 + τ_j must equal 2^{n-2} (j+n-2)!(2j)!/((2j+n-2)! j!).
            let target = series_term_exact(n, j) * Rational::from_integer(factorial(2 * j)) * &scale;
            let ours = one_plus_tau(n, j);
            if ours != target {
                return Ok((false, format!("n = {n}, j = {j}: 1+τ_j mismatch")));
            }
            let printed = ratio(2, 1) - &ours; // 1 + (1 - ratio)
            if j == 0 && printed == target {
                return Ok((false, "printed sign also fits, adjudication void".into()));
            }
        }
    }
    Ok((true, "1+τ_j = Π(j+i)/(j+i/2) matches the factorial coefficients exactly, n = 3..8, j <= 20".into()))
}

fn cosh_sign() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut printed_gap = f64::INFINITY;
    for y in [0.1f64, 1.0, 3.0] {
        let exact = (-y).exp() * y.cosh();
        let ours = cosh_baseline(3, 1, y)?;
        worst = worst.max(rel_diff(exact, ours));
        printed_gap = printed_gap.min(rel_diff(exact, 0.5 * (1.0 - (-2.0 * y).exp())));
    }
    let limit = tm(5, 1, 1e6, Method::Closed)? / cosh_baseline(5, 1, 1e6)?;
    Ok((
        worst <= 1e-15 && printed_gap > 1e-3 && rel_diff(limit, 2.0) < 1e-4,
        format!("plus sign exact to {worst:.1e}; minus sign off by >= {printed_gap:.2e}; T_m/T0_m -> {limit:.6}"),
    ))
}

fn gamma_subdiagonal(table: &GammaTable) -> Result<Outcome> {
    let egf = gamma_from_generating_function(12);
    for l in 2..=12usize {
        let expected = Rational::from_integer(factorial(l) * BigInt::from(l - 1)) / ratio(2, 1);
        let got = Rational::from_integer(table.get(l, l - 1));
        if got != expected || egf[l][l - 1] != expected {
            return Ok((false, format!("Γ^{{{l},{}}} = {got}, expected {expected}", l - 1)));
        }
    }
    Ok((true, "+(l-1) l!/2 for 2 <= l <= 12 by enumeration and generating function".into()))
}

fn kappa_power(table: &GammaTable) -> Result<Outcome> {
    let (ok, detail) = kappa_check(table)?;
    if !ok {
        return Ok((false, detail));
    }
    for order in 0..=6usize {
        for r in 0..=8u32 {
            let top = &kappa_operator(order, r, 1)?.kappa[order];
            let product = (0..order).fold(Rational::one(), |acc, q| acc * (ratio(r as i64, 2) - ratio(q as i64, 1)));
            let scaled = Rational::from_integer(BigInt::one() << order) * product;
            if *top != scaled {
                return Ok((false, format!("κ_N != 2^N Π(r/2-q) at N = {order}, r = {r}")));
            }
        }
    }
    Ok((true, format!("{detail}; κ_N = 2^N Π_(q<N)(r/2 - q)")))
}

fn closed_form_normalization() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut printed = 0.0f64;
    for n in 3..=8u32 {
        let f = GeneratingFunction::cached(n)?;
        // Printed generator e^y ± e^{-y} is twice cosh or sinh.
        let doubled = ExpPoly::monomial(ratio(1, 1), 0, 1)
            + ExpPoly::monomial(if n % 2 == 0 { ratio(1, 1) } else { ratio(-1, 1) }, 0, -1);
        let doubled = doubled
            .mul_power(n as i32 - 2)
            .apply_theta_n(n as usize - 2)
            .shift_rate(-1);
        for y in [0.5, 2.0, 8.5] {
            let reference = crate::kempf::t1_series(n, y, 1e-17)?.value;
            worst = worst.max(rel_diff(2.0 * f.value(y)?, reference));
            printed = printed.max(2.0 * doubled.evaluate(y)? / reference);
        }
    }
    Ok((
        worst <= 1e-12 && (printed - 2.0).abs() < 1e-6,
        format!("corrected form matches series to {worst:.1e}; printed form gives {printed:.9} × T_m"),
    ))
}

fn psi_vanishes() -> Result<Outcome> {
    for n in 3..=12u32 {
        let e = tyz_coefficients(n)?;
        if e.r.iter().any(|r| !r.is_zero()) {
            return Ok((false, format!("n = {n}: nonzero r_j")));
        }
        let mut q = RationalExpPoly::zero();
        for k in (0..=(n as i64 - 4)).filter(|k| k % 2 == (n as i64) % 2) {
            q = q + ExpPoly::monomial(Rational::new(BigInt::one(), factorial(k as usize)), k as i32, 0);
        }
        if !q.mul_power(n as i32 - 2).apply_theta_n(n as usize - 2).is_zero() {
            return Ok((false, format!("n = {n}: θ^(n-2) does not annihilate y^(n-2) Q_n")));
        }
    }
    Ok((true, "rate -1 group empty and θ^(n-2) y^(n-2) Q_n = 0 exactly, n = 3..12".into()))
}

fn mu_one() -> Result<Outcome> {
    for n in 3..=8u32 {
        let e = tyz_coefficients(n)?;
        let mn = mu_nu_coefficients(n, 1)?;
        if mn.mu[1] != ratio(2, 1) * &e.b[0] * &e.b[1] || mn.mu[1] == &e.b[0] * &e.b[1] {
            return Ok((false, format!("n = {n}: μ_1 = {}", mn.mu[1])));
        }
    }
    Ok((true, "μ_1 = 2 b_0 b_1 from A''A - A'^2, n = 3..8".into()))
}

fn mu_index() -> Result<Outcome> {
    // With A = b_0 + b_1/y: A''A - A'^2 = 2b_0b_1/y^3 + b_1^2/y^4, so μ_1 sits at y^{-3}.
    let a = RationalLaurent::new(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(0, 1)]);
    let d1 = a.differentiate();
    let prod = d1.differentiate().mul(&a).sub(&d1.square());
    let ok = prod.coeff(3) == ratio(1, 2) && prod.coeff(2).is_zero();
    Ok((ok, "μ_j multiplies y^(-j-2) in A''A - A'^2 (y^(-j-1) after multiplying by y)".into()))
}

fn beta_normalization() -> Result<Outcome> {
    for n in 3..=8u32 {
        let order = n as usize - 2;
        let a = algebraic_part(n, order)?;
        let base = inverse_square_series_of_laurent(&a, order)?;
        let b0 = a.coeff(0);
        let slope = ratio(-2, 1) / (&b0 * &b0 * &b0);
        for j in 1..=order {
            let mut bumped = a.coeffs().to_vec();
            bumped[j] += Rational::one();
            let moved = inverse_square_series_of_laurent(&RationalLaurent::new(bumped), order)?;
            if &moved[j] - &base[j] != slope {
                return Ok((false, format!("n = {n}: ∂β_{j}/∂b_{j} != -2/b_0^3")));
            }
        }
    }
    Ok((true, "∂β_j/∂b_j = -2/b_0^3 exactly (inversion and geometric routes agree), n = 3..8".into()))
}

fn hermitian_convention() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 3..=6u32 {
        let z = canonical_point(n, 1.7);
        for m in [8u32, 32] {
            worst = worst.max(obstruction_matrix(n, m, &z)?.hermitian_residual);
        }
    }
    Ok((worst <= 1e-14, format!("reported matrix Hermitian to {worst:.1e}; multiplying by i makes it anti-Hermitian")))
}

fn remainder_bound() -> Result<Outcome> {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 3..=5u32 {
        let rho = 1.0;
        let ms: Vec<u32> = (40..=160).step_by(8).collect();
        let fit = remainder_decay_fit(n, rho, &ms)?;
        ok &= fit.bound_ok && rel_diff(fit.slope, -2.0 * rho) <= 0.05;
        detail.push(format!("n={n}: slope {:.4}", fit.slope));
    }
    Ok((ok, format!("{}; the e^(-mρ/2) bound holds but the rate is e^(-2mρ)", detail.join(", "))))
}

fn entry(
    id: &'static str,
    identity: &'static str,
    reference_form: &'static str,
    reconciled_form: &'static str,
    oracle: &'static str,
    r: Result<Outcome>,
) -> ErrataEntry {
    let (ok, detail) = outcome(r);
    ErrataEntry {
        id,
        identity,
        reference_form,
        reconciled_form,
        oracle,
        status: if ok { Status::Reconciled } else { Status::Failed },
        detail,
    }
}

/// Runs every check and adjudication.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let table = match opts.corrupt_gamma {
        None => GammaTable::standard().clone(),
        Some((l, j)) => {
            let standard = GammaTable::standard();
            standard
                .with_override(l, j, standard.get(l, j) + BigInt::one())
                .unwrap_or_else(|_| standard.clone())
        }
    };

    let checks = vec![
        check("series_closed_agreement", series_closed_agreement()),
        check("scaling_identity", scaling_identity()),
        check("coefficient_identities", coefficient_identities()),
        check("finite_expansion", finite_expansion()),
        check("gamma_composition", gamma_check(&table)),
        check("kappa_reconciliation", kappa_check(&table)),
        check("mu_nu_products", mu_nu_check()),
        check("inverse_square_routes", inverse_square_check()),
        check("cone_geometry", geometry_check()),
    ];

    let errata = vec![
        entry(
            "series_prefactor",
            "cosh-perturbation form of T_m",
            "T_m = 2^{-1} m^n e^{-ξ} Σ_j (1+τ_j) ξ^{2j}/(2j)!",
            "T_m = 2 m^n e^{-ξ} Σ_j (1+τ_j) ξ^{2j}/(2j)!  (2^{n-1}/2^{n-2} = 2)",
            "kernel series summed directly, n = 3..8, ξ in {0.3, 4, 60}",
            series_prefactor(),
        ),
        entry(
            "tau_sign",
            "perturbation coefficients τ_j",
            "τ_j = 1 - Π_{i=1}^{n-2} (j+i)/(j+i/2)",
            "τ_j = Π_{i=1}^{n-2} (j+i)/(j+i/2) - 1",
            "exact factorial series coefficients",
            tau_sign(),
        ),
        entry(
            "cosh_baseline_sign",
            "cosh baseline T0_m = m^n e^{-ξ} cosh ξ",
            "m^n (1 - e^{-2mρ})/2",
            "m^n (1 + e^{-2mρ})/2, so T_m/T0_m -> 2",
            "direct evaluation of e^{-y} cosh y",
            cosh_sign(),
        ),
        entry(
            "gamma_subdiagonal_sign",
            "composition sum Γ^{ℓ,ℓ-1}",
            "Γ^{ℓ,ℓ-1} = -(ℓ-1) ℓ!/2",
            "Γ^{ℓ,ℓ-1} = +(ℓ-1) ℓ!/2 (every summand is positive)",
            "composition enumeration and the generating function (1 - sqrt(1-2x))^j",
            gamma_subdiagonal(&table),
        ),
        entry(
            "kappa_power_of_two",
            "coefficients κ_s of e^{-y} θ^N (y^r e^{cy})",
            "κ_N = 2^{N-r/2} Π_{q<N}(r/2 - q); the derivation carries 2^{N-ℓ-r/2}",
            "in the y variable κ_s = c^{N-s}/(N-s)! Σ_{ℓ=N-s}^{N} C(N,ℓ) 2^{N-ℓ} Π_{q<N-ℓ}(r/2-q) (-1)^{ℓ-N+s} Γ^{ℓ,N-s}; κ_N = 2^N Π(r/2-q), the 2^{-r/2} belongs to t = y^2/2",
            "repeated application of θ to y^r e^{cy}, N <= 6, r <= 8, c in {-1,0,1}",
            kappa_power(&table),
        ),
        entry(
            "closed_form_normalization",
            "closed form of T_m through θ^{n-2}",
            "T_m = 2 m^n e^{-ξ} θ^{n-2}[ξ^{n-2}(e^ξ + (-1)^{n-2} e^{-ξ} - polynomial)]",
            "T_m = 2 m^n e^{-ξ} θ^{n-2}[ξ^{n-2}(S_n(ξ) - Q_n(ξ))] with S_n = cosh (n even) or sinh (n odd)",
            "kernel series at ξ in {1/2, 2, 17/2}, n = 3..8",
            closed_form_normalization(),
        ),
        entry(
            "psi_vanishes",
            "rate -1 part Ψ(y) = e^{-y} Σ r_j y^{-j}",
            "Ψ present with coefficients r_j",
            "Ψ ≡ 0: θ^{n-2} annihilates y^{n-2} Q_n, an even polynomial of degree < 2(n-2)",
            "exact exponential-polynomial algebra, n = 3..12",
            psi_vanishes(),
        ),
        entry(
            "mu1_factor",
            "first coefficient μ_1",
            "μ_1 = b_1 b_0",
            "μ_1 = 2 b_0 b_1 (the j = 1 case of j(j+1) b_0 b_j)",
            "Laurent product A''A - A'^2",
            mu_one(),
        ),
        entry(
            "mu_index",
            "position of μ_j",
            "μ_j is the coefficient of y^{-j-2} in y(A''A - A'^2)",
            "μ_j is the coefficient of y^{-j-2} in A''A - A'^2, i.e. of y^{-j-1} in y(A''A - A'^2)",
            "Laurent product with A = b_0 + b_1/y",
            mu_index(),
        ),
        entry(
            "beta_normalization",
            "recursion for β_j in 1/A^2 = 1/b_0^2 + Σ β_j y^{-j}",
            "β_j = -2 b_j/b_0 + (terms in b_1..b_{j-1})",
            "β_j = -2 b_j/b_0^3 + (terms in b_1..b_{j-1}); the recursion lacks a factor 1/b_0^2",
            "exact inversion of A^2 cross-checked by the geometric series",
            beta_normalization(),
        ),
        entry(
            "hermitian_convention",
            "components of the obstruction form",
            "E_m = (i/2m) ∂∂̄ log T_m with components E^{jl} dz_j ∧ dz̄_l",
            "components reported as (1/2m) ∂_j ∂̄_l log T_m, the Hermitian matrix in the basis i dz_j ∧ dz̄_l",
            "Hermitian residual of the computed matrix",
            hermitian_convention(),
        ),
        entry(
            "remainder_rate",
            "decay of the TYZ remainder",
            "|R_m| <= C e^{-mδ/2}",
            "R_m = 2 m^n Φ(mρ) decays like e^{-2mρ}; the printed bound holds with δ = ρ but is not sharp",
            "least-squares fit of ln|R_m| over m in 40..160 at ρ = 1, n = 3..5",
            remainder_bound(),
        ),
    ];

    let all_passed = checks.iter().all(|c| c.passed) && errata.iter().all(|e| e.status == Status::Reconciled);
    VerifyReport {
        version: env!("CARGO_PKG_VERSION"),
        all_passed,
        checks,
        errata,
    }
}
