//! The isotropic cone `{z ∈ ℂ^{n+1} : z·z = 0, z ≠ 0}` as a model of `T*S^n \ 0`.
//!
//! A cone point is `z = ρ(e + i s)` with `e, s` orthonormal; in double-angular
//! coordinates `z = r(cos θ e(φ) + i sin θ e(ψ))` with `θ = π/4`, `r = √2 ρ`
//! and the constraint `H(φ, ψ) = e(φ)·e(ψ) = 0`.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Complex;

/// Margin below which a chart's sine product counts as degenerate.
pub const CHART_MARGIN: f64 = 1e-3;

/// Default log-uniform radius range of the sampler.
pub const DEFAULT_RHO_RANGE: (f64, f64) = (0.5, 5.0);

#[derive(Clone, Debug, PartialEq)]
pub struct AngularCoords {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub theta: f64,
    pub r: f64,
}

fn normalize_angles(angles: &[f64]) -> Result<Vec<f64>> {
    angles
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if !a.is_finite() {
                return Err(Error::InvalidArgument(format!("angle {i} is not finite")));
            }
            if i == 0 {
                Ok(a.rem_euclid(TAU))
            } else if (0.0..PI).contains(&a) {
                Ok(a)
            } else {
                Err(Error::InvalidArgument(format!(
                    "angle {} = {a} outside [0, π)",
                    i + 1
                )))
            }
        })
        .collect()
}

impl AngularCoords {
    /// Wraps the first angles into `[0, 2π)` and checks the others lie in `[0, π)`.
    pub fn new(phi: Vec<f64>, psi: Vec<f64>, theta: f64, r: f64) -> Result<Self> {
        if phi.len() != psi.len() || phi.is_empty() {
            return Err(Error::InvalidArgument("phi and psi must have equal nonzero length".into()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
        }
        Ok(AngularCoords {
            phi: normalize_angles(&phi)?,
            psi: normalize_angles(&psi)?,
            theta,
            r,
        })
    }

    /// `z = r(cos θ e(φ) + i sin θ e(ψ))`.
    pub fn embed(&self) -> Vec<Complex> {
        let e = sphere_embed(&self.phi);
        let s = sphere_embed(&self.psi);
        let (c, sn) = (self.theta.cos(), self.theta.sin());
        e.iter()
            .zip(&s)
            .map(|(a, b)| Complex::new(self.r * c * a, self.r * sn * b))
            .collect()
    }
}

/// `e_1 = Π_{i≤n} sin φ_i`, `e_k = (Π_{i≤n+1-k} sin φ_i) cos φ_{n+2-k}` for `k ≥ 2`.
pub fn sphere_embed(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    let mut e = vec![0.0; n + 1];
    // prefix[i] = Π_{t<i} sin φ_t (0-based)
    let mut prefix = 1.0;
    for (i, &a) in angles.iter().enumerate() {
        // The coordinate closed off by angle i is e_{n+1-i} (1-based), index n-i.
        e[n - i] = prefix * a.cos();
        prefix *= a.sin();
    }
    e[0] = prefix;
    e
}

/// `jac[k][i] = ∂e_k/∂φ_i` (0-based).
pub fn sphere_jacobian(angles: &[f64]) -> Vec<Vec<f64>> {
    let n = angles.len();
    let (sines, cosines): (Vec<f64>, Vec<f64>) = angles.iter().map(|a| a.sin_cos()).unzip();
    let mut jac = vec![vec![0.0; n]; n + 1];
    for i in 0..n {
        // Coordinate index n - t is prefix(t) cos φ_t; index 0 is prefix(n).
        for t in 0..=n {
            let k = n - t;
            let mut v = 1.0;
            let uses_cos = t < n;
            for q in 0..t {
                v *= if q == i { cosines[q] } else { sines[q] };
            }
            if uses_cos {
                v *= if t == i { -sines[t] } else { cosines[t] };
            }
            let depends = i < t || (uses_cos && i == t);
            jac[k][i] = if depends { v } else { 0.0 };
        }
    }
    jac
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The sine product `Π_{j<n} sin φ_j sin ψ_j` and the head part `H̃` of
/// `H = cos(φ_n − ψ_n) Π + H̃`, from the nested form
/// `H = c_1 + s_1(c_2 + s_2(… + s_{n-1} cos(φ_n − ψ_n)))`.
fn chart_parts(phi_head: &[f64], psi_head: &[f64]) -> (f64, f64) {
    let mut product = 1.0;
    let mut head = 0.0;
    for (a, b) in phi_head.iter().zip(psi_head) {
        head += product * a.cos() * b.cos();
        product *= a.sin() * b.sin();
    }
    (product, head)
}

fn check_pair(phi: &[f64], psi: &[f64]) -> Result<()> {
    if phi.len() != psi.len() || phi.is_empty() {
        return Err(Error::InvalidArgument("phi and psi must have equal nonzero length".into()));
    }
    Ok(())
}

/// `H(φ, ψ) = e(φ)·e(ψ)` by the dot product, self-checked against the
/// expanded chart form to 1e-13.
pub fn constraint_h(phi: &[f64], psi: &[f64]) -> Result<f64> {
    check_pair(phi, psi)?;
    let direct = dot(&sphere_embed(phi), &sphere_embed(psi));
    let n = phi.len();
    let (product, head) = chart_parts(&phi[..n - 1], &psi[..n - 1]);
    let expanded = (phi[n - 1] - psi[n - 1]).cos() * product + head;
    if (direct - expanded).abs() > 1e-13 {
        return Err(Error::SelfCheck(format!(
            "constraint routes disagree: {direct} vs {expanded}"
        )));
    }
    Ok(direct)
}

/// `(∂H/∂φ, ∂H/∂ψ)` from the dot-product form.
pub fn constraint_gradient(phi: &[f64], psi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_pair(phi, psi)?;
    let (e, s) = (sphere_embed(phi), sphere_embed(psi));
    let (je, js) = (sphere_jacobian(phi), sphere_jacobian(psi));
    let n = phi.len();
    let grad_phi = (0..n).map(|i| (0..=n).map(|k| je[k][i] * s[k]).sum()).collect();
    let grad_psi = (0..n).map(|i| (0..=n).map(|k| e[k] * js[k][i]).sum()).collect();
    Ok((grad_phi, grad_psi))
}

/// True iff `|H| ≤ tol` and `|∇H|_∞ ≤ tol`.
pub fn is_singular(phi: &[f64], psi: &[f64], tol: f64) -> Result<bool> {
    let h = constraint_h(phi, psi)?;
    let (gp, gs) = constraint_gradient(phi, psi)?;
    let grad = gp.iter().chain(&gs).fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(h.abs() <= tol && grad <= tol)
}

/// Both solutions `ψ_n` of `H = 0` with the other angles held fixed.
///
/// Only branches that land in the angle's range are kept (`[0, 2π)` when
/// `n = 1`, else `[0, π)`), so one or two values are returned.
pub fn solve_chart(phi: &[f64], psi_head: &[f64]) -> Result<Vec<f64>> {
    let n = phi.len();
    if n == 0 || psi_head.len() + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "need n angles and n-1 head angles, got {} and {}",
            n,
            psi_head.len()
        )));
    }
    let (product, head) = chart_parts(&phi[..n - 1], psi_head);
    if product.abs() < CHART_MARGIN {
        return Err(Error::DegenerateChart { product });
    }
    let target = -head / product;
    if target.abs() > 1.0 {
        return Err(Error::NoSolution(format!("|H̃/Π| = {} > 1", target.abs())));
    }
    let alpha = target.acos();
    let phin = phi[n - 1];
    let upper = if n == 1 { TAU } else { PI };
    let mut out = Vec::with_capacity(2);
    for seed in [phin - alpha, phin + alpha] {
        let mut psin = seed;
        for _ in 0..4 {
            let f = (phin - psin).cos() * product + head;
            let fp = (phin - psin).sin() * product;
            if fp == 0.0 {
                break;
            }
            psin -= f / fp;
        }
        let mut psin = psin.rem_euclid(TAU);
        if psin > TAU - 1e-12 {
            // A root just below zero wraps to the top of the circle.
            psin = 0.0;
        }
        if psin < upper && !out.iter().any(|&v: &f64| (v - psin).abs() < 1e-12) {
            out.push(psin);
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolution("no branch inside [0, π)".into()));
    }
    let mut full = psi_head.to_vec();
    full.push(0.0);
    for &v in &out {
        *full.last_mut().unwrap() = v;
        let h = constraint_h(phi, &full)?;
        if h.abs() > 1e-12 {
            return Err(Error::SelfCheck(format!("chart solve left residual {h:e}")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    pub z: Vec<Complex>,
    pub rho: f64,
    pub e: Vec<f64>,
    pub s: Vec<f64>,
}

impl ConePoint {
    pub fn from_pair(rho: f64, e: Vec<f64>, s: Vec<f64>) -> Self {
        let z = e
            .iter()
            .zip(&s)
            .map(|(a, b)| Complex::new(rho * a, rho * b))
            .collect();
        ConePoint { z, rho, e, s }
    }

    pub fn norm(&self) -> f64 {
        self.z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|z·z| / |z|²`.
    pub fn isotropy_residual(&self) -> f64 {
        let q: Complex = self.z.iter().map(|w| w * w).sum();
        q.norm() / self.z.iter().map(|w| w.norm_sqr()).sum::<f64>()
    }

    /// `max(|e·s|, |e·e − 1|, |s·s − 1|)`.
    pub fn ortho_residual(&self) -> f64 {
        dot(&self.e, &self.s)
            .abs()
            .max((dot(&self.e, &self.e) - 1.0).abs())
            .max((dot(&self.s, &self.s) - 1.0).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Orthopair,
    Chart,
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = dot(&v, &v).sqrt();
    (norm > 1e-8).then(|| v.into_iter().map(|x| x / norm).collect())
}

fn draw_rho<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    let (lo, hi) = (range.0.ln(), range.1.ln());
    (lo + (hi - lo) * rng.random::<f64>()).exp()
}

fn draw_angles<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| rng.random::<f64>() * if i == 0 { TAU } else { PI })
        .collect()
}

/// Draws one point; returns the point and the number of rejected attempts.
fn sample_one(n: usize, seed: u64, index: usize, mode: SampleMode, range: (f64, f64), budget: usize) -> Result<(ConePoint, usize)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let rho = draw_rho(&mut rng, range);
    let mut retries = 0;
    loop {
        if retries > budget {
            return Err(Error::RetryBudget(budget));
        }
        let candidate = match mode {
            SampleMode::Orthopair => {
                let e = unit((0..=n).map(|_| rng.sample(StandardNormal)).collect());
                let raw: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
                e.and_then(|e| {
                    let proj = dot(&raw, &e);
                    let s = unit(raw.iter().zip(&e).map(|(x, y)| x - proj * y).collect())?;
                    // Second pass removes the rounding left by the first.
                    let proj = dot(&s, &e);
                    let s = unit(s.iter().zip(&e).map(|(x, y)| x - proj * y).collect())?;
                    Some((e, s))
                })
            }
            SampleMode::Chart => {
                let phi = draw_angles(&mut rng, n);
                let mut psi = draw_angles(&mut rng, n);
                let pick = rng.random::<bool>();
                let solved = match solve_chart(&phi, &psi[..n - 1]) {
                    Ok(b) => Some((phi.clone(), b)),
                    Err(Error::DegenerateChart { .. }) | Err(Error::NoSolution(_)) => {
                        // H is symmetric, so the roles of φ and ψ can be swapped.
                        solve_chart(&psi, &phi[..n - 1]).ok().map(|b| {
                            let swapped = psi.clone();
                            psi = phi.clone();
                            (swapped, b)
                        })
                    }
                    Err(e) => return Err(e),
                };
                solved.map(|(first, branches)| {
                    psi[n - 1] = if pick { branches[branches.len() - 1] } else { branches[0] };
                    (sphere_embed(&first), sphere_embed(&psi))
                })
            }
        };
        match candidate {
            Some((e, s)) => {
                let point = ConePoint::from_pair(rho, e, s);
                if point.ortho_residual() <= 1e-12 {
                    return Ok((point, retries));
                }
                retries += 1;
            }
            None => retries += 1,
        }
    }
}

/// Deterministic cone sample; each index draws from its own generator stream.
pub fn sample_cone(n: usize, count: usize, seed: u64, mode: SampleMode) -> Result<Vec<ConePoint>> {
    sample_cone_in(n, count, seed, mode, DEFAULT_RHO_RANGE)
}

pub fn sample_cone_in(n: usize, count: usize, seed: u64, mode: SampleMode, rho_range: (f64, f64)) -> Result<Vec<ConePoint>> {
    if n < 1 || count < 1 {
        return Err(Error::InvalidArgument("need n >= 1 and count >= 1".into()));
    }
    if !(rho_range.0 > 0.0 && rho_range.0 <= rho_range.1) {
        return Err(Error::InvalidArgument(format!("bad rho range {rho_range:?}")));
    }
    let budget = 100 * count;
    let drawn = (0..count)
        .into_par_iter()
        .map(|i| sample_one(n, seed, i, mode, rho_range, budget))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = drawn.iter().map(|(_, r)| r).sum();
    if total > budget {
        return Err(Error::RetryBudget(budget));
    }
    Ok(drawn.into_iter().map(|(p, _)| p).collect())
}

/// Inverse of [`sphere_embed`] for a unit vector; generic points round-trip.
pub fn sphere_angles(v: &[f64]) -> Vec<f64> {
    let n = v.len() - 1;
    let sigma: f64 = if v[0] < 0.0 { -1.0 } else { 1.0 };
    // prefix[k] = |(v_1, …, v_k)|
    let mut prefix = vec![0.0f64; n + 1];
    for k in 1..=n {
        prefix[k] = prefix[k - 1].hypot(v[k - 1]);
    }
    let mut angles = Vec::with_capacity(n);
    angles.push((sigma * prefix[n]).atan2(v[n]).rem_euclid(TAU));
    for j in 2..=n {
        angles.push(prefix[n + 1 - j].atan2(sigma * v[n + 1 - j]));
    }
    angles
}

/// `(r, θ, φ, ψ)` of a point with nonzero real and imaginary parts.
pub fn ambient_angles(z: &[Complex]) -> Result<AngularCoords> {
    if z.len() < 2 {
        return Err(Error::InvalidArgument("need at least two coordinates".into()));
    }
    let re: Vec<f64> = z.iter().map(|w| w.re).collect();
    let im: Vec<f64> = z.iter().map(|w| w.im).collect();
    let (nr, ni) = (dot(&re, &re).sqrt(), dot(&im, &im).sqrt());
    if nr == 0.0 || ni == 0.0 {
        return Err(Error::UndefinedAngle(
            "real or imaginary part vanishes".into(),
        ));
    }
    let e: Vec<f64> = re.iter().map(|x| x / nr).collect();
    let s: Vec<f64> = im.iter().map(|x| x / ni).collect();
    Ok(AngularCoords {
        phi: sphere_angles(&e),
        psi: sphere_angles(&s),
        theta: ni.atan2(nr),
        r: nr.hypot(ni),
    })
}

/// `θ` of every cone point.
pub const CONE_THETA: f64 = FRAC_PI_4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePointRecord {
    pub index: usize,
    pub rho: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub isotropy_residual: f64,
    pub ortho_residual: f64,
}

impl ConePointRecord {
    pub fn new(index: usize, p: &ConePoint) -> Self {
        ConePointRecord {
            index,
            rho: p.rho,
            re: p.z.iter().map(|w| w.re).collect(),
            im: p.z.iter().map(|w| w.im).collect(),
            isotropy_residual: p.isotropy_residual(),
            ortho_residual: p.ortho_residual(),
        }
    }
}

/// CSV header for points in `ℂ^{dim}`.
pub fn csv_header(dim: usize) -> Vec<String> {
    let mut h = vec!["index".to_string(), "rho".to_string()];
    h.extend((1..=dim).map(|k| format!("re_z{k}")));
    h.extend((1..=dim).map(|k| format!("im_z{k}")));
    h.push("isotropy_residual".into());
    h.push("ortho_residual".into());
    h
}

pub fn csv_row(r: &ConePointRecord) -> Vec<String> {
    let f = |x: f64| format!("{x:.16e}");
    let mut row = vec![r.index.to_string(), f(r.rho)];
    row.extend(r.re.iter().map(|&x| f(x)));
    row.extend(r.im.iter().map(|&x| f(x)));
    row.push(f(r.isotropy_residual));
    row.push(f(r.ortho_residual));
    row
}

/// Writes the sample as CSV rows (header included, no metadata line).
pub fn write_csv<W: Write>(points: &[ConePoint], out: W) -> Result<()> {
    let dim = points.first().map_or(0, |p| p.z.len());
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
    w.write_record(csv_header(dim)).map_err(io)?;
    for (i, p) in points.iter().enumerate() {
        w.write_record(csv_row(&ConePointRecord::new(i, p))).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))
}

pub fn to_json(points: &[ConePoint]) -> Result<String> {
    let records: Vec<_> = points
        .iter()
        .enumerate()
        .map(|(i, p)| ConePointRecord::new(i, p))
        .collect();
    serde_json::to_string_pretty(&records)
        .map_err(|e| Error::InvalidArgument(format!("json output failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::central_diff4;
    use proptest::prelude::{prop, prop_assert, proptest};

    fn random_pair(rng: &mut ChaCha20Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
        (draw_angles(rng, n), draw_angles(rng, n))
    }

    #[test]
    fn embed_examples() {
        let e = sphere_embed(&[0.0, 0.0, 0.0]);
        assert_eq!(e, vec![0.0, 0.0, 0.0, 1.0]);
        let e = sphere_embed(&[PI / 2.0]);
        assert!((e[0] - 1.0).abs() < 1e-16 && e[1].abs() < 1e-16);
    }

    #[test]
    fn constraint_examples() {
        let phi = [0.3, 1.1, 2.0];
        assert!((constraint_h(&phi, &phi).unwrap() - 1.0).abs() < 1e-15);
        assert!(constraint_h(&[0.0], &[PI / 2.0]).unwrap().abs() < 1e-16);
    }

    #[test]
    fn constraint_routes_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=8);
            let (phi, psi) = random_pair(&mut rng, n);
            constraint_h(&phi, &psi).unwrap();
        }
    }

    #[test]
    fn gradient_matches_fd() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let (phi, psi) = random_pair(&mut rng, n);
            let (gp, gs) = constraint_gradient(&phi, &psi).unwrap();
            let scale = gp.iter().chain(&gs).fold(1e-3f64, |m, g| m.max(g.abs()));
            for i in 0..n {
                let fd = central_diff4(
                    |t| {
                        let mut p = phi.clone();
                        p[i] = t;
                        dot(&sphere_embed(&p), &sphere_embed(&psi))
                    },
                    phi[i],
                    1e-3,
                );
                assert!((fd - gp[i]).abs() <= 1e-6 * scale);
                let fd = central_diff4(
                    |t| {
                        let mut q = psi.clone();
                        q[i] = t;
                        dot(&sphere_embed(&phi), &sphere_embed(&q))
                    },
                    psi[i],
                    1e-3,
                );
                assert!((fd - gs[i]).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn singular_examples() {
        let phi = [0.4, 1.2, 0.9];
        assert!(!is_singular(&phi, &phi, 1e-8).unwrap());
        let psi_head = [PI / 2.0 + 0.1, PI / 2.0];
        let branches = solve_chart(&phi, &psi_head).unwrap();
        let psi = [psi_head[0], psi_head[1], branches[0]];
        assert!(constraint_h(&phi, &psi).unwrap().abs() < 1e-12);
        assert!(!is_singular(&phi, &psi, 1e-8).unwrap());
    }

    #[test]
    fn solve_chart_examples() {
        let b = solve_chart(&[0.7], &[]).unwrap();
        assert_eq!(b.len(), 2);
        for v in b {
            assert!(((0.7f64 - v).cos()).abs() < 1e-14);
        }
        assert!(matches!(
            solve_chart(&[0.5, 1.0, 1.0], &[0.0, 1.0]),
            Err(Error::DegenerateChart { .. })
        ));
        assert!(matches!(
            solve_chart(&[0.1, 1.0, 1.0], &[0.1, 1.0]),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn both_branches_returned_when_in_range() {
        // φ_n = π/2 with target 0 gives ψ_n ∈ {0, π}; the root at 0 must not wrap away.
        let b = solve_chart(&[PI / 2.0, PI / 2.0], &[PI / 2.0]).unwrap();
        assert!(b.iter().any(|&v| v.abs() < 1e-12));
        let b = solve_chart(&[1.0, 1.5], &[2.0]).unwrap();
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!(constraint_h(&[1.0, 1.5], &[2.0, *v]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_invariants_and_determinism() {
        for mode in [SampleMode::Orthopair, SampleMode::Chart] {
            let pts = sample_cone(4, 1000, 42, mode).unwrap();
            for p in &pts {
                assert!(p.isotropy_residual() <= 1e-12);
                assert!(p.ortho_residual() <= 1e-12);
                assert!((p.norm() / 2f64.sqrt() - p.rho).abs() <= 1e-12 * p.rho);
                assert!((0.5..=5.0).contains(&p.rho));
            }
            let again = sample_cone(4, 1000, 42, mode).unwrap();
            assert_eq!(to_json(&pts).unwrap(), to_json(&again).unwrap());
            assert_ne!(pts, sample_cone(4, 1000, 43, mode).unwrap());
        }
    }

    #[test]
    fn modes_have_roundoff_level_residuals() {
        let med = |mode| {
            let mut r: Vec<f64> = sample_cone(5, 400, 3, mode)
                .unwrap()
                .iter()
                .map(|p| p.isotropy_residual())
                .collect();
            r.sort_by(f64::total_cmp);
            r[r.len() / 2]
        };
        let (a, b) = (med(SampleMode::Orthopair), med(SampleMode::Chart));
        assert!(a < 1e-15 && b < 1e-15, "{a} {b}");
    }

    #[test]
    fn ambient_angle_examples() {
        let z = [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let a = ambient_angles(&z).unwrap();
        assert!((a.theta - CONE_THETA).abs() < 1e-15);
        assert!((a.r / 2f64.sqrt() - 1.0).abs() < 1e-15);
        let e = sphere_embed(&a.phi);
        let s = sphere_embed(&a.psi);
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15);
        assert!(s[0].abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
        assert!(ambient_angles(&[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn ambient_round_trip() {
        for mode in [SampleMode::Orthopair, SampleMode::Chart] {
            for p in sample_cone(6, 200, 9, mode).unwrap() {
                let a = ambient_angles(&p.z).unwrap();
                assert!((a.theta - CONE_THETA).abs() < 1e-12);
                let back = a.embed();
                let err: f64 = back.iter().zip(&p.z).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                assert!(err <= 1e-12 * p.norm());
                let normalized = AngularCoords::new(a.phi.clone(), a.psi.clone(), a.theta, a.r).unwrap();
                assert_eq!(normalized.phi, a.phi);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let pts = sample_cone(3, 2, 1, SampleMode::Orthopair).unwrap();
        let mut buf = Vec::new();
        write_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "index,rho,re_z1,re_z2,re_z3,re_z4,im_z1,im_z2,im_z3,im_z4,isotropy_residual,ortho_residual");
        assert_eq!(text.lines().count(), 3);
    }

    proptest! {
        #[test]
        fn embedding_is_unit(angles in prop::collection::vec(0.0f64..PI, 1..10), first in 0.0f64..TAU) {
            let mut a = angles;
            a[0] = first;
            let e = sphere_embed(&a);
            prop_assert!((dot(&e, &e).sqrt() - 1.0).abs() <= 1e-15);
        }
    }
}
