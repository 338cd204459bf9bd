//! The random model X_α(n) = ∏_λ 𝒳(λ)^{ord(n+α, λ)} and Monte Carlo tools around ζ_N(σ, X_α).
//!
//! Phases θ_λ are drawn from ChaCha8 with stream = sample index and word position
//! derived from the λ-key, so a phase depends only on (seed, sample, λ).

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cassels::{weighted_sum, FamilyTable};
use crate::error::{param, Result};
use crate::quad_field::{factor_u128, AlphaFamily, AlphaParam, PrimeKey, SplitType};

/// An element of Λ: a prime ideal, the fundamental unit, or a rational prime (α = 1 model).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LambdaKey {
    Unit,
    Prime(PrimeKey),
    Rational(u64),
}

impl LambdaKey {
    /// Injective code used to position the key's substream.
    pub fn code(&self) -> u64 {
        match *self {
            LambdaKey::Unit => 0,
            LambdaKey::Prime(k) => {
                let t = match k.split_type {
                    SplitType::Inert => 1,
                    SplitType::Ramified => 2,
                    SplitType::Split => 3 + k.which as u64,
                };
                k.p * 8 + t
            }
            LambdaKey::Rational(p) => p * 8 + 7,
        }
    }
}

/// θ_λ for one draw of the phases: a pure function of (seed, stream, λ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseAssignment {
    pub seed: u64,
    pub stream: u64,
}

impl PhaseAssignment {
    pub fn new(seed: u64, stream: u64) -> Self {
        PhaseAssignment { seed, stream }
    }

    pub fn theta(&self, key: &LambdaKey) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(key.code() as u128 * 2);
        TAU * rng.gen::<f64>()
    }
}

/// Ord vectors of n+α for 0 ≤ n ≤ N, over a dense list of λ-keys.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomModel {
    pub alpha: f64,
    pub n_max: u64,
    pub keys: Vec<LambdaKey>,
    ords: Vec<Vec<(usize, i64)>>,
}

impl RandomModel {
    pub fn quadratic(fam: &AlphaFamily, n_max: u64) -> Result<Self> {
        let raw: Vec<Vec<(LambdaKey, i64)>> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let o = fam.ord(n)?;
                let mut v: Vec<(LambdaKey, i64)> = o.prime_part.iter().map(|(k, &a)| (LambdaKey::Prime(*k), a)).collect();
                if o.unit_exp != 0 {
                    v.push((LambdaKey::Unit, o.unit_exp));
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_raw(fam.alpha_f64(), n_max, raw))
    }

    /// α = 1: X_1(n) = ∏_p 𝒳(p)^{v_p(n+1)}, so X_1(0) ≡ 1.
    pub fn rational_one(n_max: u64) -> Result<Self> {
        let raw = (0..=n_max)
            .map(|n| Ok(factor_u128(n as u128 + 1)?.into_iter().map(|(p, e)| (LambdaKey::Rational(p), e as i64)).collect()))
            .collect::<Result<_>>()?;
        Ok(Self::from_raw(1.0, n_max, raw))
    }

    pub fn from_alpha(al: &AlphaParam, n_max: u64) -> Result<Self> {
        Self::quadratic(&al.family()?, n_max)
    }

    fn from_raw(alpha: f64, n_max: u64, raw: Vec<Vec<(LambdaKey, i64)>>) -> Self {
        let mut index: BTreeMap<LambdaKey, usize> = BTreeMap::new();
        for v in &raw {
            for (k, _) in v {
                let i = index.len();
                index.entry(*k).or_insert(i);
            }
        }
        let mut keys = vec![LambdaKey::Unit; index.len()];
        for (k, &i) in &index {
            keys[i] = *k;
        }
        let ords = raw.iter().map(|v| v.iter().map(|(k, a)| (index[k], *a)).collect()).collect();
        RandomModel { alpha, n_max, keys, ords }
    }

    /// Exponents of n+α over `keys`.
    pub fn ord(&self, n: u64) -> &[(usize, i64)] {
        &self.ords[n as usize]
    }

    pub fn thetas(&self, ph: &PhaseAssignment) -> Vec<f64> {
        self.keys.iter().map(|k| ph.theta(k)).collect()
    }

    fn x_from(&self, n: u64, th: &[f64]) -> Complex64 {
        let phi: f64 = self.ords[n as usize].iter().map(|&(i, a)| a as f64 * th[i]).sum();
        Complex64::from_polar(1.0, phi.rem_euclid(TAU))
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n > self.n_max {
            return Err(param(format!("n = {n} exceeds the model's N = {}", self.n_max)));
        }
        Ok(())
    }

    pub fn sample_x(&self, n: u64, ph: &PhaseAssignment) -> Result<Complex64> {
        self.check_n(n)?;
        let phi: f64 = self.ords[n as usize].iter().map(|&(i, a)| a as f64 * ph.theta(&self.keys[i])).sum();
        Ok(Complex64::from_polar(1.0, phi.rem_euclid(TAU)))
    }

    /// X_α(0..=n) for one draw.
    pub fn x_all(&self, n: u64, ph: &PhaseAssignment) -> Result<Vec<Complex64>> {
        self.check_n(n)?;
        let th = self.thetas(ph);
        Ok((0..=n).map(|m| self.x_from(m, &th)).collect())
    }

    /// ζ_N(σ, X_α) = Σ_{n≤N} X_α(n)(n+α)^{−σ}.
    pub fn zeta_n_sample(&self, sigma: f64, n: u64, ph: &PhaseAssignment) -> Result<Complex64> {
        check_sigma_half(sigma)?;
        let xs = self.x_all(n, ph)?;
        Ok(xs.iter().enumerate().map(|(m, x)| x * (m as f64 + self.alpha).powf(-sigma)).sum())
    }

    /// M samples of ζ_N(σ, X_α); sample i uses stream i.
    pub fn draw_samples(&self, sigma: f64, n: u64, m: usize, seed: u64) -> Result<Vec<Complex64>> {
        check_sigma_half(sigma)?;
        self.check_n(n)?;
        if m == 0 {
            return Err(param("sample count must be positive"));
        }
        let used = self.keys_up_to(n);
        let w: Vec<f64> = (0..=n).map(|k| (k as f64 + self.alpha).powf(-sigma)).collect();
        Ok((0..m as u64)
            .into_par_iter()
            .map(|i| {
                let ph = PhaseAssignment::new(seed, i);
                let mut th = vec![0.0; self.keys.len()];
                for &k in &used {
                    th[k] = ph.theta(&self.keys[k]);
                }
                (0..=n).map(|k| self.x_from(k, &th) * w[k as usize]).sum()
            })
            .collect())
    }

    fn keys_up_to(&self, n: u64) -> Vec<usize> {
        let mut v: Vec<usize> = self.ords[..=n as usize].iter().flatten().map(|&(i, _)| i).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Σ_j e_j·ord(n_j+α), as a sparse vector over `keys`.
    pub fn combined_ord(&self, ns: &[u64], es: &[i64]) -> Result<Vec<(usize, i64)>> {
        if ns.len() != es.len() {
            return Err(param("ns and es differ in length"));
        }
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (&n, &e) in ns.iter().zip(es) {
            self.check_n(n)?;
            for &(i, a) in &self.ords[n as usize] {
                *acc.entry(i).or_insert(0) += e * a;
            }
        }
        Ok(acc.into_iter().filter(|(_, v)| *v != 0).collect())
    }

    /// MC estimate of E[∏X_α(n_j)^{e_j}].
    pub fn moment_mc(&self, ns: &[u64], es: &[i64], m: usize, seed: u64) -> Result<Complex64> {
        let c = self.combined_ord(ns, es)?;
        if c.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let s: Complex64 = (0..m as u64)
            .into_par_iter()
            .map(|i| {
                let ph = PhaseAssignment::new(seed, i);
                let phi: f64 = c.iter().map(|&(k, a)| a as f64 * ph.theta(&self.keys[k])).sum();
                Complex64::from_polar(1.0, phi.rem_euclid(TAU))
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        Ok(s / m as f64)
    }

    /// E[ζ_N^μ·conj(ζ_N)^ν], summing weights over tuples whose ord sums agree.
    pub fn moment_exact(&self, mu: u32, nu: u32, sigma: f64, n: u64) -> Result<f64> {
        if mu + nu > 3 || n > 64 {
            return Err(param(format!("moment_exact needs μ+ν ≤ 3 and N ≤ 64, got ({mu},{nu}), N={n}")));
        }
        check_sigma_half(sigma)?;
        self.check_n(n)?;
        let a = self.tuple_classes(mu, sigma, n);
        let b = self.tuple_classes(nu, sigma, n);
        Ok(a.iter().filter_map(|(k, wa)| b.get(k).map(|wb| wa * wb)).sum())
    }

    fn tuple_classes(&self, len: u32, sigma: f64, n: u64) -> BTreeMap<Vec<(usize, i64)>, f64> {
        let mut out: BTreeMap<Vec<(usize, i64)>, f64> = BTreeMap::new();
        let mut idx = vec![0u64; len as usize];
        loop {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            let mut w = 1.0;
            for &m in &idx {
                w *= (m as f64 + self.alpha).powf(-sigma);
                for &(i, a) in &self.ords[m as usize] {
                    *acc.entry(i).or_insert(0) += a;
                }
            }
            let key: Vec<(usize, i64)> = acc.into_iter().filter(|(_, v)| *v != 0).collect();
            *out.entry(key).or_insert(0.0) += w;
            // odometer over [0, n]^len
            let mut j = 0;
            loop {
                if j == idx.len() {
                    return out;
                }
                idx[j] += 1;
                if idx[j] <= n {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }
}

fn check_sigma_half(sigma: f64) -> Result<()> {
    if sigma > 0.5 {
        Ok(())
    } else {
        Err(param(format!("sigma must exceed 1/2, got {sigma}")))
    }
}

/// ψ_w(z) = exp(i·Re(z·conj(w))).
pub fn psi(w: Complex64, z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, (z * w.conj()).re)
}

pub fn empirical_char(w: Complex64, samples: &[Complex64]) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(param("no samples"));
    }
    let s: Complex64 = samples.iter().map(|&z| psi(w, z)).sum();
    Ok(s / samples.len() as f64)
}

/// J₀ by its power series; accurate to ~1e-13 for |x| ≤ 12.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..80 {
        term *= q / (m * m) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Points on a golden-angle spiral filling |w| ≤ radius; the first point is 0.
pub fn w_grid(radius: f64, count: usize) -> Vec<Complex64> {
    const GOLDEN: f64 = 2.399_963_229_728_653;
    let den = (count.max(2) - 1) as f64;
    (0..count).map(|k| Complex64::from_polar(radius * k as f64 / den, GOLDEN * k as f64)).collect()
}

/// Smallest N with Σ_{n>N}(n+α)^{−2σ} below `tol²`, using the integral bound.
pub fn truncation_for_tail(sigma: f64, alpha: f64, tol: f64) -> Result<u64> {
    check_sigma_half(sigma)?;
    let e = 2.0 * sigma - 1.0;
    // Σ_{n>N} ≤ ∫_N^∞ (x+α)^{−2σ} dx = (N+α)^{−e}/e
    let n = ((tol * tol * e).powf(-1.0 / e) - alpha).ceil().max(0.0);
    Ok(n as u64)
}

pub fn hit_probability(samples: &[Complex64], z0: Complex64, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(param("eps must be positive"));
    }
    if samples.is_empty() {
        return Err(param("no samples"));
    }
    Ok(samples.iter().filter(|z| (*z - z0).norm() < eps).count() as f64 / samples.len() as f64)
}

/// Arcs A(θ_n − 2πδ, θ_n + 2πδ) for 0 ≤ n ≤ N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaWindow {
    pub centers: Vec<f64>,
    pub delta: f64,
}

impl OmegaWindow {
    pub fn new(centers: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(param(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        if centers.is_empty() {
            return Err(param("need at least one center"));
        }
        Ok(OmegaWindow { centers, delta })
    }

    pub fn n(&self) -> u64 {
        self.centers.len() as u64 - 1
    }

    pub fn contains(&self, xs: &[Complex64]) -> bool {
        let half = TAU * self.delta;
        self.centers.iter().zip(xs).all(|(c, x)| {
            let d = (x.arg() - c).rem_euclid(TAU);
            d < half || d > TAU - half
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega0Report {
    pub mc_estimate: f64,
    pub std_error: f64,
    pub independent_prediction: f64,
    pub hits: u64,
    pub samples: u64,
    pub zero_hit: bool,
}

pub fn omega0_probability(model: &RandomModel, win: &OmegaWindow, m: usize, seed: u64) -> Result<Omega0Report> {
    let n = win.n();
    model.check_n(n)?;
    if m == 0 {
        return Err(param("sample count must be positive"));
    }
    let used = model.keys_up_to(n);
    let hits: u64 = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let ph = PhaseAssignment::new(seed, i);
            let mut th = vec![0.0; model.keys.len()];
            for &k in &used {
                th[k] = ph.theta(&model.keys[k]);
            }
            let xs: Vec<Complex64> = (0..=n).map(|k| model.x_from(k, &th)).collect();
            win.contains(&xs) as u64
        })
        .sum();
    let p = hits as f64 / m as f64;
    Ok(Omega0Report {
        mc_estimate: p,
        std_error: (p * (1.0 - p) / m as f64).sqrt(),
        independent_prediction: (2.0 * win.delta).powi(n as i32 + 1),
        hits,
        samples: m as u64,
        zero_hit: hits == 0,
    })
}

/// Centers θ_n = arg X_α(n) at the first draw with |ζ_N − z₀| < ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterSearch {
    pub centers: Vec<f64>,
    pub stream: u64,
    pub value: (f64, f64),
}

pub fn find_centers(
    model: &RandomModel,
    sigma: f64,
    n: u64,
    z0: Complex64,
    eps: f64,
    max_draws: u64,
    seed: u64,
) -> Result<Option<CenterSearch>> {
    check_sigma_half(sigma)?;
    for i in 0..max_draws {
        let ph = PhaseAssignment::new(seed, i);
        let xs = model.x_all(n, &ph)?;
        let z: Complex64 = xs.iter().enumerate().map(|(k, x)| x * (k as f64 + model.alpha).powf(-sigma)).sum();
        if (z - z0).norm() < eps {
            let centers = xs.iter().map(|x| x.arg().rem_euclid(TAU)).collect();
            return Ok(Some(CenterSearch { centers, stream: i, value: (z.re, z.im) }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRadiusReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub b_n: f64,
    pub size_k: usize,
    /// Some n ∈ K_α(N) with 2(n+α)^{−σ} > b_N.
    pub dominance: bool,
    /// b_N − 2·max_{n∈K}(n+α)^{−σ}.
    pub margin: f64,
}

pub fn support_radius_check(table: &FamilyTable, n: u64, sigma: f64) -> Result<SupportRadiusReport> {
    let k = table.k_alpha_set(n)?;
    let b_n = weighted_sum(k.iter().copied(), sigma, table.alpha)?;
    let top = k.iter().map(|&m| (m as f64 + table.alpha).powf(-sigma)).fold(0.0, f64::max);
    Ok(SupportRadiusReport { n, b_n, size_k: k.len(), dominance: 2.0 * top > b_n, margin: b_n - 2.0 * top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::Sign;

    fn model(n: u64) -> RandomModel {
        RandomModel::from_alpha(&AlphaParam::new(4, 2, Sign::Plus, 2).unwrap(), n).unwrap()
    }

    #[test]
    fn phases_are_order_independent() {
        let ph = PhaseAssignment::new(7, 3);
        let a = LambdaKey::Rational(5);
        let b = LambdaKey::Unit;
        let (ta, tb) = (ph.theta(&a), ph.theta(&b));
        assert_eq!((ph.theta(&b), ph.theta(&a)), (tb, ta));
        assert_ne!(ta, tb);
        assert_ne!(ph.theta(&a), PhaseAssignment::new(7, 4).theta(&a));
        assert!((0.0..TAU).contains(&ta));
    }

    #[test]
    fn alpha_one_starts_at_one() {
        let m = RandomModel::rational_one(10).unwrap();
        let ph = PhaseAssignment::new(1, 0);
        assert_eq!(m.sample_x(0, &ph).unwrap(), Complex64::new(1.0, 0.0));
        // X_1(1)² = X_1(3) since 2² = 4
        let x1 = m.sample_x(1, &ph).unwrap();
        assert!((x1 * x1 - m.sample_x(3, &ph).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn unit_modulus_and_triangle_bound() {
        let m = model(20);
        let ph = PhaseAssignment::new(11, 2);
        for n in 0..=20 {
            assert!((m.sample_x(n, &ph).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        let z = m.zeta_n_sample(0.8, 20, &ph).unwrap();
        let bound: f64 = (0..=20).map(|n| (n as f64 + m.alpha).powf(-0.8)).sum();
        assert!(z.norm() <= bound);
        let z0 = m.zeta_n_sample(0.8, 0, &ph).unwrap();
        assert!((z0.norm() - m.alpha.powf(-0.8)).abs() < 1e-12);
    }

    #[test]
    fn draws_match_single_samples() {
        let m = model(10);
        let s = m.draw_samples(0.7, 10, 3, 99).unwrap();
        for (i, z) in s.iter().enumerate() {
            let zz = m.zeta_n_sample(0.7, 10, &PhaseAssignment::new(99, i as u64)).unwrap();
            assert!((z - zz).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_moments() {
        let m = model(12);
        assert_eq!(m.moment_exact(1, 0, 0.8, 12).unwrap(), 0.0);
        let diag: f64 = (0..=12).map(|n| (n as f64 + m.alpha).powf(-1.6)).sum();
        assert!((m.moment_exact(1, 1, 0.8, 12).unwrap() - diag).abs() < 1e-12);
        assert!(m.moment_exact(2, 2, 0.8, 12).is_err());
    }

    #[test]
    fn j0_series_vs_quadrature() {
        // J₀(x) = (1/π)∫₀^π cos(x sin t) dt, trapezoid is spectrally accurate here
        for &x in &[0.0, 0.5, 1.0, 2.4048, 3.7, 5.0] {
            let k = 400;
            let q: f64 = (0..k).map(|j| (x * (std::f64::consts::PI * (j as f64 + 0.5) / k as f64).sin()).cos()).sum::<f64>() / k as f64;
            assert!((bessel_j0(x) - q).abs() < 1e-12, "x={x}");
        }
        assert!((bessel_j0(1.0) - 0.7651976866).abs() < 1e-10);
    }

    #[test]
    fn windows_and_hits() {
        let w = OmegaWindow::new(vec![0.0], 0.1).unwrap();
        assert!(w.contains(&[Complex64::from_polar(1.0, -0.5)]));
        assert!(!w.contains(&[Complex64::from_polar(1.0, 0.7)]));
        assert!(OmegaWindow::new(vec![0.0], 0.5).is_err());
        let s = [Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)];
        assert_eq!(hit_probability(&s, Complex64::new(0.0, 0.0), 10.0).unwrap(), 1.0);
        assert_eq!(hit_probability(&s, Complex64::new(1.0, 0.0), 0.5).unwrap(), 0.0);
        assert_eq!(empirical_char(Complex64::new(0.0, 0.0), &s).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn tail_truncation() {
        let n = truncation_for_tail(0.8, 0.5, 0.1).unwrap();
        let tail: f64 = (n + 1..n + 2_000_000).map(|k| (k as f64 + 0.5).powf(-1.6)).sum();
        assert!(tail < 0.01);
    }
}
