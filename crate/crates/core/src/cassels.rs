//! Cassels-style decomposition of the family (n+α)𝔞 and the density statistics built on it.
//!
//! Everything is driven by a [`FamilyTable`]: the prime factorizations of (m+α)𝔞
//! for 0 ≤ m ≤ m_max, computed once and shared by the set constructions below.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::quad_field::{
    AlphaFamily, AlphaParam, Factorization, IdealHNF, Omega, PrimeIdealRecord, PrimeKey, SplitType,
};

/// ⌊N ln N⌋, the common upper index of L(N) and M(N).
pub fn upper_index(n: u64) -> Result<u64> {
    if n < 3 {
        return Err(param(format!("N must be at least 3, got {n}")));
    }
    let x = n as f64 * (n as f64).ln();
    Ok(x.floor() as u64)
}

/// L(N) = {N < n ≤ N ln N}. Empty for N = 3.
pub fn range_l(n: u64) -> Result<RangeInclusive<u64>> {
    Ok(n + 1..=upper_index(n)?)
}

/// M(N) = {0 ≤ n ≤ N ln N}.
pub fn range_m(n: u64) -> Result<RangeInclusive<u64>> {
    Ok(0..=upper_index(n)?)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.5 && sigma < 1.0 {
        Ok(())
    } else {
        Err(param(format!("sigma must lie in (1/2, 1), got {sigma}")))
    }
}

/// Σ_{n∈S} (n+α)^{−σ}, summed in the iteration order of `set` (ascending for ranges).
pub fn weighted_sum<I: IntoIterator<Item = u64>>(set: I, sigma: f64, alpha: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(set.into_iter().map(|n| weight(n, sigma, alpha)).sum())
}

#[inline]
fn weight(n: u64, sigma: f64, alpha: f64) -> f64 {
    (n as f64 + alpha).powf(-sigma)
}

/// (n+α)𝔞 = (x_n y_n)·𝔟_n·∏_{𝔭 split} 𝔭^{u_n(𝔭)}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CasselsDecomposition {
    pub n: u64,
    pub xy: u64,
    pub b_ideal: IdealHNF,
    /// u_n(𝔭) for the split primes, sorted by key.
    pub s_part: Vec<(PrimeIdealRecord, u32)>,
}

impl CasselsDecomposition {
    /// N((x_n y_n)𝔟_n).
    pub fn bounded_norm(&self) -> u128 {
        (self.xy as u128).pow(2) * self.b_ideal.norm() as u128
    }

    pub fn reconstruct(&self, omega: Omega) -> Result<IdealHNF> {
        let mut acc = IdealHNF::from_int(self.xy as i128).mul(&self.b_ideal, omega)?;
        for (rec, e) in &self.s_part {
            acc = acc.mul(&rec.hnf.pow(*e, omega)?, omega)?;
        }
        Ok(acc)
    }
}

/// Split a factorization into its inert, ramified and split parts.
pub fn decompose_factorization(n: u64, f: &Factorization, omega: Omega) -> Result<CasselsDecomposition> {
    let mut xy: u64 = 1;
    let mut b = IdealHNF::unit();
    let mut s_part = Vec::new();
    let mul_xy = |xy: u64, p: u64, e: u32| -> Result<u64> {
        p.checked_pow(e).and_then(|q| xy.checked_mul(q)).ok_or(Error::Overflow("x_n y_n"))
    };
    for (rec, e) in f {
        match rec.split_type {
            SplitType::Inert => xy = mul_xy(xy, rec.p, *e)?,
            SplitType::Ramified => {
                // 𝔭² = (p)
                xy = mul_xy(xy, rec.p, e / 2)?;
                if e % 2 == 1 {
                    b = b.mul(&rec.hnf, omega)?;
                }
            }
            SplitType::Split => s_part.push((*rec, *e)),
        }
    }
    Ok(CasselsDecomposition { n, xy, b_ideal: b, s_part })
}

pub fn decompose_n(n: u64, fam: &AlphaFamily) -> Result<CasselsDecomposition> {
    decompose_factorization(n, &fam.factor_n(n)?, fam.field.omega())
}

/// Factorizations of (m+α)𝔞 for 0 ≤ m ≤ m_max, with prime ideals indexed densely.
#[derive(Clone, Debug)]
pub struct FamilyTable {
    pub alpha: f64,
    pub omega: Omega,
    pub facts: Vec<Factorization>,
    ids: Vec<Vec<u32>>,
    n_primes: usize,
}

impl FamilyTable {
    pub fn build(fam: &AlphaFamily, m_max: u64) -> Result<Self> {
        let facts: Vec<Factorization> = (0..=m_max).into_par_iter().map(|m| fam.factor_n(m)).collect::<Result<_>>()?;
        let mut index: BTreeMap<PrimeKey, u32> = BTreeMap::new();
        for f in &facts {
            for (rec, _) in f {
                let k = index.len() as u32;
                index.entry(rec.key()).or_insert(k);
            }
        }
        let ids = facts.iter().map(|f| f.iter().map(|(r, _)| index[&r.key()]).collect()).collect();
        Ok(FamilyTable { alpha: fam.alpha_f64(), omega: fam.field.omega(), facts, ids, n_primes: index.len() })
    }

    /// Table large enough for every N up to `n_max`.
    pub fn for_n(fam: &AlphaFamily, n_max: u64) -> Result<Self> {
        Self::build(fam, upper_index(n_max)?)
    }

    pub fn m_max(&self) -> u64 {
        self.facts.len() as u64 - 1
    }

    fn need(&self, n: u64) -> Result<u64> {
        let top = upper_index(n)?;
        if top > self.m_max() {
            return Err(param(format!("table covers m ≤ {}, N = {n} needs {top}", self.m_max())));
        }
        Ok(top)
    }

    pub fn decomposition(&self, n: u64) -> Result<CasselsDecomposition> {
        let f = self.facts.get(n as usize).ok_or_else(|| param(format!("n = {n} outside table")))?;
        decompose_factorization(n, f, self.omega)
    }

    fn owner_counts(&self, top: u64) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_primes];
        for ids in &self.ids[..=top as usize] {
            for &i in ids {
                counts[i as usize] += 1;
            }
        }
        counts
    }

    fn has_private(&self, n: u64, counts: &[u32]) -> bool {
        self.ids[n as usize].iter().any(|&i| counts[i as usize] == 1)
    }

    /// K_α(N): n ∈ L(N) with a prime divisor dividing no other (m+α)𝔞, m ∈ M(N).
    pub fn k_alpha_set(&self, n: u64) -> Result<Vec<u64>> {
        let top = self.need(n)?;
        let counts = self.owner_counts(top);
        Ok(range_l(n)?.filter(|&m| self.has_private(m, &counts)).collect())
    }

    /// 𝔖_α(N): n ∈ L(N) with p^{u_n(𝔭)} ≤ N ln N for every split 𝔭.
    pub fn s_set(&self, n: u64) -> Result<Vec<u64>> {
        let top = self.need(n)?;
        Ok(range_l(n)?.filter(|&m| self.split_bounded(m, top)).collect())
    }

    /// 𝔗_α(N) = L(N) ∖ 𝔖_α(N).
    pub fn t_set(&self, n: u64) -> Result<Vec<u64>> {
        let top = self.need(n)?;
        Ok(range_l(n)?.filter(|&m| !self.split_bounded(m, top)).collect())
    }

    fn split_bounded(&self, m: u64, top: u64) -> bool {
        self.facts[m as usize]
            .iter()
            .filter(|(r, _)| r.split_type == SplitType::Split)
            .all(|(r, e)| r.p.checked_pow(*e).is_some_and(|q| q <= top))
    }

    pub fn rho(&self, n: u64, sigma: f64) -> Result<f64> {
        let sl = weighted_sum(range_l(n)?, sigma, self.alpha)?;
        if sl == 0.0 {
            return Err(param(format!("L({n}) is empty")));
        }
        Ok(weighted_sum(self.s_set(n)?, sigma, self.alpha)? / sl)
    }

    pub fn sigma_stats(&self, n: u64, sigma: f64) -> Result<SigmaStats> {
        check_sigma(sigma)?;
        let top = self.need(n)?;
        let root = (top as f64).sqrt();
        let rows: Vec<SigmaRow> = range_l(n)?
            .map(|m| {
                let mut r = SigmaRow { n: m, sigma: 0.0, sigma1: 0.0, sigma2: 0.0, sigma3: 0.0 };
                for (rec, u) in self.facts[m as usize].iter().filter(|(r, _)| r.split_type == SplitType::Split) {
                    let vmax = max_power(rec.p, top);
                    let k = (*u).min(vmax);
                    if k == 0 {
                        continue;
                    }
                    let lp = (rec.p as f64).ln();
                    r.sigma += lp * k as f64;
                    r.sigma1 += lp * (k - 1) as f64;
                    if rec.p as f64 > root {
                        r.sigma2 += lp;
                    } else {
                        r.sigma3 += lp;
                    }
                }
                r
            })
            .collect();
        let s_set = self.s_set(n)?;
        let sum_l = weighted_sum(range_l(n)?, sigma, self.alpha)?;
        let log_x = (n as f64 * (n as f64).ln()).ln();
        let base = log_x * sum_l;
        let first = n + 1;
        let (mut a, mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0, 0.0);
        for &m in &s_set {
            let w = weight(m, sigma, self.alpha);
            let r = &rows[(m - first) as usize];
            a += w * r.sigma;
            a1 += w * r.sigma1;
            a2 += w * r.sigma2;
            a3 += w * r.sigma3 * r.sigma3;
        }
        let rho = weighted_sum(s_set.iter().copied(), sigma, self.alpha)? / sum_l;
        let c2 = a2 / base;
        let c3 = a3 / (log_x * base);
        Ok(SigmaStats {
            rows,
            log_x,
            sigma_ratio: a / base,
            two_rho: 2.0 * rho,
            sigma1_ratio: a1 / base,
            sigma2_ratio: c2,
            sigma3_sq_ratio: c3,
            rho_bound_observed: rho_quadratic_bound(c2 + a1 / base, c3),
        })
    }

    pub fn density_report(&self, n: u64, sigma: f64) -> Result<DensityReport> {
        let a = self.alpha;
        let l = range_l(n)?;
        let k = self.k_alpha_set(n)?;
        let mut in_k = vec![false; (self.m_max() + 1) as usize];
        for &m in &k {
            in_k[m as usize] = true;
        }
        let sum_l = weighted_sum(l.clone(), sigma, a)?;
        let sum_k = weighted_sum(k.iter().copied(), sigma, a)?;
        let sum_not_k = weighted_sum(l.filter(|&m| !in_k[m as usize]), sigma, a)?;
        let sum_s = weighted_sum(self.s_set(n)?, sigma, a)?;
        let sum_t = weighted_sum(self.t_set(n)?, sigma, a)?;
        if sum_l == 0.0 {
            return Err(param(format!("L({n}) is empty")));
        }
        let stats = self.sigma_stats(n, sigma)?;
        Ok(DensityReport {
            n,
            sigma,
            sums: DensitySums { l: sum_l, k: sum_k, not_k: sum_not_k, s: sum_s, t: sum_t },
            rho: sum_s / sum_l,
            ratio_k: sum_k / sum_l,
            ratio_not_k: sum_not_k / sum_l,
            size_k: k.len(),
            sigma_ratio: stats.sigma_ratio,
            sigma1_ratio: stats.sigma1_ratio,
            sigma2_ratio: stats.sigma2_ratio,
            sigma3_sq_ratio: stats.sigma3_sq_ratio,
            rho_bound_observed: stats.rho_bound_observed,
            rho_bound_limit: rho_quadratic_bound(0.5, 0.375),
        })
    }

    /// Private-prime ratios for every N in `ns` (ascending), with incremental ownership counts.
    pub fn prop41_scan(&self, ns: RangeInclusive<u64>, sigma: f64) -> Result<Prop41Scan> {
        check_sigma(sigma)?;
        let (lo, hi) = (*ns.start(), *ns.end());
        self.need(hi)?;
        let mut counts = vec![0u32; self.n_primes];
        let mut filled: i64 = -1;
        let mut ratios = Vec::new();
        for n in lo.max(3)..=hi {
            let top = upper_index(n)?;
            while filled < top as i64 {
                filled += 1;
                for &i in &self.ids[filled as usize] {
                    counts[i as usize] += 1;
                }
            }
            let (mut sl, mut sk) = (0.0, 0.0);
            for m in range_l(n)? {
                let w = weight(m, sigma, self.alpha);
                sl += w;
                if self.has_private(m, &counts) {
                    sk += w;
                }
            }
            if sl > 0.0 {
                ratios.push((n, sk / sl));
            }
        }
        let first_hit = ratios.iter().find(|(_, r)| *r > PROP41_THRESHOLD).map(|(n, _)| *n);
        let best = ratios.iter().copied().fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        Ok(Prop41Scan { ratios, first_hit, best })
    }
}

/// Largest v with p^v ≤ top.
fn max_power(p: u64, top: u64) -> u32 {
    let mut v = 0;
    let mut q = 1u64;
    while let Some(nq) = q.checked_mul(p) {
        if nq > top {
            break;
        }
        q = nq;
        v += 1;
    }
    v
}

pub const PROP41_THRESHOLD: f64 = 0.51;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub n: u64,
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

/// Per-n σ values on L(N) and the normalized aggregates over 𝔖_α(N).
///
/// Ratios are divided by log X·Σ_L (or log²X·Σ_L for σ₃²), X = N ln N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaStats {
    pub rows: Vec<SigmaRow>,
    pub log_x: f64,
    pub sigma_ratio: f64,
    pub two_rho: f64,
    pub sigma1_ratio: f64,
    pub sigma2_ratio: f64,
    pub sigma3_sq_ratio: f64,
    /// The quadratic bound evaluated at the observed (σ₁+σ₂, σ₃²) ratios.
    pub rho_bound_observed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySums {
    pub l: f64,
    pub k: f64,
    pub not_k: f64,
    pub s: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub sigma: f64,
    pub sums: DensitySums,
    pub rho: f64,
    #[serde(rename = "ratio_K")]
    pub ratio_k: f64,
    pub ratio_not_k: f64,
    pub size_k: usize,
    pub sigma_ratio: f64,
    pub sigma1_ratio: f64,
    pub sigma2_ratio: f64,
    pub sigma3_sq_ratio: f64,
    pub rho_bound_observed: f64,
    pub rho_bound_limit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop41Scan {
    pub ratios: Vec<(u64, f64)>,
    /// Smallest N with ratio > 0.51.
    pub first_hit: Option<u64>,
    pub best: (u64, f64),
}

/// Larger root of 4ρ² − (4c₂+c₃)ρ + c₂² = 0, i.e. the bound from 2ρ − c₂ ≤ √(c₃ρ).
pub fn rho_quadratic_bound(c2: f64, c3: f64) -> f64 {
    let b = 4.0 * c2 + c3;
    (b + (b * b - 16.0 * c2 * c2).max(0.0).sqrt()) / 8.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma42Report {
    pub max_norm: u128,
    pub argmax: u64,
    pub bound: u128,
    pub pass: bool,
}

/// N((x_n y_n)𝔟_n) ≤ 16d for all 0 ≤ n ≤ n_max.
pub fn check_lemma42(alpha: &AlphaParam, n_max: u64) -> Result<Lemma42Report> {
    let fam = alpha.family()?;
    let norms: Vec<u128> = (0..=n_max)
        .into_par_iter()
        .map(|n| Ok(decompose_n(n, &fam)?.bounded_norm()))
        .collect::<Result<_>>()?;
    let (argmax, max_norm) = norms.iter().enumerate().fold((0, 0), |b, (i, &v)| if v > b.1 { (i as u64, v) } else { b });
    let bound = 16 * alpha.d() as u128;
    Ok(Lemma42Report { max_norm, argmax, bound, pass: max_norm <= bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop41Report {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
}

pub fn check_prop41(n: u64, sigma: f64, alpha: &AlphaParam) -> Result<Prop41Report> {
    let table = FamilyTable::for_n(&alpha.family()?, n)?;
    prop41_from_table(&table, n, sigma)
}

pub fn prop41_from_table(table: &FamilyTable, n: u64, sigma: f64) -> Result<Prop41Report> {
    let lhs = weighted_sum(table.k_alpha_set(n)?, sigma, table.alpha)?;
    let sl = weighted_sum(range_l(n)?, sigma, table.alpha)?;
    let rhs = PROP41_THRESHOLD * sl;
    let ratio = if sl > 0.0 { lhs / sl } else { 0.0 };
    Ok(Prop41Report { lhs, rhs, ratio, holds: lhs > rhs })
}

/// All α = (b ± √d)/a ∈ 𝔸_{c,d} with a ≤ a_max, both signs listed separately.
pub fn enumerate_a_cd(c: f64, d: i64, a_max: i64) -> Result<Vec<AlphaParam>> {
    let field = crate::quad_field::make_field(d)?;
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in 1..a {
            if crate::quad_field::in_a_cd(a, b, d, c) {
                for s in [crate::quad_field::Sign::Minus, crate::quad_field::Sign::Plus] {
                    out.push(AlphaParam::with_field(a, b, s, field.clone())?);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma44Report {
    pub progression_sum: f64,
    pub share_of_total: f64,
    /// |progression − total/q|·N^σ.
    pub normalized_error: f64,
}

pub fn check_lemma44(n: u64, sigma: f64, alpha: f64, q: u64, a_res: u64) -> Result<Lemma44Report> {
    if q == 0 || a_res >= q {
        return Err(param(format!("need q ≥ 1 and 0 ≤ a < q, got q={q}, a={a_res}")));
    }
    let progression_sum = weighted_sum(range_l(n)?.filter(|m| m % q == a_res), sigma, alpha)?;
    let share_of_total = weighted_sum(range_l(n)?, sigma, alpha)? / q as f64;
    let normalized_error = (progression_sum - share_of_total).abs() * (n as f64).powf(sigma);
    Ok(Lemma44Report { progression_sum, share_of_total, normalized_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::{make_field, Sign};

    #[test]
    fn ranges() {
        assert_eq!(range_l(10).unwrap(), 11..=23);
        assert!(range_l(3).unwrap().is_empty());
        assert_eq!(range_m(100).unwrap().count(), 461);
        assert!(range_l(2).is_err());
    }

    #[test]
    fn weighted_sums() {
        assert_eq!(weighted_sum([], 0.7, 0.3).unwrap(), 0.0);
        assert!((weighted_sum([0], 0.7, 0.3).unwrap() - 0.3f64.powf(-0.7)).abs() < 1e-15);
        assert!(weighted_sum([0, 1], 0.5, 0.3).is_err());
        assert!(weighted_sum([0, 1], 1.0, 0.3).is_err());
    }

    #[test]
    fn decomposition_at_zero() {
        let al = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap();
        let fam = al.family().unwrap();
        let dc = decompose_n(0, &fam).unwrap();
        // α = ε/(2√2) and 𝔞 = (2√2), so α𝔞 = (ε) = (1)
        assert_eq!(fam.norm_n(0).unwrap(), 1);
        assert_eq!((dc.xy, dc.b_ideal.norm(), dc.s_part.len()), (1, 1, 0));
        // 1+α = (6+√2)/4 gives (6+√2)·(2√2)/4 = 1+3√2, norm −17: a single split prime
        let d1 = decompose_n(1, &fam).unwrap();
        assert_eq!((d1.xy, d1.b_ideal.norm(), d1.s_part.len(), d1.s_part[0].1), (1, 1, 1, 1));
        assert_eq!(dc.reconstruct(fam.field.omega()).unwrap(), fam.ideal_n(0).unwrap());
    }

    #[test]
    fn split_seven_element_level() {
        let f = make_field(2).unwrap();
        let w = f.omega();
        for k in 0..20i128 {
            let i = IdealHNF::principal(7 * k, 7, w).unwrap();
            let dc = decompose_factorization(k as u64, &f.factor_ideal(&i).unwrap(), w).unwrap();
            let sevens: Vec<u8> = dc.s_part.iter().filter(|(r, _)| r.p == 7).map(|(r, _)| r.which).collect();
            assert_eq!(sevens, vec![0, 1]);
        }
    }

    #[test]
    fn quadratic_bound_constant() {
        let r = rho_quadratic_bound(0.5, 0.375);
        assert!((r - (19.0 + 105f64.sqrt()) / 64.0).abs() < 1e-15);
        // 2ρ − 1/2 = √(3ρ/8) at the root
        assert!((2.0 * r - 0.5 - (0.375 * r).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lemma44_trivial_modulus() {
        let r = check_lemma44(100, 0.7, 0.3, 1, 0).unwrap();
        assert_eq!(r.normalized_error, 0.0);
        assert!(check_lemma44(100, 0.7, 0.3, 2, 2).is_err());
    }

    #[test]
    fn alpha_enumeration() {
        let v = enumerate_a_cd(0.1, 2, 4).unwrap();
        let labels: Vec<String> = v.iter().map(|a| a.label()).collect();
        assert!(labels.contains(&"(2-√2)/4".to_string()) && labels.contains(&"(2+√2)/4".to_string()));
        assert!(v.iter().all(|a| a.value_f64() > 0.1 && a.value_f64() < 1.0));
        assert!(enumerate_a_cd(0.9, 2, 10).unwrap().is_empty());
    }

    #[test]
    fn sets_partition_l() {
        let al = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap();
        let t = FamilyTable::for_n(&al.family().unwrap(), 50).unwrap();
        let s = t.s_set(50).unwrap();
        let tt = t.t_set(50).unwrap();
        assert_eq!(s.len() + tt.len(), range_l(50).unwrap().count());
        let rep = t.density_report(50, 0.8).unwrap();
        assert!((rep.ratio_k + rep.ratio_not_k - 1.0).abs() < 1e-12);
        assert!(rep.rho > 0.0 && rep.rho <= 1.0);
    }
}
