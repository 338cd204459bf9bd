//! Relation detection among the n+α, and the limit and denseness experiments.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cassels::enumerate_a_cd;
use crate::error::{param, Error, Result};
use crate::quad_field::{AlphaFamily, AlphaParam, QuadElem};
use crate::random_model::{empirical_char, w_grid, RandomModel};
use crate::zeta_numerics::{density_estimate, g_tn, hurwitz_zeta, zeta_n_trace, zeta_trace, EMConfig, TimeGrid};

/// Enumeration budget for kernel lattice points.
pub const ENUM_BUDGET: u64 = 20_000_000;

/// Integer kernel of the map v ↦ Σ v_j·col_j, as an echelon basis.
///
/// Columns are sparse ord vectors over a shared key index.
pub fn integer_kernel(cols: &[Vec<(usize, i64)>]) -> Result<Vec<Vec<i64>>> {
    let n = cols.len();
    let dim = cols.iter().flatten().map(|&(k, _)| k + 1).max().unwrap_or(0);
    // rows [ord(j) | e_j], reduced by unimodular row operations on the ord block
    let mut rows: Vec<Vec<i128>> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut r = vec![0i128; dim + n];
            for &(k, a) in c {
                r[k] += a as i128;
            }
            r[dim + j] = 1;
            r
        })
        .collect();
    let mut top = 0;
    for col in 0..dim {
        // gcd-eliminate column `col` among rows top..
        loop {
            let piv = (top..n).filter(|&i| rows[i][col] != 0).min_by_key(|&i| rows[i][col].unsigned_abs());
            let Some(p) = piv else { break };
            rows.swap(top, p);
            let mut done = true;
            for i in top + 1..n {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[top][col]);
                    for k in 0..dim + n {
                        let v = rows[i][k] - q * rows[top][k];
                        rows[i][k] = v;
                    }
                    guard(&rows[i])?;
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                top += 1;
                break;
            }
        }
    }
    let basis: Vec<Vec<i128>> = rows[top..].iter().map(|r| r[dim..].to_vec()).collect();
    Ok(echelon(basis)?.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect())
}

fn guard(r: &[i128]) -> Result<()> {
    if r.iter().any(|x| x.unsigned_abs() > 1 << 60) {
        return Err(Error::Overflow("kernel row reduction"));
    }
    Ok(())
}

/// Row echelon form with positive pivots, entries above pivots reduced.
fn echelon(mut rows: Vec<Vec<i128>>) -> Result<Vec<Vec<i128>>> {
    if rows.is_empty() {
        return Ok(rows);
    }
    let width = rows[0].len();
    let mut top = 0;
    for col in 0..width {
        loop {
            let piv = (top..rows.len()).filter(|&i| rows[i][col] != 0).min_by_key(|&i| rows[i][col].unsigned_abs());
            let Some(p) = piv else { break };
            rows.swap(top, p);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[top][col]);
                    for k in 0..width {
                        rows[i][k] -= q * rows[top][k];
                    }
                    guard(&rows[i])?;
                    done &= rows[i][col] == 0;
                }
            }
            if done {
                if rows[top][col] < 0 {
                    rows[top].iter_mut().for_each(|x| *x = -*x);
                }
                for i in 0..top {
                    let q = rows[i][col].div_euclid(rows[top][col]);
                    if q != 0 {
                        for k in 0..width {
                            rows[i][k] -= q * rows[top][k];
                        }
                    }
                }
                top += 1;
                break;
            }
        }
        if top == rows.len() {
            break;
        }
    }
    rows.truncate(top);
    Ok(rows)
}

/// All nonzero lattice vectors Σc_i·b_i with sup-norm ≤ bound, one per ± pair.
pub fn enumerate_kernel(basis: &[Vec<i64>], bound: i64) -> Result<Vec<Vec<i64>>> {
    let Some(width) = basis.first().map(|b| b.len()) else { return Ok(vec![]) };
    let pivots: Vec<usize> = basis.iter().map(|b| b.iter().position(|&x| x != 0).unwrap()).collect();
    let mut out = Vec::new();
    let mut count = 0u64;
    let mut acc = vec![0i64; width];
    rec(basis, &pivots, 0, bound, &mut acc, &mut out, &mut count)?;
    // keep the representative whose first nonzero entry is positive
    out.retain(|v: &Vec<i64>| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
    Ok(out)
}

fn rec(
    basis: &[Vec<i64>],
    pivots: &[usize],
    i: usize,
    bound: i64,
    acc: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    count: &mut u64,
) -> Result<()> {
    *count += 1;
    if *count > ENUM_BUDGET {
        return Err(Error::Budget(format!("kernel enumeration beyond {ENUM_BUDGET} nodes")));
    }
    if i == basis.len() {
        if acc.iter().all(|x| x.abs() <= bound) && acc.iter().any(|&x| x != 0) {
            out.push(acc.clone());
        }
        return Ok(());
    }
    // later rows vanish at this pivot, so acc[p] must already land in [−bound, bound]
    let (p, b) = (pivots[i], basis[i][pivots[i]]);
    let lo = (-bound - acc[p]).div_euclid(b) + if (-bound - acc[p]).rem_euclid(b) == 0 { 0 } else { 1 };
    let hi = (bound - acc[p]).div_euclid(b);
    for c in lo..=hi {
        for (a, x) in acc.iter_mut().zip(&basis[i]) {
            *a += c * x;
        }
        rec(basis, pivots, i + 1, bound, acc, out, count)?;
        for (a, x) in acc.iter_mut().zip(&basis[i]) {
            *a -= c * x;
        }
    }
    Ok(())
}

/// Ord columns of n+α for the given indices, with keys shared across columns.
fn ord_columns(fam: &AlphaFamily, ns: &[u64]) -> Result<Vec<Vec<(usize, i64)>>> {
    let mut keys: Vec<Option<crate::quad_field::PrimeKey>> = Vec::new();
    let mut idx = |k: Option<crate::quad_field::PrimeKey>| -> usize {
        match keys.iter().position(|x| *x == k) {
            Some(i) => i,
            None => {
                keys.push(k);
                keys.len() - 1
            }
        }
    };
    let ords = ns.iter().map(|&n| fam.ord(n)).collect::<Result<Vec<_>>>()?;
    Ok(ords
        .iter()
        .map(|o| {
            let mut c: Vec<(usize, i64)> = o.prime_part.iter().map(|(k, &a)| (idx(Some(*k)), a)).collect();
            if o.unit_exp != 0 {
                c.push((idx(None), o.unit_exp));
            }
            c
        })
        .collect())
}

fn verify(fam: &AlphaFamily, ns: &[u64], v: &[i64]) -> Result<()> {
    if fam.product(ns, v) != QuadElem::one(fam.alpha.omega) {
        return Err(Error::Internal(format!("kernel vector {v:?} fails the exact product check")));
    }
    Ok(())
}

/// Relations ∏_{n≤N}(n+α)^{m_n} = 1 with |m_n| ≤ bound, up to sign, each checked by exact products.
pub fn detect_e1(fam: &AlphaFamily, n: u64, coeff_bound: i64) -> Result<Vec<Vec<i64>>> {
    if n > 30 || !(1..=10).contains(&coeff_bound) {
        return Err(param(format!("detect_e1 needs N ≤ 30 and 1 ≤ bound ≤ 10, got N={n}, bound={coeff_bound}")));
    }
    let ns: Vec<u64> = (0..=n).collect();
    let basis = integer_kernel(&ord_columns(fam, &ns)?)?;
    let rels = enumerate_kernel(&basis, coeff_bound)?;
    for v in &rels {
        verify(fam, &ns, v)?;
    }
    Ok(rels)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Relation {
    pub n1: u64,
    pub n2: u64,
    /// m_0..m_N with (n2+α)/(n1+α) = ∏(n+α)^{m_n}.
    pub m: Vec<i64>,
}

/// Solutions of (n₂+α)/(n₁+α) = ∏_{n≤N}(n+α)^{m_n} with N < n₁ < n₂ ≤ L and |m_n| ≤ bound.
pub fn detect_e2(fam: &AlphaFamily, n: u64, l: u64, coeff_bound: i64) -> Result<Vec<E2Relation>> {
    if !(n < l && l <= 60) || !(1..=10).contains(&coeff_bound) {
        return Err(param(format!("detect_e2 needs N < L ≤ 60 and 1 ≤ bound ≤ 10, got N={n}, L={l}, bound={coeff_bound}")));
    }
    let pairs: Vec<(u64, u64)> = (n + 1..=l).flat_map(|a| (a + 1..=l).map(move |b| (a, b))).collect();
    let found: Vec<Vec<E2Relation>> = pairs
        .par_iter()
        .map(|&(n1, n2)| {
            let mut ns = vec![n1, n2];
            ns.extend(0..=n);
            let basis = integer_kernel(&ord_columns(fam, &ns)?)?;
            let mut out = Vec::new();
            for v in enumerate_kernel(&basis, coeff_bound)? {
                // ±(1, −1, −m): ord(n1) − ord(n2) + Σ(−m_n)·ord(n) = 0
                let v: Vec<i64> = if v[0] == -1 { v.iter().map(|x| -x).collect() } else { v };
                if v[0] == 1 && v[1] == -1 {
                    verify(fam, &ns, &v)?;
                    out.push(E2Relation { n1, n2, m: v[2..].iter().map(|x| -x).collect() });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub alpha: AlphaParam,
    pub sigma: f64,
    pub n: u64,
    pub ts: Vec<f64>,
    pub m: usize,
    pub w_radius: f64,
    pub w_count: usize,
    pub seed: u64,
    pub step: f64,
}

impl LimitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.5 && self.sigma <= 1.0) {
            return Err(param(format!("sigma must lie in (1/2, 1], got {}", self.sigma)));
        }
        if self.m == 0 || self.w_count == 0 || self.ts.is_empty() || self.ts.iter().any(|&t| t <= 0.0) {
            return Err(param("M, the w-grid and every T must be positive"));
        }
        if !(self.step > 0.0 && self.w_radius >= 0.0) {
            return Err(param("step must be positive and the w radius nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub sup_discrepancy: f64,
    pub argmax_w: (f64, f64),
    pub per_w: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub w_grid: Vec<(f64, f64)>,
    pub rows: Vec<LimitRow>,
    /// 1/√M, the scale of MC error in each empirical char value.
    pub mc_noise: f64,
    /// (Σ_{n>N}(n+α)^{−2σ})^{1/2}, from ζ(2σ, α) − ζ_N(2σ, α).
    pub tail_l2: f64,
    /// mean |ζ − ζ_N| at σ = 2 over the first T (capped at 1000), against Σ_{n>N}(n+α)^{−2}.
    pub sigma2_mean_gap: f64,
    pub sigma2_tail_sum: f64,
}

pub fn run_limit_experiment(cfg: &LimitConfig) -> Result<LimitReport> {
    cfg.validate()?;
    let alpha = cfg.alpha.value_f64();
    let model = RandomModel::from_alpha(&cfg.alpha, cfg.n)?;
    let samples = model.draw_samples(cfg.sigma, cfg.n, cfg.m, cfg.seed)?;
    let grid = w_grid(cfg.w_radius, cfg.w_count);
    let mc: Vec<Complex64> = grid.iter().map(|&w| empirical_char(w, &samples)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &t in &cfg.ts {
        let tg = TimeGrid::new(t, cfg.step)?;
        let per_w: Vec<f64> =
            grid.iter().zip(&mc).map(|(&w, g)| Ok((g_tn(w, cfg.sigma, alpha, cfg.n, &tg)? - g).norm())).collect::<Result<_>>()?;
        let (i, &sup) = per_w.iter().enumerate().fold((0, &0.0), |b, x| if x.1 > b.1 { x } else { b });
        rows.push(LimitRow { t, sup_discrepancy: sup, argmax_w: (grid[i].re, grid[i].im), per_w });
    }
    let cfg_em = EMConfig::default();
    let s2 = Complex64::new(2.0 * cfg.sigma, 0.0);
    let tail_sq = hurwitz_zeta(s2, alpha, &cfg_em)?.value.re - crate::zeta_numerics::zeta_truncated(s2, alpha, cfg.n).re;
    let t2 = cfg.ts[0].min(1000.0);
    let g2 = TimeGrid::new(t2, cfg.step.max(0.05))?;
    let full = zeta_trace(2.0, alpha, &g2, &cfg_em)?;
    let part = zeta_n_trace(2.0, alpha, cfg.n, &g2)?;
    let gap = full.iter().zip(part.iter()).map(|(a, b)| (a - b).norm()).sum::<f64>() / full.len() as f64;
    let tail2 = hurwitz_zeta(Complex64::new(2.0, 0.0), alpha, &cfg_em)?.value.re
        - crate::zeta_numerics::zeta_truncated(Complex64::new(2.0, 0.0), alpha, cfg.n).re;
    Ok(LimitReport {
        w_grid: grid.iter().map(|w| (w.re, w.im)).collect(),
        rows,
        mc_noise: 1.0 / (cfg.m as f64).sqrt(),
        tail_l2: tail_sq.max(0.0).sqrt(),
        sigma2_mean_gap: gap,
        sigma2_tail_sum: tail2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseConfig {
    pub c: f64,
    pub d: i64,
    pub a_max: i64,
    pub sigma: f64,
    pub z0: (f64, f64),
    pub eps: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub step: f64,
    /// Relation search bounds: E^(1) over n ≤ e1_n, E^(2) over e1_n < n₁ < n₂ ≤ e2_l.
    pub e1_n: u64,
    pub e1_bound: i64,
    pub e2_l: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseRow {
    pub alpha: String,
    pub a: i64,
    pub b: i64,
    pub sign: crate::quad_field::Sign,
    pub value: f64,
    pub density: f64,
    pub density_double_eps: f64,
    pub positive: bool,
    pub e1_relations: usize,
    pub e2_relations: usize,
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseReport {
    pub rows: Vec<DenseRow>,
    /// "No relation" is certified only within (e1_n, e1_bound, e2_l).
    pub certified_within: (u64, i64, u64),
    pub all_positive: bool,
}

pub fn run_dense_experiment(cfg: &DenseConfig) -> Result<DenseReport> {
    if !(cfg.eps > 0.0 && cfg.t > 0.0 && cfg.step > 0.0) {
        return Err(param("eps, T and step must be positive"));
    }
    let alphas = enumerate_a_cd(cfg.c, cfg.d, cfg.a_max)?;
    let grid = TimeGrid::new(cfg.t, cfg.step)?;
    let em = EMConfig::default();
    let z0 = Complex64::new(cfg.z0.0, cfg.z0.1);
    let mut rows = Vec::new();
    for al in &alphas {
        let v = al.value_f64();
        let density = density_estimate(cfg.sigma, v, z0, cfg.eps, &grid, &em)?;
        let density_double_eps = density_estimate(cfg.sigma, v, z0, 2.0 * cfg.eps, &grid, &em)?;
        let fam = al.family()?;
        let e1 = detect_e1(&fam, cfg.e1_n, cfg.e1_bound)?.len();
        let e2 = if cfg.e2_l > cfg.e1_n { detect_e2(&fam, cfg.e1_n, cfg.e2_l, cfg.e1_bound)?.len() } else { 0 };
        rows.push(DenseRow {
            alpha: al.label(),
            a: al.a,
            b: al.b,
            sign: al.sign,
            value: v,
            density,
            density_double_eps,
            positive: density > 0.0,
            e1_relations: e1,
            e2_relations: e2,
            exceptional: e1 + e2 > 0,
        });
    }
    let all_positive = rows.iter().filter(|r| !r.exceptional).all(|r| r.positive);
    Ok(DenseReport { rows, certified_within: (cfg.e1_n, cfg.e1_bound, cfg.e2_l), all_positive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::{make_field, Sign};

    #[test]
    fn kernel_of_small_matrix() {
        // columns (2), (3), (5) over one key: kernel spanned by (3,−2,0), (5,0,−2)-type vectors, rank 2
        let cols = vec![vec![(0, 2)], vec![(0, 3)], vec![(0, 5)]];
        let b = integer_kernel(&cols).unwrap();
        assert_eq!(b.len(), 2);
        for v in &b {
            assert_eq!(2 * v[0] + 3 * v[1] + 5 * v[2], 0);
        }
        let all = enumerate_kernel(&b, 3).unwrap();
        assert!(all.contains(&vec![3, -2, 0]));
        assert!(all.iter().all(|v| 2 * v[0] + 3 * v[1] + 5 * v[2] == 0 && v.iter().all(|x| x.abs() <= 3)));
        // brute force count
        let mut n = 0;
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                for c in -3..=3i64 {
                    if (a, b, c) != (0, 0, 0) && 2 * a + 3 * b + 5 * c == 0 {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(all.len() * 2, n);
    }

    #[test]
    fn trivial_relations_found() {
        // n + α repeated: columns 0 and 1 identical gives (1, −1)
        let b = integer_kernel(&[vec![(0, 1), (1, 2)], vec![(0, 1), (1, 2)]]).unwrap();
        assert_eq!(enumerate_kernel(&b, 1).unwrap(), vec![vec![1, -1]]);
        assert!(integer_kernel(&[vec![(0, 1)], vec![(1, 1)]]).unwrap().is_empty());
    }

    #[test]
    fn e1_generic_alpha_is_empty() {
        let fam = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap().family().unwrap();
        assert!(detect_e1(&fam, 6, 3).unwrap().is_empty());
        assert!(detect_e1(&fam, 31, 3).is_err());
    }

    #[test]
    fn e2_rejects_bad_range() {
        let fam = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap().family().unwrap();
        assert!(detect_e2(&fam, 5, 5, 2).is_err());
        assert!(detect_e2(&fam, 3, 8, 2).unwrap().is_empty());
    }

    #[test]
    fn sqrt2_family_has_relations() {
        // α = √2: (x₁+√2)(x₂+√2)(x₃+√2) = (u+√2)(v+√2) by brute force over small integers
        let f = make_field(2).unwrap();
        let fam = AlphaFamily::new(f.clone(), f.elem(0, 1, 1)).unwrap();
        let mut hit = None;
        'outer: for x1 in 0..12i64 {
            for x2 in x1..12 {
                for x3 in x2..12 {
                    let p = &(&f.elem(x1, 1, 1) * &f.elem(x2, 1, 1)) * &f.elem(x3, 1, 1);
                    for u in 0..30i64 {
                        for v in u..30 {
                            if p == &f.elem(u, 1, 1) * &f.elem(v, 1, 1) {
                                hit = Some((x1, x2, x3, u, v));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        let (x1, x2, x3, u, v) = hit.expect("a brute-force relation");
        let top = [x1, x2, x3, u, v].into_iter().max().unwrap() as u64;
        let rels = detect_e1(&fam, top, 3).unwrap();
        let mut want = vec![0i64; top as usize + 1];
        for x in [x1, x2, x3] {
            want[x as usize] += 1;
        }
        for x in [u, v] {
            want[x as usize] -= 1;
        }
        let neg: Vec<i64> = want.iter().map(|x| -x).collect();
        assert!(rels.contains(&want) || rels.contains(&neg));
    }
}
