//! Hurwitz zeta by Euler–Maclaurin, truncated sums, and time averages over a midpoint grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::random_model::psi;

/// B_2, B_4, …, B_26.
const BERNOULLI: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

pub const MAX_ORDER: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMConfig {
    /// Starting number of summed terms; raised to ⌈|t|/π⌉ + 10 when smaller.
    pub m: usize,
    /// Bernoulli correction terms, at most 12.
    pub order: usize,
    pub tol: f64,
    /// Give up once M would exceed this.
    pub max_terms: usize,
}

impl Default for EMConfig {
    fn default() -> Self {
        EMConfig { m: 16, order: MAX_ORDER, tol: 1e-14, max_terms: 50_000_000 }
    }
}

/// Value with the estimated size of the first omitted correction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMValue {
    pub value: Complex64,
    pub remainder: f64,
    pub m: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(param(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

#[inline]
fn pow_neg(s: Complex64, log_x: f64) -> Complex64 {
    // x^{−s} = e^{−σ ln x}·e^{−it ln x}
    Complex64::from_polar((-s.re * log_x).exp(), -s.im * log_x)
}

/// Euler–Maclaurin tail at x = M+α: integral, half term and `order` Bernoulli terms.
fn em_tail(s: Complex64, x: f64, order: usize) -> (Complex64, f64) {
    let lx = x.ln();
    let xs = pow_neg(s, lx);
    let mut acc = xs * x / (s - 1.0) + 0.5 * xs;
    // c_k = (s)_{2k−1}/(2k)! · x^{−2k+1}
    let mut c = s / (2.0 * x);
    for (k, b) in BERNOULLI.iter().enumerate().take(order) {
        acc += c * xs * *b;
        let j = 2.0 * (k + 1) as f64;
        c = c * (s + j - 1.0) * (s + j) / ((j + 1.0) * (j + 2.0) * x * x);
    }
    let kk = 2.0 * order as f64 + 1.0;
    let next = (c * xs * BERNOULLI[order]).norm() * (s + kk).norm() / (s.re + kk);
    (acc, next)
}

fn partial_sum_logs(s: Complex64, logs: &[f64]) -> Complex64 {
    // smallest terms first
    logs.iter().rev().map(|&l| pow_neg(s, l)).sum()
}

/// ζ(s, α) for 0 < α ≤ 1, s ≠ 1.
pub fn hurwitz_zeta(s: Complex64, alpha: f64, cfg: &EMConfig) -> Result<EMValue> {
    check_alpha(alpha)?;
    let mut m = start_m(s, cfg);
    loop {
        let logs: Vec<f64> = (0..m).map(|n| (n as f64 + alpha).ln()).collect();
        match em_with_logs(s, alpha, &logs, cfg) {
            Err(Error::ToleranceNotMet { .. }) if grow(&mut m, cfg) => continue,
            r => return r,
        }
    }
}

fn start_m(s: Complex64, cfg: &EMConfig) -> usize {
    cfg.m.max((s.im.abs() / std::f64::consts::PI).ceil() as usize + 10)
}

fn grow(m: &mut usize, cfg: &EMConfig) -> bool {
    let next = *m + *m / 2;
    if next > cfg.max_terms {
        return false;
    }
    *m = next;
    true
}

fn em_with_logs(s: Complex64, alpha: f64, logs: &[f64], cfg: &EMConfig) -> Result<EMValue> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::PoleAt1);
    }
    if cfg.order > MAX_ORDER {
        return Err(param(format!("order must be at most {MAX_ORDER}")));
    }
    let m = logs.len();
    let (tail, rem) = em_tail(s, m as f64 + alpha, cfg.order);
    if rem > cfg.tol {
        return Err(Error::ToleranceNotMet { remainder: rem, tol: cfg.tol });
    }
    Ok(EMValue { value: partial_sum_logs(s, logs) + tail, remainder: rem, m })
}

/// Evaluator reusing ln(n+α) across many s with a common α.
#[derive(Clone, Debug)]
pub struct Hurwitz {
    pub alpha: f64,
    pub cfg: EMConfig,
    logs: Vec<f64>,
}

impl Hurwitz {
    pub fn new(alpha: f64, cfg: EMConfig) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Hurwitz { alpha, cfg, logs: Vec::new() })
    }

    /// Precompute logs for |Im s| up to `t_max`.
    pub fn with_range(alpha: f64, cfg: EMConfig, t_max: f64) -> Result<Self> {
        let mut h = Self::new(alpha, cfg)?;
        let m = start_m(Complex64::new(0.0, t_max), &cfg) * 2;
        h.logs = (0..m).map(|n| (n as f64 + alpha).ln()).collect();
        Ok(h)
    }

    pub fn eval(&self, s: Complex64) -> Result<EMValue> {
        let mut m = start_m(s, &self.cfg);
        loop {
            let r = if m <= self.logs.len() {
                em_with_logs(s, self.alpha, &self.logs[..m], &self.cfg)
            } else {
                let logs: Vec<f64> = (0..m).map(|n| (n as f64 + self.alpha).ln()).collect();
                em_with_logs(s, self.alpha, &logs, &self.cfg)
            };
            match r {
                Err(Error::ToleranceNotMet { .. }) if grow(&mut m, &self.cfg) => continue,
                r => return r,
            }
        }
    }
}

/// ζ_N(s, α) = Σ_{n≤N}(n+α)^{−s}.
pub fn zeta_truncated(s: Complex64, alpha: f64, n: u64) -> Complex64 {
    (0..=n).rev().map(|k| pow_neg(s, (k as f64 + alpha).ln())).sum()
}

/// Σ_{0≤n≤x}(n+α)^{−s} + x^{1−s}/(s−1), accurate to O(x^{−σ}) for 2π ≤ |t| ≤ πx.
pub fn approx_functional(s: Complex64, alpha: f64, x: f64) -> Complex64 {
    let n = (x - alpha).floor().max(0.0) as u64;
    zeta_truncated(s, alpha, n) + pow_neg(s, x.ln()) * x / (s - 1.0)
}

/// Midpoint nodes t_j = (j+½)·step, j < count, with step·count = T.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub step: f64,
    pub count: usize,
}

pub const DEFAULT_STEP: f64 = 0.05;

impl TimeGrid {
    /// Count is ⌈T/step⌉ and the step is shrunk to T/count.
    pub fn new(t_max: f64, step: f64) -> Result<Self> {
        if !(t_max > 0.0 && step > 0.0) {
            return Err(param("T and step must be positive"));
        }
        let count = (t_max / step).ceil() as usize;
        Ok(TimeGrid { t_max, step: t_max / count as f64, count })
    }

    pub fn with_default_step(t_max: f64) -> Result<Self> {
        Self::new(t_max, DEFAULT_STEP)
    }

    pub fn halved(&self) -> Self {
        TimeGrid { t_max: self.t_max, step: self.step / 2.0, count: self.count * 2 }
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.node(j))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct TraceKey {
    sigma: u64,
    alpha: u64,
    t_max: u64,
    count: usize,
    /// u64::MAX for the full ζ, else N.
    n: u64,
    tol: u64,
}

type TraceCache = Mutex<HashMap<TraceKey, Arc<Vec<Complex64>>>>;

fn cache() -> &'static TraceCache {
    static C: OnceLock<TraceCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: TraceKey, f: impl FnOnce() -> Result<Vec<Complex64>>) -> Result<Arc<Vec<Complex64>>> {
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(f()?);
    cache().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

fn check_sigma_half(sigma: f64) -> Result<()> {
    if sigma > 0.5 {
        Ok(())
    } else {
        Err(param(format!("sigma must exceed 1/2, got {sigma}")))
    }
}

/// ζ(σ+it_j, α) on the grid, memoized.
pub fn zeta_trace(sigma: f64, alpha: f64, grid: &TimeGrid, cfg: &EMConfig) -> Result<Arc<Vec<Complex64>>> {
    check_sigma_half(sigma)?;
    let key = TraceKey {
        sigma: sigma.to_bits(),
        alpha: alpha.to_bits(),
        t_max: grid.t_max.to_bits(),
        count: grid.count,
        n: u64::MAX,
        tol: cfg.tol.to_bits(),
    };
    cached(key, || {
        let h = Hurwitz::with_range(alpha, *cfg, grid.t_max)?;
        (0..grid.count)
            .into_par_iter()
            .map(|j| Ok(h.eval(Complex64::new(sigma, grid.node(j)))?.value))
            .collect()
    })
}

/// ζ_N(σ+it_j, α) on the grid, memoized.
pub fn zeta_n_trace(sigma: f64, alpha: f64, n: u64, grid: &TimeGrid) -> Result<Arc<Vec<Complex64>>> {
    check_alpha(alpha)?;
    let key = TraceKey { sigma: sigma.to_bits(), alpha: alpha.to_bits(), t_max: grid.t_max.to_bits(), count: grid.count, n, tol: 0 };
    cached(key, || {
        let amp: Vec<f64> = (0..=n).map(|k| (k as f64 + alpha).powf(-sigma)).collect();
        let logs: Vec<f64> = (0..=n).map(|k| (k as f64 + alpha).ln()).collect();
        Ok((0..grid.count)
            .into_par_iter()
            .map(|j| {
                let t = grid.node(j);
                amp.iter().zip(&logs).rev().map(|(&a, &l)| Complex64::from_polar(a, -t * l)).sum()
            })
            .collect())
    })
}

fn mean(v: impl IndexedParallelIterator<Item = Complex64>, count: usize) -> Complex64 {
    v.collect::<Vec<_>>().iter().sum::<Complex64>() / count as f64
}

pub fn char_of_trace(w: Complex64, trace: &[Complex64]) -> Complex64 {
    mean(trace.par_iter().map(|&z| psi(w, z)), trace.len())
}

/// g_T(w) = (1/T)∫₀^T ψ_w(ζ(σ+it, α)) dt by the midpoint rule.
pub fn g_t(w: Complex64, sigma: f64, alpha: f64, grid: &TimeGrid, cfg: &EMConfig) -> Result<Complex64> {
    Ok(char_of_trace(w, &zeta_trace(sigma, alpha, grid, cfg)?))
}

/// g_{T,N}(w) with ζ_N in place of ζ.
pub fn g_tn(w: Complex64, sigma: f64, alpha: f64, n: u64, grid: &TimeGrid) -> Result<Complex64> {
    check_sigma_half(sigma)?;
    Ok(char_of_trace(w, &zeta_n_trace(sigma, alpha, n, grid)?))
}

/// (1/T)∫ ζ_N^μ·conj(ζ_N)^ν dt.
pub fn time_moment(mu: u32, nu: u32, sigma: f64, alpha: f64, n: u64, grid: &TimeGrid) -> Result<Complex64> {
    if mu + nu > 3 || n > 64 {
        return Err(param(format!("time_moment needs μ+ν ≤ 3 and N ≤ 64, got ({mu},{nu}), N={n}")));
    }
    check_sigma_half(sigma)?;
    let tr = zeta_n_trace(sigma, alpha, n, grid)?;
    Ok(mean(tr.par_iter().map(|z| z.powu(mu) * z.conj().powu(nu)), tr.len()))
}

/// Fraction of grid nodes with |ζ(σ+it, α) − z₀| < ε.
pub fn density_estimate(sigma: f64, alpha: f64, z0: Complex64, eps: f64, grid: &TimeGrid, cfg: &EMConfig) -> Result<f64> {
    if !(sigma > 0.5 && sigma < 1.0) {
        return Err(param(format!("sigma must lie in (1/2, 1), got {sigma}")));
    }
    if eps < 0.0 {
        return Err(param("eps must be nonnegative"));
    }
    let tr = zeta_trace(sigma, alpha, grid, cfg)?;
    Ok(tr.iter().filter(|z| (**z - z0).norm() < eps).count() as f64 / tr.len() as f64)
}

/// |g_T at step − g_T at step/2|.
pub fn step_halving_gap(w: Complex64, sigma: f64, alpha: f64, grid: &TimeGrid, cfg: &EMConfig) -> Result<f64> {
    Ok((g_t(w, sigma, alpha, grid, cfg)? - g_t(w, sigma, alpha, &grid.halved(), cfg)?).norm())
}
