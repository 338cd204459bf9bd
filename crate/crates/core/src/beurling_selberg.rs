//! Beurling–Selberg majorant B = H + K, windowed versions and their periodizations.
//!
//! Windows are scaled to exponential type Δ: U_{s,t}(x) = ½{H(c(x−s)) + H(c(t−x))}
//! with c = Δ/2π, so their Fourier transforms vanish for |m| ≥ Δ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// sin²(πx) with the argument reduced to [−½, ½].
fn sin_pi_sq(x: f64) -> f64 {
    let r = x - x.round();
    let s = (PI * r).sin();
    s * s
}

/// Fejér kernel K(x) = (sin πx / πx)².
pub fn fejer_k(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        let y = PI * x;
        return 1.0 - y * y / 3.0;
    }
    sin_pi_sq(x) / (PI * PI * x * x)
}

/// ψ′(y) for y ≥ 1 by upward recurrence and the asymptotic series.
pub fn trigamma(mut y: f64) -> f64 {
    let mut acc = 0.0;
    while y < 16.0 {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let z = 1.0 / (y * y);
    acc + 1.0 / y + z / 2.0 + (z / y) * (1.0 / 6.0 + z * (-1.0 / 30.0 + z * (1.0 / 42.0 + z * (-1.0 / 30.0 + z * 5.0 / 66.0))))
}

/// E(x) = 1 − 2x + 2x²ψ′(1+x), so that H(x) = 1 − K(x)·E(x) for x > 0.
fn e_term(x: f64) -> f64 {
    if x >= 10.0 {
        // 2Σ B_{2k} x^{1−2k}
        let z = 1.0 / (x * x);
        (1.0 / x) * (1.0 / 3.0 + z * (-1.0 / 15.0 + z * (1.0 / 21.0 + z * (-1.0 / 15.0 + z * (5.0 / 33.0 + z * (-691.0 / 1365.0))))))
    } else {
        1.0 - 2.0 * x + 2.0 * x * x * trigamma(1.0 + x)
    }
}

/// Vaaler's H, odd, with H(n) = sgn(n) at integers.
pub fn vaaler_h(x: f64) -> f64 {
    let ax = x.abs();
    if ax >= 0.5 && (ax - ax.round()).abs() < 1e-9 {
        return sgn(x);
    }
    sgn(x) * (1.0 - fejer_k(ax) * e_term(ax))
}

/// H from its defining series: M₀ paired terms plus the integral of the remainder.
pub fn vaaler_h_series(x: f64, m0: u64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if (x - x.round()).abs() < 1e-9 {
        return sgn(x);
    }
    // Σ_{m≥1} [(x−m)^{−2} − (x+m)^{−2}] = Σ 4xm/(m²−x²)²
    let mut s = 0.0;
    for m in (1..=m0).rev() {
        let m = m as f64;
        let d = m * m - x * x;
        s += 4.0 * x * m / (d * d);
    }
    let a = m0 as f64 + 0.5;
    s += 2.0 * x / (a * a - x * x);
    let sp = (PI * x).sin() / PI;
    sp * sp * (s + 2.0 / x)
}

pub fn beurling_b(x: f64) -> f64 {
    vaaler_h(x) + fejer_k(x)
}

/// Vaaler's Ĵ(τ) = πτ(1−|τ|)cot(πτ) + |τ| on |τ| < 1, zero beyond; the transform of ½H′.
pub fn vaaler_j_hat(tau: f64) -> f64 {
    let a = tau.abs();
    if a >= 1.0 {
        return 0.0;
    }
    if a < 1e-12 {
        return 1.0;
    }
    if a <= 0.5 {
        return PI * a * (1.0 - a) / (PI * a).tan() + a;
    }
    // cot(πa) = −cot(πε): Ĵ = a(1 − πε·cot πε), ε = 1 − a
    let x = PI * (1.0 - a);
    let g = if x < 1e-3 { x * x / 3.0 + x.powi(4) / 45.0 } else { 1.0 - x / x.tan() };
    a * g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSWindow {
    pub s: f64,
    pub t: f64,
    pub delta: f64,
}

impl BSWindow {
    pub fn new(s: f64, t: f64, delta: f64) -> Result<Self> {
        if !(s < t) {
            return Err(param(format!("need s < t, got s={s}, t={t}")));
        }
        if !(delta > 1.0) {
            return Err(param(format!("need Δ > 1, got {delta}")));
        }
        Ok(BSWindow { s, t, delta })
    }

    /// A window usable on the circle: additionally t − s ≤ 2π.
    pub fn arc(s: f64, t: f64, delta: f64) -> Result<Self> {
        let w = Self::new(s, t, delta)?;
        if t - s > 2.0 * PI {
            return Err(param(format!("arc length {} exceeds 2π", t - s)));
        }
        Ok(w)
    }

    fn c(&self) -> f64 {
        self.delta / (2.0 * PI)
    }

    pub fn indicator(&self, x: f64) -> f64 {
        if x > self.s && x < self.t {
            1.0
        } else {
            0.0
        }
    }

    /// Indicator of the arc A(s, t) at z = e^{ix}.
    pub fn arc_indicator(&self, x: f64) -> f64 {
        let d = (x - self.s).rem_euclid(2.0 * PI);
        if d > 0.0 && d < self.t - self.s {
            1.0
        } else {
            0.0
        }
    }
}

pub fn window_u(x: f64, w: &BSWindow) -> f64 {
    let c = w.c();
    0.5 * (vaaler_h(c * (x - w.s)) + vaaler_h(c * (w.t - x)))
}

pub fn window_kst(x: f64, w: &BSWindow) -> f64 {
    let c = w.c();
    0.5 * (fejer_k(c * (x - w.s)) + fejer_k(c * (w.t - x)))
}

/// Ũ(m) = Ĵ(m/Δ)(e^{−ims} − e^{−imt})/(im), and t − s at m = 0.
pub fn fourier_u_closed(m: i64, w: &BSWindow) -> Complex64 {
    if m == 0 {
        return Complex64::new(w.t - w.s, 0.0);
    }
    let mf = m as f64;
    let e = Complex64::from_polar(1.0, -mf * w.s) - Complex64::from_polar(1.0, -mf * w.t);
    e * vaaler_j_hat(mf / w.delta) / Complex64::new(0.0, mf)
}

/// K̃(m) = (π/Δ)(e^{−ims} + e^{−imt})·max(0, 1 − |m|/Δ).
pub fn fourier_kst(m: i64, w: &BSWindow) -> Complex64 {
    let mf = m as f64;
    let tri = (1.0 - mf.abs() / w.delta).max(0.0);
    (Complex64::from_polar(1.0, -mf * w.s) + Complex64::from_polar(1.0, -mf * w.t)) * (PI / w.delta * tri)
}

/// 16-point Gauss–Legendre nodes and weights on [−1, 1].
const GL16: [(f64, f64); 8] = [
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (0.755_404_408_355_003, 0.124_628_971_255_533_9),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_1),
];

/// Composite Gauss–Legendre over [a, b] with `panels` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let hh = h / 2.0;
        for &(x, wt) in &GL16 {
            acc += (f(mid - hh * x) + f(mid + hh * x)) * wt;
        }
    }
    acc * (h / 2.0)
}

/// Ũ(m) = ∫U(x)e^{−imx}dx by panel quadrature on [s − L, t + L], refined until two levels agree.
pub fn fourier_u(m: i64, w: &BSWindow, tol: f64) -> Result<Complex64> {
    let c = w.c();
    // |U| ≲ (c·dist)^{−3}/(6π²) outside the window, tail ≈ 1/(3π² c³ L²)
    let l = ((1.0 / (3.0 * PI * PI * c.powi(3) * tol)).sqrt()).max(20.0 / c);
    let (a, b) = (w.s - l, w.t + l);
    let freq = (m.unsigned_abs() as f64).max(c * PI) + 1.0;
    let mut panels = (((b - a) * freq / PI).ceil() as usize).max(8);
    let f = |x: f64| Complex64::from_polar(window_u(x, w), -(m as f64) * x);
    let mut prev = gauss_legendre(f, a, b, panels);
    for _ in 0..6 {
        panels *= 2;
        let next = gauss_legendre(f, a, b, panels);
        if (next - prev).norm() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::ToleranceNotMet { remainder: (prev - gauss_legendre(f, a, b, panels * 2)).norm(), tol })
}

/// K̃(m) by quadrature on [s − L, t + L]; at m = 0 the missing x⁻² mass is added back.
pub fn fourier_kst_quadrature(m: i64, w: &BSWindow, l: f64) -> Complex64 {
    let c = w.c();
    let (a, b) = (w.s - l, w.t + l);
    let freq = (m.unsigned_abs() as f64).max(c * PI) + 1.0;
    let panels = ((b - a) * freq / PI).ceil() as usize;
    let mut q = gauss_legendre(|x| Complex64::from_polar(window_kst(x, w), -(m as f64) * x), a, b, panels);
    if m == 0 {
        // K(c·u) ≈ 1/(2π²c²u²) on average far out
        let tail = |d: f64| 1.0 / (2.0 * PI * PI * c * c * d);
        q += 0.5 * (tail(w.s - a) + tail(b - w.s) + tail(w.t - a) + tail(b - w.t));
    }
    q
}

/// ∫(B − sgn) over [−R, R] plus the tail 1/(π²R) from the mean of sin² in K.
pub fn integral_b_minus_sgn(r: f64) -> f64 {
    let panels = (2.0 * r).ceil() as usize;
    let q = gauss_legendre(|x| Complex64::new(beurling_b(x) - sgn(x), 0.0), -r, r, panels);
    q.re + 1.0 / (PI * PI * r)
}

/// 𝒰_{s,t}(e^{ix}) = (1/2π)Σ_{|m|≤Δ} Ũ(m)e^{imx}.
pub fn trig_poly_u(x: f64, w: &BSWindow) -> f64 {
    trig_sum(x, w.delta, |m| fourier_u_closed(m, w))
}

pub fn trig_poly_k(x: f64, w: &BSWindow) -> f64 {
    trig_sum(x, w.delta, |m| fourier_kst(m, w))
}

fn trig_sum(x: f64, delta: f64, coef: impl Fn(i64) -> Complex64) -> f64 {
    let top = delta.floor() as i64;
    let s: Complex64 = (-top..=top).map(|m| coef(m) * Complex64::from_polar(1.0, m as f64 * x)).sum();
    debug_assert!(s.im.abs() < 1e-9 * (1.0 + s.re.abs()));
    s.re / (2.0 * PI)
}

/// Σ_{|n|≤n₀} f(x + 2nπ).
pub fn periodize(f: impl Fn(f64) -> f64, x: f64, n0: i64) -> f64 {
    (-n0..=n0).map(|n| f(x + 2.0 * PI * n as f64)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBoundReport {
    pub lhs: f64,
    pub rhs_sum_k: f64,
    pub log_factor: f64,
    /// lhs / ((log Δ)^{N+1}·Σ𝒦), 0 when both sides vanish.
    pub ratio: f64,
}

/// Both sides of |∏1_A(z_n) − ∏𝒰(z_n)| ≪ (log Δ)^{N+1} Σ𝒦(z_n), at common Δ.
pub fn product_bound_check(arcs: &[(f64, f64)], xs: &[f64], delta: f64) -> Result<ProductBoundReport> {
    if arcs.len() != xs.len() || arcs.is_empty() {
        return Err(param("arcs and points must be nonempty and of equal length"));
    }
    if delta < 3.0 {
        return Err(param(format!("need Δ ≥ 3, got {delta}")));
    }
    let ws: Vec<BSWindow> = arcs.iter().map(|&(s, t)| BSWindow::arc(s, t, delta)).collect::<Result<_>>()?;
    let ind: f64 = ws.iter().zip(xs).map(|(w, &x)| w.arc_indicator(x)).product();
    let u: f64 = ws.iter().zip(xs).map(|(w, &x)| trig_poly_u(x, w)).product();
    let k: f64 = ws.iter().zip(xs).map(|(w, &x)| trig_poly_k(x, w)).sum();
    let lhs = (ind - u).abs();
    let log_factor = delta.ln().powi(ws.len() as i32);
    let den = log_factor * k;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / den };
    Ok(ProductBoundReport { lhs, rhs_sum_k: k, log_factor, ratio })
}

/// max |𝒰| / log Δ over `points` equally spaced circle points.
pub fn u_log_bound(w: &BSWindow, points: usize) -> f64 {
    let m = (0..points).map(|j| trig_poly_u(2.0 * PI * j as f64 / points as f64, w).abs()).fold(0.0, f64::max);
    m / w.delta.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_values() {
        assert_eq!(fejer_k(0.0), 1.0);
        assert!((fejer_k(0.5) - 4.0 / (PI * PI)).abs() < 1e-15);
        for n in 1..20 {
            assert!(fejer_k(n as f64) < 1e-30 && fejer_k(-(n as f64)) < 1e-30);
        }
    }

    #[test]
    fn trigamma_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-14);
        // ψ′(1/2 + 1) = π²/2 − 4
        assert!((trigamma(1.5) - (PI * PI / 2.0 - 4.0)).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_series() {
        for &x in &[0.013, 0.25, 0.5, 0.999, 1.000001, 2.7, 9.99, 10.01, 37.3, -4.4] {
            let a = vaaler_h(x);
            let b = vaaler_h_series(x, 10_000);
            assert!((a - b).abs() < 1e-9, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn h_interpolates_sgn() {
        assert_eq!(vaaler_h(0.0), 0.0);
        assert_eq!(vaaler_h(1.0), 1.0);
        assert_eq!(vaaler_h(-1.0), -1.0);
        assert!((vaaler_h_series(1.0 + 1e-6, 10_000) - 1.0).abs() < 1e-5);
        assert_eq!(beurling_b(0.0), 1.0);
    }

    #[test]
    fn j_hat_continuity() {
        assert!((vaaler_j_hat(1e-7) - 1.0).abs() < 1e-6);
        assert!(vaaler_j_hat(1.0 - 1e-9).abs() < 1e-8);
        assert_eq!(vaaler_j_hat(1.5), 0.0);
    }

    #[test]
    fn window_edges() {
        let w = BSWindow::new(0.0, 1.0, 10.0).unwrap();
        let c = 10.0 / (2.0 * PI);
        assert!((window_kst(0.0, &w) - 0.5 * (1.0 + fejer_k(c))).abs() < 1e-15);
        let wide = BSWindow::new(0.0, 10.0, 200.0).unwrap();
        assert!((window_u(5.0, &wide) - 1.0).abs() < 1e-4);
        assert!(BSWindow::new(1.0, 1.0, 5.0).is_err());
        assert!(BSWindow::new(0.0, 1.0, 1.0).is_err());
        assert!(BSWindow::arc(0.0, 7.0, 5.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let w = BSWindow::new(0.3, 1.9, 9.0).unwrap();
        for m in [0i64, 1, -2, 5, 8] {
            let q = fourier_u(m, &w, 1e-9).unwrap();
            assert!((q - fourier_u_closed(m, &w)).norm() < 1e-7, "m={m}");
        }
        for m in [0i64, 3, -7, 8, 10] {
            let q = fourier_kst_quadrature(m, &w, 1e4);
            assert!((q - fourier_kst(m, &w)).norm() < 1e-9, "m={m}: {}", (q - fourier_kst(m, &w)).norm());
        }
        assert!((fourier_kst(0, &w).re - 2.0 * PI / 9.0).abs() < 1e-15);
    }
}
