//! Browser bindings: three plots computed by the core crate and drawn by `www/index.html`.

use std::f64::consts::TAU;

use hzlab::beurling_selberg::{trig_poly_k, trig_poly_u, BSWindow};
use hzlab::quad_field::{AlphaParam, Sign};
use hzlab::random_model::RandomModel;
use hzlab::zeta_numerics::{zeta_trace, EMConfig, TimeGrid};
use hzlab::{Error, Result};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 20_000;

fn js(r: Result<Vec<f64>>) -> std::result::Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

fn check_points(n: usize) -> Result<()> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(Error::InvalidParam(format!("point count must lie in [2, {MAX_POINTS}], got {n}")));
    }
    Ok(())
}

/// Rows (x, 1_A(x), 𝒰(x), 𝒦(x)) over one period, flattened.
pub fn window_curves(s: f64, t: f64, delta: f64, points: usize) -> Result<Vec<f64>> {
    check_points(points)?;
    let w = BSWindow::arc(s, t, delta)?;
    Ok((0..points)
        .flat_map(|j| {
            let x = TAU * j as f64 / (points - 1) as f64;
            [x, w.arc_indicator(x), trig_poly_u(x, &w), trig_poly_k(x, &w)]
        })
        .collect())
}

/// Random model samples of ζ_N(σ, α) as (re, im) pairs.
#[allow(clippy::too_many_arguments)]
pub fn random_samples(a: i64, b: i64, d: i64, plus: bool, sigma: f64, n: u64, count: usize, seed: u64) -> Result<Vec<f64>> {
    check_points(count)?;
    let al = AlphaParam::new(a, b, if plus { Sign::Plus } else { Sign::Minus }, d)?;
    let m = RandomModel::from_alpha(&al, n)?;
    Ok(m.draw_samples(sigma, n, count, seed)?.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// ζ(σ + it, α) for t on [0, t_max] as (re, im) pairs.
pub fn hurwitz_curve(sigma: f64, alpha: f64, t_max: f64, step: f64) -> Result<Vec<f64>> {
    let g = TimeGrid::new(t_max, step)?;
    check_points(g.count)?;
    Ok(zeta_trace(sigma, alpha, &g, &EMConfig::default())?.iter().flat_map(|z| [z.re, z.im]).collect())
}

#[wasm_bindgen]
pub fn bs_curves(s: f64, t: f64, delta: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(window_curves(s, t, delta, points))
}

/// 32-bit integers so that JS passes plain numbers instead of BigInt.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn model_samples(a: i32, b: i32, d: i32, plus: bool, sigma: f64, n: u32, count: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    js(random_samples(a.into(), b.into(), d.into(), plus, sigma, n.into(), count, seed.into()))
}

#[wasm_bindgen]
pub fn zeta_curve(sigma: f64, alpha: f64, t_max: f64, step: f64) -> std::result::Result<Vec<f64>, JsError> {
    js(hurwitz_curve(sigma, alpha, t_max, step))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rows_bound_the_indicator() {
        let v = window_curves(0.0, 1.0, 10.0, 500).unwrap();
        assert_eq!(v.len(), 4 * 500);
        for r in v.chunks(4) {
            assert!((r[1] - r[2]).abs() <= r[3] + 1e-12);
        }
    }

    #[test]
    fn samples_are_pairs_and_seeded() {
        let a = random_samples(4, 2, 2, true, 0.8, 10, 100, 1).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a, random_samples(4, 2, 2, true, 0.8, 10, 100, 1).unwrap());
        assert!(random_samples(4, 2, 4, true, 0.8, 10, 100, 1).is_err());
    }

    #[test]
    fn curve_matches_direct_sum() {
        let v = hurwitz_curve(2.0, 0.5, 10.0, 0.1).unwrap();
        assert_eq!(v.len(), 200);
        // first node is t = step/2; direct sum to x plus the two leading tail terms
        let s = num_complex::Complex64::new(2.0, 0.05);
        let x = 100_000.5f64;
        let sum: num_complex::Complex64 = (0..100_000).rev().map(|k| (-s * (k as f64 + 0.5).ln()).exp()).sum();
        let xs = (-s * x.ln()).exp();
        let z = sum + xs * x / (s - 1.0) + 0.5 * xs;
        assert!((v[0] - z.re).abs() < 1e-9 && (v[1] - z.im).abs() < 1e-9);
        assert!(check_points(1).is_err() && hurwitz_curve(2.0, 0.5, 1e4, 0.01).is_err());
    }
}
