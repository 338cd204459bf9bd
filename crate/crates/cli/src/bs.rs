use std::f64::consts::PI;

use hzlab::beurling_selberg::*;
use serde::Serialize;

use crate::args::{BsArgs, Globals, Suite};
use crate::output::{usage, CliError, Report};

const WINDOWS: [(f64, f64, f64); 3] = [(0.0, 1.0, 10.0), (0.0, PI / 2.0, 12.0), (-1.0, 2.0, 6.5)];

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    /// Worst value of the checked quantity (excess over the bound, or the deviation).
    worst: f64,
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn majorant(a: &BsArgs, out: &mut Vec<Check>) {
    let (mut b_gap, mut k_gap, mut h_gap) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for j in 0..a.grid {
        let x = if a.grid == 1 { 0.0 } else { -a.range + 2.0 * a.range * j as f64 / (a.grid - 1) as f64 };
        let h = vaaler_h(x);
        b_gap = b_gap.max(sgn(x) - beurling_b(x));
        k_gap = k_gap.max((sgn(x) - h).abs() - fejer_k(x));
        h_gap = h_gap.max(h.abs() - 1.0);
    }
    out.push(Check { name: "B >= sgn".into(), pass: b_gap <= a.slack, worst: b_gap });
    out.push(Check { name: "|sgn - H| <= K".into(), pass: k_gap <= a.slack, worst: k_gap });
    out.push(Check { name: "|H| <= 1".into(), pass: h_gap <= a.slack, worst: h_gap });
    let dev = (integral_b_minus_sgn(2000.0) - 1.0).abs();
    out.push(Check { name: "integral of B - sgn is 1".into(), pass: dev <= 1e-6, worst: dev });
}

fn windows(a: &BsArgs, out: &mut Vec<Check>) -> hzlab::Result<()> {
    for &(s, t, d) in &WINDOWS {
        let w = BSWindow::arc(s, t, d)?;
        let mut line = f64::NEG_INFINITY;
        for j in 0..10_000 {
            let x = s - 5.0 + (t - s + 10.0) * j as f64 / 9_999.0;
            line = line.max((w.indicator(x) - window_u(x, &w)).abs() - window_kst(x, &w));
        }
        out.push(Check { name: format!("line window ({s:.4}, {t:.4}, {d})"), pass: line <= a.slack, worst: line });
        let mut circle = f64::NEG_INFINITY;
        for j in 0..1_000 {
            let x = 2.0 * PI * j as f64 / 1_000.0;
            circle = circle.max((w.arc_indicator(x) - trig_poly_u(x, &w)).abs() - trig_poly_k(x, &w));
        }
        out.push(Check { name: format!("circle window ({s:.4}, {t:.4}, {d})"), pass: circle <= a.slack, worst: circle });
    }
    Ok(())
}

fn fourier(out: &mut Vec<Check>) -> hzlab::Result<()> {
    for &(s, t, d) in &WINDOWS {
        let w = BSWindow::arc(s, t, d)?;
        let mut worst = 0f64;
        for m in (d.floor() as i64 + 1)..=(2.0 * d).floor() as i64 {
            worst = worst.max(fourier_u(m, &w, 1e-8)?.norm()).max(fourier_u(-m, &w, 1e-8)?.norm());
        }
        out.push(Check { name: format!("U transform vanishes beyond {d}"), pass: worst <= 1e-6, worst });
    }
    Ok(())
}

fn product(a: &BsArgs, seed: u64, out: &mut Vec<Check>) -> hzlab::Result<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let arcs = [(0.0, 1.0), (0.5, 2.0), (-1.0, 0.3), (2.0, 4.5)];
    let mut worst = Vec::new();
    for k in 1..=arcs.len() {
        let mut r = 0f64;
        for _ in 0..a.samples {
            let xs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            r = r.max(product_bound_check(&arcs[..k], &xs, 12.0)?.ratio);
        }
        worst.push(r);
    }
    // one factor is the circle inequality itself, so the normalized ratio stays below 1
    out.push(Check { name: "product bound, one factor".into(), pass: worst[0] <= 1.0, worst: worst[0] });
    Ok(worst)
}

#[derive(Serialize)]
struct BsReport {
    suite: Suite,
    grid: usize,
    range: f64,
    slack: f64,
    checks: Vec<Check>,
    /// max ratio lhs/((log Δ)^k ΣK) for k = 1..4 factors at Δ = 12.
    product_ratios: Option<Vec<f64>>,
    u_over_log_delta: Vec<f64>,
}

pub fn bs(a: &BsArgs, g: &Globals) -> Result<Report, CliError> {
    if a.grid == 0 || a.grid > 10_000_000 || !(a.range > 0.0 && a.range.is_finite()) || !(a.slack >= 0.0) {
        return Err(usage("--grid must lie in [1, 1e7], --range must be positive, --slack nonnegative"));
    }
    if a.samples == 0 || a.samples > 1_000_000 {
        return Err(usage("--samples must lie in [1, 1e6]"));
    }
    let mut checks = Vec::new();
    let all = a.suite == Suite::All;
    if all || a.suite == Suite::Majorant {
        majorant(a, &mut checks);
    }
    if all || a.suite == Suite::Windows {
        windows(a, &mut checks)?;
    }
    if all || a.suite == Suite::Fourier {
        fourier(&mut checks)?;
    }
    let product_ratios = if all || a.suite == Suite::Product { Some(product(a, g.seed, &mut checks)?) } else { None };
    let u_over_log_delta =
        WINDOWS.iter().map(|&(s, t, d)| Ok(u_log_bound(&BSWindow::arc(s, t, d)?, 2000))).collect::<hzlab::Result<_>>()?;
    let pass = checks.iter().all(|c| c.pass);
    let rep = BsReport { suite: a.suite, grid: a.grid, range: a.range, slack: a.slack, checks, product_ratios, u_over_log_delta };
    Ok(Report::new(rep, pass))
}
