use hzlab::experiments::{detect_e1, run_dense_experiment, run_limit_experiment, DenseConfig, LimitConfig};
use hzlab::random_model::{
    bessel_j0, empirical_char, find_centers, omega0_probability, w_grid, Omega0Report, OmegaWindow, PhaseAssignment,
    RandomModel,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{DenseArgs, Globals, LimitArgs, ModelArgs};
use crate::field::alpha_param;
use crate::output::{usage, CliError, Report};

fn check_sigma(sigma: f64, hi_open: bool) -> Result<(), CliError> {
    let ok = sigma > 0.5 && if hi_open { sigma < 1.0 } else { sigma <= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(usage(format!("--sigma must lie in (1/2, 1{}, got {sigma}", if hi_open { ")" } else { "]" })))
    }
}

fn check_grid(radius: f64, count: usize) -> Result<(), CliError> {
    if !(radius >= 0.0 && radius.is_finite()) || count == 0 || count > 10_000 {
        return Err(usage("w-grid needs a finite radius ≥ 0 and 1 to 10000 points"));
    }
    Ok(())
}

#[derive(Serialize)]
struct J0Row {
    n: u64,
    sup_discrepancy: f64,
}

#[derive(Serialize)]
struct MomentRow {
    mu: u32,
    nu: u32,
    exact: f64,
    mc: (f64, f64),
    std_error: f64,
}

#[derive(Serialize)]
struct WindowOut {
    relations_found: usize,
    centers: Vec<f64>,
    #[serde(flatten)]
    report: Omega0Report,
    z_score: f64,
}

#[derive(Serialize)]
struct ModelReport {
    label: String,
    #[serde(rename = "N")]
    n: u64,
    sigma: f64,
    #[serde(rename = "M")]
    m: usize,
    j0: Vec<J0Row>,
    moments: Vec<MomentRow>,
    window: Option<WindowOut>,
}

pub fn model(a: &ModelArgs, g: &Globals) -> Result<Report, CliError> {
    check_sigma(a.sigma, false)?;
    check_grid(a.w_radius, a.w_count)?;
    if a.m == 0 || a.m > 50_000_000 || a.n > 64 {
        return Err(usage("--M must lie in [1, 5e7] and --N in [0, 64]"));
    }
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let al = alpha_param(&a.alpha)?;
    let top = a.n_list.iter().copied().chain([a.n, a.window_n]).max().unwrap_or(0);
    let model = RandomModel::from_alpha(&al, top)?;
    let grid = w_grid(a.w_radius, a.w_count);
    let mut pass = true;
    let mut j0 = Vec::new();
    for &n in &a.n_list {
        let xs: Vec<Complex64> =
            (0..a.m as u64).map(|i| model.sample_x(n, &PhaseAssignment::new(g.seed, i))).collect::<hzlab::Result<_>>()?;
        let mut sup = 0f64;
        for &w in &grid {
            sup = sup.max((empirical_char(w, &xs)? - bessel_j0(w.norm())).norm());
        }
        pass &= sup <= a.tol;
        j0.push(J0Row { n, sup_discrepancy: sup });
    }
    let samples = model.draw_samples(a.sigma, a.n, a.m, g.seed)?;
    let mut moments = Vec::new();
    for (mu, nu) in [(1u32, 0u32), (1, 1), (2, 1)] {
        let exact = model.moment_exact(mu, nu, a.sigma, a.n)?;
        let vals: Vec<Complex64> = samples.iter().map(|z| z.powu(mu) * z.conj().powu(nu)).collect();
        let mean: Complex64 = vals.iter().sum::<Complex64>() / a.m as f64;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / a.m as f64;
        let se = (var / a.m as f64).sqrt();
        pass &= (mean - exact).norm() <= 5.0 * se + 1e-12;
        moments.push(MomentRow { mu, nu, exact, mc: (mean.re, mean.im), std_error: se });
    }
    let window = if a.window_n <= 30 {
        let fam = al.family()?;
        let relations_found = detect_e1(&fam, a.window_n, 5)?.len();
        let c = find_centers(&model, a.sigma, a.window_n, Complex64::new(1.0, 0.0), 0.5, 100_000, g.seed)?;
        let centers = c.map(|c| c.centers).unwrap_or_else(|| vec![0.0; a.window_n as usize + 1]);
        let report = omega0_probability(&model, &OmegaWindow::new(centers.clone(), a.delta)?, a.m, g.seed)?;
        let p = report.independent_prediction;
        let sd = (p * (1.0 - p) / a.m as f64).sqrt();
        let z_score = if sd > 0.0 { (report.mc_estimate - p) / sd } else { 0.0 };
        if relations_found == 0 {
            pass &= z_score.abs() <= 3.0;
        }
        Some(WindowOut { relations_found, centers, report, z_score })
    } else {
        None
    };
    let rep = ModelReport { label: al.label(), n: a.n, sigma: a.sigma, m: a.m, j0, moments, window };
    Ok(Report::new(rep, pass))
}

pub fn limit(a: &LimitArgs, g: &Globals) -> Result<Report, CliError> {
    check_sigma(a.sigma, false)?;
    check_grid(a.w_radius, a.w_count)?;
    let mut ts = a.t.clone();
    if ts.len() == 1 {
        ts.insert(0, ts[0] / 10.0);
    }
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t <= 1e6)) || ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("--T must be an increasing list of values in (0, 1e6]"));
    }
    if a.m == 0 || a.m > 50_000_000 || a.n > 10_000 || !(a.step > 0.0) {
        return Err(usage("--M must lie in [1, 5e7], --N ≤ 10000 and --step > 0"));
    }
    let cfg = LimitConfig {
        alpha: alpha_param(&a.alpha)?,
        sigma: a.sigma,
        n: a.n,
        ts,
        m: a.m,
        w_radius: a.w_radius,
        w_count: a.w_count,
        seed: g.seed,
        step: a.step,
    };
    let rep = run_limit_experiment(&cfg)?;
    let sups: Vec<f64> = rep.rows.iter().map(|r| r.sup_discrepancy).collect();
    let pass = sups.last().is_some_and(|&s| s <= a.tol) && sups.windows(2).all(|w| w[1] <= w[0] + a.noise);
    let mut rows = Vec::new();
    for r in &rep.rows {
        for (w, d) in rep.w_grid.iter().zip(&r.per_w) {
            rows.push(vec![r.t.to_string(), format!("{:.12}", w.0), format!("{:.12}", w.1), format!("{d:.12}")]);
        }
    }
    #[derive(Serialize)]
    struct Out {
        label: String,
        sigma: f64,
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "M")]
        m: usize,
        seed: u64,
        #[serde(flatten)]
        report: hzlab::experiments::LimitReport,
    }
    let out = Out { label: cfg.alpha.label(), sigma: a.sigma, n: a.n, m: a.m, seed: g.seed, report: rep };
    Ok(Report::new(out, pass).with_table(a.csv.as_deref(), vec!["T", "w_re", "w_im", "discrepancy"], rows))
}

pub fn dense(a: &DenseArgs) -> Result<Report, CliError> {
    check_sigma(a.sigma, true)?;
    if !(a.t > 0.0 && a.t <= 1e6 && a.step > 0.0 && a.eps > 0.0) {
        return Err(usage("--T must lie in (0, 1e6], --step and --eps must be positive"));
    }
    if !(a.c > 0.0 && a.c < 1.0) || !(1..=200).contains(&a.amax) {
        return Err(usage("--c must lie in (0, 1) and --amax in [1, 200]"));
    }
    if a.e1_n > 30 || !(1..=10).contains(&a.e1_bound) || a.e2_l > 60 {
        return Err(usage("relation search needs --e1-n ≤ 30, --e1-bound in [1, 10], --e2-l ≤ 60"));
    }
    let cfg = DenseConfig {
        c: a.c,
        d: a.d,
        a_max: a.amax,
        sigma: a.sigma,
        z0: (a.z0_re, a.z0_im),
        eps: a.eps,
        t: a.t,
        step: a.step,
        e1_n: a.e1_n,
        e1_bound: a.e1_bound,
        e2_l: a.e2_l,
    };
    let rep = run_dense_experiment(&cfg)?;
    let monotone = rep.rows.iter().all(|r| r.density <= r.density_double_eps);
    let pass = rep.all_positive && monotone;
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.clone(),
                format!("{:.15}", r.value),
                format!("{:.12}", r.density),
                format!("{:.12}", r.density_double_eps),
                r.positive.to_string(),
                r.exceptional.to_string(),
            ]
        })
        .collect();
    #[derive(Serialize)]
    struct Out {
        c: f64,
        d: i64,
        amax: i64,
        sigma: f64,
        z0: (f64, f64),
        eps: f64,
        #[serde(rename = "T")]
        t: f64,
        monotone_in_eps: bool,
        #[serde(flatten)]
        report: hzlab::experiments::DenseReport,
    }
    let out = Out { c: a.c, d: a.d, amax: a.amax, sigma: a.sigma, z0: cfg.z0, eps: a.eps, t: a.t, monotone_in_eps: monotone, report: rep };
    Ok(Report::new(out, pass).with_table(
        a.csv.as_deref(),
        vec!["alpha", "value", "density", "density_double_eps", "positive", "exceptional"],
        rows,
    ))
}
