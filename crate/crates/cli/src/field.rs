use hzlab::cassels::{check_lemma42, prop41_from_table, FamilyTable, Lemma42Report, Prop41Report};
use hzlab::quad_field::{is_prime, kronecker, make_field, AlphaParam, IdealHNF, SplitType};
use serde::Serialize;

use crate::args::{AlphaArgs, CasselsArgs, FieldArgs};
use crate::output::{usage, CliError, Report};

#[derive(Serialize)]
struct Unit {
    display: String,
    value: f64,
    norm: i64,
}

#[derive(Serialize)]
struct PrimeIdeal {
    hnf: IdealHNF,
    generator: Option<String>,
}

#[derive(Serialize)]
struct PrimeRow {
    p: u64,
    split_type: SplitType,
    ideals: Vec<PrimeIdeal>,
}

#[derive(Serialize)]
struct FieldReport {
    d: i64,
    d1: i64,
    d2: i64,
    disc: i64,
    omega: &'static str,
    h: u32,
    eps: Unit,
    class_representatives: Vec<IdealHNF>,
    primes: Vec<PrimeRow>,
    splitting_matches_kronecker: bool,
    class_powers_principal: bool,
}

pub fn field(a: &FieldArgs) -> Result<Report, CliError> {
    if a.primes > 100_000 {
        return Err(usage("--primes must be at most 100000"));
    }
    let f = make_field(a.d)?;
    let w = f.omega();
    let mut primes = Vec::new();
    let mut kron_ok = true;
    for p in (2..=a.primes).filter(|&p| is_prime(p)) {
        let recs = f.prime_ideals_above(p)?;
        let split_type = recs[0].split_type;
        let want = match kronecker(f.disc, p) {
            1 => SplitType::Split,
            0 => SplitType::Ramified,
            _ => SplitType::Inert,
        };
        kron_ok &= want == split_type && recs.len() == if want == SplitType::Split { 2 } else { 1 };
        let ideals = recs
            .iter()
            .map(|r| {
                let generator = match f.principal_generator(&r.hnf) {
                    Ok(g) => Some(g.to_string()),
                    Err(hzlab::Error::NotPrincipal) => None,
                    Err(e) => return Err(e),
                };
                Ok(PrimeIdeal { hnf: r.hnf, generator })
            })
            .collect::<hzlab::Result<_>>()?;
        primes.push(PrimeRow { p, split_type, ideals });
    }
    let reps = f.class_representatives()?;
    let mut powers_ok = true;
    for c in &reps {
        powers_ok &= f.principal_generator(&c.pow(f.h, w)?).is_ok();
    }
    let (nn, _) = f.eps.norm();
    let rep = FieldReport {
        d: f.d,
        d1: f.d1,
        d2: f.d2,
        disc: f.disc,
        omega: if w.half { "(1+sqrt(d2))/2" } else { "sqrt(d2)" },
        h: f.h,
        eps: Unit { display: f.eps.to_string(), value: f.eps.to_f64(), norm: if nn == 1.into() { 1 } else { -1 } },
        class_representatives: reps,
        primes,
        splitting_matches_kronecker: kron_ok,
        class_powers_principal: powers_ok,
    };
    let pass = kron_ok && powers_ok;
    Ok(Report::new(rep, pass))
}

pub fn alpha_param(a: &AlphaArgs) -> Result<AlphaParam, CliError> {
    Ok(AlphaParam::new(a.a, a.b, a.sign, a.d)?)
}

#[derive(Serialize)]
struct AlphaOut<'a> {
    #[serde(flatten)]
    args: &'a AlphaArgs,
    label: String,
    value: f64,
}

#[derive(Serialize)]
struct CasselsReport<'a> {
    alpha: AlphaOut<'a>,
    #[serde(flatten)]
    density: hzlab::cassels::DensityReport,
    lemma42: Lemma42Report,
    prop41: Prop41Report,
    holds_prop41: bool,
    prop41_first_hit: Option<u64>,
    prop41_best: (u64, f64),
    /// (N, ratio_K) at N = 10, 100, 1000, … and at N itself.
    prop41_ladder: Vec<(u64, f64)>,
}

fn is_power_of_ten(mut n: u64) -> bool {
    while n >= 10 && n % 10 == 0 {
        n /= 10;
    }
    n == 1
}

const DECOMP_HEADER: [&str; 6] = ["n", "xy", "b_norm", "bounded_norm", "split_part", "ratio_K"];

/// One row per n ≤ N; split primes print as p.which^u, and ratio_K is the ratio at N = n.
fn decomposition_rows(table: &FamilyTable, n_max: u64, ratios: &[(u64, f64)]) -> hzlab::Result<Vec<Vec<String>>> {
    let ratio: std::collections::BTreeMap<u64, f64> = ratios.iter().copied().collect();
    (0..=n_max)
        .map(|n| {
            let dc = table.decomposition(n)?;
            let split: Vec<String> = dc.s_part.iter().map(|(r, e)| format!("{}.{}^{e}", r.p, r.which)).collect();
            Ok(vec![
                n.to_string(),
                dc.xy.to_string(),
                dc.b_ideal.norm().to_string(),
                dc.bounded_norm().to_string(),
                split.join(" "),
                ratio.get(&n).map(|r| format!("{r:.12}")).unwrap_or_default(),
            ])
        })
        .collect()
}

pub fn cassels(a: &CasselsArgs) -> Result<Report, CliError> {
    if !(a.sigma > 0.5 && a.sigma < 1.0) {
        return Err(usage(format!("--sigma must lie in (1/2, 1), got {}", a.sigma)));
    }
    if !(3..=200_000).contains(&a.n) {
        return Err(usage(format!("--N must lie in [3, 200000], got {}", a.n)));
    }
    let al = alpha_param(&a.alpha)?;
    let table = FamilyTable::for_n(&al.family()?, a.n)?;
    let density = table.density_report(a.n, a.sigma)?;
    let lemma42 = check_lemma42(&al, a.n)?;
    let prop41 = prop41_from_table(&table, a.n, a.sigma)?;
    let scan = table.prop41_scan(3..=a.n, a.sigma)?;
    let pass = lemma42.pass && prop41.holds;
    let rows = match a.csv {
        Some(_) => decomposition_rows(&table, a.n, &scan.ratios)?,
        None => Vec::new(),
    };
    let rep = CasselsReport {
        alpha: AlphaOut { args: &a.alpha, label: al.label(), value: al.value_f64() },
        density,
        lemma42,
        holds_prop41: prop41.holds,
        prop41,
        prop41_first_hit: scan.first_hit,
        prop41_best: scan.best,
        prop41_ladder: scan.ratios.iter().copied().filter(|&(n, _)| n == a.n || is_power_of_ten(n)).collect(),
    };
    Ok(Report::new(rep, pass).with_table(a.csv.as_deref(), DECOMP_HEADER.to_vec(), rows))
}
