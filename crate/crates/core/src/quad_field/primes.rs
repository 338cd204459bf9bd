//! Prime ideals, splitting types and ideal factorization.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::elem::Omega;
use super::ideal::IdealHNF;
use crate::error::{Error, Result};

/// Trial-division bound for norm factorization.
pub const TRIAL_BOUND: usize = 10_000_000;

fn sieve() -> &'static primal::Sieve {
    static S: OnceLock<primal::Sieve> = OnceLock::new();
    S.get_or_init(|| primal::Sieve::new(TRIAL_BOUND))
}

pub fn is_prime(n: u64) -> bool {
    primal::is_prime(n)
}

/// Factor a positive integer `n` into (prime, exponent) pairs, ascending.
pub fn factor_u128(n: u128) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidParam("factor of zero".into()));
    }
    let n_us = usize::try_from(n).map_err(|_| Error::FactorBound(n))?;
    match sieve().factor(n_us) {
        Ok(v) => Ok(v.into_iter().map(|(p, e)| (p as u64, e as u32)).collect()),
        Err((rest, mut v)) => {
            if rest > 1 && primal::is_prime(rest as u64) {
                v.push((rest, 1));
                Ok(v.into_iter().map(|(p, e)| (p as u64, e as u32)).collect())
            } else {
                Err(Error::FactorBound(n))
            }
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Kronecker symbol (D | p) for a prime p.
pub fn kronecker(disc: i64, p: u64) -> i32 {
    if p == 2 {
        return match disc.rem_euclid(8) {
            0 | 2 | 4 | 6 => 0,
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = disc.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Square root of a quadratic residue `a` modulo an odd prime (Tonelli–Shanks).
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplitType {
    Inert,
    Ramified,
    Split,
}

/// Index of a split prime among the two ideals above p (0 = first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeKey {
    pub p: u64,
    pub split_type: SplitType,
    pub which: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdealRecord {
    pub p: u64,
    pub split_type: SplitType,
    pub which: u8,
    pub hnf: IdealHNF,
    pub residue_degree: u8,
}

impl PrimeIdealRecord {
    pub fn key(&self) -> PrimeKey {
        PrimeKey { p: self.p, split_type: self.split_type, which: self.which }
    }

    pub fn norm(&self) -> u128 {
        self.hnf.norm() as u128
    }
}

/// Roots of the minimal polynomial x² − t·x + n of ω modulo p, ascending and deduplicated.
fn omega_roots(p: u64, omega: Omega) -> Vec<u64> {
    let t = omega.t().rem_euclid(p as i64) as u64;
    let n = omega.n().rem_euclid(p as i64) as u64;
    let f = |x: u64| (mul_mod(x, x, p) + p - mul_mod(t, x, p) + n) % p;
    if p == 2 {
        return (0..2).filter(|&x| f(x) == 0).collect();
    }
    let disc = (omega.t() * omega.t() - 4 * omega.n()).rem_euclid(p as i64) as u64;
    let Some(r) = sqrt_mod(disc, p) else { return vec![] };
    let inv2 = p.div_ceil(2);
    let mut roots = vec![mul_mod((t + r) % p, inv2, p), mul_mod((t + p - r) % p, inv2, p)];
    roots.sort_unstable();
    roots.dedup();
    debug_assert!(roots.iter().all(|&x| f(x) == 0));
    roots
}

/// The prime ideals above `p`: one record (inert or ramified) or two (split).
pub fn prime_ideals_above(p: u64, omega: Omega) -> Result<Vec<PrimeIdealRecord>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pi = p as i128;
    let roots = omega_roots(p, omega);
    let mut bs: Vec<i128> = roots.iter().map(|&r| (-(r as i128)).rem_euclid(pi)).collect();
    bs.sort_unstable();
    let rec = |split_type, which, hnf, residue_degree| PrimeIdealRecord { p, split_type, which, hnf, residue_degree };
    Ok(match bs.len() {
        0 => vec![rec(SplitType::Inert, 0, IdealHNF { a: pi, b: 0, c: pi }, 2)],
        1 => vec![rec(SplitType::Ramified, 0, IdealHNF { a: pi, b: bs[0], c: 1 }, 1)],
        _ => vec![
            rec(SplitType::Split, 0, IdealHNF { a: pi, b: bs[0], c: 1 }, 1),
            rec(SplitType::Split, 1, IdealHNF { a: pi, b: bs[1], c: 1 }, 1),
        ],
    })
}

fn vp(mut n: i128, p: i128) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Valuation of an integral ideal at a prime ideal.
pub fn valuation(i: &IdealHNF, rec: &PrimeIdealRecord) -> u32 {
    let p = rec.p as i128;
    let c = i.c;
    let (a1, b1) = (i.a / c, i.b / c);
    let vc = vp(c, p);
    match rec.split_type {
        SplitType::Inert => vc,
        SplitType::Ramified => 2 * vc + vp(a1, p),
        SplitType::Split => {
            let hit = (b1 - rec.hnf.b).rem_euclid(p) == 0;
            vc + if hit { vp(a1, p) } else { 0 }
        }
    }
}

/// Factorization of an ideal, sorted by prime key.
pub type Factorization = Vec<(PrimeIdealRecord, u32)>;

/// Factor using a known factorization of the norm.
pub fn factor_with_norm(i: &IdealHNF, norm_factors: &[(u64, u32)], omega: Omega) -> Result<Factorization> {
    let mut out = Vec::new();
    for &(p, _) in norm_factors {
        for rec in prime_ideals_above(p, omega)? {
            let v = valuation(i, &rec);
            if v > 0 {
                out.push((rec, v));
            }
        }
    }
    out.sort_by_key(|(r, _)| r.key());
    Ok(out)
}

pub fn factor_ideal(i: &IdealHNF, omega: Omega) -> Result<Factorization> {
    let nf = factor_u128(i.norm() as u128)?;
    factor_with_norm(i, &nf, omega)
}

pub fn reconstruct(f: &Factorization, omega: Omega) -> Result<IdealHNF> {
    let mut acc = IdealHNF::unit();
    for (rec, e) in f {
        acc = acc.mul(&rec.hnf.pow(*e, omega)?, omega)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_matches_legendre() {
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(8, 5), -1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
    }

    #[test]
    fn tonelli_shanks() {
        for p in [13u64, 17, 41, 97, 257, 65537, 998244353] {
            for a in 1..60u64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mul_mod(r, r, p), a % p);
                }
            }
        }
    }

    #[test]
    fn splitting_in_sqrt2() {
        let w = Omega::new(2);
        let s7 = prime_ideals_above(7, w).unwrap();
        assert_eq!(s7.len(), 2);
        assert_eq!(s7[0].hnf, IdealHNF { a: 7, b: 3, c: 1 });
        assert_eq!(s7[1].hnf, IdealHNF { a: 7, b: 4, c: 1 });
        assert_eq!(prime_ideals_above(2, w).unwrap()[0].split_type, SplitType::Ramified);
        let s5 = prime_ideals_above(5, w).unwrap();
        assert_eq!((s5[0].split_type, s5[0].norm()), (SplitType::Inert, 25));
        assert!(prime_ideals_above(9, w).is_err());
    }

    #[test]
    fn factor_small_ideals() {
        let w = Omega::new(2);
        let f = factor_ideal(&IdealHNF::from_int(7), w).unwrap();
        assert_eq!(f.iter().map(|(r, e)| (r.which, *e)).collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        assert!(factor_ideal(&IdealHNF::unit(), w).unwrap().is_empty());
        let sq = IdealHNF::principal(3, 1, w).unwrap().pow(2, w).unwrap();
        let f = factor_ideal(&sq, w).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].0.which, f[0].1), (0, 2));
    }

    #[test]
    fn large_prime_factor_is_accepted() {
        let p = 1_000_000_007u128;
        assert_eq!(factor_u128(6 * p).unwrap(), vec![(2, 1), (3, 1), (p as u64, 1)]);
    }
}
