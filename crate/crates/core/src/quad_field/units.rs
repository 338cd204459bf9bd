//! Fundamental unit, principal generators and the class number.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};

use super::elem::{Omega, QuadElem};
use super::ideal::IdealHNF;
use super::primes::factor_u128;
use crate::error::{Error, Result};

/// Step budget for the continued-fraction cycle in [`principal_generator`].
pub const GENERATOR_BUDGET: u64 = 10_000_000;

/// Smallest unit ε > 1, from the continued fraction of ω.
pub fn fundamental_unit(omega: Omega) -> QuadElem {
    let d = omega.d2;
    let s = d.sqrt();
    // ω = (P + √d)/Q with Q | d − P²
    let (mut pp, mut qq) = if omega.half { (1i64, 2i64) } else { (0, 1) };
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let t = BigInt::from(omega.t());
    loop {
        let a = (pp + s).div_euclid(qq);
        let h2 = &h1 * a + &h0;
        let k2 = &k1 * a + &k0;
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        // p − qω is small; its conjugate is the candidate unit
        let cand = QuadElem::new(&h1 - &k1 * &t, k1.clone(), 1, omega);
        let (nn, _) = cand.norm();
        if nn.abs().is_one() {
            let u = if cand.is_positive() { cand } else { -&cand };
            if u > QuadElem::one(omega) {
                return u;
            }
        }
        pp = a * qq - pp;
        qq = (d - pp * pp) / qq;
    }
}

fn to_i128(x: &BigInt) -> Result<i128> {
    i128::try_from(x).map_err(|_| Error::Overflow("element coordinates"))
}

/// Canonical generator γ of a principal ideal: γ > 0 and √N ≤ γ < √N·ε.
///
/// Runs the continued fraction of θ = (B′ + ω)/A′ for the primitive part [A′, B′ + ω].
/// With θ_k = (P_k + √d)/Q_k, the lattice Z + θ_kZ equals O exactly when |Q_k| = σ
/// (σ = 2 for the half basis), and Z + θZ = ∏_{j<k}(θ_j − a_j)·(Z + θ_kZ).
pub fn principal_generator(i: &IdealHNF, omega: Omega, eps: &QuadElem) -> Result<QuadElem> {
    let (ap, bp) = (i.a / i.c, i.b / i.c);
    let d = omega.d2 as i128;
    let s0 = (omega.d2 as u64).sqrt() as i128;
    let sigma = if omega.half { 2 } else { 1 };
    let (mut p, mut q) = if omega.half { (2 * bp + 1, 2 * ap) } else { (bp, ap) };
    let mut gen = QuadElem::from_int(i.c * ap, omega);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..GENERATOR_BUDGET {
        if q.abs() == sigma {
            let g = canonical_associate(&gen, eps);
            let (nn, nd) = g.norm();
            if !nd.is_one() || nn.abs() != BigInt::from(i.norm()) {
                return Err(Error::Internal(format!("generator norm mismatch for {i:?}")));
            }
            return Ok(g);
        }
        if !seen.insert((p, q)) {
            return Err(Error::NotPrincipal);
        }
        let a = if q > 0 { (p + s0).div_euclid(q) } else { -(p + s0).div_euclid(-q) - 1 };
        // θ − a = (P − aQ + √d)/Q
        gen = &gen * &QuadElem::from_sqrt_form(p - a * q, 1, q, omega);
        p = a * q - p;
        if (d - p * p) % q != 0 {
            return Err(Error::Internal("continued fraction lost divisibility".into()));
        }
        q = (d - p * p) / q;
    }
    Err(Error::SearchBudget(GENERATOR_BUDGET))
}

/// Canonical associate of a generator in the window [√N, √N·ε).
pub fn canonical_associate(g: &QuadElem, eps: &QuadElem) -> QuadElem {
    let omega = g.omega;
    let mut g = if g.is_positive() { g.clone() } else { -g };
    let (nn, nd) = g.norm();
    let nm = QuadElem::new(nn.abs(), 0, nd, omega);
    let upper = &nm * &(eps * eps);
    let einv = eps.inv();
    loop {
        let g2 = &g * &g;
        if g2 < nm {
            g = &g * eps;
        } else if g2 >= upper {
            g = &g * &einv;
        } else {
            return g;
        }
    }
}

/// All integral ideals of norm exactly `m`.
pub fn ideals_of_norm(m: i128, omega: Omega) -> Vec<IdealHNF> {
    let mut out = Vec::new();
    let mut c = 1i128;
    while c * c <= m {
        if m % (c * c) == 0 {
            let a1 = m / (c * c);
            for b1 in 0..a1 {
                if omega.norm_coords(b1, 1) % a1 == 0 {
                    out.push(IdealHNF { a: a1 * c, b: b1 * c, c });
                }
            }
        }
        c += 1;
    }
    out
}

fn is_principal(i: &IdealHNF, omega: Omega, eps: &QuadElem) -> Result<bool> {
    match principal_generator(i, omega, eps) {
        Ok(_) => Ok(true),
        Err(Error::NotPrincipal) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Class group representatives from ideals of norm up to the Minkowski bound √D/2.
pub fn class_representatives(omega: Omega, disc: i64, eps: &QuadElem) -> Result<Vec<IdealHNF>> {
    let bound = ((disc as f64).sqrt() / 2.0).floor() as i128;
    let mut reps: Vec<IdealHNF> = vec![IdealHNF::unit()];
    for m in 2..=bound.max(1) {
        for i in ideals_of_norm(m, omega) {
            let mut known = false;
            for r in &reps {
                // I ~ R iff I·conj(R) is principal
                if is_principal(&i.mul(&r.conj(omega)?, omega)?, omega, eps)? {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push(i);
            }
        }
    }
    Ok(reps)
}

pub fn class_number(omega: Omega, disc: i64, eps: &QuadElem) -> Result<u32> {
    Ok(class_representatives(omega, disc, eps)?.len() as u32)
}

/// Whether a rational integer is a perfect square.
pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// d ↦ (d1, d2) with d = d1²·d2 and d2 squarefree.
pub fn squarefree_decompose(d: i64) -> Result<(i64, i64)> {
    if d <= 1 {
        return Err(Error::InvalidField { d, reason: "d must be at least 2" });
    }
    if is_square(d as u64) {
        return Err(Error::InvalidField { d, reason: "d is a perfect square" });
    }
    let (mut d1, mut d2) = (1i64, 1i64);
    for (p, e) in factor_u128(d as u128)? {
        let p = p as i64;
        d1 *= p.pow(e / 2);
        if e % 2 == 1 {
            d2 *= p;
        }
    }
    Ok((d1, d2))
}

pub(crate) fn to_coords(x: &QuadElem) -> Result<(i128, i128)> {
    if !x.is_integral() {
        return Err(Error::Internal(format!("{x} is not integral")));
    }
    Ok((to_i128(&x.p)?, to_i128(&x.q)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(8).unwrap(), (2, 2));
        assert_eq!(squarefree_decompose(12).unwrap(), (2, 3));
        assert_eq!(squarefree_decompose(5).unwrap(), (1, 5));
        assert!(squarefree_decompose(4).is_err());
        assert!(squarefree_decompose(1).is_err());
    }

    #[test]
    fn ideal_enumeration_norm_two_in_sqrt10() {
        let w = Omega::new(10);
        let v = ideals_of_norm(2, w);
        assert_eq!(v, vec![IdealHNF { a: 2, b: 0, c: 1 }]);
    }
}
