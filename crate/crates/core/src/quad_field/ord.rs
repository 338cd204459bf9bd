//! Generator systems ϖ and ord vectors over Λ = {prime ideals} ∪ {unit}.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::elem::QuadElem;
use super::ideal::IdealHNF;
use super::primes::{factor_u128, factor_with_norm, prime_ideals_above, Factorization, PrimeIdealRecord, PrimeKey, SplitType};
use super::{ideal_denominator, principal_generator, RealQuadraticField};
use crate::error::{Error, Result};

/// Exponents of y^h over the ϖ_𝔭 and ε.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdVector {
    pub prime_part: BTreeMap<PrimeKey, i64>,
    pub unit_exp: i64,
}

impl OrdVector {
    pub fn is_zero(&self) -> bool {
        self.unit_exp == 0 && self.prime_part.values().all(|&v| v == 0)
    }

    pub fn add_scaled(&mut self, o: &OrdVector, k: i64) {
        for (key, v) in &o.prime_part {
            let e = self.prime_part.entry(*key).or_insert(0);
            *e += k * v;
            if *e == 0 {
                self.prime_part.remove(key);
            }
        }
        self.unit_exp += k * o.unit_exp;
    }

    pub fn sum(&self, o: &OrdVector) -> OrdVector {
        let mut r = self.clone();
        r.add_scaled(o, 1);
        r
    }
}

/// A choice of ϖ_𝔭 generating 𝔭^h, memoized per prime.
///
/// `unit_shift = 0` is the canonical window; other shifts multiply every ϖ by ε^shift.
#[derive(Debug)]
pub struct PiSystem {
    field: RealQuadraticField,
    unit_shift: i64,
    cache: RwLock<HashMap<PrimeKey, QuadElem>>,
}

impl Clone for PiSystem {
    fn clone(&self) -> Self {
        PiSystem { field: self.field.clone(), unit_shift: self.unit_shift, cache: RwLock::new(self.cache.read().unwrap().clone()) }
    }
}

impl PiSystem {
    pub fn canonical(field: RealQuadraticField) -> Self {
        Self::shifted(field, 0)
    }

    pub fn shifted(field: RealQuadraticField, unit_shift: i64) -> Self {
        PiSystem { field, unit_shift, cache: RwLock::new(HashMap::new()) }
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn pi(&self, rec: &PrimeIdealRecord) -> Result<QuadElem> {
        if let Some(v) = self.cache.read().unwrap().get(&rec.key()) {
            return Ok(v.clone());
        }
        let omega = self.field.omega();
        let ph = rec.hnf.pow(self.field.h, omega)?;
        let g = match principal_generator(&ph, omega, &self.field.eps) {
            Ok(g) => g,
            Err(Error::NotPrincipal) => return Err(Error::Internal(format!("𝔭^h not principal for {:?}", rec.key()))),
            Err(e) => return Err(e),
        };
        let g = &g * &self.field.eps.pow(self.unit_shift);
        self.cache.write().unwrap().insert(rec.key(), g.clone());
        Ok(g)
    }

    /// Valuations of (y) for y ∈ K^×.
    pub fn valuations(&self, y: &QuadElem) -> Result<Vec<(PrimeIdealRecord, i64)>> {
        let omega = self.field.omega();
        let num = QuadElem::new(y.p.clone(), y.q.clone(), 1, omega);
        let (p, q) = (to_i128(&num.p)?, to_i128(&num.q)?);
        let ig = IdealHNF::principal(p, q, omega)?;
        let mut v: BTreeMap<PrimeKey, (PrimeIdealRecord, i64)> = BTreeMap::new();
        let fg: Factorization = {
            let nf = factor_u128(ig.norm() as u128)?;
            factor_with_norm(&ig, &nf, omega)?
        };
        for (rec, e) in fg {
            v.insert(rec.key(), (rec, e as i64));
        }
        let den = to_i128(&y.den)?;
        for (pr, k) in factor_u128(den as u128)? {
            for rec in prime_ideals_above(pr, omega)? {
                let mult = if rec.split_type == SplitType::Ramified { 2 } else { 1 };
                let e = v.entry(rec.key()).or_insert((rec, 0));
                e.1 -= mult * k as i64;
            }
        }
        Ok(v.into_values().filter(|(_, e)| *e != 0).collect())
    }

    pub fn ord_vector(&self, y: &QuadElem) -> Result<OrdVector> {
        if !y.is_positive() {
            return Err(Error::NonPositive);
        }
        let h = self.field.h as i64;
        let vals = self.valuations(y)?;
        let mut prod = QuadElem::one(y.omega);
        let mut log_u = h as f64 * y.to_f64().ln();
        let mut prime_part = BTreeMap::new();
        for (rec, a) in &vals {
            let w = self.pi(rec)?;
            log_u -= *a as f64 * w.to_f64().ln();
            prod = &prod * &w.pow(*a);
            prime_part.insert(rec.key(), *a);
        }
        let eps = &self.field.eps;
        let b = (log_u / eps.to_f64().ln()).round() as i64;
        let lhs = y.pow(h);
        let rhs = &prod * &eps.pow(b);
        if lhs != rhs {
            return Err(Error::Internal(format!("y^h / ∏ϖ^a is not ε^{b} for y = {y}")));
        }
        Ok(OrdVector { prime_part, unit_exp: b })
    }
}

fn to_i128(x: &BigInt) -> Result<i128> {
    i128::try_from(x).map_err(|_| Error::Overflow("element coordinates"))
}

/// The shifted family n + α, n ≥ 0, with its ideal denominator and memoized ord vectors.
#[derive(Debug)]
pub struct AlphaFamily {
    pub field: RealQuadraticField,
    pub alpha: QuadElem,
    pub denom: IdealHNF,
    pi: PiSystem,
    ord_cache: RwLock<HashMap<u64, OrdVector>>,
}

impl AlphaFamily {
    pub fn new(field: RealQuadraticField, alpha: QuadElem) -> Result<Self> {
        Self::with_pi(PiSystem::canonical(field), alpha)
    }

    pub fn with_pi(pi: PiSystem, alpha: QuadElem) -> Result<Self> {
        if alpha.signum() < 0 {
            return Err(Error::NonPositive);
        }
        let denom = ideal_denominator(&alpha)?;
        Ok(AlphaFamily { field: pi.field().clone(), alpha, denom, pi, ord_cache: RwLock::new(HashMap::new()) })
    }

    pub fn pi_system(&self) -> &PiSystem {
        &self.pi
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn shifted(&self, n: u64) -> QuadElem {
        &self.alpha + &QuadElem::from_int(n, self.alpha.omega)
    }

    /// Integral coordinates of (n+α)·D where α = (p + qω)/D.
    fn scaled_coords(&self, n: u64) -> Result<(i128, i128, i128)> {
        let d = to_i128(&self.alpha.den)?;
        let p = to_i128(&self.alpha.p)?;
        let q = to_i128(&self.alpha.q)?;
        Ok((n as i128 * d + p, q, d))
    }

    /// The integral ideal (n+α)𝔞.
    pub fn ideal_n(&self, n: u64) -> Result<IdealHNF> {
        let (x, y, d) = self.scaled_coords(n)?;
        self.denom.mul_elem(x, y, self.field.omega())?.div_int(d)
    }

    /// Norm of (n+α)𝔞.
    pub fn norm_n(&self, n: u64) -> Result<u128> {
        Ok(self.ideal_n(n)?.norm() as u128)
    }

    pub fn factor_n(&self, n: u64) -> Result<Factorization> {
        self.field.factor_ideal(&self.ideal_n(n)?)
    }

    pub fn ord(&self, n: u64) -> Result<OrdVector> {
        if let Some(v) = self.ord_cache.read().unwrap().get(&n) {
            return Ok(v.clone());
        }
        let v = self.pi.ord_vector(&self.shifted(n))?;
        self.ord_cache.write().unwrap().insert(n, v.clone());
        Ok(v)
    }

    /// Exact value of ∏(n_j+α)^{e_j}.
    pub fn product(&self, ns: &[u64], es: &[i64]) -> QuadElem {
        let mut acc = QuadElem::one(self.alpha.omega);
        for (&n, &e) in ns.iter().zip(es) {
            acc = &acc * &self.shifted(n).pow(e);
        }
        acc
    }
}

/// ∏(n_j+α)^{e_j} = 1 decided through ord vectors.
pub fn multiplicative_relation(ns: &[u64], es: &[i64], fam: &AlphaFamily) -> Result<bool> {
    if ns.len() != es.len() {
        return Err(Error::InvalidParam("ns and es differ in length".into()));
    }
    let mut acc = OrdVector::default();
    for (&n, &e) in ns.iter().zip(es) {
        if e != 0 {
            acc.add_scaled(&fam.ord(n)?, e);
        }
    }
    Ok(acc.is_zero())
}

#[cfg(test)]
mod tests {
    use super::super::{make_field, AlphaParam, Sign};
    use super::*;

    #[test]
    fn ord_of_unit_and_generator() {
        let f = make_field(2).unwrap();
        let pi = PiSystem::canonical(f.clone());
        assert!(pi.ord_vector(&QuadElem::one(f.omega())).unwrap().is_zero());
        let e = pi.ord_vector(&f.eps).unwrap();
        assert!(e.prime_part.is_empty());
        assert_eq!(e.unit_exp, 1);
        let g = pi.ord_vector(&f.elem(3, 1, 1)).unwrap();
        assert_eq!(g.unit_exp, 0);
        assert_eq!(g.prime_part.values().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn ord_in_class_number_two() {
        let f = make_field(10).unwrap();
        let pi = PiSystem::canonical(f.clone());
        let e = pi.ord_vector(&f.eps).unwrap();
        assert_eq!(e.unit_exp, 2);
        // 2 = 𝔭₂², so ord(2) has a_𝔭 = 2 against ϖ generating 𝔭₂^2 = (2)
        let two = pi.ord_vector(&f.elem(2, 0, 1)).unwrap();
        assert_eq!(two.prime_part.values().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(two.unit_exp, 0);
    }

    #[test]
    fn relation_examples() {
        let al = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap();
        let fam = al.family().unwrap();
        assert!(multiplicative_relation(&[5], &[0], &fam).unwrap());
        assert!(multiplicative_relation(&[2, 2], &[1, -1], &fam).unwrap());
        assert!(!multiplicative_relation(&[0, 1], &[1, 1], &fam).unwrap());
        assert_eq!(fam.product(&[0, 1], &[1, 1]).to_string(), "(7+4√2)/8");
    }

    #[test]
    fn rejects_nonpositive() {
        let f = make_field(2).unwrap();
        let pi = PiSystem::canonical(f.clone());
        assert_eq!(pi.ord_vector(&f.elem(1, -1, 1)), Err(Error::NonPositive));
    }
}
