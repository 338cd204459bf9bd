//! Exact arithmetic in real quadratic fields K = Q(√d).
//!
//! Elements live in the integral basis (1, ω), ideals in Hermite normal form.
//! The ord vectors here feed the random multiplicative model in
//! [`crate::random_model`].

mod elem;
mod ideal;
mod ord;
mod primes;
mod units;

pub use elem::{Omega, QuadElem};
pub use ideal::IdealHNF;
pub use ord::{multiplicative_relation, AlphaFamily, OrdVector, PiSystem};
pub use primes::{
    factor_ideal, factor_u128, factor_with_norm, is_prime, kronecker, prime_ideals_above, reconstruct, valuation,
    Factorization, PrimeIdealRecord, PrimeKey, SplitType, TRIAL_BOUND,
};
#[allow(unused_imports)]
pub(crate) use primes::{mul_mod, sqrt_mod};
pub use units::{
    canonical_associate, class_representatives, fundamental_unit, ideals_of_norm, principal_generator,
    squarefree_decompose, GENERATOR_BUDGET,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaKind {
    /// ω = √d2
    Sqrt,
    /// ω = (1+√d2)/2
    HalfSqrt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealQuadraticField {
    pub d: i64,
    pub d1: i64,
    pub d2: i64,
    pub disc: i64,
    pub omega_kind: OmegaKind,
    pub h: u32,
    pub eps: QuadElem,
}

impl RealQuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        make_field(d)
    }

    pub fn omega(&self) -> Omega {
        Omega::new(self.d2)
    }

    pub fn elem(&self, p: i64, q: i64, den: i64) -> QuadElem {
        QuadElem::new(p, q, den, self.omega())
    }

    /// `√d = d1·√d2`.
    pub fn sqrt_d(&self) -> QuadElem {
        &QuadElem::sqrt_d2(self.omega()) * &QuadElem::from_int(self.d1, self.omega())
    }

    pub fn prime_ideals_above(&self, p: u64) -> Result<Vec<PrimeIdealRecord>> {
        prime_ideals_above(p, self.omega())
    }

    pub fn factor_ideal(&self, i: &IdealHNF) -> Result<Factorization> {
        factor_ideal(i, self.omega())
    }

    pub fn principal_generator(&self, i: &IdealHNF) -> Result<QuadElem> {
        principal_generator(i, self.omega(), &self.eps)
    }

    pub fn class_representatives(&self) -> Result<Vec<IdealHNF>> {
        class_representatives(self.omega(), self.disc, &self.eps)
    }

    /// Principal ideal of an integral element.
    pub fn ideal_of(&self, x: &QuadElem) -> Result<IdealHNF> {
        let (p, q) = units::to_coords(x)?;
        IdealHNF::principal(p, q, self.omega())
    }

    /// Same field regardless of the square factor d1.
    pub fn same_field(&self, o: &RealQuadraticField) -> bool {
        self.d2 == o.d2
    }
}

pub fn make_field(d: i64) -> Result<RealQuadraticField> {
    let (d1, d2) = squarefree_decompose(d)?;
    let omega = Omega::new(d2);
    let disc = if omega.half { d2 } else { 4 * d2 };
    let eps = fundamental_unit(omega);
    let h = units::class_number(omega, disc, &eps)?;
    let omega_kind = if omega.half { OmegaKind::HalfSqrt } else { OmegaKind::Sqrt };
    Ok(RealQuadraticField { d, d1, d2, disc, omega_kind, h, eps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "p" => Ok(Sign::Plus),
            "-" | "minus" | "m" => Ok(Sign::Minus),
            _ => Err(Error::InvalidParam(format!("sign must be + or -, got {s}"))),
        }
    }
}

/// α = (b ± √d)/a with 0 < α < 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaParam {
    pub a: i64,
    pub b: i64,
    pub sign: Sign,
    pub field: RealQuadraticField,
}

impl AlphaParam {
    pub fn new(a: i64, b: i64, sign: Sign, d: i64) -> Result<Self> {
        Self::with_field(a, b, sign, make_field(d)?)
    }

    pub fn with_field(a: i64, b: i64, sign: Sign, field: RealQuadraticField) -> Result<Self> {
        if a <= 0 || b <= 0 {
            return Err(Error::InvalidParam(format!("a and b must be positive, got a={a}, b={b}")));
        }
        let al = AlphaParam { a, b, sign, field };
        let v = al.value();
        if !(v.is_positive() && v < QuadElem::one(v.omega)) {
            return Err(Error::InvalidParam(format!("alpha = {v} is not in (0, 1)")));
        }
        Ok(al)
    }

    pub fn d(&self) -> i64 {
        self.field.d
    }

    pub fn value(&self) -> QuadElem {
        let w = self.field.omega();
        let sd = self.field.sqrt_d();
        let s = &sd * &QuadElem::from_int(self.sign.as_i64(), w);
        let num = &QuadElem::from_int(self.b, w) + &s;
        &num * &QuadElem::new(1, 0, self.a, w)
    }

    pub fn value_f64(&self) -> f64 {
        (self.b as f64 + self.sign.as_i64() as f64 * (self.d() as f64).sqrt()) / self.a as f64
    }

    /// c < (b−√d)/a < (b+√d)/a < 1.
    pub fn in_a_cd(&self, c: f64) -> bool {
        in_a_cd(self.a, self.b, self.d(), c)
    }

    pub fn family(&self) -> Result<AlphaFamily> {
        AlphaFamily::new(self.field.clone(), self.value())
    }

    pub fn label(&self) -> String {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        format!("({}{}√{})/{}", self.b, s, self.d(), self.a)
    }
}

pub(crate) fn in_a_cd(a: i64, b: i64, d: i64, c: f64) -> bool {
    // exact: (b−√d)/a > c ⟺ b − c·a > √d, and b + √d < a ⟺ √d < a − b
    let lo = b as f64 - c * a as f64;
    lo > 0.0 && lo * lo > d as f64 && a > b && ((a - b) * (a - b)) > d
}

/// The ideal denominator 𝔞 = {x ∈ O_K : xα ∈ O_K} of an element α.
pub fn ideal_denominator(alpha: &QuadElem) -> Result<IdealHNF> {
    let omega = alpha.omega;
    let dd = i128::try_from(&alpha.den).map_err(|_| Error::Overflow("denominator"))?;
    let num = QuadElem::new(alpha.p.clone(), alpha.q.clone(), 1, omega);
    let (p, q) = units::to_coords(&num)?;
    // 𝔤 = (D, Dα) = 𝔞⁻¹·(D) and 𝔞 = D·conj(𝔤)/N(𝔤)
    let g = IdealHNF::from_generators(&[(dd, 0), (0, dd), (p, q), omega.mul_coords(p, q, 0, 1)])?;
    let ng = g.norm();
    let gc = g.conj(omega)?;
    gc.mul(&IdealHNF::from_int(dd), omega)?.div_int(ng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_and_units() {
        let f2 = make_field(2).unwrap();
        assert_eq!((f2.disc, f2.h, f2.eps.to_string()), (8, 1, "1+√2".to_string()));
        let f3 = make_field(3).unwrap();
        assert_eq!((f3.disc, f3.h, f3.eps.to_string()), (12, 1, "2+√3".to_string()));
        let f5 = make_field(5).unwrap();
        assert_eq!((f5.disc, f5.h, f5.omega_kind), (5, 1, OmegaKind::HalfSqrt));
        assert_eq!(f5.eps.to_string(), "(1+√5)/2");
        let f8 = make_field(8).unwrap();
        assert!(f8.same_field(&f2));
        assert_eq!(f8.d1, 2);
        assert_eq!(make_field(10).unwrap().h, 2);
        assert!(make_field(4).is_err());
    }

    #[test]
    fn alpha_value_and_range() {
        let al = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap();
        assert_eq!(al.value().to_string(), "(2+√2)/4");
        assert!((al.value_f64() - al.value().to_f64()).abs() < 1e-15);
        assert!(AlphaParam::new(2, 1, Sign::Plus, 2).is_err()); // (1+√2)/2 > 1
        let al8 = AlphaParam::new(8, 4, Sign::Minus, 8).unwrap(); // (4-2√2)/8
        assert_eq!(al8.value(), AlphaParam::new(4, 2, Sign::Minus, 2).unwrap().value());
    }

    #[test]
    fn denominators() {
        let al = AlphaParam::new(4, 2, Sign::Plus, 2).unwrap();
        let a = ideal_denominator(&al.value()).unwrap();
        assert_eq!(a.norm(), 8);
        let f = &al.field;
        assert_eq!(a, f.ideal_of(&f.elem(0, 2, 1)).unwrap()); // (2√2)
        let am = ideal_denominator(&AlphaParam::new(4, 2, Sign::Minus, 2).unwrap().value()).unwrap();
        assert_eq!(am, a);
        assert_eq!(ideal_denominator(&f.elem(0, 1, 1)).unwrap(), IdealHNF::unit());
    }
}
