//! Exact field elements `(p + q·ω)/den`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// The integral basis generator ω: `√d2` or `(1+√d2)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Omega {
    pub d2: i64,
    pub half: bool,
}

impl Omega {
    pub fn new(d2: i64) -> Self {
        Omega { d2, half: d2.rem_euclid(4) == 1 }
    }

    /// Trace of ω.
    pub fn t(&self) -> i64 {
        i64::from(self.half)
    }

    /// Norm of ω.
    pub fn n(&self) -> i64 {
        if self.half {
            (1 - self.d2) / 4
        } else {
            -self.d2
        }
    }

    pub fn value(&self) -> f64 {
        let s = (self.d2 as f64).sqrt();
        if self.half {
            (1.0 + s) / 2.0
        } else {
            s
        }
    }

    pub fn conj_value(&self) -> f64 {
        self.t() as f64 - self.value()
    }

    /// Coordinates of `(x, y) * (u, v)` in the basis (1, ω).
    pub fn mul_coords(&self, x: i128, y: i128, u: i128, v: i128) -> (i128, i128) {
        let (t, n) = (self.t() as i128, self.n() as i128);
        (x * u - n * y * v, x * v + y * u + t * y * v)
    }

    /// Norm of `x + yω`.
    pub fn norm_coords(&self, x: i128, y: i128) -> i128 {
        x * x + self.t() as i128 * x * y + self.n() as i128 * y * y
    }
}

/// Exact element `(p + q·ω)/den` with `den > 0` and `gcd(p, q, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadElem {
    #[serde(with = "bigint_str")]
    pub p: BigInt,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    #[serde(with = "bigint_str")]
    pub den: BigInt,
    #[serde(skip_serializing)]
    pub omega: Omega,
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(v) {
            Ok(x) => s.serialize_i64(x),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            I(i64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::I(x) => Ok(BigInt::from(x)),
            Repr::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl QuadElem {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, den: impl Into<BigInt>, omega: Omega) -> Self {
        let (mut p, mut q, mut den) = (p.into(), q.into(), den.into());
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            p = -p;
            q = -q;
            den = -den;
        }
        let g = p.gcd(&q).gcd(&den);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            den /= &g;
        }
        QuadElem { p, q, den, omega }
    }

    pub fn from_int(n: impl Into<BigInt>, omega: Omega) -> Self {
        QuadElem::new(n, 0, 1, omega)
    }

    pub fn zero(omega: Omega) -> Self {
        QuadElem::from_int(0, omega)
    }

    pub fn one(omega: Omega) -> Self {
        QuadElem::from_int(1, omega)
    }

    /// `√d2` as an element.
    pub fn sqrt_d2(omega: Omega) -> Self {
        if omega.half {
            QuadElem::new(-1, 2, 1, omega)
        } else {
            QuadElem::new(0, 1, 1, omega)
        }
    }

    /// `(x + y√d2)/den`.
    pub fn from_sqrt_form(x: impl Into<BigInt>, y: impl Into<BigInt>, den: impl Into<BigInt>, omega: Omega) -> Self {
        let (x, y, den) = (x.into(), y.into(), den.into());
        if omega.half {
            QuadElem::new(x - &y, y * 2, den, omega)
        } else {
            QuadElem::new(x, y, den, omega)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.p.is_one() && self.q.is_zero() && self.den.is_one()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn conj(&self) -> Self {
        let t = BigInt::from(self.omega.t());
        QuadElem::new(&self.p + &self.q * t, -&self.q, self.den.clone(), self.omega)
    }

    /// Norm as a reduced fraction `(num, den)`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let (t, n) = (BigInt::from(self.omega.t()), BigInt::from(self.omega.n()));
        let num = &self.p * &self.p + t * &self.p * &self.q + n * &self.q * &self.q;
        let den = &self.den * &self.den;
        let g = num.gcd(&den);
        (num / &g, den / g)
    }

    /// Trace as a reduced fraction.
    pub fn trace(&self) -> (BigInt, BigInt) {
        let num: BigInt = &self.p * 2 + &self.q * self.omega.t();
        let g = num.gcd(&self.den);
        (num / &g, &self.den / g)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let (nn, nd) = self.norm();
        let c = self.conj();
        // 1/x = conj(x)/N(x)
        QuadElem::new(&c.p * &nd, &c.q * &nd, &c.den * nn, self.omega)
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = QuadElem::one(self.omega);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Exact sign in the real embedding ω ↦ ω > 0.
    pub fn signum(&self) -> i32 {
        // sign of P + Q√d2 with P, Q integers
        let (pp, qq) = if self.omega.half {
            (&self.p * 2 + &self.q, self.q.clone())
        } else {
            (self.p.clone(), self.q.clone())
        };
        sign_p_plus_q_sqrt(&pp, &qq, self.omega.d2)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn to_f64(&self) -> f64 {
        let w = self.omega.value();
        let (p, q, den) = (big_f64(&self.p), big_f64(&self.q), big_f64(&self.den));
        // Evaluate through whichever of x, conj(x) is less cancelling.
        if (p >= 0.0) == (q >= 0.0) {
            (p + q * w) / den
        } else {
            let (nn, nd) = self.norm();
            let c = (p + q * self.omega.conj_value()) / den;
            big_f64(&nn) / big_f64(&nd) / c
        }
    }

    pub fn conj_f64(&self) -> f64 {
        self.conj().to_f64()
    }

    /// Integral coordinates `(p, q)` as `i128`, when `den = 1`.
    pub fn int_coords(&self) -> Option<(i128, i128)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.p.to_i128()?, self.q.to_i128()?))
    }
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn sign_p_plus_q_sqrt(p: &BigInt, q: &BigInt, d: i64) -> i32 {
    let sp = p.signum();
    let sq = q.signum();
    let (sp, sq) = (sign_i(&sp), sign_i(&sq));
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q²·d
    let lhs = p * p;
    let rhs = q * q * d;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

fn sign_i(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self - other).signum().cmp(&0))
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Printed in the √d2 form, which is what people read.
        let (x, y, den) = if self.omega.half {
            let x: BigInt = &self.p * 2 + &self.q;
            let den = &self.den * 2;
            let g = x.gcd(&self.q).gcd(&den);
            (x / &g, &self.q / &g, den / g)
        } else {
            (self.p.clone(), self.q.clone(), self.den.clone())
        };
        let d = self.omega.d2;
        let body = match (x.is_zero(), y.is_zero()) {
            (_, true) => format!("{x}"),
            (true, false) => format!("{}√{d}", coef(&y)),
            (false, false) => {
                let sign = if y.is_negative() { '-' } else { '+' };
                format!("{x}{sign}{}√{d}", coef(&y.abs()))
            }
        };
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}

fn coef(y: &BigInt) -> String {
    if y.is_one() {
        String::new()
    } else if *y == BigInt::from(-1) {
        "-".into()
    } else {
        y.to_string()
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, o: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.omega, o.omega);
        QuadElem::new(&self.p * &o.den + &o.p * &self.den, &self.q * &o.den + &o.q * &self.den, &self.den * &o.den, self.omega)
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &QuadElem) -> QuadElem {
        self + &(-o)
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { p: -&self.p, q: -&self.q, den: self.den.clone(), omega: self.omega }
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, o: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.omega, o.omega);
        let (t, n) = (self.omega.t(), self.omega.n());
        let qq = &self.q * &o.q;
        let p = &self.p * &o.p - &qq * n;
        let q = &self.p * &o.q + &o.p * &self.q + qq * t;
        QuadElem::new(p, q, &self.den * &o.den, self.omega)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for QuadElem {
            type Output = QuadElem;
            fn $f(self, o: QuadElem) -> QuadElem {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn el(p: i64, q: i64, den: i64, d2: i64) -> QuadElem {
        QuadElem::new(p, q, den, Omega::new(d2))
    }

    #[test]
    fn canonical_form() {
        let x = el(4, 6, -8, 2);
        assert_eq!((x.p.clone(), x.q.clone(), x.den.clone()), (BigInt::from(-2), BigInt::from(-3), BigInt::from(4)));
    }

    #[test]
    fn half_basis_norm() {
        // ω = (1+√5)/2 has norm -1, trace 1
        let w = el(0, 1, 1, 5);
        assert_eq!(w.norm(), (BigInt::from(-1), BigInt::from(1)));
        assert_eq!(w.trace(), (BigInt::from(1), BigInt::from(1)));
        assert!((w.to_f64() - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_sign() {
        let x = el(3, 1, 1, 2); // 3+√2
        assert!((&x * &x.inv()).is_one());
        assert_eq!(el(1, -1, 1, 2).signum(), -1); // 1-√2
        assert_eq!(el(-1, 1, 1, 2).signum(), 1);
        assert_eq!(el(0, 0, 1, 2).signum(), 0);
    }

    #[test]
    fn small_conjugate_is_accurate() {
        // (1+√2)^-20 is tiny; the evaluation must not cancel to garbage
        let e = el(1, 1, 1, 2).pow(-20);
        let exact = (1.0f64 + 2f64.sqrt()).powi(-20);
        assert!((e.to_f64() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn display_uses_sqrt_form() {
        assert_eq!(el(0, 1, 1, 5).to_string(), "(1+√5)/2");
        assert_eq!(el(3, -1, 1, 2).to_string(), "3-√2");
        assert_eq!(el(2, 1, 4, 2).to_string(), "(2+√2)/4");
    }
}
