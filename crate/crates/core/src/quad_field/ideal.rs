//! Integral ideals in Hermite normal form `[A, B + C·ω]`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::elem::Omega;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealHNF {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// Extended gcd: returns (g, u, v) with u·x + v·y = g ≥ 0.
fn xgcd(x: i128, y: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (x, y);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl IdealHNF {
    pub fn unit() -> Self {
        IdealHNF { a: 1, b: 0, c: 1 }
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1 && self.c == 1
    }

    /// HNF of the Z-lattice spanned by `gens` (coordinates in (1, ω)); the lattice must have rank 2.
    pub fn from_generators(gens: &[(i128, i128)]) -> Result<Self> {
        // Row basis kept as (a, 0), (b, c).
        let (mut a, mut b, mut c) = (0i128, 0i128, 0i128);
        for &(x, y) in gens {
            let (x, y) = if c == 0 && y < 0 { (-x, -y) } else { (x, y) };
            if y == 0 {
                a = a.gcd(&x);
            } else if c == 0 {
                b = x;
                c = y;
            } else {
                let (g, u, v) = xgcd(c, y);
                let nb = u.checked_mul(b).and_then(|t| v.checked_mul(x).and_then(|s| t.checked_add(s)));
                let rest = (y / g).checked_mul(b).and_then(|t| (c / g).checked_mul(x).and_then(|s| t.checked_sub(s)));
                let (nb, rest) = match (nb, rest) {
                    (Some(nb), Some(r)) => (nb, r),
                    _ => return Err(Error::Overflow("ideal HNF")),
                };
                b = nb;
                c = g;
                a = a.gcd(&rest);
            }
            if a != 0 {
                b = b.rem_euclid(a);
            }
        }
        if a == 0 || c == 0 {
            return Err(Error::Internal("lattice does not have rank 2".into()));
        }
        Ok(IdealHNF { a, b: b.rem_euclid(a), c })
    }

    /// Principal ideal `(x + yω)` for an integral element.
    pub fn principal(x: i128, y: i128, omega: Omega) -> Result<Self> {
        if x == 0 && y == 0 {
            return Err(Error::InvalidParam("principal ideal of zero".into()));
        }
        let (u, v) = omega.mul_coords(x, y, 0, 1);
        IdealHNF::from_generators(&[(x, y), (u, v)])
    }

    pub fn from_int(n: i128) -> Self {
        let n = n.abs();
        IdealHNF { a: n, b: 0, c: n }
    }

    pub fn contains(&self, x: i128, y: i128) -> bool {
        y % self.c == 0 && (x - (y / self.c) * self.b) % self.a == 0
    }

    /// Closed under multiplication by ω.
    pub fn is_ideal(&self, omega: Omega) -> bool {
        let (x1, y1) = omega.mul_coords(self.a, 0, 0, 1);
        let (x2, y2) = omega.mul_coords(self.b, self.c, 0, 1);
        self.a > 0 && self.c > 0 && self.a % self.c == 0 && self.b % self.c == 0 && self.contains(x1, y1) && self.contains(x2, y2)
    }

    pub fn mul(&self, o: &IdealHNF, omega: Omega) -> Result<Self> {
        let m = |x: i128, y: i128, u: i128, v: i128| -> Result<(i128, i128)> {
            check_small(&[x, y, u, v])?;
            Ok(omega.mul_coords(x, y, u, v))
        };
        let g = [
            m(self.a, 0, o.a, 0)?,
            m(self.a, 0, o.b, o.c)?,
            m(self.b, self.c, o.a, 0)?,
            m(self.b, self.c, o.b, o.c)?,
        ];
        IdealHNF::from_generators(&g)
    }

    /// `(x + yω)·I`.
    pub fn mul_elem(&self, x: i128, y: i128, omega: Omega) -> Result<Self> {
        check_small(&[x, y, self.a, self.b, self.c])?;
        let g = [omega.mul_coords(x, y, self.a, 0), omega.mul_coords(x, y, self.b, self.c)];
        IdealHNF::from_generators(&g)
    }

    pub fn pow(&self, e: u32, omega: Omega) -> Result<Self> {
        let mut acc = IdealHNF::unit();
        for _ in 0..e {
            acc = acc.mul(self, omega)?;
        }
        Ok(acc)
    }

    pub fn conj(&self, omega: Omega) -> Result<Self> {
        let t = omega.t() as i128;
        IdealHNF::from_generators(&[(self.a, 0), (self.b + self.c * t, -self.c)])
    }

    /// `I / k` for a rational integer k dividing every element of I.
    pub fn div_int(&self, k: i128) -> Result<Self> {
        let k = k.abs();
        if self.a % k != 0 || self.b % k != 0 || self.c % k != 0 {
            return Err(Error::Internal(format!("{k} does not divide {self:?}")));
        }
        Ok(IdealHNF { a: self.a / k, b: self.b / k, c: self.c / k })
    }

    /// Largest rational integer dividing the ideal.
    pub fn content(&self) -> i128 {
        self.c
    }
}

fn check_small(v: &[i128]) -> Result<()> {
    const LIM: i128 = 1 << 40;
    if v.iter().all(|x| x.abs() < LIM) {
        Ok(())
    } else {
        Err(Error::Overflow("ideal product"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt2() {
        let w = Omega::new(2);
        let p = IdealHNF::principal(3, 1, w).unwrap();
        assert_eq!(p, IdealHNF { a: 7, b: 3, c: 1 });
        assert!(p.is_ideal(w));
        let q = IdealHNF::principal(3, -1, w).unwrap();
        assert_eq!(q, IdealHNF { a: 7, b: 4, c: 1 });
        assert_eq!(p.mul(&q, w).unwrap(), IdealHNF::from_int(7));
    }

    #[test]
    fn conj_and_norm() {
        let w = Omega::new(5);
        let i = IdealHNF::principal(4, 1, w).unwrap(); // 4+ω, norm 16+4-1 = 19
        assert_eq!(i.norm(), 19);
        let j = i.conj(w).unwrap();
        assert_eq!(i.mul(&j, w).unwrap(), IdealHNF::from_int(19));
    }

    #[test]
    fn rejects_rank_one() {
        assert!(IdealHNF::from_generators(&[(2, 0), (4, 0)]).is_err());
    }
}
