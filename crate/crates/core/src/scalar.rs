//! Coefficient domains: exact rationals (backing the integer and rational
//! rings), residue rings Z/n, and precision-tracked p-adic integers.
//!
//! Rational coefficients are deliberately tolerated on elements of the
//! integer ring during intermediate computation (several classification
//! formulas divide by units before the result becomes integral again);
//! integrality is asserted by callers where required.

use crate::error::{Error, Result};
use crate::padic::PAdicInt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarDomain {
    Integers,
    Rationals,
    /// Residues mod n, canonical representatives in [0, n).
    Mod(BigInt),
    Padic {
        prime: u32,
        precision: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Mod(BigInt),
    Padic(PAdicInt),
}

impl ScalarDomain {
    pub fn zero(&self) -> Scalar {
        match self {
            ScalarDomain::Integers | ScalarDomain::Rationals => Scalar::Rat(BigRational::zero()),
            ScalarDomain::Mod(_) => Scalar::Mod(BigInt::zero()),
            ScalarDomain::Padic { prime, precision } => {
                Scalar::Padic(PAdicInt::zero(*prime, *precision))
            }
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_bigint(&BigInt::one())
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            ScalarDomain::Integers | ScalarDomain::Rationals => {
                Scalar::Rat(BigRational::from_integer(n.clone()))
            }
            ScalarDomain::Mod(m) => Scalar::Mod(n.mod_floor(m)),
            ScalarDomain::Padic { prime, precision } => {
                Scalar::Padic(PAdicInt::from_bigint(*prime, *precision, n))
            }
        }
    }

    /// Embed an exact rational; fails when the denominator is not
    /// invertible in the domain.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self {
            ScalarDomain::Integers | ScalarDomain::Rationals => Ok(Scalar::Rat(q.clone())),
            ScalarDomain::Mod(m) => {
                let den = q.denom().mod_floor(m);
                let inv = mod_inverse(&den, m).ok_or_else(|| {
                    Error::type_err(format!("denominator {} not invertible mod {}", q.denom(), m))
                })?;
                Ok(Scalar::Mod((q.numer() * inv).mod_floor(m)))
            }
            ScalarDomain::Padic { prime, precision } => {
                let den = PAdicInt::from_bigint(*prime, *precision, q.denom());
                let inv = den.inverse().map_err(|_| {
                    Error::type_err(format!(
                        "denominator {} not invertible in Z_{}",
                        q.denom(),
                        prime
                    ))
                })?;
                let num = PAdicInt::from_bigint(*prime, *precision, q.numer());
                Ok(Scalar::Padic(num.mul(&inv)))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y).mod_floor(self.modulus())),
            (Scalar::Padic(x), Scalar::Padic(y)) => Scalar::Padic(x.add(y)),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x * y).mod_floor(self.modulus())),
            (Scalar::Padic(x), Scalar::Padic(y)) => Scalar::Padic(x.mul(y)),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Rat(x) => Scalar::Rat(-x),
            Scalar::Mod(x) => Scalar::Mod((-x).mod_floor(self.modulus())),
            Scalar::Padic(x) => Scalar::Padic(x.neg()),
        }
    }

    pub fn pow(&self, a: &Scalar, mut exp: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Mod(x) => x.is_zero(),
            Scalar::Padic(x) => x.is_zero(),
        }
    }

    pub fn eq(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Padic(x), Scalar::Padic(y)) => x.eq_at_joint_precision(y),
            _ => self.is_zero(&self.sub(a, b)),
        }
    }

    /// Exact multiplicative inverse, None when the scalar is not a unit in
    /// the domain. Integer-domain units are ±1 only.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (ScalarDomain::Integers, Scalar::Rat(x)) => {
                if x.is_integer() && (x.is_one() || (-x).is_one()) {
                    Some(Scalar::Rat(x.clone()))
                } else {
                    None
                }
            }
            (ScalarDomain::Rationals, Scalar::Rat(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(x.recip()))
                }
            }
            (ScalarDomain::Mod(m), Scalar::Mod(x)) => mod_inverse(x, m).map(Scalar::Mod),
            (ScalarDomain::Padic { .. }, Scalar::Padic(x)) => x.inverse().ok().map(Scalar::Padic),
            _ => panic!("scalar does not belong to domain"),
        }
    }

    /// Division by a nonzero integer, required to be exact coefficientwise
    /// (this backs the `/` form of the input language).
    pub fn exact_div_int(&self, a: &Scalar, n: &BigInt) -> Result<Scalar> {
        if n.is_zero() {
            return Err(Error::type_err("division by zero"));
        }
        match a {
            Scalar::Rat(x) => {
                let q = x / BigRational::from_integer(n.clone());
                if matches!(self, ScalarDomain::Integers) && !q.is_integer() && x.is_integer() {
                    return Err(Error::type_err(format!("{x} is not divisible by {n}")));
                }
                Ok(Scalar::Rat(q))
            }
            Scalar::Mod(x) => {
                let m = self.modulus();
                if let Some(inv) = mod_inverse(&n.mod_floor(m), m) {
                    return Ok(Scalar::Mod((x * inv).mod_floor(m)));
                }
                // Non-invertible divisor: accept only exact integer division
                // of the canonical representative.
                if (x % n).is_zero() {
                    Ok(Scalar::Mod((x / n).mod_floor(m)))
                } else {
                    Err(Error::type_err(format!("{x} is not divisible by {n} mod {m}")))
                }
            }
            Scalar::Padic(x) => {
                let p = BigInt::from(x.prime());
                let mut k = 0u32;
                let mut rest = n.clone();
                while (&rest % &p).is_zero() {
                    rest /= &p;
                    k += 1;
                }
                let unit = PAdicInt::from_bigint(x.prime(), x.precision(), &rest)
                    .inverse()
                    .map_err(|_| Error::type_err("divisor is zero p-adically"))?;
                let reduced = x.div_by_prime_pow(k)?;
                Ok(Scalar::Padic(reduced.mul(&unit)))
            }
        }
    }

    fn modulus(&self) -> &BigInt {
        match self {
            ScalarDomain::Mod(m) => m,
            _ => panic!("modulus only defined for residue domains"),
        }
    }

    /// Convert a scalar from another domain into this one. Supported maps:
    /// identity, rational -> residue/p-adic embedding, reduction
    /// Z/m -> Z/n for n | m, and p-adic -> Z/p^k truncation.
    pub fn convert(&self, from: &ScalarDomain, value: &Scalar) -> Result<Scalar> {
        if from == self {
            if let (
                ScalarDomain::Padic { .. },
                Scalar::Padic(_),
            ) = (self, value)
            {
                return Ok(value.clone());
            }
            return Ok(value.clone());
        }
        match (from, value, self) {
            (ScalarDomain::Integers | ScalarDomain::Rationals, Scalar::Rat(q), _) => {
                self.from_rational(q)
            }
            (ScalarDomain::Mod(m), Scalar::Mod(x), ScalarDomain::Mod(n)) => {
                if m.mod_floor(n).is_zero() {
                    Ok(Scalar::Mod(x.mod_floor(n)))
                } else {
                    Err(Error::type_err(format!("no canonical map Z/{m} -> Z/{n}")))
                }
            }
            (
                ScalarDomain::Padic { prime, .. },
                Scalar::Padic(x),
                ScalarDomain::Mod(n),
            ) => {
                let mut k = 0u32;
                let mut m = n.clone();
                let p = BigInt::from(*prime);
                while m > BigInt::one() && (&m % &p).is_zero() {
                    m /= &p;
                    k += 1;
                }
                if !m.is_one() || k > x.precision() {
                    return Err(Error::type_err(format!(
                        "no canonical map Z_{prime} -> Z/{n}"
                    )));
                }
                Ok(Scalar::Mod(x.residue().mod_floor(n)))
            }
            (
                ScalarDomain::Padic { prime: p1, .. },
                Scalar::Padic(x),
                ScalarDomain::Padic { prime: p2, precision },
            ) => {
                if p1 != p2 {
                    return Err(Error::type_err("mixed p-adic primes"));
                }
                Ok(Scalar::Padic(x.truncate((*precision).min(x.precision()))))
            }
            _ => Err(Error::type_err(format!(
                "unsupported scalar conversion {from:?} -> {self:?}"
            ))),
        }
    }

    /// True when the scalar is integral in the domain (denominator-free for
    /// the rational-backed domains; always true otherwise).
    pub fn is_integral(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_integer(),
            _ => true,
        }
    }
}

impl Scalar {
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_padic(&self) -> Option<&PAdicInt> {
        match self {
            Scalar::Padic(x) => Some(x),
            _ => None,
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_arithmetic() {
        let d = ScalarDomain::Mod(BigInt::from(25));
        let seven = d.from_i64(7);
        let inv = d.inv(&seven).unwrap();
        assert_eq!(inv, Scalar::Mod(BigInt::from(18)));
        assert!(d.eq(&d.mul(&seven, &inv), &d.one()));
    }

    #[test]
    fn rational_embedding_into_residues() {
        let d = ScalarDomain::Mod(BigInt::from(9));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let s = d.from_rational(&half).unwrap();
        assert_eq!(s, Scalar::Mod(BigInt::from(5))); // 2*5 = 10 = 1 mod 9
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!(d.from_rational(&third).is_err());
    }

    #[test]
    fn integer_units() {
        let d = ScalarDomain::Integers;
        assert!(d.inv(&d.from_i64(1)).is_some());
        assert!(d.inv(&d.from_i64(-1)).is_some());
        assert!(d.inv(&d.from_i64(2)).is_none());
    }
}
