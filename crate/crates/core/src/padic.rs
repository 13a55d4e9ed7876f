//! Precision-tracked p-adic integers, Teichmüller representatives and the
//! constants w_1..w_p of the order-p classification.
//!
//! The base ring of the classification is Λ = Z[χ(F_p), 1/(p(p-1))] ∩ Z_p,
//! which has no finite presentation usable for exact rewriting. We realize it
//! through its p-adic completion at a chosen working precision; every
//! identity involving the w_i is checked on residues mod p^N, and values are
//! recognized back to small integers when a balanced representative fits
//! under p^(N/2).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A p-adic integer known modulo p^precision.
///
/// Arithmetic tracks precision pessimistically: a result carries the minimum
/// of the operand precisions (division by p^k additionally lowers it by k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicInt {
    prime: u32,
    precision: u32,
    residue: BigInt,
}

fn pow_bigint(base: u32, exp: u32) -> BigInt {
    BigInt::from(base).pow(exp)
}

impl PAdicInt {
    pub fn new(prime: u32, precision: u32, residue: BigInt) -> PAdicInt {
        assert!(precision >= 1, "precision must be at least one digit");
        let modulus = pow_bigint(prime, precision);
        let mut residue = residue % &modulus;
        if residue.is_negative() {
            residue += &modulus;
        }
        PAdicInt {
            prime,
            precision,
            residue,
        }
    }

    pub fn zero(prime: u32, precision: u32) -> PAdicInt {
        PAdicInt::new(prime, precision, BigInt::zero())
    }

    pub fn one(prime: u32, precision: u32) -> PAdicInt {
        PAdicInt::new(prime, precision, BigInt::one())
    }

    pub fn from_bigint(prime: u32, precision: u32, n: &BigInt) -> PAdicInt {
        PAdicInt::new(prime, precision, n.clone())
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        pow_bigint(self.prime, self.precision)
    }

    /// True when the value is indistinguishable from zero at this precision.
    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// p-adic valuation, None when the value is zero at this precision.
    /// A reported valuation is always < precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.residue.is_zero() {
            return None;
        }
        let p = BigInt::from(self.prime);
        let mut v = 0u32;
        let mut r = self.residue.clone();
        while (&r % &p).is_zero() {
            r /= &p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn check_same_prime(&self, other: &PAdicInt) {
        assert_eq!(self.prime, other.prime, "mixed p-adic primes");
    }

    pub fn add(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same_prime(other);
        let prec = self.precision.min(other.precision);
        PAdicInt::new(self.prime, prec, &self.residue + &other.residue)
    }

    pub fn sub(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same_prime(other);
        let prec = self.precision.min(other.precision);
        PAdicInt::new(self.prime, prec, &self.residue - &other.residue)
    }

    pub fn mul(&self, other: &PAdicInt) -> PAdicInt {
        self.check_same_prime(other);
        let prec = self.precision.min(other.precision);
        PAdicInt::new(self.prime, prec, &self.residue * &other.residue)
    }

    pub fn neg(&self) -> PAdicInt {
        PAdicInt::new(self.prime, self.precision, -&self.residue)
    }

    pub fn pow(&self, mut exp: u64) -> PAdicInt {
        let mut base = self.clone();
        let mut acc = PAdicInt::one(self.prime, self.precision);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<PAdicInt> {
        if !self.is_unit() {
            return Err(Error::Undecidable(format!(
                "p-adic inverse of non-unit (valuation {:?})",
                self.valuation()
            )));
        }
        let m = self.modulus();
        let inv = mod_inverse(&self.residue, &m).expect("unit residue is invertible");
        Ok(PAdicInt::new(self.prime, self.precision, inv))
    }

    /// Exact division by p^k; the result loses k digits of precision.
    pub fn div_by_prime_pow(&self, k: u32) -> Result<PAdicInt> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.precision <= k {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide by p^{k} at precision {}",
                self.precision
            )));
        }
        let pk = pow_bigint(self.prime, k);
        if !(&self.residue % &pk).is_zero() {
            return Err(Error::Undecidable(format!(
                "residue not divisible by p^{k}"
            )));
        }
        Ok(PAdicInt::new(
            self.prime,
            self.precision - k,
            &self.residue / &pk,
        ))
    }

    /// Truncate to a lower precision.
    pub fn truncate(&self, precision: u32) -> PAdicInt {
        assert!(precision <= self.precision);
        PAdicInt::new(self.prime, precision, self.residue.clone())
    }

    /// Equality of residues at the joint precision.
    pub fn eq_at_joint_precision(&self, other: &PAdicInt) -> bool {
        self.check_same_prime(other);
        let prec = self.precision.min(other.precision);
        let m = pow_bigint(self.prime, prec);
        (&self.residue - &other.residue).mod_floor(&m).is_zero()
    }

    /// Balanced representative in (-p^N/2, p^N/2].
    pub fn balanced_residue(&self) -> BigInt {
        let m = self.modulus();
        if &self.residue * 2 > m.clone() {
            &self.residue - &m
        } else {
            self.residue.clone()
        }
    }

    /// Recognize the value as a small exact integer: accepted when the
    /// balanced representative is bounded by p^(precision/2).
    pub fn recognize_integer(&self) -> Option<BigInt> {
        let bound = pow_bigint(self.prime, self.precision / 2);
        let b = self.balanced_residue();
        if b.abs() <= bound {
            Some(b)
        } else {
            None
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

/// Teichmüller representative χ(m): the unique (p-1)-st root of unity in Z_p
/// congruent to m mod p, with χ(0) = 0. Computed by iterating x -> x^p,
/// which stabilizes within precision steps.
pub fn teichmuller(p: u32, m: u32, precision: u32) -> PAdicInt {
    assert!(m < p, "residue class out of range");
    assert!(precision >= 1);
    if m == 0 {
        return PAdicInt::zero(p, precision);
    }
    let mut x = PAdicInt::new(p, precision, BigInt::from(m));
    for _ in 0..=precision + 1 {
        let next = x.pow(p as u64);
        if next == x {
            return x;
        }
        x = next;
    }
    unreachable!("Teichmüller iteration failed to stabilize");
}

/// Dense element of Λ[z]/(z^p - 1) at fixed precision: coefficient i is the
/// z^i coordinate. Multiplication is cyclic convolution of length p.
#[derive(Debug, Clone)]
struct CyclicPoly {
    p: u32,
    coeffs: Vec<PAdicInt>,
}

impl CyclicPoly {
    fn zero(p: u32, prec: u32) -> CyclicPoly {
        CyclicPoly {
            p,
            coeffs: vec![PAdicInt::zero(p, prec); p as usize],
        }
    }

    fn mul(&self, other: &CyclicPoly) -> CyclicPoly {
        let p = self.p as usize;
        let prec = self.coeffs[0].precision().min(other.coeffs[0].precision());
        let mut out = CyclicPoly::zero(self.p, prec);
        for i in 0..p {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..p {
                let k = (i + j) % p;
                let term = self.coeffs[i].mul(&other.coeffs[j]);
                out.coeffs[k] = out.coeffs[k].add(&term);
            }
        }
        out
    }

    fn scale(&self, c: &PAdicInt) -> CyclicPoly {
        CyclicPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    fn sub(&self, other: &CyclicPoly) -> CyclicPoly {
        CyclicPoly {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The element y_i = Σ_{m in F_p^×} χ(m)^{-i} (1 - z^m).
fn eigen_element(p: u32, i: u32, prec: u32) -> CyclicPoly {
    let mut out = CyclicPoly::zero(p, prec);
    for m in 1..p {
        // χ(m)^{-i} = χ(m^{-i} mod p) by multiplicativity.
        let m_inv = mod_pow_u32(m, (p - 1 - (i % (p - 1))) % (p - 1) + (p - 1), p);
        let chi = teichmuller(p, m_inv % p, prec);
        out.coeffs[0] = out.coeffs[0].add(&chi);
        out.coeffs[m as usize] = out.coeffs[m as usize].sub(&chi);
    }
    out
}

fn mod_pow_u32(base: u32, mut exp: u32, modulus: u32) -> u32 {
    let mut b = (base % modulus) as u64;
    let m = modulus as u64;
    let mut acc = 1u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u32
}

/// One derived constant: its p-adic value plus the recognized exact integer
/// when the balanced representative is small enough.
#[derive(Debug, Clone)]
pub struct WValue {
    pub padic: PAdicInt,
    pub exact: Option<BigInt>,
}

/// The constants w_1, ..., w_p at working precision, satisfying
/// y^i = w_i y_i for 1 <= i <= p-1 and y^p = w_p y in Λ[z]/(z^p - 1).
#[derive(Debug, Clone)]
pub struct WConstants {
    prime: u32,
    precision: u32,
    values: Vec<WValue>,
}

impl WConstants {
    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// w_i for 1 <= i <= p.
    pub fn w(&self, i: u32) -> &WValue {
        assert!(1 <= i && i <= self.prime, "w index out of range");
        &self.values[(i - 1) as usize]
    }

    pub fn values(&self) -> &[WValue] {
        &self.values
    }

    /// w_p = p * (unit); the unit cofactor w_p / p.
    pub fn w_top_unit_part(&self) -> Result<PAdicInt> {
        self.w(self.prime).padic.div_by_prime_pow(1)
    }
}

/// Derive w_1..w_p from the defining identities in Λ[z]/(z^p - 1), with
/// y = y_1 the distinguished generator of the χ-eigensheaf.
///
/// Division of y^i by y_i is performed coefficientwise: w_i is read off the
/// z^1 coordinate (whose y_i coefficient is the unit -1) and the whole
/// vector identity y^i = w_i y_i is then verified; a mismatch is an error,
/// never a rounding. Retries once with doubled precision on failure.
pub fn derive_w_constants(p: u32, precision: u32) -> Result<WConstants> {
    assert!(p >= 2 && precision >= 2);
    match derive_w_attempt(p, precision) {
        Ok(w) => Ok(w),
        Err(_) => derive_w_attempt(p, precision * 2),
    }
}

fn derive_w_attempt(p: u32, prec: u32) -> Result<WConstants> {
    let y = eigen_element(p, 1, prec);
    let mut values = Vec::with_capacity(p as usize);
    let mut y_pow = y.clone();
    for i in 1..p {
        let y_i = eigen_element(p, i, prec);
        // z^1 coefficient of y_i is -χ(1)^{-i} = -1.
        let w_i = y_pow.coeffs[1].neg();
        if !y_pow.sub(&y_i.scale(&w_i)).is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "y^{i} is not proportional to y_{i} at precision {prec}"
            )));
        }
        values.push(WValue {
            exact: w_i.recognize_integer(),
            padic: w_i,
        });
        y_pow = y_pow.mul(&y);
    }
    // y_pow is now y^p; the relation y^p = w_p y has the unit z^1 coordinate.
    let w_p = y_pow.coeffs[1].neg();
    if !y_pow.sub(&y.scale(&w_p)).is_zero() {
        return Err(Error::PrecisionExhausted(format!(
            "y^p is not proportional to y at precision {prec}"
        )));
    }
    values.push(WValue {
        exact: w_p.recognize_integer(),
        padic: w_p,
    });

    let w = WConstants {
        prime: p,
        precision: prec,
        values,
    };
    check_w_invariants(&w)?;
    Ok(w)
}

fn check_w_invariants(w: &WConstants) -> Result<()> {
    let p = w.prime;
    if w.w(1).exact.as_deref() != Some(&BigInt::one()) {
        return Err(Error::invariant("w_1 != 1"));
    }
    let p_scalar = PAdicInt::new(p, w.precision, BigInt::from(p));
    let expected_top = w.w(p - 1).padic.mul(&p_scalar);
    if !w.w(p).padic.eq_at_joint_precision(&expected_top) {
        return Err(Error::invariant("w_p != p * w_{p-1}"));
    }
    let unit_part = w.w_top_unit_part()?;
    if !unit_part.is_unit() {
        return Err(Error::invariant("w_p / p is not a unit"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_small_cases() {
        assert_eq!(teichmuller(2, 1, 10).residue(), &BigInt::one());
        // -1 is the square root of 1 congruent to 2 mod 3.
        let t = teichmuller(3, 2, 10);
        assert_eq!(t.balanced_residue(), BigInt::from(-1));
        // 2^5 = 32 = 7 mod 25, stable under x -> x^5.
        let t = teichmuller(5, 2, 2);
        assert_eq!(t.residue(), &BigInt::from(7));
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        for p in [2u32, 3, 5, 7] {
            let prec = 12;
            for m in 0..p {
                for m2 in 0..p {
                    let lhs = teichmuller(p, m, prec).mul(&teichmuller(p, m2, prec));
                    let rhs = teichmuller(p, m * m2 % p, prec);
                    assert!(lhs.eq_at_joint_precision(&rhs), "p={p} m={m} m'={m2}");
                }
            }
        }
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        for p in [3u32, 5, 7, 11] {
            for m in 1..p {
                let t = teichmuller(p, m, 20);
                let one = PAdicInt::one(p, 20);
                assert!(t.pow((p - 1) as u64).eq_at_joint_precision(&one));
                assert_eq!(
                    (t.residue() % BigInt::from(p)),
                    BigInt::from(m),
                    "χ(m) = m mod p"
                );
            }
        }
    }

    #[test]
    fn w_constants_p2_p3() {
        let w2 = derive_w_constants(2, 20).unwrap();
        assert_eq!(w2.w(1).exact.as_deref(), Some(&BigInt::from(1)));
        assert_eq!(w2.w(2).exact.as_deref(), Some(&BigInt::from(2)));

        let w3 = derive_w_constants(3, 20).unwrap();
        assert_eq!(w3.w(1).exact.as_deref(), Some(&BigInt::from(1)));
        assert_eq!(w3.w(2).exact.as_deref(), Some(&BigInt::from(-1)));
        assert_eq!(w3.w(3).exact.as_deref(), Some(&BigInt::from(-3)));
    }

    #[test]
    fn w_constants_constraints_p5_p7() {
        for p in [5u32, 7] {
            let w = derive_w_constants(p, 24).unwrap();
            assert!(w.w_top_unit_part().unwrap().is_unit());
            for i in 2..p {
                assert!(w.w(i).padic.is_unit(), "w_{i} must be a unit for p={p}");
            }
        }
    }

    #[test]
    fn w_constants_precision_stable() {
        for p in [2u32, 3, 5, 7] {
            let lo = derive_w_constants(p, 20).unwrap();
            let hi = derive_w_constants(p, 40).unwrap();
            for i in 1..=p {
                assert!(
                    lo.w(i).padic.eq_at_joint_precision(&hi.w(i).padic),
                    "w_{i} differs between precisions for p={p}"
                );
            }
        }
    }

    #[test]
    fn padic_precision_tracking() {
        let a = PAdicInt::new(5, 10, BigInt::from(7));
        let b = PAdicInt::new(5, 6, BigInt::from(3));
        assert_eq!(a.mul(&b).precision(), 6);
        assert_eq!(a.add(&b).precision(), 6);
        let ten = PAdicInt::new(5, 10, BigInt::from(50));
        assert_eq!(ten.valuation(), Some(2));
        let q = ten.div_by_prime_pow(2).unwrap();
        assert_eq!(q.precision(), 8);
        assert_eq!(q.residue(), &BigInt::from(2));
    }

    #[test]
    fn padic_inverse() {
        let a = PAdicInt::new(5, 8, BigInt::from(7));
        let inv = a.inverse().unwrap();
        let one = PAdicInt::one(5, 8);
        assert!(a.mul(&inv).eq_at_joint_precision(&one));
        let nz = PAdicInt::new(5, 8, BigInt::from(10));
        assert!(nz.inverse().is_err());
    }
}
