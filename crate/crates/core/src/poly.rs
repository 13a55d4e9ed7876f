//! Sparse multivariate polynomials over an exact scalar domain.
//!
//! Monomials are dense exponent vectors aligned to a ring's variable table
//! and ordered by tower lexicographic order: the variable introduced last
//! (innermost in the ring tower) is most significant. Every rewrite rule of
//! a valid presentation strictly decreases this order, which is what makes
//! normalization terminate.

use crate::scalar::{Scalar, ScalarDomain};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.0[idx]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .zip(&self.0)
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Pad with zero exponents for newly appended variables.
    pub fn pad_to(&self, nvars: usize) -> Monomial {
        let mut e = self.0.clone();
        e.resize(nvars, 0);
        Monomial(e)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len(), "monomials from different rings");
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Polynomial as monomial -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawPoly {
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl RawPoly {
    pub fn zero() -> RawPoly {
        RawPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(domain: &ScalarDomain, m: Monomial, c: Scalar) -> RawPoly {
        let mut p = RawPoly::zero();
        p.add_term(domain, m, c);
        p
    }

    pub fn constant(domain: &ScalarDomain, c: Scalar, nvars: usize) -> RawPoly {
        RawPoly::from_term(domain, Monomial::one(nvars), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, domain: &ScalarDomain, m: Monomial, c: Scalar) {
        if domain.is_zero(&c) {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = domain.add(&old, &c);
                if !domain.is_zero(&s) {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, domain: &ScalarDomain, other: &RawPoly) -> RawPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(domain, m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, domain: &ScalarDomain) -> RawPoly {
        RawPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), domain.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, domain: &ScalarDomain, other: &RawPoly) -> RawPoly {
        self.add(domain, &other.neg(domain))
    }

    pub fn mul(&self, domain: &ScalarDomain, other: &RawPoly) -> RawPoly {
        let mut out = RawPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(domain, m1.mul(m2), domain.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, domain: &ScalarDomain, c: &Scalar) -> RawPoly {
        if domain.is_zero(c) {
            return RawPoly::zero();
        }
        let mut out = RawPoly::zero();
        for (m, a) in &self.terms {
            out.add_term(domain, m.clone(), domain.mul(a, c));
        }
        out
    }

    pub fn mul_monomial(&self, domain: &ScalarDomain, m: &Monomial, c: &Scalar) -> RawPoly {
        let mut out = RawPoly::zero();
        for (m1, c1) in &self.terms {
            out.add_term(domain, m1.mul(m), domain.mul(c1, c));
        }
        out
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant coefficient (zero scalar if absent).
    pub fn constant_coeff(&self, domain: &ScalarDomain, nvars: usize) -> Scalar {
        self.terms
            .get(&Monomial::one(nvars))
            .cloned()
            .unwrap_or_else(|| domain.zero())
    }

    /// Largest exponent of a variable occurring in the polynomial.
    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0)
    }

    /// Pad all monomials for a ring extension.
    pub fn pad_to(&self, nvars: usize) -> RawPoly {
        RawPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.pad_to(nvars), c.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_lex_order_prefers_inner_variables() {
        // vars (E, F, x): x is innermost and most significant.
        let x3 = Monomial(vec![0, 0, 3]);
        let lam_mu_x2 = Monomial(vec![1, 1, 2]);
        assert!(x3 > lam_mu_x2);
        let e2f = Monomial(vec![2, 1, 0]);
        let one = Monomial::one(3);
        assert!(e2f > one);
        assert!(lcm_check(&x3, &e2f));
    }

    fn lcm_check(a: &Monomial, b: &Monomial) -> bool {
        let l = a.lcm(b);
        a.divides(&l) && b.divides(&l)
    }
}
