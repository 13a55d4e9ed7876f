//! Presented commutative rings with confluent monomial rewriting.
//!
//! A ring is a scalar base (integers, rationals, Z/n or p-adics) together
//! with a tower of polynomial variables and a rewrite system. Quotients are
//! taken by monic relations (x^d = lower-degree polynomial) or monomial
//! rewrites (monomial -> polynomial); every relation must strictly decrease
//! the tower-lex monomial order and all critical pairs must resolve, both
//! checked at construction. Normal forms are then unique and every value is
//! stored fully reduced.
//!
//! All values are immutable after construction; rings are shared behind an
//! `Arc` and operations are pure.

use crate::error::{Error, Result};
use crate::padic::teichmuller;
use crate::poly::{Monomial, RawPoly};
use crate::scalar::{Scalar, ScalarDomain};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Scalar base of a presented ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseKind {
    Integers,
    Rationals,
    IntegersMod(BigInt),
    Padic { prime: u32, precision: u32 },
}

impl BaseKind {
    pub fn domain(&self) -> ScalarDomain {
        match self {
            BaseKind::Integers => ScalarDomain::Integers,
            BaseKind::Rationals => ScalarDomain::Rationals,
            BaseKind::IntegersMod(n) => ScalarDomain::Mod(n.clone()),
            BaseKind::Padic { prime, precision } => ScalarDomain::Padic {
                prime: *prime,
                precision: *precision,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Monomial,
    pub rhs: RawPoly,
}

#[derive(Debug)]
pub struct RingData {
    base: BaseKind,
    domain: ScalarDomain,
    vars: Vec<String>,
    rules: Vec<RewriteRule>,
    /// var index -> (degree, rule index) for monic relations.
    monic: BTreeMap<usize, (u32, usize)>,
}

#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({:?}, vars {:?})", self.0.base, self.0.vars)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.base == other.0.base
                && self.0.vars == other.0.vars
                && self.0.rules == other.0.rules)
    }
}
impl Eq for Ring {}

/// A quotient relation as supplied by callers.
#[derive(Debug, Clone)]
pub enum Relation {
    /// The full monic polynomial, read as poly = 0; the pure power of the
    /// variable of highest degree must have coefficient exactly 1.
    Monic { var: String, poly: RawPoly },
    /// lhs monomial (coefficient 1) rewrites to rhs.
    Rewrite { lhs: RawPoly, rhs: RawPoly },
}

impl Ring {
    fn mk(data: RingData) -> Ring {
        Ring(Arc::new(data))
    }

    pub fn integers() -> Ring {
        Ring::scalar_ring(BaseKind::Integers)
    }

    pub fn rationals() -> Ring {
        Ring::scalar_ring(BaseKind::Rationals)
    }

    pub fn integers_mod(n: BigInt) -> Result<Ring> {
        if n < BigInt::from(2) {
            return Err(Error::type_err("modulus must be at least 2"));
        }
        Ok(Ring::scalar_ring(BaseKind::IntegersMod(n)))
    }

    pub fn padic(prime: u32, precision: u32) -> Result<Ring> {
        if !is_prime_u32(prime) {
            return Err(Error::type_err(format!("{prime} is not prime")));
        }
        if precision == 0 {
            return Err(Error::type_err("p-adic precision must be positive"));
        }
        Ok(Ring::scalar_ring(BaseKind::Padic { prime, precision }))
    }

    fn scalar_ring(base: BaseKind) -> Ring {
        let domain = base.domain();
        Ring::mk(RingData {
            base,
            domain,
            vars: Vec::new(),
            rules: Vec::new(),
            monic: BTreeMap::new(),
        })
    }

    /// Polynomial extension: appends fresh (inner) variables.
    pub fn polynomial(&self, new_vars: &[&str]) -> Result<Ring> {
        let mut vars = self.0.vars.clone();
        for v in new_vars {
            if vars.iter().any(|w| w == v) {
                return Err(Error::type_err(format!("variable `{v}` already declared")));
            }
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::type_err(format!("invalid variable name `{v}`")));
            }
            vars.push((*v).to_string());
        }
        let n = vars.len();
        let rules = self
            .0
            .rules
            .iter()
            .map(|r| RewriteRule {
                lhs: r.lhs.pad_to(n),
                rhs: r.rhs.pad_to(n),
            })
            .collect();
        Ok(Ring::mk(RingData {
            base: self.0.base.clone(),
            domain: self.0.domain.clone(),
            vars,
            rules,
            monic: self.0.monic.clone(),
        }))
    }

    /// Quotient by additional relations; validates termination and local
    /// confluence of the combined rewrite system.
    pub fn quotient(&self, relations: Vec<Relation>) -> Result<Ring> {
        let mut rules = self.0.rules.clone();
        let mut monic = self.0.monic.clone();
        for rel in relations {
            match rel {
                Relation::Monic { var, poly } => {
                    let idx = self.var_index(&var)?;
                    let deg = poly.degree_in(idx);
                    if deg == 0 {
                        return Err(Error::type_err(format!(
                            "monic relation must involve `{var}`"
                        )));
                    }
                    let lead = Monomial::var(self.nvars(), idx)
                        .0
                        .iter()
                        .map(|&e| e * deg)
                        .collect::<Vec<_>>();
                    let lead = Monomial(lead);
                    let mut rest = poly.clone();
                    match rest.terms.remove(&lead) {
                        Some(c) if self.domain().eq(&c, &self.domain().one()) => {}
                        _ => {
                            return Err(Error::type_err(format!(
                                "relation is not monic in `{var}` (leading coefficient must be 1)"
                            )))
                        }
                    }
                    if rest.terms.keys().any(|m| m.exp(idx) >= deg) {
                        return Err(Error::type_err(format!(
                            "relation is not monic in `{var}`: non-leading term of degree >= {deg}"
                        )));
                    }
                    monic.insert(idx, (deg, rules.len()));
                    rules.push(RewriteRule {
                        lhs: lead,
                        rhs: rest.neg(self.domain()),
                    });
                }
                Relation::Rewrite { lhs, rhs } => {
                    if lhs.num_terms() != 1 {
                        return Err(Error::type_err(
                            "rewrite left-hand side must be a single monomial",
                        ));
                    }
                    let (m, c) = lhs.leading().expect("nonempty");
                    if !self.domain().eq(c, &self.domain().one()) {
                        return Err(Error::type_err(
                            "rewrite left-hand side must have coefficient 1",
                        ));
                    }
                    if m.is_one() {
                        return Err(Error::type_err("rewrite of the unit monomial"));
                    }
                    rules.push(RewriteRule {
                        lhs: m.clone(),
                        rhs,
                    });
                }
            }
        }
        let data = RingData {
            base: self.0.base.clone(),
            domain: self.0.domain.clone(),
            vars: self.0.vars.clone(),
            rules,
            monic,
        };
        check_presentation(&data)?;
        Ok(Ring::mk(data))
    }

    pub fn base(&self) -> &BaseKind {
        &self.0.base
    }

    pub fn domain(&self) -> &ScalarDomain {
        &self.0.domain
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.0.rules
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.0
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Monic degree of a variable, when its relation is monic.
    pub fn monic_degree(&self, name: &str) -> Result<u32> {
        let idx = self.var_index(name)?;
        self.0
            .monic
            .get(&idx)
            .map(|(d, _)| *d)
            .ok_or_else(|| Error::UnsupportedRing(format!("`{name}` carries no monic relation")))
    }

    pub fn is_finite_free_over_scalars(&self) -> bool {
        let all_monic = (0..self.nvars()).all(|i| self.0.monic.contains_key(&i));
        all_monic && self.0.rules.len() == self.0.monic.len()
    }

    /// Reduce a raw polynomial to its unique normal form.
    pub fn normal_form(&self, mut poly: RawPoly) -> RawPoly {
        'outer: loop {
            let mut hit: Option<(Monomial, Scalar, usize)> = None;
            for (m, c) in poly.terms.iter().rev() {
                for (ri, rule) in self.0.rules.iter().enumerate() {
                    if rule.lhs.divides(m) {
                        hit = Some((m.clone(), c.clone(), ri));
                        break;
                    }
                }
                if hit.is_some() {
                    break;
                }
            }
            match hit {
                None => break 'outer,
                Some((m, c, ri)) => {
                    let rule = &self.0.rules[ri];
                    let cof = rule.lhs.quotient_into(&m);
                    poly.terms.remove(&m);
                    let replacement = rule.rhs.mul_monomial(self.domain(), &cof, &c);
                    poly = poly.add(self.domain(), &replacement);
                }
            }
        }
        poly
    }

    // ----- element constructors -----

    pub fn zero(&self) -> RingElement {
        RingElement {
            ring: self.clone(),
            poly: RawPoly::zero(),
        }
    }

    pub fn one(&self) -> RingElement {
        self.scalar(self.domain().one())
    }

    pub fn int(&self, n: i64) -> RingElement {
        self.scalar(self.domain().from_i64(n))
    }

    pub fn bigint(&self, n: &BigInt) -> RingElement {
        self.scalar(self.domain().from_bigint(n))
    }

    pub fn rational(&self, q: &BigRational) -> Result<RingElement> {
        Ok(self.scalar(self.domain().from_rational(q)?))
    }

    pub fn scalar(&self, c: Scalar) -> RingElement {
        let poly = RawPoly::constant(self.domain(), c, self.nvars());
        RingElement {
            ring: self.clone(),
            poly: self.normal_form(poly),
        }
    }

    pub fn var(&self, name: &str) -> Result<RingElement> {
        let idx = self.var_index(name)?;
        let poly = RawPoly::from_term(
            self.domain(),
            Monomial::var(self.nvars(), idx),
            self.domain().one(),
        );
        Ok(RingElement {
            ring: self.clone(),
            poly: self.normal_form(poly),
        })
    }

    pub fn element(&self, poly: RawPoly) -> RingElement {
        RingElement {
            ring: self.clone(),
            poly: self.normal_form(poly),
        }
    }

    /// Teichmüller scalar χ(m) for the prime p, when the scalar domain
    /// carries it exactly: any domain for p <= 3 (values 0, ±1), residue
    /// rings Z/p^k, and p-adic domains of matching prime.
    pub fn teichmuller_scalar(&self, p: u32, m: u32) -> Result<Scalar> {
        assert!(m < p);
        match self.domain() {
            ScalarDomain::Integers | ScalarDomain::Rationals => match (p, m) {
                (_, 0) => Ok(self.domain().zero()),
                (2, 1) => Ok(self.domain().one()),
                (3, 1) => Ok(self.domain().one()),
                (3, 2) => Ok(self.domain().from_i64(-1)),
                _ => Err(Error::UnsupportedRing(format!(
                    "Teichmüller values for p={p} are irrational; use a p-adic or Z/p^k base"
                ))),
            },
            ScalarDomain::Mod(n) => {
                let (q, k) = prime_power_split(n).ok_or_else(|| {
                    Error::UnsupportedRing(format!("Z/{n} is not a p-power residue ring"))
                })?;
                if q != p {
                    return Err(Error::UnsupportedRing(format!(
                        "residue characteristic {q} does not match p={p}"
                    )));
                }
                let t = teichmuller(p, m, k);
                Ok(self.domain().from_bigint(t.residue()))
            }
            ScalarDomain::Padic { prime, precision } => {
                if *prime != p {
                    return Err(Error::UnsupportedRing(format!(
                        "p-adic base prime {prime} does not match p={p}"
                    )));
                }
                Ok(Scalar::Padic(teichmuller(p, m, *precision)))
            }
        }
    }
}

/// Termination (each rule strictly decreases tower-lex) plus local
/// confluence (all critical pairs resolve to a common normal form).
fn check_presentation(data: &RingData) -> Result<()> {
    for rule in &data.rules {
        for m in rule.rhs.terms.keys() {
            if m >= &rule.lhs {
                return Err(Error::NonConfluentPresentation(format!(
                    "rule does not decrease the monomial order: {} occurs in the reduction of {}",
                    fmt_monomial(&data.vars, m),
                    fmt_monomial(&data.vars, &rule.lhs),
                )));
            }
        }
    }
    let probe = Ring(Arc::new(RingData {
        base: data.base.clone(),
        domain: data.domain.clone(),
        vars: data.vars.clone(),
        rules: data.rules.clone(),
        monic: data.monic.clone(),
    }));
    for i in 0..data.rules.len() {
        for j in (i + 1)..data.rules.len() {
            let a = &data.rules[i];
            let b = &data.rules[j];
            let l = a.lhs.lcm(&b.lhs);
            let ra = a
                .rhs
                .mul_monomial(&data.domain, &a.lhs.quotient_into(&l), &data.domain.one());
            let rb = b
                .rhs
                .mul_monomial(&data.domain, &b.lhs.quotient_into(&l), &data.domain.one());
            let na = probe.normal_form(ra);
            let nb = probe.normal_form(rb);
            if !na.sub(&data.domain, &nb).is_zero() {
                return Err(Error::NonConfluentPresentation(format!(
                    "critical pair at {} does not resolve",
                    fmt_monomial(&data.vars, &l)
                )));
            }
        }
    }
    Ok(())
}

fn fmt_monomial(vars: &[String], m: &Monomial) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 1 {
            parts.push(vars[i].clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", vars[i], e));
        }
    }
    parts.join("*")
}

fn prime_power_split(n: &BigInt) -> Option<(u32, u32)> {
    let mut n = n.clone();
    if n < BigInt::from(2) {
        return None;
    }
    for p in 2u32.. {
        if BigInt::from(p).pow(2) > n && !n.is_one() {
            // n itself is prime (or a prime too large for u32 factors).
            let p0: u32 = n.clone().try_into().ok()?;
            return Some((p0, 1));
        }
        if (&n % BigInt::from(p)).is_zero() {
            let mut k = 0u32;
            while (&n % BigInt::from(p)).is_zero() {
                n /= BigInt::from(p);
                k += 1;
            }
            if n.is_one() {
                return Some((p, k));
            }
            return None;
        }
    }
    None
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a presented ring, stored in normal form.
#[derive(Clone)]
pub struct RingElement {
    ring: Ring,
    poly: RawPoly,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn poly(&self) -> &RawPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        (self - &self.ring.one()).is_zero()
    }

    /// The scalar value of a constant element.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.poly.is_zero() {
            return Some(self.ring.domain().zero());
        }
        if self.poly.num_terms() == 1 {
            let (m, c) = self.poly.leading().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_integral(&self) -> bool {
        self.poly
            .terms
            .values()
            .all(|c| self.ring.domain().is_integral(c))
    }

    fn assert_same_ring(&self, other: &RingElement) {
        assert!(
            self.ring == other.ring,
            "elements of different rings: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn pow(&self, exp: u64) -> RingElement {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> RingElement {
        self.ring
            .element(self.poly.scale(self.ring.domain(), c))
    }

    /// Exact division of every coefficient by an integer.
    pub fn exact_div_int(&self, n: &BigInt) -> Result<RingElement> {
        let domain = self.ring.domain();
        let mut out = RawPoly::zero();
        for (m, c) in &self.poly.terms {
            out.add_term(domain, m.clone(), domain.exact_div_int(c, n)?);
        }
        Ok(self.ring.element(out))
    }

    /// Evaluate under an assignment of variables in a target ring.
    /// Unassigned variables map to the target's variable of the same name;
    /// scalars convert along the canonical coefficient map.
    pub fn substitute(
        &self,
        target: &Ring,
        assignment: &BTreeMap<String, RingElement>,
    ) -> Result<RingElement> {
        for e in assignment.values() {
            assert!(e.ring == *target, "assignment value in a different ring");
        }
        let mut images: Vec<Option<RingElement>> = vec![None; self.ring.nvars()];
        let mut acc = target.zero();
        for (m, c) in &self.poly.terms {
            let conv = target
                .domain()
                .convert(self.ring.domain(), c)?;
            let mut term = target.scalar(conv);
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if images[idx].is_none() {
                    let name = &self.ring.vars()[idx];
                    let img = match assignment.get(name) {
                        Some(v) => v.clone(),
                        None => target.var(name)?,
                    };
                    images[idx] = Some(img);
                }
                term = &term * &images[idx].as_ref().unwrap().pow(e as u64);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Move an element into an extension (or compatible) ring.
    pub fn into_ring(&self, target: &Ring) -> Result<RingElement> {
        self.substitute(target, &BTreeMap::new())
    }

    /// Coordinates with respect to the monomials in the listed variables:
    /// exponent profile over `split` -> cofactor polynomial free of `split`.
    pub fn coordinates(&self, split: &[&str]) -> Result<BTreeMap<Vec<u32>, RingElement>> {
        let idxs: Vec<usize> = split
            .iter()
            .map(|v| self.ring.var_index(v))
            .collect::<Result<_>>()?;
        let mut out: BTreeMap<Vec<u32>, RawPoly> = BTreeMap::new();
        for (m, c) in &self.poly.terms {
            let profile: Vec<u32> = idxs.iter().map(|&i| m.exp(i)).collect();
            let mut rest = m.clone();
            for &i in &idxs {
                rest.0[i] = 0;
            }
            out.entry(profile)
                .or_insert_with(RawPoly::zero)
                .add_term(self.ring.domain(), rest, c.clone());
        }
        Ok(out
            .into_iter()
            .map(|(k, p)| (k, self.ring.element(p)))
            .collect())
    }

    /// Exact unit test with witness. Decidable for scalar values in any
    /// base, and for elements of rings finite free over their scalars of
    /// rank at most 8 (via the multiplication-matrix determinant).
    pub fn is_unit(&self) -> Result<Option<RingElement>> {
        if let Some(c) = self.as_scalar() {
            return Ok(self.ring.domain().inv(&c).map(|w| self.ring.scalar(w)));
        }
        if self.ring.is_finite_free_over_scalars() {
            let rank: u64 = (0..self.ring.nvars())
                .map(|i| self.ring.0.monic[&i].0 as u64)
                .product();
            if rank <= 8 {
                return self.unit_by_norm(rank as usize);
            }
            return Err(Error::Undecidable(format!(
                "unit test for rank {rank} extension not implemented"
            )));
        }
        Err(Error::Undecidable(
            "unit test not implemented for this presentation".into(),
        ))
    }

    /// Determinant route: e is a unit iff det(mult-by-e) is a unit in the
    /// scalar base; the witness column comes from the adjugate.
    fn unit_by_norm(&self, rank: usize) -> Result<Option<RingElement>> {
        let basis = self.ring.module_basis()?;
        assert_eq!(basis.len(), rank);
        let domain = self.ring.domain();
        // columns: coordinates of e * basis[j]
        let mut mat = vec![vec![domain.zero(); rank]; rank];
        let index_of: BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        for (j, bj) in basis.iter().enumerate() {
            let prod = self
                .ring
                .normal_form(self.poly.mul_monomial(domain, bj, &domain.one()));
            for (m, c) in &prod.terms {
                let i = *index_of
                    .get(m)
                    .expect("normal form escaped the module basis");
                mat[i][j] = c.clone();
            }
        }
        let det = det_scalar(domain, &mat);
        let inv_det = match domain.inv(&det) {
            None => return Ok(None),
            Some(d) => d,
        };
        // Solve M w = e_0 (coordinates of 1) via adjugate / det.
        let mut witness = RawPoly::zero();
        for i in 0..rank {
            let cof = cofactor(domain, &mat, 0, i);
            // adj(M)[i][0] = cofactor over (0, i) transposed.
            witness.add_term(domain, basis[i].clone(), domain.mul(&cof, &inv_det));
        }
        let w = self.ring.element(witness);
        let check = &(&w * self) - &self.ring.one();
        if !check.is_zero() {
            return Err(Error::invariant("unit witness failed verification"));
        }
        Ok(Some(w))
    }
}

impl Ring {
    /// Monomial basis of a ring finite free over its scalars.
    pub fn module_basis(&self) -> Result<Vec<Monomial>> {
        if !self.is_finite_free_over_scalars() {
            return Err(Error::UnsupportedRing(
                "ring is not finite free over its scalar base".into(),
            ));
        }
        let degs: Vec<u32> = (0..self.nvars()).map(|i| self.0.monic[&i].0).collect();
        let mut basis = vec![Monomial::one(self.nvars())];
        for (i, &d) in degs.iter().enumerate() {
            let mut next = Vec::new();
            for m in &basis {
                for e in 0..d {
                    let mut v = m.clone();
                    v.0[i] = e;
                    next.push(v);
                }
            }
            basis = next;
        }
        basis.sort();
        Ok(basis)
    }

    /// Matrix of multiplication by `f` on the power basis of a monic
    /// variable, entries free of that variable.
    pub fn mult_matrix(&self, f: &RingElement, var: &str) -> Result<Vec<Vec<RingElement>>> {
        assert!(f.ring() == self);
        let d = self.monic_degree(var)? as usize;
        let x = self.var(var)?;
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let prod = f * &x.pow(j as u64);
            let coords = prod.coordinates(&[var])?;
            let mut col = vec![self.zero(); d];
            for (profile, e) in coords {
                let deg = profile[0] as usize;
                assert!(deg < d, "multiplication escaped the rank-{d} basis");
                col[deg] = e;
            }
            cols.push(col);
        }
        // transpose into row-major
        let mut mat = vec![vec![self.zero(); d]; d];
        for (j, col) in cols.into_iter().enumerate() {
            for (i, e) in col.into_iter().enumerate() {
                mat[i][j] = e;
            }
        }
        Ok(mat)
    }

    /// Determinant over the ring (bitmask expansion over column subsets).
    pub fn determinant(&self, mat: &[Vec<RingElement>]) -> RingElement {
        let n = mat.len();
        if n == 0 {
            return self.one();
        }
        // minors[s] = determinant of rows 0..popcount(s) on column set s
        let mut minors: Vec<Option<RingElement>> = vec![None; 1 << n];
        minors[0] = Some(self.one());
        for s in 1usize..(1 << n) {
            let row = (s as u32).count_ones() as usize - 1;
            let mut acc = self.zero();
            let mut sign_pos = true;
            for j in 0..n {
                if s & (1 << j) == 0 {
                    continue;
                }
                let sub = minors[s & !(1 << j)].clone().expect("filled in order");
                let term = &mat[row][j] * &sub;
                acc = if sign_pos { &acc + &term } else { &acc - &term };
                sign_pos = !sign_pos;
            }
            minors[s] = Some(acc);
        }
        minors[(1 << n) - 1].clone().unwrap()
    }
}

fn det_scalar(domain: &ScalarDomain, mat: &[Vec<Scalar>]) -> Scalar {
    let n = mat.len();
    let mut minors: Vec<Option<Scalar>> = vec![None; 1 << n];
    minors[0] = Some(domain.one());
    for s in 1usize..(1 << n) {
        let row = (s as u32).count_ones() as usize - 1;
        let mut acc = domain.zero();
        let mut sign_pos = true;
        for j in 0..n {
            if s & (1 << j) == 0 {
                continue;
            }
            let sub = minors[s & !(1 << j)].clone().expect("filled in order");
            let term = domain.mul(&mat[row][j], &sub);
            acc = if sign_pos {
                domain.add(&acc, &term)
            } else {
                domain.sub(&acc, &term)
            };
            sign_pos = !sign_pos;
        }
        minors[s] = Some(acc);
    }
    minors[(1 << n) - 1].clone().unwrap()
}

/// Signed cofactor C_{rc} = (-1)^{r+c} det(minor_{rc}).
fn cofactor(domain: &ScalarDomain, mat: &[Vec<Scalar>], r: usize, c: usize) -> Scalar {
    let n = mat.len();
    let mut minor = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == r {
            continue;
        }
        let mut row = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == c {
                continue;
            }
            row.push(mat[i][j].clone());
        }
        minor.push(row);
    }
    let d = det_scalar(domain, &minor);
    if (r + c) % 2 == 0 {
        d
    } else {
        domain.neg(&d)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && (self - other).is_zero()
    }
}
impl Eq for RingElement {}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.assert_same_ring(rhs);
        self.ring
            .element(self.poly.add(self.ring.domain(), &rhs.poly))
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.assert_same_ring(rhs);
        self.ring
            .element(self.poly.sub(self.ring.domain(), &rhs.poly))
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.assert_same_ring(rhs);
        self.ring
            .element(self.poly.mul(self.ring.domain(), &rhs.poly))
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.ring.element(self.poly.neg(self.ring.domain()))
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            let cs = fmt_scalar(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = fmt_monomial(self.ring.vars(), m);
            if mono == "1" {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

pub fn fmt_scalar(c: &Scalar) -> String {
    match c {
        Scalar::Rat(q) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        Scalar::Mod(x) => x.to_string(),
        Scalar::Padic(x) => {
            if let Some(n) = x.recognize_integer() {
                n.to_string()
            } else {
                format!("{}~{}", x.residue(), x.precision())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universal_ring(p: i64) -> Ring {
        let z = Ring::integers();
        let poly = z.polynomial(&["E", "F"]).unwrap();
        let e = poly.var("E").unwrap();
        let f = poly.var("F").unwrap();
        let lhs = &e.pow((p - 1) as u64) * &f;
        poly.quotient(vec![Relation::Rewrite {
            lhs: lhs.poly().clone(),
            rhs: poly.int(p).poly().clone(),
        }])
        .unwrap()
    }

    #[test]
    fn single_rewrite_rule() {
        let o = universal_ring(3);
        let e = o.var("E").unwrap();
        let f = o.var("F").unwrap();
        // E^2 F -> 3
        assert_eq!(&e.pow(2) * &f, o.int(3));
        // E^3 F^2 -> 3 E F (the rule applies once)
        assert_eq!(&e.pow(3) * &f.pow(2), &(&e * &f) * &o.int(3));
        // E^5 F^2 -> 9 E (the rule applies twice)
        assert_eq!(&e.pow(5) * &f.pow(2), &e * &o.int(9));
    }

    #[test]
    fn monic_reduction() {
        let z = Ring::integers();
        let rx = z.polynomial(&["x"]).unwrap();
        let x = rx.var("x").unwrap();
        // x^3 = -3x^2 - 3x
        let rel = &(&x.pow(3) + &(&rx.int(3) * &x.pow(2))) + &(&rx.int(3) * &x);
        let q = rx
            .quotient(vec![Relation::Monic {
                var: "x".into(),
                poly: rel.poly().clone(),
            }])
            .unwrap();
        let x = q.var("x").unwrap();
        let expect = &-&(&q.int(3) * &x.pow(2)) - &(&q.int(3) * &x);
        assert_eq!(x.pow(3), expect);
        assert_eq!(q.monic_degree("x").unwrap(), 3);
    }

    #[test]
    fn normal_form_is_idempotent() {
        let o = universal_ring(5);
        let e = o.var("E").unwrap();
        let f = o.var("F").unwrap();
        let v = &(&e.pow(9) + &f.pow(3)) * &(&e + &f).pow(3);
        let again = o.normal_form(v.poly().clone());
        assert_eq!(again, *v.poly());
    }

    #[test]
    fn confluence_checker_rejects_ambiguous_rules() {
        let z = Ring::integers();
        let rx = z.polynomial(&["x"]).unwrap();
        let x2 = rx.var("x").unwrap().pow(2);
        let bad = rx.quotient(vec![
            Relation::Rewrite {
                lhs: x2.poly().clone(),
                rhs: rx.var("x").unwrap().poly().clone(),
            },
            Relation::Rewrite {
                lhs: x2.poly().clone(),
                rhs: RawPoly::zero(),
            },
        ]);
        assert!(matches!(bad, Err(Error::NonConfluentPresentation(_))));
    }

    #[test]
    fn confluence_checker_accepts_triangular_monic() {
        let z = Ring::integers();
        let r = z.polynomial(&["a", "b"]).unwrap();
        let a = r.var("a").unwrap();
        let b = r.var("b").unwrap();
        // a^2 = 2, b^3 = a b + 1  (triangular: b's relation uses a)
        let rel_a = &a.pow(2) - &r.int(2);
        let rel_b = &(&b.pow(3) - &(&a * &b)) - &r.one();
        let q = r.quotient(vec![
            Relation::Monic {
                var: "a".into(),
                poly: rel_a.poly().clone(),
            },
            Relation::Monic {
                var: "b".into(),
                poly: rel_b.poly().clone(),
            },
        ]);
        assert!(q.is_ok());
        assert!(q.unwrap().is_finite_free_over_scalars());
    }

    #[test]
    fn nonterminating_rule_rejected() {
        let z = Ring::integers();
        let rx = z.polynomial(&["x"]).unwrap();
        let x = rx.var("x").unwrap();
        let bad = rx.quotient(vec![Relation::Rewrite {
            lhs: x.poly().clone(),
            rhs: x.pow(2).poly().clone(),
        }]);
        assert!(matches!(bad, Err(Error::NonConfluentPresentation(_))));
    }

    #[test]
    fn unit_witnesses() {
        let z25 = Ring::integers_mod(BigInt::from(25)).unwrap();
        let w = z25.int(7).is_unit().unwrap().unwrap();
        assert_eq!(w, z25.int(18));
        assert!(z25.int(5).is_unit().unwrap().is_none());

        // Gaussian integers: 1+2i is not a unit, i is.
        let zi = Ring::integers()
            .polynomial(&["i"])
            .unwrap()
            .quotient(vec![Relation::Monic {
                var: "i".into(),
                poly: {
                    let r = Ring::integers().polynomial(&["i"]).unwrap();
                    let i = r.var("i").unwrap();
                    (&i.pow(2) + &r.one()).poly().clone()
                },
            }])
            .unwrap();
        let i = zi.var("i").unwrap();
        let one_plus = &zi.one() + &(&zi.int(2) * &i);
        assert!(one_plus.is_unit().unwrap().is_none());
        let wi = i.is_unit().unwrap().unwrap();
        assert_eq!(&wi * &i, zi.one());
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let o = universal_ring(2);
        let s = o.polynomial(&["x1", "x2"]).unwrap();
        let f_ring = o.polynomial(&["X"]).unwrap();
        let xv = f_ring.var("X").unwrap();
        let mu = f_ring.var("F").unwrap();
        let p_of_x = &xv.pow(2) + &(&mu * &xv);
        let x1 = s.var("x1").unwrap();
        let x2 = s.var("x2").unwrap();
        let lam = s.var("E").unwrap();
        let law = &(&x1 + &x2) + &(&lam * &(&x1 * &x2));
        let mut asg = BTreeMap::new();
        asg.insert("X".to_string(), law.clone());
        let lhs = p_of_x.substitute(&s, &asg).unwrap();
        // P(x1) + P(x2) + λ^2 P(x1) P(x2) under λμ = 2
        let mut a1 = BTreeMap::new();
        a1.insert("X".to_string(), x1.clone());
        let p1 = p_of_x.substitute(&s, &a1).unwrap();
        let mut a2 = BTreeMap::new();
        a2.insert("X".to_string(), x2.clone());
        let p2 = p_of_x.substitute(&s, &a2).unwrap();
        let rhs = &(&p1 + &p2) + &(&lam.pow(2) * &(&p1 * &p2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_section_of_group_law() {
        let z = Ring::integers();
        let r = z.polynomial(&["lam", "x1", "x2"]).unwrap();
        let x1 = r.var("x1").unwrap();
        let x2 = r.var("x2").unwrap();
        let lam = r.var("lam").unwrap();
        let law = &(&x1 + &x2) + &(&lam * &(&x1 * &x2));
        let mut asg = BTreeMap::new();
        asg.insert("x1".to_string(), r.zero());
        let img = law.substitute(&r, &asg).unwrap();
        assert_eq!(img, x2);
    }
}
