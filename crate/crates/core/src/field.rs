//! Exact arithmetic in GF(p^e).
//!
//! Elements are encoded as integers in `[0, q)`: the coefficient vector of the
//! residue polynomial read in base `p`, constant term least significant. Index 0
//! is zero and index 1 is one in every field.
//!
//! Prime fields use plain modular arithmetic. Extension fields with `q <= 256`
//! get full addition, multiplication and inversion tables at construction;
//! larger extension fields reduce polynomials on demand.

use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on `q = p^e` accepted by [`make_field`].
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

/// Extension fields up to this size are fully tabulated.
const TABLE_LIMIT: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub(crate) fn from_raw(index: u32) -> Self {
        FieldElement(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// A finite field GF(p^e) with a fixed monic irreducible modulus.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Display for FieldSpec {
    /// Renders as `GF(p^e; modulus=c0,c1,...,ce)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.modulus.iter().map(u32::to_string).collect();
        write!(f, "GF({}^{}; modulus={})", self.p, self.e, coeffs.join(","))
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Builds GF(p^e) with the default size bound.
pub fn make_field(p: u64, e: u32) -> Result<FieldSpec> {
    make_field_with_bound(p, e, DEFAULT_FIELD_BOUND)
}

/// Builds GF(p^e). For `e > 1` the modulus is the monic irreducible polynomial
/// of degree `e` whose lower coefficients, read as a base-`p` integer, are
/// smallest. For `e == 1` the modulus is recorded as `t` and never used.
pub fn make_field_with_bound(p: u64, e: u32, bound: u64) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e < 1 {
        return Err(Error::BadDegree(e));
    }
    let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
    if q > bound as u128 || q > u32::MAX as u128 {
        return Err(Error::FieldTooLarge { p, e, bound });
    }
    let (p, q) = (p as u32, q as u32);
    let modulus = if e == 1 {
        vec![0, 1]
    } else {
        minimal_irreducible(p, e as usize)
    };
    let mut spec = FieldSpec {
        p,
        e,
        q,
        modulus,
        tables: None,
    };
    if e > 1 && q <= TABLE_LIMIT {
        spec.tables = Some(spec.build_tables());
    }
    Ok(spec)
}

fn minimal_irreducible(p: u32, e: usize) -> Vec<u32> {
    let count = (p as u64).pow(e as u32);
    for low in 0..count {
        let mut poly = digits(low, p, e);
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

fn digits(mut value: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((value % p as u64) as u32);
        value /= p as u64;
    }
    out
}

/// Irreducibility by exhaustive trial division with every monic polynomial of
/// degree `1..=deg/2`. Only meant for small degrees.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for div_deg in 1..=deg / 2 {
        let count = (p as u64).pow(div_deg as u32);
        for low in 0..count {
            let mut divisor = digits(low, p, div_deg);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of `a` modulo a monic `b` over GF(p). The result has length `deg b`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    for top in (db..r.len()).rev() {
        let c = r[top] % p64;
        if c == 0 {
            continue;
        }
        let shift = top - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p64 - c) * bc as u64) % p64;
        }
    }
    r.truncate(db);
    r.resize(db, 0);
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first, length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    /// Validates an index and wraps it as an element.
    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q as u64 {
            return Err(Error::ElementOutOfRange { index, q: self.q as u64 });
        }
        Ok(FieldElement(index as u32))
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Base-`p` digits of an element, constant term first.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0 as u64, self.p, self.e as usize)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.e as usize {
            return Err(Error::DimensionMismatch(coeffs.len(), self.e as usize));
        }
        let mut index = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::ElementOutOfRange { index: c as u64, q: self.p as u64 });
            }
            index = index * self.p as u64 + c as u64;
        }
        Ok(FieldElement(index as u32))
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.0 >= self.q {
            Err(Error::ElementOutOfRange { index: a.0 as u64, q: self.q as u64 })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn checked_neg(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.neg(a))
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            return Ok(FieldElement(t.inv[a.0 as usize]));
        }
        // Fermat: a^(q-2)
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Unchecked addition. Indices must be in range.
    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        if let Some(t) = &self.tables {
            return FieldElement(t.add[(a.0 * self.q + b.0) as usize]);
        }
        self.add_digits(a.0, b.0)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a ^ b);
        }
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        FieldElement(out)
    }

    /// Unchecked additive inverse.
    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        if let Some(t) = &self.tables {
            return FieldElement(t.neg[a.0 as usize]);
        }
        let d: Vec<u32> = self
            .coefficients(a)
            .into_iter()
            .map(|c| if c == 0 { 0 } else { self.p - c })
            .collect();
        self.encode(&d)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Unchecked multiplication.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        if let Some(t) = &self.tables {
            return FieldElement(t.mul[(a.0 * self.q + b.0) as usize]);
        }
        self.mul_poly(a, b)
    }

    fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (da, db) = (self.coefficients(a), self.coefficients(b));
        let p = self.p as u64;
        let mut prod = vec![0u64; da.len() + db.len() - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        self.encode(&poly_rem(&prod, &self.modulus, self.p))
    }

    fn encode(&self, coeffs: &[u32]) -> FieldElement {
        let index = coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64);
        FieldElement(index as u32)
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for a in 0..self.q {
            for b in 0..self.q {
                let k = a as usize * q + b as usize;
                add[k] = self.add_digits(a, b).0;
                mul[k] = self.mul_poly(FieldElement(a), FieldElement(b)).0;
            }
        }
        let mut neg = vec![0u32; q];
        let mut inv = vec![0u32; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u32;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as u32;
                }
            }
        }
        Tables { add, mul, neg, inv }
    }
}
