//! Vectors in F_q^d, the dot product, and enumeration of affine and projective
//! point sets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Default bound on `q^d` for enumeration.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 22;

#[derive(Clone, PartialEq, Eq)]
pub struct FqVector {
    field: Arc<FieldSpec>,
    coords: Vec<FieldElement>,
}

impl fmt::Debug for FqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for FqVector {
    /// Comma-separated element indices, e.g. `1,0,2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FqVector {
    pub fn new(field: Arc<FieldSpec>, coords: Vec<FieldElement>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameters("dimension must be at least 1".into()));
        }
        for c in &coords {
            field.element(c.index() as u64)?;
        }
        Ok(FqVector { field, coords })
    }

    pub fn from_indices(field: Arc<FieldSpec>, indices: &[u64]) -> Result<Self> {
        let coords = indices
            .iter()
            .map(|&i| field.element(i))
            .collect::<Result<Vec<_>>>()?;
        FqVector::new(field, coords)
    }

    /// Parses the `1,0,2` serialization.
    pub fn parse(field: Arc<FieldSpec>, text: &str) -> Result<Self> {
        let indices = text
            .trim()
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad vector coordinate {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FqVector::from_indices(field, &indices)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Base-q integer of the coordinates, first coordinate least significant.
    pub fn encoding(&self) -> u64 {
        let q = self.field.q() as u64;
        self.coords
            .iter()
            .rev()
            .fold(0, |acc, c| acc * q + c.index() as u64)
    }

    fn compatible(&self, other: &FqVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if !Arc::ptr_eq(&self.field, &other.field) && *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FqVector) -> Result<FqVector> {
        self.compatible(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(FqVector { field: self.field.clone(), coords })
    }

    pub fn scale(&self, s: FieldElement) -> FqVector {
        let coords = self.coords.iter().map(|&c| self.field.mul(s, c)).collect();
        FqVector { field: self.field.clone(), coords }
    }

    /// Index of the first nonzero coordinate.
    pub fn leading_index(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }

    /// The scalar multiple whose first nonzero coordinate is 1, or `None` for zero.
    pub fn projective_representative(&self) -> Option<FqVector> {
        let lead = self.coords[self.leading_index()?];
        Some(self.scale(self.field.inv(lead).ok()?))
    }
}

/// Sum of coordinate products.
pub fn dot(u: &FqVector, v: &FqVector) -> Result<FieldElement> {
    u.compatible(v)?;
    Ok(dot_unchecked(&u.field, &u.coords, &v.coords))
}

#[inline]
pub(crate) fn dot_unchecked(field: &FieldSpec, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    u.iter()
        .zip(v)
        .fold(FieldElement::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

/// `u . v == 0`. A vector may be orthogonal to itself.
pub fn is_orthogonal(u: &FqVector, v: &FqVector) -> Result<bool> {
    Ok(dot(u, v)?.is_zero())
}

fn check_bound(field: &FieldSpec, d: usize, bound: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidParameters("dimension must be at least 1".into()));
    }
    let count = (field.q() as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if count > bound as u128 {
        return Err(Error::EnumerationTooLarge { count, bound });
    }
    Ok(count as u64)
}

fn decode(field: &Arc<FieldSpec>, mut code: u64, d: usize) -> FqVector {
    let q = field.q() as u64;
    let coords = (0..d)
        .map(|_| {
            let c = FieldElement::from_raw((code % q) as u32);
            code /= q;
            c
        })
        .collect();
    FqVector { field: field.clone(), coords }
}

/// All `q^d - 1` nonzero vectors in base-q encoding order.
pub fn enumerate_nonzero_vectors(field: &Arc<FieldSpec>, d: usize) -> Result<Vec<FqVector>> {
    enumerate_nonzero_vectors_with_bound(field, d, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_nonzero_vectors_with_bound(
    field: &Arc<FieldSpec>,
    d: usize,
    bound: u64,
) -> Result<Vec<FqVector>> {
    let count = check_bound(field, d, bound)?;
    Ok((1..count).map(|code| decode(field, code, d)).collect())
}

/// One vector per projective class, the one whose first nonzero coordinate is
/// 1, in encoding order. There are `(q^d - 1)/(q - 1)` of them.
pub fn projective_representatives(field: &Arc<FieldSpec>, d: usize) -> Result<Vec<FqVector>> {
    projective_representatives_with_bound(field, d, DEFAULT_ENUMERATION_BOUND)
}

pub fn projective_representatives_with_bound(
    field: &Arc<FieldSpec>,
    d: usize,
    bound: u64,
) -> Result<Vec<FqVector>> {
    let count = check_bound(field, d, bound)?;
    Ok((1..count)
        .map(|code| decode(field, code, d))
        .filter(|v| v.leading_index().is_some_and(|i| v.coords[i] == FieldElement::ONE))
        .collect())
}
