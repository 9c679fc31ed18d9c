//! Orthogonality graphs over F_q^d with dense bit-matrix adjacency.
//!
//! Two vertices are adjacent when their dot product vanishes; a vertex with
//! `x . x = 0` carries a loop, stored on the diagonal and mirrored in
//! [`OrthoGraph::loops`]. A loop contributes 1 to its row sum.
//!
//! The projective graph has one vertex per projective point. The affine graph
//! has every nonzero vector as a vertex, ordered class by class: the `q - 1`
//! nonzero multiples of each projective representative form one contiguous
//! block, multipliers in field encoding order.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::field::{is_prime, make_field, FieldSpec};
use crate::linear::{dot_unchecked, projective_representatives, FqVector};

/// Default bound on the vertex count of a dense graph.
pub const DEFAULT_MAX_N: usize = 20_000;

/// Environment variable overriding [`DEFAULT_MAX_N`].
pub const MAX_N_ENV: &str = "ORTHOCOUNT_MAX_N";

/// The dense-matrix bound in effect: `ORTHOCOUNT_MAX_N` if set and valid,
/// otherwise [`DEFAULT_MAX_N`].
pub fn dense_bound() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Projective,
    Affine,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Projective => "projective",
            Family::Affine => "affine",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(Family::Projective),
            "affine" => Ok(Family::Affine),
            other => Err(Error::Parse(format!("unknown graph family {other:?}"))),
        }
    }
}

/// Splits a prime power `q` into `(p, e)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|f| q.is_multiple_of(*f))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, e))
}

/// Builds the field with `q` elements.
pub fn field_of_order(q: u64) -> Result<Arc<FieldSpec>> {
    let (p, e) = prime_power(q)
        .ok_or_else(|| Error::InvalidParameters(format!("q = {q} is not a prime power")))?;
    Ok(Arc::new(make_field(p, e)?))
}

/// Closed-form vertex count: `(q^d - 1)/(q - 1)` projective, `q^d - 1` affine.
pub fn closed_form_n(family: Family, q: u64, d: u32) -> u128 {
    let qd = (q as u128).pow(d) - 1;
    match family {
        Family::Projective => qd / (q as u128 - 1),
        Family::Affine => qd,
    }
}

/// Closed-form degree: `(q^(d-1) - 1)/(q - 1)` projective, `q^(d-1) - 1` affine.
pub fn closed_form_degree(family: Family, q: u64, d: u32) -> u128 {
    closed_form_n(family, q, d - 1)
}

#[derive(Clone)]
pub struct OrthoGraph {
    family: Family,
    field: Arc<FieldSpec>,
    d: usize,
    vertices: Vec<FqVector>,
    adjacency: Vec<BitRow>,
    loops: BitRow,
    degree: u64,
    index: HashMap<u64, usize>,
}

impl fmt::Debug for OrthoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthoGraph")
            .field("family", &self.family)
            .field("q", &self.q())
            .field("d", &self.d)
            .field("n", &self.n())
            .field("degree", &self.degree)
            .finish()
    }
}

fn check_params(family: Family, q: u64, d: usize) -> Result<Arc<FieldSpec>> {
    if d < 2 {
        return Err(Error::InvalidParameters(format!("d must be at least 2, got {d}")));
    }
    let field = field_of_order(q)?;
    let n = (q as u128)
        .checked_pow(d as u32)
        .map(|_| closed_form_n(family, q, d as u32))
        .unwrap_or(u128::MAX);
    let bound = dense_bound();
    if n > bound as u128 {
        return Err(Error::GraphTooLarge { n, bound });
    }
    Ok(field)
}

/// The projective orthogonality graph on the points of PG(d-1, q).
pub fn build_projective_graph(q: u64, d: usize) -> Result<OrthoGraph> {
    let field = check_params(Family::Projective, q, d)?;
    let vertices = projective_representatives(&field, d)?;
    Ok(OrthoGraph::from_vertices(Family::Projective, field, d, vertices))
}

/// The affine orthogonality graph on all nonzero vectors of F_q^d.
pub fn build_affine_graph(q: u64, d: usize) -> Result<OrthoGraph> {
    let field = check_params(Family::Affine, q, d)?;
    let reps = projective_representatives(&field, d)?;
    let scalars: Vec<_> = field.elements().skip(1).collect();
    let vertices = reps
        .iter()
        .flat_map(|rep| scalars.iter().map(move |&s| rep.scale(s)))
        .collect();
    Ok(OrthoGraph::from_vertices(Family::Affine, field, d, vertices))
}

pub fn build_graph(family: Family, q: u64, d: usize) -> Result<OrthoGraph> {
    match family {
        Family::Projective => build_projective_graph(q, d),
        Family::Affine => build_affine_graph(q, d),
    }
}

impl OrthoGraph {
    fn from_vertices(family: Family, field: Arc<FieldSpec>, d: usize, vertices: Vec<FqVector>) -> Self {
        let n = vertices.len();
        let adjacency: Vec<BitRow> = vertices
            .par_iter()
            .map(|u| {
                let mut row = BitRow::zeros(n);
                for (j, v) in vertices.iter().enumerate() {
                    if dot_unchecked(&field, u.coords(), v.coords()).is_zero() {
                        row.set(j);
                    }
                }
                row
            })
            .collect();
        let mut loops = BitRow::zeros(n);
        for (i, row) in adjacency.iter().enumerate() {
            if row.get(i) {
                loops.set(i);
            }
        }
        let degree = adjacency.first().map_or(0, BitRow::count_ones);
        assert!(
            adjacency.iter().all(|r| r.count_ones() == degree),
            "orthogonality graph is not regular"
        );
        let index = vertices.iter().enumerate().map(|(i, v)| (v.encoding(), i)).collect();
        OrthoGraph {
            family,
            field,
            d,
            vertices,
            adjacency,
            loops,
            degree,
            index,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Common row sum; loops count once.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn vertices(&self) -> &[FqVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Result<&FqVector> {
        self.vertices.get(i).ok_or(Error::VertexOutOfRange { index: i, n: self.n() })
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.adjacency
    }

    pub fn loops(&self) -> &BitRow {
        &self.loops
    }

    /// Row `i` of the adjacency matrix.
    pub fn neighbors(&self, i: usize) -> Result<&BitRow> {
        self.adjacency.get(i).ok_or(Error::VertexOutOfRange { index: i, n: self.n() })
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].get(j)
    }

    /// Vertex index of a vector, if it is a vertex of this graph.
    pub fn index_of(&self, v: &FqVector) -> Option<usize> {
        if v.dim() != self.d || **v.field() != *self.field {
            return None;
        }
        self.index.get(&v.encoding()).copied()
    }

    /// Size of the contiguous class blocks: `q - 1` affine, 1 projective.
    pub fn block_size(&self) -> usize {
        match self.family {
            Family::Projective => 1,
            Family::Affine => self.q() as usize - 1,
        }
    }

    /// Projective class of vertex `i` under the block ordering.
    pub fn class_of(&self, i: usize) -> usize {
        i / self.block_size()
    }

    /// A copy with every diagonal bit cleared; the loop mask is kept.
    pub fn without_diagonal(&self) -> OrthoGraph {
        let mut g = self.clone();
        for (i, row) in g.adjacency.iter_mut().enumerate() {
            row.clear(i);
        }
        g
    }

    /// Writes the header `family q d n degree` followed by one hex row per line.
    pub fn write_export<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {} {} {}", self.family, self.q(), self.d, self.n(), self.degree)?;
        for row in &self.adjacency {
            writeln!(out, "{}", row.to_hex())?;
        }
        Ok(())
    }
}

/// Header and rows read back from an export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedGraph {
    pub family: Family,
    pub q: u64,
    pub d: usize,
    pub n: usize,
    pub degree: u64,
    pub rows: Vec<BitRow>,
}

pub fn read_export<R: BufRead>(input: R) -> Result<ExportedGraph> {
    let mut lines = input.lines();
    let bad = |m: &str| Error::Parse(format!("graph export: {m}"));
    let header = lines
        .next()
        .ok_or_else(|| bad("missing header"))?
        .map_err(|e| bad(&e.to_string()))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 5 {
        return Err(bad("header must have five fields"));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad("non-numeric header field"));
    let family = parts[0].parse()?;
    let (q, d, n, degree) = (num(parts[1])?, num(parts[2])? as usize, num(parts[3])? as usize, num(parts[4])?);
    let rows = lines
        .map(|l| {
            let l = l.map_err(|e| bad(&e.to_string()))?;
            BitRow::from_hex(&l, n).ok_or_else(|| bad("malformed row"))
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(bad("row count does not match n"));
    }
    Ok(ExportedGraph { family, q, d, n, degree, rows })
}
