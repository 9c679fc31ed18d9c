//! Exact verification of the square identities of the orthogonality graphs and
//! their closed-form spectra.
//!
//! For a projective graph with adjacency `A`,
//! `A A^T = mu J + (deg - mu) I` with `mu = (q^(d-2) - 1)/(q - 1)`.
//! For the affine graph `V`, in block order,
//! `V V^T = rho J + (D - rho) (J_{q-1} (+) ... (+) J_{q-1})` with `rho = q^(d-2) - 1`.
//!
//! Both are checked entry by entry in integers. Since the adjacency rows are
//! 0/1 vectors, `(A A^T)_{ij}` is the popcount of `row_i & row_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{closed_form_degree, closed_form_n, Family, OrthoGraph};

/// Largest vertex count accepted by the identity checks.
pub const DEFAULT_MATRIX_BOUND: usize = 8192;

/// At most this many violating entries are kept in a report.
pub const MAX_REPORTED_VIOLATIONS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub pass: bool,
    pub n: usize,
    pub degree: u64,
    pub mu_or_rho: u64,
    pub second_squared: u64,
    /// The lowest violating entries in row-major order.
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub violation_count: u64,
    #[serde(skip)]
    pub symmetric: bool,
}

/// Closed-form spectral data for one graph family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub family: Family,
    pub n: u128,
    pub degree: u128,
    /// Every eigenvalue other than `degree` has absolute value `second` (or 0
    /// when `zero_allowed`). Exact as a square; `second_exact` is set when the
    /// square root is an integer.
    pub second_squared: u128,
    pub second_exact: Option<u128>,
    pub second: f64,
    pub mu_or_rho: u128,
    pub zero_allowed: bool,
}

fn isqrt(x: u128) -> u128 {
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// `mu` for the projective family, `rho` for the affine family.
pub fn codegree(family: Family, q: u64, d: u32) -> u128 {
    closed_form_degree(family, q, d - 1)
}

pub fn predicted_spectrum(q: u64, d: u32, family: Family) -> Result<SpectralProfile> {
    if d < 2 || crate::graph::prime_power(q).is_none() {
        return Err(Error::InvalidParameters(format!("no orthogonality graph for q = {q}, d = {d}")));
    }
    let q128 = q as u128;
    let base = q128.pow(d - 2);
    let second_squared = match family {
        Family::Projective => base,
        Family::Affine => (q128 - 1) * (q128 - 1) * base,
    };
    let root = isqrt(second_squared);
    Ok(SpectralProfile {
        family,
        n: closed_form_n(family, q, d),
        degree: closed_form_degree(family, q, d),
        second_squared,
        second_exact: (root * root == second_squared).then_some(root),
        second: (second_squared as f64).sqrt(),
        mu_or_rho: codegree(family, q, d),
        zero_allowed: family == Family::Affine,
    })
}

pub fn verify_projective_square_identity(graph: &OrthoGraph) -> Result<IdentityReport> {
    if graph.family() != Family::Projective {
        return Err(Error::WrongFamily { expected: "projective" });
    }
    verify_square_identity(graph)
}

pub fn verify_affine_square_identity(graph: &OrthoGraph) -> Result<IdentityReport> {
    if graph.family() != Family::Affine {
        return Err(Error::WrongFamily { expected: "affine" });
    }
    verify_square_identity(graph)
}

/// Checks whichever identity matches the graph's family.
pub fn verify_square_identity(graph: &OrthoGraph) -> Result<IdentityReport> {
    let n = graph.n();
    if n > DEFAULT_MATRIX_BOUND {
        return Err(Error::GraphTooLarge { n: n as u128, bound: DEFAULT_MATRIX_BOUND });
    }
    let (q, d) = (graph.q(), graph.d() as u32);
    let family = graph.family();
    let degree = closed_form_degree(family, q, d) as u64;
    let codeg = codegree(family, q, d) as u64;
    let block = graph.block_size();
    let profile = predicted_spectrum(q, d, family)?;
    let rows = graph.rows();

    let expected = |i: usize, j: usize| -> u64 {
        match family {
            Family::Projective if i == j => degree,
            Family::Projective => codeg,
            Family::Affine if i / block == j / block => degree,
            Family::Affine => codeg,
        }
    };

    let per_row: Vec<(u64, Vec<Violation>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut count = 0u64;
            let mut found = Vec::new();
            for j in 0..n {
                let actual = rows[i].and_count(&rows[j]);
                let want = expected(i, j);
                if actual != want {
                    count += 1;
                    if found.len() < MAX_REPORTED_VIOLATIONS {
                        found.push(Violation { row: i, col: j, expected: want, actual });
                    }
                }
            }
            (count, found)
        })
        .collect();

    let violation_count = per_row.iter().map(|(c, _)| c).sum();
    let violations: Vec<Violation> = per_row
        .into_iter()
        .flat_map(|(_, v)| v)
        .take(MAX_REPORTED_VIOLATIONS)
        .collect();
    let symmetric = (0..n).all(|i| (i + 1..n).all(|j| graph.adjacent(i, j) == graph.adjacent(j, i)));

    Ok(IdentityReport {
        pass: violation_count == 0 && symmetric && graph.degree() == degree,
        n,
        degree,
        mu_or_rho: codeg,
        second_squared: profile.second_squared as u64,
        violations,
        violation_count,
        symmetric,
    })
}

/// Number of ones on the diagonal of the adjacency matrix.
pub fn adjacency_trace(graph: &OrthoGraph) -> u64 {
    (0..graph.n()).filter(|&i| graph.adjacent(i, i)).count() as u64
}

/// `trace(A A^T)`, the sum of squared row norms.
pub fn gram_trace(graph: &OrthoGraph) -> u64 {
    graph.rows().iter().map(|r| r.and_count(r)).sum()
}
