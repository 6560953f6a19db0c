//! Parameter validation and node-point selection.
//!
//! A code is described by `(n, k, d, q)` with `d >= 2k-2`, `d <= n-1` and
//! `q` prime.  The derived quantities are `alpha = d-k+1`, `B = k*alpha`,
//! the message-matrix type, and the `n` public node points whose
//! `alpha`-th powers are pairwise distinct.

use crate::field::{mod_pow, FieldElement};
use crate::{Error, Result};

/// Shape of the message matrix, determined by `(k, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixType {
    /// k >= 2, d = 2k-2
    I,
    /// k >= 2, d = 2k-1
    II,
    /// k >= 2, d >= 2k
    III,
    /// k = 1, d = 1
    IV,
    /// k = 1, d >= 2
    V,
}

impl std::fmt::Display for MatrixType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MatrixType::I => "I",
            MatrixType::II => "II",
            MatrixType::III => "III",
            MatrixType::IV => "IV",
            MatrixType::V => "V",
        };
        f.write_str(s)
    }
}

/// Validated code parameters with derived quantities and node points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: u64,
    pub alpha: usize,
    pub message_len: usize,
    pub matrix_type: MatrixType,
    /// `points[i]` is the public symbol of node `i+1`; nonzero, distinct,
    /// with pairwise distinct alpha-th powers.
    pub points: Vec<FieldElement>,
}

impl CodeParams {
    /// Point of node `node` (1-based index).
    pub fn point(&self, node: usize) -> Result<FieldElement> {
        if node == 0 || node > self.n {
            return Err(Error::NodeOutOfRange(node, self.n));
        }
        Ok(self.points[node - 1])
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut f = 3;
    while f * f <= q {
        if q % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Exact count of distinct `alpha`-th powers of nonzero elements of GF(q):
/// `(q-1) / gcd(alpha, q-1)`, since the multiplicative group is cyclic.
pub fn feasibility_bound(q: u64, alpha: usize) -> u64 {
    (q - 1) / gcd(alpha as u64, q - 1)
}

/// The `n` smallest nonzero elements whose `alpha`-th powers are pairwise
/// distinct, found by a greedy scan over `1..q`.  Deterministic.
pub fn select_points(q: u64, n: usize, alpha: usize) -> Result<Vec<FieldElement>> {
    let mut points = Vec::with_capacity(n);
    let mut powers = Vec::with_capacity(n);
    for x in 1..q {
        let p = mod_pow(x, alpha as u64, q);
        if !powers.contains(&p) {
            points.push(FieldElement::new(x, q));
            powers.push(p);
            if points.len() == n {
                return Ok(points);
            }
        }
    }
    Err(Error::InfeasibleField { q, bound: feasibility_bound(q, alpha), needed: n as u64 })
}

/// Validates `(n, k, d, q)` and derives the remaining parameters.
pub fn derive_params(n: usize, k: usize, d: usize, q: u64) -> Result<CodeParams> {
    if !is_prime(q) {
        return Err(Error::InvalidParams(format!("q = {q} is not prime")));
    }
    if k < 1 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    if d < 1 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    if d + 2 < 2 * k {
        return Err(Error::InvalidParams(format!("d >= 2k-2 violated: d={d}, k={k}")));
    }
    if d + 1 > n {
        return Err(Error::InvalidParams(format!("d <= n-1 violated: d={d}, n={n}")));
    }
    let alpha = d - k + 1;
    let matrix_type = match (k, d) {
        (1, 1) => MatrixType::IV,
        (1, _) => MatrixType::V,
        _ if d == 2 * k - 2 => MatrixType::I,
        _ if d == 2 * k - 1 => MatrixType::II,
        _ => MatrixType::III,
    };
    let points = select_points(q, n, alpha)?;
    Ok(CodeParams { n, k, d, q, alpha, message_len: k * alpha, matrix_type, points })
}
