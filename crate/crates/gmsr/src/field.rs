//! Exact arithmetic and dense linear algebra over a prime field GF(q).
//!
//! Scalars are residues modulo a prime `q < 2^31`, so every product fits in
//! a `u64` before reduction.  Matrices are dense, row-major, and immutable
//! from the caller's point of view; all operations are pure functions.

use crate::{Error, Result};

/// A residue class modulo a prime `q`.
///
/// ```
/// use gmsr::FieldElement;
/// let a = FieldElement::new(7, 11);
/// let b = FieldElement::new(5, 11);
/// assert_eq!(a.add(b).unwrap().value(), 1);
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    /// Reduces `value` into `[0, q)`.
    pub fn new(value: u64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2);
        FieldElement { value: value % modulus, modulus }
    }

    pub fn zero(modulus: u64) -> Self {
        FieldElement { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        FieldElement { value: 1 % modulus, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, rhs: Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch(self.modulus, rhs.modulus));
        }
        Ok(())
    }

    pub fn add(self, rhs: Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(FieldElement::new(self.value + rhs.value, self.modulus))
    }

    pub fn sub(self, rhs: Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(FieldElement::new(self.value + self.modulus - rhs.value, self.modulus))
    }

    pub fn mul(self, rhs: Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(FieldElement::new(self.value * rhs.value, self.modulus))
    }

    pub fn neg(self) -> Self {
        FieldElement::new(self.modulus - self.value, self.modulus)
    }

    /// Square-and-multiply exponentiation; `0^0` is defined as `1`.
    pub fn pow(self, exp: u64) -> Self {
        FieldElement::new(mod_pow(self.value, exp, self.modulus), self.modulus)
    }

    /// Multiplicative inverse via Fermat exponentiation.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.modulus));
        }
        Ok(self.pow(self.modulus - 2))
    }
}

pub(crate) fn mod_pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc = 1 % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

pub(crate) fn mod_inv(a: u64, q: u64) -> Result<u64> {
    if a % q == 0 {
        return Err(Error::DivisionByZero(q));
    }
    Ok(mod_pow(a, q - 2, q))
}

/// Dense row-major matrix over GF(q).
///
/// Zero-width and zero-height matrices are legal; they show up as the
/// degenerate blocks of small message matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        FieldMatrix { rows, cols, modulus, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of raw residues (reduced on entry).
    pub fn from_rows(rows: &[Vec<u64>], modulus: u64) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(r.iter().map(|&v| v % modulus));
        }
        Ok(FieldMatrix { rows: nrows, cols: ncols, modulus, entries })
    }

    /// Column vector from a slice of raw residues.
    pub fn column(values: &[u64], modulus: u64) -> Self {
        FieldMatrix {
            rows: values.len(),
            cols: 1,
            modulus,
            entries: values.iter().map(|&v| v % modulus).collect(),
        }
    }

    /// Row vector from a slice of raw residues.
    pub fn row_vector(values: &[u64], modulus: u64) -> Self {
        FieldMatrix {
            rows: 1,
            cols: values.len(),
            modulus,
            entries: values.iter().map(|&v| v % modulus).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c] = v % self.modulus;
    }

    pub fn element(&self, r: usize, c: usize) -> FieldElement {
        FieldElement::new(self.get(r, c), self.modulus)
    }

    pub fn row(&self, r: usize) -> Vec<u64> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn check_field(&self, rhs: &FieldMatrix) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch(self.modulus, rhs.modulus));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a + b) % q)
            .collect();
        Ok(FieldMatrix { rows: self.rows, cols: self.cols, modulus: q, entries })
    }

    pub fn sub(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "sub {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a + q - b) % q)
            .collect();
        Ok(FieldMatrix { rows: self.rows, cols: self.cols, modulus: q, entries })
    }

    pub fn scale(&self, s: u64) -> FieldMatrix {
        let q = self.modulus;
        let s = s % q;
        let entries = self.entries.iter().map(|&a| a * s % q).collect();
        FieldMatrix { rows: self.rows, cols: self.cols, modulus: q, entries }
    }

    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.modulus;
        let mut out = FieldMatrix::zeros(self.rows, rhs.cols, q);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = (out.get(i, j) + a * rhs.get(l, j)) % q;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch("hstack row mismatch".into()));
        }
        let mut out = FieldMatrix::zeros(self.rows, self.cols + rhs.cols, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..rhs.cols {
                out.set(r, self.cols + c, rhs.get(r, c));
            }
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("vstack col mismatch".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&rhs.entries);
        Ok(FieldMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            modulus: self.modulus,
            entries,
        })
    }

    /// Copy of the block with rows in `r0..r1` and columns in `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> FieldMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut out = FieldMatrix::zeros(r1 - r0, c1 - c0, self.modulus);
        for r in r0..r1 {
            for c in c0..c1 {
                out.set(r - r0, c - c0, self.get(r, c));
            }
        }
        out
    }

    /// Solves `self * x = b` by Gaussian elimination with first-nonzero
    /// pivot search.  `self` must be square and nonsingular.
    pub fn solve(&self, b: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_field(b)?;
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("solve needs a square matrix".into()));
        }
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve {}x{} against rhs with {} rows",
                self.rows, self.cols, b.rows
            )));
        }
        let n = self.rows;
        let q = self.modulus;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col) != 0)
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                x.swap_rows(pivot, col);
            }
            let inv = mod_inv(a.get(col, col), q)?;
            a.scale_row(col, inv);
            x.scale_row(col, inv);
            for r in 0..n {
                if r != col {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        a.row_sub_scaled(r, col, factor);
                        x.row_sub_scaled(r, col, factor);
                    }
                }
            }
        }
        Ok(x)
    }

    /// Matrix inverse via elimination against the identity.
    pub fn inverse(&self) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse needs a square matrix".into()));
        }
        self.solve(&FieldMatrix::identity(self.rows, self.modulus))
    }

    fn swap_rows(&mut self, r0: usize, r1: usize) {
        for c in 0..self.cols {
            let t = self.get(r0, c);
            self.set(r0, c, self.get(r1, c));
            self.set(r1, c, t);
        }
    }

    fn scale_row(&mut self, r: usize, s: u64) {
        for c in 0..self.cols {
            let v = self.get(r, c) * s % self.modulus;
            self.set(r, c, v);
        }
    }

    // row r -= factor * row src
    fn row_sub_scaled(&mut self, r: usize, src: usize, factor: u64) {
        let q = self.modulus;
        for c in 0..self.cols {
            let v = (self.get(r, c) + (q - factor * self.get(src, c) % q)) % q;
            self.set(r, c, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(v: u64) -> FieldElement {
        FieldElement::new(v, 11)
    }

    #[test]
    fn add_examples() {
        assert_eq!(fe(0).add(fe(4)).unwrap(), fe(4));
        // 12 mod 11 = 1, by hand
        assert_eq!(fe(7).add(fe(5)).unwrap(), fe(1));
        assert_eq!(fe(10).add(fe(1)).unwrap(), fe(0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(fe(1).mul(fe(9)).unwrap(), fe(9));
        // 80 mod 11 = 3
        assert_eq!(fe(10).mul(fe(8)).unwrap(), fe(3));
        // extended Euclid: 6 = 2^{-1} in GF(11)
        assert_eq!(fe(2).mul(fe(6)).unwrap(), fe(1));
    }

    #[test]
    fn modulus_mismatch_is_an_error() {
        let a = FieldElement::new(1, 11);
        let b = FieldElement::new(1, 13);
        assert_eq!(a.add(b), Err(Error::ModulusMismatch(11, 13)));
        assert_eq!(a.mul(b), Err(Error::ModulusMismatch(11, 13)));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(fe(2).pow(3), fe(8));
        assert_eq!(fe(9).pow(3), fe(3));
        assert_eq!(fe(7).pow(0), fe(1));
        assert_eq!(fe(0).pow(0), fe(1));
    }

    #[test]
    fn pow_agrees_with_repeated_mul() {
        for q in [2u64, 3, 5, 11, 257] {
            for a in 0..q.min(60) {
                let mut acc = FieldElement::one(q);
                for e in 0..=12u64 {
                    assert_eq!(FieldElement::new(a, q).pow(e), acc, "a={a} e={e} q={q}");
                    acc = acc.mul(FieldElement::new(a, q)).unwrap();
                }
            }
        }
    }

    #[test]
    fn inv_examples() {
        assert_eq!(fe(1).inv().unwrap(), fe(1));
        // brute-force scan: 4*3 = 12 = 1 mod 11
        assert_eq!(fe(4).inv().unwrap(), fe(3));
        assert_eq!(fe(0).inv(), Err(Error::DivisionByZero(11)));
    }

    #[test]
    fn inv_times_self_is_one_for_all_nonzero() {
        for q in [2u64, 3, 5, 11, 257] {
            for a in 1..q {
                let x = FieldElement::new(a, q);
                assert_eq!(x.mul(x.inv().unwrap()).unwrap(), FieldElement::one(q));
            }
        }
    }

    #[test]
    fn mat_mul_identity_and_golden_rows() {
        // Golden worked example: the d x alpha message matrix over GF(11).
        let m = FieldMatrix::from_rows(
            &[vec![1, 2, 3], vec![2, 4, 5], vec![3, 5, 0], vec![6, 0, 0]],
            11,
        )
        .unwrap();
        let id = FieldMatrix::identity(4, 11);
        assert_eq!(id.mul(&m).unwrap(), m);

        let rho1 = FieldMatrix::row_vector(&[1, 1, 1, 1], 11);
        assert_eq!(rho1.mul(&m).unwrap(), FieldMatrix::row_vector(&[1, 0, 8], 11));
        let rho10 = FieldMatrix::row_vector(&[1, 10, 1, 10], 11);
        assert_eq!(rho10.mul(&m).unwrap(), FieldMatrix::row_vector(&[7, 3, 9], 11));
    }

    #[test]
    fn mat_mul_dimension_mismatch() {
        let a = FieldMatrix::zeros(2, 3, 11);
        let b = FieldMatrix::zeros(2, 3, 11);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn zero_width_products() {
        // (2x0) * (0x3) = 2x3 zero matrix
        let a = FieldMatrix::zeros(2, 0, 11);
        let b = FieldMatrix::zeros(0, 3, 11);
        assert_eq!(a.mul(&b).unwrap(), FieldMatrix::zeros(2, 3, 11));
    }

    #[test]
    fn solve_golden_systems() {
        let a = FieldMatrix::from_rows(&[vec![1, 1], vec![1, 2]], 11).unwrap();
        let b = FieldMatrix::column(&[8, 2], 11);
        assert_eq!(a.solve(&b).unwrap(), FieldMatrix::column(&[3, 5], 11));

        let id = FieldMatrix::identity(3, 11);
        let rhs = FieldMatrix::column(&[4, 9, 2], 11);
        assert_eq!(id.solve(&rhs).unwrap(), rhs);

        // Vandermonde rows of points 2..5, rhs = repair packets from the
        // worked example; solution is the stacked [W1 phi^t; W2 phi^t].
        let v = FieldMatrix::from_rows(
            &[vec![1, 2, 4, 8], vec![1, 3, 9, 5], vec![1, 4, 5, 9], vec![1, 5, 3, 4]],
            11,
        )
        .unwrap();
        let b = FieldMatrix::column(&[9, 9, 1, 10], 11);
        assert_eq!(v.solve(&b).unwrap(), FieldMatrix::column(&[6, 0, 8, 6], 11));
    }

    #[test]
    fn solve_singular_is_an_error() {
        let a = FieldMatrix::from_rows(&[vec![1, 2], vec![2, 4]], 11).unwrap();
        let b = FieldMatrix::column(&[1, 2], 11);
        assert_eq!(a.solve(&b), Err(Error::SingularMatrix));
    }

    #[test]
    fn inverse_golden_examples() {
        let a = FieldMatrix::from_rows(&[vec![1, 1], vec![1, 2]], 11).unwrap();
        let expect = FieldMatrix::from_rows(&[vec![2, 10], vec![10, 1]], 11).unwrap();
        assert_eq!(a.inverse().unwrap(), expect);

        let v = FieldMatrix::from_rows(
            &[vec![1, 2, 4, 8], vec![1, 3, 9, 5], vec![1, 4, 5, 9], vec![1, 5, 3, 4]],
            11,
        )
        .unwrap();
        let expect = FieldMatrix::from_rows(
            &[vec![10, 2, 4, 7], vec![5, 8, 1, 8], vec![2, 0, 5, 4], vec![9, 6, 5, 2]],
            11,
        )
        .unwrap();
        assert_eq!(v.inverse().unwrap(), expect);

        let id = FieldMatrix::identity(5, 13);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn vandermonde_inverse_roundtrip() {
        for q in [11u64, 13, 257] {
            let pts: Vec<u64> = (1..6).collect();
            let rows: Vec<Vec<u64>> = pts
                .iter()
                .map(|&x| (0..5).map(|e| mod_pow(x, e, q)).collect())
                .collect();
            let a = FieldMatrix::from_rows(&rows, q).unwrap();
            assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), FieldMatrix::identity(5, q));
        }
    }
}
