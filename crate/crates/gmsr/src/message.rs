//! The d x alpha message matrix and its five type-dependent layouts.
//!
//! All five types fit one uniform description.  Rows `0..alpha` form the
//! symmetric block `W1`, whose entries with both coordinates `>= k` are the
//! structural zeros of `O1`.  The remaining `k-1` rows hold the symmetric
//! `T2` in columns `0..k-1` and the zero block `O2` to its right.  A cell
//! below the diagonal of a symmetric block mirrors its transpose position.
//! Message symbols are assigned to free cells in row-major order of first
//! appearance, which reproduces the worked example of the construction.

use crate::field::{FieldElement, FieldMatrix};
use crate::params::CodeParams;
use crate::{Error, Result};

/// Named sub-blocks of the message matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    T1,
    T2,
    U1,
    U2,
    V1,
    V2,
}

/// Classification of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cell {
    /// First appearance of a distinct entry, owned by the named block.
    Free(Block),
    /// Symmetric mirror of the given (row, col).
    Mirror(usize, usize),
    /// Structural zero (O1 or O2).
    Zero,
}

/// Classifies cell `(r, c)` of the d x alpha grid (0-based).
pub(crate) fn classify(params: &CodeParams, r: usize, c: usize) -> Cell {
    let (k, alpha) = (params.k, params.alpha);
    let a = k - 1;
    if r < alpha {
        // W1 region: symmetric alpha x alpha with O1 where both coords >= k.
        if r >= k && c >= k {
            return Cell::Zero;
        }
        if r > c {
            return Cell::Mirror(c, r);
        }
        // r <= c, canonical entry; pick the owning block
        let block = if c < a {
            Block::T1
        } else if c == a {
            if r < a {
                Block::U1
            } else {
                Block::U2
            }
        } else if r < a {
            Block::V1
        } else {
            // r == a; r > a would imply both coords >= k, handled above
            Block::V2
        };
        Cell::Free(block)
    } else {
        // W2 region: [T2 | O2]
        if c >= a {
            return Cell::Zero;
        }
        let t = r - alpha;
        if t > c {
            Cell::Mirror(alpha + c, t)
        } else {
            Cell::Free(Block::T2)
        }
    }
}

/// A free position together with its owning block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreePosition {
    pub row: usize,
    pub col: usize,
    pub block: Block,
}

/// The B first-appearance positions, in the canonical row-major order used
/// by `build_message_matrix` and the secure layout rules.
pub fn free_positions(params: &CodeParams) -> Vec<FreePosition> {
    let mut out = Vec::with_capacity(params.message_len);
    for r in 0..params.d {
        for c in 0..params.alpha {
            if let Cell::Free(block) = classify(params, r, c) {
                out.push(FreePosition { row: r, col: c, block });
            }
        }
    }
    debug_assert_eq!(out.len(), params.message_len);
    out
}

/// The message matrix `M` with its validated structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageMatrix {
    params: CodeParams,
    m: FieldMatrix,
}

impl MessageMatrix {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.m
    }

    /// Wraps an existing grid, checking the structural invariants
    /// (symmetry and zero blocks) of the parameter type.
    pub fn from_matrix(params: &CodeParams, m: FieldMatrix) -> Result<Self> {
        if m.rows() != params.d || m.cols() != params.alpha {
            return Err(Error::MalformedMatrix(format!(
                "expected {}x{}, got {}x{}",
                params.d,
                params.alpha,
                m.rows(),
                m.cols()
            )));
        }
        if m.modulus() != params.q {
            return Err(Error::MalformedMatrix("field mismatch".into()));
        }
        for r in 0..params.d {
            for c in 0..params.alpha {
                match classify(params, r, c) {
                    Cell::Free(_) => {}
                    Cell::Mirror(mr, mc) => {
                        if m.get(r, c) != m.get(mr, mc) {
                            return Err(Error::MalformedMatrix(format!(
                                "asymmetry at ({r},{c})"
                            )));
                        }
                    }
                    Cell::Zero => {
                        if m.get(r, c) != 0 {
                            return Err(Error::MalformedMatrix(format!(
                                "nonzero structural zero at ({r},{c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(MessageMatrix { params: params.clone(), m })
    }

    /// Top alpha x alpha sub-matrix (all of `M` for types IV and V).
    pub fn w1(&self) -> FieldMatrix {
        self.m.submatrix(0, self.params.alpha, 0, self.params.alpha)
    }

    /// Bottom k-1 rows `[T2 | O2]` (empty for types IV and V).
    pub fn w2(&self) -> FieldMatrix {
        self.m.submatrix(self.params.alpha, self.params.d, 0, self.params.alpha)
    }

    /// Copy of a named block, with the degenerate shapes of the type.
    pub fn block(&self, block: Block) -> FieldMatrix {
        let (k, alpha, d) = (self.params.k, self.params.alpha, self.params.d);
        let a = k - 1;
        match block {
            Block::T1 => self.m.submatrix(0, a.min(alpha), 0, a.min(alpha)),
            Block::U1 if a < alpha => self.m.submatrix(0, a, a, k),
            Block::U1 => FieldMatrix::zeros(a, 0, self.params.q),
            Block::U2 if a < alpha => self.m.submatrix(a, k, a, k),
            Block::U2 => FieldMatrix::zeros(0, 0, self.params.q),
            Block::V1 => self.m.submatrix(0, a.min(alpha), k.min(alpha), alpha),
            Block::V2 if a < alpha => self.m.submatrix(a, k, k, alpha),
            Block::V2 => FieldMatrix::zeros(1, 0, self.params.q),
            Block::T2 => self.m.submatrix(alpha, d, 0, a),
        }
    }
}

/// Packs B message symbols into the free cells of `M`, filling symmetric
/// mirrors and structural zeros.
pub fn build_message_matrix(
    params: &CodeParams,
    symbols: &[FieldElement],
) -> Result<MessageMatrix> {
    if symbols.len() != params.message_len {
        return Err(Error::WrongSymbolCount {
            expected: params.message_len,
            got: symbols.len(),
        });
    }
    for s in symbols {
        if s.modulus() != params.q {
            return Err(Error::ModulusMismatch(params.q, s.modulus()));
        }
    }
    let mut m = FieldMatrix::zeros(params.d, params.alpha, params.q);
    let mut next = symbols.iter();
    for r in 0..params.d {
        for c in 0..params.alpha {
            match classify(params, r, c) {
                Cell::Free(_) => m.set(r, c, next.next().unwrap().value()),
                Cell::Mirror(mr, mc) => m.set(r, c, m.get(mr, mc)),
                Cell::Zero => {}
            }
        }
    }
    Ok(MessageMatrix { params: params.clone(), m })
}

/// Inverse of `build_message_matrix`; validates the structural invariants.
pub fn extract_symbols(mm: &MessageMatrix) -> Result<Vec<FieldElement>> {
    // re-validate: the matrix may have been edited through from_matrix
    let checked = MessageMatrix::from_matrix(&mm.params, mm.m.clone())?;
    let out = free_positions(&checked.params)
        .iter()
        .map(|p| checked.m.element(p.row, p.col))
        .collect();
    Ok(out)
}
