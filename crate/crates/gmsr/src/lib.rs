//! Generalized product-matrix minimum-storage-regenerating (MSR) codes over
//! prime fields GF(q).
//!
//! For any `(n, k, d)` with `d >= 2k-2` and `d <= n-1`, a message of
//! `B = k(d-k+1)` field symbols is encoded into `n` shares of
//! `alpha = d-k+1` symbols each.  Any `k` shares reconstruct the message,
//! and a lost share is regenerated exactly from any `d` survivors, each
//! sending a single symbol.
//!
//! ```
//! use gmsr::{derive_params, build_message_matrix, encode, reconstruct, FieldElement};
//!
//! let params = derive_params(10, 2, 4, 11).unwrap();
//! let symbols: Vec<_> = (1..=6).map(|v| FieldElement::new(v, 11)).collect();
//! let mm = build_message_matrix(&params, &symbols).unwrap();
//! let shares = encode(&mm);
//!
//! // Any two shares recover all six message symbols.
//! let got = reconstruct(&params, &[shares[3].clone(), shares[7].clone()]).unwrap();
//! assert_eq!(got, symbols);
//! ```

pub mod codec;
pub mod field;
pub mod message;
pub mod params;
pub mod repair;
pub mod secure;
pub mod store;

pub use codec::{coding_vector, encode, reconstruct, reconstruct_symmetric_pair, CodingVector, Share};
pub use field::{FieldElement, FieldMatrix};
pub use message::{build_message_matrix, extract_symbols, free_positions, Block, MessageMatrix};
pub use params::{derive_params, feasibility_bound, select_points, CodeParams, MatrixType};
pub use repair::{helper_compute, regenerate, repair_vector, RepairPacket, RepairVector};
pub use secure::{
    embed_via_secure, eavesdropper_view, leakage_check, leakage_check_pinned,
    leakage_check_with_layout, secure_build, secure_layout, LeakageReport, SecureLayout,
};

/// Errors shared across the whole library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("operands live in different fields: GF({0}) vs GF({1})")]
    ModulusMismatch(u64, u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field GF({q}) admits only {bound} usable node points, need {needed}")]
    InfeasibleField { q: u64, bound: u64, needed: u64 },
    #[error("wrong symbol count: expected {expected}, got {got}")]
    WrongSymbolCount { expected: usize, got: usize },
    #[error("matrix violates the structural invariants of its type: {0}")]
    MalformedMatrix(String),
    #[error("node index {0} out of range 1..={1}")]
    NodeOutOfRange(usize, usize),
    #[error("shares are mutually inconsistent")]
    InconsistentShares,
    #[error("duplicate node index {0}")]
    DuplicateNode(usize),
    #[error("expected {expected} shares, got {got}")]
    WrongShareCount { expected: usize, got: usize },
    #[error("expected {expected} repair packets, got {got}")]
    WrongPacketCount { expected: usize, got: usize },
    #[error("repeated x^alpha values among collector points")]
    DegeneratePoints,
    #[error("secure layouts require a type I, II or III code (k >= 2)")]
    UnsupportedType,
    #[error("eavesdropper budget invalid: require 0 <= l' <= l < k, got l={l}, lp={lp}, k={k}")]
    BudgetError { l: usize, lp: usize, k: usize },
    #[error("layout leaves no message capacity: R = B = {0}")]
    NoMessageCapacity(u64),
    #[error("enumeration space q^B = {0} exceeds the guard of 10^7")]
    EnumerationTooLarge(u128),
    #[error("byte mode needs q >= 257, got q = {0}")]
    ByteModeNeedsLargeField(u64),
    #[error("symbol {0} out of range for GF({1})")]
    SymbolOutOfRange(u64, u64),
    #[error("share file malformed: {0}")]
    BadShareFile(String),
    #[error("share files disagree on code parameters")]
    HeaderMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

// Run every code sample in the book as a doc-test so the guide cannot
// drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/index.md")]
    mod index {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/repair.md")]
    mod repair {}
    #[doc = include_str!("../../../book/src/secrecy.md")]
    mod secrecy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
