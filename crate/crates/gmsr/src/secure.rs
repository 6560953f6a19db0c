//! {l, l'}-secure message matrices and the exhaustive secrecy oracle.
//!
//! An eavesdropper may read the storage of up to `l < k` nodes and the
//! repair downloads of up to `l' <= l` of them.  Replacing
//! `R = l*alpha + (k-l)*l'` carefully chosen entries of the message matrix
//! with uniform random symbols makes the leaked view statistically
//! independent of the remaining `B - R` message symbols.  At desk scale the
//! independence is checked by exhaustive enumeration of exact conditional
//! distributions, so no floating-point tolerance is involved.

use std::collections::BTreeMap;

use crate::codec::{encode, Share};
use crate::field::{FieldElement, FieldMatrix};
use crate::message::{build_message_matrix, free_positions, FreePosition, MessageMatrix};
use crate::params::CodeParams;
use crate::repair::{helper_compute, repair_vector};
use crate::{Error, Result};

/// Which message-matrix entries are sacrificed to randomness for a given
/// eavesdropper budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecureLayout {
    pub params: CodeParams,
    pub l: usize,
    pub lp: usize,
    /// Positions receiving uniform random symbols, in canonical order.
    pub random_positions: Vec<FreePosition>,
    /// Positions carrying message symbols, in canonical order.
    pub message_positions: Vec<FreePosition>,
}

impl SecureLayout {
    /// R, the number of sacrificed symbols.
    pub fn random_count(&self) -> usize {
        self.random_positions.len()
    }

    /// B - R, the message capacity.
    pub fn message_capacity(&self) -> usize {
        self.message_positions.len()
    }
}

fn check_budget(params: &CodeParams, l: usize, lp: usize) -> Result<()> {
    if params.k < 2 {
        return Err(Error::UnsupportedType);
    }
    if l >= params.k || lp > l {
        return Err(Error::BudgetError { l, lp, k: params.k });
    }
    Ok(())
}

/// Splits the canonical free positions into random and message positions:
/// the distinct entries of the first `l` rows of `W1`, the entries of the
/// leading `(l-1) x (l-1)` block of `T2`, and the remaining entries of the
/// first `l'` rows of `T2`.
pub fn secure_layout(params: &CodeParams, l: usize, lp: usize) -> Result<SecureLayout> {
    check_budget(params, l, lp)?;
    let alpha = params.alpha;
    let mut random_positions = Vec::new();
    let mut message_positions = Vec::new();
    for pos in free_positions(params) {
        // canonical positions have row <= col within their symmetric block
        let is_random = if pos.row < alpha {
            pos.row < l
        } else {
            let t = pos.row - alpha;
            (l >= 1 && t < l - 1 && pos.col < l - 1) || t < lp
        };
        if is_random {
            random_positions.push(pos);
        } else {
            message_positions.push(pos);
        }
    }
    let r = l * alpha + (params.k - l) * lp;
    debug_assert_eq!(random_positions.len(), r);
    if message_positions.is_empty() && r > 0 {
        return Err(Error::NoMessageCapacity(r as u64));
    }
    Ok(SecureLayout { params: params.clone(), l, lp, random_positions, message_positions })
}

/// Builds `M^(s)` by merging random and message symbols back into the
/// canonical position order.
pub fn secure_build(
    layout: &SecureLayout,
    random_symbols: &[FieldElement],
    message_symbols: &[FieldElement],
) -> Result<MessageMatrix> {
    if random_symbols.len() != layout.random_positions.len() {
        return Err(Error::WrongSymbolCount {
            expected: layout.random_positions.len(),
            got: random_symbols.len(),
        });
    }
    if message_symbols.len() != layout.message_positions.len() {
        return Err(Error::WrongSymbolCount {
            expected: layout.message_positions.len(),
            got: message_symbols.len(),
        });
    }
    let mut merged = Vec::with_capacity(layout.params.message_len);
    let mut ri = 0;
    let mut mi = 0;
    for pos in free_positions(&layout.params) {
        if ri < layout.random_positions.len() && layout.random_positions[ri] == pos {
            merged.push(random_symbols[ri]);
            ri += 1;
        } else {
            debug_assert_eq!(layout.message_positions[mi], pos);
            merged.push(message_symbols[mi]);
            mi += 1;
        }
    }
    build_message_matrix(&layout.params, &merged)
}

/// Deterministic helper set for a repairing node: the d lowest-indexed
/// survivors.
pub fn default_helpers(params: &CodeParams, failed: usize) -> Vec<usize> {
    (1..=params.n).filter(|&h| h != failed).take(params.d).collect()
}

/// The d packets an observer of node `failed`'s repair sees, for an
/// explicit helper set.
pub fn repair_view(
    params: &CodeParams,
    shares: &[Share],
    failed: usize,
    helpers: &[usize],
) -> Result<Vec<FieldElement>> {
    let phi = repair_vector(params, failed)?;
    helpers
        .iter()
        .map(|&h| Ok(helper_compute(&shares[h - 1], &phi)?.value))
        .collect()
}

/// Everything the eavesdropper sees: stored shares for plain storage
/// nodes, and the full repair download (which contains the share) for
/// repair-observed nodes.  Repair uses the deterministic lowest-index
/// helper set.
pub fn eavesdropper_view(
    params: &CodeParams,
    mm: &MessageMatrix,
    storage_nodes: &[usize],
    repair_nodes: &[usize],
) -> Result<Vec<FieldElement>> {
    for &f in repair_nodes {
        if !storage_nodes.contains(&f) {
            return Err(Error::InvalidParams(format!(
                "repair node {f} is not among the storage nodes"
            )));
        }
    }
    let shares = encode(mm);
    let mut view = Vec::new();
    for &node in storage_nodes {
        if node == 0 || node > params.n {
            return Err(Error::NodeOutOfRange(node, params.n));
        }
        if repair_nodes.contains(&node) {
            let helpers = default_helpers(params, node);
            view.extend(repair_view(params, &shares, node, &helpers)?);
        } else {
            view.extend_from_slice(&shares[node - 1].data);
        }
    }
    Ok(view)
}

/// Outcome of the exhaustive secrecy check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeakageReport {
    /// True iff the eavesdropper's view distribution is identical for
    /// every message value (zero mutual information).
    pub independent: bool,
    /// Worst-case total-variation distance between two conditional view
    /// distributions, as an exact reduced fraction (0/1 when secure).
    pub max_total_variation: (u128, u128),
}

const ENUMERATION_GUARD: u128 = 10_000_000;

fn gcd128(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd128(b, a % b) }
}

/// All subsets of `1..=n` with size in `1..=max`.
fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        if set.len() <= max {
            out.push(set);
        }
    }
    out
}

fn subsets_of(set: &[usize], max: usize) -> Vec<Vec<usize>> {
    let n = set.len();
    let mut out = vec![vec![]];
    for mask in 1u32..(1 << n) {
        let sub: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| set[i]).collect();
        if sub.len() <= max {
            out.push(sub);
        }
    }
    out
}

fn leakage_check_impl(
    layout: &SecureLayout,
    eaves_l: usize,
    eaves_lp: usize,
    pin: Option<u64>,
) -> Result<LeakageReport> {
    let params = &layout.params;
    check_budget(params, eaves_l, eaves_lp)?;
    let q = params.q;
    let b = params.message_len as u32;
    let space = (q as u128).checked_pow(b).filter(|&s| s <= ENUMERATION_GUARD);
    let space = space.ok_or_else(|| {
        Error::EnumerationTooLarge((q as u128).saturating_pow(b))
    })?;
    let _ = space;

    let r = layout.random_positions.len();
    let msg_len = layout.message_positions.len();
    let msg_space: u128 = (q as u128).pow(msg_len as u32);
    let rand_space: u128 = if pin.is_some() { 1 } else { (q as u128).pow(r as u32) };

    // every eavesdropper configuration within budget
    let mut configs: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for storage in subsets_up_to(params.n, eaves_l) {
        for repair in subsets_of(&storage, eaves_lp) {
            configs.push((storage.clone(), repair));
        }
    }

    // distributions[config][message index] = view -> count
    let mut dists: Vec<Vec<BTreeMap<Vec<u64>, u64>>> =
        vec![vec![BTreeMap::new(); msg_space as usize]; configs.len()];

    let mut msg = vec![0u64; msg_len];
    for mi in 0..msg_space {
        let mut rand = vec![pin.unwrap_or(0); r];
        for _ in 0..rand_space {
            let rs: Vec<FieldElement> =
                rand.iter().map(|&v| FieldElement::new(v, q)).collect();
            let ms: Vec<FieldElement> =
                msg.iter().map(|&v| FieldElement::new(v, q)).collect();
            let mm = secure_build(layout, &rs, &ms)?;
            for (ci, (storage, repair)) in configs.iter().enumerate() {
                let view = eavesdropper_view(params, &mm, storage, repair)?;
                let key: Vec<u64> = view.iter().map(|v| v.value()).collect();
                *dists[ci][mi as usize].entry(key).or_insert(0) += 1;
            }
            if pin.is_none() {
                increment(&mut rand, q);
            }
        }
        increment(&mut msg, q);
    }

    // compare conditional distributions pairwise, exactly
    let mut independent = true;
    let mut max_num: u128 = 0;
    let den: u128 = 2 * rand_space;
    for per_msg in &dists {
        for i in 0..per_msg.len() {
            for j in (i + 1)..per_msg.len() {
                let num = l1_distance(&per_msg[i], &per_msg[j]);
                if num > 0 {
                    independent = false;
                    max_num = max_num.max(num);
                }
            }
        }
    }
    let g = gcd128(max_num, den).max(1);
    Ok(LeakageReport { independent, max_total_variation: (max_num / g, den / g) })
}

fn increment(digits: &mut [u64], q: u64) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < q {
            return;
        }
        *d = 0;
    }
}

fn l1_distance(a: &BTreeMap<Vec<u64>, u64>, b: &BTreeMap<Vec<u64>, u64>) -> u128 {
    let mut total: u128 = 0;
    for (k, &va) in a {
        let vb = b.get(k).copied().unwrap_or(0);
        total += va.abs_diff(vb) as u128;
    }
    for (k, &vb) in b {
        if !a.contains_key(k) {
            total += vb as u128;
        }
    }
    total
}

/// Exhaustive secrecy oracle for the layout of `(l, l')`, checked against
/// eavesdroppers within the same budget.
pub fn leakage_check(params: &CodeParams, l: usize, lp: usize) -> Result<LeakageReport> {
    let layout = secure_layout(params, l, lp)?;
    leakage_check_impl(&layout, l, lp, None)
}

/// Same check with an explicit layout and eavesdropper budget; used to
/// demonstrate leakage when the layout is weaker than the adversary.
pub fn leakage_check_with_layout(
    layout: &SecureLayout,
    eaves_l: usize,
    eaves_lp: usize,
) -> Result<LeakageReport> {
    leakage_check_impl(layout, eaves_l, eaves_lp, None)
}

/// The negative control: random symbols pinned to a constant, so the view
/// becomes a deterministic function of the message.
pub fn leakage_check_pinned(
    params: &CodeParams,
    l: usize,
    lp: usize,
    constant: u64,
) -> Result<LeakageReport> {
    let layout = secure_layout(params, l, lp)?;
    leakage_check_impl(&layout, l, lp, Some(constant))
}

/// Builds the `(2*alpha) x alpha` message matrix `[S1; S2]` of the
/// underlying product-matrix MSR code with `k_hat = alpha + 1`,
/// `d_hat = 2*alpha`, placing the B message symbols per the
/// `{l = k, l' = 0}` embedding and zeros elsewhere.
pub fn embed_via_secure(params: &CodeParams, symbols: &[FieldElement]) -> Result<FieldMatrix> {
    if symbols.len() != params.message_len {
        return Err(Error::WrongSymbolCount {
            expected: params.message_len,
            got: symbols.len(),
        });
    }
    let (k, alpha, q) = (params.k, params.alpha, params.q);
    let mut s1 = FieldMatrix::zeros(alpha, alpha, q);
    let mut s2 = FieldMatrix::zeros(alpha, alpha, q);
    let mut next = symbols.iter();
    // distinct entries of the first k rows of symmetric S1, row-major
    for r in 0..k.min(alpha) {
        for c in r..alpha {
            let v = next.next().expect("count fixed by B").value();
            s1.set(r, c, v);
            s1.set(c, r, v);
        }
    }
    // distinct entries of the leading (k-1) x (k-1) block of symmetric S2
    for r in 0..(k - 1).min(alpha) {
        for c in r..(k - 1).min(alpha) {
            let v = next.next().expect("count fixed by B").value();
            s2.set(r, c, v);
            s2.set(c, r, v);
        }
    }
    debug_assert!(next.next().is_none());
    s1.vstack(&s2)
}
