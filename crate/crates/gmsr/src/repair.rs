//! Exact regeneration of a failed node's share.
//!
//! Every helper sends a single symbol, the inner product of its share with
//! the failed node's repair vector.  The d packets form a Vandermonde
//! system whose solution is `M * phi_f^t`; the share then falls out of the
//! symmetry of `W1` and `T2` (types I-III) or of the whole matrix
//! (types IV and V, where `phi = rho`).

use crate::codec::{coding_vector, Share};
use crate::field::{FieldElement, FieldMatrix};
use crate::params::{CodeParams, MatrixType};
use crate::{Error, Result};

/// The sub-vector of the failed node's coding vector that helpers project
/// their shares onto.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairVector {
    /// 1-based index of the failed node.
    pub failed: usize,
    pub entries: Vec<FieldElement>,
}

/// One helper's contribution: a single field symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairPacket {
    /// 1-based index of the helper node.
    pub helper: usize,
    pub value: FieldElement,
}

/// Repair vector `phi_f` of the failed node, per type:
/// I: `omega`; II: `[omega, x^(k-1)]`; III: `[omega, x^(k-1), x^k*theta]`;
/// IV: `[1]`; V: the full coding vector `rho`.
pub fn repair_vector(params: &CodeParams, failed: usize) -> Result<RepairVector> {
    let cv = coding_vector(params, failed)?;
    let x = params.point(failed)?;
    let k = params.k;
    let entries = match params.matrix_type {
        MatrixType::I => cv.omega,
        MatrixType::II => {
            let mut e = cv.omega;
            e.push(x.pow(k as u64 - 1));
            e
        }
        MatrixType::III => {
            let mut e = cv.omega;
            e.push(x.pow(k as u64 - 1));
            e.extend(cv.theta.iter().map(|t| t.mul(x.pow(k as u64)).unwrap()));
            e
        }
        MatrixType::IV | MatrixType::V => cv.rho,
    };
    Ok(RepairVector { failed, entries })
}

/// The one symbol a helper computes and sends: `c_h . phi_f`.
pub fn helper_compute(share: &Share, phi: &RepairVector) -> Result<RepairPacket> {
    if share.data.len() != phi.entries.len() {
        return Err(Error::DimensionMismatch(format!(
            "share has {} symbols, repair vector {}",
            share.data.len(),
            phi.entries.len()
        )));
    }
    let mut acc = FieldElement::zero(share.x.modulus());
    for (c, p) in share.data.iter().zip(&phi.entries) {
        acc = acc.add(c.mul(*p)?)?;
    }
    Ok(RepairPacket { helper: share.node, value: acc })
}

/// Regenerates the failed node's share from exactly d packets.
pub fn regenerate(
    params: &CodeParams,
    failed: usize,
    packets: &[RepairPacket],
) -> Result<Share> {
    let x_f = params.point(failed)?;
    if packets.len() != params.d {
        return Err(Error::WrongPacketCount { expected: params.d, got: packets.len() });
    }
    for (i, p) in packets.iter().enumerate() {
        if p.helper == 0 || p.helper > params.n {
            return Err(Error::NodeOutOfRange(p.helper, params.n));
        }
        if p.helper == failed {
            return Err(Error::InvalidParams(format!(
                "helper {} is the failed node",
                p.helper
            )));
        }
        for t in &packets[..i] {
            if t.helper == p.helper {
                return Err(Error::DuplicateNode(p.helper));
            }
        }
    }
    let q = params.q;
    let rho_rows: Vec<Vec<u64>> = packets
        .iter()
        .map(|p| {
            let x = params.points[p.helper - 1];
            (0..params.d).map(|e| x.pow(e as u64).value()).collect()
        })
        .collect();
    let vand = FieldMatrix::from_rows(&rho_rows, q)?;
    let rhs =
        FieldMatrix::column(&packets.iter().map(|p| p.value.value()).collect::<Vec<_>>(), q);
    // y = M * phi_f^t
    let y = vand.solve(&rhs)?;

    let (k, alpha) = (params.k, params.alpha);
    let data: Vec<FieldElement> = match params.matrix_type {
        MatrixType::IV | MatrixType::V => {
            // M symmetric: share = (M rho^t)^t
            (0..alpha).map(|j| y.element(j, 0)).collect()
        }
        _ => {
            // share = (W1 phi^t)^t + x^alpha * [(W2 phi^t)^t, 0]
            let xa = x_f.pow(alpha as u64);
            (0..alpha)
                .map(|j| {
                    let w1 = y.element(j, 0);
                    if j < k - 1 {
                        w1.add(xa.mul(y.element(alpha + j, 0)).unwrap()).unwrap()
                    } else {
                        w1
                    }
                })
                .collect()
        }
    };
    Ok(Share { node: failed, x: x_f, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode;
    use crate::message::build_message_matrix;
    use crate::params::derive_params;

    fn fe_list(vals: &[u64], q: u64) -> Vec<FieldElement> {
        vals.iter().map(|&v| FieldElement::new(v, q)).collect()
    }

    #[test]
    fn repair_vector_examples() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let phi = repair_vector(&p, 1).unwrap();
        assert_eq!(phi.entries, fe_list(&[1, 1, 1], 11));

        let p = derive_params(4, 2, 2, 5).unwrap();
        let phi = repair_vector(&p, 3).unwrap();
        assert_eq!(phi.entries, fe_list(&[1], 5)); // omega only, length k-1

        let p = derive_params(4, 1, 3, 11).unwrap();
        let phi = repair_vector(&p, 2).unwrap();
        assert_eq!(phi.entries, fe_list(&[1, 2, 4], 11)); // rho
    }

    #[test]
    fn helper_compute_golden_packets() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[1, 2, 3, 4, 5, 6], 11)).unwrap();
        let shares = encode(&mm);
        let phi = repair_vector(&p, 1).unwrap();
        let packets: Vec<u64> = (2..=5)
            .map(|h| helper_compute(&shares[h - 1], &phi).unwrap().value.value())
            .collect();
        assert_eq!(packets, vec![9, 9, 1, 10]);

        let zero_phi = RepairVector { failed: 1, entries: fe_list(&[0, 0, 0], 11) };
        assert!(helper_compute(&shares[3], &zero_phi).unwrap().value.is_zero());
    }

    #[test]
    fn regenerate_golden_example() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[1, 2, 3, 4, 5, 6], 11)).unwrap();
        let shares = encode(&mm);
        let phi = repair_vector(&p, 1).unwrap();
        let packets: Vec<RepairPacket> =
            (2..=5).map(|h| helper_compute(&shares[h - 1], &phi).unwrap()).collect();
        let got = regenerate(&p, 1, &packets).unwrap();
        assert_eq!(got.data, fe_list(&[1, 0, 8], 11));
        assert_eq!(got, shares[0]);
    }

    #[test]
    fn regenerate_zero_message() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[0; 6], 11)).unwrap();
        let shares = encode(&mm);
        let phi = repair_vector(&p, 7).unwrap();
        let packets: Vec<RepairPacket> = [1, 2, 3, 4]
            .iter()
            .map(|&h| helper_compute(&shares[h - 1], &phi).unwrap())
            .collect();
        let got = regenerate(&p, 7, &packets).unwrap();
        assert!(got.data.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn regenerate_input_validation() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[1, 2, 3, 4, 5, 6], 11)).unwrap();
        let shares = encode(&mm);
        let phi = repair_vector(&p, 1).unwrap();
        let packets: Vec<RepairPacket> =
            (2..=5).map(|h| helper_compute(&shares[h - 1], &phi).unwrap()).collect();

        assert_eq!(
            regenerate(&p, 1, &packets[..3]),
            Err(Error::WrongPacketCount { expected: 4, got: 3 })
        );
        let mut dup = packets.clone();
        dup[1] = dup[0];
        assert_eq!(regenerate(&p, 1, &dup), Err(Error::DuplicateNode(2)));
        let mut own = packets.clone();
        own[0].helper = 1;
        assert!(matches!(regenerate(&p, 1, &own), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn repair_is_helper_order_independent() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[3, 1, 4, 1, 5, 9], 11)).unwrap();
        let shares = encode(&mm);
        let phi = repair_vector(&p, 6).unwrap();
        let mut packets: Vec<RepairPacket> = [9, 2, 10, 4]
            .iter()
            .map(|&h| helper_compute(&shares[h - 1], &phi).unwrap())
            .collect();
        let a = regenerate(&p, 6, &packets).unwrap();
        packets.reverse();
        let b = regenerate(&p, 6, &packets).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, shares[5]);
    }

    #[test]
    fn symmetry_lemmas_hold_structurally() {
        // (W1 phi^t)^t = phi W1 and W2 phi^t = T2 omega_f^t on random matrices
        let p = derive_params(8, 3, 6, 41).unwrap();
        let msg: Vec<FieldElement> =
            (0..p.message_len as u64).map(|v| FieldElement::new(3 * v + 1, 41)).collect();
        let mm = build_message_matrix(&p, &msg).unwrap();
        let w1 = mm.w1();
        let w2 = mm.w2();
        for f in 1..=p.n {
            let phi = repair_vector(&p, f).unwrap();
            let phi_row = FieldMatrix::row_vector(
                &phi.entries.iter().map(|e| e.value()).collect::<Vec<_>>(),
                41,
            );
            let left = w1.mul(&phi_row.transpose()).unwrap().transpose();
            let right = phi_row.mul(&w1).unwrap();
            assert_eq!(left, right);

            let cv = coding_vector(&p, f).unwrap();
            let omega_col = FieldMatrix::column(
                &cv.omega.iter().map(|e| e.value()).collect::<Vec<_>>(),
                41,
            );
            let t2 = mm.block(crate::message::Block::T2);
            assert_eq!(
                w2.mul(&phi_row.transpose()).unwrap(),
                t2.mul(&omega_col).unwrap()
            );
        }
    }
}
