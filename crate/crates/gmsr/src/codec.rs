//! Encoding and reconstruction.
//!
//! Node `i` stores the share `c_i = rho_i * M`, where `rho_i` is the
//! geometric coding vector of the node point.  Any `k` shares determine the
//! message: types IV and V read it off a single share, type III runs the
//! three-step elimination over the collector's Vandermonde blocks, type II
//! skips the first step, and type I reduces directly to the symmetric-pair
//! system solved by `reconstruct_symmetric_pair`.

use crate::field::{mod_inv, FieldElement, FieldMatrix};
use crate::message::{extract_symbols, MessageMatrix};
use crate::params::{CodeParams, MatrixType};
use crate::{Error, Result};

/// The coding vector of a node, with its type-dependent sub-vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingVector {
    /// `[1, x, ..., x^(d-1)]`
    pub rho: Vec<FieldElement>,
    /// `[1, x, ..., x^(k-2)]` (empty for k = 1)
    pub omega: Vec<FieldElement>,
    /// `[1, x, ..., x^(alpha-k-1)]` (empty for types I, II, IV)
    pub theta: Vec<FieldElement>,
}

/// Coding vector of node `node` (1-based).
pub fn coding_vector(params: &CodeParams, node: usize) -> Result<CodingVector> {
    let x = params.point(node)?;
    let rho = (0..params.d).map(|e| x.pow(e as u64)).collect();
    let omega = (0..params.k - 1).map(|e| x.pow(e as u64)).collect();
    let theta_len = params.alpha.saturating_sub(params.k);
    let theta = (0..theta_len).map(|e| x.pow(e as u64)).collect();
    Ok(CodingVector { rho, omega, theta })
}

/// One node's stored data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    /// 1-based node index.
    pub node: usize,
    /// The node's public point.
    pub x: FieldElement,
    /// The alpha stored symbols `rho_i * M`.
    pub data: Vec<FieldElement>,
}

/// Encodes the message matrix into all n shares.
pub fn encode(mm: &MessageMatrix) -> Vec<Share> {
    let params = mm.params();
    (1..=params.n)
        .map(|node| {
            let x = params.points[node - 1];
            let rho: Vec<u64> = (0..params.d).map(|e| x.pow(e as u64).value()).collect();
            let row = FieldMatrix::row_vector(&rho, params.q)
                .mul(mm.matrix())
                .expect("share product dimensions are fixed by construction");
            let data = (0..params.alpha).map(|c| row.element(0, c)).collect();
            Share { node, x, data }
        })
        .collect()
}

/// Recovers the symmetric pair (T1, T2) from the system
/// `rhs = Omega*T1 + Lambda*Omega*T2` with `Omega` the k x (k-1) stack of
/// omega rows and `Lambda = diag(lambdas)`.
///
/// Projects onto `P = rhs * Omega^t`, splits each off-diagonal entry pair
/// into the T1 and T2 contributions via a 2x2 solve (solvable because the
/// lambdas are distinct), then peels each matrix out of two Vandermonde
/// solves.  The spare k-th projection row is used as a consistency check.
pub fn reconstruct_symmetric_pair(
    omega: &FieldMatrix,
    lambdas: &[FieldElement],
    rhs: &FieldMatrix,
) -> Result<(FieldMatrix, FieldMatrix)> {
    let k = omega.rows();
    let a = k - 1;
    let q = omega.modulus();
    if lambdas.len() != k || rhs.rows() != k || rhs.cols() != a || omega.cols() != a {
        return Err(Error::DimensionMismatch("symmetric-pair system shape".into()));
    }
    for i in 0..k {
        for j in 0..i {
            if lambdas[i] == lambdas[j] {
                return Err(Error::DegeneratePoints);
            }
        }
    }

    // P_ij = omega_i T1 omega_j^t + lambda_i * omega_i T2 omega_j^t
    let p = rhs.mul(&omega.transpose())?;
    let mut amat = FieldMatrix::zeros(k, k, q);
    let mut bmat = FieldMatrix::zeros(k, k, q);
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let li = lambdas[i].value();
            let lj = lambdas[j].value();
            // P_ij = A_ij + li*B_ij,  P_ji = A_ij + lj*B_ij
            let diff = (li + q - lj) % q;
            let inv = mod_inv(diff, q)?;
            let b = (p.get(i, j) + q - p.get(j, i)) % q * inv % q;
            let a_val = (p.get(i, j) + q - li * b % q) % q;
            amat.set(i, j, a_val);
            bmat.set(i, j, b);
        }
    }

    let recover = |proj: &FieldMatrix| -> Result<FieldMatrix> {
        // y_i = T * omega_i^t, from the k-1 projections against the others
        let mut ys = Vec::with_capacity(k);
        for i in 0..k {
            let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
            let sub_rows: Vec<Vec<u64>> = others.iter().map(|&j| omega.row(j)).collect();
            let sub = FieldMatrix::from_rows(&sub_rows, q)?;
            let col: Vec<u64> = others.iter().map(|&j| proj.get(i, j)).collect();
            ys.push(sub.solve(&FieldMatrix::column(&col, q))?);
        }
        // stack the first k-1 rows omega_i T = y_i^t and solve for T
        let head_rows: Vec<Vec<u64>> = (0..a).map(|i| omega.row(i)).collect();
        let head = FieldMatrix::from_rows(&head_rows, q)?;
        let y_rows: Vec<Vec<u64>> = (0..a).map(|i| (0..a).map(|r| ys[i].get(r, 0)).collect()).collect();
        let t = head.solve(&FieldMatrix::from_rows(&y_rows, q)?)?;
        // spare row consistency + symmetry
        let last = FieldMatrix::row_vector(&omega.row(a), q).mul(&t)?;
        for r in 0..a {
            if last.get(0, r) != ys[a].get(r, 0) {
                return Err(Error::InconsistentShares);
            }
        }
        if t != t.transpose() {
            return Err(Error::InconsistentShares);
        }
        Ok(t)
    };

    Ok((recover(&amat)?, recover(&bmat)?))
}

fn check_shares(params: &CodeParams, shares: &[Share]) -> Result<()> {
    if shares.len() != params.k {
        return Err(Error::WrongShareCount { expected: params.k, got: shares.len() });
    }
    for (i, s) in shares.iter().enumerate() {
        if s.node == 0 || s.node > params.n {
            return Err(Error::NodeOutOfRange(s.node, params.n));
        }
        if s.data.len() != params.alpha {
            return Err(Error::DimensionMismatch(format!(
                "share of node {} has {} symbols, expected {}",
                s.node,
                s.data.len(),
                params.alpha
            )));
        }
        for t in &shares[..i] {
            if t.node == s.node {
                return Err(Error::DuplicateNode(s.node));
            }
        }
    }
    Ok(())
}

/// Reconstructs the B message symbols from exactly k shares.
pub fn reconstruct(params: &CodeParams, shares: &[Share]) -> Result<Vec<FieldElement>> {
    check_shares(params, shares)?;
    let q = params.q;
    match params.matrix_type {
        MatrixType::IV => Ok(vec![shares[0].data[0]]),
        MatrixType::V => {
            // V2 = [c_2..c_alpha], U2 = c_1 - x * theta * V2^t
            let s = &shares[0];
            let x = params.point(s.node)?;
            let mut dot = FieldElement::zero(q);
            for (j, &v) in s.data[1..].iter().enumerate() {
                dot = dot.add(x.pow(j as u64 + 1).mul(v)?)?;
            }
            let u2 = s.data[0].sub(dot)?;
            let mut out = vec![u2];
            out.extend_from_slice(&s.data[1..]);
            Ok(out)
        }
        _ => reconstruct_k_ge_2(params, shares),
    }
}

fn reconstruct_k_ge_2(params: &CodeParams, shares: &[Share]) -> Result<Vec<FieldElement>> {
    let (k, alpha, q) = (params.k, params.alpha, params.q);
    let a = k - 1;
    let points: Vec<FieldElement> =
        shares.iter().map(|s| params.point(s.node)).collect::<Result<_>>()?;
    let lambdas: Vec<FieldElement> = points.iter().map(|x| x.pow(alpha as u64)).collect();

    let omega_rows: Vec<Vec<u64>> = points
        .iter()
        .map(|x| (0..a).map(|e| x.pow(e as u64).value()).collect())
        .collect();
    let omega = FieldMatrix::from_rows(&omega_rows, q)?;
    let xdc = FieldMatrix::column(
        &points.iter().map(|x| x.pow(a as u64).value()).collect::<Vec<_>>(),
        q,
    );
    // Theta_DC row i = x^k * theta_i (k x (alpha-k); empty for types I, II)
    let theta_rows: Vec<Vec<u64>> = points
        .iter()
        .map(|x| {
            (0..alpha.saturating_sub(k)).map(|e| x.pow((k + e) as u64).value()).collect()
        })
        .collect();
    let theta = FieldMatrix::from_rows(&theta_rows, q)?;

    let share_rows: Vec<Vec<u64>> =
        shares.iter().map(|s| s.data.iter().map(|v| v.value()).collect()).collect();
    let c = FieldMatrix::from_rows(&share_rows, q)?;

    let (t1, t2, u1, u2, v1, v2);
    if params.matrix_type == MatrixType::I {
        // the shares already form the symmetric-pair system
        let (x, y) = reconstruct_symmetric_pair(&omega, &lambdas, &c)?;
        t1 = x;
        t2 = y;
        u1 = FieldMatrix::zeros(a, 0, q);
        u2 = FieldMatrix::zeros(0, 0, q);
        v1 = FieldMatrix::zeros(a, 0, q);
        v2 = FieldMatrix::zeros(1, 0, q);
    } else {
        let g = omega.hstack(&xdc)?; // nonsingular k x k Vandermonde

        // Step 1 (type III only; empty for type II): V1, V2
        let vv = g.solve(&c.submatrix(0, k, k, alpha))?;
        v1 = vv.submatrix(0, a, 0, alpha - k);
        v2 = vv.submatrix(a, k, 0, alpha - k);

        // Step 2: U1, U2 from column k-1 after removing the V2 contribution
        let rhs2 = c.submatrix(0, k, a, k).sub(&theta.mul(&v2.transpose())?)?;
        let uu = g.solve(&rhs2)?;
        u1 = uu.submatrix(0, a, 0, 1);
        u2 = uu.submatrix(a, k, 0, 1);

        // Step 3: symmetric pair for T1, T2
        let lhs = c
            .submatrix(0, k, 0, a)
            .sub(&xdc.hstack(&theta)?.mul(&u1.transpose().vstack(&v1.transpose())?)?)?;
        let (x, y) = reconstruct_symmetric_pair(&omega, &lambdas, &lhs)?;
        t1 = x;
        t2 = y;
    }

    let m = assemble(params, &t1, &t2, &u1, &u2, &v1, &v2);
    extract_symbols(&MessageMatrix::from_matrix(params, m)?)
}

/// Rebuilds the full d x alpha grid from recovered blocks.
fn assemble(
    params: &CodeParams,
    t1: &FieldMatrix,
    t2: &FieldMatrix,
    u1: &FieldMatrix,
    u2: &FieldMatrix,
    v1: &FieldMatrix,
    v2: &FieldMatrix,
) -> FieldMatrix {
    let (k, alpha, d, q) = (params.k, params.alpha, params.d, params.q);
    let a = k - 1;
    let mut m = FieldMatrix::zeros(d, alpha, q);
    for r in 0..a {
        for c in 0..a {
            m.set(r, c, t1.get(r, c));
        }
    }
    if a < alpha {
        for r in 0..a {
            m.set(r, a, u1.get(r, 0));
            m.set(a, r, u1.get(r, 0));
        }
        m.set(a, a, u2.get(0, 0));
        for c in k..alpha {
            for r in 0..a {
                m.set(r, c, v1.get(r, c - k));
                m.set(c, r, v1.get(r, c - k));
            }
            m.set(a, c, v2.get(0, c - k));
            m.set(c, a, v2.get(0, c - k));
        }
    }
    for r in 0..a {
        for c in 0..a {
            m.set(alpha + r, c, t2.get(r, c));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::build_message_matrix;
    use crate::params::derive_params;

    fn fe_list(vals: &[u64], q: u64) -> Vec<FieldElement> {
        vals.iter().map(|&v| FieldElement::new(v, q)).collect()
    }

    fn golden_code() -> (CodeParams, MessageMatrix) {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[1, 2, 3, 4, 5, 6], 11)).unwrap();
        (p, mm)
    }

    #[test]
    fn coding_vector_examples() {
        let p = derive_params(10, 2, 4, 11).unwrap();
        let cv = coding_vector(&p, 2).unwrap();
        assert_eq!(cv.rho, fe_list(&[1, 2, 4, 8], 11));

        let cv = coding_vector(&p, 1).unwrap();
        assert_eq!(cv.rho, fe_list(&[1, 1, 1, 1], 11));
        assert_eq!(cv.omega, fe_list(&[1], 11));
        assert_eq!(cv.theta, fe_list(&[1], 11));

        assert!(matches!(coding_vector(&p, 11), Err(Error::NodeOutOfRange(11, 10))));
    }

    #[test]
    fn encode_matches_golden_share_table() {
        let (_, mm) = golden_code();
        let shares = encode(&mm);
        let expect: [[u64; 3]; 10] = [
            [1, 0, 8],
            [10, 8, 2],
            [9, 4, 7],
            [1, 10, 1],
            [0, 4, 6],
            [9, 8, 0],
            [9, 0, 5],
            [3, 2, 10],
            [5, 3, 4],
            [7, 3, 9],
        ];
        for (i, s) in shares.iter().enumerate() {
            assert_eq!(s.node, i + 1);
            assert_eq!(s.data, fe_list(&expect[i], 11), "share {}", i + 1);
        }
    }

    #[test]
    fn encode_zero_message_and_type_iv() {
        let (p, _) = golden_code();
        let mm = build_message_matrix(&p, &fe_list(&[0; 6], 11)).unwrap();
        for s in encode(&mm) {
            assert!(s.data.iter().all(|v| v.is_zero()));
        }

        let p = derive_params(3, 1, 1, 5).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[4], 5)).unwrap();
        for s in encode(&mm) {
            assert_eq!(s.data, fe_list(&[4], 5));
        }
    }

    #[test]
    fn reconstruct_golden_example_from_nodes_1_2() {
        let (p, mm) = golden_code();
        let shares = encode(&mm);
        let got = reconstruct(&p, &shares[0..2]).unwrap();
        assert_eq!(got, fe_list(&[1, 2, 3, 4, 5, 6], 11));
    }

    #[test]
    fn reconstruct_all_45_pairs() {
        let (p, mm) = golden_code();
        let shares = encode(&mm);
        for i in 0..10 {
            for j in (i + 1)..10 {
                let got = reconstruct(&p, &[shares[i].clone(), shares[j].clone()]).unwrap();
                assert_eq!(got, fe_list(&[1, 2, 3, 4, 5, 6], 11), "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn reconstruct_type_iv_and_v() {
        let p = derive_params(3, 1, 1, 5).unwrap();
        let mm = build_message_matrix(&p, &fe_list(&[4], 5)).unwrap();
        let shares = encode(&mm);
        assert_eq!(reconstruct(&p, &shares[1..2]).unwrap(), fe_list(&[4], 5));

        let p = derive_params(4, 1, 3, 11).unwrap();
        let msg = fe_list(&[7, 8, 9], 11);
        let mm = build_message_matrix(&p, &msg).unwrap();
        for s in encode(&mm) {
            assert_eq!(reconstruct(&p, &[s]).unwrap(), msg);
        }
    }

    #[test]
    fn reconstruct_input_validation() {
        let (p, mm) = golden_code();
        let shares = encode(&mm);
        assert_eq!(
            reconstruct(&p, &shares[0..1]),
            Err(Error::WrongShareCount { expected: 2, got: 1 })
        );
        assert_eq!(
            reconstruct(&p, &[shares[0].clone(), shares[0].clone()]),
            Err(Error::DuplicateNode(1))
        );
    }

    #[test]
    fn symmetric_pair_golden_step3() {
        // k = 2, omega rows [1], [1]; lambdas (1, 8); rhs [7; 5]
        let omega = FieldMatrix::from_rows(&[vec![1], vec![1]], 11).unwrap();
        let lambdas = fe_list(&[1, 8], 11);
        let rhs = FieldMatrix::column(&[7, 5], 11);
        let (t1, t2) = reconstruct_symmetric_pair(&omega, &lambdas, &rhs).unwrap();
        assert_eq!(t1, FieldMatrix::from_rows(&[vec![1]], 11).unwrap());
        assert_eq!(t2, FieldMatrix::from_rows(&[vec![6]], 11).unwrap());
    }

    #[test]
    fn symmetric_pair_zero_and_degenerate() {
        let omega = FieldMatrix::from_rows(&[vec![1], vec![1]], 11).unwrap();
        let rhs = FieldMatrix::column(&[0, 0], 11);
        let (t1, t2) =
            reconstruct_symmetric_pair(&omega, &fe_list(&[1, 8], 11), &rhs).unwrap();
        assert!(t1.is_zero() && t2.is_zero());

        assert_eq!(
            reconstruct_symmetric_pair(&omega, &fe_list(&[3, 3], 11), &rhs),
            Err(Error::DegeneratePoints)
        );
    }

    #[test]
    fn symmetric_pair_random_k3_forward_oracle() {
        // forward-encode random symmetric T1, T2 over GF(13) and recover
        let q = 13u64;
        let k = 3usize;
        let a = k - 1;
        let points = [1u64, 2, 4];
        let mut state = 0xfeedu64;
        let mut rng = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % q
        };
        for _ in 0..100 {
            let mut t1 = FieldMatrix::zeros(a, a, q);
            let mut t2 = FieldMatrix::zeros(a, a, q);
            for r in 0..a {
                for c in r..a {
                    let v1 = rng();
                    let v2 = rng();
                    t1.set(r, c, v1);
                    t1.set(c, r, v1);
                    t2.set(r, c, v2);
                    t2.set(c, r, v2);
                }
            }
            let omega_rows: Vec<Vec<u64>> = points
                .iter()
                .map(|&x| (0..a as u64).map(|e| crate::field::mod_pow(x, e, q)).collect())
                .collect();
            let omega = FieldMatrix::from_rows(&omega_rows, q).unwrap();
            let lambdas: Vec<FieldElement> =
                points.iter().map(|&x| FieldElement::new(x, q).pow(4)).collect();
            let mut rhs = omega.mul(&t1).unwrap();
            for i in 0..k {
                let srow = FieldMatrix::row_vector(&omega.row(i), q)
                    .mul(&t2)
                    .unwrap()
                    .scale(lambdas[i].value());
                for c in 0..a {
                    let v = (rhs.get(i, c) + srow.get(0, c)) % q;
                    rhs.set(i, c, v);
                }
            }
            let (r1, r2) = reconstruct_symmetric_pair(&omega, &lambdas, &rhs).unwrap();
            assert_eq!(r1, t1);
            assert_eq!(r2, t2);
        }
    }

    #[test]
    fn corrupted_share_is_inconsistent() {
        let (p, mm) = golden_code();
        let mut shares = encode(&mm);
        shares[0].data[0] = shares[0].data[0].add(FieldElement::one(11)).unwrap();
        // with k=2 downloads the corruption surfaces as asymmetry or a
        // failed spare-row check in the pair solver
        let r = reconstruct(&p, &shares[0..2]);
        assert!(r.is_err() || r.unwrap() != fe_list(&[1, 2, 3, 4, 5, 6], 11));
    }
}
