//! File store plumbing: chunking, the binary share-file format, repair of
//! share files, and the failure simulator.
//!
//! Share file layout, little-endian throughout: magic `GMSR`, one version
//! byte (1), then `q, n, k, d, node_id, x_i, chunk_count` as u32, the
//! original byte length as u64, and `chunk_count * alpha` payload symbols
//! as u32 values `< q`.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{encode, reconstruct, Share};
use crate::field::FieldElement;
use crate::message::build_message_matrix;
use crate::params::{derive_params, CodeParams};
use crate::repair::{helper_compute, regenerate, RepairPacket};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"GMSR";
const VERSION: u8 = 1;

/// One node's persisted share of a (possibly multi-chunk) file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareFile {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub node: usize,
    pub x: u64,
    pub chunk_count: usize,
    pub original_len: u64,
    /// `chunk_count * alpha` symbols, chunk-major.
    pub symbols: Vec<u64>,
}

impl ShareFile {
    pub fn params(&self) -> Result<CodeParams> {
        derive_params(self.n, self.k, self.d, self.q)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION])?;
        for v in [self.q as u32, self.n as u32, self.k as u32, self.d as u32, self.node as u32, self.x as u32, self.chunk_count as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.original_len.to_le_bytes())?;
        for &s in &self.symbols {
            w.write_all(&(s as u32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<ShareFile> {
        let io = |e: std::io::Error| Error::BadShareFile(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::BadShareFile("bad magic".into()));
        }
        let mut ver = [0u8; 1];
        r.read_exact(&mut ver).map_err(io)?;
        if ver[0] != VERSION {
            return Err(Error::BadShareFile(format!("unsupported version {}", ver[0])));
        }
        let mut u32s = [0u32; 7];
        for v in u32s.iter_mut() {
            let mut buf = [0u8; 4];
            r.read_exact(&mut buf).map_err(io)?;
            *v = u32::from_le_bytes(buf);
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8).map_err(io)?;
        let original_len = u64::from_le_bytes(buf8);
        let [q, n, k, d, node, x, chunk_count] = u32s;
        let params = derive_params(n as usize, k as usize, d as usize, q as u64)?;
        let count = chunk_count as usize * params.alpha;
        let mut symbols = Vec::with_capacity(count);
        for _ in 0..count {
            let mut buf = [0u8; 4];
            r.read_exact(&mut buf).map_err(io)?;
            let s = u32::from_le_bytes(buf) as u64;
            if s >= q as u64 {
                return Err(Error::SymbolOutOfRange(s, q as u64));
            }
            symbols.push(s);
        }
        // exactly the declared payload, nothing trailing
        let mut extra = [0u8; 1];
        if r.read(&mut extra).map_err(io)? != 0 {
            return Err(Error::BadShareFile("trailing bytes".into()));
        }
        if node == 0 || node as usize > params.n {
            return Err(Error::NodeOutOfRange(node as usize, params.n));
        }
        if params.points[node as usize - 1].value() != x as u64 {
            return Err(Error::BadShareFile(format!(
                "node {node} should have point {}, file says {x}",
                params.points[node as usize - 1].value()
            )));
        }
        Ok(ShareFile {
            q: q as u64,
            n: n as usize,
            k: k as usize,
            d: d as usize,
            node: node as usize,
            x: x as u64,
            chunk_count: chunk_count as usize,
            original_len,
            symbols,
        })
    }

    /// The node's share of one chunk.
    fn chunk_share(&self, params: &CodeParams, chunk: usize) -> Share {
        let a = params.alpha;
        Share {
            node: self.node,
            x: FieldElement::new(self.x, self.q),
            data: self.symbols[chunk * a..(chunk + 1) * a]
                .iter()
                .map(|&v| FieldElement::new(v, self.q))
                .collect(),
        }
    }
}

/// Splits bytes into B-symbol messages, one symbol per byte, zero-padding
/// the final chunk.  Byte mode requires q >= 257.
pub fn chunk_bytes(bytes: &[u8], params: &CodeParams) -> Result<Vec<Vec<FieldElement>>> {
    if params.q < 257 {
        return Err(Error::ByteModeNeedsLargeField(params.q));
    }
    Ok(chunk_values(
        &bytes.iter().map(|&b| b as u64).collect::<Vec<_>>(),
        params,
    ))
}

/// Splits raw symbol values into B-symbol messages (symbol mode).
pub fn chunk_symbols(values: &[u64], params: &CodeParams) -> Result<Vec<Vec<FieldElement>>> {
    for &v in values {
        if v >= params.q {
            return Err(Error::SymbolOutOfRange(v, params.q));
        }
    }
    Ok(chunk_values(values, params))
}

fn chunk_values(values: &[u64], params: &CodeParams) -> Vec<Vec<FieldElement>> {
    let b = params.message_len;
    values
        .chunks(b)
        .map(|chunk| {
            let mut out: Vec<FieldElement> =
                chunk.iter().map(|&v| FieldElement::new(v, params.q)).collect();
            out.resize(b, FieldElement::zero(params.q));
            out
        })
        .collect()
}

/// Encodes chunks into the n share files.
pub fn encode_share_files(
    params: &CodeParams,
    chunks: &[Vec<FieldElement>],
    original_len: u64,
) -> Result<Vec<ShareFile>> {
    let mut files: Vec<ShareFile> = (1..=params.n)
        .map(|node| ShareFile {
            q: params.q,
            n: params.n,
            k: params.k,
            d: params.d,
            node,
            x: params.points[node - 1].value(),
            chunk_count: chunks.len(),
            original_len,
            symbols: Vec::with_capacity(chunks.len() * params.alpha),
        })
        .collect();
    for chunk in chunks {
        let mm = build_message_matrix(params, chunk)?;
        for share in encode(&mm) {
            files[share.node - 1]
                .symbols
                .extend(share.data.iter().map(|v| v.value()));
        }
    }
    Ok(files)
}

fn common_params(files: &[ShareFile]) -> Result<CodeParams> {
    let first = files.first().ok_or(Error::HeaderMismatch)?;
    for f in files {
        if (f.q, f.n, f.k, f.d, f.chunk_count, f.original_len)
            != (first.q, first.n, first.k, first.d, first.chunk_count, first.original_len)
        {
            return Err(Error::HeaderMismatch);
        }
    }
    first.params()
}

/// Reconstructs all message symbols from any k share files.
pub fn reconstruct_symbols(files: &[ShareFile]) -> Result<Vec<u64>> {
    let params = common_params(files)?;
    if files.len() != params.k {
        return Err(Error::WrongShareCount { expected: params.k, got: files.len() });
    }
    let mut out = Vec::with_capacity(files[0].chunk_count * params.message_len);
    for chunk in 0..files[0].chunk_count {
        let shares: Vec<Share> =
            files.iter().map(|f| f.chunk_share(&params, chunk)).collect();
        out.extend(reconstruct(&params, &shares)?.iter().map(|v| v.value()));
    }
    Ok(out)
}

/// Reconstructs the original bytes (byte mode), trimming the padding.
pub fn reconstruct_bytes(files: &[ShareFile]) -> Result<Vec<u8>> {
    let symbols = reconstruct_symbols(files)?;
    let len = files[0].original_len as usize;
    if len > symbols.len() {
        return Err(Error::BadShareFile("original length exceeds payload".into()));
    }
    Ok(symbols[..len].iter().map(|&v| v as u8).collect())
}

/// Regenerates the failed node's share file from exactly d helper files.
pub fn repair_share_file(failed: usize, helpers: &[ShareFile]) -> Result<ShareFile> {
    let params = common_params(helpers)?;
    if helpers.len() != params.d {
        return Err(Error::WrongPacketCount { expected: params.d, got: helpers.len() });
    }
    let phi = crate::repair::repair_vector(&params, failed)?;
    let first = &helpers[0];
    let mut out = ShareFile {
        q: first.q,
        n: first.n,
        k: first.k,
        d: first.d,
        node: failed,
        x: params.point(failed)?.value(),
        chunk_count: first.chunk_count,
        original_len: first.original_len,
        symbols: Vec::with_capacity(first.chunk_count * params.alpha),
    };
    for chunk in 0..first.chunk_count {
        let packets: Vec<RepairPacket> = helpers
            .iter()
            .map(|f| helper_compute(&f.chunk_share(&params, chunk), &phi))
            .collect::<Result<_>>()?;
        let share = regenerate(&params, failed, &packets)?;
        out.symbols.extend(share.data.iter().map(|v| v.value()));
    }
    Ok(out)
}

/// Bandwidth accounting for a simulated failure schedule.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimReport {
    pub repairs: usize,
    /// Symbols downloaded per repair; always exactly d.
    pub symbols_per_repair: usize,
    /// The naive baseline: reconstructing the chunk costs k*alpha symbols.
    pub naive_per_repair: usize,
    pub total_downloaded: usize,
    pub total_naive: usize,
    /// d / (k*alpha)
    pub savings_ratio: f64,
    /// Every regenerated share matched the original bit-for-bit.
    pub all_exact: bool,
}

/// Runs a failure schedule on a random message: each failed node is
/// regenerated from the d lowest-indexed survivors and compared with the
/// original share.
pub fn simulate(params: &CodeParams, failures: &[usize], seed: u64) -> Result<SimReport> {
    for &f in failures {
        if f == 0 || f > params.n {
            return Err(Error::NodeOutOfRange(f, params.n));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let msg: Vec<FieldElement> = (0..params.message_len)
        .map(|_| FieldElement::new(rng.gen_range(0..params.q), params.q))
        .collect();
    let mm = build_message_matrix(params, &msg)?;
    let shares = encode(&mm);
    let mut all_exact = true;
    let mut downloaded = 0usize;
    for &f in failures {
        let phi = crate::repair::repair_vector(params, f)?;
        let helpers: Vec<usize> =
            (1..=params.n).filter(|&h| h != f).take(params.d).collect();
        let packets: Vec<RepairPacket> = helpers
            .iter()
            .map(|&h| helper_compute(&shares[h - 1], &phi))
            .collect::<Result<_>>()?;
        downloaded += packets.len();
        let got = regenerate(params, f, &packets)?;
        all_exact &= got == shares[f - 1];
    }
    let naive = params.k * params.alpha;
    Ok(SimReport {
        repairs: failures.len(),
        symbols_per_repair: params.d,
        naive_per_repair: naive,
        total_downloaded: downloaded,
        total_naive: naive * failures.len(),
        savings_ratio: params.d as f64 / naive as f64,
        all_exact,
    })
}
