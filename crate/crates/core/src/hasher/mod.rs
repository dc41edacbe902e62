//! Password hashing over the salt-dependent graph.
//!
//! Evaluation keeps two rows of labels. Row 0 is seeded from the password
//! by a hash chain; every later node is a fold `v = H(v ‖ parent)` over its
//! canonical parents starting from the all-zero label. After each of the
//! `lambda` rounds the final row becomes row 0 of the next round, and the
//! output is the last node of the final row.

mod phc;

pub use phc::{PhcParts, PhcString};

use rand::rngs::OsRng;
use rand::RngCore;
use subtle::ConstantTimeEq;

use crate::error::{usage, Error, Result};
use crate::graph::LayerIndex;
use crate::hashfn::{Digest, HashFunction, Sha256Hash};
use crate::permute::inverse_riffle_shuffle;
use crate::trajectory::{binary_representation, trace_trajectories};

pub const MIN_GARLIC: u32 = 1;
pub const MAX_GARLIC: u32 = 24;
pub const MIN_LAMBDA: u32 = 1;
pub const MAX_LAMBDA: u32 = 64;
pub const MIN_SALT_LEN: usize = 8;
pub const RANDOM_SALT_LEN: usize = 16;
pub const VERSION: u32 = 1;

/// Cost and salt parameters, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashParams {
    g: u32,
    lambda: u32,
    salt: Vec<u8>,
    version: u32,
}

impl HashParams {
    pub fn new(g: u32, lambda: u32, salt: impl Into<Vec<u8>>) -> Result<Self> {
        let salt = salt.into();
        if !(MIN_GARLIC..=MAX_GARLIC).contains(&g) {
            return usage(format!("garlic {g} outside [{MIN_GARLIC}, {MAX_GARLIC}]"));
        }
        if !(MIN_LAMBDA..=MAX_LAMBDA).contains(&lambda) {
            return usage(format!("lambda {lambda} outside [{MIN_LAMBDA}, {MAX_LAMBDA}]"));
        }
        if salt.len() < MIN_SALT_LEN {
            return usage(format!(
                "salt of {} bytes is shorter than {MIN_SALT_LEN}",
                salt.len()
            ));
        }
        Ok(HashParams {
            g,
            lambda,
            salt,
            version: VERSION,
        })
    }

    /// Draws a 16-byte salt from the operating system.
    pub fn with_random_salt(g: u32, lambda: u32) -> Result<Self> {
        let mut salt = vec![0u8; RANDOM_SALT_LEN];
        OsRng
            .try_fill_bytes(&mut salt)
            .map_err(|e| Error::Resource(format!("entropy source: {e}")))?;
        HashParams::new(g, lambda, salt)
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn salt(&self) -> &[u8] {
        &self.salt
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn width(&self) -> usize {
        1 << self.g
    }
}

/// Receives every label read and write made during evaluation, addressed by
/// row in the stacked graph (`round * 2g + local_row`) and column.
pub trait AccessObserver {
    fn read(&mut self, row: u32, col: u32);
    fn write(&mut self, row: u32, col: u32);
}

/// Discards all events.
pub struct NoObserver;

impl AccessObserver for NoObserver {
    #[inline(always)]
    fn read(&mut self, _row: u32, _col: u32) {}
    #[inline(always)]
    fn write(&mut self, _row: u32, _col: u32) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Read { row: u32, col: u32 },
    Write { row: u32, col: u32 },
}

/// Records the full access sequence.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct AccessTrace(pub Vec<Access>);

impl AccessObserver for AccessTrace {
    fn read(&mut self, row: u32, col: u32) {
        self.0.push(Access::Read { row, col });
    }
    fn write(&mut self, row: u32, col: u32) {
        self.0.push(Access::Write { row, col });
    }
}

fn alloc_row(width: usize) -> Result<Vec<Digest>> {
    let mut v = Vec::new();
    v.try_reserve_exact(width).map_err(|_| {
        Error::Resource(format!("cannot allocate a row of {width} labels"))
    })?;
    v.resize(width, Digest::ZERO);
    Ok(v)
}

/// Builds the parent index for `params` by shuffling under the salt.
pub fn layer_index<H: HashFunction + ?Sized>(hash: &H, params: &HashParams) -> Result<LayerIndex> {
    let sigma = inverse_riffle_shuffle(hash, params.width(), &params.salt)?.permutation;
    let traced = trace_trajectories(&binary_representation(&sigma, params.g)?);
    drop(sigma);
    Ok(LayerIndex::new(traced.into_columns()))
}

/// Hashes `password` under `params`.
pub fn evaluate<H: HashFunction + ?Sized>(hash: &H, password: &[u8], params: &HashParams) -> Result<Digest> {
    evaluate_observed(hash, password, params, &mut NoObserver)
}

/// [`evaluate`] reporting every label access to `observer`.
pub fn evaluate_observed<H, O>(
    hash: &H,
    password: &[u8],
    params: &HashParams,
    observer: &mut O,
) -> Result<Digest>
where
    H: HashFunction + ?Sized,
    O: AccessObserver,
{
    let index = layer_index(hash, params)?;
    evaluate_with_index(hash, password, params, &index, observer)
}

/// Evaluation with a prebuilt parent index.
pub fn evaluate_with_index<H, O>(
    hash: &H,
    password: &[u8],
    params: &HashParams,
    index: &LayerIndex,
    observer: &mut O,
) -> Result<Digest>
where
    H: HashFunction + ?Sized,
    O: AccessObserver,
{
    if index.g() != params.g {
        return usage("layer index garlic does not match parameters");
    }
    let width = params.width();
    let rows_per_block = 2 * params.g;
    let mut prev = alloc_row(width)?;
    let mut cur = alloc_row(width)?;

    prev[0] = hash.hash(&[password]);
    observer.write(0, 0);
    for i in 1..width {
        observer.read(0, i as u32 - 1);
        prev[i] = hash.hash(&[prev[i - 1].as_bytes()]);
        observer.write(0, i as u32);
    }

    let mut parents = [(0u8, 0u32); 3];
    for round in 0..params.lambda {
        let base = round * rows_per_block;
        for local in 1..=rows_per_block {
            let row = base + local;
            for col in 0..width {
                let k = index.parents_into(local as usize, col, &mut parents);
                let mut v = Digest::ZERO;
                for &(delta, pc) in &parents[..k] {
                    let src = if delta == 0 { &cur[pc as usize] } else { &prev[pc as usize] };
                    observer.read(row - delta as u32, pc);
                    v = hash.hash(&[v.as_bytes(), src.as_bytes()]);
                }
                cur[col] = v;
                observer.write(row, col as u32);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
    }
    Ok(prev[width - 1])
}

/// Exact number of `H` invocations made by one [`evaluate`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct HashCallCount {
    /// Calls spent by the shuffle, `2^g` per round.
    pub shuffle: u64,
    /// Calls seeding row 0: `2^g`.
    pub seeding: u64,
    /// Fold calls over all rounds: one per parent of every computed node.
    pub evaluation: u64,
}

impl HashCallCount {
    pub fn total(&self) -> u64 {
        self.shuffle + self.seeding + self.evaluation
    }
}

/// Predicts the hash calls [`evaluate`] will make, from the graph structure.
pub fn hash_call_count<H: HashFunction + ?Sized>(hash: &H, params: &HashParams) -> Result<HashCallCount> {
    let width = params.width();
    let shuffle = inverse_riffle_shuffle(hash, width, &params.salt)?;
    let traced = trace_trajectories(&binary_representation(&shuffle.permutation, params.g)?);
    let index = LayerIndex::new(traced.into_columns());
    let mut buf = [(0u8, 0u32); 3];
    let per_round: u64 = (1..=2 * params.g as usize)
        .flat_map(|row| (0..width).map(move |col| (row, col)))
        .map(|(row, col)| index.parents_into(row, col, &mut buf) as u64)
        .sum();
    Ok(HashCallCount {
        shuffle: shuffle.rounds * width as u64,
        seeding: width as u64,
        evaluation: per_round * params.lambda as u64,
    })
}

/// Hashes `password` with SHA-256 and encodes the result.
pub fn hash_password(params: &HashParams, password: &[u8]) -> Result<PhcString> {
    let digest = evaluate(&Sha256Hash, password, params)?;
    Ok(PhcString::encode(&PhcParts {
        version: params.version,
        g: params.g,
        lambda: params.lambda,
        salt: params.salt.clone(),
        digest,
    }))
}

/// Recomputes the digest for `password` and compares it in constant time.
///
/// Malformed input is an [`Error::Decode`], never `Ok(false)`.
pub fn verify_password(encoded: &str, password: &[u8]) -> Result<bool> {
    let parts = PhcString::decode(encoded)?;
    let params = HashParams::new(parts.g, parts.lambda, parts.salt.clone())
        .map_err(|e| Error::Decode(format!("parameters out of range: {e}")))?;
    let digest = evaluate(&Sha256Hash, password, &params)?;
    Ok(digest.as_bytes().ct_eq(parts.digest.as_bytes()).into())
}
