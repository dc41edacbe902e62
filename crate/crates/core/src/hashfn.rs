//! The hash function `H` shared by shuffling, graph evaluation and seeding.

use std::cell::Cell;
use std::fmt;

use sha2::{Digest as _, Sha256};

/// Length in bytes of every node label.
pub const DIGEST_LEN: usize = 32;

/// A 32-byte node label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Digest> {
        <[u8; DIGEST_LEN]>::try_from(bytes).ok().map(Digest)
    }

    /// Number of differing bits between two digests.
    pub fn hamming_distance(&self, other: &Digest) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", hex::encode(self.0))
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// A hash function producing 32-byte digests over a concatenation of parts.
pub trait HashFunction {
    fn hash(&self, parts: &[&[u8]]) -> Digest;
}

impl<H: HashFunction + ?Sized> HashFunction for &H {
    fn hash(&self, parts: &[&[u8]]) -> Digest {
        (**self).hash(parts)
    }
}

/// SHA-256, the default and only hash fixed by format version 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sha256Hash;

impl HashFunction for Sha256Hash {
    fn hash(&self, parts: &[&[u8]]) -> Digest {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p);
        }
        Digest(h.finalize().into())
    }
}

/// Wraps a hash function and counts invocations.
#[derive(Debug, Default)]
pub struct CountingHash<H> {
    inner: H,
    calls: Cell<u64>,
}

impl<H> CountingHash<H> {
    pub fn new(inner: H) -> Self {
        CountingHash {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn reset(&self) {
        self.calls.set(0);
    }
}

impl<H: HashFunction> HashFunction for CountingHash<H> {
    fn hash(&self, parts: &[&[u8]]) -> Digest {
        self.calls.set(self.calls.get() + 1);
        self.inner.hash(parts)
    }
}
