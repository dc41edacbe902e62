//! Bit words, riffle permutations and the salt-driven inverse riffle shuffle.

use std::fmt;
use std::str::FromStr;

use crate::error::{usage, Error, Result};
use crate::hashfn::HashFunction;

/// A fixed-length sequence of bits, indexed from 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    blocks: Vec<u64>,
    len: usize,
}

impl BitWord {
    /// All-zero word of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitWord {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut blocks = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                blocks.push(0);
            }
            if b {
                blocks[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitWord { blocks, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.blocks[i / 64] |= mask;
        } else {
            self.blocks[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Coordinate-wise complement.
    pub fn complement(&self) -> BitWord {
        let mut blocks: Vec<u64> = self.blocks.iter().map(|b| !b).collect();
        if self.len % 64 != 0 {
            if let Some(last) = blocks.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        BitWord {
            blocks,
            len: self.len,
        }
    }

    /// Number of ones.
    pub fn hamming_weight(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Number of zeros, i.e. the Hamming weight of the complement.
    pub fn zero_count(&self) -> usize {
        self.len - self.hamming_weight()
    }

    /// `|{j < i : bits[j] = bits[i]}|`
    pub fn rank(&self, i: usize) -> Result<usize> {
        if i >= self.len {
            return usage(format!("rank index {i} out of range for word of length {}", self.len));
        }
        let ones_before = self.ones_before(i);
        Ok(if self.get(i) { ones_before } else { i - ones_before })
    }

    /// Number of ones in positions `[0, i)`.
    pub(crate) fn ones_before(&self, i: usize) -> usize {
        let full = i / 64;
        let mut n: usize = self.blocks[..full].iter().map(|b| b.count_ones() as usize).sum();
        if i % 64 != 0 {
            n += (self.blocks[full] & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        n
    }

    pub(crate) fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// Heap bytes held by this word.
    pub fn heap_bytes(&self) -> usize {
        self.blocks.capacity() * std::mem::size_of::<u64>()
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return usage("empty bit string");
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => usage(format!("invalid bit character {other:?}")),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord::from_bits)
    }
}

/// A bijection on `[0, n)`; `mapping[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n as u32).collect(),
        }
    }

    /// Validates that `mapping` is a bijection on `[0, len)`.
    pub fn from_vec(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            let v = v as usize;
            if v >= n || seen[v] {
                return usage(format!("not a permutation of [0, {n}): offending value {v}"));
            }
            seen[v] = true;
        }
        Ok(Permutation { mapping })
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_vec(mapping.clone()).is_ok());
        Permutation { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.mapping[i] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `result(p(i)) = i`
    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.mapping.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { mapping: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return usage("composing permutations of different lengths");
        }
        Ok(Permutation {
            mapping: other.mapping.iter().map(|&i| self.mapping[i as usize]).collect(),
        })
    }

    /// Moves the element at position `k` to position `p(k)`.
    pub fn apply<T: Clone>(&self, seq: &[T]) -> Result<Vec<T>> {
        if seq.len() != self.len() {
            return usage(format!(
                "sequence of length {} does not match permutation of length {}",
                seq.len(),
                self.len()
            ));
        }
        let mut out: Vec<Option<T>> = vec![None; seq.len()];
        for (k, x) in seq.iter().enumerate() {
            out[self.image(k)] = Some(x.clone());
        }
        Ok(out.into_iter().map(|x| x.expect("bijection fills every slot")).collect())
    }

    /// [`Permutation::apply`] specialised to bit words.
    pub fn apply_to_word(&self, word: &BitWord) -> Result<BitWord> {
        if word.len() != self.len() {
            return usage(format!(
                "word of length {} does not match permutation of length {}",
                word.len(),
                self.len()
            ));
        }
        let mut out = BitWord::zeros(word.len());
        for k in 0..word.len() {
            if word.get(k) {
                out.set(self.image(k), true);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.mapping)
    }
}

/// Riffle permutation induced by `word`: zero-labelled positions move, in
/// order, to `[0, zeros)`; one-labelled positions move, in order, to
/// `[zeros, n)`.
pub fn riffle_permutation(word: &BitWord) -> Permutation {
    let zeros = word.zero_count() as u32;
    let (mut next0, mut next1) = (0u32, zeros);
    let mapping = word
        .iter()
        .map(|b| {
            let slot = if b { &mut next1 } else { &mut next0 };
            let v = *slot;
            *slot += 1;
            v
        })
        .collect();
    Permutation::from_vec_unchecked(mapping)
}

/// Outcome of [`inverse_riffle_shuffle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleResult {
    pub permutation: Permutation,
    /// Rounds run before every card's bit history became unique.
    pub rounds: u64,
}

/// `H(salt ‖ LE64(card) ‖ LE64(round))`, most significant bit of byte 0.
///
/// `card` is the 1-based deck position, `round` is 0-based.
pub fn shuffle_bit<H: HashFunction + ?Sized>(hash: &H, salt: &[u8], card: u64, round: u64) -> bool {
    let d = hash.hash(&[salt, &card.to_le_bytes(), &round.to_le_bytes()]);
    d.0[0] & 0x80 != 0
}

/// Upper bound on shuffle rounds before the run is declared broken.
pub fn round_cap(n: usize) -> u64 {
    let log2 = (usize::BITS - n.saturating_sub(1).leading_zeros()) as u64;
    64 * log2 + 512
}

/// Inverse riffle shuffle driven by `H(salt, ·, ·)`, stopped at the strong
/// stationary time when all per-card bit histories differ.
///
/// Each round, the card at 1-based position `w` draws `shuffle_bit(w, r)`;
/// the zero pile is stacked in front of the one pile, both in their
/// previous relative order.
pub fn inverse_riffle_shuffle<H: HashFunction + ?Sized>(
    hash: &H,
    n: usize,
    salt: &[u8],
) -> Result<ShuffleResult> {
    if n == 0 {
        return usage("shuffle size must be at least 1");
    }
    if n > u32::MAX as usize {
        return usage("shuffle size exceeds u32 range");
    }
    let cap = round_cap(n);
    // deck[p] = card at position p; class[p] = history class of that card.
    // Cards sharing a history are always contiguous in the deck, so class
    // ids are non-decreasing along it.
    let mut deck: Vec<u32> = (0..n as u32).collect();
    let mut class: Vec<u32> = vec![0; n];
    let mut bits: Vec<bool> = vec![false; n];
    let mut next_deck: Vec<u32> = vec![0; n];
    let mut next_class: Vec<u32> = vec![0; n];
    let mut classes = 1usize;
    let mut round = 0u64;

    while classes < n {
        if round >= cap {
            return Err(Error::Internal(format!(
                "shuffle of {n} cards did not stop within {cap} rounds"
            )));
        }
        for (p, b) in bits.iter_mut().enumerate() {
            *b = shuffle_bit(hash, salt, p as u64 + 1, round);
        }
        let mut out = 0;
        let mut last: Option<(bool, u32)> = None;
        let mut id = 0u32;
        for pile in [false, true] {
            for p in (0..n).filter(|&p| bits[p] == pile) {
                let key = (pile, class[p]);
                if let Some(prev) = last {
                    if prev != key {
                        id += 1;
                    }
                }
                last = Some(key);
                next_deck[out] = deck[p];
                next_class[out] = id;
                out += 1;
            }
        }
        std::mem::swap(&mut deck, &mut next_deck);
        std::mem::swap(&mut class, &mut next_class);
        classes = id as usize + 1;
        round += 1;
    }

    Ok(ShuffleResult {
        permutation: Permutation::from_vec_unchecked(deck),
        rounds: round,
    })
}
