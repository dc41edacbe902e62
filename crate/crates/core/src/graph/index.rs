use crate::permute::BitWord;

/// Rank/select directory over one layer word.
#[derive(Debug, Clone)]
struct RankedWord {
    word: BitWord,
    // ones in blocks [0, k)
    cumulative: Vec<u32>,
    ones: usize,
}

impl RankedWord {
    fn new(word: BitWord) -> Self {
        let mut cumulative = Vec::with_capacity(word.blocks().len() + 1);
        let mut acc = 0u32;
        cumulative.push(0);
        for b in word.blocks() {
            acc += b.count_ones();
            cumulative.push(acc);
        }
        RankedWord {
            word,
            cumulative,
            ones: acc as usize,
        }
    }

    fn len(&self) -> usize {
        self.word.len()
    }

    fn ones_before(&self, i: usize) -> usize {
        let block = i / 64;
        let mut n = self.cumulative[block] as usize;
        if i % 64 != 0 {
            n += (self.word.blocks()[block] & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        n
    }

    /// Position of the `k`-th (0-based) bit equal to `bit`.
    fn select(&self, bit: bool, k: usize) -> usize {
        let count_upto = |b: usize| -> usize {
            let ones = self.cumulative[b] as usize;
            if bit {
                ones
            } else {
                (b * 64).min(self.len()) - ones
            }
        };
        // last block whose prefix count is <= k
        let (mut lo, mut hi) = (0usize, self.word.blocks().len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if count_upto(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - count_upto(lo);
        let mut bits = self.word.blocks()[lo];
        if !bit {
            bits = !bits;
        }
        loop {
            let tz = bits.trailing_zeros() as usize;
            if remaining == 0 {
                return lo * 64 + tz;
            }
            bits &= bits - 1;
            remaining -= 1;
        }
    }

    /// `pi_W(i)`
    fn riffle(&self, i: usize) -> usize {
        let ones_before = self.ones_before(i);
        if self.word.get(i) {
            self.len() - self.ones + ones_before
        } else {
            i - ones_before
        }
    }

    /// `pi_{!W}(i)`
    fn riffle_complement(&self, i: usize) -> usize {
        let ones_before = self.ones_before(i);
        if self.word.get(i) {
            ones_before
        } else {
            self.ones + (i - ones_before)
        }
    }

    /// `pi_W^{-1}(t)`
    fn riffle_inverse(&self, t: usize) -> usize {
        let zeros = self.len() - self.ones;
        if t < zeros {
            self.select(false, t)
        } else {
            self.select(true, t - zeros)
        }
    }

    /// `pi_{!W}^{-1}(t)`
    fn riffle_complement_inverse(&self, t: usize) -> usize {
        if t < self.ones {
            self.select(true, t)
        } else {
            self.select(false, t - self.ones)
        }
    }
}

/// Parent lookup for one block computed on demand from the layer words,
/// without materialising a parent table.
///
/// Memory is the words plus one 32-bit counter per 64 bits.
#[derive(Debug, Clone)]
pub struct LayerIndex {
    g: u32,
    words: Vec<RankedWord>,
}

impl LayerIndex {
    pub fn new(words: Vec<BitWord>) -> Self {
        let g = words.len() as u32;
        LayerIndex {
            g,
            words: words.into_iter().map(RankedWord::new).collect(),
        }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn width(&self) -> usize {
        1 << self.g
    }

    /// Writes the canonical parents of block-local node `(row, col)`,
    /// `row >= 1`, into `out` as `(row_delta, col)` pairs where `row_delta`
    /// is 0 for the horizontal parent and 1 for the previous row. Returns
    /// the number written.
    pub fn parents_into(&self, row: usize, col: usize, out: &mut [(u8, u32); 3]) -> usize {
        debug_assert!(row >= 1 && row <= 2 * self.g as usize);
        let g = self.g as usize;
        let layer = row - 1;
        let (a, b) = if layer < g {
            let w = &self.words[layer];
            (w.riffle_inverse(col), w.riffle_complement_inverse(col))
        } else {
            let w = &self.words[2 * g - 1 - layer];
            (w.riffle(col), w.riffle_complement(col))
        };
        let mut prev = [a, b, usize::MAX];
        let mut k = 2;
        if col == 0 {
            prev[2] = self.width() - 1;
            k = 3;
        }
        let prev = &mut prev[..k];
        prev.sort_unstable();

        let mut n = 0;
        if col > 0 {
            out[n] = (0, col as u32 - 1);
            n += 1;
        }
        for (i, &c) in prev.iter().enumerate() {
            if i > 0 && prev[i - 1] == c {
                continue;
            }
            out[n] = (1, c as u32);
            n += 1;
        }
        n
    }

    /// Heap bytes used by words and rank directories.
    pub fn heap_bytes(&self) -> usize {
        self.words
            .iter()
            .map(|w| w.word.heap_bytes() + w.cumulative.capacity() * 4)
            .sum::<usize>()
            + self.words.capacity() * std::mem::size_of::<RankedWord>()
    }
}
