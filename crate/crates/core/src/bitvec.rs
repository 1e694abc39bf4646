/// Plain bit vector with a cumulative popcount per 64-bit word.
#[derive(Debug, Clone, Default)]
pub struct RankBitVector {
    words: Vec<u64>,
    // ones before each word; one extra entry holds the total
    cumulative: Vec<u32>,
    len: usize,
}

impl RankBitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for bit in bits {
            if len.is_multiple_of(64) {
                words.push(0u64);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        let mut cumulative = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u32;
        for w in &words {
            cumulative.push(acc);
            acc += w.count_ones();
        }
        cumulative.push(acc);
        RankBitVector {
            words,
            cumulative,
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of set bits in `[0, i)`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let (w, b) = (i / 64, i % 64);
        let base = self.cumulative[w] as usize;
        if b == 0 {
            base
        } else {
            base + (self.words[w] & ((1u64 << b) - 1)).count_ones() as usize
        }
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn count_ones(&self) -> usize {
        *self.cumulative.last().unwrap() as usize
    }

    /// Position of the `k`-th set bit (0-based), by binary search over the
    /// word counts and then inside the word.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k >= self.count_ones() {
            return None;
        }
        let w = self.cumulative.partition_point(|&c| c as usize <= k) - 1;
        let mut word = self.words[w];
        for _ in 0..(k - self.cumulative[w] as usize) {
            word &= word - 1;
        }
        Some(w * 64 + word.trailing_zeros() as usize)
    }

    pub fn heap_bytes(&self) -> usize {
        self.words.capacity() * 8 + self.cumulative.capacity() * 4
    }
}
