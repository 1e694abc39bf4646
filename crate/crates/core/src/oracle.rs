//! The letter oracle: `LastCode(w[i..j])` from range predecessor and
//! successor queries.
//!
//! [`WaveletOracle`] is a pointerless, level-wise wavelet tree over the
//! remapped series. Each query walks down at most twice (once along the
//! query letter's path, once into the best sibling subtree), so a query costs
//! `O(log σ)` rank operations. The bottom level stores positions sorted by
//! `(letter, position)`, which turns "rightmost occurrence of the answer
//! letter inside the range" into a single array read.
//!
//! [`NaiveOracle`] answers the same queries with linear scans and is kept
//! around for testing.

use crate::bitvec::RankBitVector;
use crate::codes::{CodePair, Series, BOTTOM};
use crate::error::{Error, Result};

pub trait LetterOracle {
    fn series(&self) -> &Series;

    /// Rightmost `k` in `[i, j]` holding the largest letter `<= c`.
    /// The range must be valid.
    fn pred_in(&self, i: usize, j: usize, c: u32) -> Option<usize>;

    /// Rightmost `k` in `[i, j]` holding the smallest letter `>= c`.
    fn succ_in(&self, i: usize, j: usize, c: u32) -> Option<usize>;

    fn len(&self) -> usize {
        self.series().len()
    }

    fn is_empty(&self) -> bool {
        self.series().is_empty()
    }

    fn sigma(&self) -> u32 {
        self.series().sigma()
    }

    fn range_pred_pos(&self, i: usize, j: usize, c: u32) -> Result<Option<usize>> {
        self.series().check_range(i, j)?;
        Ok(self.pred_in(i, j, c))
    }

    fn range_succ_pos(&self, i: usize, j: usize, c: u32) -> Result<Option<usize>> {
        self.series().check_range(i, j)?;
        Ok(self.succ_in(i, j, c))
    }

    fn last_code(&self, i: usize, j: usize) -> Result<CodePair> {
        self.series().check_range(i, j)?;
        Ok(self.last_code_in(i, j))
    }

    /// Unchecked `LastCode(w[i..j])`, fragment-relative.
    #[inline]
    fn last_code_in(&self, i: usize, j: usize) -> CodePair {
        if i == j {
            return CodePair::EMPTY;
        }
        let c = self.series().letters()[j];
        let rel = |p: Option<usize>| p.map_or(BOTTOM, |k| (k - i) as i32);
        CodePair::new(rel(self.pred_in(i, j - 1, c)), rel(self.succ_in(i, j - 1, c)))
    }
}

#[derive(Debug, Clone)]
pub struct WaveletOracle {
    series: Series,
    levels: Vec<RankBitVector>,
    // positions sorted by (letter, position): the virtual bottom level
    sorted_pos: Vec<u32>,
}

#[derive(Clone, Copy)]
struct Window {
    // node range and query range, both half-open, in level coordinates
    node: (usize, usize),
    query: (usize, usize),
}

impl WaveletOracle {
    pub fn build(series: Series) -> Self {
        let n = series.len();
        let letters = series.letters();
        let depth = level_count(series.sigma());
        let mut levels = Vec::with_capacity(depth);
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut next = Vec::with_capacity(n);
        for lvl in 0..depth {
            let shift = depth - 1 - lvl;
            let bit = |pos: u32| (letters[pos as usize] >> shift) & 1 == 1;
            levels.push(RankBitVector::from_bits(order.iter().map(|&p| bit(p))));
            // stable partition inside each node (run of equal higher bits)
            next.clear();
            let mut start = 0;
            while start < n {
                let prefix = letters[order[start] as usize] >> (shift + 1);
                let mut end = start;
                while end < n && letters[order[end] as usize] >> (shift + 1) == prefix {
                    end += 1;
                }
                next.extend(order[start..end].iter().filter(|&&p| !bit(p)));
                next.extend(order[start..end].iter().filter(|&&p| bit(p)));
                start = end;
            }
            std::mem::swap(&mut order, &mut next);
        }
        WaveletOracle {
            series,
            levels,
            sorted_pos: order,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn into_series(self) -> Series {
        self.series
    }

    /// Rebuilds the series by walking every position down the levels.
    pub fn reconstruct(&self) -> Vec<u32> {
        (0..self.series.len())
            .map(|k| {
                let mut pos = k;
                let (mut s, mut e) = (0, self.series.len());
                let mut value = 0u32;
                for bv in &self.levels {
                    let zeros = bv.rank0(e) - bv.rank0(s);
                    let b = bv.get(pos);
                    value = value << 1 | b as u32;
                    if b {
                        pos = s + zeros + (bv.rank1(pos) - bv.rank1(s));
                        s += zeros;
                    } else {
                        pos = s + (bv.rank0(pos) - bv.rank0(s));
                        e = s + zeros;
                    }
                }
                value
            })
            .collect()
    }

    #[inline]
    fn split(&self, lvl: usize, w: Window) -> (Window, Window) {
        let bv = &self.levels[lvl];
        let (s, e) = w.node;
        let (a, b) = w.query;
        let z_s = bv.rank0(s);
        let zeros = bv.rank0(e) - z_s;
        let za = bv.rank0(a) - z_s;
        let zb = bv.rank0(b) - z_s;
        let mid = s + zeros;
        let left = Window {
            node: (s, mid),
            query: (s + za, s + zb),
        };
        let right = Window {
            node: (mid, e),
            query: (mid + (a - s - za), mid + (b - s - zb)),
        };
        (left, right)
    }

    /// Core of both searches. `toward_max` selects predecessor semantics.
    fn search(&self, i: usize, j: usize, c: u32, toward_max: bool, visits: &mut usize) -> Option<usize> {
        let depth = self.levels.len();
        let top = (1u64 << depth) - 1;
        let c = if u64::from(c) > top {
            if !toward_max {
                return None;
            }
            top as u32
        } else {
            c
        };
        let mut cur = Window {
            node: (0, self.series.len()),
            query: (i, j + 1),
        };
        let mut fallback: Option<(usize, Window)> = None;
        let mut exact = true;
        for lvl in 0..depth {
            *visits += 1;
            let (left, right) = self.split(lvl, cur);
            let bit = (c >> (depth - 1 - lvl)) & 1 == 1;
            // the sibling on the far side of c's path is entirely below (pred)
            // or above (succ) c; remember the deepest non-empty one
            let (along, beside) = match (bit, toward_max) {
                (true, true) => (right, Some(left)),
                (true, false) => (right, None),
                (false, true) => (left, None),
                (false, false) => (left, Some(right)),
            };
            if let Some(side) = beside.filter(|w| w.query.0 < w.query.1) {
                fallback = Some((lvl + 1, side));
            }
            cur = along;
            if cur.query.0 == cur.query.1 {
                exact = false;
                break;
            }
        }
        if !exact {
            let (start, mut w) = fallback?;
            for lvl in start..depth {
                *visits += 1;
                let (left, right) = self.split(lvl, w);
                let prefer = if toward_max { right } else { left };
                w = if prefer.query.0 < prefer.query.1 {
                    prefer
                } else if toward_max {
                    left
                } else {
                    right
                };
            }
            cur = w;
        }
        Some(self.sorted_pos[cur.query.1 - 1] as usize)
    }

    /// `LastCode(w[i..j])` using only the wavelet queries. Unchecked.
    pub fn last_code_wavelet(&self, i: usize, j: usize) -> CodePair {
        if i == j {
            return CodePair::EMPTY;
        }
        let c = self.series.letters()[j];
        let rel = |p: Option<usize>| p.map_or(BOTTOM, |k| (k - i) as i32);
        CodePair::new(rel(self.pred_in(i, j - 1, c)), rel(self.succ_in(i, j - 1, c)))
    }

    /// Predecessor query that also reports how many levels it touched.
    pub fn pred_counted(&self, i: usize, j: usize, c: u32) -> (Option<usize>, usize) {
        let mut visits = 0;
        (self.search(i, j, c, true, &mut visits), visits)
    }

    pub fn succ_counted(&self, i: usize, j: usize, c: u32) -> (Option<usize>, usize) {
        let mut visits = 0;
        (self.search(i, j, c, false, &mut visits), visits)
    }

    pub fn heap_bytes(&self) -> usize {
        self.levels.iter().map(RankBitVector::heap_bytes).sum::<usize>()
            + self.sorted_pos.capacity() * 4
            + self.series.len() * 4
    }
}

impl LetterOracle for WaveletOracle {
    fn series(&self) -> &Series {
        &self.series
    }

    /// Short fragments are scanned directly; a scan of a few dozen letters
    /// beats a wavelet descent once `σ` needs more than a handful of levels.
    #[inline]
    fn last_code_in(&self, i: usize, j: usize) -> CodePair {
        if j - i <= SCAN_LIMIT {
            scan_last_code(&self.series.letters()[i..=j])
        } else {
            self.last_code_wavelet(i, j)
        }
    }

    #[inline]
    fn pred_in(&self, i: usize, j: usize, c: u32) -> Option<usize> {
        let mut visits = 0;
        self.search(i, j, c, true, &mut visits)
    }

    #[inline]
    fn succ_in(&self, i: usize, j: usize, c: u32) -> Option<usize> {
        let mut visits = 0;
        self.search(i, j, c, false, &mut visits)
    }
}

/// Fragments up to this many letters past their start are scanned.
pub const SCAN_LIMIT: usize = 32;

/// `LastCode` of a fragment by one pass over its letters.
#[inline]
fn scan_last_code(frag: &[u32]) -> CodePair {
    let (&c, rest) = frag.split_last().expect("non-empty fragment");
    let (mut pred, mut pred_val) = (BOTTOM, 0u32);
    let (mut succ, mut succ_val) = (BOTTOM, 0u32);
    for (k, &x) in rest.iter().enumerate() {
        if x <= c && (pred == BOTTOM || x >= pred_val) {
            pred = k as i32;
            pred_val = x;
        }
        if x >= c && (succ == BOTTOM || x <= succ_val) {
            succ = k as i32;
            succ_val = x;
        }
    }
    CodePair::new(pred, succ)
}

/// Number of wavelet levels: bits needed for `sigma - 1`, at least one.
pub fn level_count(sigma: u32) -> usize {
    (u32::BITS - sigma.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Linear-scan oracle.
#[derive(Debug, Clone)]
pub struct NaiveOracle {
    series: Series,
}

impl NaiveOracle {
    pub fn new(series: Series) -> Self {
        NaiveOracle { series }
    }
}

impl LetterOracle for NaiveOracle {
    fn series(&self) -> &Series {
        &self.series
    }

    fn pred_in(&self, i: usize, j: usize, c: u32) -> Option<usize> {
        let w = self.series.letters();
        let mut best: Option<usize> = None;
        for k in i..=j {
            if w[k] <= c && best.is_none_or(|b| w[k] >= w[b]) {
                best = Some(k);
            }
        }
        best
    }

    fn succ_in(&self, i: usize, j: usize, c: u32) -> Option<usize> {
        let w = self.series.letters();
        let mut best: Option<usize> = None;
        for k in i..=j {
            if w[k] >= c && best.is_none_or(|b| w[k] <= w[b]) {
                best = Some(k);
            }
        }
        best
    }
}

/// Builds the default oracle, erroring on an empty series.
pub fn build_oracle(series: Series) -> Result<WaveletOracle> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(WaveletOracle::build(series))
}
