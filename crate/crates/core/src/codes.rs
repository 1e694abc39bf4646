//! Alphabet remapping and the code machinery behind order-preserving matching.
//!
//! A fragment's `LastCode` records where the rightmost predecessor and the
//! rightmost successor of its last letter sit inside the rest of the fragment.
//! The sequence of `LastCode`s over all prefixes (the `PrefCode`) is a complete
//! invariant of the fragment's order-preserving class. Everything here is a
//! direct reference implementation; the fast path lives in [`crate::oracle`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The absent position, written ⊥ in the literature.
pub const BOTTOM: i32 = -1;

/// Largest series length accepted for indexing; node ids and positions are `u32`.
pub const MAX_SERIES_LEN: usize = 1 << 30;

/// A series over the dense alphabet `[0, sigma)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    letters: Vec<u32>,
    sigma: u32,
}

impl Series {
    /// Dense-rank an arbitrary totally ordered sequence.
    pub fn from_ordered<T: Ord>(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() > MAX_SERIES_LEN {
            return Err(Error::SeriesTooLong(values.len()));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].cmp(&values[b]));
        let mut letters = vec![0u32; values.len()];
        let mut rank = 0u32;
        for (k, &pos) in order.iter().enumerate() {
            if k > 0 && values[order[k - 1]] != values[pos] {
                rank += 1;
            }
            letters[pos] = rank;
        }
        Ok(Series {
            letters,
            sigma: rank + 1,
        })
    }

    /// Remaps integer letters; `sigma` becomes the number of distinct values.
    pub fn from_letters(letters: &[u32]) -> Result<Self> {
        Self::from_ordered(letters)
    }

    /// Wraps letters that are already dense ranks, checking that claim.
    pub fn from_dense(letters: Vec<u32>, sigma: u32) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyInput);
        }
        if letters.len() > MAX_SERIES_LEN {
            return Err(Error::SeriesTooLong(letters.len()));
        }
        let mut seen = vec![false; sigma as usize];
        for &c in &letters {
            if c >= sigma {
                return Err(Error::LetterOutOfRange { letter: c, sigma });
            }
            seen[c as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::LetterOutOfRange {
                letter: missing as u32,
                sigma,
            });
        }
        Ok(Series { letters, sigma })
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i <= j && j < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidRange {
                i,
                j,
                n: self.len(),
            })
        }
    }

    pub fn fragment(&self, i: usize, j: usize) -> Result<&[u32]> {
        self.check_range(i, j)?;
        Ok(&self.letters[i..=j])
    }

    /// `LastCode(w[i..j])` by a direct scan of the fragment.
    pub fn last_code_naive(&self, i: usize, j: usize) -> Result<CodePair> {
        Ok(last_code(self.fragment(i, j)?))
    }

    pub fn pref_code(&self, i: usize, j: usize) -> Result<PrefCode> {
        Ok(pref_code(self.fragment(i, j)?))
    }

    pub fn rank_pattern(&self, i: usize, j: usize) -> Result<RankSeq> {
        Ok(rank_pattern(self.fragment(i, j)?))
    }
}

/// Dense-rank finite floating point values (equal inputs get equal letters).
pub fn remap_alphabet(values: &[f64]) -> Result<Series> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { position, value });
    }
    // -0.0 and 0.0 compare equal and must share a letter.
    let keys: Vec<OrdF64> = values
        .iter()
        .map(|&v| OrdF64(if v == 0.0 { 0.0 } else { v }))
        .collect();
    Series::from_ordered(&keys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A `(pred, succ)` pair of fragment-relative positions; ⊥ is [`BOTTOM`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodePair {
    pub pred: i32,
    pub succ: i32,
}

impl CodePair {
    pub const EMPTY: CodePair = CodePair {
        pred: BOTTOM,
        succ: BOTTOM,
    };

    pub fn new(pred: i32, succ: i32) -> Self {
        CodePair { pred, succ }
    }
}

impl fmt::Display for CodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pred, self.succ)
    }
}

/// `LastCode` of a whole fragment by a linear scan.
pub fn last_code<T: Ord>(frag: &[T]) -> CodePair {
    let Some((last, rest)) = frag.split_last() else {
        return CodePair::EMPTY;
    };
    let mut pred: Option<usize> = None;
    let mut succ: Option<usize> = None;
    for (k, x) in rest.iter().enumerate() {
        if x <= last && pred.is_none_or(|p| x >= &rest[p]) {
            pred = Some(k);
        }
        if x >= last && succ.is_none_or(|s| x <= &rest[s]) {
            succ = Some(k);
        }
    }
    let pos = |p: Option<usize>| p.map_or(BOTTOM, |k| k as i32);
    CodePair::new(pos(pred), pos(succ))
}

/// The `LastCode`s of every prefix of a fragment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PrefCode(pub Vec<CodePair>);

impl PrefCode {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn codes(&self) -> &[CodePair] {
        &self.0
    }
}

impl fmt::Display for PrefCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PrefCode {
    type Err = Error;

    /// Parses the canonical `(p,s)(p,s)...` form, ⊥ written as `-1`.
    /// Whitespace between and inside pairs is tolerated.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedCode(msg.to_string());
        let mut codes = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            rest = rest
                .strip_prefix('(')
                .ok_or_else(|| bad("expected '('"))?;
            let close = rest.find(')').ok_or_else(|| bad("unterminated pair"))?;
            let (body, tail) = rest.split_at(close);
            let (a, b) = body.split_once(',').ok_or_else(|| bad("expected ','"))?;
            let parse = |t: &str| -> Result<i32> {
                t.trim()
                    .parse::<i32>()
                    .map_err(|_| bad("component is not an integer"))
            };
            let (pred, succ) = (parse(a)?, parse(b)?);
            let t = codes.len() as i64;
            for c in [pred, succ] {
                if i64::from(c) < -1 || i64::from(c) >= t {
                    return Err(Error::CodeOutOfRange {
                        component: i64::from(c),
                        max: t - 1,
                    });
                }
            }
            codes.push(CodePair::new(pred, succ));
            rest = tail[1..].trim_start();
        }
        if codes.is_empty() {
            return Err(bad("empty code"));
        }
        Ok(PrefCode(codes))
    }
}

/// `PrefCode` of a fragment. Maintains an ordered map from letter to its
/// rightmost position so each prefix costs `O(log m)`.
pub fn pref_code<T: Ord>(frag: &[T]) -> PrefCode {
    let mut rightmost: BTreeMap<&T, usize> = BTreeMap::new();
    let mut codes = Vec::with_capacity(frag.len());
    for (k, x) in frag.iter().enumerate() {
        let pred = rightmost.range::<&T, _>(..=x).next_back().map_or(BOTTOM, |(_, &p)| p as i32);
        let succ = rightmost.range::<&T, _>(x..).next().map_or(BOTTOM, |(_, &p)| p as i32);
        codes.push(CodePair::new(pred, succ));
        rightmost.insert(x, k);
    }
    PrefCode(codes)
}

/// Order-preserving equality via `PrefCode`s.
pub fn op_equal<T: Ord, U: Ord>(x: &[T], y: &[U]) -> bool {
    x.len() == y.len() && pref_code(x) == pref_code(y)
}

/// Order-preserving equality straight from the definition: all pairwise
/// `<=` relations agree.
pub fn op_equal_pairwise<T: Ord, U: Ord>(x: &[T], y: &[U]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    (0..x.len()).all(|a| (0..x.len()).all(|b| (x[a] <= x[b]) == (y[a] <= y[b])))
}

/// One plus the number of distinct smaller values, per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankSeq(pub Vec<u32>);

pub fn rank_pattern<T: Ord>(frag: &[T]) -> RankSeq {
    let mut distinct: Vec<&T> = frag.iter().collect();
    distinct.sort();
    distinct.dedup();
    RankSeq(
        frag.iter()
            .map(|x| distinct.partition_point(|d| *d < x) as u32 + 1)
            .collect(),
    )
}

/// `(a+1)(n+1) + b + 1` with ⊥ = -1; strictly monotone in the pair order.
pub fn code_to_int(c: CodePair, n: usize) -> Result<u64> {
    let max = n as i64 - 2;
    for component in [c.pred, c.succ] {
        let component = i64::from(component);
        if component < -1 || component > max {
            return Err(Error::CodeOutOfRange { component, max });
        }
    }
    Ok(code_to_int_unchecked(c, n))
}

#[inline]
pub(crate) fn code_to_int_unchecked(c: CodePair, n: usize) -> u64 {
    (c.pred as i64 + 1) as u64 * (n as u64 + 1) + (c.succ as i64 + 1) as u64
}

/// Inverse of [`code_to_int`].
pub fn int_to_code(key: u64, n: usize) -> CodePair {
    let base = n as u64 + 1;
    CodePair::new((key / base) as i32 - 1, (key % base) as i32 - 1)
}

/// Child-map key: the `$` delimiter sorts before every code. One word:
/// 0 for `$`, `k + 1` for code integer `k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildKey(pub(crate) u64);

impl ChildKey {
    pub const DOLLAR: ChildKey = ChildKey(0);

    /// Key for code integer `k`; `None` only for `u64::MAX`, which no
    /// series length can produce.
    pub fn code(k: u64) -> Option<ChildKey> {
        k.checked_add(1).map(ChildKey)
    }

    pub fn is_dollar(self) -> bool {
        self.0 == 0
    }

    pub fn as_code(self) -> Option<u64> {
        self.0.checked_sub(1)
    }
}

impl fmt::Debug for ChildKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_code() {
            None => f.write_str("$"),
            Some(k) => write!(f, "Code({k})"),
        }
    }
}

/// One symbol of a `SufCode` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Dollar,
    Code(CodePair),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Dollar => f.write_str("$"),
            Symbol::Code(c) => c.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(p: i32, s: i32) -> CodePair {
        CodePair::new(p, s)
    }

    #[test]
    fn remap_dense_ranks() {
        let s = remap_alphabet(&[56.0, 57.0, 62.0, 59.0, 58.0]).unwrap();
        assert_eq!(s.letters(), &[0, 1, 4, 3, 2]);
        assert_eq!(s.sigma(), 5);
        let s = remap_alphabet(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(s.letters(), &[0, 0, 0]);
        assert_eq!(s.sigma(), 1);
    }

    #[test]
    fn remap_rejects_bad_input() {
        assert_eq!(remap_alphabet(&[]), Err(Error::EmptyInput));
        assert!(matches!(
            remap_alphabet(&[1.0, f64::NAN]),
            Err(Error::NonFinite { position: 1, .. })
        ));
        assert!(matches!(
            remap_alphabet(&[f64::INFINITY]),
            Err(Error::NonFinite { position: 0, .. })
        ));
    }

    #[test]
    fn remap_signed_zero() {
        let s = remap_alphabet(&[0.0, -0.0, 1.0]).unwrap();
        assert_eq!(s.letters(), &[0, 0, 1]);
    }

    #[test]
    fn from_dense_validates() {
        assert!(Series::from_dense(vec![0, 2], 3).is_err());
        assert!(Series::from_dense(vec![0, 3], 3).is_err());
        assert!(Series::from_dense(vec![1, 0, 1], 2).is_ok());
    }

    #[test]
    fn last_code_examples() {
        assert_eq!(last_code(&[5, 2, 6, 5, 1, 4]), cp(1, 3));
        assert_eq!(last_code(&[4, 2, 5, 5, 1]), cp(BOTTOM, 1));
        assert_eq!(last_code(&[9]), CodePair::EMPTY);
        let s = Series::from_letters(&[5, 2, 6, 5, 1, 4]).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.last_code_naive(i, i).unwrap(), CodePair::EMPTY);
        }
        assert!(s.last_code_naive(3, 2).is_err());
        assert!(s.last_code_naive(0, 6).is_err());
    }

    #[test]
    fn pref_code_examples() {
        let b = BOTTOM;
        assert_eq!(
            pref_code(&[4, 2, 5, 5, 1]).0,
            vec![cp(b, b), cp(b, 0), cp(0, b), cp(2, 2), cp(b, 1)]
        );
        assert_eq!(pref_code(&[3]).0, vec![cp(b, b)]);
        let s = Series::from_letters(&[1, 2, 4, 4, 2, 5, 5, 1]).unwrap();
        assert_eq!(
            s.pref_code(3, 7).unwrap().to_string(),
            "(-1,-1)(-1,0)(0,-1)(2,2)(-1,1)"
        );
    }

    #[test]
    fn op_equal_examples() {
        assert!(op_equal(&[4, 2, 5, 5, 1], &[5, 2, 7, 7, 0]));
        assert!(op_equal_pairwise(&[4, 2, 5, 5, 1], &[5, 2, 7, 7, 0]));
        assert!(!op_equal(&[1, 2], &[2, 1]));
        assert!(!op_equal_pairwise(&[1, 2], &[2, 1]));
        assert!(!op_equal(&[1, 2], &[1, 2, 3]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_pattern(&[4, 2, 5, 5, 1]).0, vec![3, 2, 4, 4, 1]);
        assert_eq!(rank_pattern(&[56, 57, 62, 59, 58]).0, vec![1, 2, 5, 4, 3]);
        assert_eq!(rank_pattern(&[8, 8, 8]).0, vec![1, 1, 1]);
    }

    #[test]
    fn code_to_int_examples() {
        assert_eq!(code_to_int(CodePair::EMPTY, 8).unwrap(), 0);
        assert_eq!(code_to_int(CodePair::EMPTY, 1).unwrap(), 0);
        assert_eq!(code_to_int(cp(0, BOTTOM), 8).unwrap(), 9);
        assert!(code_to_int(cp(7, 0), 8).is_err());
        assert!(code_to_int(cp(0, -2), 8).is_err());
        assert_eq!(int_to_code(9, 8), cp(0, BOTTOM));
        assert!(ChildKey::DOLLAR < ChildKey::code(0).unwrap());
        assert_eq!(ChildKey::code(7).unwrap().as_code(), Some(7));
        assert!(ChildKey::code(u64::MAX).is_none());
    }

    #[test]
    fn code_to_int_is_order_isomorphic() {
        let n = 7;
        let pairs: Vec<CodePair> = (-1..=5)
            .flat_map(|a| (-1..=5).map(move |b| cp(a, b)))
            .collect();
        for &x in &pairs {
            for &y in &pairs {
                let (kx, ky) = (code_to_int(x, n).unwrap(), code_to_int(y, n).unwrap());
                assert_eq!(x <= y, kx <= ky, "{x} vs {y}");
                assert_eq!(x == y, kx == ky);
            }
        }
    }

    #[test]
    fn parse_canonical_pref_code() {
        let p: PrefCode = "(-1,-1)(0,0)(-1,1)".parse().unwrap();
        assert_eq!(p.0, vec![CodePair::EMPTY, cp(0, 0), cp(BOTTOM, 1)]);
        assert_eq!(p.to_string(), "(-1,-1)(0,0)(-1,1)");
        let spaced: PrefCode = " ( -1 , -1 ) (0,0)".parse().unwrap();
        assert_eq!(spaced.len(), 2);
        for bad in ["", "(", "(0,0)", "(-1,-1)(1,0)", "(-1,-1)x", "(-1;-1)", "(a,b)"] {
            assert!(bad.parse::<PrefCode>().is_err(), "{bad:?}");
        }
    }
}
