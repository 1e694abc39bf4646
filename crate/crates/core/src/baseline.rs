//! Reference miners that do not use the tree.
//!
//! `brute_force_mine` groups every fragment by its `PrefCode` and applies the
//! maximality and closedness definitions literally. `ba_mp` and `ba_cp` are
//! levelwise Apriori miners that refine groups one letter at a time with
//! oracle queries. Occurrence counting and feature matrices live here too.

use std::collections::{BTreeSet, HashMap};

use crate::codes::{CodePair, PrefCode, Series};
use crate::error::{Error, Result};
use crate::miner::{MiningParams, PatternReport};
use crate::oracle::LetterOracle;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentGroup {
    pub pref_code: PrefCode,
    /// Sorted start positions of the member fragments.
    pub starts: Vec<usize>,
    pub length: usize,
}

impl FragmentGroup {
    pub fn frequency(&self) -> usize {
        self.starts.len()
    }
}

/// All windows of one length, partitioned by `PrefCode`.
#[derive(Debug, Clone)]
pub struct LevelTable {
    pub length: usize,
    pub groups: Vec<FragmentGroup>,
    /// `group_of[i]` is the group index of the window starting at `i`.
    pub group_of: Vec<usize>,
}

impl LevelTable {
    /// Builds the table by computing every window's `PrefCode` from scratch.
    pub fn from_scratch(series: &Series, length: usize) -> Result<Self> {
        let n = series.len();
        if length == 0 || length > n {
            return Err(Error::InvalidRange { i: 0, j: length, n });
        }
        let mut index: HashMap<PrefCode, usize> = HashMap::new();
        let mut groups: Vec<FragmentGroup> = Vec::new();
        let mut group_of = Vec::with_capacity(n - length + 1);
        for i in 0..=n - length {
            let code = series.pref_code(i, i + length - 1)?;
            let g = *index.entry(code.clone()).or_insert_with(|| {
                groups.push(FragmentGroup {
                    pref_code: code,
                    starts: Vec::new(),
                    length,
                });
                groups.len() - 1
            });
            groups[g].starts.push(i);
            group_of.push(g);
        }
        Ok(LevelTable {
            length,
            groups,
            group_of,
        })
    }

    pub fn window_count(&self) -> usize {
        self.group_of.len()
    }

    fn size_of_window(&self, i: usize) -> usize {
        self.groups[self.group_of[i]].starts.len()
    }
}

#[derive(Debug, Clone, Default)]
pub struct BruteForceResult {
    pub maximal: Vec<FragmentGroup>,
    pub closed: Vec<FragmentGroup>,
}

impl BruteForceResult {
    pub fn maximal_set(&self) -> BTreeSet<String> {
        self.maximal.iter().map(|g| g.pref_code.to_string()).collect()
    }

    pub fn closed_set(&self) -> BTreeSet<String> {
        self.closed.iter().map(|g| g.pref_code.to_string()).collect()
    }
}

/// Definitional miner over all O(n²) fragments. Refuses series longer than
/// `cap`.
pub fn brute_force_mine(series: &Series, params: MiningParams, cap: usize) -> Result<BruteForceResult> {
    let n = series.len();
    if n > cap {
        return Err(Error::OverCap { n, cap });
    }
    let tau = params.tau();
    let mut out = BruteForceResult::default();
    if n == 0 {
        return Ok(out);
    }
    let tables = (1..=n)
        .map(|m| LevelTable::from_scratch(series, m))
        .collect::<Result<Vec<_>>>()?;
    for m in 1..=n {
        let here = &tables[m - 1];
        let next = tables.get(m);
        for g in &here.groups {
            let size = g.starts.len();
            if size < tau {
                continue;
            }
            let mut right_max = true;
            let mut left_max = true;
            let mut right_closed = false;
            let mut left_closed = false;
            for &i in &g.starts {
                if i + m < n {
                    let ext = next.expect("longer level exists").size_of_window(i);
                    right_max &= ext < tau;
                    right_closed |= ext < size;
                } else {
                    right_closed = true;
                }
                if i > 0 {
                    let ext = next.expect("longer level exists").size_of_window(i - 1);
                    left_max &= ext < tau;
                    left_closed |= ext < size;
                } else {
                    left_closed = true;
                }
            }
            if right_max && left_max {
                out.maximal.push(g.clone());
            }
            if right_closed && left_closed {
                out.closed.push(g.clone());
            }
        }
    }
    Ok(out)
}

/// Group ids for one level of the Apriori miners. Windows whose group is
/// already infrequent carry `INACTIVE`.
struct Level {
    length: usize,
    group_of: Vec<u32>,
    sizes: Vec<u32>,
}

const INACTIVE: u32 = u32::MAX;

impl Level {
    fn first(n: usize) -> Self {
        Level {
            length: 1,
            group_of: vec![0; n],
            sizes: vec![n as u32],
        }
    }

    fn size(&self, i: usize) -> u32 {
        match self.group_of[i] {
            INACTIVE => 0,
            g => self.sizes[g as usize],
        }
    }

    /// Extends every window in a frequent group by one letter.
    fn refine<O: LetterOracle>(&self, oracle: &O, tau: u32) -> Level {
        let n = oracle.len();
        let m = self.length;
        let mut index: HashMap<(u32, CodePair), u32> = HashMap::new();
        let mut sizes: Vec<u32> = Vec::new();
        let group_of = (0..n - m)
            .map(|i| {
                let g = self.group_of[i];
                if g == INACTIVE || self.sizes[g as usize] < tau {
                    return INACTIVE;
                }
                let code = oracle.last_code_in(i, i + m);
                let id = *index.entry((g, code)).or_insert_with(|| {
                    sizes.push(0);
                    sizes.len() as u32 - 1
                });
                sizes[id as usize] += 1;
                id
            })
            .collect();
        Level {
            length: m + 1,
            group_of,
            sizes,
        }
    }

    fn has_frequent(&self, tau: u32) -> bool {
        self.sizes.iter().any(|&s| s >= tau)
    }
}

#[derive(Clone, Copy)]
enum Target {
    Maximal,
    Closed,
}

fn apriori<O: LetterOracle>(oracle: &O, params: MiningParams, target: Target) -> Vec<PatternReport> {
    let n = oracle.len();
    let tau = params.tau() as u32;
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut level = Level::first(n);
    while level.has_frequent(tau) {
        let m = level.length;
        let next = if m < n {
            level.refine(oracle, tau)
        } else {
            Level {
                length: m + 1,
                group_of: Vec::new(),
                sizes: Vec::new(),
            }
        };
        // Per frequent group: (first start, right ok, left ok) accumulated
        // over its members. An inactive extension is a window whose prefix
        // group is infrequent, so it is smaller than both τ and this group.
        let groups = level.sizes.len();
        let mut first = vec![usize::MAX; groups];
        let mut right = vec![matches!(target, Target::Maximal); groups];
        let mut left = vec![matches!(target, Target::Maximal); groups];
        for i in 0..level.group_of.len() {
            let g = level.group_of[i];
            if g == INACTIVE || level.sizes[g as usize] < tau {
                continue;
            }
            let gi = g as usize;
            let size = level.sizes[gi];
            first[gi] = first[gi].min(i);
            let right_ext = (i + m < n).then(|| next.size(i));
            let left_ext = (i > 0).then(|| next.size(i - 1));
            match target {
                Target::Maximal => {
                    right[gi] &= right_ext.is_none_or(|s| s < tau);
                    left[gi] &= left_ext.is_none_or(|s| s < tau);
                }
                Target::Closed => {
                    right[gi] |= right_ext.is_none_or(|s| s < size);
                    left[gi] |= left_ext.is_none_or(|s| s < size);
                }
            }
        }
        for g in 0..groups {
            if level.sizes[g] >= tau && right[g] && left[g] {
                out.push(PatternReport {
                    witness_start: first[g],
                    length: m,
                    frequency: level.sizes[g] as usize,
                    node: None,
                });
            }
        }
        level = next;
    }
    out.sort_by_key(|r| (r.witness_start, r.length));
    out
}

/// Levelwise maximal miner.
pub fn ba_mp<O: LetterOracle>(oracle: &O, params: MiningParams) -> Vec<PatternReport> {
    apriori(oracle, params, Target::Maximal)
}

/// Levelwise closed miner.
pub fn ba_cp<O: LetterOracle>(oracle: &O, params: MiningParams) -> Vec<PatternReport> {
    apriori(oracle, params, Target::Closed)
}

/// Canonical `PrefCode` strings of a report list, for set comparison.
pub fn canonical_set(series: &Series, reports: &[PatternReport]) -> Result<BTreeSet<String>> {
    reports
        .iter()
        .map(|r| Ok(series.pref_code(r.witness_start, r.witness_end())?.to_string()))
        .collect()
}

/// Number of windows whose `PrefCode` equals `p`.
pub fn count_occurrences<O: LetterOracle>(oracle: &O, p: &PrefCode) -> usize {
    let n = oracle.len();
    let k = p.len();
    if k == 0 || k > n {
        return 0;
    }
    (0..=n - k)
        .filter(|&i| {
            p.codes()
                .iter()
                .enumerate()
                .all(|(d, &c)| oracle.last_code_in(i, i + d) == c)
        })
        .count()
}

/// Row-major counts: one row per oracle, one column per pattern.
pub fn feature_matrix<O: LetterOracle>(oracles: &[O], patterns: &[PrefCode]) -> Result<Vec<Vec<usize>>> {
    if oracles.is_empty() {
        return Err(Error::EmptyInput);
    }
    if patterns.is_empty() {
        return Err(Error::MalformedInput("empty pattern set".into()));
    }
    Ok(oracles
        .iter()
        .map(|o| patterns.iter().map(|p| count_occurrences(o, p)).collect())
        .collect())
}
