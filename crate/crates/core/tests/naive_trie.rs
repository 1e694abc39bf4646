// Compares the built tree with facts derived from per-fragment PrefCodes
// computed from scratch, without any tree.

use std::collections::{BTreeMap, BTreeSet};

use opst::codes::{PrefCode, Series};
use opst::tree::{build_opst, Opst};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// For every pattern occurring in `w`: its start positions, and the set of
/// one-letter continuations (`None` when the suffix ends).
struct Naive {
    starts: BTreeMap<PrefCode, Vec<usize>>,
    continuations: BTreeMap<PrefCode, BTreeSet<Option<PrefCode>>>,
}

fn naive(s: &Series) -> Naive {
    let n = s.len();
    let mut starts: BTreeMap<PrefCode, Vec<usize>> = BTreeMap::new();
    let mut continuations: BTreeMap<PrefCode, BTreeSet<Option<PrefCode>>> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let code = s.pref_code(i, j).unwrap();
            starts.entry(code.clone()).or_default().push(i);
            let next = (j + 1 < n).then(|| s.pref_code(i, j + 1).unwrap());
            continuations.entry(code).or_default().insert(next);
        }
    }
    Naive { starts, continuations }
}

fn check(t: &Opst, s: &Series) {
    let nv = naive(s);
    let n = s.len();
    let counts = t.leaf_counts();
    let mut seen_branching = BTreeSet::new();
    for (k, node) in t.nodes().iter().enumerate() {
        let v = opst::tree::NodeId(k as u32);
        if v == t.root() {
            continue;
        }
        let code = t.path_code(v);
        assert_eq!(code.len(), node.depth as usize);
        let starts = &nv.starts[&code];
        if let Some(label) = node.leaf_label() {
            // a `$`-leaf shares its parent's path, so it is identified by
            // its label rather than by the earliest occurrence
            assert_eq!(node.witness, label);
            assert_eq!(counts[k], 1);
            assert_eq!(node.depth as usize, n - label as usize);
            assert!(starts.contains(&(label as usize)));
        } else {
            assert_eq!(node.witness as usize, starts[0], "witness of {code}");
            assert_eq!(counts[k] as usize, starts.len(), "count of {code}");
            let branching = nv.continuations[&code].len() >= 2;
            assert_eq!(node.children.len() >= 2, branching, "branching of {code}");
            if branching {
                seen_branching.insert(code);
            }
        }
    }
    let expected: BTreeSet<PrefCode> = nv
        .continuations
        .iter()
        .filter(|(_, c)| c.len() >= 2)
        .map(|(p, _)| p.clone())
        .collect();
    assert_eq!(seen_branching, expected);
    for i in 0..n {
        assert_eq!(t.path_code(t.leaf(i)), s.pref_code(i, n - 1).unwrap());
    }
}

#[test]
fn random_series_match_naive_grouping() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let n = rng.gen_range(1..30);
        let sigma = rng.gen_range(1..7);
        let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
        let s = Series::from_letters(&raw).unwrap();
        check(&build_opst(s.clone()), &s);
    }
}

#[test]
fn structured_series_match_naive_grouping() {
    let shapes: Vec<Vec<u32>> = vec![
        vec![5; 20],
        (0..25).collect(),
        (0..25).rev().collect(),
        (0..30).map(|k| k % 3).collect(),
        (0..30).map(|k| (k * 7) % 11).collect(),
        vec![1, 2, 4, 4, 2, 5, 5, 1],
    ];
    for raw in shapes {
        let s = Series::from_letters(&raw).unwrap();
        check(&build_opst(s.clone()), &s);
    }
}

#[test]
fn long_fragments_use_the_wavelet_path() {
    // Depths past the scan cutoff exercise wavelet queries during the build.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let block: Vec<u32> = (0..45).map(|_| rng.gen_range(0..9)).collect();
    let raw: Vec<u32> = block.iter().chain(&block).chain(&block[..20]).copied().collect();
    let s = Series::from_letters(&raw).unwrap();
    let t = build_opst(s.clone());
    assert!(t.nodes().iter().any(|v| v.depth > 40 && v.leaf_label().is_none()));
    check(&t, &s);
}
