//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the criteria execute in order and timings are not disturbed by
//! parallel tests. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use opst::audit::verify_structure;
use opst::baseline::{ba_cp, ba_mp, brute_force_mine, canonical_set};
use opst::check::{random_instance, CheckConfig, Instance};
use opst::codes::{Series, Symbol};
use opst::lca::LcaIndex;
use opst::miner::{mine_closed, mine_maximal, Miner, MiningParams};
use opst::oracle::{LetterOracle, WaveletOracle};
use opst::tree::{build_opst, NodeId, Opst};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SAMPLE: [u32; 8] = [1, 2, 4, 4, 2, 5, 5, 1];

fn sample() -> Series {
    Series::from_letters(&SAMPLE).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn golden_maximal() -> Outcome {
    let start = Instant::now();
    let s = sample();
    let t = build_opst(s.clone());
    let reports = mine_maximal(&t, MiningParams::new(2).unwrap());
    let took = within(start, Duration::from_secs(1))?;
    ensure(reports.len() == 2, || format!("{} patterns, expected 2", reports.len()))?;
    let got = canonical_set(&s, &reports).unwrap();
    let want: BTreeSet<String> = [(1, 3), (2, 4)]
        .iter()
        .map(|&(i, j)| s.pref_code(i, j).unwrap().to_string())
        .collect();
    ensure(got == want, || format!("got {got:?}, expected {want:?}"))?;
    Ok(format!("witnesses [1,3] and [2,4] in {took:.2?}"))
}

fn golden_closed() -> Outcome {
    let start = Instant::now();
    let s = sample();
    let t = build_opst(s.clone());
    let lca = LcaIndex::build(&t);
    let reports = mine_closed(&t, &lca, MiningParams::new(2).unwrap());
    let took = within(start, Duration::from_secs(1))?;
    let got = canonical_set(&s, &reports).unwrap();
    let want: BTreeSet<String> = ["(-1,-1)", "(-1,-1)(0,-1)", "(-1,-1)(0,-1)(1,1)", "(-1,-1)(0,0)(-1,1)"]
        .iter()
        .map(|c| c.to_string())
        .collect();
    // the expected list is itself confirmed by the definitional oracle first
    let bf = brute_force_mine(&s, MiningParams::new(2).unwrap(), 64).unwrap();
    ensure(bf.closed_set() == want, || format!("brute force gives {:?}", bf.closed_set()))?;
    ensure(reports.len() == 4 && got == want, || format!("got {got:?}"))?;
    Ok(format!("4 closed patterns, confirmed by brute force, in {took:.2?}"))
}

fn structure_golden() -> Outcome {
    let t = build_opst(sample());
    let expected = [
        "(-1,-1) (0,-1) (1,-1) (2,2) (1,1) (3,-1) (5,5) (0,0) $",
        "(-1,-1) (0,-1) (1,1) (0,0) (2,-1) (4,4) (-1,3) $",
        "(-1,-1) (0,0) (-1,1) (1,-1) (3,3) (-1,2) $",
        "(-1,-1) (-1,0) (0,-1) (2,2) (-1,1) $",
        "(-1,-1) (0,-1) (1,1) (-1,0) $",
        "(-1,-1) (0,0) (-1,1) $",
        "(-1,-1) (-1,0) $",
        "(-1,-1) $",
    ];
    for (i, line) in expected.iter().enumerate() {
        let got = t
            .suffix_code(i)
            .iter()
            .map(Symbol::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        ensure(got == *line, || format!("suffix {i}: {got}"))?;
    }
    let leaves = t.nodes().iter().filter(|v| v.leaf_label().is_some()).count();
    ensure(leaves == 8, || format!("{leaves} leaves"))?;
    let v2 = t.locus(1, 3).unwrap().node;
    let link = t.node(v2).suffix_link.ok_or("node of w[1..3] has no stored link")?;
    let target = t.node(link);
    ensure(target.children.len() == 1 && target.leaf_label().is_none(), || {
        format!("link target has {} children", target.children.len())
    })?;
    Ok("8 suffix codes exact, 8 leaves, link of w[1..3] is explicit non-branching".into())
}

fn criterion_instances() -> Vec<Instance> {
    let cfg = CheckConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..1000).map(|_| random_instance(&mut rng, &cfg)).collect()
}

struct MinedSets {
    tree_max: BTreeSet<String>,
    tree_closed: BTreeSet<String>,
}

fn oracle_equivalence(instances: &[Instance], mined: &mut Vec<MinedSets>) -> Outcome {
    let start = Instant::now();
    for (k, inst) in instances.iter().enumerate() {
        let s = Series::from_letters(&inst.letters).unwrap();
        let p = MiningParams::new(inst.tau).unwrap();
        let t = build_opst(s.clone());
        let lca = LcaIndex::build(&t);
        let miner = Miner::new(&t);
        let tree_max = canonical_set(&s, &miner.maximal(p).reports).unwrap();
        let tree_closed = canonical_set(&s, &miner.closed(&lca, p).reports).unwrap();
        let o = WaveletOracle::build(s.clone());
        let mp = canonical_set(&s, &ba_mp(&o, p)).unwrap();
        let cp = canonical_set(&s, &ba_cp(&o, p)).unwrap();
        let bf = brute_force_mine(&s, p, 64).unwrap();
        ensure(tree_max == mp && mp == bf.maximal_set(), || format!("maximal sets diverge on instance {k}: {inst}"))?;
        ensure(tree_closed == cp && cp == bf.closed_set(), || format!("closed sets diverge on instance {k}: {inst}"))?;
        mined.push(MinedSets { tree_max, tree_closed });
    }
    let took = within(start, Duration::from_secs(120))?;
    Ok(format!("{} instances, zero divergences, {took:.2?}", instances.len()))
}

fn structural_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let n = rng.gen_range(1..=300);
        let sigma = rng.gen_range(1..=24u32);
        let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
        let s = Series::from_letters(&raw).unwrap();
        let (n, sigma) = (s.len() as u64, s.sigma() as u64);
        let t = build_opst(s);
        let report = verify_structure(&t).map_err(|e| format!("tree {k}: {e}"))?;
        ensure(report.leaves as u64 == n, || format!("tree {k}: {} leaves", report.leaves))?;
        let bound = n * (2 * sigma + 5) + 5 * n;
        let moves = t.stats().moves();
        ensure(moves <= bound, || format!("tree {k}: {moves} moves > {bound}"))?;
        worst = worst.max(moves as f64 / bound as f64);
    }
    Ok(format!("1000 trees; bounds hold; max moves/bound = {worst:.3}"))
}

fn oracle_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut queries = 0u64;
    for k in 0..200 {
        let n = rng.gen_range(1..=64);
        let sigma = rng.gen_range(1..=40u32);
        let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
        let s = Series::from_letters(&raw).unwrap();
        let o = WaveletOracle::build(s.clone());
        for i in 0..n {
            for j in i..n {
                let want = s.last_code_naive(i, j).unwrap();
                ensure(o.last_code_wavelet(i, j) == want && o.last_code_in(i, j) == want, || {
                    format!("series {k}: LastCode({i},{j}) differs")
                })?;
                queries += 1;
            }
        }
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("200 series, {queries} ranges, zero divergences, {took:.2?}"))
}

fn naive_lca(parent: &[Option<usize>], depth: &[usize], mut u: usize, mut v: usize) -> usize {
    while depth[u] > depth[v] {
        u = parent[u].unwrap();
    }
    while depth[v] > depth[u] {
        v = parent[v].unwrap();
    }
    while u != v {
        u = parent[u].unwrap();
        v = parent[v].unwrap();
    }
    u
}

fn check_all_pairs(count: usize, parent: &[Option<usize>], ix: &LcaIndex) -> Result<u64, String> {
    let depth: Vec<usize> = (0..count)
        .map(|v| std::iter::successors(parent[v], |&p| parent[p]).count())
        .collect();
    for u in 0..count {
        for v in 0..count {
            let got = ix.lca(NodeId(u as u32), NodeId(v as u32)).unwrap().index();
            let want = naive_lca(parent, &depth, u, v);
            ensure(got == want, || format!("lca({u},{v}) = {got}, expected {want}"))?;
        }
    }
    Ok((count * count) as u64)
}

fn lca_exhaustive() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0;
    for _ in 0..20 {
        let count = rng.gen_range(1..=500);
        let parent: Vec<Option<usize>> = (0..count).map(|v| (v > 0).then(|| rng.gen_range(0..v))).collect();
        let mut kids = vec![Vec::new(); count];
        for v in 1..count {
            kids[parent[v].unwrap()].push(NodeId(v as u32));
        }
        let ix = LcaIndex::from_children(count, NodeId(0), |v| kids[v.index()].clone().into_iter());
        pairs += check_all_pairs(count, &parent, &ix)?;
    }
    for _ in 0..10 {
        let n = rng.gen_range(20..=150);
        let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..6)).collect();
        let t = build_opst(Series::from_letters(&raw).unwrap());
        let count = t.node_count();
        let parent: Vec<Option<usize>> = t.nodes().iter().map(|v| v.parent.map(NodeId::index)).collect();
        pairs += check_all_pairs(count, &parent, &LcaIndex::build(&t))?;
    }
    Ok(format!("{pairs} node pairs on random and built trees, zero divergences"))
}

fn random_series(n: usize, sigma: u32, seed: u64) -> Series {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
    Series::from_letters(&raw).unwrap()
}

fn best_build_secs(s: &Series, reps: usize) -> f64 {
    (0..reps)
        .map(|_| {
            let input = s.clone();
            let start = Instant::now();
            let t: Opst = build_opst(input);
            let secs = start.elapsed().as_secs_f64();
            drop(t);
            secs
        })
        .fold(f64::INFINITY, f64::min)
}

fn desk_scale_performance() -> Outcome {
    let mut times = Vec::new();
    for k in 16..=20u32 {
        let s = random_series(1 << k, 256, k as u64);
        times.push((k, best_build_secs(&s, 5)));
    }
    let mut ratios = Vec::new();
    for w in times.windows(2) {
        let r = w[1].1 / w[0].1;
        ratios.push(r);
        ensure(r <= 2.5, || format!("2^{} -> 2^{} ratio {r:.2}", w[0].0, w[1].0))?;
    }
    let largest = times.last().unwrap().1;
    ensure(largest <= 60.0, || format!("n = 2^20 took {largest:.1} s"))?;

    let mut sweep = Vec::new();
    for sigma in [4u32, 64, 1024, 4096] {
        let s = random_series(1 << 19, sigma, 100 + sigma as u64);
        sweep.push(best_build_secs(&s, 3));
    }
    let (lo, hi) = sweep
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    ensure(hi / lo <= 2.0, || format!("sigma sweep max/min {:.2} ({sweep:?})", hi / lo))?;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    Ok(format!(
        "doubling ratios [{}], 2^20 in {largest:.2} s, sigma sweep max/min {:.2}",
        shown.join(", "),
        hi / lo
    ))
}

fn tau_independence() -> Outcome {
    let t = build_opst(random_series(20_000, 8, 9));
    let lca = LcaIndex::build(&t);
    let miner = Miner::new(&t);
    let visits: Vec<(u64, u64)> = [2, 10, 1000]
        .iter()
        .map(|&tau| {
            let p = MiningParams::new(tau).unwrap();
            (miner.maximal(p).node_visits, miner.closed(&lca, p).node_visits)
        })
        .collect();
    ensure(visits.windows(2).all(|w| w[0] == w[1]), || format!("visits vary: {visits:?}"))?;
    Ok(format!("maximal {} and closed {} visits for every tau", visits[0].0, visits[0].1))
}

fn containment(mined: &[MinedSets]) -> Outcome {
    ensure(mined.len() == 1000, || format!("only {} instances were mined", mined.len()))?;
    for (k, m) in mined.iter().enumerate() {
        ensure(m.tree_max.is_subset(&m.tree_closed), || format!("instance {k}: maximal pattern not closed"))?;
    }
    Ok("maximal set within closed set on all 1000 instances".into())
}

fn main() -> ExitCode {
    let instances = criterion_instances();
    let mut mined = Vec::new();
    let mut failed = 0;
    let mut report = |k: u32, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS criterion {k} ({name}): {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL criterion {k} ({name}): {detail}");
        }
    };
    report(1, "golden maximal", golden_maximal());
    report(2, "golden closed", golden_closed());
    report(3, "structure golden", structure_golden());
    report(4, "oracle equivalence", oracle_equivalence(&instances, &mut mined));
    report(5, "structural invariants", structural_invariants());
    report(6, "letter oracle exhaustive", oracle_exhaustive());
    report(7, "lca exhaustive", lca_exhaustive());
    report(8, "desk-scale performance", desk_scale_performance());
    report(9, "tau independence", tau_independence());
    report(10, "containment", containment(&mined));
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
