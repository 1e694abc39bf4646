//! Randomized cross-check of the tree miners against both baselines.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::{ba_cp, ba_mp, brute_force_mine, canonical_set, count_occurrences};
use crate::codes::Series;
use crate::error::Result;
use crate::lca::LcaIndex;
use crate::miner::{Miner, MiningParams, PatternReport};
use crate::tree::build_opst;

/// Deliberate miner bugs, used to show the harness catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Report right-maximal frequent nodes without the left-maximality test.
    SkipLeftMaximality,
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub seed: u64,
    pub instances: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub max_sigma: u32,
    pub taus: Vec<usize>,
    pub fault: Option<Fault>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            instances: 1000,
            min_n: 2,
            max_n: 40,
            max_sigma: 6,
            taus: vec![2, 3, 5],
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub letters: Vec<u32>,
    pub tau: usize,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.letters.iter().map(|c| c.to_string()).collect();
        write!(f, "series=[{}] tau={}", text.join(" "), self.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Maximal,
    Closed,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Maximal => "maximal",
            Mode::Closed => "closed",
        })
    }
}

/// What went wrong on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Sets {
        mode: Mode,
        tree: BTreeSet<String>,
        apriori: BTreeSet<String>,
        brute_force: BTreeSet<String>,
    },
    Frequency {
        mode: Mode,
        pattern: String,
        reported: usize,
        counted: usize,
    },
    /// A maximal pattern missing from the closed set.
    Containment { pattern: String },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
        match self {
            Mismatch::Sets {
                mode,
                tree,
                apriori,
                brute_force,
            } => write!(
                f,
                "{mode} sets differ: tree={{{}}} apriori={{{}}} brute-force={{{}}}",
                join(tree),
                join(apriori),
                join(brute_force)
            ),
            Mismatch::Frequency {
                mode,
                pattern,
                reported,
                counted,
            } => write!(f, "{mode} pattern {pattern} reported {reported} times, counted {counted}"),
            Mismatch::Containment { pattern } => write!(f, "maximal pattern {pattern} is not closed"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Divergence {
    pub index: usize,
    pub instance: Instance,
    pub mismatch: Mismatch,
    /// Smallest instance found that still diverges.
    pub reproducer: Instance,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub instances_run: usize,
    pub divergence: Option<Divergence>,
}

impl CheckReport {
    pub fn all_equivalent(&self) -> bool {
        self.divergence.is_none()
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Instance {
    let n = rng.gen_range(cfg.min_n..=cfg.max_n.max(cfg.min_n));
    let sigma = rng.gen_range(1..=cfg.max_sigma.max(1));
    let letters = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
    let tau = cfg.taus[rng.gen_range(0..cfg.taus.len())];
    Instance { letters, tau }
}

fn tree_reports(series: &Series, tau: MiningParams, fault: Option<Fault>) -> (Vec<PatternReport>, Vec<PatternReport>) {
    let t = build_opst(series.clone());
    let lca = LcaIndex::build(&t);
    let miner = Miner::new(&t);
    let closed = miner.closed(&lca, tau).reports;
    let maximal = match fault {
        None => miner.maximal(tau).reports,
        Some(Fault::SkipLeftMaximality) => {
            let counts = miner.counts();
            let frequent = |v: usize| counts[v] as usize >= tau.tau();
            t.preorder()
                .into_iter()
                .filter(|&v| {
                    let node = t.node(v);
                    v != t.root()
                        && !node.is_leaf()
                        && frequent(v.index())
                        && node.children.iter().all(|&(_, c)| !frequent(c.index()))
                })
                .map(|v| PatternReport {
                    witness_start: t.witness(v),
                    length: t.depth(v),
                    frequency: counts[v.index()] as usize,
                    node: Some(v),
                })
                .collect()
        }
    };
    (maximal, closed)
}

/// Runs all miners on one instance and returns the first disagreement.
pub fn check_instance(inst: &Instance, fault: Option<Fault>) -> Result<Option<Mismatch>> {
    let series = Series::from_letters(&inst.letters)?;
    let tau = MiningParams::new(inst.tau)?;
    let (tree_max, tree_closed) = tree_reports(&series, tau, fault);
    let oracle = crate::oracle::WaveletOracle::build(series.clone());
    let brute = brute_force_mine(&series, tau, series.len().max(1))?;

    let cases = [
        (Mode::Maximal, &tree_max, ba_mp(&oracle, tau), brute.maximal_set()),
        (Mode::Closed, &tree_closed, ba_cp(&oracle, tau), brute.closed_set()),
    ];
    for (mode, tree, apriori, brute_force) in cases {
        let tree_set = canonical_set(&series, tree)?;
        let apriori_set = canonical_set(&series, &apriori)?;
        if tree_set != brute_force || apriori_set != brute_force || tree_set.len() != tree.len() {
            return Ok(Some(Mismatch::Sets {
                mode,
                tree: tree_set,
                apriori: apriori_set,
                brute_force,
            }));
        }
        for r in tree.iter().chain(&apriori) {
            let code = series.pref_code(r.witness_start, r.witness_end())?;
            let counted = count_occurrences(&oracle, &code);
            if counted != r.frequency {
                return Ok(Some(Mismatch::Frequency {
                    mode,
                    pattern: code.to_string(),
                    reported: r.frequency,
                    counted,
                }));
            }
        }
    }
    let closed = canonical_set(&series, &tree_closed)?;
    for pattern in canonical_set(&series, &tree_max)? {
        if !closed.contains(&pattern) {
            return Ok(Some(Mismatch::Containment { pattern }));
        }
    }
    Ok(None)
}

/// Greedily deletes letters and lowers τ while the instance still diverges.
pub fn shrink(inst: &Instance, fault: Option<Fault>) -> Instance {
    let fails = |cand: &Instance| matches!(check_instance(cand, fault), Ok(Some(_)));
    let mut best = inst.clone();
    loop {
        let mut improved = false;
        for k in 0..best.letters.len() {
            if best.letters.len() <= 1 {
                break;
            }
            let mut cand = best.clone();
            cand.letters.remove(k);
            if fails(&cand) {
                best = cand;
                improved = true;
                break;
            }
        }
        if !improved && best.tau > 2 {
            let cand = Instance {
                tau: best.tau - 1,
                ..best.clone()
            };
            if fails(&cand) {
                best = cand;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    // Present the letters as dense ranks.
    if let Ok(s) = Series::from_letters(&best.letters) {
        best.letters = s.letters().to_vec();
    }
    best
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for index in 0..cfg.instances {
        let instance = random_instance(&mut rng, cfg);
        if let Some(mismatch) = check_instance(&instance, cfg.fault)? {
            let reproducer = shrink(&instance, cfg.fault);
            return Ok(CheckReport {
                instances_run: index + 1,
                divergence: Some(Divergence {
                    index,
                    instance,
                    mismatch,
                    reproducer,
                }),
            });
        }
    }
    Ok(CheckReport {
        instances_run: cfg.instances,
        divergence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_clean() {
        let cfg = CheckConfig {
            instances: 200,
            ..CheckConfig::default()
        };
        let report = run_check(&cfg).unwrap();
        if let Some(d) = &report.divergence {
            panic!("{} on {}; reproducer {}", d.mismatch, d.instance, d.reproducer);
        }
        assert_eq!(report.instances_run, 200);
    }

    #[test]
    fn injected_fault_is_caught_and_shrunk() {
        let cfg = CheckConfig {
            instances: 200,
            fault: Some(Fault::SkipLeftMaximality),
            ..CheckConfig::default()
        };
        let report = run_check(&cfg).unwrap();
        let d = report.divergence.expect("fault must be detected");
        assert!(d.reproducer.letters.len() <= d.instance.letters.len());
        assert!(check_instance(&d.reproducer, cfg.fault).unwrap().is_some());
        assert!(check_instance(&d.reproducer, None).unwrap().is_none());
    }

    #[test]
    fn same_seed_same_instances() {
        let cfg = CheckConfig::default();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            assert_eq!(random_instance(&mut a, &cfg), random_instance(&mut b, &cfg));
        }
    }
}
