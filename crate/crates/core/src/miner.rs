//! Maximal and closed frequent order-preserving pattern mining over a built
//! tree. Both miners are a fixed number of passes over the explicit nodes, so
//! their work does not depend on the frequency threshold.

use crate::codes::{PrefCode, RankSeq};
use crate::error::{Error, Result};
use crate::lca::LcaIndex;
use crate::oracle::LetterOracle;
use crate::tree::{NodeId, Opst};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningParams {
    tau: usize,
}

impl MiningParams {
    pub fn new(tau: usize) -> Result<Self> {
        if tau <= 1 {
            return Err(Error::InvalidTau(tau));
        }
        Ok(MiningParams { tau })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }
}

/// A mined pattern, reported as the fragment
/// `[witness_start, witness_start + length - 1]` of the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternReport {
    pub witness_start: usize,
    pub length: usize,
    pub frequency: usize,
    /// Tree node for tree-based miners; `None` for the baselines.
    pub node: Option<NodeId>,
}

impl PatternReport {
    pub fn witness_end(&self) -> usize {
        self.witness_start + self.length - 1
    }
}

/// Per-node values computed by a mining run. Vectors a run does not use are
/// left empty.
#[derive(Debug, Clone, Default)]
pub struct NodeAnnotations {
    pub count: Vec<u32>,
    pub left_max: Vec<bool>,
    pub frequent_incoming_link: Vec<bool>,
    pub val: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub reports: Vec<PatternReport>,
    pub annotations: NodeAnnotations,
    /// Node visits over all passes.
    pub node_visits: u64,
}

/// Shared per-tree state: traversal order and leaf counts.
pub struct Miner<'a, O: LetterOracle> {
    tree: &'a Opst<O>,
    order: Vec<NodeId>,
    counts: Vec<u32>,
}

impl<'a, O: LetterOracle> Miner<'a, O> {
    pub fn new(tree: &'a Opst<O>) -> Self {
        let order = tree.preorder();
        let mut counts = vec![0u32; tree.node_count()];
        for &v in order.iter().rev() {
            let node = tree.node(v);
            counts[v.index()] = if node.is_leaf() {
                1
            } else {
                node.children.iter().map(|&(_, c)| counts[c.index()]).sum()
            };
        }
        Miner {
            tree,
            order,
            counts,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn report(&self, v: NodeId) -> PatternReport {
        PatternReport {
            witness_start: self.tree.witness(v),
            length: self.tree.depth(v),
            frequency: self.counts[v.index()] as usize,
            node: Some(v),
        }
    }

    /// Deepest explicit node at or above the locus of `z`'s pattern minus its
    /// first letter.
    fn link_anchor(&self, z: NodeId) -> NodeId {
        let t = self.tree;
        let locus = t.suffix_link_locus(z);
        if t.depth(locus.node) == locus.depth {
            locus.node
        } else {
            t.node(locus.node).parent.expect("implicit locus has a parent")
        }
    }

    /// All τ-maximal τ-frequent patterns.
    ///
    /// Candidates are nodes with at least τ leaves and no child reaching τ,
    /// i.e. right-maximal frequent patterns. A node fails left-maximality if
    /// some frequent node one letter longer links into it or below it; that
    /// failure propagates to every ancestor.
    pub fn maximal(&self, params: MiningParams) -> MiningOutcome {
        let t = self.tree;
        let tau = params.tau() as u32;
        let size = t.node_count();
        let mut visits = 0u64;
        let mut candidate = vec![false; size];
        let mut incoming = vec![false; size];

        for &v in &self.order {
            visits += 1;
            let node = t.node(v);
            if v == t.root() || node.is_leaf() || self.counts[v.index()] < tau {
                continue;
            }
            candidate[v.index()] = node
                .children
                .iter()
                .all(|&(_, c)| self.counts[c.index()] < tau);
            incoming[self.link_anchor(v).index()] = true;
        }

        let mut left_max = vec![true; size];
        let mut reports = Vec::new();
        for &v in self.order.iter().rev() {
            visits += 1;
            let node = t.node(v);
            left_max[v.index()] = !incoming[v.index()]
                && node.children.iter().all(|&(_, c)| left_max[c.index()]);
            if candidate[v.index()] && left_max[v.index()] {
                reports.push(self.report(v));
            }
        }
        sort_reports(&mut reports);
        MiningOutcome {
            reports,
            annotations: NodeAnnotations {
                count: self.counts.clone(),
                left_max,
                frequent_incoming_link: incoming,
                val: Vec::new(),
            },
            node_visits: visits,
        }
    }

    /// All closed τ-frequent patterns.
    ///
    /// Candidates are branching nodes with at least τ leaves. `val(v)` is the
    /// string depth of the LCA of the leaves one position left of `v`'s
    /// leaves (0 if one of them would be position -1); `v` is left-closed iff
    /// `val(v) <= Depth(v)`.
    pub fn closed(&self, lca: &LcaIndex, params: MiningParams) -> MiningOutcome {
        let t = self.tree;
        let n = t.len();
        let tau = params.tau() as u32;
        let size = t.node_count();
        let mut visits = 0u64;
        let mut val = vec![0u32; size];
        let shifted_leaf = |start: usize| -> Option<NodeId> { (start > 0).then(|| t.leaf(start - 1)) };

        let mut reports = Vec::new();
        for &v in self.order.iter().rev() {
            visits += 1;
            let node = t.node(v);
            if let Some(label) = node.leaf_label() {
                val[v.index()] = if label == 0 { 0 } else { (n - label as usize + 1) as u32 };
                continue;
            }
            let mine = shifted_leaf(t.witness(v));
            let mut best = u32::MAX;
            for &(_, c) in &node.children {
                best = best.min(val[c.index()]);
                let joint = match (mine, shifted_leaf(t.witness(c))) {
                    (Some(a), Some(b)) => t.depth(lca.lca_unchecked(a, b)) as u32,
                    _ => 0,
                };
                best = best.min(joint);
            }
            val[v.index()] = best;
            let closed_left = (best as usize) < t.depth(v) + 1;
            if v != t.root() && node.is_branching() && self.counts[v.index()] >= tau && closed_left {
                reports.push(self.report(v));
            }
        }
        sort_reports(&mut reports);
        MiningOutcome {
            reports,
            annotations: NodeAnnotations {
                count: self.counts.clone(),
                left_max: Vec::new(),
                frequent_incoming_link: Vec::new(),
                val,
            },
            node_visits: visits,
        }
    }
}

fn sort_reports(reports: &mut [PatternReport]) {
    reports.sort_by_key(|r| (r.witness_start, r.length));
}

pub fn mine_maximal<O: LetterOracle>(t: &Opst<O>, params: MiningParams) -> Vec<PatternReport> {
    Miner::new(t).maximal(params).reports
}

pub fn mine_closed<O: LetterOracle>(
    t: &Opst<O>,
    lca: &LcaIndex,
    params: MiningParams,
) -> Vec<PatternReport> {
    Miner::new(t).closed(lca, params).reports
}

/// `PrefCode` and ranks of a report's witness fragment.
pub fn decode_report<O: LetterOracle>(t: &Opst<O>, r: &PatternReport) -> Result<(PrefCode, RankSeq)> {
    if r.length == 0 {
        return Err(Error::InvalidRange {
            i: r.witness_start,
            j: r.witness_start,
            n: t.len(),
        });
    }
    let series = t.series();
    let end = r.witness_end();
    Ok((series.pref_code(r.witness_start, end)?, series.rank_pattern(r.witness_start, end)?))
}
