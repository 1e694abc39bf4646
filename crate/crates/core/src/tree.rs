//! Order-preserving suffix tree: a compacted trie over the `PrefCode`s of all
//! suffixes, each terminated by `$`, with suffix links.
//!
//! Construction inserts suffixes longest first in McCreight style. Scanning
//! below the active point compares codes through the letter oracle; the
//! suffix link of each attach point is computed by walking up to the nearest
//! linked ancestor, following its link and hopping back down. Unlike the
//! classical tree, that walk may have to materialize a non-branching node.

use std::fmt;

use smallvec::SmallVec;

use crate::codes::{code_to_int_unchecked, ChildKey, CodePair, PrefCode, Series, Symbol};
use crate::error::{Error, Result};
use crate::oracle::{LetterOracle, WaveletOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Child list, sorted by key; two entries fit without a heap allocation.
pub type Children = SmallVec<[(ChildKey, NodeId); 2]>;

/// One cache line per node: child lists of up to two entries live inline,
/// and a leaf's label is its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
#[repr(align(64))]
pub struct OpstNode {
    /// String depth: number of codes, `$` excluded.
    pub depth: u32,
    /// Smallest start position of a fragment reaching this node.
    pub witness: u32,
    pub suffix_link: Option<NodeId>,
    pub parent: Option<NodeId>,
    /// Sorted by key.
    pub children: Children,
}

impl OpstNode {
    /// Every inner node has a child once construction has placed it.
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Start of the suffix a leaf spells.
    pub fn leaf_label(&self) -> Option<u32> {
        self.is_leaf().then_some(self.witness)
    }

    pub fn is_branching(&self) -> bool {
        self.children.len() >= 2
    }

    pub fn child(&self, key: ChildKey) -> Option<NodeId> {
        self.children
            .binary_search_by(|(k, _)| k.cmp(&key))
            .ok()
            .map(|at| self.children[at].1)
    }
}

/// Tree position of a pattern: the topmost explicit node at or below it,
/// and its string depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Locus {
    pub node: NodeId,
    pub depth: usize,
}

/// Counters collected while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Explicit-node hops during scanning and suffix-link computation.
    pub moves_down: u64,
    /// Parent steps and link follows during suffix-link computation.
    pub moves_up: u64,
    pub suffix_link_nodes: u64,
}

impl BuildStats {
    pub fn moves(&self) -> u64 {
        self.moves_down + self.moves_up
    }
}

#[derive(Debug, Clone)]
pub struct Opst<O: LetterOracle = WaveletOracle> {
    pub(crate) nodes: Vec<OpstNode>,
    pub(crate) leaves: Vec<NodeId>,
    pub(crate) oracle: O,
    pub(crate) stats: BuildStats,
}

/// Builds the wavelet oracle over `series` and the tree on top of it.
pub fn build_opst(series: Series) -> Opst {
    Opst::build(WaveletOracle::build(series))
}

impl<O: LetterOracle> Opst<O> {
    pub fn build(oracle: O) -> Self {
        let n = oracle.len();
        assert!(n >= 1, "cannot index an empty series");
        let root = OpstNode {
            depth: 0,
            witness: 0,
            suffix_link: Some(NodeId::ROOT),
            parent: None,
            children: Children::new(),
        };
        let mut nodes = Vec::with_capacity(2 * n + 1);
        nodes.push(root);
        let mut tree = Opst {
            nodes,
            leaves: vec![NodeId::ROOT; n],
            oracle,
            stats: BuildStats::default(),
        };
        tree.insert_all_suffixes();
        tree
    }

    fn insert_all_suffixes(&mut self) {
        let n = self.len();
        let (mut u, mut d) = (NodeId::ROOT, 0usize);
        for i in 0..n {
            // descend through explicit nodes, then along the edge below
            while d == self.depth(u) && i + d < n {
                let Some(child) = self.node(u).child(self.key_at(i, d)) else {
                    break;
                };
                self.stats.moves_down += 1;
                u = child;
                d += 1;
                let wit = self.witness(u);
                while d < self.depth(u)
                    && i + d < n
                    && self.oracle.last_code_in(wit, wit + d) == self.oracle.last_code_in(i, i + d)
                {
                    d += 1;
                }
            }
            if d < self.depth(u) {
                u = self.create_node(u, d);
            }
            self.create_leaf(i, u, d);
            if self.node(u).suffix_link.is_none() {
                let link = self.link_for(u);
                self.nodes[u.index()].suffix_link = Some(link);
            }
            u = self.node(u).suffix_link.expect("link just set");
            d = d.saturating_sub(1);
        }
    }

    /// Walks to `u`'s pattern minus its first letter, creating the node if
    /// its locus is implicit.
    fn link_for(&mut self, u: NodeId) -> NodeId {
        let target = self.depth(u) - 1;
        let (v, moves_up, moves_down) = self.link_walk(u);
        self.stats.moves_up += moves_up;
        self.stats.moves_down += moves_down;
        if self.depth(v) > target {
            self.stats.suffix_link_nodes += 1;
            self.create_node(v, target)
        } else {
            v
        }
    }

    /// The read-only part of suffix-link computation: returns the topmost
    /// explicit node at or below depth `Depth(u) - 1` on the path of `u`'s
    /// pattern minus its first letter, plus the up and down move counts.
    fn link_walk(&self, u: NodeId) -> (NodeId, u64, u64) {
        let target = self.depth(u) - 1;
        let wit = self.witness(u);
        let mut moves_up = 0;
        let mut parent = self.node(u).parent.expect("root has a link");
        while self.node(parent).suffix_link.is_none() {
            parent = self.node(parent).parent.expect("root has a link");
            moves_up += 1;
        }
        // the step to the linked parent and the link itself
        moves_up += 2;
        let mut v = self.node(parent).suffix_link.unwrap();
        let mut moves_down = 0;
        while self.depth(v) < target {
            let key = self.key_at(wit + 1, self.depth(v));
            v = self
                .node(v)
                .child(key)
                .expect("pattern minus its first letter occurs in the tree");
            moves_down += 1;
        }
        (v, moves_up, moves_down)
    }

    /// Splits the edge into `below` at string depth `d`.
    fn create_node(&mut self, below: NodeId, d: usize) -> NodeId {
        let parent = self.node(below).parent.expect("root is never split");
        let wit = self.witness(below);
        debug_assert!(self.depth(parent) < d && d < self.depth(below));
        let in_key = self.key_at(wit, self.depth(parent));
        let down_key = self.key_at(wit, d);
        let id = NodeId(self.nodes.len() as u32);
        let mut children = Children::new();
        children.push((down_key, below));
        self.nodes.push(OpstNode {
            depth: d as u32,
            witness: wit as u32,
            suffix_link: None,
            parent: Some(parent),
            children,
        });
        let siblings = &mut self.nodes[parent.index()].children;
        let at = siblings
            .binary_search_by(|(k, _)| k.cmp(&in_key))
            .expect("edge into the split node");
        debug_assert_eq!(siblings[at].1, below);
        siblings[at].1 = id;
        self.nodes[below.index()].parent = Some(id);
        id
    }

    fn create_leaf(&mut self, i: usize, u: NodeId, d: usize) {
        let n = self.len();
        let key = self.key_at(i, d);
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(OpstNode {
            depth: (n - i) as u32,
            witness: i as u32,
            suffix_link: None,
            parent: Some(u),
            children: Children::new(),
        });
        let children = &mut self.nodes[u.index()].children;
        let at = children
            .binary_search_by(|(k, _)| k.cmp(&key))
            .expect_err("leaf key is free");
        children.insert(at, (key, id));
        self.leaves[i] = id;
    }

    /// Child key for extending `w[start..start+d-1]` by one letter;
    /// `$` once the suffix is exhausted.
    #[inline]
    pub(crate) fn key_at(&self, start: usize, d: usize) -> ChildKey {
        let n = self.len();
        if start + d >= n {
            ChildKey::DOLLAR
        } else {
            ChildKey(code_to_int_unchecked(self.oracle.last_code_in(start, start + d), n) + 1)
        }
    }

    pub fn len(&self) -> usize {
        self.oracle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracle.is_empty()
    }

    pub fn sigma(&self) -> u32 {
        self.oracle.sigma()
    }

    pub fn series(&self) -> &Series {
        self.oracle.series()
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn nodes(&self) -> &[OpstNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &OpstNode {
        &self.nodes[id.index()]
    }

    pub fn get(&self, id: NodeId) -> Result<&OpstNode> {
        self.nodes.get(id.index()).ok_or(Error::ForeignNode(id.0))
    }

    #[inline]
    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.index()].depth as usize
    }

    #[inline]
    pub fn witness(&self, id: NodeId) -> usize {
        self.nodes[id.index()].witness as usize
    }

    /// Leaf holding suffix `i`.
    pub fn leaf(&self, i: usize) -> NodeId {
        self.leaves[i]
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    /// Runs the suffix-link walk for `u` regardless of any stored link and
    /// returns the node one letter shorter, splitting an edge if needed.
    /// Any node so created is left without a link of its own.
    pub fn compute_suffix_link_simple(&mut self, u: NodeId) -> Result<NodeId> {
        self.get(u)?;
        if u == NodeId::ROOT {
            return Ok(NodeId::ROOT);
        }
        Ok(self.link_for(u))
    }

    /// Locus of `u`'s pattern with its first letter dropped, without
    /// creating anything. Uses the stored link when there is one.
    pub fn suffix_link_locus(&self, u: NodeId) -> Locus {
        if let Some(v) = self.node(u).suffix_link {
            return Locus {
                node: v,
                depth: self.depth(v),
            };
        }
        let depth = self.depth(u) - 1;
        let (node, _, _) = self.link_walk(u);
        Locus { node, depth }
    }

    /// `Locus(w[i..j])`.
    pub fn locus(&self, i: usize, j: usize) -> Result<Locus> {
        self.series().check_range(i, j)?;
        let m = j - i + 1;
        let mut v = NodeId::ROOT;
        while self.depth(v) < m {
            v = self
                .node(v)
                .child(self.key_at(i, self.depth(v)))
                .expect("every fragment is spelled in the tree");
        }
        Ok(Locus { node: v, depth: m })
    }

    /// Nodes in depth-first preorder, children in key order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![NodeId::ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.node(v).children.iter().rev().map(|&(_, c)| c));
        }
        order
    }

    /// Leaf descendants per node.
    pub fn leaf_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.nodes.len()];
        for &v in self.preorder().iter().rev() {
            let node = self.node(v);
            counts[v.index()] = if node.is_leaf() {
                1
            } else {
                node.children.iter().map(|&(_, c)| counts[c.index()]).sum()
            };
        }
        counts
    }

    /// `PrefCode` spelled from the root down to `v`.
    pub fn path_code(&self, v: NodeId) -> PrefCode {
        let wit = self.witness(v);
        PrefCode(
            (0..self.depth(v))
                .map(|t| self.oracle.last_code_in(wit, wit + t))
                .collect(),
        )
    }

    /// Symbols on the edge `parent -> child`.
    pub fn edge_label(&self, parent: NodeId, child: NodeId) -> Vec<Symbol> {
        let wit = self.witness(child);
        let mut label: Vec<Symbol> = (self.depth(parent)..self.depth(child))
            .map(|t| Symbol::Code(self.oracle.last_code_in(wit, wit + t)))
            .collect();
        if self.node(child).is_leaf() {
            label.push(Symbol::Dollar);
        }
        label
    }

    /// The sequence spelled on the root-to-leaf path of suffix `i`.
    pub fn suffix_code(&self, i: usize) -> Vec<Symbol> {
        let mut path = vec![self.leaves[i]];
        while let Some(p) = self.node(*path.last().unwrap()).parent {
            path.push(p);
        }
        path.reverse();
        path.windows(2)
            .flat_map(|e| self.edge_label(e[0], e[1]))
            .collect()
    }

    pub fn edge_code(&self, parent: NodeId, child: NodeId) -> Option<CodePair> {
        match self.edge_label(parent, child).first()? {
            Symbol::Code(c) => Some(*c),
            Symbol::Dollar => None,
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.nodes.capacity() * std::mem::size_of::<OpstNode>()
            + self
                .nodes
                .iter()
                .filter(|v| v.children.spilled())
                .map(|v| v.children.capacity() * std::mem::size_of::<(ChildKey, NodeId)>())
                .sum::<usize>()
            + self.leaves.capacity() * 4
    }

    /// Reassembles a tree from stored parts; callers validate.
    pub(crate) fn from_parts(nodes: Vec<OpstNode>, leaves: Vec<NodeId>, oracle: O) -> Self {
        Opst {
            nodes,
            leaves,
            oracle,
            stats: BuildStats::default(),
        }
    }
}
