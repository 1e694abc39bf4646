//! Constant-time lowest common ancestors: Euler tour plus range minimum.
//!
//! The range-minimum structure splits the depth sequence into 64-slot
//! blocks. A doubling table over block minima answers the inter-block part;
//! inside a block each slot keeps a bitmask of its left-to-right minima
//! stack, so an in-block query is one mask and one `trailing_zeros`.

use crate::error::{Error, Result};
use crate::oracle::LetterOracle;
use crate::tree::{NodeId, Opst};

const BLOCK: usize = 64;

#[derive(Debug, Clone)]
pub struct LcaIndex {
    euler: Vec<u32>,
    first_visit: Vec<u32>,
    depth_seq: Vec<u32>,
    rmq: BlockRmq,
}

impl LcaIndex {
    pub fn build<O: LetterOracle>(t: &Opst<O>) -> Self {
        Self::from_children(t.node_count(), t.root(), |v| {
            t.node(v).children.iter().map(|&(_, c)| c)
        })
    }

    /// Indexes any rooted tree on `node_count` nodes given its child lists.
    pub fn from_children<F, I>(node_count: usize, root: NodeId, children: F) -> Self
    where
        F: Fn(NodeId) -> I,
        I: Iterator<Item = NodeId>,
    {
        let mut euler = Vec::with_capacity(2 * node_count);
        let mut depth_seq = Vec::with_capacity(2 * node_count);
        let mut first_visit = vec![u32::MAX; node_count];
        let mut stack: Vec<(NodeId, I)> = Vec::new();
        first_visit[root.index()] = 0;
        euler.push(root.0);
        depth_seq.push(0);
        stack.push((root, children(root)));
        while let Some((_, iter)) = stack.last_mut() {
            match iter.next() {
                Some(c) => {
                    let d = stack.len() as u32;
                    first_visit[c.index()] = euler.len() as u32;
                    euler.push(c.0);
                    depth_seq.push(d);
                    stack.push((c, children(c)));
                }
                None => {
                    stack.pop();
                    if let Some((p, _)) = stack.last() {
                        euler.push(p.0);
                        depth_seq.push(stack.len() as u32 - 1);
                    }
                }
            }
        }
        let rmq = BlockRmq::new(&depth_seq);
        LcaIndex {
            euler,
            first_visit,
            depth_seq,
            rmq,
        }
    }

    pub fn node_count(&self) -> usize {
        self.first_visit.len()
    }

    pub fn euler(&self) -> &[u32] {
        &self.euler
    }

    pub fn first_visit(&self, v: NodeId) -> Option<usize> {
        self.first_visit
            .get(v.index())
            .filter(|&&f| f != u32::MAX)
            .map(|&f| f as usize)
    }

    /// Depth in edges from the root.
    pub fn tree_depth(&self, v: NodeId) -> Option<usize> {
        self.first_visit(v).map(|f| self.depth_seq[f] as usize)
    }

    pub fn lca(&self, u: NodeId, v: NodeId) -> Result<NodeId> {
        let a = self.first_visit(u).ok_or(Error::ForeignNode(u.0))?;
        let b = self.first_visit(v).ok_or(Error::ForeignNode(v.0))?;
        Ok(self.lca_at(a, b))
    }

    #[inline]
    pub(crate) fn lca_unchecked(&self, u: NodeId, v: NodeId) -> NodeId {
        self.lca_at(
            self.first_visit[u.index()] as usize,
            self.first_visit[v.index()] as usize,
        )
    }

    #[inline]
    fn lca_at(&self, a: usize, b: usize) -> NodeId {
        let (l, r) = if a <= b { (a, b) } else { (b, a) };
        NodeId(self.euler[self.rmq.argmin(&self.depth_seq, l, r)])
    }

    /// LCA of a whole set by a left fold.
    pub fn lca_fold(&self, nodes: &[NodeId]) -> Result<NodeId> {
        let (&first, rest) = nodes.split_first().ok_or(Error::EmptyNodeSet)?;
        self.first_visit(first).ok_or(Error::ForeignNode(first.0))?;
        rest.iter().try_fold(first, |acc, &v| self.lca(acc, v))
    }

    pub fn heap_bytes(&self) -> usize {
        (self.euler.capacity() + self.first_visit.capacity() + self.depth_seq.capacity()) * 4
            + self.rmq.heap_bytes()
    }
}

#[derive(Debug, Clone)]
struct BlockRmq {
    masks: Vec<u64>,
    // sparse[k][b]: argmin over blocks [b, b + 2^k)
    sparse: Vec<Vec<u32>>,
}

impl BlockRmq {
    fn new(values: &[u32]) -> Self {
        let mut masks = vec![0u64; values.len()];
        let mut block_min = Vec::with_capacity(values.len().div_ceil(BLOCK));
        for (b, chunk) in values.chunks(BLOCK).enumerate() {
            let base = b * BLOCK;
            let mut stack = 0u64;
            let mut best = 0usize;
            for (k, &x) in chunk.iter().enumerate() {
                while stack != 0 {
                    let top = 63 - stack.leading_zeros() as usize;
                    if chunk[top] >= x {
                        stack &= !(1u64 << top);
                    } else {
                        break;
                    }
                }
                stack |= 1u64 << k;
                masks[base + k] = stack;
                if x < chunk[best] {
                    best = k;
                }
            }
            block_min.push((base + best) as u32);
        }
        let mut sparse = vec![block_min];
        let mut span = 1;
        while 2 * span <= sparse[0].len() {
            let prev = sparse.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - span)
                .map(|b| {
                    let (x, y) = (prev[b], prev[b + span]);
                    if values[y as usize] < values[x as usize] {
                        y
                    } else {
                        x
                    }
                })
                .collect();
            sparse.push(next);
            span *= 2;
        }
        BlockRmq { masks, sparse }
    }

    #[inline]
    fn in_block(&self, l: usize, r: usize) -> usize {
        let m = self.masks[r] & (u64::MAX << (l % BLOCK));
        r - r % BLOCK + m.trailing_zeros() as usize
    }

    #[inline]
    fn argmin(&self, values: &[u32], l: usize, r: usize) -> usize {
        let (bl, br) = (l / BLOCK, r / BLOCK);
        if bl == br {
            return self.in_block(l, r);
        }
        let better = |x: usize, y: usize| if values[y] < values[x] { y } else { x };
        let mut best = better(self.in_block(l, bl * BLOCK + BLOCK - 1), self.in_block(br * BLOCK, r));
        if bl + 1 < br {
            let (from, to) = (bl + 1, br - 1);
            let k = (usize::BITS - 1 - (to - from + 1).leading_zeros()) as usize;
            let row = &self.sparse[k];
            best = better(best, row[from] as usize);
            best = better(best, row[to + 1 - (1 << k)] as usize);
        }
        best
    }

    fn heap_bytes(&self) -> usize {
        self.masks.capacity() * 8 + self.sparse.iter().map(|r| r.capacity() * 4).sum::<usize>()
    }
}
