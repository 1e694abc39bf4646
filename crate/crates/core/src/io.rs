//! Binary index files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "OPST" | version u32 | n u64 | sigma u32 | node count u32
//! per node: depth u32 | witness u32 | link u32 | parent u32 | leaf label u32
//!           | child count u32 | per child: tag u8 | key u64 | node u32
//! letters: n x u32
//! ```
//!
//! Absent links, parents and labels are stored as `u32::MAX`. Child tag 0 is
//! the end marker `$` (key 0), tag 1 a code key. The trailing letters let a
//! loaded index answer oracle queries without the original input.

use std::collections::VecDeque;
use std::io::Write;

use crate::audit::verify_structure;
use crate::codes::{ChildKey, Series};
use crate::error::{Error, Result};
use crate::oracle::{LetterOracle, WaveletOracle};
use crate::tree::{Children, NodeId, Opst, OpstNode};

pub const MAGIC: &[u8; 4] = b"OPST";
pub const FORMAT_VERSION: u32 = 1;

const NONE: u32 = u32::MAX;
const NODE_HEADER_BYTES: usize = 24;
const CHILD_BYTES: usize = 13;

fn opt(v: Option<u32>) -> u32 {
    v.unwrap_or(NONE)
}

pub fn write_index<O: LetterOracle, W: Write>(t: &Opst<O>, out: &mut W) -> std::io::Result<()> {
    out.write_all(&encode(t))
}

pub fn encode<O: LetterOracle>(t: &Opst<O>) -> Vec<u8> {
    let n = t.len();
    let mut buf = Vec::with_capacity(24 + t.node_count() * (NODE_HEADER_BYTES + 2 * CHILD_BYTES) + 4 * n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&t.sigma().to_le_bytes());
    buf.extend_from_slice(&(t.node_count() as u32).to_le_bytes());
    for node in t.nodes() {
        for field in [
            node.depth,
            node.witness,
            opt(node.suffix_link.map(|l| l.0)),
            opt(node.parent.map(|p| p.0)),
            opt(node.leaf_label()),
            node.children.len() as u32,
        ] {
            buf.extend_from_slice(&field.to_le_bytes());
        }
        for &(key, child) in &node.children {
            let (tag, raw) = match key.as_code() {
                None => (0u8, 0u64),
                Some(k) => (1u8, k),
            };
            buf.push(tag);
            buf.extend_from_slice(&raw.to_le_bytes());
            buf.extend_from_slice(&child.0.to_le_bytes());
        }
    }
    for &c in t.series().letters() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    buf
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < k {
            return Err(Error::MalformedIndex(format!("truncated while reading {what}")));
        }
        let slice = &self.bytes[self.at..self.at + k];
        self.at += k;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.at
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MalformedIndex(msg.into())
}

/// Parses and fully validates an index file.
pub fn decode(bytes: &[u8]) -> Result<Opst> {
    let mut cur = Cursor { bytes, at: 0 };
    if cur.take(4, "magic")? != MAGIC {
        return Err(bad("bad magic bytes"));
    }
    let version = cur.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = cur.u64("length")?;
    let sigma = cur.u32("alphabet size")?;
    let count = cur.u32("node count")? as usize;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    // Every field below is bounded by the bytes actually present before
    // anything is allocated.
    let min_size = (n as u128) * 4 + (count as u128) * NODE_HEADER_BYTES as u128;
    if min_size > cur.remaining() as u128 {
        return Err(bad("file shorter than its header claims"));
    }
    let n = n as usize;
    if n > crate::codes::MAX_SERIES_LEN {
        return Err(Error::SeriesTooLong(n));
    }
    if count < 2 || count > 3 * n + 1 {
        return Err(bad(format!("{count} nodes for length {n}")));
    }
    if sigma == 0 || sigma as usize > n {
        return Err(bad(format!("alphabet size {sigma} for length {n}")));
    }

    let index = |raw: u32, what: &str| -> Result<Option<NodeId>> {
        match raw {
            NONE => Ok(None),
            x if (x as usize) < count => Ok(Some(NodeId(x))),
            x => Err(bad(format!("{what} {x} out of range"))),
        }
    };
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let depth = cur.u32("depth")?;
        let witness = cur.u32("witness")?;
        let suffix_link = index(cur.u32("suffix link")?, "suffix link")?;
        let parent = index(cur.u32("parent")?, "parent")?;
        let leaf_label = match cur.u32("leaf label")? {
            NONE => None,
            x => Some(x),
        };
        let degree = cur.u32("child count")? as usize;
        if degree > 2 * sigma as usize + 1 || degree * CHILD_BYTES > cur.remaining() {
            return Err(bad(format!("child count {degree}")));
        }
        let mut children = Children::with_capacity(degree);
        for _ in 0..degree {
            let key = match (cur.u8("child tag")?, cur.u64("child key")?) {
                (0, 0) => ChildKey::DOLLAR,
                (1, k) => ChildKey::code(k).ok_or_else(|| bad("child key out of range"))?,
                (tag, _) => return Err(bad(format!("child tag {tag}"))),
            };
            let child = index(cur.u32("child")?, "child")?.ok_or_else(|| bad("missing child"))?;
            children.push((key, child));
        }
        let node = OpstNode {
            depth,
            witness,
            suffix_link,
            parent,
            children,
        };
        // a leaf is exactly a childless node, labelled by its witness
        if node.leaf_label() != leaf_label {
            return Err(bad(format!("leaf label {leaf_label:?} on node {}", nodes.len())));
        }
        nodes.push(node);
    }
    let mut letters = Vec::with_capacity(n);
    for _ in 0..n {
        letters.push(cur.u32("letter")?);
    }
    if cur.remaining() != 0 {
        return Err(bad(format!("{} trailing bytes", cur.remaining())));
    }
    let series = Series::from_dense(letters, sigma).map_err(|e| bad(format!("letters: {e}")))?;

    let leaves = check_shape(&nodes, n)?;
    let t = Opst::from_parts(nodes, leaves, WaveletOracle::build(series));
    verify_structure(&t).map_err(|e| bad(e.to_string()))?;
    Ok(t)
}

/// Checks what the structural audit takes for granted: a single tree rooted
/// at node 0, consistent parent pointers, one leaf per position, and every
/// node's fragment inside the series.
fn check_shape(nodes: &[OpstNode], n: usize) -> Result<Vec<NodeId>> {
    let root = &nodes[0];
    if root.parent.is_some() || root.depth != 0 || root.leaf_label().is_some() {
        return Err(bad("malformed root"));
    }
    let mut seen = vec![false; nodes.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([NodeId(0)]);
    while let Some(v) = queue.pop_front() {
        for &(_, c) in &nodes[v.index()].children {
            if seen[c.index()] || nodes[c.index()].parent != Some(v) {
                return Err(bad(format!("node {c} is not a proper child of {v}")));
            }
            seen[c.index()] = true;
            queue.push_back(c);
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(bad("unreachable nodes"));
    }
    let mut leaves = vec![NodeId(NONE); n];
    for (k, node) in nodes.iter().enumerate() {
        if (node.witness as usize) >= n || node.witness as usize + node.depth as usize > n {
            return Err(bad(format!("node {k} lies outside the series")));
        }
        if let Some(label) = node.leaf_label() {
            let label = label as usize;
            if label >= n || leaves[label].0 != NONE || !node.children.is_empty() {
                return Err(bad(format!("bad leaf label {label}")));
            }
            leaves[label] = NodeId(k as u32);
        }
    }
    if leaves.iter().any(|l| l.0 == NONE) {
        return Err(bad("missing leaves"));
    }
    Ok(leaves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::build_opst;

    fn sample() -> Opst {
        build_opst(Series::from_letters(&[1, 2, 4, 4, 2, 5, 5, 1]).unwrap())
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let t = sample();
        let bytes = encode(&t);
        let back = decode(&bytes).unwrap();
        assert_eq!(back.nodes(), t.nodes());
        assert_eq!(back.series(), t.series());
        assert_eq!(encode(&back), bytes);
    }

    #[test]
    fn header_errors() {
        let bytes = encode(&sample());
        assert!(matches!(decode(&bytes[..3]), Err(Error::MalformedIndex(_))));
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(matches!(decode(&wrong), Err(Error::MalformedIndex(_))));
        let mut future = bytes.clone();
        future[4] = 9;
        assert_eq!(decode(&future).unwrap_err(), Error::UnsupportedVersion(9));
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(decode(&longer).is_err());
    }

    #[test]
    fn every_truncation_and_byte_flip_is_handled() {
        let bytes = encode(&sample());
        for k in 0..bytes.len() {
            assert!(decode(&bytes[..k]).is_err());
            let mut flipped = bytes.clone();
            flipped[k] ^= 0x5a;
            // must not panic; may or may not be accepted
            let _ = decode(&flipped);
        }
    }
}
