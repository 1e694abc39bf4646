//! Structural audit of a built tree against the size and shape bounds the
//! construction relies on.

use crate::codes::{code_to_int_unchecked, ChildKey};
use crate::error::{Error, Result};
use crate::oracle::LetterOracle;
use crate::tree::{NodeId, Opst};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub n: usize,
    pub sigma: u32,
    pub leaves: usize,
    pub explicit_nodes: usize,
    pub branching_nodes: usize,
    pub non_branching_nodes: usize,
    pub max_outdegree: usize,
    pub max_non_branching_on_path: usize,
    pub construction_moves: u64,
}

fn violation(property: &'static str, detail: String) -> Error {
    Error::StructureViolation { property, detail }
}

/// Checks leaf count and labels, node-count and outdegree bounds, the
/// per-path bound on non-branching nodes, edge keys against recomputed
/// codes, parent pointers, witness minimality and suffix-link targets.
pub fn verify_structure<O: LetterOracle>(t: &Opst<O>) -> Result<StructureReport> {
    let n = t.len();
    let sigma = t.sigma();
    let order = t.preorder();
    if order.len() != t.node_count() {
        return Err(violation(
            "tree shape",
            format!("{} of {} nodes reachable from the root", order.len(), t.node_count()),
        ));
    }

    let mut report = StructureReport {
        n,
        sigma,
        explicit_nodes: t.node_count(),
        construction_moves: t.stats().moves(),
        ..Default::default()
    };
    if report.explicit_nodes > 3 * n + 1 {
        return Err(violation(
            "linear size",
            format!("{} explicit nodes for n = {n}", report.explicit_nodes),
        ));
    }

    // min leaf label below each node, filled bottom-up
    let mut min_leaf = vec![u32::MAX; t.node_count()];
    for &v in order.iter().rev() {
        let node = t.node(v);
        min_leaf[v.index()] = match node.leaf_label() {
            Some(label) => label,
            None => node
                .children
                .iter()
                .map(|&(_, c)| min_leaf[c.index()])
                .min()
                .unwrap_or(u32::MAX),
        };
    }

    let mut on_path = vec![0usize; t.node_count()];
    for &v in &order {
        let node = t.node(v);
        let degree = node.children.len();
        report.max_outdegree = report.max_outdegree.max(degree);
        if degree > 2 * sigma as usize + 1 {
            return Err(violation(
                "outdegree bound",
                format!("node {v} has {degree} children, sigma = {sigma}"),
            ));
        }
        if node.is_leaf() {
            report.leaves += 1;
            let label = node.leaf_label().unwrap() as usize;
            if label >= n || t.leaf(label) != v || node.depth as usize != n - label {
                return Err(violation("leaf labels", format!("leaf {v} labelled {label}")));
            }
            if degree != 0 {
                return Err(violation("leaf labels", format!("leaf {v} has children")));
            }
        } else {
            if degree == 0 {
                return Err(violation("tree shape", format!("internal node {v} has no children")));
            }
            if degree >= 2 {
                report.branching_nodes += 1;
            } else if v != t.root() {
                report.non_branching_nodes += 1;
                on_path[v.index()] += 1;
                if node.suffix_link.is_some() && !t.node(v).is_branching() {
                    // stored links only come from attach points, which branch
                    return Err(violation(
                        "suffix links",
                        format!("non-branching node {v} carries a link"),
                    ));
                }
            }
        }
        let path_count = on_path[v.index()];
        report.max_non_branching_on_path = report.max_non_branching_on_path.max(path_count);
        if path_count > sigma as usize {
            return Err(violation(
                "non-branching nodes per path",
                format!("{path_count} non-branching nodes above {v}, sigma = {sigma}"),
            ));
        }
        if node.witness != min_leaf[v.index()] && v != t.root() {
            return Err(violation(
                "witness minimality",
                format!("node {v} witness {} but min leaf {}", node.witness, min_leaf[v.index()]),
            ));
        }

        let mut previous: Option<ChildKey> = None;
        for &(key, c) in &node.children {
            if previous.is_some_and(|p| p >= key) {
                return Err(violation("child order", format!("keys of {v} not increasing")));
            }
            previous = Some(key);
            let child = t.node(c);
            if child.parent != Some(v) {
                return Err(violation("parent pointers", format!("{c} under {v}")));
            }
            on_path[c.index()] = path_count;
            let wit = child.witness as usize;
            let expected = if wit + node.depth as usize >= n {
                ChildKey::DOLLAR
            } else {
                let code = t.oracle().last_code_in(wit, wit + node.depth as usize);
                ChildKey::code(code_to_int_unchecked(code, n)).expect("code integers fit")
            };
            if key != expected {
                return Err(violation(
                    "edge labels",
                    format!("edge {v} -> {c} keyed {key:?}, expected {expected:?}"),
                ));
            }
            let deeper = if key.is_dollar() {
                child.is_leaf() && child.depth == node.depth
            } else {
                child.depth > node.depth
            };
            if !deeper {
                return Err(violation("string depths", format!("edge {v} -> {c}")));
            }
        }

        if let Some(link) = node.suffix_link {
            if v != t.root() && !suffix_link_sound(t, v, link) {
                return Err(violation("suffix links", format!("{v} -> {link}")));
            }
        }
    }
    if report.leaves != n {
        return Err(violation(
            "one leaf per suffix",
            format!("{} leaves for n = {n}", report.leaves),
        ));
    }
    Ok(report)
}

fn suffix_link_sound<O: LetterOracle>(t: &Opst<O>, v: NodeId, link: NodeId) -> bool {
    let depth = t.depth(v);
    if t.depth(link) + 1 != depth {
        return false;
    }
    let (a, b) = (t.witness(v) + 1, t.witness(link));
    (0..depth - 1).all(|k| t.oracle().last_code_in(a, a + k) == t.oracle().last_code_in(b, b + k))
}
