//! Tanner graphs, directed edges, and computation-tree unrolling.
//!
//! The directed neighborhood of depth `2l` of an edge `(v, c)` is unrolled by
//! expanding away from `c`: the root variable expands to its *other* checks,
//! a check expands to its other variables, and so on. The neighborhood is
//! tree-like iff no original graph node appears twice in the unrolling.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Bipartite variable/check graph.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n_vars: usize,
    n_checks: usize,
    var_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    edge_idx: HashMap<(usize, usize), usize>,
}

impl TannerGraph {
    /// Edge (v, c) exists iff `h[c][v] = 1`.
    pub fn from_matrix(h: &BitMatrix) -> Self {
        let n_vars = h.cols();
        let n_checks = h.rows();
        let mut var_adj = vec![Vec::new(); n_vars];
        let mut check_adj = vec![Vec::new(); n_checks];
        let mut edges = Vec::new();
        let mut edge_idx = HashMap::new();
        for c in 0..n_checks {
            for v in 0..n_vars {
                if h.get(c, v) == 1 {
                    var_adj[v].push(c);
                    check_adj[c].push(v);
                    edge_idx.insert((v, c), edges.len());
                    edges.push((v, c));
                }
            }
        }
        TannerGraph { n_vars, n_checks, var_adj, check_adj, edges, edge_idx }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn var_checks(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    pub fn check_vars(&self, c: usize) -> &[usize] {
        &self.check_adj[c]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, v: usize, c: usize) -> Option<usize> {
        self.edge_idx.get(&(v, c)).copied()
    }
}

/// The paper's directed edge e = (v, c), oriented variable-to-check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DirectedEdge {
    pub var: usize,
    pub check: usize,
}

impl DirectedEdge {
    pub fn new(var: usize, check: usize) -> Self {
        DirectedEdge { var, check }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Variable,
    Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Index of the original graph node this tree node unrolls.
    pub origin: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
}

/// Unrolled directed neighborhood of an edge. Node 0 is the root variable.
#[derive(Clone, Debug, Serialize)]
pub struct ComputationTree {
    pub root_edge: DirectedEdge,
    pub depth: usize,
    pub nodes: Vec<TreeNode>,
    pub is_tree_like: bool,
}

/// Unroll the directed neighborhood of `e` to even edge-depth `depth`.
pub fn unroll(g: &TannerGraph, e: DirectedEdge, depth: usize) -> Result<ComputationTree> {
    use NodeKind::{Check, Variable};
    if g.edge_index(e.var, e.check).is_none() {
        return Err(Error::EdgeNotInGraph { var: e.var, check: e.check });
    }
    if depth < 2 || depth % 2 != 0 {
        return Err(Error::InvalidParameter(format!("depth must be even and >= 2, got {depth}")));
    }
    let mut nodes = vec![TreeNode {
        kind: NodeKind::Variable,
        origin: e.var,
        parent: None,
        children: Vec::new(),
        depth: 0,
    }];
    let mut var_seen = vec![0usize; g.n_vars()];
    let mut check_seen = vec![0usize; g.n_checks()];
    var_seen[e.var] = 1;
    let mut is_tree_like = true;

    let mut frontier = vec![0usize];
    for d in 1..=depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            let (kind, origin, parent_origin) = {
                let node = &nodes[idx];
                let parent_origin = node.parent.map(|p| nodes[p].origin);
                (node.kind, node.origin, parent_origin)
            };
            let children_origins: Vec<usize> = match kind {
                Variable => {
                    // exclude the edge toward the parent check (the root edge's
                    // check for the root itself)
                    let excluded = if idx == 0 { Some(e.check) } else { parent_origin };
                    g.var_checks(origin).iter().copied().filter(|&c| Some(c) != excluded).collect()
                }
                Check => g
                    .check_vars(origin)
                    .iter()
                    .copied()
                    .filter(|&v| Some(v) != parent_origin)
                    .collect(),
            };
            for co in children_origins {
                let child_kind = match kind {
                    Variable => Check,
                    Check => Variable,
                };
                let seen = match child_kind {
                    Variable => {
                        var_seen[co] += 1;
                        var_seen[co]
                    }
                    Check => {
                        check_seen[co] += 1;
                        check_seen[co]
                    }
                };
                if seen > 1 {
                    is_tree_like = false;
                }
                let child_idx = nodes.len();
                nodes.push(TreeNode {
                    kind: child_kind,
                    origin: co,
                    parent: Some(idx),
                    children: Vec::new(),
                    depth: d,
                });
                nodes[idx].children.push(child_idx);
                next.push(child_idx);
            }
        }
        frontier = next;
    }
    Ok(ComputationTree { root_edge: e, depth, nodes, is_tree_like })
}

/// Distinct original variable indices in the tree, root first, then in order
/// of first appearance.
pub fn variable_index_set(t: &ComputationTree) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for node in &t.nodes {
        if node.kind == NodeKind::Variable && seen.insert(node.origin) {
            out.push(node.origin);
        }
    }
    out
}

/// Constraint matrix of the local tree code: one row per original check in
/// the tree, columns ordered by `variable_index_set(t)`.
pub fn local_check_matrix(t: &ComputationTree, g: &TannerGraph) -> Result<BitMatrix> {
    if !t.is_tree_like {
        return Err(Error::NotTreeLike);
    }
    let index_set = variable_index_set(t);
    let pos: HashMap<usize, usize> = index_set.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    let mut m = BitMatrix::zeros(0, index_set.len());
    let mut seen_checks = std::collections::HashSet::new();
    for node in &t.nodes {
        if node.kind == NodeKind::Check && seen_checks.insert(node.origin) {
            let mut row = 0u64;
            for &v in g.check_vars(node.origin) {
                let j = pos.get(&v).ok_or(Error::NotTreeLike)?;
                row |= 1 << j;
            }
            m.push_row(row);
        }
    }
    Ok(m)
}

/// Graphviz rendering of a computation tree, for figures.
pub fn to_dot(t: &ComputationTree) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=TB;\n");
    for (i, node) in t.nodes.iter().enumerate() {
        let (shape, label) = match node.kind {
            NodeKind::Variable => ("circle", format!("v{}", node.origin)),
            NodeKind::Check => ("square", format!("c{}", node.origin)),
        };
        out.push_str(&format!("  n{i} [shape={shape}, label=\"{label}\"];\n"));
    }
    for (i, node) in t.nodes.iter().enumerate() {
        for &ch in &node.children {
            out.push_str(&format!("  n{i} -> n{ch};\n"));
        }
    }
    out.push_str("}\n");
    out
}
