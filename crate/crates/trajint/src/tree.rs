//! Finite trajectory trees and path addressing.
//!
//! A market scenario set is stored as a rooted tree of prices with a uniform
//! horizon `N`: every root-to-leaf path has exactly `N` steps and is one
//! admitted price trajectory `S_0, …, S_N` (prices in units of the traded
//! numeraire). A [`NodePath`] addresses a node by the child indices taken
//! from the root; a path of length `j` identifies the conditional scenario
//! set of all trajectories sharing that prefix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Address of a node: child indices from the root. Depth equals the length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn from_indices(indices: impl Into<Vec<usize>>) -> Self {
        NodePath(indices.into())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn child(&self, index: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    pub fn parent(&self) -> Option<NodePath> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Prefix of the first `depth` indices.
    pub fn prefix(&self, depth: usize) -> NodePath {
        NodePath(self.0[..depth.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Parses `"root"`, `""`, or a comma-separated index list like `"0,1"`.
    pub fn parse(text: &str) -> Option<NodePath> {
        let text = text.trim();
        if text.is_empty() || text == "root" {
            return Some(NodePath::root());
        }
        let mut v = Vec::new();
        for part in text.split(',') {
            v.push(part.trim().parse().ok()?);
        }
        Some(NodePath(v))
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "root")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// One node of the price tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<T> {
    value: T,
    children: Vec<TreeNode<T>>,
}

impl<T: Scalar> TreeNode<T> {
    pub fn leaf(value: T) -> Self {
        TreeNode {
            value,
            children: Vec::new(),
        }
    }

    pub fn branch(value: T, children: Vec<TreeNode<T>>) -> Self {
        TreeNode { value, children }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn children(&self) -> &[TreeNode<T>] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A finite trajectory tree with uniform horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTree<T> {
    root: TreeNode<T>,
    horizon: usize,
    leaves: Vec<NodePath>,
}

impl<T: Scalar> TrajectoryTree<T> {
    /// Validates uniform leaf depth and builds the leaf index.
    pub fn from_root(root: TreeNode<T>) -> Result<Self> {
        let mut leaves = Vec::new();
        let mut depth: Option<usize> = None;
        collect_leaves(&root, &mut NodePath::root(), &mut leaves, &mut depth)?;
        Ok(TrajectoryTree {
            root,
            horizon: depth.unwrap_or(0),
            leaves,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Initial price `s0`.
    pub fn s0(&self) -> &T {
        &self.root.value
    }

    pub fn root(&self) -> &TreeNode<T> {
        &self.root
    }

    pub fn node(&self, path: &NodePath) -> Result<&TreeNode<T>> {
        let mut cur = &self.root;
        for &i in path.indices() {
            cur = cur
                .children
                .get(i)
                .ok_or_else(|| Error::InvalidPath(path.clone()))?;
        }
        Ok(cur)
    }

    pub fn value_at(&self, path: &NodePath) -> Result<&T> {
        Ok(self.node(path)?.value())
    }

    pub fn is_valid(&self, path: &NodePath) -> bool {
        self.node(path).is_ok()
    }

    /// All leaves in depth-first order. This order is the canonical index
    /// used by payoff resolution.
    pub fn leaves(&self) -> &[NodePath] {
        &self.leaves
    }

    /// Position of a leaf in the canonical order.
    pub fn leaf_index(&self, leaf: &NodePath) -> Option<usize> {
        self.leaves.binary_search(leaf).ok()
    }

    /// The conditional scenario set below `node`: exactly the leaves whose
    /// path extends it.
    pub fn conditional_leaves(&self, node: &NodePath) -> Result<Vec<NodePath>> {
        self.node(node)?;
        Ok(self
            .leaves
            .iter()
            .filter(|leaf| node.is_prefix_of(leaf))
            .cloned()
            .collect())
    }

    /// Contiguous range of canonical leaf indices below `node`.
    pub fn leaf_range(&self, node: &NodePath) -> Result<std::ops::Range<usize>> {
        self.node(node)?;
        let start = self
            .leaves
            .iter()
            .position(|l| node.is_prefix_of(l))
            .unwrap_or(self.leaves.len());
        let mut end = start;
        while end < self.leaves.len() && node.is_prefix_of(&self.leaves[end]) {
            end += 1;
        }
        Ok(start..end)
    }

    /// Every node path at the given depth.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<NodePath> {
        let mut out = Vec::new();
        let mut stack = vec![(NodePath::root(), &self.root)];
        while let Some((path, node)) = stack.pop() {
            if path.depth() == depth {
                out.push(path);
                continue;
            }
            for (i, child) in node.children.iter().enumerate().rev() {
                stack.push((path.child(i), child));
            }
        }
        out.sort();
        out
    }

    /// Every node path, depth-first.
    pub fn all_nodes(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        let mut stack = vec![(NodePath::root(), &self.root)];
        while let Some((path, node)) = stack.pop() {
            for (i, child) in node.children.iter().enumerate().rev() {
                stack.push((path.child(i), child));
            }
            out.push(path);
        }
        out.sort();
        out
    }

    /// Interior (tradable) nodes: depth strictly below the horizon.
    pub fn interior_nodes(&self) -> Vec<NodePath> {
        self.all_nodes()
            .into_iter()
            .filter(|p| p.depth() < self.horizon)
            .collect()
    }

    /// Prices `S_0, …, S_j` along a path prefix.
    pub fn path_prices(&self, path: &NodePath) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(path.depth() + 1);
        let mut cur = &self.root;
        out.push(cur.value.clone());
        for &i in path.indices() {
            cur = cur
                .children
                .get(i)
                .ok_or_else(|| Error::InvalidPath(path.clone()))?;
            out.push(cur.value.clone());
        }
        Ok(out)
    }

    /// One-step increment `S_{j+1} − S_j` into the given child.
    pub fn increment(&self, node: &NodePath, child: usize) -> Result<T> {
        let n = self.node(node)?;
        let c = n
            .children
            .get(child)
            .ok_or_else(|| Error::InvalidPath(node.child(child)))?;
        Ok(c.value.clone() - n.value.clone())
    }

    /// Checks that `leaf` is a leaf of this tree.
    pub fn require_leaf(&self, leaf: &NodePath) -> Result<()> {
        let n = self.node(leaf)?;
        if n.is_leaf() {
            Ok(())
        } else {
            Err(Error::NotALeaf(leaf.clone(), self.horizon))
        }
    }

    /// Rebuilds the tree over another scalar, e.g. to re-price a float model
    /// with exact rationals.
    pub fn map_scalar<U: Scalar>(&self, f: &impl Fn(&T) -> U) -> TrajectoryTree<U> {
        fn go<T: Scalar, U: Scalar>(n: &TreeNode<T>, f: &impl Fn(&T) -> U) -> TreeNode<U> {
            TreeNode {
                value: f(&n.value),
                children: n.children.iter().map(|c| go(c, f)).collect(),
            }
        }
        TrajectoryTree {
            root: go(&self.root, f),
            horizon: self.horizon,
            leaves: self.leaves.clone(),
        }
    }
}

fn collect_leaves<T: Scalar>(
    node: &TreeNode<T>,
    path: &mut NodePath,
    leaves: &mut Vec<NodePath>,
    depth: &mut Option<usize>,
) -> Result<()> {
    if node.is_leaf() {
        match depth {
            Some(d) if *d != path.depth() => return Err(Error::NonUniformHorizon),
            None => *depth = Some(path.depth()),
            _ => {}
        }
        leaves.push(path.clone());
        return Ok(());
    }
    for (i, child) in node.children.iter().enumerate() {
        path.0.push(i);
        collect_leaves(child, path, leaves, depth)?;
        path.0.pop();
    }
    Ok(())
}
