//! Node taxonomy: up-down, flat, and the two arbitrage patterns.
//!
//! Each interior node is classified by the signs its one-step increments
//! attain. Increments of both strict signs make an *up-down* node; all-zero
//! increments a *flat* node; a one-sided node is an arbitrage node, of
//! *type I* when a zero increment keeps a riskless continuation available
//! and of *type II* when every continuation moves strictly one way. Type II
//! nodes are the destructive case: the superhedging price of every claim
//! collapses to `−∞` there.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Sign};
use crate::tree::{NodePath, TrajectoryTree};

/// The four mutually exclusive node patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    UpDown,
    Flat,
    ArbitrageI,
    ArbitrageII,
}

/// Classification of one interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeClass<T> {
    pub kind: NodeKind,
    /// Increments attain both signs weakly: `sup ≥ 0` and `inf ≤ 0`.
    pub zero_neutral: bool,
    /// Largest one-step increment over the node's children.
    pub sup_inc: T,
    /// Smallest one-step increment.
    pub inf_inc: T,
}

/// Classifies one interior node. In float mode increments within the zero
/// band count as zero.
pub fn classify_node<T: Scalar>(
    tree: &TrajectoryTree<T>,
    node: &NodePath,
) -> Result<NodeClass<T>> {
    let n = tree.node(node)?;
    if n.is_leaf() {
        return Err(Error::LeafNode(node.clone()));
    }
    let value = n.value().clone();
    let mut sup: Option<T> = None;
    let mut inf: Option<T> = None;
    let mut has_zero = false;
    for child in n.children() {
        let inc = child.value().clone() - value.clone();
        if inc.sign() == Sign::Zero {
            has_zero = true;
        }
        sup = Some(match sup {
            None => inc.clone(),
            Some(s) => s.max_val(inc.clone()),
        });
        inf = Some(match inf {
            None => inc,
            Some(s) => s.min_val(inc),
        });
    }
    let sup_inc = sup.expect("interior node has children");
    let inf_inc = inf.expect("interior node has children");
    let (up, down) = (sup_inc.sign(), inf_inc.sign());
    let kind = match (up, down) {
        (Sign::Positive, Sign::Negative) => NodeKind::UpDown,
        (Sign::Zero, Sign::Zero) => NodeKind::Flat,
        _ if has_zero => NodeKind::ArbitrageI,
        _ => NodeKind::ArbitrageII,
    };
    let zero_neutral = up != Sign::Negative && down != Sign::Positive;
    Ok(NodeClass {
        kind,
        zero_neutral,
        sup_inc,
        inf_inc,
    })
}

/// Tree-wide classification with summary flags.
#[derive(Debug, Clone)]
pub struct TreeScan<T> {
    /// Classification of every interior node.
    pub classes: BTreeMap<NodePath, NodeClass<T>>,
    /// Every interior node is zero-neutral.
    pub locally_zero_neutral: bool,
    /// Every interior node is up-down or flat.
    pub locally_arbitrage_free: bool,
    pub has_type_i: bool,
    pub has_type_ii: bool,
}

pub fn scan_tree<T: Scalar>(tree: &TrajectoryTree<T>) -> TreeScan<T> {
    let mut classes = BTreeMap::new();
    let mut all_neutral = true;
    let mut all_free = true;
    let mut has_type_i = false;
    let mut has_type_ii = false;
    for node in tree.interior_nodes() {
        let class = classify_node(tree, &node).expect("interior node");
        all_neutral &= class.zero_neutral;
        match class.kind {
            NodeKind::UpDown | NodeKind::Flat => {}
            NodeKind::ArbitrageI => {
                all_free = false;
                has_type_i = true;
            }
            NodeKind::ArbitrageII => {
                all_free = false;
                has_type_ii = true;
            }
        }
        classes.insert(node, class);
    }
    TreeScan {
        classes,
        locally_zero_neutral: all_neutral,
        locally_arbitrage_free: all_free,
        has_type_i,
        has_type_ii,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeNode;

    fn one_step(s0: f64, children: &[f64]) -> TrajectoryTree<f64> {
        TrajectoryTree::from_root(TreeNode::branch(
            s0,
            children.iter().map(|&v| TreeNode::leaf(v)).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn updown_node() {
        let t = one_step(1.0, &[2.0, 0.0]);
        let c = classify_node(&t, &NodePath::root()).unwrap();
        assert_eq!(c.kind, NodeKind::UpDown);
        assert!(c.zero_neutral);
        assert_eq!(c.sup_inc, 1.0);
        assert_eq!(c.inf_inc, -1.0);
    }

    #[test]
    fn arbitrage_type_i_node() {
        let t = one_step(1.0, &[1.0, 2.0]);
        let c = classify_node(&t, &NodePath::root()).unwrap();
        assert_eq!(c.kind, NodeKind::ArbitrageI);
        assert!(c.zero_neutral);
    }

    #[test]
    fn arbitrage_type_ii_node() {
        let t = one_step(1.0, &[2.0, 3.0]);
        let c = classify_node(&t, &NodePath::root()).unwrap();
        assert_eq!(c.kind, NodeKind::ArbitrageII);
        assert!(!c.zero_neutral);
    }

    #[test]
    fn flat_chain() {
        let t = TrajectoryTree::from_root(TreeNode::branch(
            1.0,
            vec![TreeNode::branch(1.0, vec![TreeNode::leaf(1.0)])],
        ))
        .unwrap();
        let scan = scan_tree(&t);
        assert!(scan
            .classes
            .values()
            .all(|c| c.kind == NodeKind::Flat && c.zero_neutral));
        assert!(scan.locally_arbitrage_free);
        assert!(scan.locally_zero_neutral);
    }

    #[test]
    fn leaf_classification_errors() {
        let t = one_step(1.0, &[2.0, 0.5]);
        assert!(classify_node(&t, &NodePath::from_indices(vec![0])).is_err());
    }

    #[test]
    fn exactly_one_kind_for_every_sign_pattern() {
        // sweep s0 = 1 with child pairs covering all sign patterns
        let cases: &[(&[f64], NodeKind, bool)] = &[
            (&[2.0, 0.5], NodeKind::UpDown, true),
            (&[1.0, 1.0], NodeKind::Flat, true),
            (&[1.0, 2.0], NodeKind::ArbitrageI, true),
            (&[1.0, 0.5], NodeKind::ArbitrageI, true),
            (&[2.0, 3.0], NodeKind::ArbitrageII, false),
            (&[0.25, 0.5], NodeKind::ArbitrageII, false),
            (&[1.0], NodeKind::Flat, true),
            (&[2.0], NodeKind::ArbitrageII, false),
            (&[0.5], NodeKind::ArbitrageII, false),
            (&[2.0, 1.0, 0.5], NodeKind::UpDown, true),
        ];
        for (children, kind, neutral) in cases {
            let t = one_step(1.0, children);
            let c = classify_node(&t, &NodePath::root()).unwrap();
            assert_eq!(c.kind, *kind, "children {children:?}");
            assert_eq!(c.zero_neutral, *neutral, "children {children:?}");
        }
    }

    #[test]
    fn float_zero_band_counts_as_zero() {
        let t = one_step(1.0, &[1.0 + 1e-12, 2.0]);
        let c = classify_node(&t, &NodePath::root()).unwrap();
        assert_eq!(c.kind, NodeKind::ArbitrageI);
    }
}
