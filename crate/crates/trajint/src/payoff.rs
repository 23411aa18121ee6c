//! Payoffs: extended-real claims on leaf trajectories.
//!
//! A payoff assigns a value in `[-∞, +∞]` to every leaf path. Built-in kinds
//! cover the usual contracts; `LeafTable` holds arbitrary values keyed by
//! leaf path. The pricing engine consumes payoffs resolved into a
//! [`LeafValues`] vector aligned with the tree's canonical leaf order, which
//! also gives a place for pointwise algebra (sums, parts, scaling) without
//! growing the enum.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;
use crate::tree::{NodePath, TrajectoryTree};

/// A claim on leaf trajectories.
#[derive(Debug, Clone)]
pub enum Payoff<T> {
    /// Constant value on every leaf.
    Constant(Ext<T>),
    /// Terminal price `S_N`.
    TerminalValue,
    /// Call on the terminal price: `(S_N − K)⁺`.
    Call { strike: T },
    /// Put on the terminal price: `(K − S_N)⁺`.
    Put { strike: T },
    /// Absolute one-step move `|S_{i+1} − S_i|`.
    AbsIncrement { step: usize },
    /// Indicator of a set of leaves (values in {0, 1}).
    Indicator(BTreeSet<NodePath>),
    /// Arbitrary per-leaf values; must cover every leaf of the tree in use.
    LeafTable(BTreeMap<NodePath, Ext<T>>),
}

impl<T: Scalar> Payoff<T> {
    pub fn zero() -> Self {
        Payoff::Constant(Ext::zero())
    }

    pub fn constant(v: T) -> Self {
        Payoff::Constant(Ext::Finite(v))
    }

    /// Value on one leaf. Errors on non-leaf paths and on missing table
    /// entries.
    pub fn evaluate(&self, tree: &TrajectoryTree<T>, leaf: &NodePath) -> Result<Ext<T>> {
        tree.require_leaf(leaf)?;
        match self {
            Payoff::Constant(c) => Ok(c.clone()),
            Payoff::TerminalValue => Ok(Ext::Finite(tree.value_at(leaf)?.clone())),
            Payoff::Call { strike } => {
                let s = tree.value_at(leaf)?.clone();
                Ok(Ext::Finite(s - strike.clone()).pos_part())
            }
            Payoff::Put { strike } => {
                let s = tree.value_at(leaf)?.clone();
                Ok(Ext::Finite(strike.clone() - s).pos_part())
            }
            Payoff::AbsIncrement { step } => {
                let prices = tree.path_prices(leaf)?;
                if step + 1 >= prices.len() {
                    return Err(Error::InvalidPath(leaf.prefix(step + 1)));
                }
                let d = prices[step + 1].clone() - prices[*step].clone();
                Ok(Ext::Finite(Scalar::abs(&d)))
            }
            Payoff::Indicator(set) => Ok(if set.contains(leaf) {
                Ext::Finite(T::one())
            } else {
                Ext::zero()
            }),
            Payoff::LeafTable(table) => table
                .get(leaf)
                .cloned()
                .ok_or_else(|| Error::MissingTableEntry(leaf.clone())),
        }
    }

    /// Resolves the payoff on every leaf of the tree.
    pub fn resolve(&self, tree: &TrajectoryTree<T>) -> Result<LeafValues<T>> {
        let mut values = Vec::with_capacity(tree.leaves().len());
        for leaf in tree.leaves() {
            values.push(self.evaluate(tree, leaf)?);
        }
        Ok(LeafValues { values })
    }
}

/// A payoff resolved into the tree's canonical leaf order.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafValues<T> {
    values: Vec<Ext<T>>,
}

impl<T: Scalar> LeafValues<T> {
    pub fn new(values: Vec<Ext<T>>) -> Self {
        LeafValues { values }
    }

    pub fn from_fn(
        tree: &TrajectoryTree<T>,
        f: impl FnMut(&NodePath) -> Ext<T>,
    ) -> Self {
        LeafValues {
            values: tree.leaves().iter().map(f).collect(),
        }
    }

    pub fn constant(tree: &TrajectoryTree<T>, v: Ext<T>) -> Self {
        LeafValues {
            values: vec![v; tree.leaves().len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> &Ext<T> {
        &self.values[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ext<T>> {
        self.values.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "payoffs on different trees");
        LeafValues {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LeafValues {
            values: self.values.iter().map(Ext::neg).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        LeafValues {
            values: self.values.iter().map(|v| Ext::scale(c, v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        LeafValues {
            values: self.values.iter().map(Ext::abs_ext).collect(),
        }
    }

    pub fn pos_part(&self) -> Self {
        LeafValues {
            values: self.values.iter().map(Ext::pos_part).collect(),
        }
    }

    pub fn neg_part(&self) -> Self {
        LeafValues {
            values: self.values.iter().map(Ext::neg_part).collect(),
        }
    }

    /// Pointwise `self ≤ other` (exact extended-real order).
    pub fn le(&self, other: &Self) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a.le_ext(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeNode;

    fn one_step(children: &[f64]) -> TrajectoryTree<f64> {
        TrajectoryTree::from_root(TreeNode::branch(
            1.0,
            children.iter().map(|&v| TreeNode::leaf(v)).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn call_put_constant() {
        let t = one_step(&[2.0, 0.5]);
        let up = NodePath::from_indices(vec![0]);
        let down = NodePath::from_indices(vec![1]);
        let call = Payoff::Call { strike: 1.0 };
        assert_eq!(call.evaluate(&t, &up).unwrap(), Ext::Finite(1.0));
        assert_eq!(call.evaluate(&t, &down).unwrap(), Ext::Finite(0.0));
        let put = Payoff::Put { strike: 1.0 };
        assert_eq!(put.evaluate(&t, &down).unwrap(), Ext::Finite(0.5));
        let c = Payoff::constant(5.0);
        assert_eq!(c.evaluate(&t, &up).unwrap(), Ext::Finite(5.0));
    }

    #[test]
    fn indicator_outside_set_is_zero() {
        let t = one_step(&[2.0, 0.5]);
        let set: BTreeSet<_> = [NodePath::from_indices(vec![0])].into_iter().collect();
        let ind = Payoff::Indicator(set);
        assert_eq!(
            ind.evaluate(&t, &NodePath::from_indices(vec![1])).unwrap(),
            Ext::Finite(0.0)
        );
    }

    #[test]
    fn table_lookup_is_exact_and_missing_entry_errors() {
        let t = one_step(&[2.0, 0.5]);
        let mut table = BTreeMap::new();
        table.insert(NodePath::from_indices(vec![0]), Ext::PosInf);
        let p = Payoff::LeafTable(table);
        assert_eq!(
            p.evaluate(&t, &NodePath::from_indices(vec![0])).unwrap(),
            Ext::PosInf
        );
        assert!(p.evaluate(&t, &NodePath::from_indices(vec![1])).is_err());
    }

    #[test]
    fn non_leaf_evaluation_errors() {
        let t = one_step(&[2.0, 0.5]);
        let p = Payoff::<f64>::zero();
        assert!(p.evaluate(&t, &NodePath::root()).is_err());
    }

    #[test]
    fn leaf_values_algebra() {
        let t = one_step(&[2.0, 0.5]);
        let f = Payoff::TerminalValue.resolve(&t).unwrap();
        let g = Payoff::constant(1.0).resolve(&t).unwrap();
        let diff = f.sub(&g);
        assert_eq!(diff.get(0), &Ext::Finite(1.0));
        assert_eq!(diff.get(1), &Ext::Finite(-0.5));
        assert_eq!(diff.pos_part().get(1), &Ext::Finite(0.0));
        assert_eq!(diff.neg_part().get(1), &Ext::Finite(0.5));
        assert!(diff.le(&f));
    }
}
