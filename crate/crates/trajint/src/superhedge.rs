//! Superhedging prices by backward minimax recursion.
//!
//! The conditional upper price of a claim at a node is the least capital
//! whose trading proceeds dominate the claim on every path through that
//! node. On a finite tree this reduces to a one-dimensional convex program
//! per node, solved backwards from the leaves:
//!
//! ```text
//! value(node) = inf over h in [lo, hi] of  max over children k of
//!               ( value(child k)  −  h · Δ_k )
//! ```
//!
//! The program is piecewise linear in `h`, so the infimum sits at a pairwise
//! crossing or an interval endpoint — except at arbitrage nodes, where it is
//! approached in the limit of large positions and never attained:
//!
//! * at a *type II* node every continuation moves strictly one way; an
//!   unbounded position turns that into unbounded riskless profit and the
//!   value collapses to `−∞` for every claim;
//! * at a *type I* node the one-sided moves can be dominated for free by
//!   ever-larger positions, so the children that actually move drop out and
//!   the value is the worst zero-increment continuation. This is the
//!   mechanism that makes those subtrees *null*: their indicator can be
//!   dominated at arbitrarily small cost.
//!
//! Children whose own value is `−∞` impose no constraint (any shortfall
//! there can be covered at unboundedly negative cost) and are dropped
//! before the pattern analysis. Holding bounds cut these limit rules off:
//! with a bounded interval the same node solves as an ordinary endpoint
//! minimization and arbitrage nodes can carry finite values.

use std::collections::BTreeMap;

use crate::elementary::{ConstraintSet, ElementaryFunction, HoldingInterval};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::payoff::{LeafValues, Payoff};
use crate::scalar::{Scalar, Sign};
use crate::tree::{NodePath, TrajectoryTree};

/// Solved one-step hedging program at a node.
#[derive(Debug, Clone)]
pub struct NodeSolve<T> {
    /// One `(increment, continuation value)` pair per child.
    pub points: Vec<(T, Ext<T>)>,
    /// Holding interval the minimization ran over.
    pub interval: HoldingInterval<T>,
    /// Optimal value.
    pub value: Ext<T>,
    /// Minimizing holding when the finite minimization applied; absent when
    /// a limit rule produced the value.
    pub minimizer: Option<T>,
}

/// Minimizes `h ↦ max_k (v_k − h·Δ_k)` over the holding interval, with the
/// limit rules described in the module docs. Ties between minimizing
/// holdings resolve to the one smallest in absolute value.
pub fn node_minimax<T: Scalar>(
    points: &[(T, Ext<T>)],
    interval: &HoldingInterval<T>,
) -> NodeSolve<T> {
    let solve = |value, minimizer| NodeSolve {
        points: points.to_vec(),
        interval: interval.clone(),
        value,
        minimizer,
    };

    // A child worth −∞ can absorb any shortfall: no constraint.
    let active: Vec<&(T, Ext<T>)> = points
        .iter()
        .filter(|(_, v)| !matches!(v, Ext::NegInf))
        .collect();
    if active.is_empty() {
        return solve(Ext::NegInf, None);
    }

    let mut has_pos = false;
    let mut has_neg = false;
    let mut has_zero = false;
    for (delta, _) in &active {
        match delta.sign() {
            Sign::Positive => has_pos = true,
            Sign::Negative => has_neg = true,
            Sign::Zero => has_zero = true,
        }
    }

    // Type II pattern with the exploiting direction open: unbounded profit.
    if !has_neg && !has_zero && interval.unbounded_above() {
        return solve(Ext::NegInf, None);
    }
    if !has_pos && !has_zero && interval.unbounded_below() {
        return solve(Ext::NegInf, None);
    }

    // Type I pattern: moving children are dominated for free in the limit,
    // leaving the worst zero-increment continuation.
    if !has_neg && has_zero && has_pos && interval.unbounded_above() {
        return solve(max_over_flat(&active), None);
    }
    if !has_pos && has_zero && has_neg && interval.unbounded_below() {
        return solve(max_over_flat(&active), None);
    }

    // No limit rule applies; a +∞ continuation cannot be dominated.
    if active.iter().any(|(_, v)| matches!(v, Ext::PosInf)) {
        return solve(Ext::PosInf, None);
    }

    let finite: Vec<(T, T)> = active
        .iter()
        .map(|(d, v)| (d.clone(), v.as_finite().expect("finite").clone()))
        .collect();

    // Candidate holdings: zero, finite endpoints, pairwise crossings.
    let mut candidates: Vec<T> = vec![T::zero()];
    if let Ext::Finite(lo) = interval.lo() {
        candidates.push(lo.clone());
    }
    if let Ext::Finite(hi) = interval.hi() {
        candidates.push(hi.clone());
    }
    for i in 0..finite.len() {
        for j in (i + 1)..finite.len() {
            let dd = finite[i].0.clone() - finite[j].0.clone();
            if dd.sign() == Sign::Zero {
                continue;
            }
            let h = (finite[i].1.clone() - finite[j].1.clone()) / dd;
            if interval.contains(&h) {
                candidates.push(h);
            }
        }
    }

    let eval = |h: &T| -> T {
        let mut best: Option<T> = None;
        for (d, v) in &finite {
            let y = v.clone() - h.clone() * d.clone();
            best = Some(match best {
                None => y,
                Some(b) => b.max_val(y),
            });
        }
        best.expect("nonempty")
    };

    // Smallest |h| first, so exact ties pick the most conservative holding.
    candidates.sort_by(|a, b| {
        Scalar::abs(a)
            .total_cmp(&Scalar::abs(b))
            .then_with(|| a.total_cmp(b))
    });
    let mut best_h = candidates[0].clone();
    let mut best_v = eval(&best_h);
    for h in candidates.iter().skip(1) {
        let v = eval(h);
        if v.total_cmp(&best_v) == std::cmp::Ordering::Less {
            best_v = v;
            best_h = h.clone();
        }
    }
    solve(Ext::Finite(best_v), Some(best_h))
}

fn max_over_flat<T: Scalar>(active: &[&(T, Ext<T>)]) -> Ext<T> {
    active
        .iter()
        .filter(|(d, _)| d.sign() == Sign::Zero)
        .map(|(_, v)| v.clone())
        .reduce(Ext::max_ext)
        .expect("zero-increment child present")
}

/// Backward-induction values at every node of the tree.
#[derive(Debug, Clone)]
pub struct NodeValues<T> {
    values: BTreeMap<NodePath, Ext<T>>,
}

impl<T: Scalar> NodeValues<T> {
    pub fn get(&self, node: &NodePath) -> Option<&Ext<T>> {
        self.values.get(node)
    }

    pub fn at(&self, node: &NodePath) -> &Ext<T> {
        self.values.get(node).expect("node priced")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodePath, &Ext<T>)> {
        self.values.iter()
    }

    pub fn into_map(self) -> BTreeMap<NodePath, Ext<T>> {
        self.values
    }
}

/// Full upper-price recursion: every node's superhedging price of `f`.
pub fn upper_values<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &LeafValues<T>,
    constraint: &ConstraintSet<T>,
) -> NodeValues<T> {
    let (values, _) = upper_solves(tree, f, constraint);
    values
}

/// Like [`upper_values`], also returning the per-node solves (used for
/// certificate extraction).
pub fn upper_solves<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &LeafValues<T>,
    constraint: &ConstraintSet<T>,
) -> (NodeValues<T>, BTreeMap<NodePath, NodeSolve<T>>) {
    assert_eq!(
        f.len(),
        tree.leaves().len(),
        "leaf values not aligned with tree"
    );
    let mut values = BTreeMap::new();
    let mut solves = BTreeMap::new();
    let mut leaf_cursor = 0usize;
    fn go<T: Scalar>(
        node: &crate::tree::TreeNode<T>,
        path: &mut NodePath,
        f: &LeafValues<T>,
        constraint: &ConstraintSet<T>,
        values: &mut BTreeMap<NodePath, Ext<T>>,
        solves: &mut BTreeMap<NodePath, NodeSolve<T>>,
        leaf_cursor: &mut usize,
    ) -> Ext<T> {
        if node.is_leaf() {
            let v = f.get(*leaf_cursor).clone();
            *leaf_cursor += 1;
            values.insert(path.clone(), v.clone());
            return v;
        }
        let mut points = Vec::with_capacity(node.children().len());
        for (i, child) in node.children().iter().enumerate() {
            path.0.push(i);
            let v = go(child, path, f, constraint, values, solves, leaf_cursor);
            path.0.pop();
            let delta = child.value().clone() - node.value().clone();
            points.push((delta, v));
        }
        let solve = node_minimax(&points, constraint.interval_at(path.depth()));
        let v = solve.value.clone();
        values.insert(path.clone(), v.clone());
        solves.insert(path.clone(), solve);
        v
    }
    go(
        tree.root(),
        &mut NodePath::root(),
        f,
        constraint,
        &mut values,
        &mut solves,
        &mut leaf_cursor,
    );
    (NodeValues { values }, solves)
}

/// Lower prices: `−upper(−f)` at every node.
pub fn lower_values<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &LeafValues<T>,
    constraint: &ConstraintSet<T>,
) -> NodeValues<T> {
    let upper = upper_values(tree, &f.neg(), constraint);
    NodeValues {
        values: upper
            .values
            .into_iter()
            .map(|(k, v)| (k, v.neg()))
            .collect(),
    }
}

/// Hedging norms: upper prices of `|f|` at every node. On type-II-free
/// trees this equals the least premium of nonnegative dominating hedges;
/// it is the crate's null-set detector.
pub fn norm_values<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &LeafValues<T>,
    constraint: &ConstraintSet<T>,
) -> NodeValues<T> {
    upper_values(tree, &f.abs(), constraint)
}

/// Conditional upper price of a payoff at one node.
pub fn upper_integral<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    node: &NodePath,
    constraint: &ConstraintSet<T>,
) -> Result<Ext<T>> {
    tree.node(node)?;
    let values = upper_values(tree, &f.resolve(tree)?, constraint);
    Ok(values.at(node).clone())
}

/// Conditional lower price of a payoff at one node.
pub fn lower_integral<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    node: &NodePath,
    constraint: &ConstraintSet<T>,
) -> Result<Ext<T>> {
    tree.node(node)?;
    let values = lower_values(tree, &f.resolve(tree)?, constraint);
    Ok(values.at(node).clone())
}

/// Conditional hedging norm `‖f‖` of a payoff at one node.
pub fn conditional_norm<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    node: &NodePath,
    constraint: &ConstraintSet<T>,
) -> Result<Ext<T>> {
    tree.node(node)?;
    let values = norm_values(tree, &f.resolve(tree)?, constraint);
    Ok(values.at(node).clone())
}

/// A finite dominating hedge witnessing an upper price.
#[derive(Debug, Clone)]
pub struct HedgeCertificate<T> {
    pub elements: Vec<ElementaryFunction<T>>,
    /// Sum of the elements' initial capitals.
    pub total_premium: T,
    /// Guaranteed bound: `total_premium ≤ value + slack`.
    pub slack: T,
}

impl<T: Scalar> HedgeCertificate<T> {
    /// Re-derives the certificate's guarantees by direct evaluation: the
    /// element sum dominates `f` on every leaf under `node`, and the
    /// premium stays within `value + slack`.
    pub fn validate(
        &self,
        tree: &TrajectoryTree<T>,
        f: &LeafValues<T>,
        node: &NodePath,
        value: &Ext<T>,
    ) -> Result<bool> {
        for (idx, leaf) in tree.leaves().iter().enumerate() {
            if !node.is_prefix_of(leaf) {
                continue;
            }
            let mut total = T::zero();
            for e in &self.elements {
                total = total + e.evaluate(tree, leaf)?;
            }
            if !f.get(idx).le_approx(&Ext::Finite(total)) {
                return Ok(false);
            }
        }
        let budget = value.add(&Ext::Finite(self.slack.clone()));
        Ok(Ext::Finite(self.total_premium.clone()).le_approx(&budget))
    }
}

/// Extracts a dominating hedge from the recursion. When every node attains
/// its minimum the certificate replicates the optimal value exactly; at
/// arbitrage nodes a finite position large enough to dominate the moving
/// children is substituted, which still meets the optimal premium for
/// finite payoffs.
///
/// Fails when the value is `−∞` (no finite certificate exists) or when the
/// claim takes the value `+∞` somewhere under `node` (no finite hedge can
/// dominate it pointwise).
pub fn hedge_certificate<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    node: &NodePath,
    constraint: &ConstraintSet<T>,
    slack: T,
) -> Result<HedgeCertificate<T>> {
    let leaf_values = f.resolve(tree)?;
    tree.node(node)?;
    let (values, solves) = upper_solves(tree, &leaf_values, constraint);
    let value = values.at(node).clone();
    match &value {
        Ext::NegInf => return Err(Error::NoFiniteCertificate(value.to_string())),
        Ext::PosInf => return Err(Error::NoFiniteCertificate(value.to_string())),
        Ext::Finite(_) => {}
    }
    for (idx, leaf) in tree.leaves().iter().enumerate() {
        if node.is_prefix_of(leaf) && matches!(leaf_values.get(idx), Ext::PosInf) {
            return Err(Error::UnhedgeableInfinity(leaf.clone()));
        }
    }

    // All-zero claims are dominated by the empty hedge.
    let all_zero = tree
        .leaves()
        .iter()
        .enumerate()
        .filter(|(_, l)| node.is_prefix_of(l))
        .all(|(i, _)| leaf_values.get(i).is_zero());
    if all_zero {
        return Ok(HedgeCertificate {
            elements: Vec::new(),
            total_premium: T::zero(),
            slack,
        });
    }

    let v0 = value.as_finite().expect("finite").clone();
    let mut holdings: BTreeMap<NodePath, T> = BTreeMap::new();
    let mut maturity = node.depth();
    assign_holdings(tree, node, v0.clone(), &solves, &mut holdings, &mut maturity)?;
    let element = ElementaryFunction::new(node.clone(), v0.clone(), holdings, maturity)?;
    Ok(HedgeCertificate {
        elements: vec![element],
        total_premium: v0,
        slack,
    })
}

/// Walks the solved recursion top-down, keeping at every node a budget at
/// least its value, and picks a holding that hands each child a sufficient
/// budget in turn.
fn assign_holdings<T: Scalar>(
    tree: &TrajectoryTree<T>,
    at: &NodePath,
    budget: T,
    solves: &BTreeMap<NodePath, NodeSolve<T>>,
    holdings: &mut BTreeMap<NodePath, T>,
    maturity: &mut usize,
) -> Result<()> {
    let Some(solve) = solves.get(at) else {
        return Ok(()); // leaf
    };
    let h = match &solve.minimizer {
        Some(h) => h.clone(),
        None => {
            // Limit-rule node: take a position just large enough that every
            // moving child's requirement is met from the current budget.
            // −∞ children need nothing.
            let mut need = T::zero();
            for (delta, v) in &solve.points {
                let Ext::Finite(v) = v else { continue };
                if delta.sign() == Sign::Zero {
                    continue;
                }
                let req = (v.clone() - budget.clone()) / delta.clone();
                need = match delta.sign() {
                    Sign::Positive => need.max_val(req),
                    _ => need.min_val(req),
                };
            }
            need
        }
    };
    if h.sign() != Sign::Zero {
        holdings.insert(at.clone(), h.clone());
        *maturity = (*maturity).max(at.depth() + 1);
    }
    let n = tree.node(at)?;
    for (i, child) in n.children().iter().enumerate() {
        let delta = child.value().clone() - n.value().clone();
        let child_budget = budget.clone() + h.clone() * delta;
        assign_holdings(tree, &at.child(i), child_budget, solves, holdings, maturity)?;
    }
    Ok(())
}
