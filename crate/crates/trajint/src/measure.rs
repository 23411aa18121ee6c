//! Null sets, integrability, and the continuity properties of the prices.
//!
//! The hedging norm replaces measure: a set of leaves is *null* when its
//! indicator can be dominated at arbitrarily small premium, and a claim is
//! *integrable* when its upper and lower prices agree outside null sets.
//! Two identities tie the price operators to the elementary integral and
//! are checkable on any model:
//!
//! * the *L property* at a node — the zero claim prices at zero. It fails
//!   exactly where type II arbitrage leaks in and every price collapses;
//! * the *K property* for a portfolio payoff `f` — the norm splits across
//!   the positive part: `‖f⁺‖ = I(f) + ‖f⁻‖`. It upgrades the price
//!   operators to a full integration theory with convergence theorems,
//!   numeric instances of which [`verify_convergence`] checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::elementary::{ConstraintSet, ElementaryFunction};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::payoff::{LeafValues, Payoff};
use crate::scalar::{Scalar, Sign};
use crate::superhedge::{
    hedge_certificate, lower_values, norm_values, upper_values, HedgeCertificate,
};
use crate::tree::{NodePath, TrajectoryTree};

/// Norm of a leaf set's indicator at a node, with the null decision.
#[derive(Debug, Clone)]
pub struct NullReport<T> {
    pub node: NodePath,
    pub norm_value: Ext<T>,
    pub is_null: bool,
    /// A cheap dominating hedge when one exists.
    pub certificate: Option<HedgeCertificate<T>>,
}

/// Is the leaf set null conditionally at `node`?
pub fn is_conditionally_null<T: Scalar>(
    tree: &TrajectoryTree<T>,
    set: &BTreeSet<NodePath>,
    node: &NodePath,
    constraint: &ConstraintSet<T>,
) -> Result<NullReport<T>> {
    tree.node(node)?;
    let indicator = Payoff::Indicator(set.clone());
    let values = norm_values(tree, &indicator.resolve(tree)?, constraint);
    let norm_value = values.at(node).clone();
    let is_null = norm_value.is_zero();
    let certificate =
        hedge_certificate(tree, &indicator, node, constraint, T::from_ratio(1, 1_000_000)).ok();
    Ok(NullReport {
        node: node.clone(),
        norm_value,
        is_null,
        certificate,
    })
}

/// Prices the zero claim at every node: `true` where it comes out zero.
/// On finite models this is true everywhere exactly when no type II node
/// is reachable, and false at every node from which one is.
pub fn check_l_property<T: Scalar>(
    tree: &TrajectoryTree<T>,
    constraint: &ConstraintSet<T>,
) -> BTreeMap<NodePath, bool> {
    let zero = LeafValues::constant(tree, Ext::zero());
    let values = upper_values(tree, &zero, constraint);
    values
        .iter()
        .map(|(path, v)| (path.clone(), v.is_zero()))
        .collect()
}

/// Both sides of the norm-splitting identity for one portfolio payoff.
#[derive(Debug, Clone)]
pub struct KPropertyReport<T> {
    pub node: NodePath,
    /// `‖f⁺‖` at the node.
    pub norm_pos: Ext<T>,
    /// Elementary integral `I(f)`, the portfolio's capital.
    pub integral: T,
    /// `‖f⁻‖` at the node.
    pub norm_neg: Ext<T>,
    pub holds: bool,
}

/// Checks `‖f⁺‖ = I(f) + ‖f⁻‖` at the portfolio's conditioning node.
pub fn check_k_property<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &ElementaryFunction<T>,
    constraint: &ConstraintSet<T>,
) -> Result<KPropertyReport<T>> {
    let node = f.conditioning_node().clone();
    let leaf_values = f.leaf_values(tree)?;
    let norm_pos = upper_values(tree, &leaf_values.pos_part(), constraint)
        .at(&node)
        .clone();
    let norm_neg = upper_values(tree, &leaf_values.neg_part(), constraint)
        .at(&node)
        .clone();
    let integral = f.initial_value().clone();
    let rhs = Ext::Finite(integral.clone()).add(&norm_neg);
    let holds = norm_pos.approx_eq(&rhs);
    Ok(KPropertyReport {
        node,
        norm_pos,
        integral,
        norm_neg,
        holds,
    })
}

/// Per-depth integrability analysis of a claim.
#[derive(Debug, Clone)]
pub struct IntegrabilityReport<T> {
    pub depth: usize,
    /// Upper-minus-lower price gap at every depth node.
    pub gaps: BTreeMap<NodePath, Ext<T>>,
    /// Nodes with a nonzero gap.
    pub exceptional: BTreeSet<NodePath>,
    /// The exceptional nodes' leaves form a null set, so the claim is
    /// integrable at this depth.
    pub integrable: bool,
    /// Conditional integral where the gap vanishes.
    pub integral_values: BTreeMap<NodePath, Ext<T>>,
}

/// Computes the price gap at every depth-`depth` node and decides
/// integrability: the gap must vanish outside a null union of scenario
/// sets.
pub fn check_integrable<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    depth: usize,
    constraint: &ConstraintSet<T>,
) -> Result<IntegrabilityReport<T>> {
    let leaf_values = f.resolve(tree)?;
    check_integrable_values(tree, &leaf_values, depth, constraint)
}

pub(crate) fn check_integrable_values<T: Scalar>(
    tree: &TrajectoryTree<T>,
    leaf_values: &LeafValues<T>,
    depth: usize,
    constraint: &ConstraintSet<T>,
) -> Result<IntegrabilityReport<T>> {
    let upper = upper_values(tree, leaf_values, constraint);
    let lower = lower_values(tree, leaf_values, constraint);
    let mut gaps = BTreeMap::new();
    let mut exceptional = BTreeSet::new();
    let mut integral_values = BTreeMap::new();
    for node in tree.nodes_at_depth(depth) {
        let up = upper.at(&node).clone();
        let lo = lower.at(&node).clone();
        let gap = up.sub(&lo);
        if gap.is_zero() {
            integral_values.insert(node.clone(), up);
        } else {
            exceptional.insert(node.clone());
        }
        gaps.insert(node, gap);
    }
    let integrable = leaf_set_is_null(tree, &exceptional, constraint)?;
    Ok(IntegrabilityReport {
        depth,
        gaps,
        exceptional,
        integrable,
        integral_values,
    })
}

/// Norm at the root of the union of scenario sets below `nodes`.
pub(crate) fn leaf_set_is_null<T: Scalar>(
    tree: &TrajectoryTree<T>,
    nodes: &BTreeSet<NodePath>,
    constraint: &ConstraintSet<T>,
) -> Result<bool> {
    if nodes.is_empty() {
        return Ok(true);
    }
    let indicator = LeafValues::from_fn(tree, |leaf| {
        if nodes.iter().any(|n| n.is_prefix_of(leaf)) {
            Ext::Finite(T::one())
        } else {
            Ext::zero()
        }
    });
    let norm = norm_values(tree, &indicator, constraint);
    Ok(norm.at(&NodePath::root()).is_zero())
}

/// Convergence-check flavors for payoff families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Nondecreasing family; the last member plays the limit.
    Monotone,
    /// Nonnegative pieces; the sum must price like the sum of prices.
    BeppoLevi,
}

/// Numeric convergence report at one depth.
#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub mode: ConvergenceMode,
    pub depth: usize,
    /// Monotone mode: worst `‖f − f_n‖` over depth nodes, per member.
    /// Beppo-Levi mode: worst price-additivity residual, per depth node.
    pub residuals: Vec<Ext<T>>,
    /// Monotone mode: worst `|∫f − ∫f_n|` per member.
    pub integral_residuals: Vec<Ext<T>>,
    pub ok: bool,
}

/// Default family truncation for callers that build sequences themselves.
pub const DEFAULT_FAMILY_TRUNCATION: usize = 64;

/// Checks a numeric instance of the convergence theorems.
///
/// Monotone mode: the family must be pointwise nondecreasing; residuals
/// `‖f_last − f_n‖` and `|σ̄ f_last − σ̄ f_n|` are reported per member and
/// must shrink to zero.
///
/// Beppo-Levi mode: the family members must be nonnegative; the price of
/// the finite sum must equal the sum of the prices at every depth node
/// (exact for portfolio payoffs, the defining case).
pub fn verify_convergence<T: Scalar>(
    tree: &TrajectoryTree<T>,
    family: &[Payoff<T>],
    depth: usize,
    mode: ConvergenceMode,
    constraint: &ConstraintSet<T>,
) -> Result<ConvergenceReport<T>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let resolved: Vec<LeafValues<T>> = family
        .iter()
        .map(|f| f.resolve(tree))
        .collect::<Result<_>>()?;
    let nodes = tree.nodes_at_depth(depth);
    match mode {
        ConvergenceMode::Monotone => {
            for i in 0..resolved.len() - 1 {
                let ok = resolved[i]
                    .iter()
                    .zip(resolved[i + 1].iter())
                    .all(|(a, b)| a.le_approx(b));
                if !ok {
                    return Err(Error::NotMonotone(i, i + 1));
                }
            }
            let limit = resolved.last().expect("nonempty");
            let limit_upper = upper_values(tree, limit, constraint);
            let mut residuals = Vec::with_capacity(resolved.len());
            let mut integral_residuals = Vec::with_capacity(resolved.len());
            for member in &resolved {
                let diff = limit.sub(member);
                let norms = norm_values(tree, &diff, constraint);
                let member_upper = upper_values(tree, member, constraint);
                let mut worst_norm = Ext::zero();
                let mut worst_int = Ext::zero();
                for node in &nodes {
                    worst_norm = worst_norm.max_ext(norms.at(node).clone());
                    let d = limit_upper.at(node).sub(member_upper.at(node)).abs_ext();
                    worst_int = worst_int.max_ext(d);
                }
                residuals.push(worst_norm);
                integral_residuals.push(worst_int);
            }
            let shrinking = residuals.windows(2).all(|w| w[1].le_approx(&w[0]))
                && residuals.last().map(Ext::is_zero).unwrap_or(true);
            Ok(ConvergenceReport {
                mode,
                depth,
                residuals,
                integral_residuals,
                ok: shrinking,
            })
        }
        ConvergenceMode::BeppoLevi => {
            for (i, member) in resolved.iter().enumerate() {
                if !member.iter().all(|v| v.sign() != Sign::Negative) {
                    return Err(Error::NotMonotone(i, i));
                }
            }
            let mut total = resolved[0].clone();
            for member in &resolved[1..] {
                total = total.add(member);
            }
            let sum_prices: Vec<_> = resolved
                .iter()
                .map(|m| upper_values(tree, m, constraint))
                .collect();
            let total_prices = upper_values(tree, &total, constraint);
            let mut residuals = Vec::with_capacity(nodes.len());
            let mut ok = true;
            for node in &nodes {
                let mut rhs = Ext::zero();
                for prices in &sum_prices {
                    rhs = rhs.add(prices.at(node));
                }
                let lhs = total_prices.at(node).clone();
                let resid = lhs.sub(&rhs).abs_ext();
                if !lhs.approx_eq(&rhs) {
                    ok = false;
                }
                residuals.push(resid);
            }
            Ok(ConvergenceReport {
                mode,
                depth,
                residuals,
                integral_residuals: Vec::new(),
                ok,
            })
        }
    }
}
