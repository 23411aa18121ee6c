//! Price processes, the tower property, and martingale classification.
//!
//! Conditioning a claim at every node yields a process indexed by the tree:
//! one value per node, constant on each conditional scenario set. Iterated
//! conditioning collapses to the coarser level (the tower property), upper
//! processes fall and lower processes rise along the tree, and integrable
//! claims produce processes fixed by one-step conditioning — the crate's
//! martingales.

use std::collections::{BTreeMap, BTreeSet};

use crate::elementary::ConstraintSet;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::{check_integrable_values, leaf_set_is_null};
use crate::payoff::{LeafValues, Payoff};
use crate::scalar::Scalar;
use crate::superhedge::{lower_values, upper_values, NodeValues};
use crate::tree::{NodePath, TrajectoryTree};

/// Which conditional price the process carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessMode {
    Upper,
    Lower,
    /// Conditional integral; requires integrability at every depth.
    Integral,
}

/// A node-indexed price process.
#[derive(Debug, Clone)]
pub struct PriceProcess<T> {
    pub mode: ProcessMode,
    /// One value per node of the tree (constant on each conditional set by
    /// construction).
    pub values: BTreeMap<NodePath, Ext<T>>,
}

impl<T: Scalar> PriceProcess<T> {
    pub fn at(&self, node: &NodePath) -> &Ext<T> {
        self.values.get(node).expect("node priced")
    }

    /// Values restricted to one depth.
    pub fn at_depth(&self, depth: usize) -> BTreeMap<NodePath, Ext<T>> {
        self.values
            .iter()
            .filter(|(p, _)| p.depth() == depth)
            .map(|(p, v)| (p.clone(), v.clone()))
            .collect()
    }
}

/// Computes the claim's price at every node. Integral mode verifies
/// integrability depth by depth and names the first offending node when it
/// fails.
pub fn price_process<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    mode: ProcessMode,
    constraint: &ConstraintSet<T>,
) -> Result<PriceProcess<T>> {
    let leaf_values = f.resolve(tree)?;
    let values = match mode {
        ProcessMode::Upper => upper_values(tree, &leaf_values, constraint),
        ProcessMode::Lower => lower_values(tree, &leaf_values, constraint),
        ProcessMode::Integral => {
            for depth in 0..=tree.horizon() {
                let report = check_integrable_values(tree, &leaf_values, depth, constraint)?;
                if !report.integrable {
                    let node = report
                        .exceptional
                        .iter()
                        .next()
                        .cloned()
                        .unwrap_or_else(NodePath::root);
                    return Err(Error::NotIntegrable(node));
                }
            }
            upper_values(tree, &leaf_values, constraint)
        }
    };
    Ok(PriceProcess {
        mode,
        values: values.into_map(),
    })
}

/// Spreads depth-`depth` node values onto the leaves below them.
fn lift_to_leaves<T: Scalar>(
    tree: &TrajectoryTree<T>,
    values: &NodeValues<T>,
    depth: usize,
) -> LeafValues<T> {
    LeafValues::from_fn(tree, |leaf| values.at(&leaf.prefix(depth)).clone())
}

fn lift_map_to_leaves<T: Scalar>(
    tree: &TrajectoryTree<T>,
    values: &BTreeMap<NodePath, Ext<T>>,
    depth: usize,
) -> LeafValues<T> {
    LeafValues::from_fn(tree, |leaf| {
        values
            .get(&leaf.prefix(depth))
            .expect("depth value")
            .clone()
    })
}

/// The six prices compared at one depth-`j` node.
#[derive(Debug, Clone)]
pub struct TowerRow<T> {
    pub node: NodePath,
    pub lower: Ext<T>,
    pub lower_of_lower: Ext<T>,
    pub lower_of_upper: Ext<T>,
    pub upper_of_lower: Ext<T>,
    pub upper_of_upper: Ext<T>,
    pub upper: Ext<T>,
    /// Both interleavings of the iterated-conditioning chain hold here.
    pub chain_ok: bool,
}

/// Iterated-conditioning report between depths `j ≤ k`.
#[derive(Debug, Clone)]
pub struct TowerReport<T> {
    pub j: usize,
    pub k: usize,
    pub rows: Vec<TowerRow<T>>,
    pub chain_ok: bool,
    /// For claims integrable at both depths: `∫_j ∫_k f = ∫_j f` at every
    /// depth-j node, and conditioning the depth-j integral at depth `k`
    /// leaves it fixed.
    pub integral_ok: Option<bool>,
}

/// Verifies the ordering chain linking prices at depth `j` to prices of the
/// depth-`k` prices, and the integral tower equality for integrable claims:
///
/// ```text
/// lower_j f ≤ lower_j [lower_k f] ≤ lower_j [upper_k f] ≤ upper_j [upper_k f] ≤ upper_j f
/// lower_j f ≤ lower_j [lower_k f] ≤ upper_j [lower_k f] ≤ upper_j [upper_k f] ≤ upper_j f
/// ```
pub fn verify_tower<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    j: usize,
    k: usize,
    constraint: &ConstraintSet<T>,
) -> Result<TowerReport<T>> {
    assert!(j <= k && k <= tree.horizon(), "need j <= k <= horizon");
    let leaf_values = f.resolve(tree)?;
    let upper_k = upper_values(tree, &leaf_values, constraint);
    let lower_k = lower_values(tree, &leaf_values, constraint);
    let upper_lift = lift_to_leaves(tree, &upper_k, k);
    let lower_lift = lift_to_leaves(tree, &lower_k, k);

    let u_of_u = upper_values(tree, &upper_lift, constraint);
    let l_of_u = lower_values(tree, &upper_lift, constraint);
    let u_of_l = upper_values(tree, &lower_lift, constraint);
    let l_of_l = lower_values(tree, &lower_lift, constraint);

    let mut rows = Vec::new();
    let mut chain_ok = true;
    for node in tree.nodes_at_depth(j) {
        let row = TowerRow {
            lower: lower_k.at(&node).clone(),
            lower_of_lower: l_of_l.at(&node).clone(),
            lower_of_upper: l_of_u.at(&node).clone(),
            upper_of_lower: u_of_l.at(&node).clone(),
            upper_of_upper: u_of_u.at(&node).clone(),
            upper: upper_k.at(&node).clone(),
            chain_ok: true,
            node,
        };
        let first = [
            (&row.lower, &row.lower_of_lower),
            (&row.lower_of_lower, &row.lower_of_upper),
            (&row.lower_of_upper, &row.upper_of_upper),
            (&row.upper_of_upper, &row.upper),
        ];
        let second = [
            (&row.lower_of_lower, &row.upper_of_lower),
            (&row.upper_of_lower, &row.upper_of_upper),
        ];
        let ok = first
            .iter()
            .chain(second.iter())
            .all(|(a, b)| a.le_approx(b));
        chain_ok &= ok;
        rows.push(TowerRow { chain_ok: ok, ..row });
    }

    // integral tower equality for integrable claims
    let at_k = check_integrable_values(tree, &leaf_values, k, constraint)?;
    let at_j = check_integrable_values(tree, &leaf_values, j, constraint)?;
    let integral_ok = if at_k.integrable && at_j.integrable {
        let mut ok = true;
        for node in tree.nodes_at_depth(j) {
            // ∫_j [∫_k f] = ∫_j f
            if !u_of_u.at(&node).approx_eq(upper_k.at(&node)) {
                ok = false;
            }
        }
        // a depth-j price is fixed by deeper conditioning
        let j_lift = lift_to_leaves(tree, &upper_k, j);
        let k_of_j = upper_values(tree, &j_lift, constraint);
        for node in tree.nodes_at_depth(k) {
            if !k_of_j.at(&node).approx_eq(upper_k.at(&node.prefix(j))) {
                ok = false;
            }
        }
        Some(ok)
    } else {
        None
    };

    Ok(TowerReport {
        j,
        k,
        rows,
        chain_ok,
        integral_ok,
    })
}

/// Martingale taxonomy of a price process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessClass {
    Martingale,
    Submartingale,
    Supermartingale,
    None,
}

/// Classifies a process against one-step conditional prices, ignoring
/// failures confined to null scenario sets:
///
/// * martingale — `lower_j f_{j+1} = upper_j f_{j+1} = f_j`,
/// * supermartingale — `upper_j f_{j+1} ≤ f_j`,
/// * submartingale — `f_j ≤ lower_j f_{j+1}`.
pub fn classify_process<T: Scalar>(
    tree: &TrajectoryTree<T>,
    process: &PriceProcess<T>,
    constraint: &ConstraintSet<T>,
) -> Result<ProcessClass> {
    let mut mart_failures: BTreeSet<NodePath> = BTreeSet::new();
    let mut super_failures: BTreeSet<NodePath> = BTreeSet::new();
    let mut sub_failures: BTreeSet<NodePath> = BTreeSet::new();
    for j in 0..tree.horizon() {
        let next = process.at_depth(j + 1);
        let lifted = lift_map_to_leaves(tree, &next, j + 1);
        let upper = upper_values(tree, &lifted, constraint);
        let lower = lower_values(tree, &lifted, constraint);
        for node in tree.nodes_at_depth(j) {
            let here = process.at(&node);
            let up = upper.at(&node);
            let lo = lower.at(&node);
            if !(up.approx_eq(here) && lo.approx_eq(here)) {
                mart_failures.insert(node.clone());
            }
            if !up.le_approx(here) {
                super_failures.insert(node.clone());
            }
            if !here.le_approx(lo) {
                sub_failures.insert(node.clone());
            }
        }
    }
    if leaf_set_is_null(tree, &mart_failures, constraint)? {
        return Ok(ProcessClass::Martingale);
    }
    if leaf_set_is_null(tree, &super_failures, constraint)? {
        return Ok(ProcessClass::Supermartingale);
    }
    if leaf_set_is_null(tree, &sub_failures, constraint)? {
        return Ok(ProcessClass::Submartingale);
    }
    Ok(ProcessClass::None)
}
