//! Brute-force evaluators used to validate the pricing recursion.
//!
//! Three independent routes to the same quantities, all float-only and all
//! deliberately free of the engine's breakpoint and limit-rule logic:
//!
//! * [`grid_superhedge`] minimizes over gridded per-node holdings — an
//!   upper bound converging to the recursion value as the step shrinks;
//! * [`martingale_measure_value`] solves the dual problem at one node by
//!   enumerating two-point supports of a martingale measure;
//! * [`enumerate_superpositions`] searches finite sums of nonnegative
//!   dominating portfolios over a coefficient grid, the definitional form
//!   of the hedging norm truncated to finitely many terms.
//!
//! Oracles bound, the recursion decides.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::payoff::LeafValues;
use crate::tree::{NodePath, TrajectoryTree, TreeNode};

const GRID_BUDGET: u64 = 10_000_000;
const ENUM_BUDGET: u64 = 20_000_000;

/// Grid search over per-node holdings, recursing from the leaves upward.
/// At each interior node the holding minimizing the worst child shortfall
/// is picked from the grid `{-h_range, …, -step, 0, step, …, h_range}`.
///
/// Instances are restricted to depth ≤ 4 and branching ≤ 4 below `node`,
/// and the total evaluation count must stay under 10^7.
pub fn grid_superhedge(
    tree: &TrajectoryTree<f64>,
    f: &LeafValues<f64>,
    node: &NodePath,
    h_range: f64,
    step: f64,
) -> Result<f64> {
    let root = tree.node(node)?;
    check_instance(root, node, 4, 4)?;
    // also rejects NaN inputs
    if step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || h_range.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
    {
        return Err(Error::OracleInstance("need positive h_range and step".into()));
    }
    let per_node = 2 * (h_range / step).ceil() as u64 + 1;
    let interior = count_interior(root);
    let total = per_node.saturating_mul(interior);
    if total > GRID_BUDGET {
        return Err(Error::GridTooLarge(total, GRID_BUDGET));
    }

    let mut leaf_cursor = tree.leaf_range(node)?.start;
    Ok(grid_value(root, f, &mut leaf_cursor, h_range, step))
}

fn grid_value(
    node: &TreeNode<f64>,
    f: &LeafValues<f64>,
    leaf_cursor: &mut usize,
    h_range: f64,
    step: f64,
) -> f64 {
    if node.is_leaf() {
        let v = f.get(*leaf_cursor).to_f64();
        *leaf_cursor += 1;
        return v;
    }
    let mut deltas = Vec::with_capacity(node.children().len());
    let mut values = Vec::with_capacity(node.children().len());
    for child in node.children() {
        deltas.push(child.value() - node.value());
        values.push(grid_value(child, f, leaf_cursor, h_range, step));
    }
    let steps = (h_range / step).ceil() as i64;
    // min over f64 is order-insensitive, so the parallel reduction is
    // bit-stable
    (-steps..=steps)
        .into_par_iter()
        .map(|i| {
            let h = i as f64 * step;
            let mut worst = f64::NEG_INFINITY;
            for (d, v) in deltas.iter().zip(&values) {
                let y = v - h * d;
                if y > worst {
                    worst = y;
                }
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn count_interior(node: &TreeNode<f64>) -> u64 {
    if node.is_leaf() {
        0
    } else {
        1 + node.children().iter().map(count_interior).sum::<u64>()
    }
}

fn check_instance(
    node: &TreeNode<f64>,
    at: &NodePath,
    max_depth: usize,
    max_branching: usize,
) -> Result<()> {
    fn depth_of(node: &TreeNode<f64>) -> usize {
        node.children()
            .iter()
            .map(|c| 1 + depth_of(c))
            .max()
            .unwrap_or(0)
    }
    fn branching_of(node: &TreeNode<f64>) -> usize {
        node.children()
            .iter()
            .map(branching_of)
            .max()
            .unwrap_or(0)
            .max(node.children().len())
    }
    if depth_of(node) > max_depth || branching_of(node) > max_branching {
        return Err(Error::OracleInstance(format!(
            "subtree below {at} exceeds depth {max_depth} / branching {max_branching}"
        )));
    }
    Ok(())
}

/// Best martingale-measure value at a single node: maximizes `Σ p_k v_k`
/// over probability vectors with `Σ p_k Δ_k = 0`. The optimum of this
/// two-constraint program sits on a support of at most two points, so it is
/// found by enumerating flat children and up/down pairs. Fails when no
/// measure exists (a type II pattern).
pub fn martingale_measure_value(children: &[(f64, f64)]) -> Result<f64> {
    let mut best: Option<f64> = None;
    let mut consider = |v: f64| {
        best = Some(match best {
            None => v,
            Some(b) => b.max(v),
        });
    };
    for &(d, v) in children {
        if d == 0.0 {
            consider(v);
        }
    }
    for &(da, va) in children {
        if da <= 0.0 {
            continue;
        }
        for &(db, vb) in children {
            if db >= 0.0 {
                continue;
            }
            // weights solving p*da + (1-p)*db = 0
            let p = -db / (da - db);
            consider(p * va + (1.0 - p) * vb);
        }
    }
    best.ok_or(Error::NoFeasibleMeasure)
}

/// Least total premium of `m` nonnegative one-or-multi-step portfolios from
/// a coefficient grid whose sum dominates `f` below `node`. Tiny instances
/// only (depth ≤ 2, branching ≤ 3, m ≤ 3).
pub fn enumerate_superpositions(
    tree: &TrajectoryTree<f64>,
    f: &LeafValues<f64>,
    node: &NodePath,
    m: usize,
    coefficient_grid: &[f64],
) -> Result<f64> {
    let root = tree.node(node)?;
    check_instance(root, node, 2, 3)?;
    if m > 3 {
        return Err(Error::OracleInstance("m must be at most 3".into()));
    }

    // unknowns per portfolio: V plus one holding per interior node below
    let interiors: Vec<NodePath> = tree
        .interior_nodes()
        .into_iter()
        .filter(|u| node.is_prefix_of(u))
        .collect();
    let params = 1 + interiors.len();
    let g = coefficient_grid.len() as u64;
    let tuples = g.pow(params as u32).pow(m as u32);
    if tuples > ENUM_BUDGET {
        return Err(Error::EnumerationBudget(tuples, ENUM_BUDGET));
    }

    let leaves = tree.conditional_leaves(node)?;
    let range = tree.leaf_range(node)?;
    let targets: Vec<f64> = range.clone().map(|i| f.get(i).to_f64()).collect();

    // payoff matrix of one unit of holding at interior u on each leaf
    let mut gain_rows: Vec<Vec<f64>> = Vec::with_capacity(interiors.len());
    for u in &interiors {
        let mut row = Vec::with_capacity(leaves.len());
        for leaf in &leaves {
            if u.is_prefix_of(leaf) {
                let prices = tree.path_prices(leaf).expect("leaf");
                let d = u.depth();
                row.push(prices[d + 1] - prices[d]);
            } else {
                row.push(0.0);
            }
        }
        gain_rows.push(row);
    }

    // enumerate one portfolio's payoff vector and premium per grid choice,
    // keeping only nonnegative portfolios (the definitional requirement)
    let mut singles: Vec<(f64, Vec<f64>)> = Vec::new();
    let combos = (coefficient_grid.len() as u64).pow(params as u32);
    for idx in 0..combos {
        let mut rest = idx;
        let mut coeffs = Vec::with_capacity(params);
        for _ in 0..params {
            coeffs.push(coefficient_grid[(rest % g) as usize]);
            rest /= g;
        }
        let premium = coeffs[0];
        let mut payoff = vec![premium; leaves.len()];
        for (u_idx, row) in gain_rows.iter().enumerate() {
            let h = coeffs[u_idx + 1];
            if h != 0.0 {
                for (p, gain) in payoff.iter_mut().zip(row) {
                    *p += h * gain;
                }
            }
        }
        if payoff.iter().all(|&x| x >= -1e-12) {
            singles.push((premium, payoff));
        }
    }

    let mut best = f64::INFINITY;
    let mut sum = vec![0.0; leaves.len()];
    search_tuples(&singles, m, &mut sum, 0.0, &targets, &mut best, 0);
    if best.is_finite() {
        Ok(best)
    } else {
        // no dominating combination on this grid
        Ok(f64::INFINITY)
    }
}

fn search_tuples(
    singles: &[(f64, Vec<f64>)],
    remaining: usize,
    sum: &mut Vec<f64>,
    premium: f64,
    targets: &[f64],
    best: &mut f64,
    start: usize,
) {
    if remaining == 0 {
        // `t = −∞` is always dominated since `t - 1e-9` stays −∞
        let dominates = sum.iter().zip(targets).all(|(s, t)| *s >= t - 1e-9);
        if dominates && premium < *best {
            *best = premium;
        }
        return;
    }
    // combinations with repetition; order inside a sum does not matter
    for i in start..singles.len() {
        let (p, payoff) = &singles[i];
        for (s, x) in sum.iter_mut().zip(payoff) {
            *s += x;
        }
        search_tuples(singles, remaining - 1, sum, premium + p, targets, best, i);
        for (s, x) in sum.iter_mut().zip(payoff) {
            *s -= x;
        }
    }
}
