//! Model generators, contrarian paths, and portfolio accumulation.
//!
//! Two hand-constructed jump families exercise the boundary of the theory:
//!
//! * [`gen_example1`] — paths sitting at 1 that jump once to 2 and stay.
//!   Every pre-jump node is a type I arbitrage node, and the family of
//!   one-step unit holdings dominates the constant 1 on every jump path at
//!   total premium zero; [`verify_example1_l_failure`] checks that witness,
//!   which is why zero-cost superhedges of positive claims appear in the
//!   infinite-horizon limit of this model.
//! * [`gen_example2`] — paths at 2 that jump once to 3 or to 1. All nodes
//!   are up-down or flat, and the zero claim prices at zero everywhere, at
//!   every horizon.
//!
//! Truncation keeps the not-yet-jumped flat path as a genuine leaf, the
//! finite stand-in for the limit trajectory of the infinite model.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify_node, NodeKind};
use crate::elementary::ElementaryFunction;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Sign};
use crate::tree::{NodePath, TrajectoryTree, TreeNode};

/// Jump-to-2 family truncated at horizon `n`: paths flat at 1 that jump to
/// 2 at some time `t ≤ n` and stay, plus the all-ones path. The jump child
/// comes first, so the jump-at-1 leaf is path `0,0,…,0`.
pub fn gen_example1<T: Scalar>(n: usize) -> TrajectoryTree<T> {
    fn flat_ones<T: Scalar>(depth: usize, n: usize) -> TreeNode<T> {
        if depth == n {
            return TreeNode::leaf(T::one());
        }
        TreeNode::branch(
            T::one(),
            vec![chain(T::from_int(2), depth + 1, n), flat_ones(depth + 1, n)],
        )
    }
    TrajectoryTree::from_root(flat_ones(0, n)).expect("uniform by construction")
}

/// Jump family truncated at horizon `n`: paths flat at 2 that jump once to
/// 3 (up) or 1 (down) and stay, plus the all-twos path. Children are
/// ordered up, down, stay.
pub fn gen_example2<T: Scalar>(n: usize) -> TrajectoryTree<T> {
    fn flat_twos<T: Scalar>(depth: usize, n: usize) -> TreeNode<T> {
        if depth == n {
            return TreeNode::leaf(T::from_int(2));
        }
        TreeNode::branch(
            T::from_int(2),
            vec![
                chain(T::from_int(3), depth + 1, n),
                chain(T::one(), depth + 1, n),
                flat_twos(depth + 1, n),
            ],
        )
    }
    TrajectoryTree::from_root(flat_twos(0, n)).expect("uniform by construction")
}

fn chain<T: Scalar>(value: T, depth: usize, n: usize) -> TreeNode<T> {
    if depth == n {
        TreeNode::leaf(value)
    } else {
        TreeNode::branch(value.clone(), vec![chain(value, depth + 1, n)])
    }
}

/// Multiplicative lattice flavors.
#[derive(Debug, Clone)]
pub enum LatticeKind<T> {
    Binomial { u: T, d: T },
    Trinomial { u: T, m: T, d: T },
}

/// Multiplicative move tree: values recombine, paths do not. Children are
/// ordered from the largest factor down.
pub fn gen_lattice<T: Scalar>(
    kind: &LatticeKind<T>,
    n: usize,
    s0: T,
) -> Result<TrajectoryTree<T>> {
    let factors: Vec<T> = match kind {
        LatticeKind::Binomial { u, d } => vec![u.clone(), d.clone()],
        LatticeKind::Trinomial { u, m, d } => vec![u.clone(), m.clone(), d.clone()],
    };
    for w in factors.windows(2) {
        if w[1].sign() != Sign::Positive || !(w[1].total_cmp(&w[0]).is_lt()) {
            return Err(Error::BadLatticeFactors(
                factors
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(" > "),
            ));
        }
    }
    fn build<T: Scalar>(value: T, depth: usize, n: usize, factors: &[T]) -> TreeNode<T> {
        if depth == n {
            return TreeNode::leaf(value);
        }
        let children = factors
            .iter()
            .map(|f| build(value.clone() * f.clone(), depth + 1, n, factors))
            .collect();
        TreeNode::branch(value, children)
    }
    TrajectoryTree::from_root(build(s0, 0, n, &factors))
}

/// Trace of a greedy contrarian extension: a path along which the given
/// holdings accumulate less than `ε` in total.
#[derive(Debug, Clone)]
pub struct ContrarianTrace<T> {
    /// The selected leaf path.
    pub leaf: NodePath,
    /// One-step gains `F_i · Δ_i` along the path.
    pub step_gains: Vec<T>,
    /// The per-step budgets `ε / 2^{i+1}`; every gain is strictly below its
    /// budget, so every prefix sum stays below `ε`.
    pub step_bounds: Vec<T>,
}

impl<T: Scalar> ContrarianTrace<T> {
    /// Largest prefix sum of the step gains.
    pub fn max_prefix_gain(&self) -> T {
        let mut acc = T::zero();
        let mut best = T::zero();
        for g in &self.step_gains {
            acc = acc + g.clone();
            best = best.max_val(acc.clone());
        }
        best
    }
}

/// Extends a path from `node` to a leaf, choosing at each step a child on
/// which the holdings `f` gain less than `ε / 2^{i+1}`; at type I arbitrage
/// nodes the zero-increment child is preferred, which also keeps the path
/// out of the arbitrage-generated null sets. Fails — naming the node — when
/// no child meets the budget, which witnesses a zero-neutrality failure.
pub fn contrarian_trajectory<T: Scalar>(
    tree: &TrajectoryTree<T>,
    node: &NodePath,
    f: &BTreeMap<NodePath, T>,
    epsilon: T,
) -> Result<ContrarianTrace<T>> {
    tree.node(node)?;
    if epsilon.sign() != Sign::Positive {
        return Err(Error::ContrarianBlocked {
            node: node.clone(),
            gain: "0".into(),
            bound: epsilon.to_string(),
        });
    }
    let two = T::from_int(2);
    let mut bound = epsilon;
    for _ in 0..=node.depth() {
        bound = bound / two.clone();
    }
    let mut path = node.clone();
    let mut step_gains = Vec::new();
    let mut step_bounds = Vec::new();
    while path.depth() < tree.horizon() {
        let holding = f.get(&path).cloned().unwrap_or_else(T::zero);
        let n = tree.node(&path)?;
        let class = classify_node(tree, &path)?;
        let mut choice: Option<(usize, T)> = None;
        for (i, child) in n.children().iter().enumerate() {
            let delta = child.value().clone() - n.value().clone();
            if class.kind == NodeKind::ArbitrageI {
                if delta.sign() == Sign::Zero {
                    choice = Some((i, holding.clone() * delta));
                    break;
                }
                continue;
            }
            let gain = holding.clone() * delta;
            choice = match choice {
                None => Some((i, gain)),
                Some((bi, bg)) => {
                    if gain.total_cmp(&bg).is_lt() {
                        Some((i, gain))
                    } else {
                        Some((bi, bg))
                    }
                }
            };
        }
        let (idx, gain) = choice.expect("interior node has children");
        if !gain.total_cmp(&bound).is_lt() {
            return Err(Error::ContrarianBlocked {
                node: path,
                gain: gain.to_string(),
                bound: bound.to_string(),
            });
        }
        step_gains.push(gain);
        step_bounds.push(bound.clone());
        path = path.child(idx);
        bound = bound / two.clone();
    }
    Ok(ContrarianTrace {
        leaf: path,
        step_gains,
        step_bounds,
    })
}

/// Pointwise sum of finitely many portfolios sharing a conditioning node:
/// capital and per-node holdings add, the maturity is the latest one. The
/// divergence caveats of infinite accumulation never trigger on a finite
/// list.
pub fn accumulate_portfolios<T: Scalar>(
    elements: &[ElementaryFunction<T>],
) -> Result<ElementaryFunction<T>> {
    let first = elements.first().ok_or(Error::EmptyFamily)?;
    let node = first.conditioning_node().clone();
    let mut value = T::zero();
    let mut holdings: BTreeMap<NodePath, T> = BTreeMap::new();
    let mut maturity = node.depth();
    for e in elements {
        if e.conditioning_node() != &node {
            return Err(Error::MismatchedConditioning(
                node,
                e.conditioning_node().clone(),
            ));
        }
        value = value + e.initial_value().clone();
        maturity = maturity.max(e.maturity());
        for (path, h) in e.holdings() {
            let entry = holdings
                .entry(path.clone())
                .or_insert_with(T::zero);
            *entry = entry.clone() + h.clone();
        }
    }
    holdings.retain(|_, h| h.sign() != Sign::Zero);
    ElementaryFunction::new(node, value, holdings, maturity)
}

/// Outcome of the zero-premium domination witness on the jump-to-2 family.
#[derive(Debug, Clone)]
pub struct Example1Report<T> {
    pub portfolios: usize,
    pub horizon: usize,
    /// Number of leaves jumping by the portfolio count.
    pub jump_leaves: usize,
    /// The family sum equals 1 on every such leaf.
    pub domination_ok: bool,
    /// Sum of the family's initial capitals (zero).
    pub total_premium: T,
    /// The family sum on the never-jumping flat path (zero).
    pub flat_sum: T,
    /// `flat_sum < 1`: the family's limit along jump paths strictly exceeds
    /// its value on the flat limit path, the interchange failure that
    /// breaks continuity from below at the root in the infinite model.
    pub rfp_failure_confirmed: bool,
}

/// Builds the `m`-member unit-holding family on the horizon-`n` jump-to-2
/// tree (`m ≤ n`) and checks: the sum dominates the constant 1 on every
/// leaf jumping by time `m`, at total premium zero, while summing to zero
/// on the flat path.
pub fn verify_example1_l_failure<T: Scalar>(m: usize, n: usize) -> Result<Example1Report<T>> {
    assert!(m >= 1 && m <= n, "need 1 <= m <= n");
    let tree = gen_example1::<T>(n);
    let mut family = Vec::with_capacity(m);
    for k in 0..m {
        // hold one unit at the depth-k all-ones node
        let flat_node = NodePath::from_indices(vec![1; k]);
        let holdings: BTreeMap<NodePath, T> =
            [(flat_node, T::one())].into_iter().collect();
        family.push(ElementaryFunction::new(
            NodePath::root(),
            T::zero(),
            holdings,
            k + 1,
        )?);
    }

    let mut domination_ok = true;
    let mut jump_leaves = 0usize;
    for leaf in tree.leaves() {
        let jump_time = leaf.indices().iter().position(|&i| i == 0).map(|p| p + 1);
        let mut total = T::zero();
        for e in &family {
            total = total + e.evaluate(&tree, leaf)?;
        }
        match jump_time {
            Some(t) if t <= m => {
                jump_leaves += 1;
                if !total.approx_eq(&T::one()) {
                    domination_ok = false;
                }
            }
            _ => {
                if !total.is_zero() {
                    domination_ok = false;
                }
            }
        }
    }

    let mut total_premium = T::zero();
    for e in &family {
        total_premium = total_premium + e.initial_value().clone();
    }
    let flat = NodePath::from_indices(vec![1; n]);
    let mut flat_sum = T::zero();
    for e in &family {
        flat_sum = flat_sum + e.evaluate(&tree, &flat)?;
    }
    let rfp_failure_confirmed = flat_sum.total_cmp(&T::one()).is_lt();
    Ok(Example1Report {
        portfolios: m,
        horizon: n,
        jump_leaves,
        domination_ok,
        total_premium,
        flat_sum,
        rfp_failure_confirmed,
    })
}

/// Node-pattern mix of the seeded random models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomTreeProfile {
    /// Up-down and flat nodes only.
    ArbitrageFree,
    /// Adds one-sided nodes with a zero-increment continuation (type I),
    /// never type II.
    TypeIIFree,
}

/// Seeded random price tree for the property and acceptance suites.
///
/// Prices start in `[1, 3.5]`; up moves scale by `[1.15, 1.3]`, down moves
/// by `[0.72, 0.85]`, so every price stays within `[0.1, 10]` through depth
/// 4 and increments stay bounded away from the float zero band.
pub fn gen_random_tree(
    seed: u64,
    depth: usize,
    max_branching: usize,
    profile: RandomTreeProfile,
) -> TrajectoryTree<f64> {
    assert!(max_branching >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = rng.gen_range(1.0..3.5);
    fn build(
        rng: &mut ChaCha8Rng,
        value: f64,
        depth: usize,
        max_branching: usize,
        profile: RandomTreeProfile,
    ) -> TreeNode<f64> {
        if depth == 0 {
            return TreeNode::leaf(value);
        }
        let roll: f64 = rng.gen();
        let child_values: Vec<f64> = match profile {
            RandomTreeProfile::ArbitrageFree => {
                if roll < 0.1 {
                    vec![value] // flat
                } else {
                    let up = value * rng.gen_range(1.15..1.3);
                    let down = value * rng.gen_range(0.72..0.85);
                    let mut vals = vec![up, down];
                    if max_branching >= 3 && rng.gen_bool(0.5) {
                        let mid = if rng.gen_bool(0.3) {
                            value
                        } else {
                            value * rng.gen_range(0.88..1.12)
                        };
                        vals.push(mid);
                    }
                    vals
                }
            }
            RandomTreeProfile::TypeIIFree => {
                if roll < 0.15 {
                    vec![value]
                } else if roll < 0.45 {
                    // type I: one-sided with a flat continuation
                    let moved = if rng.gen_bool(0.5) {
                        value * rng.gen_range(1.15..1.3)
                    } else {
                        value * rng.gen_range(0.72..0.85)
                    };
                    vec![moved, value]
                } else {
                    let up = value * rng.gen_range(1.15..1.3);
                    let down = value * rng.gen_range(0.72..0.85);
                    let mut vals = vec![up, down];
                    if max_branching >= 3 && rng.gen_bool(0.4) {
                        vals.push(value * rng.gen_range(0.88..1.12));
                    }
                    vals
                }
            }
        };
        let children = child_values
            .into_iter()
            .map(|v| build(rng, v, depth - 1, max_branching, profile))
            .collect();
        TreeNode::branch(value, children)
    }
    let root_node = build(&mut rng, root, depth, max_branching, profile);
    TrajectoryTree::from_root(root_node).expect("uniform by construction")
}

/// Random leaf-table payoff with independent uniform values.
pub fn random_leaf_table(
    rng: &mut ChaCha8Rng,
    tree: &TrajectoryTree<f64>,
    lo: f64,
    hi: f64,
) -> crate::payoff::Payoff<f64> {
    let table = tree
        .leaves()
        .iter()
        .map(|l| (l.clone(), crate::ext::Ext::Finite(rng.gen_range(lo..hi))))
        .collect();
    crate::payoff::Payoff::LeafTable(table)
}

/// Random portfolio conditioned at `node`, with dyadic holdings so exact
/// re-pricing over rationals loses nothing. Only the tree's shape matters,
/// so the portfolio scalar is independent of the tree scalar.
pub fn random_elementary<T: Scalar, U: Scalar>(
    rng: &mut ChaCha8Rng,
    tree: &TrajectoryTree<U>,
    node: &NodePath,
) -> ElementaryFunction<T> {
    let horizon = tree.horizon();
    let mut holdings = BTreeMap::new();
    let mut maturity = node.depth();
    for u in tree.interior_nodes() {
        if !node.is_prefix_of(&u) {
            continue;
        }
        if rng.gen_bool(0.75) {
            let num = rng.gen_range(-8i64..=8);
            let den = [1, 2, 4][rng.gen_range(0..3)];
            if num != 0 {
                holdings.insert(u.clone(), T::from_ratio(num, den));
                maturity = maturity.max(u.depth() + 1);
            }
        }
    }
    let v = T::from_ratio(rng.gen_range(-8i64..=8), 2);
    let maturity = maturity.min(horizon);
    ElementaryFunction::new(node.clone(), v, holdings, maturity)
        .expect("holdings windowed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::scan_tree;

    #[test]
    fn example1_leaves_match_hand_enumeration() {
        let t1 = gen_example1::<f64>(1);
        let prices: Vec<Vec<f64>> = t1
            .leaves()
            .iter()
            .map(|l| t1.path_prices(l).unwrap())
            .collect();
        assert_eq!(prices, vec![vec![1.0, 2.0], vec![1.0, 1.0]]);

        let t2 = gen_example1::<f64>(2);
        let prices: Vec<Vec<f64>> = t2
            .leaves()
            .iter()
            .map(|l| t2.path_prices(l).unwrap())
            .collect();
        assert_eq!(
            prices,
            vec![
                vec![1.0, 2.0, 2.0],
                vec![1.0, 1.0, 2.0],
                vec![1.0, 1.0, 1.0]
            ]
        );

        let t0 = gen_example1::<f64>(0);
        assert_eq!(t0.horizon(), 0);
        assert_eq!(t0.s0(), &1.0);
    }

    #[test]
    fn example1_has_only_type_i_and_flat_nodes() {
        for n in 1..=6 {
            let t = gen_example1::<f64>(n);
            let scan = scan_tree(&t);
            assert!(!scan.has_type_ii);
            assert!(scan.locally_zero_neutral);
            for class in scan.classes.values() {
                assert!(matches!(
                    class.kind,
                    NodeKind::ArbitrageI | NodeKind::Flat
                ));
            }
        }
    }

    #[test]
    fn example2_leaves_and_classification() {
        let t1 = gen_example2::<f64>(1);
        let prices: Vec<Vec<f64>> = t1
            .leaves()
            .iter()
            .map(|l| t1.path_prices(l).unwrap())
            .collect();
        assert_eq!(
            prices,
            vec![vec![2.0, 3.0], vec![2.0, 1.0], vec![2.0, 2.0]]
        );

        let t2 = gen_example2::<f64>(2);
        assert_eq!(t2.leaves().len(), 5);

        for n in 1..=6 {
            let t = gen_example2::<f64>(n);
            let scan = scan_tree(&t);
            assert!(scan.locally_arbitrage_free);
            // pre-jump nodes see increments {+1, -1, 0}: up-down
            let root_class = &scan.classes[&NodePath::root()];
            assert_eq!(root_class.kind, NodeKind::UpDown);
        }
    }

    #[test]
    fn lattice_generators() {
        let b = gen_lattice(&LatticeKind::Binomial { u: 2.0, d: 0.5 }, 1, 1.0).unwrap();
        let leaf_vals: Vec<f64> = b
            .leaves()
            .iter()
            .map(|l| *b.value_at(l).unwrap())
            .collect();
        assert_eq!(leaf_vals, vec![2.0, 0.5]);

        let t = gen_lattice(
            &LatticeKind::Trinomial {
                u: 2.0,
                m: 1.0,
                d: 0.5,
            },
            1,
            1.0,
        )
        .unwrap();
        assert_eq!(t.leaves().len(), 3);

        let b2 = gen_lattice(&LatticeKind::Binomial { u: 2.0, d: 0.5 }, 2, 1.0).unwrap();
        assert_eq!(b2.leaves().len(), 4);

        assert!(gen_lattice(&LatticeKind::Binomial { u: 0.5, d: 2.0 }, 1, 1.0).is_err());
    }

    #[test]
    fn contrarian_on_example2_with_unit_holdings() {
        let t = gen_example2::<f64>(4);
        let f: BTreeMap<NodePath, f64> = t
            .interior_nodes()
            .into_iter()
            .map(|p| (p, 1.0))
            .collect();
        let trace = contrarian_trajectory(&t, &NodePath::root(), &f, 0.5).unwrap();
        for (g, b) in trace.step_gains.iter().zip(&trace.step_bounds) {
            assert!(g < b);
            assert!(*g <= 0.0);
        }
        assert!(trace.max_prefix_gain() < 0.5);
    }

    #[test]
    fn contrarian_zero_holdings_takes_leftmost() {
        let t = gen_example2::<f64>(3);
        let trace =
            contrarian_trajectory(&t, &NodePath::root(), &BTreeMap::new(), 1.0).unwrap();
        // root is up-down with zero holdings: every child gains 0, keep the first
        assert_eq!(trace.leaf.indices()[0], 0);
    }

    #[test]
    fn contrarian_blocked_by_type_ii() {
        let t = gen_lattice(&LatticeKind::Binomial { u: 3.0, d: 2.0 }, 2, 1.0).unwrap();
        let f: BTreeMap<NodePath, f64> = t
            .interior_nodes()
            .into_iter()
            .map(|p| (p, 1.0))
            .collect();
        let err = contrarian_trajectory(&t, &NodePath::root(), &f, 0.25).unwrap_err();
        assert!(matches!(err, Error::ContrarianBlocked { .. }));
    }

    #[test]
    fn accumulate_adds_capital_and_holdings() {
        let mk = |v: f64, h: f64| {
            ElementaryFunction::new(
                NodePath::root(),
                v,
                [(NodePath::root(), h)].into_iter().collect(),
                1,
            )
            .unwrap()
        };
        let sum = accumulate_portfolios(&[mk(1.0, 1.0), mk(1.0, 1.0)]).unwrap();
        assert_eq!(sum.initial_value(), &2.0);
        assert_eq!(sum.holding_at(&NodePath::root()), 2.0);

        let other = ElementaryFunction::constant(NodePath::from_indices(vec![0]), 1.0);
        assert!(accumulate_portfolios(&[mk(1.0, 1.0), other]).is_err());
    }

    #[test]
    fn accumulate_example1_family_folds_to_unit_holdings() {
        let m = 3;
        let mut family = Vec::new();
        for k in 0..m {
            let holdings: BTreeMap<NodePath, f64> =
                [(NodePath::from_indices(vec![1; k]), 1.0)].into_iter().collect();
            family.push(
                ElementaryFunction::new(NodePath::root(), 0.0, holdings, k + 1).unwrap(),
            );
        }
        let folded = accumulate_portfolios(&family).unwrap();
        assert_eq!(folded.initial_value(), &0.0);
        for k in 0..m {
            assert_eq!(folded.holding_at(&NodePath::from_indices(vec![1; k])), 1.0);
        }
    }

    #[test]
    fn example1_witness_report() {
        let r = verify_example1_l_failure::<f64>(3, 5).unwrap();
        assert_eq!(r.jump_leaves, 3);
        assert!(r.domination_ok);
        assert_eq!(r.total_premium, 0.0);
        assert_eq!(r.flat_sum, 0.0);
        assert!(r.rfp_failure_confirmed);

        let r1 = verify_example1_l_failure::<f64>(1, 1).unwrap();
        assert_eq!(r1.jump_leaves, 1);
        assert!(r1.domination_ok);
    }

    #[test]
    fn random_trees_respect_profile_and_bounds() {
        for seed in 0..30u64 {
            let t = gen_random_tree(seed, 3, 3, RandomTreeProfile::ArbitrageFree);
            let scan = scan_tree(&t);
            assert!(scan.locally_arbitrage_free, "seed {seed}");
            for leaf in t.leaves() {
                for p in t.path_prices(leaf).unwrap() {
                    assert!((0.1..=10.0).contains(&p), "price {p} out of range");
                }
            }
            let t = gen_random_tree(seed, 4, 3, RandomTreeProfile::TypeIIFree);
            let scan = scan_tree(&t);
            assert!(!scan.has_type_ii, "seed {seed}");
            assert!(scan.locally_zero_neutral, "seed {seed}");
        }
    }
}
