//! Simple portfolios and their hedging prices.
//!
//! An [`ElementaryFunction`] is the payoff of a self-financing strategy:
//! initial capital `V` at a conditioning node plus the gains of per-node
//! holdings up to a maturity. Holdings are keyed by node path, so a holding
//! can only depend on prices seen so far — non-anticipativity holds by
//! construction. The *elementary integral* of such a payoff is its initial
//! capital: the price of setting the strategy up.
//!
//! The module also provides the well-posedness check backing that price
//! (a nonnegative portfolio payoff forces nonnegative capital at every
//! intermediate time on zero-neutral trees) and [`represent_abs`], which
//! decides by exact linear algebra whether `|Π|` is again a portfolio
//! payoff — on most trees it is not, which is why the crate's integration
//! theory cannot take absolute values for granted.

use std::collections::BTreeMap;

use crate::classify::{classify_node, NodeKind};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::payoff::LeafValues;
use crate::scalar::{Scalar, Sign};
use crate::tree::{NodePath, TrajectoryTree};

/// Payoff of a simple self-financing strategy `V + Σ H_i Δ_i S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFunction<T> {
    node: NodePath,
    initial_value: T,
    holdings: BTreeMap<NodePath, T>,
    maturity: usize,
}

impl<T: Scalar> ElementaryFunction<T> {
    /// A strategy conditioned at `node`, holding `holdings[u]` units of the
    /// asset while at node `u`, trading from the node's depth up to
    /// `maturity`. Holdings at unlisted nodes are zero.
    pub fn new(
        node: NodePath,
        initial_value: T,
        holdings: BTreeMap<NodePath, T>,
        maturity: usize,
    ) -> Result<Self> {
        let start = node.depth();
        for key in holdings.keys() {
            if !node.is_prefix_of(key) || key.depth() >= maturity || key.depth() < start {
                return Err(Error::HoldingOutsideWindow {
                    holding: key.clone(),
                    start,
                    maturity,
                });
            }
        }
        Ok(ElementaryFunction {
            node,
            initial_value,
            holdings,
            maturity: maturity.max(start),
        })
    }

    /// Pure cash position: `V` at the node, no trading.
    pub fn constant(node: NodePath, value: T) -> Self {
        let maturity = node.depth();
        ElementaryFunction {
            node,
            initial_value: value,
            holdings: BTreeMap::new(),
            maturity,
        }
    }

    pub fn conditioning_node(&self) -> &NodePath {
        &self.node
    }

    /// Depth of the conditioning node.
    pub fn start(&self) -> usize {
        self.node.depth()
    }

    pub fn maturity(&self) -> usize {
        self.maturity
    }

    pub fn initial_value(&self) -> &T {
        &self.initial_value
    }

    pub fn holdings(&self) -> &BTreeMap<NodePath, T> {
        &self.holdings
    }

    pub fn holding_at(&self, node: &NodePath) -> T {
        self.holdings.get(node).cloned().unwrap_or_else(T::zero)
    }

    /// Zeroes every holding at depth `k` or later, keeping the capital.
    /// Always yields an admissible strategy again (holding zero is allowed
    /// everywhere), with the same initial value.
    pub fn truncate(&self, k: usize) -> Self {
        let holdings = self
            .holdings
            .iter()
            .filter(|(path, _)| path.depth() < k)
            .map(|(p, h)| (p.clone(), h.clone()))
            .collect();
        ElementaryFunction {
            node: self.node.clone(),
            initial_value: self.initial_value.clone(),
            holdings,
            maturity: self.maturity.min(k.max(self.start())),
        }
    }

    /// Gains-process value `Π_{j,k}` at a depth-`k` node extending the
    /// conditioning node: capital plus gains accrued strictly before `k`.
    pub fn partial_sum(&self, tree: &TrajectoryTree<T>, at: &NodePath) -> Result<T> {
        if !self.node.is_prefix_of(at) {
            return Err(Error::OutsideConditioning {
                leaf: at.clone(),
                node: self.node.clone(),
            });
        }
        let prices = tree.path_prices(at)?;
        let upto = self.maturity.min(at.depth());
        let mut acc = self.initial_value.clone();
        for i in self.start()..upto {
            let h = self.holding_at(&at.prefix(i));
            if h.sign() != Sign::Zero {
                let delta = prices[i + 1].clone() - prices[i].clone();
                acc = acc + h * delta;
            }
        }
        Ok(acc)
    }

    /// Full payoff on a leaf extending the conditioning node.
    pub fn evaluate(&self, tree: &TrajectoryTree<T>, leaf: &NodePath) -> Result<T> {
        tree.require_leaf(leaf)?;
        if self.maturity > tree.horizon() {
            return Err(Error::MaturityBeyondHorizon(self.maturity, tree.horizon()));
        }
        self.partial_sum(tree, leaf)
    }

    /// Payoff on every leaf of the tree, extended by zero outside the
    /// conditioning node (the standard embedding of conditional claims).
    pub fn leaf_values(&self, tree: &TrajectoryTree<T>) -> Result<LeafValues<T>> {
        if self.maturity > tree.horizon() {
            return Err(Error::MaturityBeyondHorizon(self.maturity, tree.horizon()));
        }
        tree.node(&self.node)?;
        let mut values = Vec::with_capacity(tree.leaves().len());
        for leaf in tree.leaves() {
            if self.node.is_prefix_of(leaf) {
                values.push(Ext::Finite(self.partial_sum(tree, leaf)?));
            } else {
                values.push(Ext::zero());
            }
        }
        Ok(LeafValues::new(values))
    }
}

/// Elementary integral of a portfolio payoff, with an order-consistency
/// flag.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralValue<T> {
    /// The initial capital `V` — the hedging price of the payoff.
    pub value: T,
    /// False when a type II arbitrage node sits below the conditioning
    /// node; the price need not respect pointwise order there.
    pub order_consistent: bool,
}

/// Price of an elementary payoff: its initial capital.
pub fn elementary_integral<T: Scalar>(
    tree: &TrajectoryTree<T>,
    p: &ElementaryFunction<T>,
) -> Result<IntegralValue<T>> {
    tree.node(p.conditioning_node())?;
    let mut order_consistent = true;
    for node in tree.interior_nodes() {
        if p.conditioning_node().is_prefix_of(&node)
            && classify_node(tree, &node)?.kind == NodeKind::ArbitrageII
        {
            order_consistent = false;
            break;
        }
    }
    Ok(IntegralValue {
        value: p.initial_value().clone(),
        order_consistent,
    })
}

/// One-step holding bounds `[lo, hi]`; zero must stay admissible.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldingInterval<T> {
    lo: Ext<T>,
    hi: Ext<T>,
}

impl<T: Scalar> HoldingInterval<T> {
    pub fn new(lo: Ext<T>, hi: Ext<T>) -> Result<Self> {
        let zero = Ext::<T>::zero();
        if !(lo.le_approx(&zero) && zero.le_approx(&hi)) {
            return Err(Error::IntervalWithoutZero {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(HoldingInterval { lo, hi })
    }

    pub fn unbounded() -> Self {
        HoldingInterval {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
        }
    }

    /// Long-only cone `[0, ∞)`.
    pub fn long_only() -> Self {
        HoldingInterval {
            lo: Ext::zero(),
            hi: Ext::PosInf,
        }
    }

    pub fn lo(&self) -> &Ext<T> {
        &self.lo
    }

    pub fn hi(&self) -> &Ext<T> {
        &self.hi
    }

    pub fn contains(&self, h: &T) -> bool {
        let h = Ext::Finite(h.clone());
        self.lo.le_approx(&h) && h.le_approx(&self.hi)
    }

    /// A cone keeps sums of admissible holdings admissible: each end is
    /// zero or infinite.
    pub fn is_cone(&self) -> bool {
        let lo_ok = matches!(self.lo, Ext::NegInf) || self.lo.is_zero();
        let hi_ok = matches!(self.hi, Ext::PosInf) || self.hi.is_zero();
        lo_ok && hi_ok
    }

    pub fn unbounded_above(&self) -> bool {
        matches!(self.hi, Ext::PosInf)
    }

    pub fn unbounded_below(&self) -> bool {
        matches!(self.lo, Ext::NegInf)
    }
}

/// Per-depth holding bounds for the hedging operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<T> {
    default: HoldingInterval<T>,
    per_depth: BTreeMap<usize, HoldingInterval<T>>,
}

impl<T: Scalar> ConstraintSet<T> {
    pub fn unrestricted() -> Self {
        ConstraintSet {
            default: HoldingInterval::unbounded(),
            per_depth: BTreeMap::new(),
        }
    }

    pub fn uniform(interval: HoldingInterval<T>) -> Self {
        ConstraintSet {
            default: interval,
            per_depth: BTreeMap::new(),
        }
    }

    pub fn with_depth(mut self, depth: usize, interval: HoldingInterval<T>) -> Self {
        self.per_depth.insert(depth, interval);
        self
    }

    pub fn interval_at(&self, depth: usize) -> &HoldingInterval<T> {
        self.per_depth.get(&depth).unwrap_or(&self.default)
    }

    pub fn is_cone(&self) -> bool {
        self.default.is_cone() && self.per_depth.values().all(HoldingInterval::is_cone)
    }

    /// Nodes whose holding falls outside the admissible interval.
    pub fn violations(&self, p: &ElementaryFunction<T>) -> Vec<NodePath> {
        p.holdings()
            .iter()
            .filter(|(path, h)| !self.interval_at(path.depth()).contains(h))
            .map(|(path, _)| path.clone())
            .collect()
    }
}

/// Outcome of the well-posedness check on one portfolio.
#[derive(Debug, Clone, PartialEq)]
pub enum WellPosedVerdict<T> {
    /// `Π ≥ 0` held and so did every partial sum, including `V ≥ 0`.
    Pass,
    /// `Π` takes negative values; the implication is vacuous.
    PassVacuous,
    /// `Π ≥ 0` on all conditional leaves yet some intermediate capital is
    /// negative — witnesses a non-zero-neutral node below.
    Violation { node: NodePath, partial_sum: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellPosedReport<T> {
    /// `Π ≥ 0` on every conditional leaf.
    pub nonnegative: bool,
    pub verdict: WellPosedVerdict<T>,
}

/// Checks the price-consistency property behind the elementary integral:
/// a nonnegative portfolio payoff must come from nonnegative capital at
/// every intermediate node.
pub fn check_wellposed<T: Scalar>(
    tree: &TrajectoryTree<T>,
    p: &ElementaryFunction<T>,
) -> Result<WellPosedReport<T>> {
    let leaves = tree.conditional_leaves(p.conditioning_node())?;
    let mut nonnegative = true;
    for leaf in &leaves {
        if p.evaluate(tree, leaf)?.sign() == Sign::Negative {
            nonnegative = false;
            break;
        }
    }
    if !nonnegative {
        return Ok(WellPosedReport {
            nonnegative,
            verdict: WellPosedVerdict::PassVacuous,
        });
    }
    for k in p.start()..=p.maturity() {
        for node in tree.nodes_at_depth(k) {
            if !p.conditioning_node().is_prefix_of(&node) {
                continue;
            }
            let v = p.partial_sum(tree, &node)?;
            if v.sign() == Sign::Negative {
                return Ok(WellPosedReport {
                    nonnegative,
                    verdict: WellPosedVerdict::Violation {
                        node,
                        partial_sum: v,
                    },
                });
            }
        }
    }
    Ok(WellPosedReport {
        nonnegative,
        verdict: WellPosedVerdict::Pass,
    })
}

/// Combination of leaf equations proving the representation system has no
/// solution: the multipliers annihilate every strategy coefficient yet
/// produce a nonzero target.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate<T> {
    /// Nonzero multipliers per leaf equation.
    pub combination: Vec<(NodePath, T)>,
    /// Value the combination assigns to the target side; nonzero.
    pub mismatch: T,
}

/// Result of trying to write `|Π|` as a portfolio payoff.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsRepresentation<T> {
    Representable(ElementaryFunction<T>),
    Infeasible(InfeasibilityCertificate<T>),
}

/// Decides whether `|Π|` is itself the payoff of a strategy, by solving the
/// per-leaf linear system `V' + Σ H'_i Δ_i = |Π|` over all holdings below
/// the conditioning node. Exact mode solves exactly; float mode uses the
/// zero band as a residual tolerance.
pub fn represent_abs<T: Scalar>(
    tree: &TrajectoryTree<T>,
    p: &ElementaryFunction<T>,
) -> Result<AbsRepresentation<T>> {
    let base = p.conditioning_node().clone();
    let leaves = tree.conditional_leaves(&base)?;
    let unknown_nodes: Vec<NodePath> = tree
        .interior_nodes()
        .into_iter()
        .filter(|u| base.is_prefix_of(u))
        .collect();
    let cols = 1 + unknown_nodes.len();

    let mut rows = Vec::with_capacity(leaves.len());
    let mut rhs = Vec::with_capacity(leaves.len());
    for leaf in &leaves {
        let prices = tree.path_prices(leaf)?;
        let mut row = vec![T::zero(); cols];
        row[0] = T::one();
        for (idx, u) in unknown_nodes.iter().enumerate() {
            if u.is_prefix_of(leaf) {
                let d = u.depth();
                row[idx + 1] = prices[d + 1].clone() - prices[d].clone();
            }
        }
        rows.push(row);
        rhs.push(Scalar::abs(&p.evaluate(tree, leaf)?));
    }

    match solve_with_certificate(rows, rhs) {
        SolveOutcome::Solution(x) => {
            let mut holdings = BTreeMap::new();
            let mut maturity = base.depth();
            for (idx, u) in unknown_nodes.iter().enumerate() {
                let h = x[idx + 1].clone();
                if h.sign() != Sign::Zero {
                    maturity = maturity.max(u.depth() + 1);
                    holdings.insert(u.clone(), h);
                }
            }
            let rep = ElementaryFunction::new(base, x[0].clone(), holdings, maturity)?;
            Ok(AbsRepresentation::Representable(rep))
        }
        SolveOutcome::Inconsistent {
            multipliers,
            mismatch,
        } => {
            let combination = leaves
                .iter()
                .zip(multipliers)
                .filter(|(_, m)| m.sign() != Sign::Zero)
                .map(|(leaf, m)| (leaf.clone(), m))
                .collect();
            Ok(AbsRepresentation::Infeasible(InfeasibilityCertificate {
                combination,
                mismatch,
            }))
        }
    }
}

enum SolveOutcome<T> {
    Solution(Vec<T>),
    Inconsistent { multipliers: Vec<T>, mismatch: T },
}

/// Gauss-Jordan elimination that tracks row multipliers, so inconsistency
/// comes with the combination of original equations witnessing it.
fn solve_with_certificate<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> SolveOutcome<T> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut history: Vec<Vec<T>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        // largest pivot for float stability; exact mode just needs nonzero
        let pivot_row = (rank..m)
            .filter(|&r| a[r][col].sign() != Sign::Zero)
            .max_by(|&r1, &r2| Scalar::abs(&a[r1][col]).total_cmp(&Scalar::abs(&a[r2][col])));
        let Some(pr) = pivot_row else { continue };
        a.swap(rank, pr);
        b.swap(rank, pr);
        history.swap(rank, pr);
        let pivot = a[rank][col].clone();
        for r in 0..m {
            if r == rank || a[r][col].sign() == Sign::Zero {
                continue;
            }
            let factor = a[r][col].clone() / pivot.clone();
            let pivot_row = a[rank].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                *x = x.clone() - factor.clone() * p.clone();
            }
            b[r] = b[r].clone() - factor.clone() * b[rank].clone();
            let pivot_hist = history[rank].clone();
            for (x, p) in history[r].iter_mut().zip(&pivot_hist) {
                *x = x.clone() - factor.clone() * p.clone();
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == m {
            break;
        }
    }
    for r in rank..m {
        if b[r].sign() != Sign::Zero {
            return SolveOutcome::Inconsistent {
                multipliers: history[r].clone(),
                mismatch: b[r].clone(),
            };
        }
    }
    let mut x = vec![T::zero(); n];
    for (row, col) in pivots {
        x[col] = b[row].clone() / a[row][col].clone();
    }
    SolveOutcome::Solution(x)
}
