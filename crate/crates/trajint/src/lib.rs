//! Hedging-based conditional integration on finite trajectory trees.
//!
//! This crate prices claims on a finite set of admitted price paths without
//! ever introducing a probability measure. The market model is a rooted
//! tree of prices ([`TrajectoryTree`]); trading strategies are sequences of
//! per-node holdings ([`ElementaryFunction`]); and every pricing quantity is
//! a superhedging question: *what is the least initial capital whose trading
//! proceeds dominate the claim on every admitted path?*
//!
//! The answers organize into a family of node-indexed operators:
//!
//! * [`upper_integral`] / [`lower_integral`] — superhedging and
//!   subhedging prices conditional on a node,
//! * [`conditional_norm`] — least premium dominating `|f|`, the crate's
//!   substitute for "measure zero": a set is null when its indicator can be
//!   dominated at arbitrarily small cost,
//! * [`check_integrable`] — a claim is integrable when the upper and lower
//!   prices agree outside null sets, and [`price_process`] then yields its
//!   node-by-node price evolution,
//! * [`classify_process`] — price processes behave like super-, sub-, or
//!   exact martingales with respect to conditional prices.
//!
//! All operators come in two numeric modes (`f64` with a fixed zero band,
//! exact rationals) and are validated against independent brute-force
//! oracles in the [`oracle`] module.
//!
//! The guide in `book/` walks through the concepts chapter by chapter.

pub mod classify;
pub mod construct;
pub mod elementary;
mod error;
pub mod ext;
pub mod io;
pub mod martingale;
pub mod measure;
pub mod oracle;
pub mod payoff;
pub mod scalar;
pub mod superhedge;
pub mod tree;

pub use classify::{classify_node, scan_tree, NodeClass, NodeKind, TreeScan};
pub use construct::{
    accumulate_portfolios, contrarian_trajectory, gen_example1, gen_example2, gen_lattice,
    gen_random_tree, ContrarianTrace, Example1Report, LatticeKind, RandomTreeProfile,
    verify_example1_l_failure,
};
pub use elementary::{
    check_wellposed, elementary_integral, represent_abs, AbsRepresentation, ConstraintSet,
    ElementaryFunction, HoldingInterval, InfeasibilityCertificate, IntegralValue,
    WellPosedReport, WellPosedVerdict,
};
pub use error::{Error, Result};
pub use ext::Ext;
pub use martingale::{
    classify_process, price_process, verify_tower, PriceProcess, ProcessClass, ProcessMode,
    TowerReport, TowerRow,
};
pub use measure::{
    check_integrable, check_k_property, check_l_property, is_conditionally_null,
    verify_convergence, ConvergenceMode, ConvergenceReport, IntegrabilityReport, KPropertyReport,
    NullReport,
};
pub use payoff::{LeafValues, Payoff};
pub use scalar::{Scalar, Sign, FLOAT_ZERO_BAND};
pub use superhedge::{
    conditional_norm, hedge_certificate, lower_integral, lower_values, node_minimax, norm_values,
    upper_integral, upper_values, HedgeCertificate, NodeSolve, NodeValues,
};
pub use tree::{NodePath, TrajectoryTree, TreeNode};

#[cfg(doctest)]
mod book;
