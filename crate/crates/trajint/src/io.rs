//! Model, payoff, and portfolio file formats.
//!
//! Models are JSON trees of prices. Number literals may be plain JSON
//! numbers or strings: `"p/q"` ratios and decimal strings parse exactly in
//! exact mode, which is the recommended way to feed classification-critical
//! prices. Extended values additionally accept `"inf"` and `"-inf"`.
//!
//! ```json
//! {"s0": 1, "horizon": 2, "tree": {"value": 1, "children": [
//!     {"value": 2, "children": [{"value": "5/2"}, {"value": 1}]},
//!     {"value": "1/2", "children": [{"value": 1}, {"value": "1/4"}]}]}}
//! ```
//!
//! Payoff specifiers are compact strings: `call:K`, `put:K`, `const:c`,
//! `terminal`, `indicator:@file`, `table:@file`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::elementary::ElementaryFunction;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::payoff::Payoff;
use crate::scalar::Scalar;
use crate::superhedge::HedgeCertificate;
use crate::tree::{NodePath, TrajectoryTree, TreeNode};

/// A number in a file: JSON number or literal string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberLiteral {
    Number(f64),
    Text(String),
}

impl NumberLiteral {
    pub fn parse<T: Scalar>(&self) -> Result<T> {
        match self {
            NumberLiteral::Number(x) if x.is_finite() => Ok(T::from_f64(*x)),
            NumberLiteral::Number(x) => Err(Error::Model(format!("non-finite number {x}"))),
            NumberLiteral::Text(s) => T::parse_literal(s)
                .ok_or_else(|| Error::Model(format!("cannot parse number literal {s:?}"))),
        }
    }

    pub fn parse_ext<T: Scalar>(&self) -> Result<Ext<T>> {
        if let NumberLiteral::Text(s) = self {
            match s.trim() {
                "inf" | "+inf" => return Ok(Ext::PosInf),
                "-inf" => return Ok(Ext::NegInf),
                _ => {}
            }
        }
        Ok(Ext::Finite(self.parse()?))
    }

    /// Renders losslessly: exact scalars become literal strings, floats
    /// plain numbers.
    pub fn render<T: Scalar>(value: &T) -> Self {
        if T::IS_EXACT {
            NumberLiteral::Text(value.render_literal())
        } else {
            NumberLiteral::Number(value.to_f64())
        }
    }

    pub fn render_ext<T: Scalar>(value: &Ext<T>) -> Self {
        match value {
            Ext::PosInf => NumberLiteral::Text("inf".into()),
            Ext::NegInf => NumberLiteral::Text("-inf".into()),
            Ext::Finite(v) => Self::render(v),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub s0: NumberLiteral,
    pub horizon: usize,
    pub tree: NodeFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeFile {
    pub value: NumberLiteral,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeFile>,
}

/// Parses a model from JSON text.
pub fn parse_model<T: Scalar>(json: &str) -> Result<TrajectoryTree<T>> {
    let file: ModelFile = serde_json::from_str(json)?;
    fn build<T: Scalar>(node: &NodeFile) -> Result<TreeNode<T>> {
        let value: T = node.value.parse()?;
        if node.children.is_empty() {
            Ok(TreeNode::leaf(value))
        } else {
            let children = node
                .children
                .iter()
                .map(build)
                .collect::<Result<Vec<_>>>()?;
            Ok(TreeNode::branch(value, children))
        }
    }
    let tree: TrajectoryTree<T> = TrajectoryTree::from_root(build(&file.tree)?)?;
    let s0: T = file.s0.parse()?;
    if !tree.s0().approx_eq(&s0) {
        return Err(Error::Model(format!(
            "declared s0 = {s0} does not match the root value {}",
            tree.s0()
        )));
    }
    if tree.horizon() != file.horizon {
        return Err(Error::Model(format!(
            "declared horizon {} does not match the leaf depth {}",
            file.horizon,
            tree.horizon()
        )));
    }
    Ok(tree)
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<TrajectoryTree<T>> {
    parse_model(&std::fs::read_to_string(path)?)
}

/// Serializes a model to the file schema.
pub fn model_to_file<T: Scalar>(tree: &TrajectoryTree<T>) -> ModelFile {
    fn render<T: Scalar>(node: &TreeNode<T>) -> NodeFile {
        NodeFile {
            value: NumberLiteral::render(node.value()),
            children: node.children().iter().map(render).collect(),
        }
    }
    ModelFile {
        s0: NumberLiteral::render(tree.s0()),
        horizon: tree.horizon(),
        tree: render(tree.root()),
    }
}

pub fn save_model<T: Scalar>(tree: &TrajectoryTree<T>, path: &Path) -> Result<()> {
    let file = model_to_file(tree);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortfolioFile {
    pub start: usize,
    pub node: Vec<usize>,
    #[serde(rename = "V")]
    pub v: NumberLiteral,
    pub maturity: usize,
    #[serde(rename = "H", default)]
    pub h: Vec<HoldingFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoldingFile {
    pub node: Vec<usize>,
    pub h: NumberLiteral,
}

pub fn parse_portfolio<T: Scalar>(json: &str) -> Result<ElementaryFunction<T>> {
    let file: PortfolioFile = serde_json::from_str(json)?;
    let node = NodePath::from_indices(file.node);
    if node.depth() != file.start {
        return Err(Error::Model(format!(
            "start {} does not match the conditioning node depth {}",
            file.start,
            node.depth()
        )));
    }
    let mut holdings = BTreeMap::new();
    for entry in &file.h {
        holdings.insert(NodePath::from_indices(entry.node.clone()), entry.h.parse()?);
    }
    ElementaryFunction::new(node, file.v.parse()?, holdings, file.maturity)
}

pub fn portfolio_to_file<T: Scalar>(p: &ElementaryFunction<T>) -> PortfolioFile {
    PortfolioFile {
        start: p.start(),
        node: p.conditioning_node().indices().to_vec(),
        v: NumberLiteral::render(p.initial_value()),
        maturity: p.maturity(),
        h: p
            .holdings()
            .iter()
            .map(|(node, h)| HoldingFile {
                node: node.indices().to_vec(),
                h: NumberLiteral::render(h),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub elements: Vec<PortfolioFile>,
    pub total_premium: NumberLiteral,
    pub slack: NumberLiteral,
}

pub fn certificate_to_file<T: Scalar>(c: &HedgeCertificate<T>) -> CertificateFile {
    CertificateFile {
        elements: c.elements.iter().map(portfolio_to_file).collect(),
        total_premium: NumberLiteral::render(&c.total_premium),
        slack: NumberLiteral::render(&c.slack),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableEntryFile {
    leaf: Vec<usize>,
    value: NumberLiteral,
}

/// Parses a payoff specifier, loading `@file` references relative to
/// `base_dir`.
pub fn parse_payoff_spec<T: Scalar>(spec: &str, base_dir: &Path) -> Result<Payoff<T>> {
    let spec = spec.trim();
    if spec == "terminal" {
        return Ok(Payoff::TerminalValue);
    }
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Model(format!("malformed payoff spec {spec:?}")))?;
    let lit = |s: &str| NumberLiteral::Text(s.to_string());
    match kind {
        "call" => Ok(Payoff::Call {
            strike: lit(arg).parse()?,
        }),
        "put" => Ok(Payoff::Put {
            strike: lit(arg).parse()?,
        }),
        "const" => Ok(Payoff::Constant(lit(arg).parse_ext()?)),
        "absinc" => Ok(Payoff::AbsIncrement {
            step: arg
                .parse()
                .map_err(|_| Error::Model(format!("bad step index {arg:?}")))?,
        }),
        "indicator" => {
            let text = read_ref(arg, base_dir)?;
            let leaves: Vec<Vec<usize>> = serde_json::from_str(&text)?;
            Ok(Payoff::Indicator(
                leaves.into_iter().map(NodePath::from_indices).collect(),
            ))
        }
        "table" => {
            let text = read_ref(arg, base_dir)?;
            let entries: Vec<TableEntryFile> = serde_json::from_str(&text)?;
            let mut table = BTreeMap::new();
            for e in entries {
                table.insert(NodePath::from_indices(e.leaf), e.value.parse_ext()?);
            }
            Ok(Payoff::LeafTable(table))
        }
        other => Err(Error::Model(format!("unknown payoff kind {other:?}"))),
    }
}

fn read_ref(arg: &str, base_dir: &Path) -> Result<String> {
    let Some(stripped) = arg.strip_prefix('@') else {
        return Err(Error::Model(format!(
            "expected @file reference, found {arg:?}"
        )));
    };
    let mut path = PathBuf::from(stripped);
    if path.is_relative() {
        path = base_dir.join(path);
    }
    Ok(std::fs::read_to_string(path)?)
}

/// Parses a leaf-set specifier: `@file` with a JSON list of paths, or an
/// inline semicolon-separated list like `0,0;1,0`.
pub fn parse_leafset(spec: &str, base_dir: &Path) -> Result<BTreeSet<NodePath>> {
    if spec.starts_with('@') {
        let text = read_ref(spec, base_dir)?;
        let leaves: Vec<Vec<usize>> = serde_json::from_str(&text)?;
        return Ok(leaves.into_iter().map(NodePath::from_indices).collect());
    }
    let mut out = BTreeSet::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.insert(
            NodePath::parse(part)
                .ok_or_else(|| Error::Model(format!("bad leaf path {part:?}")))?,
        );
    }
    Ok(out)
}
