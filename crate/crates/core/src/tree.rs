//! Syntax trees as finite partial maps from addresses to labels, and the
//! adjunction, substitution and simultaneous-adjunction operations on them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::address::{update, GornAddress};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeLabel {
    Nonterminal(String),
    Terminal(String),
    /// The empty-string label; only valid on frontier nodes.
    Epsilon,
}

impl NodeLabel {
    pub fn nt(s: impl Into<String>) -> Self {
        NodeLabel::Nonterminal(s.into())
    }

    pub fn term(s: impl Into<String>) -> Self {
        NodeLabel::Terminal(s.into())
    }

    pub fn is_nonterminal(&self) -> bool {
        matches!(self, NodeLabel::Nonterminal(_))
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            NodeLabel::Nonterminal(s) | NodeLabel::Terminal(s) => Some(s),
            NodeLabel::Epsilon => None,
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Nonterminal(s) | NodeLabel::Terminal(s) => f.write_str(s),
            NodeLabel::Epsilon => f.write_str("<eps>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node {0} has no parent in the tree")]
    NotPrefixClosed(GornAddress),
    #[error("node {0} has no left sibling in the tree")]
    NotLeftClosed(GornAddress),
    #[error("interior node {0} is not labeled with a nonterminal")]
    InteriorNotNonterminal(GornAddress),
    #[error("no node at address {0}")]
    MissingNode(GornAddress),
    #[error("adjunction at {at}: {reason}")]
    AdjunctionConstraint { at: GornAddress, reason: String },
    #[error("substitution at {at}: {reason}")]
    Substitution { at: GornAddress, reason: String },
    #[error("frontier node {0} carries nonterminal label; tree is incomplete")]
    Incomplete(GornAddress),
    #[error("operation {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<TreeError>,
    },
}

/// A finite, prefix-closed and left-closed map from addresses to labels.
///
/// Trees are values: every operation returns a new tree, and equality is
/// equality of label maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyntaxTree {
    nodes: BTreeMap<GornAddress, NodeLabel>,
}

impl SyntaxTree {
    pub fn leaf(label: NodeLabel) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(GornAddress::root(), label);
        SyntaxTree { nodes }
    }

    /// Builds `label(children...)`. Panics if `label` is not a nonterminal
    /// while children are given.
    pub fn node(label: NodeLabel, children: Vec<SyntaxTree>) -> Self {
        assert!(
            children.is_empty() || label.is_nonterminal(),
            "interior node must be a nonterminal"
        );
        let mut nodes = BTreeMap::new();
        nodes.insert(GornAddress::root(), label);
        for (i, child) in children.into_iter().enumerate() {
            let base = GornAddress::root().child(i as u32 + 1);
            for (addr, l) in child.nodes {
                nodes.insert(base.concat(&addr), l);
            }
        }
        SyntaxTree { nodes }
    }

    /// Builds a tree from an explicit label map, checking every invariant.
    pub fn from_map(nodes: BTreeMap<GornAddress, NodeLabel>) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        for addr in nodes.keys() {
            if let Some(parent) = addr.parent() {
                match nodes.get(&parent) {
                    None => return Err(TreeError::NotPrefixClosed(addr.clone())),
                    Some(l) if !l.is_nonterminal() => {
                        return Err(TreeError::InteriorNotNonterminal(parent))
                    }
                    _ => {}
                }
                let i = addr.last().unwrap();
                if i > 1 && !nodes.contains_key(&parent.child(i - 1)) {
                    return Err(TreeError::NotLeftClosed(addr.clone()));
                }
            }
        }
        Ok(SyntaxTree { nodes })
    }

    pub fn get(&self, addr: &GornAddress) -> Option<&NodeLabel> {
        self.nodes.get(addr)
    }

    pub fn contains(&self, addr: &GornAddress) -> bool {
        self.nodes.contains_key(addr)
    }

    pub fn root_label(&self) -> &NodeLabel {
        &self.nodes[&GornAddress::root()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// All `(address, label)` pairs in preorder.
    pub fn iter(&self) -> impl Iterator<Item = (&GornAddress, &NodeLabel)> {
        self.nodes.iter()
    }

    pub fn addresses(&self) -> impl Iterator<Item = &GornAddress> {
        self.nodes.keys()
    }

    pub fn is_frontier(&self, addr: &GornAddress) -> bool {
        self.contains(addr) && !self.contains(&addr.child(1))
    }

    pub fn children(&self, addr: &GornAddress) -> Vec<GornAddress> {
        (1..)
            .map(|i| addr.child(i))
            .take_while(|c| self.contains(c))
            .collect()
    }

    pub fn height(&self) -> usize {
        self.nodes.keys().map(GornAddress::depth).max().unwrap_or(0)
    }

    /// Checks the structural invariants; trees built through the public API
    /// always satisfy them.
    pub fn check_invariants(&self) -> Result<(), TreeError> {
        SyntaxTree::from_map(self.nodes.clone()).map(|_| ())
    }

    /// The terminal yield, left to right. Fails on a nonterminal frontier node.
    pub fn frontier_string(&self) -> Result<Vec<String>, TreeError> {
        self.frontier_with_holes(&[])
    }

    /// The terminal yield, skipping nonterminal frontier nodes listed in
    /// `holes` (foot or substitution sites).
    pub fn frontier_with_holes(&self, holes: &[GornAddress]) -> Result<Vec<String>, TreeError> {
        let mut out = Vec::new();
        for (addr, label) in &self.nodes {
            if !self.is_frontier(addr) {
                continue;
            }
            match label {
                NodeLabel::Terminal(s) => out.push(s.clone()),
                NodeLabel::Epsilon => {}
                NodeLabel::Nonterminal(_) => {
                    if !holes.contains(addr) {
                        return Err(TreeError::Incomplete(addr.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The subtree rooted at `addr`, re-addressed from ε.
    pub fn subtree(&self, addr: &GornAddress) -> Option<SyntaxTree> {
        if !self.contains(addr) {
            return None;
        }
        let nodes = self
            .nodes
            .range(addr.clone()..)
            .take_while(|(a, _)| addr.is_prefix_of(a))
            .map(|(a, l)| (a.difference(addr).unwrap(), l.clone()))
            .collect();
        Some(SyntaxTree { nodes })
    }

    fn fmt_at(&self, addr: &GornAddress, out: &mut String) {
        let label = &self.nodes[addr];
        let children = self.children(addr);
        match label {
            NodeLabel::Nonterminal(s) => {
                out.push('(');
                out.push_str(s);
                for c in &children {
                    out.push(' ');
                    self.fmt_at(c, out);
                }
                out.push(')');
            }
            other => out.push_str(&other.to_string()),
        }
    }

    /// One-line bracketed rendering, e.g. `(NP (N red (N pepper)))`.
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        self.fmt_at(&GornAddress::root(), &mut out);
        out
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracketed())
    }
}

/// Free-function form of [`SyntaxTree::frontier_string`].
pub fn frontier_string(tree: &SyntaxTree) -> Result<Vec<String>, TreeError> {
    tree.frontier_string()
}

/// Adjoins auxiliary tree `aux` (foot at `foot`) into `host` at `at`.
///
/// The result agrees with `host` off the subtree at `at`, places `aux` at
/// `at`, and hangs the excised subtree of `host` below the foot. The node at
/// `at`, the root of `aux` and its foot must all carry the same nonterminal.
pub fn adjoin(
    host: &SyntaxTree,
    aux: &SyntaxTree,
    foot: &GornAddress,
    at: &GornAddress,
) -> Result<SyntaxTree, TreeError> {
    let site = host
        .get(at)
        .ok_or_else(|| TreeError::MissingNode(at.clone()))?;
    let constraint = |reason: String| TreeError::AdjunctionConstraint {
        at: at.clone(),
        reason,
    };
    let foot_label = aux
        .get(foot)
        .ok_or_else(|| constraint(format!("auxiliary tree has no node at foot address {foot}")))?;
    if !aux.is_frontier(foot) {
        return Err(constraint(format!("foot {foot} is not a frontier node")));
    }
    if !site.is_nonterminal() {
        return Err(constraint(format!(
            "site label {site} is not a nonterminal"
        )));
    }
    if site != aux.root_label() || site != foot_label {
        return Err(constraint(format!(
            "site label {site}, auxiliary root {}, foot {foot_label} disagree",
            aux.root_label()
        )));
    }

    let mut nodes = BTreeMap::new();
    for (r, label) in &host.nodes {
        match r.difference(at) {
            Ok(u) => {
                nodes.insert(at.concat(foot).concat(&u), label.clone());
            }
            Err(_) => {
                nodes.insert(r.clone(), label.clone());
            }
        }
    }
    for (u, label) in &aux.nodes {
        if !foot.is_prefix_of(u) {
            nodes.insert(at.concat(u), label.clone());
        }
    }
    Ok(SyntaxTree { nodes })
}

/// Grafts initial tree `init` at the nonterminal frontier node `at` of `host`.
pub fn substitute(
    host: &SyntaxTree,
    init: &SyntaxTree,
    at: &GornAddress,
) -> Result<SyntaxTree, TreeError> {
    let err = |reason: String| TreeError::Substitution {
        at: at.clone(),
        reason,
    };
    let site = host
        .get(at)
        .ok_or_else(|| err("no node at this address".to_string()))?;
    if !host.is_frontier(at) {
        return Err(err("site is an interior node".to_string()));
    }
    if !site.is_nonterminal() {
        return Err(err(format!("site label {site} is not a nonterminal")));
    }
    if site != init.root_label() {
        return Err(err(format!(
            "site label {site} differs from root label {}",
            init.root_label()
        )));
    }
    let mut nodes: BTreeMap<_, _> = host
        .nodes
        .iter()
        .filter(|(r, _)| *r != at)
        .map(|(r, l)| (r.clone(), l.clone()))
        .collect();
    for (u, label) in &init.nodes {
        nodes.insert(at.concat(u), label.clone());
    }
    Ok(SyntaxTree { nodes })
}

/// One step of a simultaneous operation list.
#[derive(Debug, Clone, Copy)]
pub enum TreeOp<'a> {
    Adjoin {
        tree: &'a SyntaxTree,
        foot: &'a GornAddress,
        at: &'a GornAddress,
    },
    Substitute {
        tree: &'a SyntaxTree,
        at: &'a GornAddress,
    },
}

impl TreeOp<'_> {
    fn at(&self) -> &GornAddress {
        match self {
            TreeOp::Adjoin { at, .. } | TreeOp::Substitute { at, .. } => at,
        }
    }
}

/// `host[A_1/t_1, ..., A_k/t_k]`: the operations are applied in order, each
/// later address rewritten by `update` for every earlier adjunction.
pub fn simultaneous_adjoin(host: &SyntaxTree, ops: &[TreeOp<'_>]) -> Result<SyntaxTree, TreeError> {
    simultaneous_adjoin_tracking(host, None, ops).map(|(t, _)| t)
}

/// As [`simultaneous_adjoin`], also tracking where a distinguished frontier
/// node (the foot of a host auxiliary tree) ends up.
pub fn simultaneous_adjoin_tracking(
    host: &SyntaxTree,
    foot: Option<&GornAddress>,
    ops: &[TreeOp<'_>],
) -> Result<(SyntaxTree, Option<GornAddress>), TreeError> {
    let mut tree = host.clone();
    let mut host_foot = foot.cloned();
    let mut pending: Vec<GornAddress> = ops.iter().map(|op| op.at().clone()).collect();
    for (index, op) in ops.iter().enumerate() {
        let at = pending[index].clone();
        let step = |e: TreeError| TreeError::Step {
            index,
            source: Box::new(e),
        };
        match op {
            TreeOp::Adjoin {
                tree: aux, foot, ..
            } => {
                tree = adjoin(&tree, aux, foot, &at).map_err(step)?;
                for later in pending.iter_mut().skip(index + 1) {
                    *later = update(later, foot, &at);
                }
                if let Some(f) = host_foot.as_mut() {
                    if at.is_prefix_of(f) {
                        let rest = f.difference(&at).unwrap();
                        *f = at.concat(foot).concat(&rest);
                    }
                }
            }
            TreeOp::Substitute { tree: init, .. } => {
                tree = substitute(&tree, init, &at).map_err(step)?;
            }
        }
    }
    Ok((tree, host_foot))
}
