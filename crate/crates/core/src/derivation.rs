//! Ordered derivation trees, their derived trees, well-formedness under the
//! standard and extended notions of derivation, and equivalence under
//! swapping adjacent siblings at distinct addresses.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::GornAddress;
use crate::grammar::{AuxClass, GrammarError, NodeRef, TagGrammar};
use crate::tree::{simultaneous_adjoin_tracking, SyntaxTree, TreeError, TreeOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivationMode {
    /// At most one adjunction per node of each elementary tree.
    Standard,
    /// Any number of modifier adjunctions per node, at most one predicative
    /// adjunction, which must come last (outermost predication).
    #[default]
    Extended,
}

impl fmt::Display for DerivationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivationMode::Standard => "standard",
            DerivationMode::Extended => "extended",
        })
    }
}

impl FromStr for DerivationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(DerivationMode::Standard),
            "extended" => Ok(DerivationMode::Extended),
            other => Err(format!("unknown derivation mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Adjoin,
    Subst,
}

/// An arc of a derivation tree: `child` operated at address `at` of the
/// parent's elementary tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub at: GornAddress,
    pub op: OpKind,
    pub child: OrderedDerivationTree,
}

impl Operation {
    pub fn adjoin(at: GornAddress, child: OrderedDerivationTree) -> Self {
        Operation {
            at,
            op: OpKind::Adjoin,
            child,
        }
    }

    pub fn subst(at: GornAddress, child: OrderedDerivationTree) -> Self {
        Operation {
            at,
            op: OpKind::Subst,
            child,
        }
    }
}

/// A derivation tree whose sibling order is significant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderedDerivationTree {
    pub tree: String,
    #[serde(default)]
    pub children: Vec<Operation>,
}

impl OrderedDerivationTree {
    pub fn leaf(tree: &str) -> Self {
        OrderedDerivationTree {
            tree: tree.to_string(),
            children: Vec::new(),
        }
    }

    pub fn new(tree: &str, children: Vec<Operation>) -> Self {
        OrderedDerivationTree {
            tree: tree.to_string(),
            children,
        }
    }

    /// Number of nodes (elementary trees used).
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.child.size()).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("derivation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn fmt_compact(&self, out: &mut String) {
        out.push_str(&self.tree);
        if self.children.is_empty() {
            return;
        }
        out.push('(');
        for (n, c) in self.children.iter().enumerate() {
            if n > 0 {
                out.push_str(", ");
            }
            out.push_str(&c.at.to_string());
            out.push(if c.op == OpKind::Adjoin { ':' } else { '=' });
            c.child.fmt_compact(out);
        }
        out.push(')');
    }
}

/// Compact form: `alpha_pe(1:beta_re, 1:beta_ro)`; substitution arcs use `=`.
impl fmt::Display for OrderedDerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.fmt_compact(&mut s);
        f.write_str(&s)
    }
}

#[derive(Debug, Error)]
pub enum DerivationError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("at {path}: {source}")]
    Tree {
        path: String,
        #[source]
        source: TreeError,
    },
    #[error("children {index} and {} both operate at {at}; swapping them changes the derived tree", index + 1)]
    IllegalSwap { index: usize, at: GornAddress },
    #[error("no sibling pair at index {index} (parent has {len} children)")]
    Index { index: usize, len: usize },
    #[error("derivation path {0:?} does not exist")]
    Path(Vec<usize>),
}

/// A failed well-formedness condition, located by a path of tree names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RootNotStart {
        tree: String,
    },
    UnknownAddress {
        path: String,
        at: GornAddress,
    },
    NotAdjoinable {
        path: String,
        at: GornAddress,
        child: String,
    },
    NotSubstitutable {
        path: String,
        at: GornAddress,
        child: String,
    },
    SharedAddress {
        path: String,
        at: GornAddress,
    },
    MultiplePredicative {
        path: String,
        at: GornAddress,
    },
    PredicativeNotLast {
        path: String,
        at: GornAddress,
    },
    DuplicateSubstitution {
        path: String,
        at: GornAddress,
    },
    ObligatoryUnsatisfied {
        path: String,
        at: GornAddress,
    },
    SubstitutionUnfilled {
        path: String,
        at: GornAddress,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootNotStart { tree } => {
                write!(f, "root {tree} is not an initial tree rooted in the start symbol")
            }
            Violation::UnknownAddress { path, at } => write!(f, "{path}: no node at {at}"),
            Violation::NotAdjoinable { path, at, child } => {
                write!(f, "{path}: {child} cannot adjoin at {at}")
            }
            Violation::NotSubstitutable { path, at, child } => {
                write!(f, "{path}: {child} cannot substitute at {at}")
            }
            Violation::SharedAddress { path, at } => write!(
                f,
                "{path}: two sibling arcs at {at} (standard derivations allow one adjunction per node)"
            ),
            Violation::MultiplePredicative { path, at } => {
                write!(f, "{path}: more than one predicative tree adjoined at {at}")
            }
            Violation::PredicativeNotLast { path, at } => write!(
                f,
                "{path}: predicative tree at {at} is followed by another adjunction at the same address"
            ),
            Violation::DuplicateSubstitution { path, at } => {
                write!(f, "{path}: more than one substitution at {at}")
            }
            Violation::ObligatoryUnsatisfied { path, at } => {
                write!(f, "{path}: obligatory adjunction at {at} not performed")
            }
            Violation::SubstitutionUnfilled { path, at } => {
                write!(f, "{path}: substitution site {at} left open")
            }
        }
    }
}

/// Every well-formedness violation of `d` under `mode`. Empty means well formed.
pub fn violations(
    d: &OrderedDerivationTree,
    g: &TagGrammar,
    mode: DerivationMode,
) -> Result<Vec<Violation>, DerivationError> {
    let mut out = Vec::new();
    let root = g.tree(&d.tree)?;
    if g.start_trees().all(|t| t.name != root.name) {
        out.push(Violation::RootNotStart {
            tree: d.tree.clone(),
        });
    }
    check_node(d, g, mode, d.tree.clone(), &mut out)?;
    Ok(out)
}

fn check_node(
    d: &OrderedDerivationTree,
    g: &TagGrammar,
    mode: DerivationMode,
    path: String,
    out: &mut Vec<Violation>,
) -> Result<(), DerivationError> {
    let host = g.tree(&d.tree)?;
    // per address: (total arcs, substitutions, adjunctions, predicative adjunctions)
    let mut groups: BTreeMap<&GornAddress, Vec<(OpKind, Option<AuxClass>)>> = BTreeMap::new();
    for c in &d.children {
        let child = g.tree(&c.child.tree)?;
        let node = NodeRef::new(host.name.clone(), c.at.clone());
        if !host.tree.contains(&c.at) {
            out.push(Violation::UnknownAddress {
                path: path.clone(),
                at: c.at.clone(),
            });
        } else {
            let ok = match c.op {
                OpKind::Adjoin => g.adjoinable(&node, &child.name)?,
                OpKind::Subst => g.substitutable(&node, &child.name)?,
            };
            if !ok {
                let (at, child) = (c.at.clone(), child.name.clone());
                out.push(match c.op {
                    OpKind::Adjoin => Violation::NotAdjoinable {
                        path: path.clone(),
                        at,
                        child,
                    },
                    OpKind::Subst => Violation::NotSubstitutable {
                        path: path.clone(),
                        at,
                        child,
                    },
                });
            }
        }
        let class = match c.op {
            OpKind::Adjoin => Some(child.class.unwrap_or(AuxClass::Predicative)),
            OpKind::Subst => None,
        };
        groups.entry(&c.at).or_default().push((c.op, class));
    }

    for (&at, arcs) in &groups {
        let v = |make: fn(String, GornAddress) -> Violation| make(path.clone(), at.clone());
        match mode {
            DerivationMode::Standard => {
                if arcs.len() > 1 {
                    out.push(v(|path, at| Violation::SharedAddress { path, at }));
                }
            }
            DerivationMode::Extended => {
                let substs = arcs.iter().filter(|a| a.0 == OpKind::Subst).count();
                if substs > 1 {
                    out.push(v(|path, at| Violation::DuplicateSubstitution { path, at }));
                }
                let preds: Vec<usize> = arcs
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.1 == Some(AuxClass::Predicative))
                    .map(|(i, _)| i)
                    .collect();
                if preds.len() > 1 {
                    out.push(v(|path, at| Violation::MultiplePredicative { path, at }));
                }
                if let Some(&first) = preds.first() {
                    if arcs[first + 1..].iter().any(|a| a.0 == OpKind::Adjoin) {
                        out.push(v(|path, at| Violation::PredicativeNotLast { path, at }));
                    }
                }
            }
        }
    }

    for (addr, ann) in &host.annotations {
        let arcs = groups.get(addr).map(Vec::as_slice).unwrap_or(&[]);
        if ann.obligatory {
            // In extended derivations only a predicative adjunction passes
            // through the top of the node, so only it discharges the obligation.
            let satisfied = arcs.iter().any(|a| match mode {
                DerivationMode::Standard => a.0 == OpKind::Adjoin,
                DerivationMode::Extended => a.1 == Some(AuxClass::Predicative),
            });
            if !satisfied {
                out.push(Violation::ObligatoryUnsatisfied {
                    path: path.clone(),
                    at: addr.clone(),
                });
            }
        }
        if host.is_substitution_site(addr) && !arcs.iter().any(|a| a.0 == OpKind::Subst) {
            out.push(Violation::SubstitutionUnfilled {
                path: path.clone(),
                at: addr.clone(),
            });
        }
    }

    for c in &d.children {
        let sub = format!("{path} > {}@{}", c.child.tree, c.at);
        check_node(&c.child, g, mode, sub, out)?;
    }
    Ok(())
}

pub fn well_formed(
    d: &OrderedDerivationTree,
    g: &TagGrammar,
    mode: DerivationMode,
) -> Result<bool, DerivationError> {
    Ok(violations(d, g, mode)?.is_empty())
}

/// A derived tree together with the current address of its foot, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedTree {
    pub tree: SyntaxTree,
    pub foot: Option<GornAddress>,
}

/// The derived tree specified by `d`.
pub fn derive(d: &OrderedDerivationTree, g: &TagGrammar) -> Result<SyntaxTree, DerivationError> {
    derive_with_foot(d, g, &d.tree).map(|t| t.tree)
}

fn derive_with_foot(
    d: &OrderedDerivationTree,
    g: &TagGrammar,
    path: &str,
) -> Result<DerivedTree, DerivationError> {
    let elem = g.tree(&d.tree)?;
    let mut parts = Vec::with_capacity(d.children.len());
    for c in &d.children {
        let sub = format!("{path} > {}@{}", c.child.tree, c.at);
        parts.push(derive_with_foot(&c.child, g, &sub)?);
    }
    let mut ops = Vec::with_capacity(d.children.len());
    for (c, part) in d.children.iter().zip(&parts) {
        ops.push(match (c.op, &part.foot) {
            (OpKind::Adjoin, Some(foot)) => TreeOp::Adjoin {
                tree: &part.tree,
                foot,
                at: &c.at,
            },
            (OpKind::Adjoin, None) => {
                return Err(DerivationError::Tree {
                    path: path.to_string(),
                    source: TreeError::AdjunctionConstraint {
                        at: c.at.clone(),
                        reason: format!("{} has no foot", c.child.tree),
                    },
                })
            }
            (OpKind::Subst, _) => TreeOp::Substitute {
                tree: &part.tree,
                at: &c.at,
            },
        });
    }
    let foot = elem.foot();
    let (tree, foot) =
        simultaneous_adjoin_tracking(&elem.tree, foot.as_ref(), &ops).map_err(|source| {
            DerivationError::Tree {
                path: path.to_string(),
                source,
            }
        })?;
    Ok(DerivedTree { tree, foot })
}

fn node_at_mut<'a>(
    d: &'a mut OrderedDerivationTree,
    path: &[usize],
) -> Option<&'a mut OrderedDerivationTree> {
    let mut cur = d;
    for &i in path {
        cur = &mut cur.children.get_mut(i)?.child;
    }
    Some(cur)
}

/// Swaps children `index` and `index + 1` of the node reached by following
/// `parent_path` (child indices from the root).
pub fn swap_adjacent(
    d: &OrderedDerivationTree,
    parent_path: &[usize],
    index: usize,
) -> Result<OrderedDerivationTree, DerivationError> {
    let mut out = d.clone();
    let parent = node_at_mut(&mut out, parent_path)
        .ok_or_else(|| DerivationError::Path(parent_path.to_vec()))?;
    let len = parent.children.len();
    if index + 1 >= len {
        return Err(DerivationError::Index { index, len });
    }
    if parent.children[index].at == parent.children[index + 1].at {
        return Err(DerivationError::IllegalSwap {
            index,
            at: parent.children[index].at.clone(),
        });
    }
    parent.children.swap(index, index + 1);
    Ok(out)
}

/// The class representative: each sibling list stably sorted by address.
pub fn canonicalize(d: &OrderedDerivationTree) -> OrderedDerivationTree {
    let mut children: Vec<Operation> = d
        .children
        .iter()
        .map(|c| Operation {
            at: c.at.clone(),
            op: c.op,
            child: canonicalize(&c.child),
        })
        .collect();
    children.sort_by(|a, b| a.at.cmp(&b.at));
    OrderedDerivationTree {
        tree: d.tree.clone(),
        children,
    }
}

pub fn equivalent(a: &OrderedDerivationTree, b: &OrderedDerivationTree) -> bool {
    canonicalize(a) == canonicalize(b)
}

/// Every `(parent path, index)` at which [`swap_adjacent`] is legal.
pub fn legal_swaps(d: &OrderedDerivationTree) -> Vec<(Vec<usize>, usize)> {
    fn walk(d: &OrderedDerivationTree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
        for (i, w) in d.children.windows(2).enumerate() {
            if w[0].at != w[1].at {
                out.push((path.clone(), i));
            }
        }
        for (i, c) in d.children.iter().enumerate() {
            path.push(i);
            walk(&c.child, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn a(v: &[u32]) -> GornAddress {
        GornAddress::from_slice(v)
    }
    fn leaf(t: &str) -> OrderedDerivationTree {
        OrderedDerivationTree::leaf(t)
    }
    fn adj(at: &[u32], child: OrderedDerivationTree) -> Operation {
        Operation::adjoin(a(at), child)
    }

    fn dependent() -> OrderedDerivationTree {
        OrderedDerivationTree::new(
            "alpha_pe",
            vec![adj(
                &[1],
                OrderedDerivationTree::new("beta_re", vec![adj(&[], leaf("beta_ro"))]),
            )],
        )
    }

    fn independent(first: &str, second: &str) -> OrderedDerivationTree {
        OrderedDerivationTree::new(
            "alpha_pe",
            vec![adj(&[1], leaf(first)), adj(&[1], leaf(second))],
        )
    }

    fn frontier(d: &OrderedDerivationTree, g: &TagGrammar) -> String {
        derive(d, g).unwrap().frontier_string().unwrap().join(" ")
    }

    #[test]
    fn dependent_derivation() {
        let g = fixtures::adjectives(DerivationMode::Standard);
        assert!(well_formed(&dependent(), &g, DerivationMode::Standard).unwrap());
        assert_eq!(frontier(&dependent(), &g), "roasted red pepper");
        assert_eq!(
            derive(&dependent(), &g).unwrap().to_bracketed(),
            "(NP (N roasted (N red (N pepper))))"
        );
    }

    #[test]
    fn independent_derivation_modes() {
        let d = independent("beta_re", "beta_ro");
        let std_g = fixtures::adjectives(DerivationMode::Standard);
        let ext_g = fixtures::adjectives(DerivationMode::Extended);
        assert!(!well_formed(&d, &std_g, DerivationMode::Standard).unwrap());
        assert!(well_formed(&d, &ext_g, DerivationMode::Extended).unwrap());
        assert_eq!(frontier(&d, &ext_g), "roasted red pepper");
        assert_eq!(
            frontier(&independent("beta_ro", "beta_re"), &ext_g),
            "red roasted pepper"
        );
        assert_eq!(
            derive(&leaf("alpha_pe"), &ext_g).unwrap(),
            ext_g.tree("alpha_pe").unwrap().tree
        );
    }

    #[test]
    fn predicative_placement() {
        let g = fixtures::clauses();
        let subj = |n: &str| Operation::subst(a(&[1]), leaf(n));
        let thinks = || OrderedDerivationTree::new("beta_thinks", vec![subj("alpha_john")]);
        let outer = OrderedDerivationTree::new(
            "alpha_sleeps",
            vec![
                subj("alpha_mary"),
                adj(&[], leaf("beta_today")),
                adj(&[], thinks()),
            ],
        );
        assert!(well_formed(&outer, &g, DerivationMode::Extended).unwrap());
        assert_eq!(frontier(&outer, &g), "John thinks Mary sleeps today");

        let inner = OrderedDerivationTree::new(
            "alpha_sleeps",
            vec![
                subj("alpha_mary"),
                adj(&[], thinks()),
                adj(&[], leaf("beta_today")),
            ],
        );
        let v = violations(&inner, &g, DerivationMode::Extended).unwrap();
        assert!(matches!(v[..], [Violation::PredicativeNotLast { .. }]));

        let two = OrderedDerivationTree::new(
            "alpha_sleeps",
            vec![subj("alpha_mary"), adj(&[], thinks()), adj(&[], thinks())],
        );
        let v = violations(&two, &g, DerivationMode::Extended).unwrap();
        assert!(v
            .iter()
            .any(|v| matches!(v, Violation::MultiplePredicative { .. })));

        let open = leaf("alpha_sleeps");
        let v = violations(&open, &g, DerivationMode::Extended).unwrap();
        assert!(matches!(v[..], [Violation::SubstitutionUnfilled { .. }]));
    }

    #[test]
    fn unknown_tree_is_error() {
        let g = fixtures::adjectives(DerivationMode::Extended);
        assert!(well_formed(&leaf("nope"), &g, DerivationMode::Extended).is_err());
        let bad_root = leaf("beta_re");
        assert!(!well_formed(&bad_root, &g, DerivationMode::Extended).unwrap());
    }

    #[test]
    fn swaps() {
        let d = OrderedDerivationTree::new("x", vec![adj(&[2], leaf("X")), adj(&[1], leaf("Y"))]);
        let s = swap_adjacent(&d, &[], 0).unwrap();
        assert_eq!(s.children[0].child.tree, "Y");
        assert_eq!(swap_adjacent(&s, &[], 0).unwrap(), d);
        assert!(matches!(
            swap_adjacent(&independent("beta_re", "beta_ro"), &[], 0),
            Err(DerivationError::IllegalSwap { .. })
        ));
        assert!(matches!(
            swap_adjacent(&d, &[], 1),
            Err(DerivationError::Index { .. })
        ));
        assert!(matches!(
            swap_adjacent(&d, &[5], 0),
            Err(DerivationError::Path(_))
        ));
        assert!(equivalent(&d, &s));
        assert!(equivalent(&d, &d));
        assert!(!equivalent(
            &independent("beta_re", "beta_ro"),
            &independent("beta_ro", "beta_re")
        ));
    }

    #[test]
    fn canonical_form() {
        let d = OrderedDerivationTree::new("x", vec![adj(&[2], leaf("X")), adj(&[1], leaf("Y"))]);
        let c = canonicalize(&d);
        assert_eq!(c.to_string(), "x(1:Y, 2:X)");
        let same = independent("beta_ro", "beta_re");
        assert_eq!(canonicalize(&same), same);
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn json_format() {
        let d = dependent();
        let j = d.to_json();
        assert_eq!(
            j,
            r#"{"tree":"alpha_pe","children":[{"at":"1","op":"adjoin","child":{"tree":"beta_re","children":[{"at":"e","op":"adjoin","child":{"tree":"beta_ro","children":[]}}]}}]}"#
        );
        assert_eq!(OrderedDerivationTree::from_json(&j).unwrap(), d);
        let short = OrderedDerivationTree::from_json(r#"{"tree":"alpha_pe"}"#).unwrap();
        assert_eq!(short, leaf("alpha_pe"));
    }
}
