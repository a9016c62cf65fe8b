//! Tree-adjoining grammars: elementary trees with foot and substitution
//! markers, adjoining constraints, and the JSON grammar file format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::address::GornAddress;
use crate::tree::{NodeLabel, SyntaxTree, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Initial,
    Auxiliary,
}

/// Predicative auxiliary trees adjoin at most once per node; modifiers may
/// stack in extended derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxClass {
    Predicative,
    Modifier,
}

/// Selective-adjunction constraint at a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SelectiveSet {
    All,
    None,
    Only(BTreeSet<String>),
}

impl SelectiveSet {
    pub fn only<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SelectiveSet::Only(names.into_iter().map(Into::into).collect())
    }

    pub fn admits(&self, name: &str) -> bool {
        match self {
            SelectiveSet::All => true,
            SelectiveSet::None => false,
            SelectiveSet::Only(s) => s.contains(name),
        }
    }
}

impl Serialize for SelectiveSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SelectiveSet::All => serializer.serialize_str("all"),
            SelectiveSet::None => serializer.serialize_str("none"),
            SelectiveSet::Only(names) => names.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for SelectiveSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Keyword(String),
            Names(Vec<String>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Keyword(k) if k == "all" => Ok(SelectiveSet::All),
            Raw::Keyword(k) if k == "none" => Ok(SelectiveSet::None),
            Raw::Keyword(k) => Err(serde::de::Error::custom(format!(
                "expected \"all\", \"none\" or a list of tree names, found {k:?}"
            ))),
            Raw::Names(v) => Ok(SelectiveSet::Only(v.into_iter().collect())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Nonterminal,
    Terminal,
    Epsilon,
    Foot,
    Subst,
}

/// One node of a tree description, as written in grammar files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    #[serde(default)]
    pub label: String,
    pub role: NodeRole,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub oa: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sa: Option<SelectiveSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    fn bare(label: &str, role: NodeRole) -> Self {
        NodeSpec {
            label: label.to_string(),
            role,
            oa: false,
            sa: None,
            children: Vec::new(),
        }
    }

    pub fn nt(label: &str, children: Vec<NodeSpec>) -> Self {
        NodeSpec {
            children,
            ..Self::bare(label, NodeRole::Nonterminal)
        }
    }

    pub fn term(label: &str) -> Self {
        Self::bare(label, NodeRole::Terminal)
    }

    pub fn epsilon() -> Self {
        Self::bare("", NodeRole::Epsilon)
    }

    pub fn foot(label: &str) -> Self {
        Self::bare(label, NodeRole::Foot)
    }

    pub fn subst(label: &str) -> Self {
        Self::bare(label, NodeRole::Subst)
    }

    pub fn with_sa(mut self, sa: SelectiveSet) -> Self {
        self.sa = Some(sa);
        self
    }

    pub fn obligatory(mut self) -> Self {
        self.oa = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSpec {
    pub name: String,
    pub kind: TreeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<AuxClass>,
    pub root: NodeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarSpec {
    pub name: String,
    pub start: String,
    pub trees: Vec<TreeSpec>,
}

/// Per-node annotations of an elementary tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAnnotation {
    pub role: NodeRole,
    pub obligatory: bool,
    /// `None` means the default: every label-compatible auxiliary tree, or
    /// nothing at a foot node.
    pub selective: Option<SelectiveSet>,
}

impl NodeAnnotation {
    /// The constraint actually in force at this node.
    pub fn effective_selective(&self) -> SelectiveSet {
        match (&self.selective, self.role) {
            (_, NodeRole::Foot) => SelectiveSet::None,
            (Some(s), _) => s.clone(),
            (None, _) => SelectiveSet::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryTree {
    pub name: String,
    pub kind: TreeKind,
    pub class: Option<AuxClass>,
    pub tree: SyntaxTree,
    pub annotations: BTreeMap<GornAddress, NodeAnnotation>,
}

impl ElementaryTree {
    pub fn initial(name: &str, root: NodeSpec) -> Result<Self, GrammarError> {
        Self::from_spec(&TreeSpec {
            name: name.to_string(),
            kind: TreeKind::Initial,
            class: None,
            root,
        })
    }

    pub fn auxiliary(name: &str, class: AuxClass, root: NodeSpec) -> Result<Self, GrammarError> {
        Self::from_spec(&TreeSpec {
            name: name.to_string(),
            kind: TreeKind::Auxiliary,
            class: Some(class),
            root,
        })
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<Self, GrammarError> {
        let mut labels = BTreeMap::new();
        let mut annotations = BTreeMap::new();
        fn walk(
            node: &NodeSpec,
            addr: GornAddress,
            labels: &mut BTreeMap<GornAddress, NodeLabel>,
            annotations: &mut BTreeMap<GornAddress, NodeAnnotation>,
        ) {
            let label = match node.role {
                NodeRole::Terminal => NodeLabel::Terminal(node.label.clone()),
                NodeRole::Epsilon => NodeLabel::Epsilon,
                NodeRole::Nonterminal | NodeRole::Foot | NodeRole::Subst => {
                    NodeLabel::Nonterminal(node.label.clone())
                }
            };
            labels.insert(addr.clone(), label);
            annotations.insert(
                addr.clone(),
                NodeAnnotation {
                    role: node.role,
                    obligatory: node.oa,
                    selective: node.sa.clone(),
                },
            );
            for (i, c) in node.children.iter().enumerate() {
                walk(c, addr.child(i as u32 + 1), labels, annotations);
            }
        }
        walk(
            &spec.root,
            GornAddress::root(),
            &mut labels,
            &mut annotations,
        );
        let tree = SyntaxTree::from_map(labels).map_err(|source| GrammarError::Tree {
            tree: spec.name.clone(),
            source,
        })?;
        Ok(ElementaryTree {
            name: spec.name.clone(),
            kind: spec.kind,
            class: spec.class,
            tree,
            annotations,
        })
    }

    pub fn to_spec(&self) -> TreeSpec {
        fn build(t: &ElementaryTree, addr: &GornAddress) -> NodeSpec {
            let ann = &t.annotations[addr];
            let label = t.tree.get(addr).unwrap().symbol().unwrap_or("").to_string();
            NodeSpec {
                label,
                role: ann.role,
                oa: ann.obligatory,
                sa: ann.selective.clone(),
                children: t.tree.children(addr).iter().map(|c| build(t, c)).collect(),
            }
        }
        TreeSpec {
            name: self.name.clone(),
            kind: self.kind,
            class: self.class,
            root: build(self, &GornAddress::root()),
        }
    }

    pub fn is_auxiliary(&self) -> bool {
        self.kind == TreeKind::Auxiliary
    }

    pub fn root_label(&self) -> &NodeLabel {
        self.tree.root_label()
    }

    /// Addresses of nodes marked as foot, in preorder.
    pub fn feet(&self) -> Vec<GornAddress> {
        self.annotations
            .iter()
            .filter(|(_, a)| a.role == NodeRole::Foot)
            .map(|(addr, _)| addr.clone())
            .collect()
    }

    pub fn foot(&self) -> Option<GornAddress> {
        self.feet().into_iter().next()
    }

    pub fn annotation(&self, addr: &GornAddress) -> Option<&NodeAnnotation> {
        self.annotations.get(addr)
    }

    pub fn is_substitution_site(&self, addr: &GornAddress) -> bool {
        self.annotation(addr)
            .is_some_and(|a| a.role == NodeRole::Subst)
    }

    pub fn is_foot(&self, addr: &GornAddress) -> bool {
        self.annotation(addr)
            .is_some_and(|a| a.role == NodeRole::Foot)
    }

    pub fn is_obligatory(&self, addr: &GornAddress) -> bool {
        self.annotation(addr).is_some_and(|a| a.obligatory)
    }

    /// True for nodes on the path from the root to the foot (inclusive).
    pub fn dominates_foot(&self, addr: &GornAddress) -> bool {
        self.foot().is_some_and(|f| addr.is_prefix_of(&f))
    }

    /// Substitution sites and the foot: the nonterminal leaves left open.
    pub fn open_leaves(&self) -> Vec<GornAddress> {
        self.annotations
            .iter()
            .filter(|(_, a)| matches!(a.role, NodeRole::Foot | NodeRole::Subst))
            .map(|(addr, _)| addr.clone())
            .collect()
    }
}

/// A node of an elementary tree, `tree@address`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub tree: String,
    pub address: GornAddress,
}

impl NodeRef {
    pub fn new(tree: impl Into<String>, address: GornAddress) -> Self {
        NodeRef {
            tree: tree.into(),
            address,
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.tree, self.address)
    }
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("unknown tree {0:?}")]
    UnknownTree(String),
    #[error("no node {0}")]
    UnknownNode(NodeRef),
    #[error("tree {tree}: {source}")]
    Tree {
        tree: String,
        #[source]
        source: TreeError,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("grammar is not valid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    DuplicateTreeName,
    VocabularyOverlap(String),
    UnknownSymbol(String),
    NoStartTree,
    MissingFoot,
    MultipleFeet,
    FootInInitialTree,
    FootNotFrontier,
    FootRootMismatch,
    FootAdjoinable,
    UnmarkedNonterminalLeaf,
    SubstitutionNotFrontier,
    ConstraintOnTerminal,
    UnknownSelectiveName(String),
    MissingClass,
    ClassOnInitialTree,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticKind::DuplicateTreeName => f.write_str("duplicate tree name"),
            DiagnosticKind::VocabularyOverlap(s) => {
                write!(f, "symbol {s:?} used as both terminal and nonterminal")
            }
            DiagnosticKind::UnknownSymbol(s) => write!(f, "label {s:?} outside the vocabulary"),
            DiagnosticKind::NoStartTree => {
                f.write_str("no initial tree rooted in the start symbol")
            }
            DiagnosticKind::MissingFoot => f.write_str("missing foot"),
            DiagnosticKind::MultipleFeet => f.write_str("more than one foot"),
            DiagnosticKind::FootInInitialTree => f.write_str("foot node in initial tree"),
            DiagnosticKind::FootNotFrontier => f.write_str("foot is not a frontier node"),
            DiagnosticKind::FootRootMismatch => f.write_str("foot/root label mismatch"),
            DiagnosticKind::FootAdjoinable => {
                f.write_str("foot carries an adjoining constraint other than none")
            }
            DiagnosticKind::UnmarkedNonterminalLeaf => {
                f.write_str("nonterminal leaf is neither foot nor substitution site")
            }
            DiagnosticKind::SubstitutionNotFrontier => {
                f.write_str("substitution marker on interior node")
            }
            DiagnosticKind::ConstraintOnTerminal => {
                f.write_str("adjoining constraint on terminal or empty node")
            }
            DiagnosticKind::UnknownSelectiveName(s) => {
                write!(
                    f,
                    "selective set names {s:?}, which is not an auxiliary tree"
                )
            }
            DiagnosticKind::MissingClass => {
                f.write_str("auxiliary tree lacks a predicative/modifier class")
            }
            DiagnosticKind::ClassOnInitialTree => f.write_str("initial tree carries a class"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub tree: Option<String>,
    pub address: Option<GornAddress>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.tree, &self.address) {
            (Some(t), Some(a)) => write!(f, "{t}@{a}: {}", self.kind),
            (Some(t), None) => write!(f, "{t}: {}", self.kind),
            _ => write!(f, "{}", self.kind),
        }
    }
}

/// A tree-adjoining grammar `⟨Σ, N, I, A, S⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TagGrammar {
    pub name: String,
    pub start: String,
    pub terminals: BTreeSet<String>,
    pub nonterminals: BTreeSet<String>,
    trees: Vec<ElementaryTree>,
    by_name: BTreeMap<String, usize>,
}

impl TagGrammar {
    /// Builds a grammar whose vocabulary is read off the tree labels.
    pub fn new(name: &str, start: &str, trees: Vec<ElementaryTree>) -> Self {
        let mut terminals = BTreeSet::new();
        let mut nonterminals = BTreeSet::new();
        nonterminals.insert(start.to_string());
        for t in &trees {
            for (_, label) in t.tree.iter() {
                match label {
                    NodeLabel::Terminal(s) => {
                        terminals.insert(s.clone());
                    }
                    NodeLabel::Nonterminal(s) => {
                        nonterminals.insert(s.clone());
                    }
                    NodeLabel::Epsilon => {}
                }
            }
        }
        Self::with_vocabulary(name, start, terminals, nonterminals, trees)
    }

    pub fn with_vocabulary(
        name: &str,
        start: &str,
        terminals: BTreeSet<String>,
        nonterminals: BTreeSet<String>,
        trees: Vec<ElementaryTree>,
    ) -> Self {
        let mut by_name = BTreeMap::new();
        for (i, t) in trees.iter().enumerate() {
            by_name.entry(t.name.clone()).or_insert(i);
        }
        TagGrammar {
            name: name.to_string(),
            start: start.to_string(),
            terminals,
            nonterminals,
            trees,
            by_name,
        }
    }

    pub fn from_spec(spec: &GrammarSpec) -> Result<Self, GrammarError> {
        let trees = spec
            .trees
            .iter()
            .map(ElementaryTree::from_spec)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(&spec.name, &spec.start, trees))
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let spec: GrammarSpec = serde_json::from_str(text).map_err(|e| GrammarError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GrammarSpec {
        GrammarSpec {
            name: self.name.clone(),
            start: self.start.clone(),
            trees: self.trees.iter().map(ElementaryTree::to_spec).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("grammar serializes")
    }

    /// Trees in declaration order.
    pub fn trees(&self) -> &[ElementaryTree] {
        &self.trees
    }

    /// Trees in name order.
    pub fn trees_by_name(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.by_name.values().map(|&i| &self.trees[i])
    }

    pub fn tree(&self, name: &str) -> Result<&ElementaryTree, GrammarError> {
        self.by_name
            .get(name)
            .map(|&i| &self.trees[i])
            .ok_or_else(|| GrammarError::UnknownTree(name.to_string()))
    }

    pub fn auxiliary_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.trees_by_name().filter(|t| t.is_auxiliary())
    }

    pub fn initial_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.trees_by_name().filter(|t| !t.is_auxiliary())
    }

    /// Initial trees whose root carries the start symbol.
    pub fn start_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        let start = NodeLabel::Nonterminal(self.start.clone());
        self.initial_trees()
            .filter(move |t| *t.root_label() == start)
    }

    pub fn label(&self, node: &NodeRef) -> Result<&NodeLabel, GrammarError> {
        self.tree(&node.tree)?
            .tree
            .get(&node.address)
            .ok_or_else(|| GrammarError::UnknownNode(node.clone()))
    }

    /// Whether auxiliary tree `beta` may adjoin at `node`.
    pub fn adjoinable(&self, node: &NodeRef, beta: &str) -> Result<bool, GrammarError> {
        let host = self.tree(&node.tree)?;
        let aux = self.tree(beta)?;
        let label = self.label(node)?;
        let ann = host.annotation(&node.address).unwrap();
        Ok(aux.is_auxiliary()
            && label.is_nonterminal()
            && label == aux.root_label()
            && ann.role != NodeRole::Subst
            && ann.role != NodeRole::Foot
            && ann.effective_selective().admits(beta))
    }

    /// Whether initial tree `alpha` may be substituted at `node`.
    pub fn substitutable(&self, node: &NodeRef, alpha: &str) -> Result<bool, GrammarError> {
        let host = self.tree(&node.tree)?;
        let init = self.tree(alpha)?;
        let label = self.label(node)?;
        Ok(!init.is_auxiliary()
            && host.is_substitution_site(&node.address)
            && label == init.root_label())
    }

    /// Every node of every tree, ordered by tree name then address.
    pub fn all_nodes(&self) -> Vec<NodeRef> {
        self.trees_by_name()
            .flat_map(|t| {
                t.tree
                    .addresses()
                    .map(|a| NodeRef::new(t.name.clone(), a.clone()))
            })
            .collect()
    }

    /// Checks every well-formedness condition; an empty result means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let diag = |tree: Option<&str>, address: Option<&GornAddress>, kind| Diagnostic {
            tree: tree.map(str::to_string),
            address: address.cloned(),
            kind,
        };

        for s in self.terminals.intersection(&self.nonterminals) {
            out.push(diag(
                None,
                None,
                DiagnosticKind::VocabularyOverlap(s.clone()),
            ));
        }
        let mut seen = BTreeSet::new();
        for t in &self.trees {
            if !seen.insert(t.name.as_str()) {
                out.push(diag(Some(&t.name), None, DiagnosticKind::DuplicateTreeName));
            }
        }
        if self.start_trees().next().is_none() {
            out.push(diag(None, None, DiagnosticKind::NoStartTree));
        }
        let aux_names: BTreeSet<&str> = self
            .trees
            .iter()
            .filter(|t| t.is_auxiliary())
            .map(|t| t.name.as_str())
            .collect();

        for t in &self.trees {
            let name = Some(t.name.as_str());
            let feet = t.feet();
            match t.kind {
                TreeKind::Auxiliary => {
                    match feet.len() {
                        0 => out.push(diag(name, None, DiagnosticKind::MissingFoot)),
                        1 => {}
                        _ => out.push(diag(name, None, DiagnosticKind::MultipleFeet)),
                    }
                    if let Some(f) = feet.first() {
                        if t.tree.get(f) != Some(t.root_label()) {
                            out.push(diag(name, Some(f), DiagnosticKind::FootRootMismatch));
                        }
                    }
                    if t.class.is_none() {
                        out.push(diag(name, None, DiagnosticKind::MissingClass));
                    }
                }
                TreeKind::Initial => {
                    for f in &feet {
                        out.push(diag(name, Some(f), DiagnosticKind::FootInInitialTree));
                    }
                    if t.class.is_some() {
                        out.push(diag(name, None, DiagnosticKind::ClassOnInitialTree));
                    }
                }
            }
            for (addr, label) in t.tree.iter() {
                let ann = &t.annotations[addr];
                let frontier = t.tree.is_frontier(addr);
                match label {
                    NodeLabel::Terminal(s) if !self.terminals.contains(s) => out.push(diag(
                        name,
                        Some(addr),
                        DiagnosticKind::UnknownSymbol(s.clone()),
                    )),
                    NodeLabel::Nonterminal(s) if !self.nonterminals.contains(s) => out.push(diag(
                        name,
                        Some(addr),
                        DiagnosticKind::UnknownSymbol(s.clone()),
                    )),
                    _ => {}
                }
                match ann.role {
                    NodeRole::Foot => {
                        if !frontier {
                            out.push(diag(name, Some(addr), DiagnosticKind::FootNotFrontier));
                        }
                        if ann.obligatory
                            || matches!(&ann.selective, Some(s) if *s != SelectiveSet::None)
                        {
                            out.push(diag(name, Some(addr), DiagnosticKind::FootAdjoinable));
                        }
                    }
                    NodeRole::Subst if !frontier => out.push(diag(
                        name,
                        Some(addr),
                        DiagnosticKind::SubstitutionNotFrontier,
                    )),
                    NodeRole::Nonterminal if frontier => out.push(diag(
                        name,
                        Some(addr),
                        DiagnosticKind::UnmarkedNonterminalLeaf,
                    )),
                    NodeRole::Terminal | NodeRole::Epsilon
                        if ann.obligatory || ann.selective.is_some() =>
                    {
                        out.push(diag(name, Some(addr), DiagnosticKind::ConstraintOnTerminal))
                    }
                    _ => {}
                }
                if let Some(SelectiveSet::Only(names)) = &ann.selective {
                    for n in names {
                        if !aux_names.contains(n.as_str()) {
                            out.push(diag(
                                name,
                                Some(addr),
                                DiagnosticKind::UnknownSelectiveName(n.clone()),
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), GrammarError> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(GrammarError::Invalid(d))
        }
    }
}
