//! Compilation of a TAG into linear indexed grammar productions.
//!
//! Every elementary-tree node becomes a stack index. Each node has a top
//! (`t`) and a bottom (`b`) nonterminal; adjunction is the move from the top
//! of a node to the top of an auxiliary root (pushing the root index), and
//! back from the bottom of the foot to the bottom of the node (popping it).
//! In extended mode, modifier adjunction starts from the bottom of the node
//! instead, so modifiers can loop any number of times below a single
//! predicative adjunction.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::address::GornAddress;
use crate::derivation::DerivationMode;
use crate::grammar::{AuxClass, GrammarError, NodeRef, NodeRole, TagGrammar, TreeKind};
use crate::tree::NodeLabel;

/// Index of a grammar node within a compiled rule set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone)]
pub struct NodeInfo {
    pub node: NodeRef,
    pub label: NodeLabel,
    pub kind: TreeKind,
    pub class: Option<AuxClass>,
    pub is_root: bool,
    pub is_foot: bool,
    /// The node dominates (or is) the foot of its auxiliary tree.
    pub on_spine: bool,
    /// Foot node of the tree this node belongs to.
    pub tree_foot: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Top,
    Bottom,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Top => "t",
            Polarity::Bottom => "b",
        })
    }
}

/// `[η]` (bounded) or `[..η₁η₂]` (inherits the rest of the parent's stack).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StackSpec {
    pub inherits: bool,
    pub indices: Vec<NodeId>,
}

impl StackSpec {
    fn bounded(n: NodeId) -> Self {
        StackSpec {
            inherits: false,
            indices: vec![n],
        }
    }

    fn inherit(indices: Vec<NodeId>) -> Self {
        StackSpec {
            inherits: true,
            indices,
        }
    }

    pub fn top(&self) -> NodeId {
        *self.indices.last().expect("stack spec is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LigNonterminal {
    pub polarity: Polarity,
    pub stack: StackSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RhsElem {
    Terminal(String),
    Nt(LigNonterminal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LigLhs {
    Start,
    Nt(LigNonterminal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleType {
    Start,
    /// Immediate domination dominating foot.
    T1,
    /// Immediate domination not including foot.
    T2,
    /// No adjunction.
    T3,
    /// Start root of predicative adjunction (all adjunctions in standard mode).
    T4a,
    /// Start root of modifier adjunction.
    T4b,
    /// Start foot of adjunction.
    T5,
    /// Start substitution.
    T6,
}

impl fmt::Display for RuleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleType::Start => "start",
            RuleType::T1 => "1",
            RuleType::T2 => "2",
            RuleType::T3 => "3",
            RuleType::T4a => "4a",
            RuleType::T4b => "4b",
            RuleType::T5 => "5",
            RuleType::T6 => "6",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LigProduction {
    pub rule_type: RuleType,
    pub lhs: LigLhs,
    pub rhs: Vec<RhsElem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReducedLhs {
    Start,
    Nt(Polarity, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReducedSym {
    Terminal(String),
    Nt(Polarity, NodeId),
}

/// A production with every stack cut down to its top index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedRule {
    pub lhs: ReducedLhs,
    pub rhs: Vec<ReducedSym>,
    /// Index of the production this rule reduces.
    pub production: usize,
}

#[derive(Debug, Error)]
pub enum LigError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("reduced rule is not in the compiled set")]
    NotInSet,
}

/// A compiled rule set together with its node table.
#[derive(Debug, Clone)]
pub struct Lig {
    pub mode: DerivationMode,
    nodes: Vec<NodeInfo>,
    node_ids: HashMap<NodeRef, NodeId>,
    productions: Vec<LigProduction>,
    reduced: Vec<ReducedRule>,
    by_reduced: HashMap<(ReducedLhs, Vec<ReducedSym>), usize>,
    by_lhs: HashMap<ReducedLhs, Vec<usize>>,
    terminals: BTreeSet<String>,
}

/// Drops every stack index except the top one.
pub fn reduce(p: &LigProduction, production: usize) -> ReducedRule {
    let lhs = match &p.lhs {
        LigLhs::Start => ReducedLhs::Start,
        LigLhs::Nt(n) => ReducedLhs::Nt(n.polarity, n.stack.top()),
    };
    let rhs = p
        .rhs
        .iter()
        .map(|e| match e {
            RhsElem::Terminal(s) => ReducedSym::Terminal(s.clone()),
            RhsElem::Nt(n) => ReducedSym::Nt(n.polarity, n.stack.top()),
        })
        .collect();
    ReducedRule {
        lhs,
        rhs,
        production,
    }
}

pub fn compile(g: &TagGrammar, mode: DerivationMode) -> Result<Lig, LigError> {
    g.ensure_valid()?;
    let mut nodes = Vec::new();
    let mut node_ids = HashMap::new();
    for nr in g.all_nodes() {
        let t = g.tree(&nr.tree)?;
        let id = NodeId(nodes.len() as u32);
        node_ids.insert(nr.clone(), id);
        nodes.push(NodeInfo {
            label: t.tree.get(&nr.address).unwrap().clone(),
            kind: t.kind,
            class: t.class,
            is_root: nr.address.is_root(),
            is_foot: t.is_foot(&nr.address),
            on_spine: t.dominates_foot(&nr.address),
            tree_foot: None,
            node: nr,
        });
    }
    for info in nodes.iter_mut() {
        let t = g.tree(&info.node.tree)?;
        info.tree_foot = t.foot().map(|f| node_ids[&NodeRef::new(t.name.clone(), f)]);
    }

    let id = |tree: &str, addr: &GornAddress| node_ids[&NodeRef::new(tree, addr.clone())];
    let nt = |polarity, stack| LigNonterminal { polarity, stack };

    let mut productions = Vec::new();
    for t in g.start_trees() {
        productions.push(LigProduction {
            rule_type: RuleType::Start,
            lhs: LigLhs::Start,
            rhs: vec![RhsElem::Nt(nt(
                Polarity::Top,
                StackSpec::bounded(id(&t.name, &GornAddress::root())),
            ))],
        });
    }

    for (idx, info) in nodes.iter().enumerate() {
        let eta = NodeId(idx as u32);
        if !info.label.is_nonterminal() {
            continue;
        }
        let elem = g.tree(&info.node.tree)?;
        let addr = &info.node.address;
        let role = elem.annotation(addr).unwrap().role;
        let mut local = Vec::new();

        let children = elem.tree.children(addr);
        if !children.is_empty() {
            let rhs = children
                .iter()
                .filter_map(|c| {
                    let label = elem.tree.get(c).unwrap();
                    match label {
                        NodeLabel::Terminal(s) => Some(RhsElem::Terminal(s.clone())),
                        NodeLabel::Epsilon => None,
                        NodeLabel::Nonterminal(_) => {
                            let cid = id(&elem.name, c);
                            let stack = if info.on_spine && nodes[cid.0 as usize].on_spine {
                                StackSpec::inherit(vec![cid])
                            } else {
                                StackSpec::bounded(cid)
                            };
                            Some(RhsElem::Nt(nt(Polarity::Top, stack)))
                        }
                    }
                })
                .collect();
            let (rule_type, stack) = if info.on_spine {
                (RuleType::T1, StackSpec::inherit(vec![eta]))
            } else {
                (RuleType::T2, StackSpec::bounded(eta))
            };
            local.push(LigProduction {
                rule_type,
                lhs: LigLhs::Nt(nt(Polarity::Bottom, stack)),
                rhs,
            });
        }

        if role != NodeRole::Subst && !elem.is_obligatory(addr) {
            local.push(LigProduction {
                rule_type: RuleType::T3,
                lhs: LigLhs::Nt(nt(Polarity::Top, StackSpec::inherit(vec![eta]))),
                rhs: vec![RhsElem::Nt(nt(
                    Polarity::Bottom,
                    StackSpec::inherit(vec![eta]),
                ))],
            });
        }

        for beta in g.auxiliary_trees() {
            if !g.adjoinable(&info.node, &beta.name)? {
                continue;
            }
            let root = id(&beta.name, &GornAddress::root());
            let foot = id(
                &beta.name,
                &beta.foot().expect("validated auxiliary tree has a foot"),
            );
            let modifier_loop =
                mode == DerivationMode::Extended && beta.class == Some(AuxClass::Modifier);
            let (rule_type, lhs_polarity) = if modifier_loop {
                (RuleType::T4b, Polarity::Bottom)
            } else {
                (RuleType::T4a, Polarity::Top)
            };
            local.push(LigProduction {
                rule_type,
                lhs: LigLhs::Nt(nt(lhs_polarity, StackSpec::inherit(vec![eta]))),
                rhs: vec![RhsElem::Nt(nt(
                    Polarity::Top,
                    StackSpec::inherit(vec![eta, root]),
                ))],
            });
            local.push(LigProduction {
                rule_type: RuleType::T5,
                lhs: LigLhs::Nt(nt(Polarity::Bottom, StackSpec::inherit(vec![eta, foot]))),
                rhs: vec![RhsElem::Nt(nt(
                    Polarity::Bottom,
                    StackSpec::inherit(vec![eta]),
                ))],
            });
        }

        if role == NodeRole::Subst {
            for alpha in g.initial_trees() {
                if g.substitutable(&info.node, &alpha.name)? {
                    let root = id(&alpha.name, &GornAddress::root());
                    local.push(LigProduction {
                        rule_type: RuleType::T6,
                        lhs: LigLhs::Nt(nt(Polarity::Top, StackSpec::bounded(eta))),
                        rhs: vec![RhsElem::Nt(nt(Polarity::Top, StackSpec::bounded(root)))],
                    });
                }
            }
        }

        local.sort_by_key(|p| p.rule_type);
        productions.extend(local);
    }

    Ok(Lig::from_parts(
        mode,
        nodes,
        node_ids,
        productions,
        g.terminals.clone(),
    ))
}

impl Lig {
    fn from_parts(
        mode: DerivationMode,
        nodes: Vec<NodeInfo>,
        node_ids: HashMap<NodeRef, NodeId>,
        productions: Vec<LigProduction>,
        terminals: BTreeSet<String>,
    ) -> Self {
        let reduced: Vec<ReducedRule> = productions
            .iter()
            .enumerate()
            .map(|(i, p)| reduce(p, i))
            .collect();
        let mut by_reduced = HashMap::new();
        let mut by_lhs: HashMap<ReducedLhs, Vec<usize>> = HashMap::new();
        for r in &reduced {
            by_reduced.insert((r.lhs, r.rhs.clone()), r.production);
            by_lhs.entry(r.lhs).or_default().push(r.production);
        }
        Lig {
            mode,
            nodes,
            node_ids,
            productions,
            reduced,
            by_reduced,
            by_lhs,
            terminals,
        }
    }

    pub fn productions(&self) -> &[LigProduction] {
        &self.productions
    }

    pub fn reduced_rules(&self) -> &[ReducedRule] {
        &self.reduced
    }

    pub fn reduced(&self, rule: usize) -> &ReducedRule {
        &self.reduced[rule]
    }

    pub fn rule_type(&self, rule: usize) -> RuleType {
        self.productions[rule].rule_type
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeInfo {
        &self.nodes[id.0 as usize]
    }

    pub fn node_id(&self, node: &NodeRef) -> Option<NodeId> {
        self.node_ids.get(node).copied()
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    /// Rules whose reduced left side is `lhs`.
    pub fn rules_for(&self, lhs: ReducedLhs) -> &[usize] {
        self.by_lhs.get(&lhs).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The production whose reduced form is `r`.
    pub fn unreduce(&self, r: &ReducedRule) -> Result<&LigProduction, LigError> {
        self.by_reduced
            .get(&(r.lhs, r.rhs.clone()))
            .map(|&i| &self.productions[i])
            .ok_or(LigError::NotInSet)
    }

    pub fn index_to_string(&self, id: NodeId) -> String {
        self.node(id).node.to_string()
    }

    pub fn nonterminal_to_string(&self, n: &LigNonterminal) -> String {
        let idx: Vec<String> = n
            .stack
            .indices
            .iter()
            .map(|&i| self.index_to_string(i))
            .collect();
        format!(
            "{}[{}{}]",
            n.polarity,
            if n.stack.inherits { ".." } else { "" },
            idx.join(" ")
        )
    }

    pub fn production_to_string(&self, p: &LigProduction) -> String {
        let lhs = match &p.lhs {
            LigLhs::Start => "S".to_string(),
            LigLhs::Nt(n) => self.nonterminal_to_string(n),
        };
        let rhs: Vec<String> = p
            .rhs
            .iter()
            .map(|e| match e {
                RhsElem::Terminal(s) => format!("'{s}'"),
                RhsElem::Nt(n) => self.nonterminal_to_string(n),
            })
            .collect();
        let rhs = if rhs.is_empty() {
            "<eps>".to_string()
        } else {
            rhs.join(" ")
        };
        format!("{lhs} -> {rhs} # type={}", p.rule_type)
    }

    pub fn reduced_sym_to_string(&self, s: &ReducedSym) -> String {
        match s {
            ReducedSym::Terminal(t) => format!("'{t}'"),
            ReducedSym::Nt(p, n) => format!("{p}[{}]", self.index_to_string(*n)),
        }
    }

    pub fn reduced_lhs_to_string(&self, l: &ReducedLhs) -> String {
        match l {
            ReducedLhs::Start => "S".to_string(),
            ReducedLhs::Nt(p, n) => format!("{p}[{}]", self.index_to_string(*n)),
        }
    }

    /// One production per line, in emission order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.productions {
            out.push_str(&self.production_to_string(p));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lines(lig: &Lig) -> Vec<String> {
        lig.dump().lines().map(str::to_string).collect()
    }

    #[test]
    fn rule1_for_modifier_root() {
        let lig = compile(
            &fixtures::adjectives(DerivationMode::Extended),
            DerivationMode::Extended,
        )
        .unwrap();
        assert!(
            lines(&lig).contains(&"b[..beta_re@e] -> 'red' t[..beta_re@2] # type=1".to_string())
        );
    }

    #[test]
    fn extended_rule4b_and_rule5() {
        let lig = compile(
            &fixtures::adjectives(DerivationMode::Extended),
            DerivationMode::Extended,
        )
        .unwrap();
        let l = lines(&lig);
        assert!(l.contains(&"b[..alpha_pe@1] -> t[..alpha_pe@1 beta_re@e] # type=4b".to_string()));
        assert!(l.contains(&"b[..alpha_pe@1 beta_re@2] -> b[..alpha_pe@1] # type=5".to_string()));
        assert!(!l.iter().any(|s| s.ends_with("type=4a")));
    }

    #[test]
    fn standard_rule4a() {
        let g = fixtures::adjectives(DerivationMode::Extended);
        let lig = compile(&g, DerivationMode::Standard).unwrap();
        assert!(lines(&lig)
            .contains(&"t[..alpha_pe@1] -> t[..alpha_pe@1 beta_re@e] # type=4a".to_string()));
    }

    #[test]
    fn full_extended_dump_for_pepper_tree() {
        let lig = compile(
            &fixtures::adjectives(DerivationMode::Extended),
            DerivationMode::Extended,
        )
        .unwrap();
        let l = lines(&lig);
        let expected = [
            "S -> t[alpha_pe@e] # type=start",
            "S -> t[alpha_po@e] # type=start",
            "b[alpha_pe@e] -> t[alpha_pe@1] # type=2",
            "t[..alpha_pe@e] -> b[..alpha_pe@e] # type=3",
            "b[alpha_pe@1] -> 'pepper' # type=2",
            "t[..alpha_pe@1] -> b[..alpha_pe@1] # type=3",
            "b[..alpha_pe@1] -> t[..alpha_pe@1 beta_b@e] # type=4b",
            "b[..alpha_pe@1] -> t[..alpha_pe@1 beta_re@e] # type=4b",
            "b[..alpha_pe@1] -> t[..alpha_pe@1 beta_ro@e] # type=4b",
            "b[..alpha_pe@1 beta_b@2] -> b[..alpha_pe@1] # type=5",
            "b[..alpha_pe@1 beta_re@2] -> b[..alpha_pe@1] # type=5",
            "b[..alpha_pe@1 beta_ro@2] -> b[..alpha_pe@1] # type=5",
        ];
        assert_eq!(&l[..expected.len()], &expected);
    }

    #[test]
    fn modes_differ_only_in_rule4_polarity() {
        let g = fixtures::adjectives_with_root_adjunction(true);
        let std = compile(&g, DerivationMode::Standard).unwrap();
        let ext = compile(&g, DerivationMode::Extended).unwrap();
        assert_eq!(std.productions().len(), ext.productions().len());
        for (s, e) in std.productions().iter().zip(ext.productions()) {
            if s == e {
                continue;
            }
            assert_eq!((s.rule_type, e.rule_type), (RuleType::T4a, RuleType::T4b));
            assert_eq!(s.rhs, e.rhs);
            match (&s.lhs, &e.lhs) {
                (LigLhs::Nt(a), LigLhs::Nt(b)) => {
                    assert_eq!((a.polarity, b.polarity), (Polarity::Top, Polarity::Bottom));
                    assert_eq!(a.stack, b.stack);
                }
                _ => panic!("rule 4 has a node on the left"),
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let g = fixtures::adjectives(DerivationMode::Extended);
        let lig = compile(&g, DerivationMode::Standard).unwrap();
        let eta = lig
            .node_id(&NodeRef::new("alpha_pe", GornAddress::from_slice(&[1])))
            .unwrap();
        let root = lig
            .node_id(&NodeRef::new("beta_re", GornAddress::root()))
            .unwrap();
        let p = lig
            .productions()
            .iter()
            .enumerate()
            .find(|(_, p)| {
                p.rule_type == RuleType::T4a
                    && p.rhs.len() == 1
                    && matches!(&p.rhs[0], RhsElem::Nt(n) if n.stack.indices == vec![eta, root])
            })
            .unwrap();
        let r = reduce(p.1, p.0);
        assert_eq!(r.lhs, ReducedLhs::Nt(Polarity::Top, eta));
        assert_eq!(r.rhs, vec![ReducedSym::Nt(Polarity::Top, root)]);
        assert_eq!(lig.unreduce(&r).unwrap(), p.1);

        let t3 = ReducedRule {
            lhs: ReducedLhs::Nt(Polarity::Top, eta),
            rhs: vec![ReducedSym::Nt(Polarity::Bottom, eta)],
            production: 0,
        };
        assert_eq!(lig.unreduce(&t3).unwrap().rule_type, RuleType::T3);

        let bogus = ReducedRule {
            lhs: ReducedLhs::Nt(Polarity::Bottom, root),
            rhs: vec![],
            production: 0,
        };
        assert!(matches!(lig.unreduce(&bogus), Err(LigError::NotInSet)));
    }

    #[test]
    fn reduction_is_a_bijection() {
        for mode in [DerivationMode::Standard, DerivationMode::Extended] {
            for g in [fixtures::adjectives(mode), fixtures::clauses()] {
                let lig = compile(&g, mode).unwrap();
                let mut seen = std::collections::HashSet::new();
                for r in lig.reduced_rules() {
                    assert!(seen.insert((r.lhs, r.rhs.clone())));
                    assert_eq!(lig.unreduce(r).unwrap(), &lig.productions()[r.production]);
                }
            }
        }
    }

    #[test]
    fn obligatory_and_substitution_nodes_get_no_rule3() {
        let g = fixtures::clauses();
        let lig = compile(&g, DerivationMode::Extended).unwrap();
        let l = lines(&lig);
        assert!(!l.iter().any(|s| s.starts_with("t[..alpha_sleeps@1] -> b")));
        assert!(l.contains(&"t[alpha_sleeps@1] -> t[alpha_john@e] # type=6".to_string()));
        assert!(l.contains(
            &"b[..beta_thinks@e] -> t[beta_thinks@1] t[..beta_thinks@2] # type=1".to_string()
        ));
        assert!(
            l.contains(&"b[..beta_thinks@2] -> 'thinks' t[..beta_thinks@2.2] # type=1".to_string())
        );
    }

    #[test]
    fn unvalidated_grammar_is_rejected() {
        let g = TagGrammar::new("empty", "S", vec![]);
        assert!(matches!(
            compile(&g, DerivationMode::Extended),
            Err(LigError::Grammar(_))
        ));
    }
}
