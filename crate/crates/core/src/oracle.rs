//! Exhaustive enumeration of well-formed derivations up to a node bound.
//!
//! Generation works on canonical representatives (sibling lists sorted by
//! address, same-address order free), which is one tree per equivalence
//! class. [`enumerate`] expands those into every admitted ordering.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::address::GornAddress;
use crate::derivation::{
    canonicalize, derive, well_formed, DerivationError, DerivationMode, Operation,
    OrderedDerivationTree,
};
use crate::grammar::{AuxClass, GrammarError, NodeRef, TagGrammar};
use crate::tree::NodeLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_nodes: usize,
    pub max_len: usize,
}

impl EnumBounds {
    pub fn new(max_nodes: usize, max_len: usize) -> Self {
        assert!(max_nodes >= 1 && max_len >= 1, "bounds must be positive");
        EnumBounds { max_nodes, max_len }
    }
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds::new(6, 10)
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// Whether a string is derivable, as far as the bound can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Derivable,
    /// No derivation of any size yields the string.
    Rejected,
    /// No derivation within the node bound yields it; larger ones might.
    NoneWithinBound,
}

#[derive(Debug, Clone)]
struct Site {
    at: GornAddress,
    subst: Vec<String>,
    adjoin: Vec<(String, AuxClass)>,
}

struct Generator<'g> {
    g: &'g TagGrammar,
    mode: DerivationMode,
    sites: HashMap<String, Rc<Vec<Site>>>,
    memo: HashMap<(String, usize), Rc<Vec<OrderedDerivationTree>>>,
}

impl<'g> Generator<'g> {
    fn sites(&mut self, tree: &str) -> Result<Rc<Vec<Site>>, OracleError> {
        if let Some(s) = self.sites.get(tree) {
            return Ok(s.clone());
        }
        let et = self.g.tree(tree)?;
        let mut out = Vec::new();
        for (at, label) in et.tree.iter() {
            if !matches!(label, NodeLabel::Nonterminal(_)) {
                continue;
            }
            let node = NodeRef::new(tree, at.clone());
            let mut site = Site {
                at: at.clone(),
                subst: Vec::new(),
                adjoin: Vec::new(),
            };
            for cand in self.g.trees() {
                if cand.is_auxiliary() {
                    if self.g.adjoinable(&node, &cand.name)? {
                        site.adjoin.push((
                            cand.name.clone(),
                            cand.class.unwrap_or(AuxClass::Predicative),
                        ));
                    }
                } else if self.g.substitutable(&node, &cand.name)? {
                    site.subst.push(cand.name.clone());
                }
            }
            if !site.subst.is_empty() || !site.adjoin.is_empty() {
                out.push(site);
            }
        }
        out.sort_by(|a, b| a.at.cmp(&b.at));
        let out = Rc::new(out);
        self.sites.insert(tree.to_string(), out.clone());
        Ok(out)
    }

    /// Canonical derivations rooted at `tree` with at most `budget` nodes.
    fn gen(
        &mut self,
        tree: &str,
        budget: usize,
    ) -> Result<Rc<Vec<OrderedDerivationTree>>, OracleError> {
        if budget == 0 {
            return Ok(Rc::new(Vec::new()));
        }
        let key = (tree.to_string(), budget);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let sites = self.sites(tree)?;
        let mut out = Vec::new();
        let mut ops = Vec::new();
        self.fill(tree, &sites, 0, budget - 1, &mut ops, &mut out)?;
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn fill(
        &mut self,
        tree: &str,
        sites: &[Site],
        idx: usize,
        remaining: usize,
        ops: &mut Vec<Operation>,
        out: &mut Vec<OrderedDerivationTree>,
    ) -> Result<(), OracleError> {
        let Some(site) = sites.get(idx) else {
            out.push(OrderedDerivationTree::new(tree, ops.clone()));
            return Ok(());
        };
        self.fill(tree, sites, idx + 1, remaining, ops, out)?;
        for c in &site.subst {
            for d in self.gen(c, remaining)?.iter() {
                ops.push(Operation::subst(site.at.clone(), d.clone()));
                self.fill(tree, sites, idx + 1, remaining - d.size(), ops, out)?;
                ops.pop();
            }
        }
        self.adjoin_run(tree, sites, idx, remaining, ops, out)
    }

    /// Extends the run of adjunctions at `sites[idx]` by one more tree.
    fn adjoin_run(
        &mut self,
        tree: &str,
        sites: &[Site],
        idx: usize,
        remaining: usize,
        ops: &mut Vec<Operation>,
        out: &mut Vec<OrderedDerivationTree>,
    ) -> Result<(), OracleError> {
        let site = &sites[idx];
        for (beta, class) in &site.adjoin {
            for d in self.gen(beta, remaining)?.iter() {
                let left = remaining - d.size();
                ops.push(Operation::adjoin(site.at.clone(), d.clone()));
                self.fill(tree, sites, idx + 1, left, ops, out)?;
                if self.mode == DerivationMode::Extended && *class == AuxClass::Modifier {
                    self.adjoin_run(tree, sites, idx, left, ops, out)?;
                }
                ops.pop();
            }
        }
        Ok(())
    }
}

/// Ground-truth derivation sets for one grammar, mode and bound.
pub struct Oracle {
    bounds: EnumBounds,
    lexicalized: bool,
    /// Canonical well-formed derivations with their frontiers, sorted.
    entries: Vec<(OrderedDerivationTree, Vec<String>)>,
}

impl Oracle {
    pub fn new(
        g: &TagGrammar,
        mode: DerivationMode,
        bounds: EnumBounds,
    ) -> Result<Self, OracleError> {
        g.ensure_valid()?;
        let mut gen = Generator {
            g,
            mode,
            sites: HashMap::new(),
            memo: HashMap::new(),
        };
        let mut entries = Vec::new();
        let starts: Vec<String> = g.start_trees().map(|t| t.name.clone()).collect();
        for s in starts {
            for d in gen.gen(&s, bounds.max_nodes)?.iter() {
                if !well_formed(d, g, mode)? {
                    continue;
                }
                let frontier =
                    derive(d, g)?
                        .frontier_string()
                        .map_err(|e| DerivationError::Tree {
                            path: d.tree.clone(),
                            source: e,
                        })?;
                if frontier.len() <= bounds.max_len {
                    entries.push((d.clone(), frontier));
                }
            }
        }
        entries.sort();
        let lexicalized = g.trees().iter().all(|t| {
            t.tree
                .iter()
                .any(|(_, label)| matches!(label, NodeLabel::Terminal(_)))
        });
        Ok(Oracle {
            bounds,
            lexicalized,
            entries,
        })
    }

    pub fn bounds(&self) -> EnumBounds {
        self.bounds
    }

    /// One canonical representative per equivalence class, sorted.
    pub fn classes(&self) -> impl Iterator<Item = &OrderedDerivationTree> {
        self.entries.iter().map(|(d, _)| d)
    }

    /// Every admitted ordering of every class, sorted.
    pub fn all_orderings(&self) -> Vec<OrderedDerivationTree> {
        let mut out: Vec<OrderedDerivationTree> = self.classes().flat_map(orderings).collect();
        out.sort();
        out
    }

    pub fn language(&self) -> BTreeSet<Vec<String>> {
        self.entries.iter().map(|(_, w)| w.clone()).collect()
    }

    pub fn derivations_for(&self, w: &[String]) -> Vec<OrderedDerivationTree> {
        self.entries
            .iter()
            .filter(|(_, f)| f == w)
            .map(|(d, _)| d.clone())
            .collect()
    }

    /// Whether the bound provably covers every derivation of a string of
    /// length `len`: each elementary tree contributes a terminal, so such a
    /// derivation has at most `len` nodes.
    pub fn exact_for_len(&self, len: usize) -> bool {
        self.lexicalized && len <= self.bounds.max_nodes && len <= self.bounds.max_len
    }

    pub fn membership(&self, w: &[String]) -> Membership {
        if self.entries.iter().any(|(_, f)| f == w) {
            Membership::Derivable
        } else if self.exact_for_len(w.len()) {
            Membership::Rejected
        } else {
            Membership::NoneWithinBound
        }
    }
}

/// All orderings of `d` that keep each address's operations in sequence.
pub fn orderings(d: &OrderedDerivationTree) -> Vec<OrderedDerivationTree> {
    let d = canonicalize(d);
    // each child's own orderings
    let mut child_opts: Vec<Vec<Operation>> = Vec::new();
    for c in &d.children {
        child_opts.push(
            orderings(&c.child)
                .into_iter()
                .map(|child| Operation {
                    at: c.at.clone(),
                    op: c.op,
                    child,
                })
                .collect(),
        );
    }
    let mut groups: BTreeMap<&GornAddress, Vec<usize>> = BTreeMap::new();
    for (i, c) in d.children.iter().enumerate() {
        groups.entry(&c.at).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut shuffles = Vec::new();
    interleave(
        &groups,
        &mut vec![0; groups.len()],
        &mut Vec::new(),
        &mut shuffles,
    );

    let mut out = Vec::new();
    for order in shuffles {
        let mut partial: Vec<Vec<Operation>> = vec![Vec::new()];
        for &i in &order {
            let mut next = Vec::new();
            for p in &partial {
                for op in &child_opts[i] {
                    let mut q = p.clone();
                    q.push(op.clone());
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|children| OrderedDerivationTree {
            tree: d.tree.clone(),
            children,
        }));
    }
    out
}

fn interleave(
    groups: &[Vec<usize>],
    pos: &mut Vec<usize>,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let mut progressed = false;
    for g in 0..groups.len() {
        if pos[g] < groups[g].len() {
            progressed = true;
            cur.push(groups[g][pos[g]]);
            pos[g] += 1;
            interleave(groups, pos, cur, out);
            pos[g] -= 1;
            cur.pop();
        }
    }
    if !progressed {
        out.push(cur.clone());
    }
}

/// Every well-formed ordered derivation within the bounds, sorted.
pub fn enumerate(
    g: &TagGrammar,
    mode: DerivationMode,
    bounds: EnumBounds,
) -> Result<Vec<OrderedDerivationTree>, OracleError> {
    Ok(Oracle::new(g, mode, bounds)?.all_orderings())
}

pub fn language_sample(
    g: &TagGrammar,
    mode: DerivationMode,
    bounds: EnumBounds,
) -> Result<BTreeSet<Vec<String>>, OracleError> {
    Ok(Oracle::new(g, mode, bounds)?.language())
}

pub fn derivations_for(
    g: &TagGrammar,
    mode: DerivationMode,
    bounds: EnumBounds,
    w: &[String],
) -> Result<Vec<OrderedDerivationTree>, OracleError> {
    Ok(Oracle::new(g, mode, bounds)?.derivations_for(w))
}
