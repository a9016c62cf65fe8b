//! Seeded generation of small random grammars and derivations for tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::derivation::{well_formed, DerivationMode, OrderedDerivationTree};
use crate::grammar::{AuxClass, ElementaryTree, NodeRole, NodeSpec, SelectiveSet, TagGrammar};
use crate::oracle::{EnumBounds, Oracle};

const NONTERMINALS: [&str; 2] = ["S", "A"];
const TERMINALS: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone, Copy)]
pub struct RandomGrammarConfig {
    pub max_trees: usize,
    pub max_depth: usize,
    /// No selective or obligatory constraints anywhere.
    pub constraint_free: bool,
    pub substitution: bool,
}

impl Default for RandomGrammarConfig {
    fn default() -> Self {
        RandomGrammarConfig {
            max_trees: 4,
            max_depth: 3,
            constraint_free: false,
            substitution: true,
        }
    }
}

impl RandomGrammarConfig {
    pub fn constraint_free() -> Self {
        RandomGrammarConfig {
            constraint_free: true,
            ..Self::default()
        }
    }
}

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    cfg: RandomGrammarConfig,
    /// Labels that head some initial tree, usable as substitution sites.
    subst_labels: Vec<&'static str>,
}

impl Builder<'_> {
    fn label(&mut self) -> &'static str {
        NONTERMINALS.choose(self.rng).unwrap()
    }

    fn leaf(&mut self) -> NodeSpec {
        let roll: f64 = self.rng.gen();
        if self.cfg.substitution && roll < 0.15 && !self.subst_labels.is_empty() {
            NodeSpec::subst(self.subst_labels.choose(self.rng).unwrap())
        } else if roll < 0.2 {
            NodeSpec::epsilon()
        } else {
            NodeSpec::term(TERMINALS.choose(self.rng).unwrap())
        }
    }

    fn subtree(&mut self, depth: usize) -> NodeSpec {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return self.leaf();
        }
        let label = self.label();
        let n = self.rng.gen_range(1..=2);
        let children = (0..n).map(|_| self.subtree(depth - 1)).collect();
        NodeSpec::nt(label, children)
    }

    fn interior(&mut self, label: &str, depth: usize) -> NodeSpec {
        let n = self.rng.gen_range(1..=2);
        let children = (0..n)
            .map(|_| self.subtree(depth.saturating_sub(1)))
            .collect();
        NodeSpec::nt(label, children)
    }

    /// An interior node at `depth > 0` whose subtree holds the foot.
    fn spine(&mut self, label: &str, foot: &str, depth: usize) -> NodeSpec {
        let below = if depth <= 1 || self.rng.gen_bool(0.5) {
            NodeSpec::foot(foot)
        } else {
            let l = self.label();
            self.spine(l, foot, depth - 1)
        };
        let mut children = vec![below];
        for _ in 0..self.rng.gen_range(0..=1) {
            let s = self.subtree(depth.saturating_sub(1));
            let at = self.rng.gen_range(0..=children.len());
            children.insert(at, s);
        }
        NodeSpec::nt(label, children)
    }

    fn lexicalize(&mut self, root: &mut NodeSpec) {
        if !has_terminal(root) {
            let word = NodeSpec::term(TERMINALS.choose(self.rng).unwrap());
            let at = self.rng.gen_range(0..=root.children.len());
            root.children.insert(at, word);
        }
    }

    fn constrain(&mut self, node: &mut NodeSpec, aux: &[String]) {
        if node.role == NodeRole::Nonterminal {
            let roll: f64 = self.rng.gen();
            node.sa = if roll < 0.6 {
                None
            } else if roll < 0.8 {
                Some(SelectiveSet::None)
            } else {
                let k = self.rng.gen_range(1..=aux.len().max(1));
                let names: Vec<&String> = aux.choose_multiple(self.rng, k).collect();
                Some(SelectiveSet::only(names.into_iter().map(String::as_str)))
            };
            node.oa = !aux.is_empty() && node.sa.is_none() && self.rng.gen_bool(0.1);
        }
        for c in &mut node.children {
            self.constrain(c, aux);
        }
    }
}

fn has_terminal(n: &NodeSpec) -> bool {
    n.role == NodeRole::Terminal || n.children.iter().any(has_terminal)
}

/// A valid, lexicalized grammar with start symbol `S`, at most
/// `cfg.max_trees` trees and tree depth at most `cfg.max_depth`.
pub fn random_grammar(seed: u64, cfg: RandomGrammarConfig) -> TagGrammar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = attempt(&mut rng, cfg);
        if g.validate().is_empty() {
            return g;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng, cfg: RandomGrammarConfig) -> TagGrammar {
    let total = rng.gen_range(2..=cfg.max_trees.max(2));
    let n_init = rng.gen_range(1..total);
    let n_aux = total - n_init;
    let init_labels: Vec<&'static str> = (0..n_init)
        .map(|i| {
            if i == 0 {
                "S"
            } else {
                NONTERMINALS.choose(rng).unwrap()
            }
        })
        .collect();
    let aux_names: Vec<String> = (0..n_aux).map(|i| format!("beta_{i}")).collect();
    let mut b = Builder {
        rng,
        cfg,
        subst_labels: init_labels.clone(),
    };
    let depth = cfg.max_depth.max(1);
    let mut trees = Vec::new();
    for (i, label) in init_labels.iter().enumerate() {
        let mut root = b.interior(label, depth);
        b.lexicalize(&mut root);
        if !cfg.constraint_free {
            b.constrain(&mut root, &aux_names);
        }
        trees.push(ElementaryTree::initial(&format!("alpha_{i}"), root));
    }
    for name in &aux_names {
        let label = b.label();
        let mut root = b.spine(label, label, depth);
        b.lexicalize(&mut root);
        if !cfg.constraint_free {
            b.constrain(&mut root, &aux_names);
        }
        let class = if b.rng.gen_bool(0.5) {
            AuxClass::Modifier
        } else {
            AuxClass::Predicative
        };
        trees.push(ElementaryTree::auxiliary(name, class, root));
    }
    let trees: Result<Vec<_>, _> = trees.into_iter().collect();
    match trees {
        Ok(trees) => TagGrammar::new("random", "S", trees),
        Err(_) => TagGrammar::new("random", "S", Vec::new()),
    }
}

/// Up to `count` well-formed derivations of `g` with at most `max_nodes`
/// nodes, drawn from the oracle's canonical classes and shuffled into random
/// admitted sibling orders.
pub fn random_derivations(
    g: &TagGrammar,
    mode: DerivationMode,
    max_nodes: usize,
    count: usize,
    seed: u64,
) -> Vec<OrderedDerivationTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Ok(oracle) = Oracle::new(g, mode, EnumBounds::new(max_nodes, usize::MAX)) else {
        return Vec::new();
    };
    let classes: Vec<&OrderedDerivationTree> = oracle.classes().collect();
    if classes.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let d = classes.choose(&mut rng).unwrap();
            let mut all = crate::oracle::orderings(d);
            all.swap_remove(rng.gen_range(0..all.len()))
        })
        .filter(|d| well_formed(d, g, mode).unwrap_or(false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_grammars_are_valid_and_deterministic() {
        for seed in 0..50 {
            let g = random_grammar(seed, RandomGrammarConfig::default());
            assert!(g.validate().is_empty());
            assert!(g.trees().len() <= 4);
            assert!(g.trees().iter().all(|t| t.tree.height() <= 3));
            assert_eq!(
                g.to_json(),
                random_grammar(seed, RandomGrammarConfig::default()).to_json()
            );
        }
    }

    #[test]
    fn constraint_free_has_no_constraints() {
        for seed in 0..20 {
            let g = random_grammar(seed, RandomGrammarConfig::constraint_free());
            for t in g.trees() {
                for ann in t.annotations.values() {
                    assert!(!ann.obligatory);
                    assert!(ann.selective.is_none());
                }
            }
        }
    }
}
