//! Bounded LIG-derivation search used to check chart items against the
//! item invariant.
//!
//! Stacks are concrete except for an optional opaque bottom `γ`. A symbol
//! whose stack rests on `γ` may never inspect it, so a derivation found with
//! `γ` symbolic holds for every choice of `γ`.

use std::collections::HashMap;

use crate::chart::ChartItem;
use crate::lig::{Lig, LigLhs, LigNonterminal, NodeId, Polarity, ReducedLhs, RhsElem, RuleType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The search hit its depth budget without finding a derivation.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Sym {
    pol: Polarity,
    gamma: bool,
    stack: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Elem {
    T(String),
    N(Sym),
}

/// Outcome of a bounded search: found, and whether any branch was cut.
#[derive(Debug, Clone, Copy, Default)]
struct Found {
    ok: bool,
    cut: bool,
}

impl Found {
    const CUT: Found = Found {
        ok: false,
        cut: true,
    };

    fn or(self, other: Found) -> Found {
        Found {
            ok: self.ok || other.ok,
            cut: self.cut || other.cut,
        }
    }
}

type Hole = Option<(usize, usize)>;
/// (symbol, i, l, hole, hole foot node, depth)
type MemoKey = (Sym, usize, usize, Hole, Option<NodeId>, usize);

struct Search<'a> {
    lig: &'a Lig,
    w: &'a [String],
    /// Foot index the hole `b[γ η_f]` carries on top of `γ`.
    hole_node: Option<NodeId>,
    memo: HashMap<MemoKey, Found>,
    exists_memo: HashMap<(NodeId, usize, usize, usize), Found>,
}

impl<'a> Search<'a> {
    fn new(lig: &'a Lig, w: &'a [String]) -> Self {
        Search {
            lig,
            w,
            hole_node: None,
            memo: HashMap::new(),
            exists_memo: HashMap::new(),
        }
    }

    fn expand(&self, p: &crate::lig::LigProduction, sym: &Sym) -> Option<Vec<Elem>> {
        let LigLhs::Nt(LigNonterminal { polarity, stack }) = &p.lhs else {
            return None;
        };
        if *polarity != sym.pol {
            return None;
        }
        let rest: Vec<NodeId> = if stack.inherits {
            let n = stack.indices.len();
            if sym.stack.len() < n || sym.stack[sym.stack.len() - n..] != stack.indices[..] {
                return None;
            }
            sym.stack[..sym.stack.len() - n].to_vec()
        } else {
            if sym.gamma || sym.stack != stack.indices {
                return None;
            }
            Vec::new()
        };
        Some(
            p.rhs
                .iter()
                .map(|e| match e {
                    RhsElem::Terminal(a) => Elem::T(a.clone()),
                    RhsElem::Nt(n) => Elem::N(instantiate(n, sym.gamma, &rest)),
                })
                .collect(),
        )
    }

    /// `sym ⇒* w[i..l]`, with the hole symbol covering `hole` when given.
    fn derive(&mut self, sym: &Sym, i: usize, l: usize, hole: Hole, depth: usize) -> Found {
        if let Some(f) = self.hole_node {
            if sym.gamma && sym.pol == Polarity::Bottom && sym.stack == [f] {
                return Found {
                    ok: hole == Some((i, l)),
                    cut: false,
                };
            }
        }
        if hole.is_some() != sym.gamma && self.hole_node.is_some() {
            return Found::default();
        }
        if depth == 0 {
            return Found::CUT;
        }
        let key = (sym.clone(), i, l, hole, self.hole_node, depth);
        if let Some(&f) = self.memo.get(&key) {
            return f;
        }
        let Some(&top) = sym.stack.last() else {
            return Found::default();
        };
        let lig = self.lig;
        let mut acc = Found::default();
        for &r in lig.rules_for(ReducedLhs::Nt(sym.pol, top)) {
            let Some(rhs) = self.expand(&lig.productions()[r], sym) else {
                continue;
            };
            acc = acc.or(self.derive_seq(&rhs, i, l, hole, depth - 1));
            if acc.ok {
                break;
            }
        }
        self.memo.insert(key, acc);
        acc
    }

    fn derive_seq(
        &mut self,
        elems: &[Elem],
        i: usize,
        l: usize,
        hole: Hole,
        depth: usize,
    ) -> Found {
        let Some((first, rest)) = elems.split_first() else {
            return Found {
                ok: i == l && hole.is_none(),
                cut: false,
            };
        };
        match first {
            Elem::T(a) => {
                if i < l && self.w[i] == *a {
                    self.derive_seq(rest, i + 1, l, hole, depth)
                } else {
                    Found::default()
                }
            }
            Elem::N(sym) => {
                let mut acc = Found::default();
                for m in i..=l {
                    let (h_here, h_rest) = match hole {
                        Some((j, k)) if sym.gamma => {
                            if !(i <= j && k <= m) {
                                continue;
                            }
                            (hole, None)
                        }
                        _ => (None, hole),
                    };
                    if let Some((j, _)) = h_rest {
                        if j < m {
                            continue;
                        }
                    }
                    let head = self.derive(sym, i, m, h_here, depth);
                    acc.cut |= head.cut;
                    if head.ok {
                        acc = acc.or(self.derive_seq(rest, m, l, h_rest, depth));
                        if acc.ok {
                            return acc;
                        }
                    }
                }
                acc
            }
        }
    }

    /// `∃γ. b[γ η] ⇒* w[j..k]`.
    fn exists_below(&mut self, eta: NodeId, j: usize, k: usize, depth: usize) -> Found {
        if depth == 0 {
            return Found::CUT;
        }
        let key = (eta, j, k, depth);
        if let Some(&f) = self.exists_memo.get(&key) {
            return f;
        }
        let info = self.lig.node(eta);
        let result = match (info.on_spine, info.tree_foot) {
            (true, Some(foot)) => {
                // b[γ η] runs down the spine to b[γ η_f], which in turn needs
                // a site below it
                let saved = self.hole_node.replace(foot);
                let sym = Sym {
                    pol: Polarity::Bottom,
                    gamma: true,
                    stack: vec![eta],
                };
                let mut acc = Found::default();
                'outer: for a in j..=k {
                    for b in a..=k {
                        let through = self.derive(&sym, j, k, Some((a, b)), depth - 1);
                        acc.cut |= through.cut;
                        if through.ok {
                            self.hole_node = saved;
                            let below = self.exists_below_foot(foot, a, b, depth - 1);
                            self.hole_node = Some(foot);
                            acc = acc.or(below);
                            if acc.ok {
                                break 'outer;
                            }
                        }
                    }
                }
                self.hole_node = saved;
                acc
            }
            _ => {
                // only an empty γ can ever be consumed at a node off the spine
                let saved = self.hole_node.take();
                let sym = Sym {
                    pol: Polarity::Bottom,
                    gamma: false,
                    stack: vec![eta],
                };
                let found = self.derive(&sym, j, k, None, depth - 1);
                self.hole_node = saved;
                found
            }
        };
        self.exists_memo.insert(key, result);
        result
    }

    /// `∃γ. b[γ η_f] ⇒* w[j..k]`: some Type 5 step pops the foot first.
    fn exists_below_foot(&mut self, foot: NodeId, j: usize, k: usize, depth: usize) -> Found {
        let lig = self.lig;
        let mut acc = Found::default();
        for &r in lig.rules_for(ReducedLhs::Nt(Polarity::Bottom, foot)) {
            if lig.rule_type(r) != RuleType::T5 {
                continue;
            }
            let RhsElem::Nt(site) = &lig.productions()[r].rhs[0] else {
                continue;
            };
            acc = acc.or(self.exists_below(site.stack.top(), j, k, depth));
            if acc.ok {
                break;
            }
        }
        acc
    }
}

fn instantiate(n: &LigNonterminal, gamma: bool, rest: &[NodeId]) -> Sym {
    if n.stack.inherits {
        let mut stack = rest.to_vec();
        stack.extend(n.stack.indices.iter().copied());
        Sym {
            pol: n.polarity,
            gamma,
            stack,
        }
    } else {
        Sym {
            pol: n.polarity,
            gamma: false,
            stack: n.stack.indices.clone(),
        }
    }
}

/// Default depth budget for an input of `n` tokens.
pub fn default_depth(n: usize) -> usize {
    16 + 8 * n
}

/// Checks the chart-item invariant for `item` over input `w`.
///
/// Items with a bound foot span must rewrite their processed prefix to
/// `w[i..j] b[γ η_f] w[k..l]` for a symbolic `γ`, and `b[γ η_f]` must rewrite
/// to `w[j..k]` for some `γ`. Items without one must rewrite the prefix to
/// `w[i..l]` with inherited stacks empty.
pub fn check_invariant(item: &ChartItem, lig: &Lig, w: &[String]) -> Verdict {
    check_invariant_with_depth(item, lig, w, default_depth(w.len()))
}

/// Iterative deepening up to `max_depth`: stops at the first depth that finds
/// a derivation, or as soon as a search fails without being cut.
pub fn check_invariant_with_depth(
    item: &ChartItem,
    lig: &Lig,
    w: &[String],
    max_depth: usize,
) -> Verdict {
    for depth in 1..=max_depth {
        match search_at(item, lig, w, depth) {
            Err(v) => return v,
            Ok(Found { ok: true, .. }) => return Verdict::Holds,
            Ok(Found { cut: false, .. }) => return Verdict::Violated,
            Ok(_) => {}
        }
    }
    Verdict::Indeterminate
}

fn search_at(item: &ChartItem, lig: &Lig, w: &[String], depth: usize) -> Result<Found, Verdict> {
    let n = w.len();
    if item.rule >= lig.productions().len() || item.i > item.l || item.l > n {
        return Err(Verdict::Violated);
    }
    let p = &lig.productions()[item.rule];
    if item.dot > p.rhs.len() {
        return Err(Verdict::Violated);
    }
    if let Some((j, k)) = item.foot.get() {
        if !(item.i <= j && j <= k && k <= item.l) {
            return Err(Verdict::Violated);
        }
    }
    let mut search = Search::new(lig, w);
    let rest: &[NodeId] = &[];
    let found = match item.foot.get() {
        None => {
            let gamma_free: Vec<Elem> = p.rhs[..item.dot]
                .iter()
                .map(|e| match e {
                    RhsElem::Terminal(a) => Elem::T(a.clone()),
                    RhsElem::Nt(nt) => Elem::N(instantiate(nt, false, rest)),
                })
                .collect();
            search.derive_seq(&gamma_free, item.i, item.l, None, depth)
        }
        Some((j, k)) if p.rule_type == RuleType::T5 => {
            if item.dot != 1 || j != item.i || k != item.l {
                return Err(Verdict::Violated);
            }
            let RhsElem::Nt(site) = &p.rhs[0] else {
                return Err(Verdict::Violated);
            };
            search.exists_below(site.stack.top(), j, k, depth)
        }
        Some((j, k)) => {
            let LigLhs::Nt(lhs) = &p.lhs else {
                return Err(Verdict::Violated);
            };
            let Some(foot) = lig.node(lhs.stack.top()).tree_foot else {
                return Err(Verdict::Violated);
            };
            let gamma: Vec<Elem> = p.rhs[..item.dot]
                .iter()
                .map(|e| match e {
                    RhsElem::Terminal(a) => Elem::T(a.clone()),
                    RhsElem::Nt(nt) => Elem::N(instantiate(nt, true, rest)),
                })
                .collect();
            search.hole_node = Some(foot);
            let through = search.derive_seq(&gamma, item.i, item.l, Some((j, k)), depth);
            if through.ok {
                search.hole_node = None;
                let below = search.exists_below_foot(foot, j, k, depth);
                Found {
                    ok: below.ok,
                    cut: below.cut || through.cut,
                }
            } else {
                through
            }
        }
    };
    Ok(found)
}
