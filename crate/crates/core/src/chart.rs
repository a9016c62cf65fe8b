//! Agenda-driven chart recognition and parsing over a compiled rule set.
//!
//! Items are dotted reduced rules `P[η] → Γ · Δ` spanning `w[i..l]`, with an
//! optional foot span `(j, k)` when `Γ` dominates the foot of `η`'s tree. In
//! parse mode each item also carries the ordered list of operations
//! (adjunctions and substitutions) performed inside its span, and the goal
//! items deliver complete ordered derivation trees.
//!
//! Positions are inter-token offsets `0..=n`; spans are half-open.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::derivation::{Operation, OrderedDerivationTree};
use crate::lig::{Lig, NodeId, Polarity, ReducedLhs, ReducedSym, RuleType};

/// Foot substring indices `(j, k)`, or the dummy `(−, −)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FootSpan(Option<(usize, usize)>);

impl FootSpan {
    pub const UNBOUND: FootSpan = FootSpan(None);

    pub fn bound(j: usize, k: usize) -> Self {
        assert!(j <= k, "foot span must satisfy j <= k");
        FootSpan(Some((j, k)))
    }

    pub fn get(self) -> Option<(usize, usize)> {
        self.0
    }

    pub fn is_bound(self) -> bool {
        self.0.is_some()
    }

    pub fn j(self) -> Option<usize> {
        self.0.map(|s| s.0)
    }

    pub fn k(self) -> Option<usize> {
        self.0.map(|s| s.1)
    }
}

impl fmt::Display for FootSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some((j, k)) => write!(f, "{j},{k}"),
            None => f.write_str("-,-"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("conflicting foot indices")]
pub struct MergeConflict;

/// The `∪` of foot indices on one coordinate: whichever side is bound, or
/// either side when both agree.
pub fn merge_index(a: Option<usize>, b: Option<usize>) -> Result<Option<usize>, MergeConflict> {
    match (a, b) {
        (x, None) => Ok(x),
        (None, y) => Ok(y),
        (Some(x), Some(y)) if x == y => Ok(Some(x)),
        _ => Err(MergeConflict),
    }
}

/// Coordinate-wise `∪` of two foot spans.
pub fn foot_merge(a: FootSpan, b: FootSpan) -> Result<FootSpan, MergeConflict> {
    let j = merge_index(a.j(), b.j())?;
    let k = merge_index(a.k(), b.k())?;
    Ok(match (j, k) {
        (Some(j), Some(k)) => FootSpan(Some((j, k))),
        _ => FootSpan::UNBOUND,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartItem {
    /// Index of the reduced rule (and of its production) in the rule set.
    pub rule: usize,
    pub dot: usize,
    pub i: usize,
    pub foot: FootSpan,
    pub l: usize,
    /// Operations performed within the span, in completion order. Always
    /// empty when derivations are not tracked.
    pub ops: Vec<Operation>,
}

impl ChartItem {
    fn size(&self) -> usize {
        self.ops.iter().map(|o| o.child.size()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("token {token:?} at position {position} is not a terminal of the grammar")]
    Lexical { position: usize, token: String },
    #[error("chart exceeded {0} items")]
    ItemLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Carry operation lists on items and build derivation trees.
    pub track_derivations: bool,
    /// Drop items whose derivation would exceed this many nodes (parse mode).
    pub max_derivation_nodes: Option<usize>,
    pub max_items: Option<usize>,
}

impl ParseOptions {
    pub fn recognition() -> Self {
        ParseOptions {
            track_derivations: false,
            max_derivation_nodes: None,
            max_items: None,
        }
    }

    pub fn parsing() -> Self {
        ParseOptions {
            track_derivations: true,
            ..Self::recognition()
        }
    }

    pub fn with_max_nodes(mut self, n: usize) -> Self {
        self.max_derivation_nodes = Some(n);
        self
    }
}

/// How often each inference rule produced a consequent (before deduplication).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChartStats {
    pub scans: usize,
    pub predictions: usize,
    pub completions: BTreeMap<RuleType, usize>,
    /// Type 1/2 completions refused because the completed node was a root.
    pub root_side_condition_blocks: usize,
}

type SymKey = (Polarity, NodeId, usize);

pub struct Chart<'a> {
    lig: &'a Lig,
    tokens: Vec<String>,
    options: ParseOptions,
    items: Vec<ChartItem>,
    index: HashMap<ChartItem, usize>,
    agenda: VecDeque<usize>,
    /// Incomplete items by (next symbol, end position).
    waiting: HashMap<SymKey, Vec<usize>>,
    /// Complete items by (left side, start position).
    complete_from: HashMap<SymKey, Vec<usize>>,
    /// Complete `b[η]` items by exact span.
    complete_bottom: HashMap<(NodeId, usize, usize), Vec<usize>>,
    /// Complete `t[η_r]` items of auxiliary roots by foot span.
    complete_by_foot: HashMap<(NodeId, usize, usize), Vec<usize>>,
    predicted: HashSet<SymKey>,
    /// Rule-4 productions by the node adjoined at: (rule, auxiliary root).
    adjunction_rules: HashMap<NodeId, Vec<(usize, NodeId)>>,
    stats: ChartStats,
}

impl<'a> Chart<'a> {
    /// Saturates a chart for `tokens` under every inference rule.
    pub fn run(lig: &'a Lig, tokens: &[String], options: ParseOptions) -> Result<Self, ParseError> {
        for (position, token) in tokens.iter().enumerate() {
            if !lig.terminals().contains(token) {
                return Err(ParseError::Lexical {
                    position,
                    token: token.clone(),
                });
            }
        }
        let mut adjunction_rules: HashMap<NodeId, Vec<(usize, NodeId)>> = HashMap::new();
        for (r, rr) in lig.reduced_rules().iter().enumerate() {
            if matches!(lig.rule_type(r), RuleType::T4a | RuleType::T4b) {
                if let (ReducedLhs::Nt(_, eta), [ReducedSym::Nt(_, root)]) =
                    (rr.lhs, rr.rhs.as_slice())
                {
                    adjunction_rules.entry(eta).or_default().push((r, *root));
                }
            }
        }
        let mut chart = Chart {
            lig,
            tokens: tokens.to_vec(),
            options,
            items: Vec::new(),
            index: HashMap::new(),
            agenda: VecDeque::new(),
            waiting: HashMap::new(),
            complete_from: HashMap::new(),
            complete_bottom: HashMap::new(),
            complete_by_foot: HashMap::new(),
            predicted: HashSet::new(),
            adjunction_rules,
            stats: ChartStats::default(),
        };
        for &r in lig.rules_for(ReducedLhs::Start) {
            chart.add(ChartItem {
                rule: r,
                dot: 0,
                i: 0,
                foot: FootSpan::UNBOUND,
                l: 0,
                ops: Vec::new(),
            })?;
        }
        while let Some(id) = chart.agenda.pop_front() {
            chart.process(id)?;
        }
        Ok(chart)
    }

    pub fn items(&self) -> &[ChartItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn stats(&self) -> &ChartStats {
        &self.stats
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn is_goal(&self, item: &ChartItem) -> bool {
        let rr = self.lig.reduced(item.rule);
        rr.lhs == ReducedLhs::Start
            && item.dot == rr.rhs.len()
            && item.i == 0
            && item.l == self.tokens.len()
            && !item.foot.is_bound()
    }

    /// Whether a goal item `S → t[η_s]·` spanning the whole input was proved.
    pub fn accepted(&self) -> bool {
        self.items.iter().any(|it| self.is_goal(it))
    }

    /// The derivation trees carried by goal items, sorted and deduplicated.
    pub fn derivations(&self) -> Vec<OrderedDerivationTree> {
        let mut out = BTreeSet::new();
        for it in self.items.iter().filter(|it| self.is_goal(it)) {
            let rr = self.lig.reduced(it.rule);
            if let ReducedSym::Nt(_, root) = rr.rhs[0] {
                out.insert(OrderedDerivationTree {
                    tree: self.lig.node(root).node.tree.clone(),
                    children: it.ops.clone(),
                });
            }
        }
        out.into_iter().collect()
    }

    pub fn item_to_string(&self, item: &ChartItem) -> String {
        let rr = self.lig.reduced(item.rule);
        let mut s = self.lig.reduced_lhs_to_string(&rr.lhs);
        s.push_str(" ->");
        for (n, sym) in rr.rhs.iter().enumerate() {
            if n == item.dot {
                s.push_str(" .");
            }
            s.push(' ');
            s.push_str(&self.lig.reduced_sym_to_string(sym));
        }
        if item.dot == rr.rhs.len() {
            s.push_str(" .");
        }
        s.push_str(&format!(" , {},{},{}", item.i, item.foot, item.l));
        if !item.ops.is_empty() {
            let ops: Vec<String> = item
                .ops
                .iter()
                .map(|o| format!("{}:{}", o.at, o.child))
                .collect();
            s.push_str(&format!(" ; [{}]", ops.join(", ")));
        }
        s
    }

    /// One item per line, in the order items entered the chart.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for it in &self.items {
            out.push_str(&self.item_to_string(it));
            out.push('\n');
        }
        out
    }

    fn add(&mut self, item: ChartItem) -> Result<(), ParseError> {
        if let (true, Some(max)) = (
            self.options.track_derivations,
            self.options.max_derivation_nodes,
        ) {
            if 1 + item.size() > max {
                return Ok(());
            }
        }
        if self.index.contains_key(&item) {
            return Ok(());
        }
        if let Some(max) = self.options.max_items {
            if self.items.len() >= max {
                return Err(ParseError::ItemLimit(max));
            }
        }
        let id = self.items.len();
        let rr = self.lig.reduced(item.rule);
        if item.dot < rr.rhs.len() {
            if let ReducedSym::Nt(p, eta) = rr.rhs[item.dot] {
                self.waiting.entry((p, eta, item.l)).or_default().push(id);
            }
        } else if let ReducedLhs::Nt(p, eta) = rr.lhs {
            self.complete_from
                .entry((p, eta, item.i))
                .or_default()
                .push(id);
            match p {
                Polarity::Bottom => self
                    .complete_bottom
                    .entry((eta, item.i, item.l))
                    .or_default()
                    .push(id),
                Polarity::Top => {
                    if let (true, Some((j, k))) = (self.lig.node(eta).is_root, item.foot.get()) {
                        self.complete_by_foot
                            .entry((eta, j, k))
                            .or_default()
                            .push(id);
                    }
                }
            }
        }
        self.index.insert(item.clone(), id);
        self.items.push(item);
        self.agenda.push_back(id);
        Ok(())
    }

    fn process(&mut self, id: usize) -> Result<(), ParseError> {
        let item = self.items[id].clone();
        let rr = self.lig.reduced(item.rule);
        if item.dot < rr.rhs.len() {
            match &rr.rhs[item.dot] {
                ReducedSym::Terminal(a) => {
                    // Scanner
                    if item.l < self.tokens.len() && self.tokens[item.l] == *a {
                        self.stats.scans += 1;
                        self.add(ChartItem {
                            dot: item.dot + 1,
                            l: item.l + 1,
                            ..item
                        })?;
                    }
                }
                &ReducedSym::Nt(p, eta) => {
                    let key = (p, eta, item.l);
                    if self.predicted.insert(key) {
                        // Predictor (also the start-rule predictor)
                        for &r in self.lig.rules_for(ReducedLhs::Nt(p, eta)) {
                            self.stats.predictions += 1;
                            self.add(ChartItem {
                                rule: r,
                                dot: 0,
                                i: item.l,
                                foot: FootSpan::UNBOUND,
                                l: item.l,
                                ops: Vec::new(),
                            })?;
                        }
                    }
                    let done = self.complete_from.get(&key).cloned().unwrap_or_default();
                    for c in done {
                        self.combine(id, c)?;
                    }
                }
            }
        } else if let ReducedLhs::Nt(p, eta) = rr.lhs {
            let waiting = self
                .waiting
                .get(&(p, eta, item.i))
                .cloned()
                .unwrap_or_default();
            for w in waiting {
                self.combine(w, id)?;
            }
            if p == Polarity::Bottom {
                // the item may be the material below an adjunction site
                let rules = self.adjunction_rules.get(&eta).cloned().unwrap_or_default();
                for (r, root) in rules {
                    let roots = self
                        .complete_by_foot
                        .get(&(root, item.i, item.l))
                        .cloned()
                        .unwrap_or_default();
                    for c in roots {
                        let ci = self.items[c].i;
                        let preds = self
                            .waiting
                            .get(&(Polarity::Top, root, ci))
                            .cloned()
                            .unwrap_or_default();
                        for w in preds {
                            if self.items[w].rule == r {
                                self.complete_adjunction(w, c, id)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn count(&mut self, t: RuleType) {
        *self.stats.completions.entry(t).or_default() += 1;
    }

    fn lhs_node(&self, rule: usize) -> NodeId {
        match self.lig.reduced(rule).lhs {
            ReducedLhs::Nt(_, n) => n,
            ReducedLhs::Start => unreachable!("start rules have no node"),
        }
    }

    fn tree_of(&self, n: NodeId) -> String {
        self.lig.node(n).node.tree.clone()
    }

    /// `w` waits on the left side of the complete item `c`, and `w.l == c.i`.
    fn combine(&mut self, w: usize, c: usize) -> Result<(), ParseError> {
        let (wi, ci) = (&self.items[w], &self.items[c]);
        let rule_type = self.lig.rule_type(wi.rule);
        let track = self.options.track_derivations;
        let next = match rule_type {
            RuleType::T1 | RuleType::T2 => {
                if self.lig.node(self.lhs_node(ci.rule)).is_root {
                    self.stats.root_side_condition_blocks += 1;
                    return Ok(());
                }
                let Ok(foot) = foot_merge(wi.foot, ci.foot) else {
                    return Ok(());
                };
                let mut ops = wi.ops.clone();
                ops.extend(ci.ops.iter().cloned());
                ChartItem {
                    rule: wi.rule,
                    dot: wi.dot + 1,
                    i: wi.i,
                    foot,
                    l: ci.l,
                    ops,
                }
            }
            RuleType::T3 => ChartItem {
                rule: wi.rule,
                dot: 1,
                i: wi.i,
                foot: ci.foot,
                l: ci.l,
                ops: ci.ops.clone(),
            },
            RuleType::T5 => ChartItem {
                rule: wi.rule,
                dot: 1,
                i: wi.i,
                foot: FootSpan::bound(wi.i, ci.l),
                l: ci.l,
                // operations below the foot belong to the host tree and are
                // collected through the rule-4 completion instead
                ops: Vec::new(),
            },
            RuleType::T4a | RuleType::T4b => {
                let Some((j, k)) = ci.foot.get() else {
                    return Ok(());
                };
                let eta = self.lhs_node(wi.rule);
                let below = self
                    .complete_bottom
                    .get(&(eta, j, k))
                    .cloned()
                    .unwrap_or_default();
                for b in below {
                    self.complete_adjunction(w, c, b)?;
                }
                return Ok(());
            }
            RuleType::T6 => {
                if ci.foot.is_bound() {
                    return Ok(());
                }
                let eta = self.lhs_node(wi.rule);
                let ops = if track {
                    let root = self.lhs_node(ci.rule);
                    vec![Operation::subst(
                        self.lig.node(eta).node.address.clone(),
                        OrderedDerivationTree {
                            tree: self.tree_of(root),
                            children: ci.ops.clone(),
                        },
                    )]
                } else {
                    Vec::new()
                };
                ChartItem {
                    rule: wi.rule,
                    dot: 1,
                    i: wi.i,
                    foot: FootSpan::UNBOUND,
                    l: ci.l,
                    ops,
                }
            }
            RuleType::Start => {
                if ci.foot.is_bound() {
                    return Ok(());
                }
                ChartItem {
                    rule: wi.rule,
                    dot: 1,
                    i: wi.i,
                    foot: FootSpan::UNBOUND,
                    l: ci.l,
                    ops: ci.ops.clone(),
                }
            }
        };
        self.count(rule_type);
        self.add(next)
    }

    /// Rule 4a/4b completion from the prediction `w`, the completed auxiliary
    /// root `c` and the completed material `b` below the adjunction site.
    fn complete_adjunction(&mut self, w: usize, c: usize, b: usize) -> Result<(), ParseError> {
        let (wi, ci, bi) = (&self.items[w], &self.items[c], &self.items[b]);
        debug_assert_eq!(ci.foot.get(), Some((bi.i, bi.l)));
        let rule_type = self.lig.rule_type(wi.rule);
        let ops = if self.options.track_derivations {
            let eta = self.lhs_node(wi.rule);
            let root = self.lhs_node(ci.rule);
            let mut ops = bi.ops.clone();
            ops.push(Operation::adjoin(
                self.lig.node(eta).node.address.clone(),
                OrderedDerivationTree {
                    tree: self.tree_of(root),
                    children: ci.ops.clone(),
                },
            ));
            ops
        } else {
            Vec::new()
        };
        let next = ChartItem {
            rule: wi.rule,
            dot: 1,
            i: wi.i,
            foot: bi.foot,
            l: ci.l,
            ops,
        };
        self.count(rule_type);
        self.add(next)
    }
}

/// Tokenizes on whitespace.
pub fn tokens(input: &str) -> Vec<String> {
    input.split_whitespace().map(str::to_string).collect()
}

pub fn recognize(lig: &Lig, tokens: &[String]) -> Result<bool, ParseError> {
    Ok(Chart::run(lig, tokens, ParseOptions::recognition())?.accepted())
}

/// Every derivation tree for `tokens`, one ordered representative per path
/// through the chart.
pub fn parse(lig: &Lig, tokens: &[String]) -> Result<Vec<OrderedDerivationTree>, ParseError> {
    parse_with(lig, tokens, ParseOptions::parsing())
}

pub fn parse_with(
    lig: &Lig,
    tokens: &[String],
    options: ParseOptions,
) -> Result<Vec<OrderedDerivationTree>, ParseError> {
    let options = ParseOptions {
        track_derivations: true,
        ..options
    };
    Ok(Chart::run(lig, tokens, options)?.derivations())
}
