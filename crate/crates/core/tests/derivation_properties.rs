use std::collections::BTreeMap;

use proptest::prelude::*;

use tagderiv::derivation::{legal_swaps, violations, Violation};
use tagderiv::grammar::{ElementaryTree, NodeSpec};
use tagderiv::oracle::{orderings, EnumBounds, Oracle};
use tagderiv::random::{random_derivations, random_grammar, RandomGrammarConfig};
use tagderiv::{
    canonicalize, derive, equivalent, swap_adjacent, well_formed, AuxClass, DerivationMode, OpKind,
    OrderedDerivationTree, SelectiveSet, TagGrammar,
};

const MODES: [DerivationMode; 2] = [DerivationMode::Standard, DerivationMode::Extended];

fn has_obligatory(g: &TagGrammar) -> bool {
    g.trees()
        .iter()
        .any(|t| t.annotations.values().any(|a| a.obligatory))
}

/// Every way of dropping a non-empty subset of same-address modifier arcs at
/// one node of `d`.
fn modifier_deletions(d: &OrderedDerivationTree, g: &TagGrammar) -> Vec<OrderedDerivationTree> {
    let mut out = Vec::new();
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, c) in d.children.iter().enumerate() {
        let modifier = c.op == OpKind::Adjoin
            && g.tree(&c.child.tree).unwrap().class == Some(AuxClass::Modifier);
        if modifier {
            groups.entry(c.at.to_string()).or_default().push(i);
        }
    }
    for idx in groups.values() {
        for mask in 1u32..(1 << idx.len()) {
            let drop: Vec<usize> = (0..idx.len())
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| idx[b])
                .collect();
            let mut e = d.clone();
            e.children = d
                .children
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, c)| c.clone())
                .collect();
            out.push(e);
        }
    }
    for (i, c) in d.children.iter().enumerate() {
        for sub in modifier_deletions(&c.child, g) {
            let mut e = d.clone();
            e.children[i].child = sub;
            out.push(e);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derive_is_constant_on_classes(seed in 0u64..100_000) {
        let g = random_grammar(seed, RandomGrammarConfig::default());
        for mode in MODES {
            for d in random_derivations(&g, mode, 6, 8, seed) {
                let base = derive(&d, &g).unwrap();
                prop_assert_eq!(&derive(&canonicalize(&d), &g).unwrap(), &base);
                prop_assert!(equivalent(&d, &canonicalize(&d)));
                for (path, idx) in legal_swaps(&d) {
                    let s = swap_adjacent(&d, &path, idx).unwrap();
                    prop_assert!(well_formed(&s, &g, mode).unwrap());
                    prop_assert_eq!(&derive(&s, &g).unwrap(), &base);
                }
            }
        }
    }

    #[test]
    fn standard_implies_extended_without_obligatory_adjunction(seed in 0u64..100_000) {
        let g = random_grammar(seed, RandomGrammarConfig::default());
        prop_assume!(!has_obligatory(&g));
        let oracle = Oracle::new(&g, DerivationMode::Standard, EnumBounds::new(5, usize::MAX)).unwrap();
        for d in oracle.all_orderings() {
            prop_assert!(well_formed(&d, &g, DerivationMode::Extended).unwrap(), "{}", d);
        }
    }

    #[test]
    fn modifiers_are_deletable(seed in 0u64..100_000) {
        let g = random_grammar(seed, RandomGrammarConfig::default());
        let oracle = Oracle::new(&g, DerivationMode::Extended, EnumBounds::new(5, usize::MAX)).unwrap();
        for d in oracle.classes() {
            for e in modifier_deletions(d, &g) {
                prop_assert!(well_formed(&e, &g, DerivationMode::Extended).unwrap(), "{} -> {}", d, e);
            }
        }
    }

    #[test]
    fn json_round_trip(seed in 0u64..100_000) {
        let g = random_grammar(seed, RandomGrammarConfig::default());
        for d in random_derivations(&g, DerivationMode::Extended, 5, 4, seed) {
            prop_assert_eq!(OrderedDerivationTree::from_json(&d.to_json()).unwrap(), d);
        }
        prop_assert_eq!(TagGrammar::from_json(&g.to_json()).unwrap().to_json(), g.to_json());
    }
}

#[test]
fn adjectives_deletions() {
    let g = tagderiv::fixtures::adjectives(DerivationMode::Extended);
    let d = OrderedDerivationTree::from_json(
        r#"{"tree":"alpha_pe","children":[
            {"at":"1","op":"adjoin","child":{"tree":"beta_re"}},
            {"at":"1","op":"adjoin","child":{"tree":"beta_ro"}},
            {"at":"1","op":"adjoin","child":{"tree":"beta_re"}}]}"#,
    )
    .unwrap();
    assert!(well_formed(&d, &g, DerivationMode::Extended).unwrap());
    let all = modifier_deletions(&d, &g);
    assert_eq!(all.len(), 7);
    assert!(all
        .iter()
        .all(|e| well_formed(e, &g, DerivationMode::Extended).unwrap()));
    // the same derivation is not standard: three arcs share one address
    assert!(!well_formed(&d, &g, DerivationMode::Standard).unwrap());
    assert_eq!(orderings(&d).len(), 1);
}

/// An obligatory node discharged by a modifier is standard but not
/// extended: modifiers enter below the node and never pass its top.
#[test]
fn obligatory_adjunction_needs_a_predicative_tree_in_extended_mode() {
    let alpha = ElementaryTree::initial(
        "alpha",
        NodeSpec::nt("S", vec![NodeSpec::term("x")]).obligatory(),
    )
    .unwrap();
    let m = ElementaryTree::auxiliary(
        "beta_m",
        AuxClass::Modifier,
        NodeSpec::nt("S", vec![NodeSpec::term("y"), NodeSpec::foot("S")])
            .with_sa(SelectiveSet::None),
    )
    .unwrap();
    let p = ElementaryTree::auxiliary(
        "beta_p",
        AuxClass::Predicative,
        NodeSpec::nt("S", vec![NodeSpec::term("z"), NodeSpec::foot("S")])
            .with_sa(SelectiveSet::None),
    )
    .unwrap();
    let g = TagGrammar::new("oa", "S", vec![alpha, m, p]);
    let with = |tree: &str| {
        OrderedDerivationTree::from_json(&format!(
            r#"{{"tree":"alpha","children":[{{"at":"e","op":"adjoin","child":{{"tree":"{tree}"}}}}]}}"#
        ))
        .unwrap()
    };
    assert!(well_formed(&with("beta_m"), &g, DerivationMode::Standard).unwrap());
    assert_eq!(
        violations(&with("beta_m"), &g, DerivationMode::Extended).unwrap(),
        [Violation::ObligatoryUnsatisfied {
            path: "alpha".into(),
            at: tagderiv::GornAddress::root()
        }]
    );
    assert!(well_formed(&with("beta_p"), &g, DerivationMode::Extended).unwrap());
    assert!(!well_formed(
        &OrderedDerivationTree::leaf("alpha"),
        &g,
        DerivationMode::Standard
    )
    .unwrap());
}

#[test]
fn outermost_predication_is_checked_not_normalized() {
    let g = tagderiv::fixtures::clauses();
    let d = OrderedDerivationTree::from_json(
        r#"{"tree":"alpha_sleeps","children":[
            {"at":"1","op":"subst","child":{"tree":"alpha_mary"}},
            {"at":"e","op":"adjoin","child":{"tree":"beta_thinks","children":[{"at":"1","op":"subst","child":{"tree":"alpha_john"}}]}},
            {"at":"e","op":"adjoin","child":{"tree":"beta_today"}}]}"#,
    )
    .unwrap();
    let v = violations(&d, &g, DerivationMode::Extended).unwrap();
    assert!(matches!(
        v.as_slice(),
        [Violation::PredicativeNotLast { .. }]
    ));
    let c = canonicalize(&d);
    let at_root: Vec<&str> = c
        .children
        .iter()
        .filter(|o| o.at.is_root())
        .map(|o| o.child.tree.as_str())
        .collect();
    assert_eq!(at_root, ["beta_thinks", "beta_today"]);
    assert_eq!(violations(&c, &g, DerivationMode::Extended).unwrap(), v);
}
