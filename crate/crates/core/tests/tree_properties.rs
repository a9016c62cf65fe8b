use proptest::prelude::*;
use proptest::sample::Index;

use tagderiv::address::{update, GornAddress, PrefixRelation};
use tagderiv::tree::{adjoin, simultaneous_adjoin, substitute, TreeOp};
use tagderiv::{derive, fixtures, DerivationMode, NodeLabel, OrderedDerivationTree, SyntaxTree};

fn address() -> impl Strategy<Value = GornAddress> {
    prop::collection::vec(1u32..=3, 0..5).prop_map(|v| GornAddress::new(v).unwrap())
}

fn foot_address() -> impl Strategy<Value = GornAddress> {
    prop::collection::vec(1u32..=3, 1..4).prop_map(|v| GornAddress::new(v).unwrap())
}

fn host() -> impl Strategy<Value = SyntaxTree> {
    let leaf = prop_oneof![
        Just(SyntaxTree::leaf(NodeLabel::term("a"))),
        Just(SyntaxTree::leaf(NodeLabel::nt("X"))),
    ];
    let sub = leaf.prop_recursive(3, 16, 3, |inner| {
        prop::collection::vec(inner, 1..=3).prop_map(|c| SyntaxTree::node(NodeLabel::nt("X"), c))
    });
    prop::collection::vec(sub, 1..=3).prop_map(|c| SyntaxTree::node(NodeLabel::nt("X"), c))
}

/// An auxiliary tree `X(... X(... X* ...) ...)` and its foot address.
fn aux() -> impl Strategy<Value = (SyntaxTree, GornAddress)> {
    let side = prop::collection::vec(prop_oneof![Just("b"), Just("c")], 0..=1);
    prop::collection::vec((side.clone(), side), 1..=2).prop_map(|levels| {
        let mut tree = SyntaxTree::leaf(NodeLabel::nt("X"));
        let mut foot: Vec<u32> = Vec::new();
        for (left, right) in levels.into_iter().rev() {
            let mut children: Vec<SyntaxTree> = left
                .iter()
                .map(|w| SyntaxTree::leaf(NodeLabel::term(*w)))
                .collect();
            foot.insert(0, children.len() as u32 + 1);
            children.push(tree);
            children.extend(right.iter().map(|w| SyntaxTree::leaf(NodeLabel::term(*w))));
            tree = SyntaxTree::node(NodeLabel::nt("X"), children);
        }
        (tree, GornAddress::new(foot).unwrap())
    })
}

fn nonterminal_addresses(t: &SyntaxTree) -> Vec<GornAddress> {
    t.iter()
        .filter(|(_, l)| l.is_nonterminal())
        .map(|(a, _)| a.clone())
        .collect()
}

proptest! {
    #[test]
    fn update_composition(t in address(), t1 in address(), ti in address(), fa in foot_address(), fb in foot_address()) {
        prop_assume!(t != t1);
        let lhs = update(&update(&ti, &fa, &t), &fb, &update(&t1, &fa, &t));
        let rhs = update(&update(&ti, &fb, &t1), &fa, &update(&t, &fb, &t1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn difference_inverts_concat(p in address(), q in address()) {
        let pq = p.concat(&q);
        prop_assert_eq!(pq.difference(&p).unwrap(), q.clone());
        prop_assert_eq!(p.concat(&pq.difference(&p).unwrap()), pq.clone());
        prop_assert!(p.is_prefix_of(&pq));
    }

    #[test]
    fn swap_and_closure(
        e in host(),
        (a, fa) in aux(),
        (b, fb) in aux(),
        i in any::<Index>(),
        j in any::<Index>(),
    ) {
        let sites = nonterminal_addresses(&e);
        let (t, t1) = (i.get(&sites).clone(), j.get(&sites).clone());
        prop_assume!(t != t1);
        let ab = simultaneous_adjoin(&e, &[
            TreeOp::Adjoin { tree: &a, foot: &fa, at: &t },
            TreeOp::Adjoin { tree: &b, foot: &fb, at: &t1 },
        ]).unwrap();
        let ba = simultaneous_adjoin(&e, &[
            TreeOp::Adjoin { tree: &b, foot: &fb, at: &t1 },
            TreeOp::Adjoin { tree: &a, foot: &fa, at: &t },
        ]).unwrap();
        prop_assert!(ab.check_invariants().is_ok());
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn single_adjunction_clauses((a, fa) in aux(), e in host(), i in any::<Index>()) {
        let sites = nonterminal_addresses(&e);
        let t = i.get(&sites).clone();
        let r = adjoin(&e, &a, &fa, &t).unwrap();
        prop_assert!(r.check_invariants().is_ok());
        for (addr, label) in e.iter() {
            match addr.difference(&t) {
                // the excised subtree hangs below the foot
                Ok(u) => prop_assert_eq!(r.get(&t.concat(&fa).concat(&u)), Some(label)),
                Err(_) => prop_assert_eq!(r.get(addr), Some(label)),
            }
        }
        for (u, label) in a.iter() {
            if !fa.is_prefix_of(u) {
                prop_assert_eq!(r.get(&t.concat(u)), Some(label));
            }
        }
        prop_assert_eq!(r.len(), e.len() + a.len() - 1);
    }
}

#[test]
fn swap_covers_every_prefix_case() {
    let x = |c: Vec<SyntaxTree>| SyntaxTree::node(NodeLabel::nt("X"), c);
    let w = |s: &str| SyntaxTree::leaf(NodeLabel::term(s));
    let e = x(vec![x(vec![x(vec![w("a")]), w("b")]), x(vec![w("c")])]);
    let a = x(vec![w("d"), SyntaxTree::leaf(NodeLabel::nt("X"))]);
    let b = x(vec![SyntaxTree::leaf(NodeLabel::nt("X")), w("f")]);
    let (fa, fb) = (GornAddress::from_slice(&[2]), GornAddress::from_slice(&[1]));
    let sites = nonterminal_addresses(&e);
    let mut seen = [false; 3];
    for t in &sites {
        for t1 in &sites {
            if t == t1 {
                continue;
            }
            let rel = match (t.prefix_relation(t1), t1.prefix_relation(t)) {
                (PrefixRelation::Proper, _) => 0,
                (_, PrefixRelation::Proper) => 1,
                _ => 2,
            };
            seen[rel] = true;
            let ab = simultaneous_adjoin(
                &e,
                &[
                    TreeOp::Adjoin {
                        tree: &a,
                        foot: &fa,
                        at: t,
                    },
                    TreeOp::Adjoin {
                        tree: &b,
                        foot: &fb,
                        at: t1,
                    },
                ],
            )
            .unwrap();
            let ba = simultaneous_adjoin(
                &e,
                &[
                    TreeOp::Adjoin {
                        tree: &b,
                        foot: &fb,
                        at: t1,
                    },
                    TreeOp::Adjoin {
                        tree: &a,
                        foot: &fa,
                        at: t,
                    },
                ],
            )
            .unwrap();
            assert_eq!(ab, ba, "t={t} t'={t1}");
        }
    }
    assert_eq!(seen, [true; 3]);
}

#[test]
fn same_address_order_matters() {
    let g = fixtures::adjectives(DerivationMode::Extended);
    let parse = |s: &str| OrderedDerivationTree::from_json(s).unwrap();
    let re_ro = parse(
        r#"{"tree":"alpha_pe","children":[{"at":"1","op":"adjoin","child":{"tree":"beta_re"}},{"at":"1","op":"adjoin","child":{"tree":"beta_ro"}}]}"#,
    );
    let ro_re = parse(
        r#"{"tree":"alpha_pe","children":[{"at":"1","op":"adjoin","child":{"tree":"beta_ro"}},{"at":"1","op":"adjoin","child":{"tree":"beta_re"}}]}"#,
    );
    let a = derive(&re_ro, &g).unwrap();
    let b = derive(&ro_re, &g).unwrap();
    assert_ne!(a, b);
    assert_eq!(a.to_bracketed(), "(NP (N roasted (N red (N pepper))))");
    assert_eq!(b.to_bracketed(), "(NP (N red (N roasted (N pepper))))");
    assert_eq!(
        derive(&OrderedDerivationTree::leaf("alpha_pe"), &g).unwrap(),
        g.tree("alpha_pe").unwrap().tree
    );
}

#[test]
fn substitution_grafts_at_frontier() {
    let g = fixtures::clauses();
    let host = &g.tree("alpha_sleeps").unwrap().tree;
    let np = &g.tree("alpha_john").unwrap().tree;
    let r = substitute(host, np, &GornAddress::from_slice(&[1])).unwrap();
    assert!(r.check_invariants().is_ok());
    assert_eq!(r.to_bracketed(), "(S (NP John) (VP sleeps))");
    assert!(substitute(host, np, &GornAddress::from_slice(&[2])).is_err());
}
