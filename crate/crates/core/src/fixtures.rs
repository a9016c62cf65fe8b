//! Small hand-built grammars used by tests, examples and the CLI.

use crate::derivation::DerivationMode;
use crate::grammar::{AuxClass, ElementaryTree, NodeSpec, SelectiveSet, TagGrammar};

const MODIFIERS: [(&str, &str); 3] = [
    ("beta_b", "baked"),
    ("beta_re", "red"),
    ("beta_ro", "roasted"),
];

/// The noun-phrase grammar: two initial trees (`pepper`, `potato`) and three
/// adjectival modifiers adjoining at `N`.
///
/// Modifier roots accept further modifiers only in the standard-mode variant,
/// where stacked adjectives must be built dependently.
pub fn adjectives(mode: DerivationMode) -> TagGrammar {
    adjectives_with_root_adjunction(mode == DerivationMode::Standard)
}

/// [`adjectives`] with explicit control over adjunction at modifier roots.
pub fn adjectives_with_root_adjunction(open_roots: bool) -> TagGrammar {
    let all_mods = || SelectiveSet::only(MODIFIERS.iter().map(|(n, _)| *n));
    let initial = |name: &str, noun: &str| {
        ElementaryTree::initial(
            name,
            NodeSpec::nt(
                "NP",
                vec![NodeSpec::nt("N", vec![NodeSpec::term(noun)]).with_sa(all_mods())],
            ),
        )
        .unwrap()
    };
    let mut trees = vec![initial("alpha_pe", "pepper"), initial("alpha_po", "potato")];
    for (name, word) in MODIFIERS {
        let root_sa = if open_roots {
            all_mods()
        } else {
            SelectiveSet::None
        };
        trees.push(
            ElementaryTree::auxiliary(
                name,
                AuxClass::Modifier,
                NodeSpec::nt("N", vec![NodeSpec::term(word), NodeSpec::foot("N")]).with_sa(root_sa),
            )
            .unwrap(),
        );
    }
    TagGrammar::new("adjectives", "NP", trees)
}

/// A clause grammar with a predicative tree, a substitution site and an
/// adverbial modifier, used to exercise outermost predication.
///
/// `S(NP↓ VP(sleeps))`, `NP(John)`, predicative `S(NP↓ VP(thinks S*))`,
/// modifier `S(S* today)`.
pub fn clauses() -> TagGrammar {
    let sleeps = ElementaryTree::initial(
        "alpha_sleeps",
        NodeSpec::nt(
            "S",
            vec![
                NodeSpec::subst("NP"),
                NodeSpec::nt("VP", vec![NodeSpec::term("sleeps")]),
            ],
        ),
    )
    .unwrap();
    let john = ElementaryTree::initial(
        "alpha_john",
        NodeSpec::nt("NP", vec![NodeSpec::term("John")]),
    )
    .unwrap();
    let mary = ElementaryTree::initial(
        "alpha_mary",
        NodeSpec::nt("NP", vec![NodeSpec::term("Mary")]),
    )
    .unwrap();
    let thinks = ElementaryTree::auxiliary(
        "beta_thinks",
        AuxClass::Predicative,
        NodeSpec::nt(
            "S",
            vec![
                NodeSpec::subst("NP"),
                NodeSpec::nt("VP", vec![NodeSpec::term("thinks"), NodeSpec::foot("S")]),
            ],
        )
        .with_sa(SelectiveSet::None),
    )
    .unwrap();
    let today = ElementaryTree::auxiliary(
        "beta_today",
        AuxClass::Modifier,
        NodeSpec::nt("S", vec![NodeSpec::foot("S"), NodeSpec::term("today")])
            .with_sa(SelectiveSet::None),
    )
    .unwrap();
    TagGrammar::new("clauses", "S", vec![sleeps, john, mary, thinks, today])
}
