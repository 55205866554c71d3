mod common;

use std::cmp::Ordering;

use cdelab::chain::{verify_almost_chain, ChainFamily};
use cdelab::tree::{enumerate_level, lex_cmp, Branch, TreeKind, TreeNode};
use common::{dyadic_member, dyadic_nodes, seeded_dyadic, unroll};
use proptest::prelude::*;

fn bits(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..2, 0..max)
}

fn dyadic_branch() -> impl Strategy<Value = Branch> {
    (bits(8), prop::collection::vec(0u32..2, 1..5))
        .prop_map(|(p, q)| Branch::new(TreeKind::Dyadic, p, q).unwrap())
}

fn factorial_node() -> impl Strategy<Value = TreeNode> {
    prop::collection::vec(0u32..1000, 0..7).prop_map(|raw| {
        let syms = raw.iter().enumerate().map(|(i, s)| s % (i as u32 + 1)).collect();
        TreeNode::new(TreeKind::Factorial, syms).unwrap()
    })
}

fn dyadic_node(max: usize) -> impl Strategy<Value = TreeNode> {
    bits(max).prop_map(|s| TreeNode::new(TreeKind::Dyadic, s).unwrap())
}

proptest! {
    #[test]
    fn node_order_is_vector_order(a in factorial_node(), b in factorial_node()) {
        prop_assert_eq!(lex_cmp(&a, &b), a.symbols().cmp(b.symbols()));
    }

    #[test]
    fn branch_order_matches_unrolled(x in dyadic_branch(), y in dyadic_branch()) {
        prop_assert_eq!(lex_cmp(&x, &y), unroll(&x, 64).cmp(&unroll(&y, 64)));
        prop_assert_eq!(lex_cmp(&x, &y) == Ordering::Equal, x == y);
    }

    #[test]
    fn node_against_branch(s in dyadic_node(10), x in dyadic_branch()) {
        let below = common::node_below(s.symbols(), &unroll(&x, 64));
        prop_assert_eq!(lex_cmp(&s, &x) == Ordering::Less, below);
        prop_assert_eq!(lex_cmp(&x, &s), lex_cmp(&s, &x).reverse());
    }

    #[test]
    fn order_is_transitive(a in dyadic_node(6), b in dyadic_branch(), c in dyadic_node(6)) {
        let ab = lex_cmp(&a, &b);
        let bc = lex_cmp(&b, &c);
        if ab != Ordering::Greater && bc != Ordering::Greater {
            prop_assert_ne!(lex_cmp(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn canonical_form_ignores_presentation(p in bits(6), q in prop::collection::vec(0u32..2, 1..4), extra in 0usize..5) {
        let x = Branch::new(TreeKind::Dyadic, p.clone(), q.clone()).unwrap();
        let mut longer = p.clone();
        longer.extend(q.iter().cycle().take(extra));
        let mut rotated = q.clone();
        rotated.rotate_left(extra % q.len());
        let doubled: Vec<u32> = q.iter().chain(q.iter()).copied().collect();
        prop_assert_eq!(&Branch::new(TreeKind::Dyadic, longer, rotated).unwrap(), &x);
        prop_assert_eq!(&Branch::new(TreeKind::Dyadic, p, doubled).unwrap(), &x);
        prop_assert_eq!(Branch::parse(TreeKind::Dyadic, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn membership_matches_reference(seed in any::<u64>(), count in 1usize..10) {
        let family = seeded_dyadic(seed, count, 7);
        let gens: Vec<Vec<u32>> = family.generators().iter().map(|g| unroll(g, 8)).collect();
        for s in dyadic_nodes(7) {
            let node = TreeNode::new(TreeKind::Dyadic, s.clone()).unwrap();
            for (i, x) in gens.iter().enumerate() {
                prop_assert_eq!(family.contains(&node, i), dyadic_member(&s, x), "{} in x{}", node, i);
            }
        }
    }

    #[test]
    fn sampled_families_are_almost_chains(seed in any::<u64>(), count in 2usize..24) {
        let family = seeded_dyadic(seed, count, 9);
        prop_assert!(family.generators().windows(2).all(|w| lex_cmp(&w[0], &w[1]) == Ordering::Less));
        prop_assert!(family.generators().iter().all(Branch::is_admissible_generator));
        let report = verify_almost_chain(&family);
        prop_assert!(report.passed());
        // Violations of x ≺ y sit exactly at the node x|(m+1) when y(m) = 1.
        for v in &report.violations {
            for n in &v.nodes {
                prop_assert!(n.len() <= v.divergence + 1);
            }
        }
    }
}

#[test]
fn levels_enumerate_in_order() {
    for kind in [TreeKind::Dyadic, TreeKind::Factorial] {
        let level = enumerate_level(kind, 5).unwrap();
        let expected = kind.level_size(5).unwrap() as usize;
        assert_eq!(level.len(), expected);
        assert!(level.windows(2).all(|w| lex_cmp(&w[0], &w[1]) == Ordering::Less));
    }
}

#[test]
fn family_json_roundtrip() {
    let family = seeded_dyadic(4, 12, 8);
    let back = ChainFamily::from_json(&family.to_json().unwrap()).unwrap();
    assert_eq!(back.generators(), family.generators());
    assert_eq!(back.depth(), family.depth());
}
