// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use covpovm::group::{
    all_subgroups, build_group, coset_space, find_cyclic_transitive_subgroup, is_prime, FiniteGroup,
    GroupKind, Subgroup,
};
use proptest::prelude::*;

fn order8() -> Vec<FiniteGroup> {
    GroupKind::all_order8().iter().map(|k| build_group(k).unwrap()).collect()
}

#[test]
fn inverse_is_involution_and_identity_unique() {
    for g in order8() {
        for x in g.elements() {
            assert_eq!(g.inv(g.inv(x)), x);
            assert_eq!(g.mul(x, g.inv(x)), g.identity());
        }
        let ids: Vec<usize> = g
            .elements()
            .filter(|&e| g.elements().all(|x| g.mul(e, x) == x && g.mul(x, e) == x))
            .collect();
        assert_eq!(ids, vec![g.identity()]);
    }
}

#[test]
fn lagrange_for_every_subgroup() {
    for g in order8() {
        let subs = all_subgroups(&g);
        assert!(subs.iter().any(|h| h.order() == 1));
        assert!(subs.iter().any(|h| h.order() == 8));
        for h in subs {
            assert_eq!(g.order() % h.order(), 0);
            let cs = coset_space(&g, &h).unwrap();
            assert_eq!(cs.len() * h.order(), g.order());
        }
    }
}

#[test]
fn prime_index_always_has_cyclic_transitive_subgroup() {
    let mut checked = 0;
    for g in order8() {
        for h in all_subgroups(&g) {
            let index = g.order() / h.order();
            if index > 1 && is_prime(index) {
                let found = find_cyclic_transitive_subgroup(&g, &h).unwrap();
                let c = found.unwrap_or_else(|| panic!("{:?} / {:?}", g.kind(), h.members()));
                assert!(coset_space(&g, &h).unwrap().is_transitive_under(c.subgroup.members()));
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn quaternion_mod_center_has_no_cyclic_transitive_subgroup() {
    let q = build_group(&GroupKind::Quaternion).unwrap();
    let center = Subgroup::new(&q, [q.index_of("1").unwrap(), q.index_of("-1").unwrap()]).unwrap();
    assert_eq!(find_cyclic_transitive_subgroup(&q, &center).unwrap(), None);
}

#[test]
fn census_separates_nonabelian_groups() {
    let census = |k| build_group(&k).unwrap().order_census();
    assert_eq!(census(GroupKind::Quaternion), BTreeMap::from([(1, 1), (2, 1), (4, 6)]));
    assert_eq!(census(GroupKind::Dihedral8), BTreeMap::from([(1, 1), (2, 5), (4, 2)]));
}

proptest! {
    #[test]
    fn cyclic_products_are_abelian_groups(a in 1usize..7, b in 1usize..7) {
        let g = build_group(&GroupKind::product(GroupKind::Cyclic(a), GroupKind::Cyclic(b))).unwrap();
        prop_assert_eq!(g.order(), a * b);
        prop_assert!(g.is_abelian());
        for x in g.elements() {
            prop_assert_eq!(g.inv(g.inv(x)), x);
            prop_assert_eq!(g.order() % g.element_order(x), 0);
        }
        let json = g.to_json();
        let back = FiniteGroup::from_json(&json).unwrap();
        prop_assert_eq!(back.order(), g.order());
    }
}
