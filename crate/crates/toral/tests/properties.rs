use proptest::prelude::*;
use toral::lattice::{is_cotoral, Subgroup};

fn subgroup(rank: usize) -> impl Strategy<Value = Subgroup> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, rank), 0..=rank).prop_filter_map("independent rows", move |rows| Subgroup::new(rank, &rows).ok())
}

proptest! {
    #[test]
    fn meet_and_join_bound(a in subgroup(2), b in subgroup(2)) {
        let (m, j) = (a.intersect(&b).unwrap(), a.join(&b).unwrap());
        prop_assert!(a.contains(&m) && b.contains(&m));
        prop_assert!(j.contains(&a) && j.contains(&b));
        prop_assert_eq!(a.dim() + b.dim(), m.dim() + j.dim());
    }

    #[test]
    fn cotorality_is_reflexive_and_antisymmetric(a in subgroup(2), b in subgroup(2)) {
        prop_assert!(is_cotoral(&a, &a).unwrap());
        if is_cotoral(&a, &b).unwrap() && is_cotoral(&b, &a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn identity_component_is_cotoral(a in subgroup(2)) {
        let a1 = a.identity_component();
        prop_assert!(a.contains(&a1));
        prop_assert_eq!(a1.dim(), a.dim());
        prop_assert!(is_cotoral(&Subgroup::trivial(2), &a1).unwrap());
    }
}
