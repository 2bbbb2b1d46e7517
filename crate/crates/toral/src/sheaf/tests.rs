use super::*;
use crate::graded::PolyRing;

fn sg(rank: usize, gens: &[&[i64]]) -> Subgroup {
    Subgroup::new(rank, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn q_at(key: &Subgroup, d: i64) -> GradedModule {
    GradedModule::residue_field(cohomology_ring(key), d)
}

fn fam(base: &Subgroup, comps: Vec<(Subgroup, GradedModule)>) -> TorsionFamily {
    TorsionFamily::new(base.clone(), comps).unwrap()
}

fn dims(m: &GradedModule, range: std::ops::RangeInclusive<i64>) -> Vec<usize> {
    range.map(|d| m.dim(d).unwrap()).collect()
}

#[test]
fn constant_objects() {
    let g = Subgroup::full(1);
    let triv = Subgroup::trivial(1);
    let z2 = sg(1, &[&[2]]);
    let top = f_k(1, &g, fam(&g, vec![(g.clone(), q_at(&g, 0))])).unwrap();
    assert_eq!(top.tops(), vec![g.clone()]);
    assert!(top.in_support(&triv));

    let low = f_k(1, &triv, fam(&triv, vec![(z2.clone(), q_at(&z2, 0))])).unwrap();
    assert_eq!(low.tops(), vec![triv.clone()]);
    assert!(!low.in_support(&g));

    let inj = f_k(1, &triv, fam(&triv, vec![(triv.clone(), GradedModule::free(PolyRing::new(1), vec![0]).dual())])).unwrap();
    assert_eq!(inj.phi(&triv, 4).unwrap().component(&triv).unwrap().dim(4).unwrap(), 1);

    let loc = GradedModule::Localized {
        base: FpModule::free(PolyRing::new(1), vec![0]),
        inverted: Multiplicative::AllOutside { span: vec![] },
        window: 4,
    };
    assert!(matches!(f_k(1, &triv, fam(&triv, vec![(triv.clone(), loc)])), Err(SheafError::NotTorsion(_))));
    assert!(f_k(1, &z2, TorsionFamily::empty(triv.clone())).is_err());
}

#[test]
fn phi_and_counit() {
    let triv = Subgroup::trivial(2);
    let c = sg(2, &[&[0, 1]]);
    let key = sg(2, &[&[0, 3]]);
    let v = fam(&c, vec![(key.clone(), q_at(&key, -2))]);
    let m = f_k(2, &c, v.clone()).unwrap();
    assert_eq!(m.phi(&c, 4).unwrap(), v);
    let other = sg(2, &[&[1, 0]]);
    assert!(m.phi(&other, 4).unwrap().is_empty());
    assert!(matches!(m.phi(&triv, 4), Err(SheafError::InfiniteKeys(_))));

    let o = SheafObject::of(2, vec![Summand::Structure]);
    let g = Subgroup::full(2);
    let top = o.phi(&g, 4).unwrap();
    assert_eq!(top.component(&g).unwrap().dim(0).unwrap(), 1);
    let at_c = o.phi_on(&c, &[c.clone()], 4).unwrap();
    assert_eq!(dims(at_c.component(&c).unwrap(), -4..=0), vec![1, 0, 1, 0, 1]);
}

#[test]
fn localized_components_below() {
    let g = Subgroup::full(1);
    let triv = Subgroup::trivial(1);
    let z2 = sg(1, &[&[2]]);
    let v = fam(&g, vec![(g.clone(), GradedModule::free(PolyRing::new(0), vec![0]))]);
    let below = phi_of_fk_below(&g, &v, &triv, &[triv.clone(), z2.clone()], 4).unwrap();
    assert_eq!(below.component(&triv).unwrap().dim(0).unwrap(), 1);
    assert_eq!(dims(below.component(&z2).unwrap(), -6..=6), vec![1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(phi_of_fk_below(&g, &v, &g, &[g.clone()], 4).unwrap(), v);
}

#[test]
fn fixed_point_examples() {
    let c = sg(2, &[&[0, 1]]);
    let o = SheafObject::of(2, vec![Summand::Structure]);
    let fo = fixed_points(&o, &c).unwrap();
    assert_eq!(fo, SheafObject::of(1, vec![Summand::Structure]));

    let triv = Subgroup::trivial(2);
    let key = sg(2, &[&[2, 0], &[0, 3]]);
    let m = f_k(2, &triv, fam(&triv, vec![(key.clone(), q_at(&key, 0))])).unwrap().twist(&Representation::parse(2, "1,0;0,1").unwrap());
    assert_eq!(fixed_points(&m, &triv).unwrap(), m);

    let ck = sg(2, &[&[0, 2]]);
    let v = fam(&c, vec![(ck.clone(), q_at(&ck, 0))]);
    let fk = f_k(2, &c, v).unwrap();
    let fp = fixed_points(&fk, &c).unwrap();
    assert_eq!(fp.rank, 1);
    assert_eq!(fp.tops(), vec![Subgroup::trivial(1)]);
    assert_eq!(fp.keys(&Subgroup::trivial(1)).finite().unwrap().iter().cloned().collect::<Vec<_>>(), vec![sg(1, &[&[2]])]);
    assert!(fixed_points(&fk, &sg(2, &[&[1, 0]])).unwrap().is_zero());
}

#[test]
fn fixed_points_compose() {
    let triv = Subgroup::trivial(2);
    let c = sg(2, &[&[1, -1]]);
    let key = sg(2, &[&[2, -2]]);
    let base = f_k(2, &c, fam(&c, vec![(key.clone(), q_at(&key, 0))])).unwrap();
    let m = base.direct_sum(&SheafObject::of(2, vec![Summand::Structure, Summand::Cell { h: key.clone() }])).unwrap();
    let once = fixed_points(&m, &triv).unwrap();
    let twice = fixed_points(&once, &quotient_subgroup(&c, &triv).unwrap()).unwrap();
    assert_eq!(twice, fixed_points(&m, &c).unwrap());
}

#[test]
fn hom_into_injective_examples() {
    let triv = Subgroup::trivial(1);
    let o = SheafObject::of(1, vec![Summand::Structure]);
    let h = hom_into_injective(&o, &StandardInjective::new(triv.clone(), 0), 8).unwrap();
    assert_eq!(dims(&h, -2..=7), vec![0, 0, 0, 1, 0, 1, 0, 1, 0, 1]);

    let z2 = sg(1, &[&[2]]);
    let m = f_k(1, &triv, fam(&triv, vec![(z2.clone(), q_at(&z2, 0))])).unwrap();
    let h = hom_into_injective(&m, &StandardInjective::new(sg(1, &[&[3]]), 0), 8).unwrap();
    assert!(dims(&h, -8..=8).iter().all(|&x| x == 0));

    let f = sg(1, &[&[5]]);
    let e = StandardInjective::new(f.clone(), 0);
    let h = hom_into_injective(&e.as_object(), &e, 8).unwrap();
    assert_eq!(dims(&h, -6..=2), vec![1, 0, 1, 0, 1, 0, 1, 0, 0]);
}

#[test]
fn aggregates() {
    let triv = Subgroup::trivial(1);
    let (f1, f2) = (sg(1, &[&[2]]), sg(1, &[&[3]]));
    let m = f_k(1, &triv, fam(&triv, vec![(f1.clone(), q_at(&f1, 0))])).unwrap();
    let agg = InjectiveAggregate::Finite { summands: vec![StandardInjective::new(f1.clone(), 0), StandardInjective::new(f2.clone(), 0)] };
    let out = hom_into_aggregate(&m, &agg, 4).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0.subgroup, f1);

    let all = InjectiveAggregate::AllAtLevels { levels: vec![triv.clone()], shift: 0 };
    let two = m.direct_sum(&f_k(1, &triv, fam(&triv, vec![(f2.clone(), q_at(&f2, 0))])).unwrap()).unwrap();
    let out = hom_into_aggregate(&two, &all, 4).unwrap();
    assert_eq!(out.iter().map(|(i, _)| i.subgroup.clone()).collect::<Vec<_>>(), vec![f1.clone(), f2.clone()]);
    for (i, h) in &out {
        assert_eq!(h, &hom_into_injective(&two, i, 4).unwrap());
    }
    assert!(hom_into_aggregate(&SheafObject::zero(1), &all, 4).unwrap().is_empty());
    let o = SheafObject::of(1, vec![Summand::Structure]);
    assert!(matches!(hom_into_aggregate(&o, &all, 4), Err(SheafError::NoCertificate(_))));
}

#[test]
fn qce_checks() {
    let o1 = SheafObject::of(1, vec![Summand::Structure]);
    let rep = check_qce(&o1, 6, 4);
    assert!(rep.passed(), "{:?}", rep.failures);
    assert!(!rep.checked.is_empty());

    let o2 = SheafObject::of(2, vec![Summand::Structure]);
    let rep = check_qce(&o2, 4, 2);
    assert!(rep.passed(), "{:?}", rep.failures);
    assert!(!rep.checked.is_empty());
    assert!(!rep.triangles_unverified.is_empty());

    let g = Subgroup::full(1);
    let v = fam(&g, vec![(g.clone(), GradedModule::free(PolyRing::new(0), vec![0]))]);
    let fg = f_k(1, &g, v).unwrap();
    let rep = check_qce(&fg, 4, 4);
    assert!(rep.passed() && !rep.checked.is_empty(), "{:?}", rep.failures);

    let mut bad = o1.clone();
    let triv = Subgroup::trivial(1);
    bad.overrides.push(BasingOverride { summand: 0, from: triv.clone(), to: g.clone(), key: sg(1, &[&[2]]), degree: -2, scale: 0 });
    let rep = check_qce(&bad, 6, 4);
    assert!(!rep.passed());
    assert!(rep.failures.iter().all(|f| f.from == triv && f.to == g && f.key == sg(1, &[&[2]])));
}

#[test]
fn dimension_filtration() {
    let triv = Subgroup::trivial(1);
    let g = Subgroup::full(1);
    let (f1, f2) = (sg(1, &[&[2]]), sg(1, &[&[3]]));
    let m = f_k(1, &triv, fam(&triv, vec![(f1.clone(), q_at(&f1, 0)), (f2.clone(), q_at(&f2, 0))])).unwrap();
    let layer = decompose_by_dimension(&m).unwrap();
    assert_eq!(layer.top, m);
    assert!(layer.kernel.is_zero() && layer.cokernel.is_zero());
    assert_eq!(layer.top.keys(&triv).finite().unwrap().len(), 2);

    let o = SheafObject::of(1, vec![Summand::Structure]);
    let layer = decompose_by_dimension(&o).unwrap();
    assert_eq!(layer.dim, 1);
    assert!(layer.kernel.is_zero());
    assert_eq!(layer.top.tops(), vec![g.clone()]);
    assert_eq!(layer.cokernel.support_dim(), Some(0));
    assert_eq!(filtration_length(&o).unwrap(), 2);

    let mixed = m.direct_sum(&f_k(1, &g, fam(&g, vec![(g.clone(), q_at(&g, 0))])).unwrap()).unwrap();
    let layer = decompose_by_dimension(&mixed).unwrap();
    assert_eq!(layer.kernel.support_dim(), Some(0));
    assert!(filtration_length(&mixed).unwrap() <= 2);
}
