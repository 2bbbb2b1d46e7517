use super::*;
use crate::cells::{basic_cell, e_bracket, structure_sheaf};
use crate::graded::{q, Poly};
use crate::sheaf::f_k;

fn sg(rank: usize, gens: &[&[i64]]) -> Subgroup {
    Subgroup::new(rank, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn shifts(r: &Resolution) -> Vec<i64> {
    r.stages
        .iter()
        .map(|s| match &s.entries[0].term {
            StageTerm::Named { shift, .. } => *shift,
            _ => panic!("named stage expected"),
        })
        .collect()
}

#[test]
fn koszul_shapes() {
    let g = Subgroup::full(1);
    let r = koszul_resolution(&g, 4).unwrap();
    assert_eq!(r.length(), 0);

    let r = koszul_resolution(&Subgroup::trivial(1), 6).unwrap();
    assert_eq!(r.multiplicities(), vec![1, 1]);
    assert_eq!(shifts(&r), vec![0, 2]);
    assert!(r.exact(), "{:?}", r.checks);

    let r = koszul_resolution(&Subgroup::trivial(2), 6).unwrap();
    assert_eq!(r.multiplicities(), vec![1, 2, 1]);
    assert_eq!(shifts(&r), vec![0, 2, 4]);
    assert!(r.exact(), "{:?}", r.checks);

    let circle = sg(2, &[&[0, 1]]);
    let r = koszul_resolution(&circle, 6).unwrap();
    assert_eq!(r.multiplicities(), vec![1, 1]);
    assert!(r.exact(), "{:?}", r.checks);
    assert!(r.checks.iter().any(|c| c.method == CheckMethod::SliceReduction));

    let disc = sg(2, &[&[0, 2]]);
    let r = koszul_resolution(&disc, 4).unwrap();
    assert_eq!(r.checks.iter().filter(|c| c.method == CheckMethod::Computed).count(), 2);
    assert!(r.exact(), "{:?}", r.checks);
}

#[test]
fn codim_shapes() {
    let z4 = sg(1, &[&[4]]);
    let r = codim_resolution(&z4, &[], None, 4).unwrap();
    assert_eq!(r.length(), 0);
    assert_eq!(r.multiplicities(), vec![3]);
    assert!(r.certified() && r.exact());

    let triv = Subgroup::trivial(2);
    let r = codim_resolution(&triv, &[], None, 4).unwrap();
    assert_eq!(r.multiplicities(), vec![1]);

    let g = Subgroup::full(1);
    let universe = vec![sg(1, &[&[2]]), sg(1, &[&[3]]), Subgroup::trivial(1)];
    let r = codim_resolution(&g, &universe, None, 4).unwrap();
    assert_eq!(r.length(), 1);
    assert!(!r.certified());
    assert_eq!(r.aggregates()[1].len(), 3);
    assert!(matches!(r.stages[1].entries.last().unwrap().term, StageTerm::Remainder { dim: 0, shift: 1, .. }));

    let src = basic_cell(&sg(1, &[&[5]]));
    match codim_resolution(&g, &universe, Some(&src), 4) {
        Err(ResolveError::UniverseInsufficient { missing }) => assert_eq!(missing, sg(1, &[&[5]])),
        other => panic!("expected a missing subgroup, got {other:?}"),
    }
    assert!(codim_resolution(&g, &universe, Some(&basic_cell(&sg(1, &[&[3]]))), 4).is_ok());
}

#[test]
fn injective_examples() {
    let f = sg(1, &[&[3]]);
    let r = injective_resolution(&e_bracket(&f), 4).unwrap();
    assert_eq!(r.length(), 0);

    let triv = Subgroup::trivial(1);
    let q0 = GradedModule::residue_field(PolyRing::new(1), 0);
    let m = f_k(1, &triv, TorsionFamily::new(triv.clone(), vec![(f.clone(), q0)]).unwrap()).unwrap();
    let r = injective_resolution(&m, 6).unwrap();
    assert_eq!(r.length(), 1);
    assert!(r.exact(), "{:?}", r.checks);
    assert_eq!(r.syzygies.len(), 2);
    let StageTerm::Injective { aggregate: InjectiveAggregate::Finite { summands } } = &r.stages[1].entries[0].term else {
        panic!()
    };
    assert_eq!(summands[0], StandardInjective::new(f.clone(), 1));

    let r = injective_resolution(&basic_cell(&f), 6).unwrap();
    assert!(r.length() <= 2 && r.exact());

    let r = injective_resolution(&structure_sheaf(1), 4).unwrap();
    assert_eq!(r.length(), 1);
    assert!(matches!(
        &r.stages[1].entries[0].term,
        StageTerm::Injective { aggregate: InjectiveAggregate::AllAtLevels { shift: 1, .. } }
    ));
    assert!(injective_resolution(&structure_sheaf(2), 4).is_err());
}

#[test]
fn injective_rank_two() {
    let triv = Subgroup::trivial(2);
    let key = sg(2, &[&[2, 0], &[0, 3]]);
    let ring = PolyRing::new(2);
    let forms = [Poly::monomial(vec![2, 0], q(1)), Poly::var(2, 1)];
    let v = FpModule::quotient_by(ring, 0, &forms);
    let m = f_k(2, &triv, TorsionFamily::new(triv.clone(), vec![(key.clone(), GradedModule::Fp(v))]).unwrap()).unwrap();
    let r = injective_resolution(&m, 4).unwrap();
    assert_eq!(r.length(), 2);
    assert!(r.exact(), "{:?}", r.checks);
    assert_eq!(r.multiplicities(), vec![1, 2, 1]);

    let circle = sg(2, &[&[0, 1]]);
    let ck = sg(2, &[&[0, 2]]);
    let c = f_k(2, &circle, TorsionFamily::new(circle.clone(), vec![(ck.clone(), GradedModule::residue_field(PolyRing::new(1), -2))]).unwrap()).unwrap();
    let twisted = c.twist(&crate::lattice::Representation::parse(2, "1,0;0,1").unwrap());
    let r = injective_resolution(&twisted, 4).unwrap();
    assert_eq!(r.length(), 1);
    assert!(r.exact());
}

#[test]
fn resolution_json_round_trip() {
    let r = koszul_resolution(&Subgroup::trivial(1), 4).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: Resolution = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    let triv = Subgroup::trivial(1);
    let m = f_k(1, &triv, TorsionFamily::new(triv.clone(), vec![(sg(1, &[&[2]]), GradedModule::residue_field(PolyRing::new(1), 0))]).unwrap()).unwrap();
    let r = injective_resolution(&m, 4).unwrap();
    let back: Resolution = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}
