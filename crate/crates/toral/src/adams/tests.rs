use super::*;
use crate::resolve::{codim_resolution, koszul_resolution};

fn sg(rank: usize, gens: &[&[i64]]) -> Subgroup {
    Subgroup::new(rank, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn cell(h: Subgroup) -> NamedObject {
    NamedObject::BasicCell { h }
}

#[test]
fn ext_examples() {
    let triv = Subgroup::trivial(1);
    let c = ext(&cell(triv.clone()), &cell(triv.clone()), 6).unwrap();
    assert_eq!(c.get(0, 0), 1);
    assert!(c.exact && !c.truncated);
    assert_eq!((c.column_total(0), c.column_total(1)), (1, 1));
    assert_eq!(c.entries.len(), 2);

    let c = ext(&cell(sg(1, &[&[2]])), &cell(sg(1, &[&[3]])), 6).unwrap();
    assert!(c.entries.is_empty());

    let f = sg(2, &[&[2, 0], &[0, 2]]);
    let c = ext(&cell(f.clone()), &cell(f), 6).unwrap();
    assert_eq!((c.column_total(0), c.column_total(1), c.column_total(2)), (1, 2, 1));
    assert!(vanishing_check(&c).is_ok());
}

#[test]
fn positive_dimensional_sources() {
    let circle = sg(2, &[&[0, 1]]);
    let c = ext(&cell(circle.clone()), &cell(circle.clone()), 4).unwrap();
    assert!(c.truncated);
    assert_eq!(c.get(0, 0), 1);
    let c = ext(&cell(circle), &cell(Subgroup::full(2)), 4).unwrap();
    assert_eq!(c.get(0, 0), 0);
    let g = Subgroup::full(1);
    let c = ext(&cell(Subgroup::trivial(1)), &cell(g), 4).unwrap();
    assert_eq!(c.get(0, 0), 0);
    assert_eq!(c.column_total(0), 1);
}

#[test]
fn hom0_examples() {
    let g = Subgroup::full(1);
    let table = hom0_table(&[(Subgroup::trivial(1), g.clone()), (sg(1, &[&[2]]), g.clone()), (g.clone(), sg(1, &[&[2]]))]).unwrap();
    assert_eq!(table, vec![1, 1, 0]);
    let (c1, c2) = (sg(2, &[&[0, 1]]), sg(2, &[&[1, 0]]));
    assert_eq!(hom0_table(&[(c1, c2)]).unwrap(), vec![0]);
}

#[test]
fn vanishing_controls() {
    let triv = Subgroup::trivial(1);
    let mut c = ext(&cell(triv.clone()), &cell(triv.clone()), 6).unwrap();
    assert!(vanishing_check(&c).is_ok());
    c.set(2, 1, 1);
    assert_eq!(vanishing_check(&c), Err(VanishingError::Falsified { s: 2, t: 1, dim: 1 }));
    let zero = E2Chart::empty("x".into(), "x".into(), 1, (-2, 2));
    assert!(vanishing_check(&zero).is_ok());
}

#[test]
fn connectivity_examples() {
    let g = Subgroup::full(2);
    let triv = Subgroup::trivial(2);
    assert_eq!(algconn(&NamedObject::EBracket { k: triv.clone() }, &g).unwrap(), ConnVal::Finite(1));
    let circle = sg(2, &[&[0, 1]]);
    assert_eq!(algconn(&NamedObject::EBracket { k: circle.clone() }, &triv).unwrap(), ConnVal::Infinite);
    assert_eq!(algconn(&NamedObject::NaturalCell { k: circle.clone() }, &circle).unwrap(), ConnVal::Finite(-1));
    assert!(algconn(&NamedObject::Sphere { rank: 2 }, &g).is_err());

    let shape = shape_of(&koszul_resolution(&triv, 2).unwrap());
    assert_eq!(propagate_connectivity(&shape, &g).unwrap(), Ok(ConnVal::Finite(1)));
    let shape = shape_of(&codim_resolution(&g, &[circle.clone(), triv.clone()], None, 2).unwrap());
    assert_eq!(propagate_connectivity(&shape, &g).unwrap(), Ok(ConnVal::Finite(-1)));
    assert_eq!(propagate_connectivity(&shape, &circle).unwrap().unwrap_err().stage, 1);

    let single = vec![vec![(ShapeTerm::Object(NamedObject::EBracket { k: circle.clone() }), 0)]];
    assert_eq!(propagate_connectivity(&single, &g).unwrap(), Ok(ConnVal::Finite(0)));
    let broken = vec![single[0].clone(), vec![(ShapeTerm::Object(NamedObject::EBracket { k: circle.clone() }), 0)]];
    let err = propagate_connectivity(&broken, &g).unwrap().unwrap_err();
    assert_eq!(err.stage, 1);
}

#[test]
fn chart_rendering() {
    let empty = E2Chart::empty("a".into(), "b".into(), 1, (-1, 1));
    let text = emit_chart(&empty, ChartFormat::Ascii);
    assert!(text.starts_with("E2 a -> b"));
    assert_eq!(text.lines().count(), 1 + 3 + 1);
    assert!(text.lines().skip(1).take(3).all(|l| l.split('|').nth(1).unwrap().trim_matches(|c| c == ' ' || c == '.').is_empty()));

    let mut one = E2Chart::empty("a".into(), "a".into(), 1, (0, 0));
    one.set(0, 0, 1);
    let json = emit_chart(&one, ChartFormat::Json);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["entries"], serde_json::json!([{"s": 0, "t": 0, "dim": 1}]));
    assert_eq!(v["schema"], 1);
    assert_eq!(load_chart(&json).unwrap(), one);
    assert!(emit_chart(&one, ChartFormat::Svg).starts_with("<svg"));

    let triv = Subgroup::trivial(2);
    let c = ext(&cell(triv.clone()), &cell(triv), 4).unwrap();
    let json = emit_chart(&c, ChartFormat::Json);
    assert_eq!(load_chart(&json).unwrap(), c);
    assert_eq!(emit_chart(&load_chart(&json).unwrap(), ChartFormat::Json), json);

    let bad = json.replacen("\"schema\": 1", "\"schema\": 2", 1);
    assert!(matches!(load_chart(&bad), Err(AdamsError::Schema { found: 2, .. })));
    assert!(matches!(load_chart("{\"schema\": 1"), Err(AdamsError::Malformed(_))));
}
