//! The ring-valued functor `K̃ ↦ H*(BG/K̃)`, inflation maps, Euler classes
//! and finitely supported families of torsion modules over it.

use crate::graded::{GradedError, GradedMap, GradedModule, Poly, PolyRing, Q};
use crate::lattice::{Representation, Subgroup};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("key {key:?} has identity component {found:?}, expected {base:?}")]
    WrongLevel { key: Subgroup, found: Subgroup, base: Subgroup },
    #[error("component at {key:?} lives over {got} generators, expected {want}")]
    WrongRing { key: Subgroup, got: usize, want: usize },
    #[error("base subgroup {0:?} is not connected")]
    Disconnected(Subgroup),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// `H*(BG/K̃)`: polynomial on a basis of `Λ(K̃)`.
pub fn cohomology_ring(k: &Subgroup) -> PolyRing {
    PolyRing::new(k.codim())
}

/// `c_1(α)` in `H^2(BG/K̃)`, defined when `α` is trivial on `K̃`.
pub fn first_chern(alpha: &[i64], k: &Subgroup) -> Option<Poly> {
    k.char_coords(alpha).map(|c| Poly::linear(&c))
}

/// `e(V)(K̃)`: product over the characters of `V` of `c_1(α)` when `α` is
/// trivial on `K̃` and `1` otherwise. Its degree is `-dim_R V^{K̃}`.
pub fn euler_component(v: &Representation, k: &Subgroup) -> Poly {
    let n = k.codim();
    v.0.iter().fold(Poly::one(n), |acc, a| match first_chern(&a.0, k) {
        Some(c) => acc.mul(&c),
        None => acc,
    })
}

/// Inflation `H*(BG/L̃) → H*(BG/F)` for `F ⊆ L̃`, as images of the generators of the source.
pub fn inflation_map(source: &Subgroup, target: &Subgroup) -> Option<Vec<Poly>> {
    if !source.contains(target) {
        return None;
    }
    source.char_basis().iter().map(|b| first_chern(b, target)).collect()
}

/// A torsion `O_{F/K}`-module presented by finitely many components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionFamily {
    pub base: Subgroup,
    #[serde(with = "pairs")]
    components: BTreeMap<Subgroup, GradedModule>,
}

/// Maps with structured keys, written as lists of pairs.
mod pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

impl TorsionFamily {
    pub fn empty(base: Subgroup) -> Self {
        Self { base, components: BTreeMap::new() }
    }

    pub fn new(base: Subgroup, components: Vec<(Subgroup, GradedModule)>) -> Result<Self, FamilyError> {
        if !base.is_connected() {
            return Err(FamilyError::Disconnected(base));
        }
        let mut fam = Self::empty(base);
        for (k, m) in components {
            fam.insert(k, m)?;
        }
        Ok(fam)
    }

    /// Add a component, summing with any existing one at the same key.
    pub fn insert(&mut self, key: Subgroup, module: GradedModule) -> Result<(), FamilyError> {
        let found = key.identity_component();
        if found != self.base {
            return Err(FamilyError::WrongLevel { key, found, base: self.base.clone() });
        }
        let want = key.codim();
        if module.ring().num_gens != want {
            return Err(FamilyError::WrongRing { key, got: module.ring().num_gens, want });
        }
        let ring = module.ring();
        let merged = match self.components.remove(&key) {
            Some(prev) => GradedModule::sum(ring, vec![prev, module]),
            None => module,
        };
        self.components.insert(key, merged);
        Ok(())
    }

    pub fn keys(&self) -> impl Iterator<Item = &Subgroup> {
        self.components.keys()
    }

    pub fn component(&self, key: &Subgroup) -> Option<&GradedModule> {
        self.components.get(key)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Subgroup, &GradedModule)> {
        self.components.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Per-key shift, e.g. by the fixed dimension of a representation.
    pub fn shifted_by(&self, f: impl Fn(&Subgroup) -> i64) -> Self {
        let components = self.components.iter().map(|(k, m)| (k.clone(), m.clone().shift(f(k)))).collect();
        Self { base: self.base.clone(), components }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, FamilyError> {
        let mut out = self.clone();
        for (k, m) in &other.components {
            out.insert(k.clone(), m.clone())?;
        }
        Ok(out)
    }

    /// Restrict to the given keys.
    pub fn restrict(&self, keep: impl Fn(&Subgroup) -> bool) -> Self {
        Self {
            base: self.base.clone(),
            components: self.components.iter().filter(|(k, _)| keep(k)).map(|(k, m)| (k.clone(), m.clone())).collect(),
        }
    }
}

/// The structure family `O_{F/K}` truncated to `keys`.
pub fn structure_family(base: &Subgroup, keys: &[Subgroup]) -> Result<TorsionFamily, FamilyError> {
    let comps = keys.iter().map(|k| (k.clone(), GradedModule::free(cohomology_ring(k), vec![0]))).collect();
    TorsionFamily::new(base.clone(), comps)
}

/// Result of multiplying a family by `e(V)`, both in the original grading.
#[derive(Clone, Debug)]
pub struct EulerProduct {
    pub image: TorsionFamily,
    pub kernel: TorsionFamily,
}

/// Componentwise multiplication by `e(V)`. Components must be finitely presented.
pub fn euler_multiplication(x: &TorsionFamily, v: &Representation, window: i64) -> Result<EulerProduct, FamilyError> {
    let mut image = TorsionFamily::empty(x.base.clone());
    let mut kernel = TorsionFamily::empty(x.base.clone());
    for (k, m) in &x.components {
        let GradedModule::Fp(fp) = m else {
            return Err(GradedError::Unsupported(format!("euler multiplication on a {} component", m.mode_name())).into());
        };
        let e = euler_component(v, k);
        let de = e.degree().unwrap_or(0);
        let f = GradedMap::new(fp.shift(de), fp.clone(), (0..fp.gens.len()).map(|g| unit_row(fp.gens.len(), g, &e)).collect())?;
        image.insert(k.clone(), GradedModule::Fp(f.image(window)?.shift(-de)).shift(de))?;
        kernel.insert(k.clone(), GradedModule::Fp(f.kernel(window)?.shift(-de)))?;
    }
    Ok(EulerProduct { image, kernel })
}

fn unit_row(n: usize, g: usize, e: &Poly) -> Vec<Poly> {
    (0..n).map(|i| if i == g { e.clone() } else { Poly::zero() }).collect()
}

/// An element of a family: coordinates in one degree per key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyElement {
    pub degree: i64,
    pub parts: BTreeMap<Subgroup, Vec<Q>>,
}

/// `spread(x)`: keys where the component of `x` is nonzero.
pub fn spread(x: &FamilyElement) -> Vec<Subgroup> {
    x.parts.iter().filter(|(_, v)| v.iter().any(|c| !c.is_zero())).map(|(k, _)| k.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{q, FpModule};
    use crate::lattice::Character;

    fn sg(rank: usize, gens: &[&[i64]]) -> Subgroup {
        Subgroup::new(rank, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn rep(cs: &[&[i64]]) -> Representation {
        Representation(cs.iter().map(|c| Character(c.to_vec())).collect())
    }

    #[test]
    fn euler_examples() {
        let v = rep(&[&[1], &[2]]);
        let e = euler_component(&v, &Subgroup::trivial(1));
        assert_eq!(e, Poly::monomial(vec![2], q(2)));
        assert_eq!(euler_component(&v, &sg(1, &[&[2]])), Poly::var(1, 0));
        assert_eq!(euler_component(&v, &sg(1, &[&[3]])), Poly::one(1));
        assert_eq!(e.degree(), Some(-v.fixed_dimension(&Subgroup::trivial(1))));
    }

    #[test]
    fn inflation_examples() {
        let triv = Subgroup::trivial(1);
        assert_eq!(inflation_map(&triv, &triv).unwrap(), vec![Poly::var(1, 0)]);
        assert!(inflation_map(&Subgroup::full(1), &sg(1, &[&[5]])).unwrap().is_empty());
        let circle = sg(2, &[&[0, 1]]);
        assert_eq!(inflation_map(&circle, &Subgroup::trivial(2)).unwrap(), vec![Poly::var(2, 1)]);
        assert!(inflation_map(&sg(1, &[&[2]]), &sg(1, &[&[3]])).is_none());
    }

    #[test]
    fn euler_multiplication_examples() {
        let triv = Subgroup::trivial(1);
        let z = rep(&[&[1]]);
        let fam = TorsionFamily::new(triv.clone(), vec![(triv.clone(), GradedModule::residue_field(PolyRing::new(1), 0))]).unwrap();
        let out = euler_multiplication(&fam, &z, 4).unwrap();
        assert_eq!(out.kernel.component(&triv).unwrap().dim(0).unwrap(), 1);
        assert!((-6..=2).all(|d| out.image.component(&triv).unwrap().dim(d).unwrap() == 0));

        let c2 = FpModule::quotient_by(PolyRing::new(1), 0, &[Poly::monomial(vec![2], q(1))]);
        let fam = TorsionFamily::new(triv.clone(), vec![(triv.clone(), GradedModule::Fp(c2))]).unwrap();
        let out = euler_multiplication(&fam, &z, 4).unwrap();
        let img = out.image.component(&triv).unwrap();
        let ker = out.kernel.component(&triv).unwrap();
        for d in -6..=2 {
            assert_eq!(img.dim(d).unwrap(), usize::from(d == -2), "image at {d}");
            assert_eq!(ker.dim(d).unwrap(), usize::from(d == -2), "kernel at {d}");
        }

        let none = rep(&[&[1]]);
        let z3 = sg(1, &[&[3]]);
        let fam = TorsionFamily::new(triv.clone(), vec![(z3.clone(), GradedModule::residue_field(PolyRing::new(1), 0))]).unwrap();
        let out = euler_multiplication(&fam, &none, 4).unwrap();
        assert_eq!(out.image.component(&z3).unwrap().dim(0).unwrap(), 1);
    }

    #[test]
    fn families_validate_levels() {
        let triv = Subgroup::trivial(2);
        let circle = sg(2, &[&[0, 1]]);
        assert!(TorsionFamily::new(triv.clone(), vec![(circle.clone(), GradedModule::residue_field(PolyRing::new(1), 0))]).is_err());
        assert!(TorsionFamily::new(triv.clone(), vec![(triv.clone(), GradedModule::residue_field(PolyRing::new(1), 0))]).is_err());
        assert!(TorsionFamily::new(sg(1, &[&[2]]), vec![]).is_err());
    }

    #[test]
    fn spreads() {
        assert!(spread(&FamilyElement::default()).is_empty());
        let a = sg(1, &[&[2]]);
        let b = sg(1, &[&[3]]);
        let mut x = FamilyElement { degree: 0, parts: BTreeMap::new() };
        x.parts.insert(a.clone(), vec![q(1)]);
        assert_eq!(spread(&x), vec![a.clone()]);
        x.parts.insert(b.clone(), vec![q(2)]);
        x.parts.insert(Subgroup::trivial(1), vec![q(0)]);
        assert_eq!(spread(&x).len(), 2);
    }
}
