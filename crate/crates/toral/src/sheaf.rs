//! Objects of the algebraic model, presented by their basing data `K ↦ φ^K M`
//! and queried stalkwise. Values `M(U(K))` are never materialized.

use crate::graded::{hom_into_dual, FpModule, GradedError, GradedMap, GradedModule, Extent, Multiplicative, Poly, PolyRing, QMat};
use crate::lattice::{is_cotoral, small_subgroups, Character, LatticeError, Representation, Subgroup};
use crate::ofmod::{cohomology_ring, inflation_map, FamilyError, TorsionFamily};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("component at key {0} is neither torsion nor an allowed non-torsion input")]
    NotTorsion(String),
    #[error("{0} is not connected")]
    Disconnected(String),
    #[error("infinitely many keys at level {0}")]
    InfiniteKeys(String),
    #[error("aggregate has no finite-contribution certificate: {0}")]
    NoCertificate(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, SheafError>;

/// Keys present at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeySet {
    Finite(BTreeSet<Subgroup>),
    Infinite,
}

impl KeySet {
    fn union(self, other: KeySet) -> KeySet {
        match (self, other) {
            (KeySet::Finite(mut a), KeySet::Finite(b)) => {
                a.extend(b);
                KeySet::Finite(a)
            }
            _ => KeySet::Infinite,
        }
    }

    pub fn finite(&self) -> Option<&BTreeSet<Subgroup>> {
        match self {
            KeySet::Finite(s) => Some(s),
            KeySet::Infinite => None,
        }
    }
}

/// One indecomposable-by-construction piece of an object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summand {
    /// `f_K(V)`.
    Constant { level: Subgroup, family: TorsionFamily },
    /// `f_L` of the same free or divisible module at every key with identity component `L`.
    Uniform { level: Subgroup, divisible: bool, shift: i64 },
    /// The structure sheaf.
    Structure,
    /// The image of the basic cell at `h`.
    Cell { h: Subgroup },
    /// The universal space for the family of subgroups of `h`.
    Universal { h: Subgroup },
    Shifted { by: i64, of: Box<Summand> },
    /// Per-key shift by the fixed dimension of a representation.
    Twisted { rep: Representation, of: Box<Summand> },
}

fn uniform_module(key: &Subgroup, divisible: bool, shift: i64) -> GradedModule {
    let ring = cohomology_ring(key);
    if divisible {
        GradedModule::free(ring, vec![-shift]).dual()
    } else {
        GradedModule::free(ring, vec![shift])
    }
}

fn as_fp(m: &GradedModule) -> Option<FpModule> {
    match m {
        GradedModule::Fp(f) => Some(f.clone()),
        GradedModule::Shift { by, of } => as_fp(of).map(|f| f.shift(*by)),
        GradedModule::Sum { parts, .. } => {
            let fps: Option<Vec<FpModule>> = parts.iter().map(as_fp).collect();
            fps.map(|v| FpModule::direct_sum(&v))
        }
        // over Q the dual of a finite-dimensional module is free
        GradedModule::Dual { of } if m.ring().num_gens == 0 => {
            let inner = as_fp(of)?;
            let Extent::Range { lo: Some(lo), hi: Some(hi) } = of.extent() else {
                return (of.extent() == Extent::Empty).then(|| FpModule::free(m.ring(), vec![]));
            };
            let gens = (lo..=hi).rev().flat_map(|d| std::iter::repeat(-d).take(inner.dim(d))).collect();
            Some(FpModule::free(m.ring(), gens))
        }
        _ => None,
    }
}

/// Coordinates of the basis of `Λ(outer)` in the basis of `Λ(inner)`, for `inner ⊆ outer`.
fn span_in(outer: &Subgroup, inner: &Subgroup) -> Vec<Vec<i64>> {
    outer.char_basis().iter().map(|b| inner.char_coords(b).expect("inner is contained in outer")).collect()
}

impl Summand {
    pub fn top_level(&self, rank: usize) -> Option<Subgroup> {
        match self {
            Summand::Constant { level, family } => (!family.is_empty()).then(|| level.clone()),
            Summand::Uniform { level, .. } => Some(level.clone()),
            Summand::Structure => Some(Subgroup::full(rank)),
            Summand::Cell { h } | Summand::Universal { h } => Some(h.identity_component()),
            Summand::Shifted { of, .. } | Summand::Twisted { of, .. } => of.top_level(rank),
        }
    }

    /// Whether the stalks at `level` are Euler-local, i.e. inverted from a higher level.
    pub fn is_local_at(&self, level: &Subgroup) -> bool {
        match self {
            Summand::Constant { level: k, .. } | Summand::Uniform { level: k, .. } => k != level && k.contains(level),
            Summand::Structure | Summand::Cell { .. } | Summand::Universal { .. } => false,
            Summand::Shifted { of, .. } | Summand::Twisted { of, .. } => of.is_local_at(level),
        }
    }

    pub fn has_key(&self, level: &Subgroup, key: &Subgroup) -> bool {
        if key.identity_component() != *level {
            return false;
        }
        match self {
            Summand::Constant { level: k, family } => {
                k.contains(level) && key.join(k).map_or(false, |j| family.component(&j).is_some())
            }
            Summand::Uniform { level: k, .. } => k.contains(level),
            Summand::Structure => true,
            Summand::Cell { h } => h.identity_component().contains(level) && is_cotoral(key, h).unwrap_or(false),
            Summand::Universal { h } => h.identity_component().contains(level) && h.contains(key),
            Summand::Shifted { of, .. } | Summand::Twisted { of, .. } => of.has_key(level, key),
        }
    }

    pub fn keys(&self, rank: usize, level: &Subgroup) -> KeySet {
        let none = KeySet::Finite(BTreeSet::new());
        match self {
            Summand::Constant { level: k, family } => {
                if k == level {
                    KeySet::Finite(family.keys().cloned().collect())
                } else if k.contains(level) && !family.is_empty() {
                    KeySet::Infinite
                } else {
                    none
                }
            }
            Summand::Uniform { level: k, .. } => {
                if k.contains(level) {
                    if level.dim() == rank {
                        KeySet::Finite([level.clone()].into())
                    } else {
                        KeySet::Infinite
                    }
                } else {
                    none
                }
            }
            Summand::Structure => {
                if level.dim() == rank {
                    KeySet::Finite([level.clone()].into())
                } else {
                    KeySet::Infinite
                }
            }
            Summand::Cell { h } => {
                let h1 = h.identity_component();
                if h1 == *level {
                    KeySet::Finite([h.clone()].into())
                } else if h1.contains(level) {
                    KeySet::Infinite
                } else {
                    none
                }
            }
            Summand::Universal { h } => {
                let h1 = h.identity_component();
                if h1 == *level {
                    KeySet::Finite(h.subgroups_between().into_iter().collect())
                } else if h1.contains(level) {
                    KeySet::Infinite
                } else {
                    none
                }
            }
            Summand::Shifted { of, .. } | Summand::Twisted { of, .. } => of.keys(rank, level),
        }
    }

    /// `e_{key} φ^{level}` of this summand, `None` when `key` is absent.
    pub fn component(&self, level: &Subgroup, key: &Subgroup, window: i64) -> Result<Option<GradedModule>> {
        if !self.has_key(level, key) {
            return Ok(None);
        }
        let m = match self {
            Summand::Constant { level: k, family } => {
                let kt = key.join(k)?;
                let v = family.component(&kt).expect("checked by has_key");
                if k == level {
                    v.clone()
                } else {
                    let base = as_fp(v).ok_or_else(|| {
                        SheafError::Unsupported(format!("localized stalk of a {} component at {kt}", v.mode_name()))
                    })?;
                    let images = inflation_map(&kt, key).expect("key lies below its join");
                    GradedModule::Localized {
                        base: base.base_change(cohomology_ring(key), &images),
                        inverted: Multiplicative::AllOutside { span: span_in(&kt, key) },
                        window,
                    }
                }
            }
            Summand::Uniform { level: k, divisible, shift } => {
                if k != level {
                    return Err(SheafError::Unsupported(format!("localized stalk of an infinite family at {key}")));
                }
                uniform_module(key, *divisible, *shift)
            }
            Summand::Structure => GradedModule::free(cohomology_ring(key), vec![0]),
            Summand::Cell { h } => {
                let forms: Vec<Poly> = span_in(h, key).iter().map(|c| Poly::linear(c)).collect();
                FpModule::quotient_by(cohomology_ring(key), h.codim() as i64, &forms).into()
            }
            Summand::Universal { h } => {
                if h.identity_component() != *level {
                    return Err(SheafError::Unsupported(format!(
                        "stalk of the universal space of {h} at {key} is infinite in each degree"
                    )));
                }
                uniform_module(key, true, h.codim() as i64)
            }
            Summand::Shifted { by, of } => return Ok(of.component(level, key, window)?.map(|m| m.shift(*by))),
            Summand::Twisted { rep, of } => {
                return Ok(of.component(level, key, window)?.map(|m| m.shift(rep.fixed_dimension(key))))
            }
        };
        Ok(Some(m))
    }
}

/// Replaces the canonical basing map of one summand by a multiple, for negative controls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasingOverride {
    pub summand: usize,
    pub from: Subgroup,
    pub to: Subgroup,
    pub key: Subgroup,
    pub degree: i64,
    pub scale: i64,
}

/// An object of the category: a finite direct sum of summands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafObject {
    pub rank: usize,
    pub summands: Vec<Summand>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<BasingOverride>,
}

impl SheafObject {
    pub fn zero(rank: usize) -> Self {
        Self { rank, summands: vec![], overrides: vec![] }
    }

    pub fn of(rank: usize, summands: Vec<Summand>) -> Self {
        Self { rank, summands, overrides: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.summands.iter().all(|s| s.top_level(self.rank).is_none())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(SheafError::RankMismatch(self.rank, other.rank));
        }
        let mut out = self.clone();
        out.summands.extend(other.summands.iter().cloned());
        Ok(out)
    }

    pub fn shift(&self, by: i64) -> Self {
        let summands = self.summands.iter().map(|s| Summand::Shifted { by, of: Box::new(s.clone()) }).collect();
        Self::of(self.rank, summands)
    }

    pub fn twist(&self, rep: &Representation) -> Self {
        if rep.0.is_empty() {
            return self.clone();
        }
        let summands =
            self.summands.iter().map(|s| Summand::Twisted { rep: rep.clone(), of: Box::new(s.clone()) }).collect();
        Self::of(self.rank, summands)
    }

    /// Maximal connected subgroups of the support; the support is their downward closure.
    pub fn tops(&self) -> Vec<Subgroup> {
        let all: BTreeSet<Subgroup> = self.summands.iter().filter_map(|s| s.top_level(self.rank)).collect();
        all.iter().filter(|k| !all.iter().any(|l| l != *k && l.contains(k))).cloned().collect()
    }

    pub fn in_support(&self, level: &Subgroup) -> bool {
        self.tops().iter().any(|t| t.contains(level))
    }

    /// Largest dimension of a support level, `None` for the zero object.
    pub fn support_dim(&self) -> Option<usize> {
        self.tops().iter().map(Subgroup::dim).max()
    }

    pub fn keys(&self, level: &Subgroup) -> KeySet {
        self.summands.iter().fold(KeySet::Finite(BTreeSet::new()), |acc, s| acc.union(s.keys(self.rank, level)))
    }

    pub fn has_key(&self, level: &Subgroup, key: &Subgroup) -> bool {
        self.summands.iter().any(|s| s.has_key(level, key))
    }

    /// Keys at `level` among `candidates` (all of them when finite).
    pub fn keys_among(&self, level: &Subgroup, candidates: &[Subgroup]) -> Vec<Subgroup> {
        match self.keys(level) {
            KeySet::Finite(s) => s.into_iter().collect(),
            KeySet::Infinite => candidates.iter().filter(|k| self.has_key(level, k)).cloned().collect(),
        }
    }

    fn collect(&self, level: &Subgroup, key: &Subgroup, window: i64, local: bool) -> Result<GradedModule> {
        let mut parts = Vec::new();
        for s in &self.summands {
            if !local && s.is_local_at(level) {
                continue;
            }
            if let Some(m) = s.component(level, key, window)? {
                parts.push(m);
            }
        }
        Ok(GradedModule::sum(cohomology_ring(key), parts))
    }

    /// `e_{key} φ^{level} M`.
    pub fn component(&self, level: &Subgroup, key: &Subgroup, window: i64) -> Result<GradedModule> {
        self.collect(level, key, window, true)
    }

    /// The part of `e_{key} φ^{level} M` coming from summands that are not Euler-local there.
    pub fn nonlocal_component(&self, level: &Subgroup, key: &Subgroup, window: i64) -> Result<GradedModule> {
        self.collect(level, key, window, false)
    }

    /// `φ^{level} M` when it has finitely many keys.
    pub fn phi(&self, level: &Subgroup, window: i64) -> Result<TorsionFamily> {
        let keys = self.keys(level).finite().cloned().ok_or_else(|| SheafError::InfiniteKeys(level.to_string()))?;
        self.phi_on(level, &keys.into_iter().collect::<Vec<_>>(), window)
    }

    /// `φ^{level} M` truncated to the given keys.
    pub fn phi_on(&self, level: &Subgroup, keys: &[Subgroup], window: i64) -> Result<TorsionFamily> {
        let mut fam = TorsionFamily::empty(level.clone());
        for k in keys {
            if self.has_key(level, k) {
                fam.insert(k.clone(), self.component(level, k, window)?)?;
            }
        }
        Ok(fam)
    }
}

fn allowed_input(m: &GradedModule) -> bool {
    match m {
        GradedModule::Fp(f) => m.is_finite_length() || (f.rels.is_empty() && f.gens.len() == 1),
        GradedModule::Dual { of } => matches!(&**of, GradedModule::Fp(f) if f.rels.is_empty()),
        GradedModule::Shift { of, .. } => allowed_input(of),
        GradedModule::Sum { parts, .. } => parts.iter().all(allowed_input),
        GradedModule::Localized { .. } => false,
    }
}

/// `f_K(V)`: the object constant below `K` with `φ^K = V`.
pub fn f_k(rank: usize, k: &Subgroup, v: TorsionFamily) -> Result<SheafObject> {
    if !k.is_connected() {
        return Err(SheafError::Disconnected(k.to_string()));
    }
    if k.rank() != rank {
        return Err(SheafError::RankMismatch(rank, k.rank()));
    }
    if let Some((key, _)) = v.components().find(|(_, m)| !allowed_input(m)) {
        return Err(SheafError::NotTorsion(key.to_string()));
    }
    Ok(SheafObject::of(rank, vec![Summand::Constant { level: k.clone(), family: v }]))
}

/// `φ^L f_K(V)` on the given keys, with localized components.
pub fn phi_of_fk_below(k: &Subgroup, v: &TorsionFamily, l: &Subgroup, keys: &[Subgroup], window: i64) -> Result<TorsionFamily> {
    f_k(k.rank(), k, v.clone())?.phi_on(l, keys, window)
}

/// `I(K̃)[n] = f_{K̃_1}(Σ^{c+n} H_*(BG/K̃))`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StandardInjective {
    pub subgroup: Subgroup,
    pub shift: i64,
}

impl StandardInjective {
    pub fn new(subgroup: Subgroup, shift: i64) -> Self {
        Self { subgroup, shift }
    }

    pub fn level(&self) -> Subgroup {
        self.subgroup.identity_component()
    }

    /// The divisible module `Σ^{c+n} H_*(BG/K̃)`.
    pub fn module(&self) -> GradedModule {
        uniform_module(&self.subgroup, true, self.subgroup.codim() as i64 + self.shift)
    }

    pub fn as_object(&self) -> SheafObject {
        let fam = TorsionFamily::new(self.level(), vec![(self.subgroup.clone(), self.module())]).expect("key at its own level");
        SheafObject::of(self.subgroup.rank(), vec![Summand::Constant { level: self.level(), family: fam }])
    }
}

/// A sum of standard injectives, either listed or all those at given levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InjectiveAggregate {
    Finite { summands: Vec<StandardInjective> },
    AllAtLevels { levels: Vec<Subgroup>, shift: i64 },
}

/// `Hom(M, I(K̃)[n])` through the adjunction: the dual of `e_{K̃} φ^{K̃_1} M` suitably shifted.
pub fn hom_into_injective(m: &SheafObject, inj: &StandardInjective, window: i64) -> Result<GradedModule> {
    let level = inj.level();
    if !m.has_key(&level, &inj.subgroup) {
        return Ok(GradedModule::zero(cohomology_ring(&inj.subgroup)));
    }
    let comp = m.component(&level, &inj.subgroup, window)?;
    Ok(hom_into_dual(&comp, &inj.module())?)
}

/// Hom into a sum of injectives, listing only summands that can receive maps.
pub fn hom_into_aggregate(
    m: &SheafObject,
    agg: &InjectiveAggregate,
    window: i64,
) -> Result<Vec<(StandardInjective, GradedModule)>> {
    let targets: Vec<StandardInjective> = match agg {
        InjectiveAggregate::Finite { summands } => {
            summands.iter().filter(|i| m.has_key(&i.level(), &i.subgroup)).cloned().collect()
        }
        InjectiveAggregate::AllAtLevels { levels, shift } => {
            let mut out = Vec::new();
            for l in levels {
                let keys = m.keys(l).finite().cloned().ok_or_else(|| {
                    SheafError::NoCertificate(format!("source has infinitely many keys at level {l}"))
                })?;
                out.extend(keys.into_iter().map(|k| StandardInjective::new(k, *shift)));
            }
            out
        }
    };
    targets.into_iter().map(|i| Ok((i.clone(), hom_into_injective(m, &i, window)?))).collect()
}

/// `K/L` as a subgroup of `G/L`.
pub fn quotient_subgroup(k: &Subgroup, l: &Subgroup) -> Result<Subgroup> {
    Ok(Subgroup::new(l.codim(), &span_in(k, l))?)
}

fn transport(v: &[i64], images: &[Vec<i64>], n: usize) -> Vec<i64> {
    (0..n).map(|j| v.iter().zip(images).map(|(a, im)| a * im[j]).sum()).collect()
}

/// Rewrite a module over `H*(BG/K̃)` as a module over `H*(B(G/L)/(K̃/L))`.
fn rebase(m: &GradedModule, images: &[Vec<i64>], ring: PolyRing) -> GradedModule {
    let polys: Vec<Poly> = images.iter().map(|c| Poly::linear(c)).collect();
    match m {
        GradedModule::Fp(f) => f.base_change(ring, &polys).into(),
        GradedModule::Dual { of } => rebase(of, images, ring).dual(),
        GradedModule::Shift { by, of } => rebase(of, images, ring).shift(*by),
        GradedModule::Sum { parts, .. } => GradedModule::sum(ring, parts.iter().map(|p| rebase(p, images, ring)).collect()),
        GradedModule::Localized { base, inverted, window } => {
            let n = ring.num_gens;
            let inverted = match inverted {
                Multiplicative::Forms { forms } => {
                    Multiplicative::Forms { forms: forms.iter().map(|f| transport(f, images, n)).collect() }
                }
                Multiplicative::AllOutside { span } => {
                    Multiplicative::AllOutside { span: span.iter().map(|f| transport(f, images, n)).collect() }
                }
            };
            GradedModule::Localized { base: base.base_change(ring, &polys), inverted, window: *window }
        }
    }
}

fn fixed_summand(s: &Summand, l: &Subgroup) -> Result<Option<Summand>> {
    Ok(match s {
        Summand::Constant { level, family } => {
            if !level.contains(l) {
                return Ok(None);
            }
            let mut out = TorsionFamily::empty(quotient_subgroup(level, l)?);
            for (kt, m) in family.components() {
                let q = quotient_subgroup(kt, l)?;
                let images: Vec<Vec<i64>> =
                    kt.char_basis().iter().map(|b| q.char_coords(&l.char_coords(b).expect("b vanishes on l")).expect("in Λ(q)")).collect();
                out.insert(q.clone(), rebase(m, &images, cohomology_ring(&q)))?;
            }
            Some(Summand::Constant { level: out.base.clone(), family: out })
        }
        Summand::Uniform { level, divisible, shift } => level
            .contains(l)
            .then(|| quotient_subgroup(level, l))
            .transpose()?
            .map(|q| Summand::Uniform { level: q, divisible: *divisible, shift: *shift }),
        Summand::Structure => Some(Summand::Structure),
        Summand::Cell { h } => {
            h.identity_component().contains(l).then(|| quotient_subgroup(h, l)).transpose()?.map(|h| Summand::Cell { h })
        }
        Summand::Universal { h } => h
            .identity_component()
            .contains(l)
            .then(|| quotient_subgroup(h, l))
            .transpose()?
            .map(|h| Summand::Universal { h }),
        Summand::Shifted { by, of } => fixed_summand(of, l)?.map(|s| Summand::Shifted { by: *by, of: Box::new(s) }),
        Summand::Twisted { rep, of } => {
            let chars = rep.0.iter().filter_map(|a| l.char_coords(&a.0).map(Character)).collect();
            fixed_summand(of, l)?.map(|s| Summand::Twisted { rep: Representation(chars), of: Box::new(s) })
        }
    })
}

/// Geometric fixed points `Φ^L M`, an object over `G/L`.
pub fn fixed_points(m: &SheafObject, l: &Subgroup) -> Result<SheafObject> {
    if !l.is_connected() {
        return Err(SheafError::Disconnected(l.to_string()));
    }
    let mut out = SheafObject::zero(l.codim());
    for s in &m.summands {
        if let Some(t) = fixed_summand(s, l)? {
            out.summands.push(t);
        }
    }
    Ok(out)
}

/// A windowed verification failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QceFailure {
    pub summand: usize,
    pub from: Subgroup,
    pub to: Subgroup,
    pub key: Subgroup,
    pub degree: Option<i64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct QceReport {
    /// (summand, from, to, key) whose basing map was verified on the whole window.
    pub checked: Vec<(usize, Subgroup, Subgroup, Subgroup)>,
    pub skipped: Vec<(usize, Subgroup, Subgroup, Subgroup, String)>,
    pub failures: Vec<QceFailure>,
    /// Chains `L ⊂ K ⊂ K'` in the support whose triangle could not be compared on the window.
    pub triangles_unverified: Vec<(Subgroup, Subgroup, Subgroup)>,
}

impl QceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Connected subgroups (from the small-subgroup list) in the support.
pub fn support_levels(m: &SheafObject, bound: i64) -> Vec<Subgroup> {
    small_subgroups(m.rank, bound).into_iter().filter(|k| k.is_connected() && m.in_support(k)).collect()
}

enum Basing {
    Identity(GradedModule),
    Localizing { map: GradedMap, target: GradedModule },
}

impl Basing {
    fn source_target(&self) -> (GradedModule, GradedModule) {
        match self {
            Basing::Identity(m) => (m.clone(), m.clone()),
            Basing::Localizing { map, target } => (map.source.clone().into(), target.clone()),
        }
    }

    fn matrix(&self, d: i64) -> std::result::Result<QMat, GradedError> {
        match self {
            Basing::Identity(m) => Ok(QMat::identity(m.dim(d)?)),
            Basing::Localizing { map, target } => Ok(target.localization_map(d)?.mul(&map.matrix(d))),
        }
    }
}

/// Verify quasi-coherence and extendedness on `[-window, window]`, using keys
/// from `small_subgroups(rank, bound)` where key sets are infinite.
pub fn check_qce(m: &SheafObject, window: i64, bound: i64) -> QceReport {
    let mut report = QceReport::default();
    let levels = support_levels(m, bound);
    let candidates = small_subgroups(m.rank, bound);
    for (si, s) in m.summands.iter().enumerate() {
        for l in &levels {
            for k in levels.iter().filter(|k| *k != l && k.contains(l)) {
                if s.top_level(m.rank).map_or(true, |t| !t.contains(k)) {
                    continue;
                }
                let keys: Vec<Subgroup> = match s.keys(m.rank, l) {
                    KeySet::Finite(ks) => ks.into_iter().collect(),
                    KeySet::Infinite => candidates.iter().filter(|f| s.has_key(l, f)).cloned().collect(),
                };
                for f in keys {
                    let tag = (si, l.clone(), k.clone(), f.clone());
                    match basing_map(s, l, k, &f, window) {
                        Err(reason) => report.failures.push(QceFailure {
                            summand: si,
                            from: l.clone(),
                            to: k.clone(),
                            key: f,
                            degree: None,
                            reason,
                        }),
                        Ok(None) => report.skipped.push((tag.0, tag.1, tag.2, tag.3, "target stalk is not finitely presented".into())),
                        Ok(Some(b)) => match verify_basing(m, si, &b, l, k, &f, window) {
                            Ok(None) => report.checked.push(tag),
                            Ok(Some(fail)) => report.failures.push(fail),
                            Err(e) => report.skipped.push((tag.0, tag.1, tag.2, tag.3, e.to_string())),
                        },
                    }
                }
            }
        }
    }
    for a in &levels {
        for b in levels.iter().filter(|b| *b != a && b.contains(a)) {
            for c in levels.iter().filter(|c| *c != b && c.contains(b)) {
                report.triangles_unverified.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    report
}

/// The canonical basing map of a summand at `(l ⊂ k, key f)`; `Ok(None)` when the
/// target stalk is not finitely presented, `Err` when no basing map exists.
fn basing_map(s: &Summand, l: &Subgroup, k: &Subgroup, f: &Subgroup, window: i64) -> std::result::Result<Option<Basing>, String> {
    let fk = f.join(k).map_err(|e| e.to_string())?;
    let Some(source) = s.component(l, f, window).map_err(|e| e.to_string())? else {
        return Ok(None);
    };
    let Some(upper) = s.component(k, &fk, window).map_err(|e| e.to_string())? else {
        return Err(format!("no component at key {fk} of level {k} to base the key {f} on"));
    };
    if matches!(source, GradedModule::Localized { .. }) {
        return Ok(Some(Basing::Identity(source)));
    }
    let (Some(src), Some(up)) = (as_fp(&source), as_fp(&upper)) else {
        return Ok(None);
    };
    let images = inflation_map(&fk, f).expect("f lies below its join");
    let tb = up.base_change(cohomology_ring(f), &images);
    if src.gens != tb.gens {
        return Err("source and inflated target have different generators".into());
    }
    let ident: Vec<Vec<Poly>> =
        (0..src.gens.len()).map(|i| (0..src.gens.len()).map(|j| if i == j { Poly::one(src.ring.num_gens) } else { Poly::zero() }).collect()).collect();
    let map = GradedMap::new(src, tb.clone(), ident).map_err(|e| format!("basing map is not well defined: {e}"))?;
    let target = GradedModule::Localized { base: tb, inverted: Multiplicative::AllOutside { span: span_in(&fk, f) }, window };
    Ok(Some(Basing::Localizing { map, target }))
}

fn verify_basing(
    m: &SheafObject,
    si: usize,
    b: &Basing,
    l: &Subgroup,
    k: &Subgroup,
    f: &Subgroup,
    window: i64,
) -> std::result::Result<Option<QceFailure>, GradedError> {
    let (src, tgt) = b.source_target();
    let s = match &tgt {
        GradedModule::Localized { .. } => tgt.inverted_element()?,
        _ => return Ok(None),
    };
    let ngens = src.ring().num_gens;
    let e = s.degree().unwrap_or(0);
    let n = window.max(1);
    let sn = s.pow(n as u32, ngens);
    let mat = |d: i64| -> std::result::Result<QMat, GradedError> {
        let mut x = b.matrix(d)?;
        for o in &m.overrides {
            if o.summand == si && o.from == *l && o.to == *k && o.key == *f && o.degree == d {
                x = x.scale(&crate::graded::q(o.scale));
            }
        }
        Ok(x)
    };
    let fail = |d: i64, reason: &str| QceFailure {
        summand: si,
        from: l.clone(),
        to: k.clone(),
        key: f.clone(),
        degree: Some(d),
        reason: reason.to_string(),
    };
    for d in -window..=window {
        let bd = mat(d)?;
        let below = mat(d - 2)?;
        for i in 0..ngens {
            if below.mul(&src.act_var(i, d)?) != tgt.act_var(i, d)?.mul(&bd) {
                return Ok(Some(fail(d, "basing map does not commute with the ring action")));
            }
        }
        let ker = bd.kernel();
        let sn_src = src.act_poly(&sn, d)?;
        if ker.iter().any(|x| sn_src.apply(x).iter().any(|c| *c != crate::graded::q(0))) {
            return Ok(Some(fail(d, "kernel of the basing map is not Euler-torsion")));
        }
        let deep = mat(d + n * e)?;
        let reach = tgt.act_poly(&sn, d)?;
        if QMat::hstack(&[deep.clone(), reach], deep.nrows()).rank() != deep.rank() {
            return Ok(Some(fail(d, "cokernel of the basing map is not Euler-torsion")));
        }
    }
    Ok(None)
}

/// One step of the dimension filtration: `0 → kernel → M → top → cokernel → 0`
/// with `top = ⊕ f_L(φ^L M)` over the top-dimensional support levels.
#[derive(Clone, Debug)]
pub struct DimensionLayer {
    pub dim: usize,
    pub top: SheafObject,
    pub kernel: SheafObject,
    pub cokernel: SheafObject,
}

/// Top-dimensional level of a summand when it is already constant below it.
fn constant_level(s: &Summand) -> Option<Subgroup> {
    match s {
        Summand::Constant { level, .. } | Summand::Uniform { level, .. } => Some(level.clone()),
        Summand::Cell { h } | Summand::Universal { h } if h.is_finite() => Some(Subgroup::trivial(h.rank())),
        Summand::Shifted { of, .. } => constant_level(of),
        Summand::Twisted { of, .. } if constant_level(of).map_or(false, |l| l.dim() == 0) => constant_level(of),
        _ => None,
    }
}

pub fn decompose_by_dimension(m: &SheafObject) -> Result<DimensionLayer> {
    let Some(dim) = m.support_dim() else {
        return Ok(DimensionLayer { dim: 0, top: m.clone(), kernel: m.clone(), cokernel: m.clone() });
    };
    let r = m.rank;
    let (mut top, mut kernel, mut cokernel) = (SheafObject::zero(r), SheafObject::zero(r), SheafObject::zero(r));
    for s in &m.summands {
        if s.top_level(r).is_none() {
            continue;
        }
        if let Some(l) = constant_level(s) {
            if l.dim() == dim {
                top.summands.push(s.clone());
            } else {
                kernel.summands.push(s.clone());
            }
            continue;
        }
        match s {
            // 0 → O → f_G(Q) → f_1(Σ² H_*(BG/F) at every F) → 0
            Summand::Structure if r == 1 && dim == 1 => {
                let g = Subgroup::full(1);
                let fam = TorsionFamily::new(g.clone(), vec![(g.clone(), GradedModule::free(PolyRing::new(0), vec![0]))])?;
                top.summands.push(Summand::Constant { level: g, family: fam });
                cokernel.summands.push(Summand::Uniform { level: Subgroup::trivial(1), divisible: true, shift: 2 });
            }
            _ => {
                return Err(SheafError::Unsupported(format!(
                    "dimension filtration of {s:?}: its cokernel is not finitely presented"
                )))
            }
        }
    }
    Ok(DimensionLayer { dim, top, kernel, cokernel })
}

/// Number of layers of constant-below objects needed to build `m`.
pub fn filtration_length(m: &SheafObject) -> Result<usize> {
    if m.is_zero() {
        return Ok(0);
    }
    let layer = decompose_by_dimension(m)?;
    Ok(1 + filtration_length(&layer.kernel)?.max(filtration_length(&layer.cokernel)?))
}

#[cfg(test)]
mod tests;
