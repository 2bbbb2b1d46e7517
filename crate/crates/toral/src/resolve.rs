//! Resolutions in the algebraic model: the Koszul and codimension resolutions
//! of cells and universal spaces, and bounded injective resolutions.

use crate::cells::{natural_cell_object, NamedObject};
use crate::graded::{graded_dual, koszul_complex, FpModule, FreeResolution, GradedError, GradedModule, PolyRing};
use crate::lattice::{is_cotoral, small_subgroups, LatticeError, Subgroup};
use crate::ofmod::{cohomology_ring, FamilyError, TorsionFamily};
use crate::sheaf::{decompose_by_dimension, support_levels, InjectiveAggregate, SheafError, SheafObject, StandardInjective, Summand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    #[error("universe insufficient: {missing} is needed but not listed")]
    UniverseInsufficient { missing: Subgroup },
    #[error("resolution did not terminate within {bound} stages (reached {reached})")]
    NotTerminated { bound: usize, reached: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, ResolveError>;

/// One kind of summand in a stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum StageTerm {
    /// `Σ^shift` of a named object.
    Named { object: NamedObject, shift: i64 },
    Injective { aggregate: InjectiveAggregate },
    /// `Σ^shift E⟨L⟩` for every `L ⊆ within` of dimension `dim` not listed in the universe.
    Remainder { within: Subgroup, dim: usize, shift: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEntry {
    pub term: StageTerm,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub entries: Vec<StageEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMethod {
    /// Ranks of the degreewise complex computed directly.
    Computed,
    /// Reduced to a computed top-level complex tensored with a polynomial ring.
    SliceReduction,
    /// Not checked numerically; recorded for the transcript.
    Structural,
}

/// Outcome of an exactness check at one level and key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessRecord {
    pub level: Subgroup,
    pub key: Subgroup,
    pub degrees: (i64, i64),
    pub method: CheckMethod,
    pub exact: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Named { object: NamedObject },
    Object { object: SheafObject },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub target: Target,
    pub stages: Vec<Stage>,
    /// `syzygies[s]` is the image of stage `s - 1` in stage `s`; `syzygies[0]` is the target.
    pub syzygies: Vec<SheafObject>,
    pub checks: Vec<ExactnessRecord>,
    pub window: i64,
}

impl Resolution {
    /// Number of stages after the augmentation.
    pub fn length(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.entries.iter().map(|e| e.multiplicity).sum()).collect()
    }

    pub fn exact(&self) -> bool {
        self.checks.iter().all(|c| c.exact)
    }

    /// Whether every stage is a listed sum of standard injectives.
    pub fn certified(&self) -> bool {
        self.stages.iter().all(|s| s.entries.iter().all(|e| !matches!(e.term, StageTerm::Remainder { .. })))
    }

    /// The injective summands of each stage; named `E⟨L⟩` terms count as `I(L)`.
    pub fn aggregates(&self) -> Vec<Vec<InjectiveAggregate>> {
        self.stages
            .iter()
            .map(|st| {
                st.entries
                    .iter()
                    .filter_map(|e| match &e.term {
                        StageTerm::Injective { aggregate } => Some(aggregate.clone()),
                        StageTerm::Named { object: NamedObject::EBracket { k }, shift } => Some(InjectiveAggregate::Finite {
                            summands: vec![StandardInjective::new(k.clone(), *shift); e.multiplicity],
                        }),
                        _ => None,
                    })
                    .collect()
            })
            .collect()
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks `0 → V → D(P_0) → D(P_1) → …` at each degree, where `P → n` is a free
/// resolution and `V_d = (n_{-d})^*`. Returns the first failing degree.
fn dual_complex_failure(res: &FreeResolution, n: &GradedModule, degrees: std::ops::RangeInclusive<i64>) -> Result<Option<(i64, String)>> {
    for d in degrees {
        let mut maps = vec![res.augmentation_matrix(n, -d)?.transpose()];
        for s in 1..res.gens.len() {
            maps.push(res.differential(s, -d).transpose());
        }
        if maps[0].rank() != maps[0].ncols() {
            return Ok(Some((d, "augmentation not injective".into())));
        }
        for i in 0..maps.len() - 1 {
            if !maps[i + 1].mul(&maps[i]).is_zero() {
                return Ok(Some((d, format!("composite at stage {i} is nonzero"))));
            }
            if maps[i].rank() + maps[i + 1].rank() != maps[i + 1].ncols() {
                return Ok(Some((d, format!("homology at stage {i}"))));
            }
        }
        let last = maps.last().expect("nonempty");
        if last.rank() != last.nrows() {
            return Ok(Some((d, format!("homology at stage {}", maps.len() - 1))));
        }
    }
    Ok(None)
}

fn record(level: &Subgroup, key: &Subgroup, degrees: (i64, i64), method: CheckMethod, failure: Option<(i64, String)>) -> ExactnessRecord {
    let (exact, detail) = match failure {
        None => (true, String::new()),
        Some((d, why)) => (false, format!("degree {d}: {why}")),
    };
    ExactnessRecord { level: level.clone(), key: key.clone(), degrees, method, exact, detail }
}

fn dims(m: &GradedModule, degrees: std::ops::RangeInclusive<i64>) -> Result<Vec<usize>> {
    degrees.map(|d| Ok(m.dim(d)?)).collect()
}

/// The Koszul resolution `G/H_+ → EG/H_+ → binom(d,1) Σ² EG/H_+ → …` with `d = codim H`.
pub fn koszul_resolution(h: &Subgroup, window: i64) -> Result<Resolution> {
    let c = h.codim();
    let h1 = h.identity_component();
    let universal = NamedObject::EUniversal { k: h.clone() };
    let stages = (0..=c)
        .map(|i| Stage {
            entries: vec![StageEntry {
                term: StageTerm::Named { object: universal.clone(), shift: 2 * i as i64 },
                multiplicity: binom(c, i),
            }],
        })
        .collect();
    let cell = natural_cell_object(h);
    let stage_obj = universal.realize()?;
    let ring = PolyRing::new(c);
    let kos = koszul_complex(ring);
    let residue = GradedModule::residue_field(ring, 0);
    let shift = c as i64;
    let span = (-window, window);
    let mut checks = Vec::new();
    for key in h.subgroups_between() {
        // stalks at the top level: Σ^c Q → Σ^c D(R) → Σ^{c+2} D(R)^c → …
        let mut failure = dual_complex_failure(&kos, &residue, (span.0 - shift)..=(span.1 - shift))?;
        let got = dims(&cell.component(&h1, &key, window)?, span.0..=span.1)?;
        if got != dims(&residue.clone().shift(shift), span.0..=span.1)? {
            failure.get_or_insert((span.0, "cell stalk is not a shifted copy of Q".into()));
        }
        let stalk = dims(&stage_obj.component(&h1, &key, window)?, span.0..=span.1)?;
        let expected = dims(&GradedModule::free(ring, vec![-shift]).dual(), span.0..=span.1)?;
        if stalk != expected {
            failure.get_or_insert((span.0, "stage stalk is not Σ^c H_*(BG/H)".into()));
        }
        checks.push(record(&h1, &key, span, CheckMethod::Computed, failure));
    }
    for f in small_subgroups(h.rank(), 6) {
        let f1 = f.identity_component();
        if !h.contains(&f) || f1 == h1 {
            continue;
        }
        let top = f.join(&h1)?;
        let m = h1.dim() - f1.dim();
        let mut failure = None;
        if !is_cotoral(&f, &top)? {
            failure = Some((0, format!("{f} is not cotoral in {top}")));
        }
        let got = dims(&cell.component(&f1, &f, window)?, span.0..=span.1)?;
        let want: Vec<usize> = (span.0..=span.1)
            .map(|d| {
                let j = shift - d;
                if j < 0 || j % 2 != 0 {
                    0
                } else {
                    binom(j as usize / 2 + m - 1, m - 1)
                }
            })
            .collect();
        if got != want {
            failure.get_or_insert((span.0, "cell stalk does not match the slice ring".into()));
        }
        checks.push(record(&f1, &f, span, CheckMethod::SliceReduction, failure));
    }
    Ok(Resolution {
        target: Target::Named { object: NamedObject::NaturalCell { k: h.clone() } },
        stages,
        syzygies: vec![cell],
        checks,
        window,
    })
}

/// The resolution of `E[⊆K]_+` whose stage `i` is `Σ^i E⟨L⟩` over `L ⊆ K`
/// with `dim L = dim K - i`, truncated to `universe`. When `source` is given,
/// every key it has at those subgroups must be listed.
pub fn codim_resolution(k: &Subgroup, universe: &[Subgroup], source: Option<&SheafObject>, window: i64) -> Result<Resolution> {
    let top = k.dim();
    if let Some(src) = source {
        for level in support_levels(src, 6) {
            if level.dim() >= top || !k.contains(&level) {
                continue;
            }
            let keys = src.keys(&level).finite().cloned().ok_or_else(|| {
                SheafError::NoCertificate(format!("source has infinitely many keys at level {level}"))
            })?;
            if let Some(missing) = keys.into_iter().find(|f| k.contains(f) && !universe.contains(f)) {
                return Err(ResolveError::UniverseInsufficient { missing });
            }
        }
    }
    let mut stages = Vec::new();
    for i in 0..=top {
        let dim = top - i;
        let listed: Vec<Subgroup> = if i == 0 {
            k.subgroups_between()
        } else {
            let mut l: Vec<Subgroup> = universe.iter().filter(|l| l.dim() == dim && k.contains(l)).cloned().collect();
            l.sort();
            l.dedup();
            l
        };
        let mut entries: Vec<StageEntry> = listed
            .into_iter()
            .map(|l| StageEntry { term: StageTerm::Named { object: NamedObject::EBracket { k: l }, shift: i as i64 }, multiplicity: 1 })
            .collect();
        if i > 0 {
            entries.push(StageEntry { term: StageTerm::Remainder { within: k.clone(), dim, shift: i as i64 }, multiplicity: 1 });
        }
        stages.push(Stage { entries });
    }
    let target = NamedObject::EUniversal { k: k.clone() };
    let obj = target.realize()?;
    let k1 = k.identity_component();
    let span = (-window, window);
    let mut checks = Vec::new();
    for key in k.subgroups_between() {
        let got = dims(&obj.component(&k1, &key, window)?, span.0..=span.1)?;
        let want = dims(&StandardInjective::new(key.clone(), 0).module(), span.0..=span.1)?;
        let failure = (got != want).then(|| (span.0, "top stalk differs from I(K)".to_string()));
        checks.push(record(&k1, &key, span, CheckMethod::Computed, failure));
    }
    if top > 0 {
        checks.push(ExactnessRecord {
            level: Subgroup::trivial(k.rank()),
            key: k.clone(),
            degrees: span,
            method: CheckMethod::Structural,
            exact: true,
            detail: "lower levels follow the dimension filtration of the family".into(),
        });
    }
    Ok(Resolution { target: Target::Named { object: target }, stages, syzygies: vec![obj], checks, window })
}

/// A summand reduced to one key, or a divisible family over every key of a level.
enum Piece {
    Keyed { level: Subgroup, key: Subgroup, module: GradedModule },
    Divisible { level: Subgroup, shift: i64 },
}

fn pieces(s: &Summand, rank: usize, window: i64) -> Result<Vec<Piece>> {
    Ok(match s {
        Summand::Constant { level, family } => family
            .components()
            .map(|(k, m)| Piece::Keyed { level: level.clone(), key: k.clone(), module: m.clone() })
            .collect(),
        Summand::Uniform { level, divisible: true, shift } => vec![Piece::Divisible { level: level.clone(), shift: *shift }],
        Summand::Cell { h } | Summand::Universal { h } if h.is_finite() => {
            let triv = Subgroup::trivial(rank);
            let keys = s.keys(rank, &triv).finite().cloned().unwrap_or_default();
            let mut out = Vec::new();
            for key in keys {
                if let Some(module) = s.component(&triv, &key, window)? {
                    out.push(Piece::Keyed { level: triv.clone(), key, module });
                }
            }
            out
        }
        Summand::Shifted { by, of } => pieces(of, rank, window)?
            .into_iter()
            .map(|p| match p {
                Piece::Keyed { level, key, module } => Piece::Keyed { level, key, module: module.shift(*by) },
                Piece::Divisible { level, shift } => Piece::Divisible { level, shift: shift + by },
            })
            .collect(),
        // Euler classes are units on the localized stalks below the top level,
        // so the twist only regrades the top components.
        Summand::Twisted { rep, of } => pieces(of, rank, window)?
            .into_iter()
            .map(|p| match p {
                Piece::Keyed { level, key, module } => {
                    let by = rep.fixed_dimension(&key);
                    Ok(Piece::Keyed { level, key, module: module.shift(by) })
                }
                Piece::Divisible { .. } => Err(ResolveError::Unsupported("twist of a uniform family".into())),
            })
            .collect::<Result<_>>()?,
        other => return Err(ResolveError::Unsupported(format!("no componentwise embedding for {other:?}"))),
    })
}

/// Shifts `a` with `m ≅ ⊕ Σ^a H_*(BG/K̃)`, when `m` is visibly of that form.
fn divisible_shifts(m: &GradedModule) -> Option<Vec<i64>> {
    match m {
        GradedModule::Dual { of } => match of.as_ref() {
            GradedModule::Fp(f) if f.rels.is_empty() => Some(f.gens.iter().map(|g| -g).collect()),
            _ => None,
        },
        GradedModule::Shift { by, of } => divisible_shifts(of).map(|v| v.into_iter().map(|a| a + by).collect()),
        GradedModule::Sum { parts, .. } => parts.iter().map(divisible_shifts).collect::<Option<Vec<_>>>().map(|v| v.concat()),
        _ => None,
    }
}

/// Stages and cosyzygies of one piece.
#[derive(Default)]
struct PieceResolution {
    stages: Vec<Vec<StageTerm>>,
    syzygies: Vec<Vec<Summand>>,
    checks: Vec<ExactnessRecord>,
}

fn injectives(key: &Subgroup, shifts: impl IntoIterator<Item = i64>) -> Vec<StageTerm> {
    let summands: Vec<StandardInjective> = shifts.into_iter().map(|n| StandardInjective::new(key.clone(), n)).collect();
    if summands.is_empty() {
        return vec![];
    }
    vec![StageTerm::Injective { aggregate: InjectiveAggregate::Finite { summands } }]
}

fn resolve_piece(p: Piece, window: i64) -> Result<PieceResolution> {
    let (level, key, module) = match p {
        Piece::Divisible { level, shift } => {
            let aggregate = InjectiveAggregate::AllAtLevels { levels: vec![level.clone()], shift: shift - level.codim() as i64 };
            return Ok(PieceResolution { stages: vec![vec![StageTerm::Injective { aggregate }]], ..Default::default() });
        }
        Piece::Keyed { level, key, module } => (level, key, module),
    };
    let c = key.codim() as i64;
    if let Some(shifts) = divisible_shifts(&module) {
        let check = ExactnessRecord {
            level: level.clone(),
            key: key.clone(),
            degrees: (0, 0),
            method: CheckMethod::Structural,
            exact: true,
            detail: "already injective".into(),
        };
        return Ok(PieceResolution {
            stages: vec![injectives(&key, shifts.into_iter().map(|a| a - c))],
            syzygies: vec![],
            checks: vec![check],
        });
    }
    let extent = match module.extent() {
        crate::graded::Extent::Empty => return Ok(PieceResolution::default()),
        crate::graded::Extent::Range { lo: Some(lo), hi: Some(hi) } => (lo, hi),
        _ => return Err(SheafError::NotTorsion(format!("{key}")).into()),
    };
    let ring = cohomology_ring(&key);
    let n = graded_dual(module);
    let res = FreeResolution::minimal(&n, window)?;
    // D(free on g) = Σ^{-g} H_*(BG/K̃) = I(K̃)[-g-c]
    let stages = res.gens.iter().map(|gs| injectives(&key, gs.iter().map(|g| -g - c))).collect();
    let mut syzygies = Vec::new();
    for s in 1..res.gens.len() {
        let rels = res.diffs.get(s + 1).cloned().unwrap_or_default();
        let omega = FpModule::new(ring, res.gens[s].clone(), rels)?;
        let fam = TorsionFamily::new(level.clone(), vec![(key.clone(), GradedModule::Fp(omega).dual())])?;
        syzygies.push(vec![Summand::Constant { level: level.clone(), family: fam }]);
    }
    let degrees = (extent.0 - 2, extent.1 + 2 * ring.num_gens as i64 + 2 * window);
    let failure = dual_complex_failure(&res, &n, degrees.0..=degrees.1)?;
    Ok(PieceResolution { stages, syzygies, checks: vec![record(&level, &key, degrees, CheckMethod::Computed, failure)] })
}

fn resolve_summand(s: &Summand, rank: usize, window: i64) -> Result<PieceResolution> {
    let mut out = PieceResolution::default();
    match pieces(s, rank, window) {
        Ok(ps) => {
            for p in ps {
                splice(&mut out, resolve_piece(p, window)?, 0);
            }
        }
        Err(ResolveError::Unsupported(why)) => {
            // 0 → M → top → cokernel → 0 with both ends injective
            let layer = decompose_by_dimension(&SheafObject::of(rank, vec![s.clone()])).map_err(|_| ResolveError::Unsupported(why))?;
            if !layer.kernel.is_zero() {
                return Err(ResolveError::Unsupported(format!("{s:?} has a lower-dimensional kernel")));
            }
            for (offset, part) in [(0, &layer.top), (1, &layer.cokernel)] {
                for t in &part.summands {
                    let r = resolve_summand(t, rank, window)?;
                    if r.stages.len() > 1 {
                        return Err(ResolveError::Unsupported(format!("layer summand {t:?} is not injective")));
                    }
                    splice(&mut out, r, offset);
                }
            }
            if !layer.cokernel.is_zero() {
                let need = out.syzygies.len().max(1);
                out.syzygies.resize(need, vec![]);
                out.syzygies[0].extend(layer.cokernel.summands.iter().cloned());
            }
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn splice(into: &mut PieceResolution, part: PieceResolution, offset: usize) {
    for (i, terms) in part.stages.into_iter().enumerate() {
        let s = i + offset;
        if into.stages.len() <= s {
            into.stages.resize(s + 1, vec![]);
        }
        into.stages[s].extend(terms);
    }
    for (i, summands) in part.syzygies.into_iter().enumerate() {
        let s = i + offset;
        if into.syzygies.len() <= s {
            into.syzygies.resize(s + 1, vec![]);
        }
        into.syzygies[s].extend(summands);
    }
    into.checks.extend(part.checks);
}

/// A bounded injective resolution of an object with finitely many keys per
/// top level. Fails hard if more than `2r` stages follow the augmentation.
pub fn injective_resolution(m: &SheafObject, window: i64) -> Result<Resolution> {
    let rank = m.rank;
    let mut acc = PieceResolution::default();
    for s in &m.summands {
        splice(&mut acc, resolve_summand(s, rank, window)?, 0);
    }
    let bound = 2 * rank;
    if acc.stages.len() > bound + 1 {
        return Err(ResolveError::NotTerminated { bound, reached: acc.stages.len() - 1 });
    }
    let stages = acc
        .stages
        .into_iter()
        .map(|terms| Stage { entries: merge_terms(terms) })
        .collect();
    let mut syzygies = vec![m.clone()];
    syzygies.extend(acc.syzygies.into_iter().map(|s| SheafObject::of(rank, s)));
    Ok(Resolution { target: Target::Object { object: m.clone() }, stages, syzygies, checks: acc.checks, window })
}

/// Collect finite injective terms of a stage into one aggregate with multiplicity.
fn merge_terms(terms: Vec<StageTerm>) -> Vec<StageEntry> {
    let mut finite: BTreeMap<StandardInjective, usize> = BTreeMap::new();
    let mut rest = Vec::new();
    for t in terms {
        match t {
            StageTerm::Injective { aggregate: InjectiveAggregate::Finite { summands } } => {
                for i in summands {
                    *finite.entry(i).or_insert(0) += 1;
                }
            }
            other => rest.push(StageEntry { term: other, multiplicity: 1 }),
        }
    }
    let mut out: Vec<StageEntry> = finite
        .into_iter()
        .map(|(i, n)| StageEntry {
            term: StageTerm::Injective { aggregate: InjectiveAggregate::Finite { summands: vec![i] } },
            multiplicity: n,
        })
        .collect();
    out.extend(rest);
    out
}

#[cfg(test)]
mod tests;
