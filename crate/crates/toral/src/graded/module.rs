//! Degreewise-finite graded modules and their pieces.

use super::linalg::{is_zero_vec, QMat, Subspace, Q};
use super::poly::{Poly, PolyRing};
use super::GradedError;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// How far below the top generator a torsion probe looks before giving up.
const TORSION_PROBE: i64 = 64;

/// A finitely presented module: free on `gens` (their degrees) modulo `rels`,
/// each relation a vector of ring elements indexed by generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpModule {
    pub ring: PolyRing,
    pub gens: Vec<i64>,
    pub rels: Vec<Vec<Poly>>,
}

/// One degree of an fp module: monomial multiples of generators modulo relations.
#[derive(Clone, Debug)]
pub struct FpPiece {
    pub degree: i64,
    ambient: Vec<(usize, Vec<u32>)>,
    index: HashMap<(usize, Vec<u32>), usize>,
    rels: Subspace,
    basis: Vec<usize>,
}

impl FpPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn ambient_vec(&self, terms: &[(usize, Vec<u32>, Q)]) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.ambient.len()];
        for (g, m, c) in terms {
            let i = self.index[&(*g, m.clone())];
            v[i] += c;
        }
        v
    }

    /// `(generator, monomial)` behind each basis vector.
    pub fn basis_terms(&self) -> Vec<(usize, Vec<u32>)> {
        self.basis.iter().map(|&i| self.ambient[i].clone()).collect()
    }

    /// Quotient coordinates of an ambient vector.
    fn coords(&self, v: &[Q]) -> Vec<Q> {
        let r = self.rels.reduce(v);
        self.basis.iter().map(|&i| r[i].clone()).collect()
    }
}

impl FpModule {
    pub fn new(ring: PolyRing, gens: Vec<i64>, rels: Vec<Vec<Poly>>) -> Result<Self, GradedError> {
        let m = Self { ring, gens, rels };
        for (j, r) in m.rels.iter().enumerate() {
            if r.len() != m.gens.len() {
                return Err(GradedError::Malformed(format!("relation {j} has {} entries for {} generators", r.len(), m.gens.len())));
            }
            m.rel_degree(j)?;
        }
        Ok(m)
    }

    pub fn free(ring: PolyRing, gens: Vec<i64>) -> Self {
        Self { ring, gens, rels: vec![] }
    }

    /// `R / (forms)` with generator in degree `top`.
    pub fn quotient_by(ring: PolyRing, top: i64, forms: &[Poly]) -> Self {
        Self { ring, gens: vec![top], rels: forms.iter().map(|f| vec![f.clone()]).collect() }
    }

    /// Internal degree of relation `j`, `None` for the zero relation.
    pub fn rel_degree(&self, j: usize) -> Result<Option<i64>, GradedError> {
        let mut deg = None;
        for (g, p) in self.rels[j].iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let d = p.degree().ok_or_else(|| GradedError::Malformed(format!("relation {j} is not homogeneous")))? + self.gens[g];
            if deg.is_some_and(|e| e != d) {
                return Err(GradedError::Malformed(format!("relation {j} mixes degrees")));
            }
            deg = Some(d);
        }
        Ok(deg)
    }

    pub fn piece(&self, d: i64) -> FpPiece {
        let mut ambient = Vec::new();
        for (g, &e) in self.gens.iter().enumerate() {
            for m in self.ring.monomials_in_degree(d - e) {
                ambient.push((g, m));
            }
        }
        let index: HashMap<_, _> = ambient.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut vecs = Vec::new();
        for j in 0..self.rels.len() {
            let Some(rd) = self.rel_degree(j).expect("validated") else { continue };
            for mu in self.ring.monomials_in_degree(d - rd) {
                let mut v = vec![Q::zero(); ambient.len()];
                for (g, p) in self.rels[j].iter().enumerate() {
                    for (e, c) in p.terms() {
                        let m: Vec<u32> = e.iter().zip(&mu).map(|(a, b)| a + b).collect();
                        v[index[&(g, m)]] += c;
                    }
                }
                if !is_zero_vec(&v) {
                    vecs.push(v);
                }
            }
        }
        let rels = Subspace::spanned_by(ambient.len(), &vecs);
        let basis = rels.free_coords();
        FpPiece { degree: d, ambient, index, rels, basis }
    }

    pub fn dim(&self, d: i64) -> usize {
        self.piece(d).dim()
    }

    /// Matrix of multiplication by homogeneous `p` from degree `d`.
    pub fn act_poly(&self, p: &Poly, d: i64) -> QMat {
        let src = self.piece(d);
        let Some(pd) = p.degree() else {
            return QMat::zeros(0, src.dim());
        };
        let tgt = self.piece(d + pd);
        let cols: Vec<Vec<Q>> = src
            .basis
            .iter()
            .map(|&i| {
                let (g, m) = &src.ambient[i];
                let terms: Vec<_> = p
                    .terms()
                    .map(|(e, c)| (*g, m.iter().zip(e).map(|(a, b)| a + b).collect::<Vec<u32>>(), c.clone()))
                    .collect();
                tgt.coords(&tgt.ambient_vec(&terms))
            })
            .collect();
        QMat::from_cols(tgt.dim(), &cols)
    }

    /// Coordinates in degree `d` of the element `sum_g v[g] * gen_g`.
    pub fn element_coords(&self, v: &[Poly], d: i64) -> Vec<Q> {
        let piece = self.piece(d);
        let mut terms = Vec::new();
        for (g, p) in v.iter().enumerate() {
            for (e, c) in p.terms() {
                if -2 * e.iter().map(|&x| i64::from(x)).sum::<i64>() + self.gens[g] == d {
                    terms.push((g, e.clone(), c.clone()));
                }
            }
        }
        piece.coords(&piece.ambient_vec(&terms))
    }

    pub fn shift(&self, n: i64) -> Self {
        Self { ring: self.ring, gens: self.gens.iter().map(|g| g + n).collect(), rels: self.rels.clone() }
    }

    pub fn direct_sum(parts: &[FpModule]) -> Self {
        let ring = parts.first().map_or(PolyRing::new(0), |p| p.ring);
        let total: usize = parts.iter().map(|p| p.gens.len()).sum();
        let mut gens = Vec::new();
        let mut rels = Vec::new();
        let mut off = 0;
        for p in parts {
            gens.extend(&p.gens);
            for r in &p.rels {
                let mut row = vec![Poly::zero(); total];
                row[off..off + r.len()].clone_from_slice(r);
                rels.push(row);
            }
            off += p.gens.len();
        }
        Self { ring, gens, rels }
    }

    /// `self ⊗_R other` from the two presentations.
    pub fn tensor(&self, other: &FpModule) -> FpModule {
        let (n1, n2) = (self.gens.len(), other.gens.len());
        let gens = self.gens.iter().flat_map(|a| other.gens.iter().map(move |b| a + b)).collect();
        let mut rels = Vec::new();
        for r in &self.rels {
            for j in 0..n2 {
                let mut row = vec![Poly::zero(); n1 * n2];
                for i in 0..n1 {
                    row[i * n2 + j] = r[i].clone();
                }
                rels.push(row);
            }
        }
        for r in &other.rels {
            for i in 0..n1 {
                let mut row = vec![Poly::zero(); n1 * n2];
                for j in 0..n2 {
                    row[i * n2 + j] = r[j].clone();
                }
                rels.push(row);
            }
        }
        FpModule { ring: self.ring, gens, rels }
    }

    /// Extension of scalars along a ring map given on generators.
    pub fn base_change(&self, target: PolyRing, images: &[Poly]) -> FpModule {
        let rels = self
            .rels
            .iter()
            .map(|r| r.iter().map(|p| p.substitute(images, target.num_gens)).collect())
            .collect();
        FpModule { ring: target, gens: self.gens.clone(), rels }
    }

    /// Lowest nonzero degree when the module has finite length.
    fn lowest_nonzero(&self) -> Option<i64> {
        let hi = *self.gens.iter().max()?;
        let lo_gen = *self.gens.iter().min()?;
        let mut lo = None;
        let mut zeros_in_row = 0;
        let mut d = hi;
        while d >= lo_gen - TORSION_PROBE {
            if self.dim(d) > 0 {
                lo = Some(d);
                zeros_in_row = 0;
            } else if d < lo_gen {
                zeros_in_row += 1;
                if zeros_in_row == 2 {
                    return lo;
                }
            }
            d -= 1;
        }
        None
    }
}

/// A multiplicatively closed set to invert.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplicative {
    /// Products of the given linear forms.
    Forms { forms: Vec<Vec<i64>> },
    /// Every linear form outside the rational span of `span`.
    AllOutside { span: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GradedModule {
    Fp(FpModule),
    Dual { of: Box<GradedModule> },
    Localized { base: FpModule, inverted: Multiplicative, window: i64 },
    Sum { ring: PolyRing, parts: Vec<GradedModule> },
    Shift { by: i64, of: Box<GradedModule> },
}

/// Extent of the nonzero pieces; `None` means unbounded in that direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Empty,
    Range { lo: Option<i64>, hi: Option<i64> },
}

impl Extent {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extent::Empty | Extent::Range { lo: Some(_), hi: Some(_) })
    }

    fn shift(self, n: i64) -> Self {
        match self {
            Extent::Empty => Extent::Empty,
            Extent::Range { lo, hi } => Extent::Range { lo: lo.map(|x| x + n), hi: hi.map(|x| x + n) },
        }
    }

    fn negate(self) -> Self {
        match self {
            Extent::Empty => Extent::Empty,
            Extent::Range { lo, hi } => Extent::Range { lo: hi.map(|x| -x), hi: lo.map(|x| -x) },
        }
    }

    fn union(self, other: Self) -> Self {
        match (self, other) {
            (Extent::Empty, x) | (x, Extent::Empty) => x,
            (Extent::Range { lo: a, hi: b }, Extent::Range { lo: c, hi: d }) => Extent::Range {
                lo: a.zip(c).map(|(x, y)| x.min(y)),
                hi: b.zip(d).map(|(x, y)| x.max(y)),
            },
        }
    }
}

impl From<FpModule> for GradedModule {
    fn from(m: FpModule) -> Self {
        GradedModule::Fp(m)
    }
}

impl GradedModule {
    pub fn free(ring: PolyRing, gens: Vec<i64>) -> Self {
        FpModule::free(ring, gens).into()
    }

    pub fn zero(ring: PolyRing) -> Self {
        FpModule::free(ring, vec![]).into()
    }

    /// `Q` concentrated in degree `d`.
    pub fn residue_field(ring: PolyRing, d: i64) -> Self {
        let forms: Vec<Poly> = (0..ring.num_gens).map(|i| Poly::var(ring.num_gens, i)).collect();
        FpModule::quotient_by(ring, d, &forms).into()
    }

    pub fn dual(self) -> Self {
        GradedModule::Dual { of: Box::new(self) }
    }

    pub fn shift(self, by: i64) -> Self {
        match self {
            _ if by == 0 => self,
            GradedModule::Fp(m) => GradedModule::Fp(m.shift(by)),
            GradedModule::Shift { by: b, of } => (*of).shift(b + by),
            other => GradedModule::Shift { by, of: Box::new(other) },
        }
    }

    pub fn sum(ring: PolyRing, parts: Vec<GradedModule>) -> Self {
        let parts: Vec<_> = parts.into_iter().filter(|p| !p.is_obviously_zero()).collect();
        match parts.len() {
            0 => Self::zero(ring),
            1 => parts.into_iter().next().unwrap(),
            _ => GradedModule::Sum { ring, parts },
        }
    }

    fn is_obviously_zero(&self) -> bool {
        match self {
            GradedModule::Fp(m) => m.gens.is_empty(),
            GradedModule::Dual { of } | GradedModule::Shift { of, .. } => of.is_obviously_zero(),
            GradedModule::Localized { base, .. } => base.gens.is_empty(),
            GradedModule::Sum { parts, .. } => parts.iter().all(Self::is_obviously_zero),
        }
    }

    pub fn ring(&self) -> PolyRing {
        match self {
            GradedModule::Fp(m) => m.ring,
            GradedModule::Dual { of } | GradedModule::Shift { of, .. } => of.ring(),
            GradedModule::Localized { base, .. } => base.ring,
            GradedModule::Sum { ring, .. } => *ring,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            GradedModule::Fp(_) => "fp",
            GradedModule::Dual { .. } => "dual",
            GradedModule::Localized { .. } => "localized",
            GradedModule::Sum { .. } => "sum",
            GradedModule::Shift { .. } => "shift",
        }
    }

    pub fn extent(&self) -> Extent {
        match self {
            GradedModule::Fp(m) => {
                let Some(hi) = m.gens.iter().copied().filter(|&g| m.dim(g) > 0).max() else {
                    return Extent::Empty;
                };
                Extent::Range { lo: m.lowest_nonzero(), hi: Some(hi) }
            }
            GradedModule::Dual { of } => of.extent().negate(),
            GradedModule::Shift { by, of } => of.extent().shift(*by),
            GradedModule::Sum { parts, .. } => parts.iter().fold(Extent::Empty, |a, p| a.union(p.extent())),
            GradedModule::Localized { base, .. } => {
                if GradedModule::Fp(base.clone()).extent().is_finite() {
                    Extent::Empty
                } else {
                    Extent::Range { lo: None, hi: None }
                }
            }
        }
    }

    /// Finite total dimension.
    pub fn is_finite_length(&self) -> bool {
        self.extent().is_finite()
    }

    pub fn dim(&self, d: i64) -> Result<usize, GradedError> {
        match self {
            GradedModule::Fp(m) => Ok(m.dim(d)),
            GradedModule::Dual { of } => of.dim(-d),
            GradedModule::Shift { by, of } => of.dim(d - by),
            GradedModule::Sum { parts, .. } => parts.iter().map(|p| p.dim(d)).sum(),
            GradedModule::Localized { .. } => Ok(self.localized(d)?.dim()),
        }
    }

    /// Multiplication by `c_i` from degree `d` to `d - 2`.
    pub fn act_var(&self, i: usize, d: i64) -> Result<QMat, GradedError> {
        let k = self.ring().num_gens;
        self.act_poly(&Poly::var(k, i), d)
    }

    /// Multiplication by homogeneous `p` from degree `d`.
    pub fn act_poly(&self, p: &Poly, d: i64) -> Result<QMat, GradedError> {
        let Some(pd) = p.degree() else {
            let (a, b) = (self.dim(d)?, 0);
            return Ok(QMat::zeros(b, a));
        };
        match self {
            GradedModule::Fp(m) => Ok(m.act_poly(p, d)),
            GradedModule::Shift { by, of } => of.act_poly(p, d - by),
            GradedModule::Sum { parts, .. } => {
                let blocks: Vec<QMat> = parts.iter().map(|q| q.act_poly(p, d)).collect::<Result<_, _>>()?;
                Ok(block_diag(&blocks))
            }
            GradedModule::Dual { of } => {
                // (p·f)(n) = f(p·n) for n in degree -(d + pd)
                Ok(of.act_poly(p, -(d + pd))?.transpose())
            }
            GradedModule::Localized { .. } => {
                let mut out = QMat::zeros(self.dim(d + pd)?, self.dim(d)?);
                for (e, c) in p.terms() {
                    let mut acc = QMat::identity(self.dim(d)?);
                    let mut cur = d;
                    for (i, &a) in e.iter().enumerate() {
                        for _ in 0..a {
                            acc = self.localized_var(i, cur)?.mul(&acc);
                            cur -= 2;
                        }
                    }
                    out = out.add(&acc.scale(c));
                }
                Ok(out)
            }
        }
    }

    /// The element-wise action of `p` on coordinates in degree `d`.
    pub fn apply_poly(&self, p: &Poly, d: i64, v: &[Q]) -> Result<Vec<Q>, GradedError> {
        Ok(self.act_poly(p, d)?.apply(v))
    }
}

pub fn block_diag(blocks: &[QMat]) -> QMat {
    let rows: usize = blocks.iter().map(QMat::nrows).sum();
    let cols: usize = blocks.iter().map(QMat::ncols).sum();
    let mut m = QMat::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                m.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
        r0 += b.nrows();
        c0 += b.ncols();
    }
    m
}

/// A localized piece realized as a quotient of a deep piece of the base.
pub struct LocalizedPiece {
    stage_degree: i64,
    kill: Subspace,
    basis: Vec<usize>,
}

impl LocalizedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl GradedModule {
    fn localization_data(&self) -> Result<(&FpModule, Poly, i64), GradedError> {
        let GradedModule::Localized { base, inverted, window } = self else {
            return Err(GradedError::Unsupported("not a localized module".into()));
        };
        let k = base.ring.num_gens;
        let s = match inverted {
            Multiplicative::Forms { forms } => forms.iter().fold(Poly::one(k), |acc, f| acc.mul(&Poly::linear(f))),
            Multiplicative::AllOutside { span } => {
                let rank = QMat::from_rows(k, &span.iter().map(|v| v.iter().map(|&x| super::linalg::q(x)).collect()).collect::<Vec<_>>()).rank();
                if rank == 0 && k == 1 {
                    Poly::var(1, 0)
                } else if GradedModule::Fp(base.clone()).is_finite_length() {
                    Poly::var(k, 0)
                } else {
                    return Err(GradedError::WindowInsufficient { window: *window, detail: "inverting infinitely many independent forms gives infinite pieces".into() });
                }
            }
        };
        Ok((base, s, *window))
    }

    /// Stage index from which the degree-`d` colimit has stabilized.
    fn natural_stage(&self, d: i64) -> Result<i64, GradedError> {
        let (base, s, window) = self.localization_data()?;
        let e = s.degree().unwrap_or(0);
        let hi = base.gens.iter().copied().max().unwrap_or(d);
        let lead = if e < 0 && d > hi { (d - hi + (-e) - 1) / (-e) } else { 0 };
        Ok(lead + window.max(2))
    }

    fn localized(&self, d: i64) -> Result<LocalizedPiece, GradedError> {
        self.localized_at(d, self.natural_stage(d)?)
    }

    /// The degree-`d` piece represented at stage `m`: a quotient of
    /// `base_{d + m·deg s}` by the kernel of a high power of `s`.
    fn localized_at(&self, d: i64, m: i64) -> Result<LocalizedPiece, GradedError> {
        let (base, s, window) = self.localization_data()?;
        if s.is_zero() {
            return Ok(LocalizedPiece { stage_degree: d, kill: Subspace::spanned_by(0, &[]), basis: vec![] });
        }
        let e = s.degree().expect("products of forms are homogeneous");
        let w = window.max(2);
        let power = |from: i64| -> QMat {
            let mut t = QMat::identity(base.dim(from));
            let mut cur = from;
            for _ in 0..w {
                t = base.act_poly(&s, cur).mul(&t);
                cur += e;
            }
            t
        };
        if e != 0 {
            let ranks: Vec<usize> = (m - w / 2..=m).map(|j| power(d + j * e).rank()).collect();
            if ranks.windows(2).any(|p| p[0] != p[1]) {
                return Err(GradedError::WindowInsufficient {
                    window: w,
                    detail: format!("localized piece in degree {d} does not stabilize: ranks {ranks:?}"),
                });
            }
        }
        let from = d + m * e;
        let t = power(from);
        let kill = Subspace::spanned_by(t.ncols(), &t.kernel());
        let basis = kill.free_coords();
        Ok(LocalizedPiece { stage_degree: from, kill, basis })
    }

    /// A single element whose inversion realizes the localization.
    pub fn inverted_element(&self) -> Result<Poly, GradedError> {
        Ok(self.localization_data()?.1)
    }

    /// The canonical map `base_d → (S⁻¹ base)_d`, `x ↦ x/1`.
    pub fn localization_map(&self, d: i64) -> Result<QMat, GradedError> {
        let (base, s, _) = self.localization_data()?;
        let tgt = self.localized(d)?;
        let n = base.dim(d);
        if s.is_zero() || tgt.dim() == 0 {
            return Ok(QMat::zeros(tgt.dim(), n));
        }
        let e = s.degree().expect("products of forms are homogeneous");
        let mut t = QMat::identity(n);
        let mut cur = d;
        while cur != tgt.stage_degree {
            t = base.act_poly(&s, cur).mul(&t);
            cur += e;
        }
        let cols: Vec<Vec<Q>> = (0..n)
            .map(|j| {
                let img = tgt.kill.reduce(&t.col(j));
                tgt.basis.iter().map(|&b| img[b].clone()).collect()
            })
            .collect();
        Ok(QMat::from_cols(tgt.dim(), &cols))
    }

    fn localized_var(&self, i: usize, d: i64) -> Result<QMat, GradedError> {
        let (base, _, _) = self.localization_data()?;
        let m = self.natural_stage(d)?.max(self.natural_stage(d - 2)?);
        let src = self.localized_at(d, m)?;
        let tgt = self.localized_at(d - 2, m)?;
        let x = base.act_poly(&Poly::var(base.ring.num_gens, i), src.stage_degree);
        let cols: Vec<Vec<Q>> = src
            .basis
            .iter()
            .map(|&b| {
                let mut unit = vec![Q::zero(); x.ncols()];
                unit[b] = Q::one();
                let img = tgt.kill.reduce(&x.apply(&unit));
                tgt.basis.iter().map(|&j| img[j].clone()).collect()
            })
            .collect();
        Ok(QMat::from_cols(tgt.dim(), &cols))
    }
}
