//! Free resolutions, Ext, Tor and Hom over polynomial rings.

use super::linalg::{QMat, Subspace, Q};
use super::module::{Extent, FpModule, GradedModule};
use super::poly::{Poly, PolyRing};
use super::GradedError;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Where a generator of a free module is sent.
#[derive(Clone, Debug)]
enum Image {
    /// A vector of ring elements over the generators of an fp target.
    Polys(Vec<Poly>),
    /// Coordinates in the target piece of the generator's degree.
    Coords(Vec<Q>),
}

/// Matrix in degree `d` of the map from the fp module `src` defined on generators.
fn map_matrix(src: &FpModule, imgs: &[Image], target: &GradedModule, d: i64) -> Result<QMat, GradedError> {
    let piece = src.piece(d);
    let k = src.ring.num_gens;
    let rows = target.dim(d)?;
    let mut cols = Vec::with_capacity(piece.dim());
    for (g, mu) in piece.basis_terms() {
        let mono = Poly::monomial(mu, Q::one());
        let col = match &imgs[g] {
            Image::Polys(v) => {
                let GradedModule::Fp(t) = target else {
                    return Err(GradedError::Unsupported(format!("polynomial images into {} module", target.mode_name())));
                };
                let scaled: Vec<Poly> = v.iter().map(|p| p.mul(&mono)).collect();
                t.element_coords(&scaled, d)
            }
            Image::Coords(c) => target.act_poly(&mono, src.gens[g])?.apply(c),
        };
        debug_assert!(k == 0 || col.len() == rows);
        cols.push(col);
    }
    Ok(QMat::from_cols(rows, &cols))
}

/// Minimal generators, from degree `top` down to `bottom`, of the submodule
/// of `y` whose piece in degree `d` is spanned by `z(d)`.
fn minimal_generators(
    y: &GradedModule,
    mut z: impl FnMut(i64) -> Result<Vec<Vec<Q>>, GradedError>,
    top: i64,
    bottom: i64,
) -> Result<Vec<(i64, Vec<Q>)>, GradedError> {
    let k = y.ring().num_gens;
    let mut out = Vec::new();
    let mut above: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
    let mut d = top;
    while d >= bottom {
        let zd = z(d)?;
        let n = y.dim(d)?;
        let mut dec = Vec::new();
        if let Some(prev) = above.get(&(d + 2)) {
            for i in 0..k {
                let a = y.act_var(i, d + 2)?;
                dec.extend(prev.iter().map(|v| a.apply(v)));
            }
        }
        let mut span = Subspace::spanned_by(n, &dec);
        for v in &zd {
            if !span.contains(v) {
                out.push((d, v.clone()));
                let mut vs = span.vectors();
                vs.push(v.clone());
                span = Subspace::spanned_by(n, &vs);
            }
        }
        above.insert(d, zd);
        above.retain(|&e, _| e <= d + 2);
        d -= 1;
    }
    Ok(out)
}

fn coords_to_polys(free: &FpModule, d: i64, v: &[Q]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); free.gens.len()];
    for ((g, mu), c) in free.piece(d).basis_terms().into_iter().zip(v) {
        if !c.is_zero() {
            out[g].add_term(mu, c.clone());
        }
    }
    out
}

/// A free resolution `... → P_1 → P_0 → X`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeResolution {
    pub ring: PolyRing,
    /// Generator degrees of each `P_s`.
    pub gens: Vec<Vec<i64>>,
    /// `diffs[s][h]`: image of generator `h` of `P_s` in `P_{s-1}`; empty for `s = 0`.
    pub diffs: Vec<Vec<Vec<Poly>>>,
    /// Whether every generator is provably found (finite-length input or a closed form).
    pub certified: bool,
    /// Coordinates of the image in `X` of each generator of `P_0`, when known.
    #[serde(skip)]
    pub augmentation: Vec<Vec<Q>>,
}

impl FreeResolution {
    pub fn length(&self) -> usize {
        self.gens.iter().rposition(|g| !g.is_empty()).map_or(0, |i| i)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.gens.iter().map(Vec::len).collect()
    }

    pub fn free_module(&self, s: usize) -> FpModule {
        FpModule::free(self.ring, self.gens.get(s).cloned().unwrap_or_default())
    }

    /// Degree-`d` matrix of `P_s → P_{s-1}` (`s ≥ 1`).
    pub fn differential(&self, s: usize, d: i64) -> QMat {
        let src = self.free_module(s);
        let tgt = GradedModule::Fp(self.free_module(s - 1));
        let imgs: Vec<Image> = self.diffs[s].iter().cloned().map(Image::Polys).collect();
        map_matrix(&src, &imgs, &tgt, d).expect("free targets are fp")
    }

    /// Degree-`d` matrix of the augmentation `P_0 → x`.
    pub fn augmentation_matrix(&self, x: &GradedModule, d: i64) -> Result<QMat, GradedError> {
        let imgs: Vec<Image> = self.augmentation.iter().cloned().map(Image::Coords).collect();
        map_matrix(&self.free_module(0), &imgs, x, d)
    }

    /// Minimal free resolution of `x`. Finite-length modules are resolved
    /// completely; modules bounded only above are resolved down to `window`
    /// degrees below their top per stage and flagged uncertified.
    pub fn minimal(x: &GradedModule, window: i64) -> Result<Self, GradedError> {
        let ring = x.ring();
        let k = ring.num_gens;
        let (lo, hi) = match x.extent() {
            Extent::Empty => {
                return Ok(Self { ring, gens: vec![vec![]], diffs: vec![vec![]], certified: true, augmentation: vec![] })
            }
            Extent::Range { hi: None, .. } => {
                return Err(GradedError::Unsupported("free resolution of a module unbounded above".into()))
            }
            Extent::Range { lo, hi: Some(hi) } => (lo, hi),
        };
        let bottom = |s: i64| lo.map_or(hi - 2 * s - 2 * window.max(1), |l| l - 2 * s);
        let g0 = minimal_generators(x, |d| Ok(identity_basis(x.dim(d)?)), hi, bottom(0))?;
        let mut gens = vec![g0.iter().map(|(d, _)| *d).collect::<Vec<_>>()];
        let mut diffs: Vec<Vec<Vec<Poly>>> = vec![vec![]];
        let augmentation: Vec<Vec<Q>> = g0.iter().map(|(_, v)| v.clone()).collect();
        let mut imgs: Vec<Image> = g0.into_iter().map(|(_, v)| Image::Coords(v)).collect();
        let mut target = x.clone();
        for s in 1..=(k + 1) {
            let prev = FpModule::free(ring, gens[s - 1].clone());
            let Some(&top) = prev.gens.iter().max() else { break };
            let found = minimal_generators(
                &GradedModule::Fp(prev.clone()),
                |d| Ok(map_matrix(&prev, &imgs, &target, d)?.kernel()),
                top,
                bottom(s as i64),
            )?;
            if found.is_empty() {
                break;
            }
            if s == k + 1 {
                return Err(GradedError::WindowInsufficient {
                    window,
                    detail: "syzygies persist past the global dimension".into(),
                });
            }
            gens.push(found.iter().map(|(d, _)| *d).collect());
            let polys: Vec<Vec<Poly>> = found.iter().map(|(d, v)| coords_to_polys(&prev, *d, v)).collect();
            imgs = polys.iter().cloned().map(Image::Polys).collect();
            diffs.push(polys);
            target = GradedModule::Fp(prev);
        }
        Ok(Self { ring, gens, diffs, certified: lo.is_some(), augmentation })
    }
}

fn identity_basis(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|j| (0..n).map(|i| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

/// The Koszul resolution of `Q` over `Q[c_1..c_k]`: `P_i` free on the
/// `i`-subsets of the variables, in degree `-2i`.
pub fn koszul_complex(ring: PolyRing) -> FreeResolution {
    let k = ring.num_gens;
    let subsets: Vec<Vec<Vec<usize>>> = (0..=k).map(|i| subsets_of(k, i)).collect();
    let gens = subsets.iter().enumerate().map(|(i, s)| vec![-2 * i as i64; s.len()]).collect();
    let mut diffs = vec![vec![]];
    for i in 1..=k {
        let prev = &subsets[i - 1];
        let d = subsets[i]
            .iter()
            .map(|set| {
                let mut row = vec![Poly::zero(); prev.len()];
                for (pos, &j) in set.iter().enumerate() {
                    let rest: Vec<usize> = set.iter().copied().filter(|&x| x != j).collect();
                    let idx = prev.iter().position(|p| *p == rest).expect("faces are subsets");
                    let sign = if pos % 2 == 0 { Q::one() } else { -Q::one() };
                    row[idx] = Poly::var(k, j).scale(&sign);
                }
                row
            })
            .collect();
        diffs.push(d);
    }
    FreeResolution { ring, gens, diffs, certified: true, augmentation: vec![vec![Q::one()]] }
}

fn subsets_of(k: usize, i: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, i: usize) -> Vec<Vec<usize>> {
        if i == 0 {
            return vec![vec![]];
        }
        (start..k)
            .flat_map(|a| {
                go(a + 1, k, i - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
            })
            .collect()
    }
    go(0, k, i)
}

/// Dimensions of `Ext^{s,t}` over a window of internal degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub entries: BTreeMap<(usize, i64), usize>,
    pub certified: bool,
}

impl ExtTable {
    pub fn get(&self, s: usize, t: i64) -> usize {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn total(&self, s: usize) -> usize {
        self.entries.iter().filter(|((a, _), _)| *a == s).map(|(_, v)| v).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|&v| v == 0)
    }

    fn put(&mut self, s: usize, t: i64, v: usize) {
        if v > 0 {
            *self.entries.entry((s, t)).or_insert(0) += v;
        }
    }

    pub fn merge(&mut self, other: &ExtTable) {
        for (&(s, t), &v) in &other.entries {
            self.put(s, t, v);
        }
        self.certified &= other.certified;
    }

    pub fn shifted(&self, dt: i64) -> Self {
        Self { entries: self.entries.iter().map(|(&(s, t), &v)| ((s, t + dt), v)).collect(), certified: self.certified }
    }
}

/// `Hom(P_s, N)_t → Hom(P_{s+1}, N)_t`.
fn hom_differential(res: &FreeResolution, n: &GradedModule, s: usize, t: i64) -> Result<QMat, GradedError> {
    let src_gens = &res.gens[s];
    let empty = vec![];
    let tgt_gens = res.gens.get(s + 1).unwrap_or(&empty);
    let cols: usize = src_gens.iter().map(|&g| n.dim(g + t)).sum::<Result<usize, _>>()?;
    let rows: usize = tgt_gens.iter().map(|&g| n.dim(g + t)).sum::<Result<usize, _>>()?;
    let mut m = QMat::zeros(rows, cols);
    let mut r0 = 0;
    for (h, &hd) in tgt_gens.iter().enumerate() {
        let mut c0 = 0;
        for (g, &gd) in src_gens.iter().enumerate() {
            let p = &res.diffs[s + 1][h][g];
            let w = n.dim(gd + t)?;
            if !p.is_zero() {
                let a = n.act_poly(p, gd + t)?;
                for i in 0..a.nrows() {
                    for j in 0..a.ncols() {
                        m.set(r0 + i, c0 + j, a.get(i, j).clone());
                    }
                }
            }
            c0 += w;
        }
        r0 += n.dim(hd + t)?;
    }
    Ok(m)
}

/// `Ext_R^{s,t}(M, N)` from a free resolution of `M`, for `t` in `t_range`.
pub fn ext_from_resolution(
    res: &FreeResolution,
    n: &GradedModule,
    t_range: std::ops::RangeInclusive<i64>,
) -> Result<ExtTable, GradedError> {
    let mut table = ExtTable { entries: BTreeMap::new(), certified: res.certified };
    for t in t_range {
        let mut prev_rank = 0;
        for s in 0..res.gens.len() {
            let d = hom_differential(res, n, s, t)?;
            let rank = d.rank();
            table.put(s, t, d.ncols() - rank - prev_rank);
            prev_rank = rank;
        }
    }
    Ok(table)
}

/// `Ext_R^{s,t}(M, N)` via the minimal free resolution of `M`.
pub fn ext_over_poly(
    m: &GradedModule,
    n: &GradedModule,
    t_range: std::ops::RangeInclusive<i64>,
    window: i64,
) -> Result<ExtTable, GradedError> {
    if m.ring() != n.ring() {
        return Err(GradedError::RingMismatch(m.ring().num_gens, n.ring().num_gens));
    }
    let res = FreeResolution::minimal(m, window)?;
    ext_from_resolution(&res, n, t_range)
}

/// `Ext_R^{s,t}(V, N_0^∨) = Tor^R_s(V, N_0)_{-t}^*`, resolving `N_0` instead of `V`.
pub fn ext_via_matlis(
    v: &GradedModule,
    n0: &GradedModule,
    t_range: std::ops::RangeInclusive<i64>,
    window: i64,
) -> Result<ExtTable, GradedError> {
    let res = FreeResolution::minimal(n0, window)?;
    let mut table = ExtTable { entries: BTreeMap::new(), certified: res.certified };
    let tor_piece = |s: usize, d: i64| -> Result<usize, GradedError> {
        res.gens.get(s).map_or(Ok(0), |g| g.iter().map(|&h| v.dim(d - h)).sum())
    };
    // (V ⊗ P_s)_d → (V ⊗ P_{s-1})_d
    let boundary = |s: usize, d: i64| -> Result<QMat, GradedError> {
        let rows = tor_piece(s - 1, d)?;
        let cols = tor_piece(s, d)?;
        let mut m = QMat::zeros(rows, cols);
        let mut c0 = 0;
        for (h, &hd) in res.gens[s].iter().enumerate() {
            let mut r0 = 0;
            for (g, &gd) in res.gens[s - 1].iter().enumerate() {
                let p = &res.diffs[s][h][g];
                if !p.is_zero() {
                    let a = v.act_poly(p, d - hd)?;
                    for i in 0..a.nrows() {
                        for j in 0..a.ncols() {
                            m.set(r0 + i, c0 + j, a.get(i, j).clone());
                        }
                    }
                }
                r0 += v.dim(d - gd)?;
            }
            c0 += v.dim(d - hd)?;
        }
        Ok(m)
    };
    for t in t_range {
        let d = -t;
        for s in 0..res.gens.len() {
            let dim = tor_piece(s, d)?;
            let out_rank = if s == 0 { 0 } else { boundary(s, d)?.rank() };
            let in_rank = if s + 1 < res.gens.len() { boundary(s + 1, d)?.rank() } else { 0 };
            table.put(s, t, dim - out_rank - in_rank);
        }
    }
    Ok(table)
}

/// `Hom_R(M, N)_n` computed straight from the presentation of `M`.
pub fn hom_dims(m: &FpModule, n: &GradedModule, degree: i64) -> Result<usize, GradedError> {
    let widths: Vec<usize> = m.gens.iter().map(|&g| n.dim(g + degree)).collect::<Result<_, _>>()?;
    let unknowns: usize = widths.iter().sum();
    let mut blocks = Vec::new();
    for j in 0..m.rels.len() {
        let Some(rd) = m.rel_degree(j)? else { continue };
        let rows = n.dim(rd + degree)?;
        let mut cols = Vec::new();
        for (g, p) in m.rels[j].iter().enumerate() {
            if p.is_zero() {
                cols.push(QMat::zeros(rows, widths[g]));
            } else {
                cols.push(n.act_poly(p, m.gens[g] + degree)?);
            }
        }
        blocks.push(QMat::hstack(&cols, rows));
    }
    let constraint = QMat::vstack(&blocks, unknowns);
    Ok(unknowns - constraint.rank())
}

/// `M^∨` with `(M^∨)_d = (M_{-d})^*`.
pub fn graded_dual(m: GradedModule) -> GradedModule {
    match m {
        GradedModule::Dual { of } => *of,
        other => other.dual(),
    }
}

fn split_dual(n: &GradedModule) -> Option<GradedModule> {
    match n {
        GradedModule::Dual { of } => Some((**of).clone()),
        GradedModule::Shift { by, of } => split_dual(of).map(|n0| n0.shift(-by)),
        _ => None,
    }
}

/// `Hom_R(M, N_0^∨) = (M ⊗_R N_0)^∨`.
pub fn hom_into_dual(m: &GradedModule, n: &GradedModule) -> Result<GradedModule, GradedError> {
    let n0 = split_dual(n).ok_or_else(|| GradedError::Unsupported(format!("hom into a {} module", n.mode_name())))?;
    let tensor = match (m, &n0) {
        (_, GradedModule::Fp(f)) if f.rels.is_empty() => {
            GradedModule::sum(m.ring(), f.gens.iter().map(|&g| m.clone().shift(g)).collect())
        }
        (GradedModule::Fp(a), GradedModule::Fp(b)) => GradedModule::Fp(a.tensor(b)),
        _ => {
            return Err(GradedError::Unsupported(format!(
                "tensor of {} with {} modules",
                m.mode_name(),
                n0.mode_name()
            )))
        }
    };
    Ok(graded_dual(tensor))
}

/// A degree-zero map between fp modules given on generators.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub source: FpModule,
    pub target: FpModule,
    pub images: Vec<Vec<Poly>>,
}

impl GradedMap {
    pub fn new(source: FpModule, target: FpModule, images: Vec<Vec<Poly>>) -> Result<Self, GradedError> {
        if images.len() != source.gens.len() || images.iter().any(|v| v.len() != target.gens.len()) {
            return Err(GradedError::Malformed("map images do not match generator counts".into()));
        }
        let f = Self { source, target, images };
        for j in 0..f.source.rels.len() {
            let Some(rd) = f.source.rel_degree(j)? else { continue };
            let mut img = vec![Poly::zero(); f.target.gens.len()];
            for (g, p) in f.source.rels[j].iter().enumerate() {
                for (t, q) in f.images[g].iter().enumerate() {
                    img[t] = img[t].add(&p.mul(q));
                }
            }
            if f.target.element_coords(&img, rd).iter().any(|x| !x.is_zero()) {
                return Err(GradedError::Malformed(format!("relation {j} is not respected")));
            }
        }
        Ok(f)
    }

    pub fn matrix(&self, d: i64) -> QMat {
        let imgs: Vec<Image> = self.images.iter().cloned().map(Image::Polys).collect();
        map_matrix(&self.source, &imgs, &GradedModule::Fp(self.target.clone()), d).expect("fp target")
    }

    pub fn cokernel(&self) -> FpModule {
        let mut rels = self.target.rels.clone();
        rels.extend(self.images.iter().cloned());
        FpModule { ring: self.target.ring, gens: self.target.gens.clone(), rels }
    }

    fn search_bottom(&self, window: i64) -> i64 {
        let lo = match GradedModule::Fp(self.source.clone()).extent() {
            Extent::Range { lo: Some(lo), .. } => lo,
            _ => self.source.gens.iter().min().copied().unwrap_or(0) - 2 * window,
        };
        lo - 2
    }

    /// Presentation of `ker f`, exact for finite-length sources and computed
    /// to `window` degrees otherwise.
    pub fn kernel(&self, window: i64) -> Result<FpModule, GradedError> {
        let ring = self.source.ring;
        let Some(&top) = self.source.gens.iter().max() else {
            return Ok(FpModule::free(ring, vec![]));
        };
        let src = GradedModule::Fp(self.source.clone());
        let bottom = self.search_bottom(window);
        let kgens = minimal_generators(&src, |d| Ok(self.matrix(d).kernel()), top, bottom)?;
        let free = FpModule::free(ring, kgens.iter().map(|(d, _)| *d).collect());
        let imgs: Vec<Image> = kgens
            .iter()
            .map(|(d, v)| {
                let piece = self.source.piece(*d);
                let mut polys = vec![Poly::zero(); self.source.gens.len()];
                for ((g, mu), c) in piece.basis_terms().into_iter().zip(v) {
                    polys[g].add_term(mu, c.clone());
                }
                Image::Polys(polys)
            })
            .collect();
        let Some(&ktop) = free.gens.iter().max() else {
            return Ok(free);
        };
        let syz = minimal_generators(
            &GradedModule::Fp(free.clone()),
            |d| Ok(map_matrix(&free, &imgs, &src, d)?.kernel()),
            ktop,
            bottom - 4,
        )?;
        let rels = syz.iter().map(|(d, v)| coords_to_polys(&free, *d, v)).collect();
        FpModule::new(ring, free.gens.clone(), rels)
    }

    /// Presentation of the image, as the source modulo the kernel.
    pub fn image(&self, window: i64) -> Result<FpModule, GradedError> {
        let ring = self.source.ring;
        let Some(&top) = self.source.gens.iter().max() else {
            return Ok(FpModule::free(ring, vec![]));
        };
        let src = GradedModule::Fp(self.source.clone());
        let kgens = minimal_generators(&src, |d| Ok(self.matrix(d).kernel()), top, self.search_bottom(window))?;
        let mut rels = self.source.rels.clone();
        for (d, v) in kgens {
            let piece = self.source.piece(d);
            let mut polys = vec![Poly::zero(); self.source.gens.len()];
            for ((g, mu), c) in piece.basis_terms().into_iter().zip(&v) {
                polys[g].add_term(mu, c.clone());
            }
            rels.push(polys);
        }
        FpModule::new(ring, self.source.gens.clone(), rels)
    }
}
