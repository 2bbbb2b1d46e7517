//! Closed subgroups of the torus `T^r`, encoded by their annihilator
//! sublattices of the character lattice `Z^r`.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("vector of length {got} in rank {rank}")]
    DimensionMismatch { rank: usize, got: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
}

type Row = Vec<i128>;

fn reduce_column(rows: &mut [Row], start: usize, col: usize) -> bool {
    loop {
        let mut best: Option<usize> = None;
        for i in start..rows.len() {
            if rows[i][col] != 0 && best.map_or(true, |b| rows[i][col].abs() < rows[b][col].abs()) {
                best = Some(i);
            }
        }
        let Some(b) = best else { return false };
        rows.swap(start, b);
        let mut done = true;
        for i in start + 1..rows.len() {
            if rows[i][col] != 0 {
                let q = rows[i][col].div_euclid(rows[start][col]);
                let p = rows[start].clone();
                for (x, y) in rows[i].iter_mut().zip(&p) {
                    *x -= q * y;
                }
                if rows[i][col] != 0 {
                    done = false;
                }
            }
        }
        if done {
            return true;
        }
    }
}

/// Row Hermite normal form: upper echelon, positive pivots, entries above a
/// pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf(mut rows: Vec<Row>, ncols: usize) -> Vec<Row> {
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        if reduce_column(&mut rows, r, c) {
            if rows[r][c] < 0 {
                rows[r].iter_mut().for_each(|x| *x = -*x);
            }
            pivots.push((r, c));
            r += 1;
        }
    }
    rows.truncate(r);
    for &(pr, pc) in &pivots {
        let p = rows[pr].clone();
        for row in rows.iter_mut().take(pr) {
            let q = row[pc].div_euclid(p[pc]);
            if q != 0 {
                for (x, y) in row.iter_mut().zip(&p) {
                    *x -= q * y;
                }
            }
        }
    }
    rows
}

fn pivot_col(row: &Row) -> usize {
    row.iter().position(|&x| x != 0).expect("hnf rows are nonzero")
}

/// Reduce `v` modulo the lattice with HNF basis `basis`; zero iff `v` lies in it.
fn reduce_mod(basis: &[Row], v: &mut Row) {
    for b in basis {
        let c = pivot_col(b);
        let q = v[c].div_euclid(b[c]);
        if q != 0 {
            for (x, y) in v.iter_mut().zip(b) {
                *x -= q * y;
            }
        }
    }
}

/// Coordinates of `v` in an HNF basis, or `None` when `v` is outside the lattice.
fn coords_in(basis: &[Row], v: &Row) -> Option<Vec<i128>> {
    let mut w = v.clone();
    let mut out = vec![0; basis.len()];
    for (i, b) in basis.iter().enumerate() {
        let c = pivot_col(b);
        if w[c] % b[c] != 0 {
            return None;
        }
        let q = w[c] / b[c];
        out[i] = q;
        for (x, y) in w.iter_mut().zip(b) {
            *x -= q * y;
        }
    }
    w.iter().all(|&x| x == 0).then_some(out)
}

/// Basis of `{x in Z^n : A x = 0}` for `A` given by rows of length `n`.
pub fn integer_kernel(rows: &[Row], n: usize) -> Vec<Row> {
    let m = rows.len();
    let mut aug: Vec<Row> = (0..n)
        .map(|j| {
            let mut r: Row = rows.iter().map(|row| row[j]).collect();
            r.extend((0..n).map(|k| i128::from(k == j)));
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..m {
        if r < aug.len() && reduce_column(&mut aug, r, c) {
            r += 1;
        }
    }
    let ker: Vec<Row> = aug[r..].iter().map(|row| row[m..].to_vec()).collect();
    hnf(ker, n)
}

/// Nonzero Smith invariant factors of an integer matrix, in divisibility order.
pub fn smith_invariants(rows: &[Row], ncols: usize) -> Vec<i128> {
    let mut a: Vec<Row> = rows.to_vec();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < a.len() && t < ncols {
        let mut piv = None;
        for i in t..a.len() {
            for j in t..ncols {
                if a[i][j] != 0 && piv.map_or(true, |(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..a.len() {
            let q = a[i][t].div_euclid(a[t][t]);
            let p = a[t].clone();
            for (x, y) in a[i].iter_mut().zip(&p) {
                *x -= q * y;
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..ncols {
            let q = a[t][j].div_euclid(a[t][t]);
            for row in a.iter_mut() {
                let v = row[t];
                row[j] -= q * v;
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        let d = a[t][t];
        let mut bad = None;
        'outer: for i in t + 1..a.len() {
            for j in t + 1..ncols {
                if a[i][j] % d != 0 {
                    bad = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad {
            let src = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&src) {
                *x += y;
            }
            continue;
        }
        diag.push(d.abs());
        t += 1;
    }
    diag
}

/// A closed subgroup `H` of `T^r`, stored as the canonical HNF basis of `Λ(H)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    rank: usize,
    ann: Vec<Vec<i64>>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(r={}, ann={})", self.rank, self.ann_string())
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ann={}", self.ann_string())
    }
}

fn to_rows(v: &[Vec<i64>]) -> Vec<Row> {
    v.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect()
}

fn from_rows(v: &[Row]) -> Result<Vec<Vec<i64>>, LatticeError> {
    v.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| LatticeError::Overflow)).collect())
        .collect()
}

impl Subgroup {
    /// Subgroup whose annihilator is generated by `gens`.
    pub fn new(rank: usize, gens: &[Vec<i64>]) -> Result<Self, LatticeError> {
        if rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        if let Some(g) = gens.iter().find(|g| g.len() != rank) {
            return Err(LatticeError::DimensionMismatch { rank, got: g.len() });
        }
        Self::from_rows(rank, to_rows(gens))
    }

    fn from_rows(rank: usize, rows: Vec<Row>) -> Result<Self, LatticeError> {
        Ok(Self { rank, ann: from_rows(&hnf(rows, rank))? })
    }

    fn rows(&self) -> Vec<Row> {
        to_rows(&self.ann)
    }

    /// The whole torus (zero annihilator).
    pub fn full(rank: usize) -> Self {
        Self { rank, ann: Vec::new() }
    }

    /// The trivial subgroup (annihilator all of `Z^r`).
    pub fn trivial(rank: usize) -> Self {
        let ann = (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect();
        Self { rank, ann }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Canonical basis vectors of the annihilator lattice.
    pub fn ann(&self) -> &[Vec<i64>] {
        &self.ann
    }

    pub fn dim(&self) -> usize {
        self.rank - self.ann.len()
    }

    pub fn codim(&self) -> usize {
        self.ann.len()
    }

    pub fn is_finite(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_connected(&self) -> bool {
        smith_invariants(&self.rows(), self.rank).iter().all(|&d| d == 1)
    }

    fn check_rank(&self, other: &Self) -> Result<(), LatticeError> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(LatticeError::RankMismatch(self.rank, other.rank))
        }
    }

    /// Whether the character `alpha` lies in the annihilator.
    pub fn annihilates(&self, alpha: &[i64]) -> bool {
        let mut v: Row = alpha.iter().map(|&x| i128::from(x)).collect();
        reduce_mod(&self.rows(), &mut v);
        v.iter().all(|&x| x == 0)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        self.rank == other.rank && self.ann.iter().all(|a| other.annihilates(a))
    }

    /// Annihilator-side saturation: the identity component.
    pub fn identity_component(&self) -> Self {
        let perp = integer_kernel(&self.rows(), self.rank);
        Self::from_rows(self.rank, integer_kernel(&perp, self.rank)).expect("saturation stays small")
    }

    pub fn component_group(&self) -> FiniteAbelianGroup {
        let d = smith_invariants(&self.rows(), self.rank);
        FiniteAbelianGroup::new(d.into_iter().filter(|&x| x != 1).map(|x| x as u64).collect())
            .expect("smith factors form a divisor chain")
    }

    /// `self ∩ other`.
    pub fn intersect(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_rank(other)?;
        let mut rows = self.rows();
        rows.extend(other.rows());
        Self::from_rows(self.rank, rows)
    }

    /// The subgroup generated by `self` and `other`.
    pub fn join(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_rank(other)?;
        let (a, b) = (self.rows(), other.rows());
        let n = a.len() + b.len();
        // x·A = y·B  ⇔  (x, -y) in the left kernel of [A; B]
        let cols: Vec<Row> = (0..self.rank)
            .map(|j| a.iter().map(|r| r[j]).chain(b.iter().map(|r| -r[j])).collect())
            .collect();
        let ker = integer_kernel(&cols, n);
        let rows = ker
            .iter()
            .map(|x| (0..self.rank).map(|j| a.iter().zip(x).map(|(r, c)| r[j] * c).sum()).collect())
            .collect();
        Self::from_rows(self.rank, rows)
    }

    /// Coordinates of `alpha ∈ Λ(self)` in [`Subgroup::char_basis`].
    pub fn char_coords(&self, alpha: &[i64]) -> Option<Vec<i64>> {
        let v: Row = alpha.iter().map(|&x| i128::from(x)).collect();
        coords_in(&self.rows(), &v).map(|c| c.into_iter().map(|x| x as i64).collect())
    }

    /// Ordered basis of `Λ(self)`; fixes the polynomial generators of `H*(BG/self)`.
    pub fn char_basis(&self) -> &[Vec<i64>] {
        &self.ann
    }

    /// Every subgroup between the identity component and `self`.
    pub fn subgroups_between(&self) -> Vec<Subgroup> {
        let sat = to_rows(self.identity_component().ann());
        let m = sat.len();
        let own: Vec<Row> = self
            .rows()
            .iter()
            .map(|v| coords_in(&sat, v).expect("lattice sits inside its saturation"))
            .collect();
        let box_basis = hnf(own, m);
        let quotient = QuotientGroup { basis: box_basis };
        quotient
            .subgroups()
            .into_iter()
            .map(|elems| {
                let mut rows = self.rows();
                for e in elems {
                    rows.push((0..self.rank).map(|j| sat.iter().zip(&e).map(|(s, c)| s[j] * c).sum()).collect());
                }
                Self::from_rows(self.rank, rows).expect("bounded by saturation")
            })
            .collect()
    }

    fn ann_string(&self) -> String {
        if self.ann.is_empty() {
            return "0".into();
        }
        self.ann
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parse `full`, `0`, or `a,b;c,d` annihilator generators.
    pub fn parse_ann(rank: usize, s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "full" => return Ok(Self::trivial(rank)),
            "0" | "" => return Ok(Self::full(rank)),
            _ => {}
        }
        let gens = s
            .split(';')
            .map(|v| {
                v.split([',', ' '])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<i64>().map_err(|e| format!("bad integer {t:?}: {e}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rank, &gens).map_err(|e| e.to_string())
    }
}

/// `K` cotoral in `L`: `K ⊆ L` with `L/K` a torus.
pub fn is_cotoral(k: &Subgroup, l: &Subgroup) -> Result<bool, LatticeError> {
    k.check_rank(l)?;
    if !l.contains(k) {
        return Ok(false);
    }
    // Λ(K)/Λ(L) torsion-free ⇔ no element of Λ(K) outside Λ(L) has a multiple in Λ(L).
    let sat_in_k = l.identity_component().intersect_lattice_with(k);
    Ok(&sat_in_k == l)
}

impl Subgroup {
    /// Subgroup with annihilator `Λ(self)^sat ∩ Λ(other)`.
    fn intersect_lattice_with(&self, other: &Subgroup) -> Subgroup {
        // lattice intersection corresponds to the join of subgroups
        self.join(other).expect("ranks agree")
    }
}

/// `ℤ^m` modulo a full-rank lattice in HNF, with elements as reduced vectors.
struct QuotientGroup {
    basis: Vec<Row>,
}

impl QuotientGroup {
    fn reduce(&self, mut v: Row) -> Row {
        reduce_mod(&self.basis, &mut v);
        v
    }

    fn elements(&self) -> Vec<Row> {
        let m = self.basis.len();
        let mut out = vec![vec![0i128; m]];
        for i in 0..m {
            let h = self.basis[i][i];
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..h).map(move |x| {
                        let mut w = v.clone();
                        w[i] = x;
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn add(&self, a: &Row, b: &Row) -> Row {
        self.reduce(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    fn subgroups(&self) -> Vec<Vec<Row>> {
        let zero = vec![0i128; self.basis.len()];
        let elems = self.elements();
        let start: BTreeSet<Row> = [zero.clone()].into();
        let mut seen: BTreeSet<BTreeSet<Row>> = [start.clone()].into();
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for e in &elems {
                if s.contains(e) {
                    continue;
                }
                let mut t = s.clone();
                let mut cur = e.clone();
                while !s.contains(&cur) {
                    for x in &s {
                        t.insert(self.add(x, &cur));
                    }
                    cur = self.add(&cur, e);
                }
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        seen.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(invariant_factors: Vec<u64>) -> Option<Self> {
        let ok = invariant_factors.iter().all(|&d| d >= 2)
            && invariant_factors.windows(2).all(|w| w[1] % w[0] == 0);
        ok.then_some(Self { invariant_factors })
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    /// A finite subgroup of `T^m` with this group as its component group.
    pub fn realize(&self) -> Subgroup {
        let m = self.invariant_factors.len().max(1);
        let mut gens: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();
        for (i, &d) in self.invariant_factors.iter().enumerate() {
            gens[i][i] = d as i64;
        }
        Subgroup::new(m, &gens).expect("diagonal lattice")
    }
}

/// A one-dimensional complex representation `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn is_trivial_on(&self, h: &Subgroup) -> bool {
        h.annihilates(&self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Representation(pub Vec<Character>);

impl Representation {
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// Real dimension of the `H`-fixed subspace.
    pub fn fixed_dimension(&self, h: &Subgroup) -> i64 {
        2 * self.0.iter().filter(|a| a.is_trivial_on(h)).count() as i64
    }

    /// Parse `"1;2"` or `"1,0;0,2"`.
    pub fn parse(rank: usize, s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(Self::default());
        }
        s.split(';')
            .map(|c| {
                let v = c
                    .split(',')
                    .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad exponent {t:?}: {e}")))
                    .collect::<Result<Vec<_>, _>>()?;
                if v.len() != rank {
                    return Err(format!("character {c:?} has length {} in rank {rank}", v.len()));
                }
                Ok(Character(v))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|c| c.0.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Every closed subgroup of `T^r` whose annihilator is generated by vectors
/// with entries in `[-bound, bound]`, deduplicated. Used to build test universes.
pub fn small_subgroups(rank: usize, bound: i64) -> Vec<Subgroup> {
    let vals: Vec<i64> = (-bound..=bound).collect();
    let mut vecs: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        vecs = vecs
            .into_iter()
            .flat_map(|v| vals.iter().map(move |&x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    let mut out: BTreeSet<Subgroup> = BTreeSet::new();
    out.insert(Subgroup::full(rank));
    let singles: Vec<Subgroup> = vecs.iter().filter_map(|v| Subgroup::new(rank, &[v.clone()]).ok()).collect();
    out.extend(singles.iter().cloned());
    if rank >= 2 {
        for a in &vecs {
            for b in &vecs {
                if let Ok(s) = Subgroup::new(rank, &[a.clone(), b.clone()]) {
                    out.insert(s);
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(rank: usize, gens: &[&[i64]]) -> Subgroup {
        Subgroup::new(rank, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(sg(1, &[&[0]]), Subgroup::full(1));
        assert_eq!(sg(1, &[&[2]]).ann(), &[vec![2]]);
        assert_eq!(sg(1, &[&[-4], &[6]]), sg(1, &[&[2]]));
        let h = sg(2, &[&[2, 4], &[6, 8]]);
        assert_eq!(h.component_group().invariant_factors(), &[2, 4]);
        assert_eq!(Subgroup::new(2, h.ann()).unwrap(), h);
        assert!(Subgroup::new(2, &[vec![1]]).is_err());
    }

    #[test]
    fn components() {
        let z2 = sg(1, &[&[2]]);
        assert_eq!(z2.identity_component(), Subgroup::trivial(1));
        assert_eq!(Subgroup::full(2).identity_component(), Subgroup::full(2));
        assert_eq!(sg(2, &[&[2, 0], &[0, 1]]).identity_component(), Subgroup::trivial(2));
        assert!(Subgroup::full(1).component_group().invariant_factors().is_empty());
        assert_eq!(z2.component_group().invariant_factors(), &[2]);
        assert_eq!(sg(2, &[&[2, 0], &[0, 3]]).component_group().invariant_factors(), &[6]);
        let circle_z2 = sg(2, &[&[2, 0]]);
        assert_eq!(circle_z2.dim(), 1);
        assert_eq!(circle_z2.identity_component(), sg(2, &[&[1, 0]]));
    }

    #[test]
    fn cotorality() {
        let z2 = sg(1, &[&[2]]);
        assert!(is_cotoral(&Subgroup::trivial(1), &Subgroup::full(1)).unwrap());
        assert!(is_cotoral(&z2, &Subgroup::full(1)).unwrap());
        assert!(!is_cotoral(&Subgroup::trivial(1), &z2).unwrap());
        assert!(is_cotoral(&z2, &z2).unwrap());
        assert!(is_cotoral(&z2, &Subgroup::full(2)).is_err());
        // Z/2 x 1 inside the circle T x 1 is cotoral; inside 1 x T it is not contained
        let z2x1 = sg(2, &[&[2, 0], &[0, 1]]);
        assert!(is_cotoral(&z2x1, &sg(2, &[&[0, 1]])).unwrap());
        assert!(!is_cotoral(&z2x1, &sg(2, &[&[1, 0]])).unwrap());
    }

    #[test]
    fn between() {
        assert_eq!(Subgroup::full(1).subgroups_between().len(), 1);
        assert_eq!(sg(1, &[&[2]]).subgroups_between().len(), 2);
        assert_eq!(sg(2, &[&[2, 0], &[0, 2]]).subgroups_between().len(), 5);
        assert_eq!(sg(1, &[&[6]]).subgroups_between().len(), 4);
        let subs = sg(1, &[&[2]]).subgroups_between();
        assert!(subs.contains(&Subgroup::trivial(1)));
    }

    #[test]
    fn characters() {
        let z2 = sg(1, &[&[2]]);
        assert!(Character(vec![2]).is_trivial_on(&z2));
        assert!(!Character(vec![1]).is_trivial_on(&z2));
        assert!(Character(vec![0, 0]).is_trivial_on(&Subgroup::full(2)));
        let v = Representation(vec![Character(vec![1])]);
        assert_eq!(v.fixed_dimension(&Subgroup::trivial(1)), 2);
        assert_eq!(v.fixed_dimension(&z2), 0);
        let w = Representation(vec![Character(vec![1]), Character(vec![2])]);
        assert_eq!(w.fixed_dimension(&z2), 2);
    }

    #[test]
    fn bases() {
        assert_eq!(Subgroup::trivial(2).char_basis(), &[vec![1, 0], vec![0, 1]]);
        let z2 = sg(1, &[&[2]]);
        assert_eq!(z2.char_basis(), &[vec![2]]);
        assert_eq!(z2.char_coords(&[2]), Some(vec![1]));
        assert_eq!(z2.char_coords(&[1]), None);
        assert!(Subgroup::full(1).char_basis().is_empty());
    }

    #[test]
    fn joins_and_meets() {
        let a = sg(2, &[&[1, 0]]);
        let b = sg(2, &[&[0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), Subgroup::trivial(2));
        assert_eq!(a.join(&b).unwrap(), Subgroup::full(2));
        let z2 = sg(1, &[&[2]]);
        let z3 = sg(1, &[&[3]]);
        assert_eq!(z2.join(&z3).unwrap(), sg(1, &[&[6]]));
    }

    #[test]
    fn parse_roundtrip() {
        let h = Subgroup::parse_ann(2, "2,4;6,8").unwrap();
        assert_eq!(Subgroup::parse_ann(2, &h.to_string()[4..]).unwrap(), h);
        assert_eq!(Subgroup::parse_ann(1, "full").unwrap(), Subgroup::trivial(1));
        assert_eq!(Subgroup::parse_ann(1, "0").unwrap(), Subgroup::full(1));
    }
}
