//! Seeded random generators for test corpora.

use crate::graded::{q, FpModule, GradedModule, Poly, PolyRing};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random homogeneous polynomial of internal degree `d` with small coefficients.
pub fn random_poly(rng: &mut Rng8, ring: PolyRing, d: i64) -> Poly {
    let mut p = Poly::zero();
    for m in ring.monomials_in_degree(d) {
        let c: i64 = rng.gen_range(-2..=2);
        p.add_term(m, q(c));
    }
    p
}

/// A random finite-length fp module with generators in degrees `0..=-2*spread`
/// (plus an odd shift when `odd`), total dimension at most `max_total`.
pub fn random_torsion_module(rng: &mut Rng8, ring: PolyRing, max_total: usize) -> FpModule {
    let k = ring.num_gens;
    loop {
        let ngens = rng.gen_range(1..=3usize);
        let odd = rng.gen_bool(0.2);
        let gens: Vec<i64> = (0..ngens).map(|_| -2 * rng.gen_range(0..=2i64) + i64::from(odd)).collect();
        let mut rels = Vec::new();
        for g in 0..ngens {
            for i in 0..k {
                let e = rng.gen_range(1..=3u32);
                let mut row = vec![Poly::zero(); ngens];
                let mut exp = vec![0; k];
                exp[i] = e;
                row[g] = Poly::monomial(exp, q(1));
                rels.push(row);
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let top = *gens.iter().max().unwrap();
            let d = top - 2 * rng.gen_range(0..=2i64);
            let row: Vec<Poly> = gens.iter().map(|&g| random_poly(rng, ring, d - g)).collect();
            if row.iter().any(|p| !p.is_zero()) {
                rels.push(row);
            }
        }
        let m = FpModule::new(ring, gens, rels).expect("homogeneous by construction");
        let total = total_dim(&GradedModule::Fp(m.clone()));
        if total > 0 && total <= max_total {
            return m;
        }
    }
}

/// Total dimension of a finite-length module.
pub fn total_dim(m: &GradedModule) -> usize {
    match m.extent() {
        crate::graded::Extent::Range { lo: Some(lo), hi: Some(hi) } => (lo..=hi).map(|d| m.dim(d).unwrap_or(0)).sum(),
        _ => 0,
    }
}
