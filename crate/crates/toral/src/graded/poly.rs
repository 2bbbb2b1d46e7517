//! Polynomials over the rationals with generators in degree -2.

use super::linalg::{q, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Ring `Q[c_1..c_k]`, each `c_i` of degree -2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyRing {
    pub num_gens: usize,
}

impl PolyRing {
    pub const GEN_DEGREE: i64 = -2;

    pub fn new(num_gens: usize) -> Self {
        Self { num_gens }
    }

    /// Monomials of polynomial degree `i` (internal degree `-2i`), in a fixed order.
    pub fn monomials(&self, i: usize) -> Vec<Vec<u32>> {
        fn go(k: usize, i: u32) -> Vec<Vec<u32>> {
            if k == 0 {
                return if i == 0 { vec![vec![]] } else { vec![] };
            }
            if k == 1 {
                return vec![vec![i]];
            }
            (0..=i)
                .rev()
                .flat_map(|a| {
                    go(k - 1, i - a).into_iter().map(move |mut rest| {
                        rest.insert(0, a);
                        rest
                    })
                })
                .collect()
        }
        go(self.num_gens, i as u32)
    }

    /// Monomials of internal degree `d`; empty for positive or odd `d`.
    pub fn monomials_in_degree(&self, d: i64) -> Vec<Vec<u32>> {
        if d > 0 || d % 2 != 0 {
            return vec![];
        }
        self.monomials((-d / 2) as usize)
    }

    pub fn piece_dim(&self, d: i64) -> usize {
        self.monomials_in_degree(d).len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, Q>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coef: String,
    exp: Vec<u32>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self.terms.iter().map(|(e, c)| TermRepr { coef: c.to_string(), exp: e.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<TermRepr>::deserialize(d)?;
        let mut p = Poly::zero();
        for t in v {
            let c: Q = t.coef.parse().map_err(serde::de::Error::custom)?;
            p.add_term(t.exp, c);
        }
        Ok(p)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(k: usize, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![0; k], c);
        p
    }

    pub fn one(k: usize) -> Self {
        Self::constant(k, Q::one())
    }

    pub fn monomial(exp: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    pub fn var(k: usize, i: usize) -> Self {
        let mut e = vec![0; k];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    /// The linear form `sum coeffs[i] c_i`.
    pub fn linear(coeffs: &[i64]) -> Self {
        let k = coeffs.len();
        let mut p = Self::zero();
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = vec![0; k];
            e[i] = 1;
            p.add_term(e, q(a));
        }
        p
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    /// Internal degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|e| -2 * e.iter().map(|&x| i64::from(x)).sum::<i64>());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut p = Self::zero();
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, n: u32, k: usize) -> Self {
        (0..n).fold(Self::one(k), |acc, _| acc.mul(self))
    }

    /// Substitute `c_i ↦ images[i]`.
    pub fn substitute(&self, images: &[Poly], k_target: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut t = Self::constant(k_target, c.clone());
            for (i, &a) in e.iter().enumerate() {
                t = t.mul(&images[i].pow(a, k_target));
            }
            out = out.add(&t);
        }
        out
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(i, &a)| if a == 1 { format!("c{}", i + 1) } else { format!("c{}^{a}", i + 1) })
                    .collect();
                match (mono.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => mono.join("*"),
                    (false, false) => format!("{c}*{}", mono.join("*")),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        let r = PolyRing::new(2);
        assert_eq!(r.piece_dim(-6), 4);
        assert_eq!(r.piece_dim(0), 1);
        assert_eq!(r.piece_dim(2), 0);
        assert_eq!(PolyRing::new(1).piece_dim(-4), 1);
        assert_eq!(PolyRing::new(3).piece_dim(-4), 6);
        assert_eq!(PolyRing::new(0).piece_dim(0), 1);
        assert_eq!(PolyRing::new(0).piece_dim(-2), 0);
    }

    #[test]
    fn arithmetic() {
        let c = Poly::var(1, 0);
        let two_c = Poly::linear(&[2]);
        let p = c.mul(&two_c);
        assert_eq!(p.coeff(&[2]), q(2));
        assert_eq!(p.degree(), Some(-4));
        assert!(c.add(&c.scale(&q(-1))).is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let p = Poly::linear(&[1, -3]).mul(&Poly::var(2, 1));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Poly>(&s).unwrap(), p);
    }
}
