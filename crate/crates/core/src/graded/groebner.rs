//! Buchberger's algorithm over `F_p` in a handful of variables.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::padic::{inv_mod, mulmod};

pub type Mono = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Total degree, ties broken lexicographically with variable 0 largest.
    DegLex,
    /// Block order: exponent of variable 0 first, then `DegLex` on the rest.
    EliminateFirst,
}

fn deglex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

pub fn cmp_mono(order: MonomialOrder, a: &[u32], b: &[u32]) -> Ordering {
    match order {
        MonomialOrder::DegLex => deglex(a, b),
        MonomialOrder::EliminateFirst => a[0].cmp(&b[0]).then_with(|| deglex(&a[1..], &b[1..])),
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Sparse polynomial; terms sorted strictly descending in `order`, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub p: u64,
    pub order: MonomialOrder,
    pub terms: Vec<(Mono, u64)>,
}

impl Poly {
    pub fn zero(p: u64, order: MonomialOrder) -> Self {
        Poly { p, order, terms: Vec::new() }
    }

    pub fn from_terms(p: u64, order: MonomialOrder, terms: impl IntoIterator<Item = (Mono, u64)>) -> Self {
        let mut acc: HashMap<Mono, u64> = HashMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = (*e + c % p) % p;
        }
        let mut terms: Vec<(Mono, u64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_by(|a, b| cmp_mono(order, &b.0, &a.0));
        Poly { p, order, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Mono {
        &self.terms[0].0
    }

    fn lc(&self) -> u64 {
        self.terms[0].1
    }

    pub fn is_constant(&self) -> bool {
        !self.is_zero() && self.lm().iter().all(|e| *e == 0)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p);
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), mulmod(*c, inv, self.p))).collect(),
            ..self.clone()
        }
    }

    pub fn with_order(&self, order: MonomialOrder) -> Poly {
        Poly::from_terms(self.p, order, self.terms.clone())
    }

    /// `self − c·x^shift·g`.
    pub fn sub_mul(&self, c: u64, shift: &[u32], g: &Poly) -> Poly {
        let p = self.p;
        let neg = (p - c % p) % p;
        let scaled = g.terms.iter().map(|(m, k)| {
            let mm: Mono = m.iter().zip(shift).map(|(a, b)| a + b).collect();
            (mm, mulmod(*k, neg, p))
        });
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = scaled.peekable();
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().unwrap(),
                (None, Some(_)) => b.next().unwrap(),
                (Some(x), Some(y)) => match cmp_mono(self.order, &x.0, &y.0) {
                    Ordering::Greater => a.next().unwrap(),
                    Ordering::Less => b.next().unwrap(),
                    Ordering::Equal => {
                        let (m, c1) = a.next().unwrap();
                        let (_, c2) = b.next().unwrap();
                        (m, (c1 + c2) % p)
                    }
                },
            };
            if next.1 != 0 {
                out.push(next);
            }
        }
        Poly { p, order: self.order, terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                terms.push((m1.iter().zip(m2).map(|(a, b)| a + b).collect(), mulmod(*c1, *c2, self.p)));
            }
        }
        Poly::from_terms(self.p, self.order, terms)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Poly::from_terms(self.p, self.order, t)
    }
}

/// Full normal form of `f` modulo `basis`.
pub fn normal_form(f: &Poly, basis: &[Poly]) -> Poly {
    let mut rem = f.clone();
    let mut out: Vec<(Mono, u64)> = Vec::new();
    while !rem.is_zero() {
        let (m, c) = rem.terms[0].clone();
        match basis.iter().find(|g| !g.is_zero() && divides(g.lm(), &m)) {
            Some(g) => {
                let shift: Mono = m.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
                let factor = mulmod(c, inv_mod(g.lc(), f.p), f.p);
                rem = rem.sub_mul(factor, &shift, g);
            }
            None => {
                out.push((m, c));
                rem.terms.remove(0);
            }
        }
    }
    Poly { p: f.p, order: f.order, terms: out }
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let l = lcm(f.lm(), g.lm());
    let sf: Mono = l.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
    let sg: Mono = l.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
    let f1 = f.monic();
    let g1 = g.monic();
    let zero = Poly::zero(f.p, f.order);
    zero.sub_mul(f.p - 1, &sf, &f1).sub_mul(1, &sg, &g1)
}

/// Reduced Gröbner basis, monic, sorted by descending leading monomial.
pub fn groebner(gens: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    if basis.is_empty() {
        return basis;
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (f, g) = (&basis[i], &basis[j]);
        // coprime leading monomials: the S-polynomial reduces to zero
        if f.lm().iter().zip(g.lm()).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let h = normal_form(&s_poly(f, g), &basis);
        if !h.is_zero() {
            let h = h.monic();
            let k = basis.len();
            for i in 0..k {
                pairs.push((i, k));
            }
            basis.push(h);
        }
    }
    reduce_basis(basis)
}

fn reduce_basis(mut basis: Vec<Poly>) -> Vec<Poly> {
    // drop elements whose leading monomial is divisible by another's
    basis.sort_by(|a, b| cmp_mono(a.order, a.lm(), b.lm()));
    let mut minimal: Vec<Poly> = Vec::new();
    for g in basis {
        if !minimal.iter().any(|h| divides(h.lm(), g.lm())) {
            minimal.push(g);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        reduced.push(normal_form(&minimal[i], &others).monic());
    }
    reduced.sort_by(|a, b| cmp_mono(a.order, b.lm(), a.lm()));
    reduced
}

/// Krull dimension of `F_p[vars]/I` from the leading monomials of a Gröbner basis.
pub fn krull_dim_of_basis(basis: &[Poly], nvars: usize) -> i64 {
    if basis.iter().any(|g| g.is_constant()) {
        return -1;
    }
    let supports: Vec<u32> = basis
        .iter()
        .map(|g| g.lm().iter().enumerate().filter(|(_, e)| **e > 0).fold(0u32, |acc, (i, _)| acc | (1 << i)))
        .collect();
    let mut best = 0;
    for set in 0u32..(1 << nvars) {
        // independent: no leading monomial lives entirely inside the set
        if supports.iter().all(|s| s & !set != 0) {
            best = best.max(set.count_ones() as i64);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 5;

    fn poly(terms: &[(&[u32], u64)]) -> Poly {
        Poly::from_terms(P, MonomialOrder::DegLex, terms.iter().map(|(m, c)| (m.to_vec(), *c)))
    }

    #[test]
    fn hand_computed_basis() {
        // variables (X1, X2, e0); hand Buchberger: S(X1^2, X1X2 − e0^2) = X1·e0^2
        let f = poly(&[(&[2, 0, 0], 1)]);
        let g = poly(&[(&[1, 1, 0], 1), (&[0, 0, 2], P - 1)]);
        let gb = groebner(&[f, g]);
        assert!(gb.contains(&poly(&[(&[1, 0, 2], 1)])));
        assert_eq!(groebner(&gb), gb);
    }

    #[test]
    fn unit_ideal() {
        let gb = groebner(&[poly(&[(&[0, 0, 0], 3)]), poly(&[(&[1, 0, 0], 1)])]);
        assert_eq!(gb, vec![poly(&[(&[0, 0, 0], 1)])]);
        assert_eq!(krull_dim_of_basis(&gb, 3), -1);
    }

    #[test]
    fn elimination_order_puts_first_variable_on_top() {
        assert_eq!(cmp_mono(MonomialOrder::EliminateFirst, &[1, 0, 0], &[0, 5, 5]), Ordering::Greater);
        assert_eq!(cmp_mono(MonomialOrder::DegLex, &[1, 0, 0], &[0, 5, 5]), Ordering::Less);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(krull_dim_of_basis(&[], 3), 3);
        assert_eq!(krull_dim_of_basis(&groebner(&[poly(&[(&[1, 0, 0], 1)])]), 3), 2);
        let all = groebner(&[poly(&[(&[1, 0, 0], 1)]), poly(&[(&[0, 1, 0], 1)])]);
        assert_eq!(krull_dim_of_basis(&all, 3), 1);
    }
}
