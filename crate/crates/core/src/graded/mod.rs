//! The graded ring `F_p[ε0^{±1}][X_1, …, X_d]` and ideal computations in it.
//!
//! Ideals are handled in `F_p[ε0, X]`; inverting `ε0` is realized by
//! saturation.  The monomial order is degree-lexicographic with
//! `X_1 > … > X_d > ε0`.

pub mod groebner;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::padic::{mulmod, Rational};
use groebner::{MonomialOrder, Poly};

/// Name of the monomial order used for all ideal computations.
pub const ORDER_NAME: &str = "deglex(X1>...>Xd>e0)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("polynomials live in different graded rings")]
    AmbientMismatch,
    #[error("negative e0 exponent is not allowed in ideal input")]
    NegativeExponent,
    #[error("bad polynomial syntax at column {column}: {message}")]
    Syntax { column: usize, message: String },
}

/// The graded ring attached to `(p, d, ω, s)`: `X_i` sits in degree `s·ω_i`, `ε0` in degree 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambient {
    pub p: u64,
    pub omega: Vec<Rational>,
    pub s: Rational,
}

impl Ambient {
    pub fn new(p: u64, omega: Vec<Rational>, s: Rational) -> Self {
        Ambient { p, omega, s }
    }

    /// `ω ≡ 1` in `d` variables.
    pub fn uniform(p: u64, d: usize, s: Rational) -> Self {
        Ambient { p, omega: vec![Rational::from(1); d], s }
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn degree(&self, e: i32, alpha: &[u32]) -> Rational {
        let tau: Rational = alpha.iter().zip(&self.omega).map(|(a, w)| w * Rational::from(*a as i64)).sum();
        Rational::from(e as i64) + self.s * tau
    }
}

/// A Laurent polynomial in `ε0` with polynomial coefficients in `X_1..X_d` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly {
    ambient: Ambient,
    terms: BTreeMap<(i32, Vec<u32>), u64>,
}

impl GradedPoly {
    pub fn zero(ambient: &Ambient) -> Self {
        GradedPoly { ambient: ambient.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(ambient: &Ambient, coeff: u64, e: i32, alpha: Vec<u32>) -> Self {
        let mut g = Self::zero(ambient);
        g.add_term(coeff, e, alpha);
        g
    }

    /// The variable `X_i` (0-based).
    pub fn var(ambient: &Ambient, i: usize) -> Self {
        let mut a = vec![0; ambient.dim()];
        a[i] = 1;
        Self::monomial(ambient, 1, 0, a)
    }

    pub fn eps(ambient: &Ambient, e: i32) -> Self {
        Self::monomial(ambient, 1, e, vec![0; ambient.dim()])
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &[u32], u64)> {
        self.terms.iter().map(|((e, a), c)| (*e, a.as_slice(), *c))
    }

    pub(crate) fn add_term(&mut self, coeff: u64, e: i32, alpha: Vec<u32>) {
        let p = self.ambient.p;
        let key = (e, alpha);
        let c = (self.terms.get(&key).copied().unwrap_or(0) + coeff % p) % p;
        if c == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, c);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GradedError> {
        if self.ambient != other.ambient {
            return Err(GradedError::AmbientMismatch);
        }
        let mut out = self.clone();
        for ((e, a), c) in &other.terms {
            out.add_term(*c, *e, a.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GradedError> {
        if self.ambient != other.ambient {
            return Err(GradedError::AmbientMismatch);
        }
        let p = self.ambient.p;
        let mut out = Self::zero(&self.ambient);
        for ((e1, a1), c1) in &self.terms {
            for ((e2, a2), c2) in &other.terms {
                let a = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.add_term(mulmod(*c1, *c2, p), e1 + e2, a);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let p = self.ambient.p;
        GradedPoly {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.clone(), p - c)).collect(),
        }
    }

    /// Multiplies by `ε0^k`.
    pub fn shift_eps(&self, k: i32) -> Self {
        GradedPoly {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|((e, a), c)| ((e + k, a.clone()), *c)).collect(),
        }
    }

    /// Degrees of the terms, when they all agree.
    pub fn homogeneous_degree(&self) -> Option<Rational> {
        let mut degs = self.terms.keys().map(|(e, a)| self.ambient.degree(*e, a));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn min_eps_exponent(&self) -> Option<i32> {
        self.terms.keys().map(|(e, _)| *e).min()
    }

    /// Variables `(X_1, …, X_d, ε0)`; fails on negative `ε0` exponents.
    pub(crate) fn to_poly(&self, order: MonomialOrder) -> Result<Poly, GradedError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for ((e, a), c) in &self.terms {
            if *e < 0 {
                return Err(GradedError::NegativeExponent);
            }
            let mut m = a.clone();
            m.push(*e as u32);
            terms.push((m, *c));
        }
        Ok(Poly::from_terms(self.ambient.p, order, terms))
    }

    pub(crate) fn from_poly(ambient: &Ambient, f: &Poly) -> Self {
        let d = ambient.dim();
        let mut g = Self::zero(ambient);
        for (m, c) in &f.terms {
            g.add_term(*c, m[d] as i32, m[..d].to_vec());
        }
        g
    }

    /// Parses `c*e0^k*X1^a1*...` terms joined by `+`.
    pub fn parse(ambient: &Ambient, text: &str) -> Result<Self, GradedError> {
        let mut out = Self::zero(ambient);
        let text = text.trim();
        if text == "0" {
            return Ok(out);
        }
        let mut offset = 0;
        for raw in text.split('+') {
            let column = offset + 1 + (raw.len() - raw.trim_start().len());
            offset += raw.len() + 1;
            let term = raw.trim();
            let err = |message: &str| GradedError::Syntax { column, message: message.to_string() };
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let mut coeff: u64 = 1;
            let mut e: i32 = 0;
            let mut alpha = vec![0u32; ambient.dim()];
            for factor in term.split('*') {
                let factor = factor.trim();
                let (base, exp) = match factor.split_once('^') {
                    Some((b, x)) => (b.trim(), Some(x.trim())),
                    None => (factor, None),
                };
                if base == "e0" {
                    let k: i32 = exp.map_or(Ok(1), |x| x.parse()).map_err(|_| err("bad e0 exponent"))?;
                    e += k;
                } else if let Some(idx) = base.strip_prefix('X') {
                    let i: usize = idx.parse().map_err(|_| err("bad variable index"))?;
                    if i == 0 || i > ambient.dim() {
                        return Err(err("variable index out of range"));
                    }
                    let k: u32 = exp.map_or(Ok(1), |x| x.parse()).map_err(|_| err("bad X exponent"))?;
                    alpha[i - 1] += k;
                } else {
                    if exp.is_some() {
                        return Err(err("exponent on a coefficient"));
                    }
                    let c: i64 = base.parse().map_err(|_| err("bad coefficient"))?;
                    coeff = mulmod(coeff, c.rem_euclid(ambient.p as i64) as u64, ambient.p);
                }
            }
            out.add_term(coeff, e, alpha);
        }
        Ok(out)
    }

    /// Parser for ideal generators: rejects negative `ε0` exponents.
    pub fn parse_generator(ambient: &Ambient, text: &str) -> Result<Self, GradedError> {
        let g = Self::parse(ambient, text)?;
        if g.min_eps_exponent().is_some_and(|e| e < 0) {
            return Err(GradedError::NegativeExponent);
        }
        Ok(g)
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // largest degree first, ties by the ideal order
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|a, b| {
            let da = self.ambient.degree(a.0 .0, &a.0 .1);
            let db = self.ambient.degree(b.0 .0, &b.0 .1);
            db.cmp(&da).then_with(|| b.0 .1.cmp(&a.0 .1)).then_with(|| b.0 .0.cmp(&a.0 .0))
        });
        let rendered: Vec<String> = keys
            .into_iter()
            .map(|((e, a), c)| {
                let mut parts = vec![c.to_string()];
                if *e != 0 {
                    parts.push(format!("e0^{e}"));
                }
                for (i, k) in a.iter().enumerate() {
                    if *k > 0 {
                        parts.push(format!("X{}^{}", i + 1, k));
                    }
                }
                parts.join("*")
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// An ideal of `F_p[ε0, X_1..X_d]` given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedIdeal {
    ambient: Ambient,
    gens: Vec<GradedPoly>,
}

/// Grade of a cyclic module; `Infinite` for the zero module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Finite(g) => write!(f, "{g}"),
            Grade::Infinite => write!(f, "inf"),
        }
    }
}

impl GradedIdeal {
    pub fn new(ambient: &Ambient, gens: Vec<GradedPoly>) -> Result<Self, GradedError> {
        for g in &gens {
            if g.ambient != *ambient {
                return Err(GradedError::AmbientMismatch);
            }
            if g.min_eps_exponent().is_some_and(|e| e < 0) {
                return Err(GradedError::NegativeExponent);
            }
        }
        Ok(GradedIdeal { ambient: ambient.clone(), gens })
    }

    pub fn generators(&self) -> &[GradedPoly] {
        &self.gens
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    fn polys(&self, order: MonomialOrder) -> Vec<Poly> {
        self.gens.iter().map(|g| g.to_poly(order).expect("checked at construction")).collect()
    }

    /// Reduced Gröbner basis as a new ideal.
    pub fn groebner(&self) -> GradedIdeal {
        let basis = groebner::groebner(&self.polys(MonomialOrder::DegLex));
        GradedIdeal {
            ambient: self.ambient.clone(),
            gens: basis.iter().map(|f| GradedPoly::from_poly(&self.ambient, f)).collect(),
        }
    }

    pub fn is_unit(&self) -> bool {
        groebner::groebner(&self.polys(MonomialOrder::DegLex)).iter().any(|g| g.is_constant())
    }

    /// Ideal membership by normal form.
    pub fn contains(&self, f: &GradedPoly) -> Result<bool, GradedError> {
        let basis = groebner::groebner(&self.polys(MonomialOrder::DegLex));
        Ok(groebner::normal_form(&f.to_poly(MonomialOrder::DegLex)?, &basis).is_zero())
    }

    /// Normal form modulo the ideal.
    pub fn reduce(&self, f: &GradedPoly) -> Result<GradedPoly, GradedError> {
        let basis = groebner::groebner(&self.polys(MonomialOrder::DegLex));
        let nf = groebner::normal_form(&f.to_poly(MonomialOrder::DegLex)?, &basis);
        Ok(GradedPoly::from_poly(&self.ambient, &nf))
    }

    /// `I : ε0^∞`, as a reduced Gröbner basis.
    pub fn saturate(&self) -> GradedIdeal {
        // I : ε0^∞ = (I + ⟨1 − t·ε0⟩) ∩ F_p[X, ε0], with t eliminated first
        let d = self.ambient.dim();
        let p = self.ambient.p;
        let mut gens: Vec<Poly> = self
            .polys(MonomialOrder::DegLex)
            .into_iter()
            .map(|f| {
                let terms = f.terms.into_iter().map(|(m, c)| {
                    let mut mm = vec![0];
                    mm.extend(m);
                    (mm, c)
                });
                Poly::from_terms(p, MonomialOrder::EliminateFirst, terms)
            })
            .collect();
        let mut te = vec![0u32; d + 2];
        te[0] = 1;
        te[d + 1] = 1;
        gens.push(Poly::from_terms(p, MonomialOrder::EliminateFirst, [(vec![0u32; d + 2], 1), (te, p - 1)]));
        let basis = groebner::groebner(&gens);
        let kept: Vec<Poly> = basis
            .into_iter()
            .filter(|f| f.terms.iter().all(|(m, _)| m[0] == 0))
            .map(|f| Poly::from_terms(p, MonomialOrder::DegLex, f.terms.into_iter().map(|(m, c)| (m[1..].to_vec(), c))))
            .collect();
        let reduced = groebner::groebner(&kept);
        GradedIdeal {
            ambient: self.ambient.clone(),
            gens: reduced.iter().map(|f| GradedPoly::from_poly(&self.ambient, f)).collect(),
        }
    }

    /// Krull dimension of `F_p[ε0, X]/I`; `−1` for the unit ideal.
    pub fn krull_dim(&self) -> i64 {
        let basis = groebner::groebner(&self.polys(MonomialOrder::DegLex));
        groebner::krull_dim_of_basis(&basis, self.ambient.dim() + 1)
    }

    /// `(d+1) − Krull dim` of the quotient by the ε0-saturation.
    pub fn grade_cyclic(&self) -> Grade {
        let sat = self.saturate();
        match sat.krull_dim() {
            -1 => Grade::Infinite,
            k => Grade::Finite(self.ambient.dim() as i64 + 1 - k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 5;

    fn amb(d: usize) -> Ambient {
        Ambient::uniform(P, d, Rational::new(1, 2))
    }

    fn gp(d: usize, s: &str) -> GradedPoly {
        GradedPoly::parse(&amb(d), s).unwrap()
    }

    fn ideal(d: usize, gens: &[&str]) -> GradedIdeal {
        GradedIdeal::new(&amb(d), gens.iter().map(|g| gp(d, g)).collect()).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(gp(2, "X1").mul(&gp(2, "X2")).unwrap(), gp(2, "X1*X2"));
        let prod = gp(1, "X1 + e0").mul(&gp(1, "X1 + 4*e0")).unwrap();
        assert_eq!(prod, gp(1, "X1^2 + 4*e0^2"));
        let m = gp(2, "3*e0*X2");
        let mut acc = GradedPoly::zero(&amb(2));
        for _ in 0..P {
            acc = acc.add(&m).unwrap();
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn display_parse_roundtrip() {
        let g = gp(3, "2*e0^-1*X1^5 + X2*X3 + 4");
        let back = GradedPoly::parse(&amb(3), &g.to_string()).unwrap();
        assert_eq!(back, g);
        assert_eq!(GradedPoly::parse_generator(&amb(3), "e0^-1*X1"), Err(GradedError::NegativeExponent));
        assert!(matches!(GradedPoly::parse(&amb(2), "X3"), Err(GradedError::Syntax { .. })));
        assert!(matches!(GradedPoly::parse(&amb(2), "X1 + + X2"), Err(GradedError::Syntax { column: 6, .. })));
    }

    #[test]
    fn degrees() {
        let a = amb(2);
        assert_eq!(gp(2, "X1").homogeneous_degree(), Some(Rational::new(1, 2)));
        assert_eq!(gp(2, "e0").homogeneous_degree(), Some(Rational::from(1)));
        assert_eq!(gp(2, "e0 + X1^2").homogeneous_degree(), Some(Rational::from(1)));
        assert_eq!(gp(2, "e0 + X1").homogeneous_degree(), None);
        assert_eq!(a.degree(-1, &[5, 0]), Rational::new(3, 2));
    }

    #[test]
    fn groebner_examples() {
        assert_eq!(ideal(2, &["X1"]).groebner().generators(), &[gp(2, "X1")]);
        let gb = ideal(2, &["X1^2", "X1*X2 + 4*e0^2"]).groebner();
        assert!(gb.generators().contains(&gp(2, "e0^2*X1")));
        assert_eq!(gb.groebner(), gb);
        assert_eq!(ideal(2, &["1"]).groebner().generators(), &[gp(2, "1")]);
    }

    #[test]
    fn saturation_examples() {
        let sat = ideal(2, &["e0*X1"]).saturate();
        assert_eq!(sat.generators(), &[gp(2, "X1")]);
        // membership oracle: X1 ∉ ⟨e0·X1⟩ but e0·X1 ∈ it
        assert!(!ideal(2, &["e0*X1"]).contains(&gp(2, "X1")).unwrap());
        assert!(sat.contains(&gp(2, "X1")).unwrap());
        assert_eq!(ideal(2, &["X1"]).saturate().generators(), &[gp(2, "X1")]);
        assert!(ideal(2, &["e0^2"]).saturate().is_unit());
    }

    #[test]
    fn krull_and_grade_examples() {
        assert_eq!(ideal(2, &[]).krull_dim(), 3);
        assert_eq!(ideal(2, &["X1"]).krull_dim(), 2);
        assert_eq!(ideal(3, &["X1", "X2", "X3"]).krull_dim(), 1);
        assert_eq!(ideal(2, &["1"]).krull_dim(), -1);
        assert_eq!(ideal(2, &[]).grade_cyclic(), Grade::Finite(0));
        assert_eq!(ideal(2, &["X1"]).grade_cyclic(), Grade::Finite(1));
        assert_eq!(ideal(3, &["X1", "X2", "X3"]).grade_cyclic(), Grade::Finite(3));
        assert_eq!(ideal(3, &["X1^5", "X2^5", "X3^5"]).grade_cyclic(), Grade::Finite(3));
        assert_eq!(ideal(1, &["e0"]).grade_cyclic(), Grade::Infinite);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 5;

    fn amb(d: usize) -> Ambient {
        Ambient::uniform(P, d, Rational::new(1, 2))
    }

    fn small_poly(d: usize) -> impl Strategy<Value = GradedPoly> {
        proptest::collection::vec((1u64..P, 0i32..2, proptest::collection::vec(0u32..3, d)), 1..4).prop_map(move |ts| {
            let mut g = GradedPoly::zero(&amb(d));
            for (c, e, a) in ts {
                let total: u32 = a.iter().sum::<u32>() + e as u32;
                if total <= 4 {
                    g.add_term(c, e, a);
                }
            }
            g
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn cofactor_certificates_are_members(
            gens in proptest::collection::vec(small_poly(2), 1..3),
            cof in proptest::collection::vec(small_poly(2), 3),
        ) {
            let ideal = GradedIdeal::new(&amb(2), gens.clone()).unwrap();
            let mut f = GradedPoly::zero(&amb(2));
            for (g, h) in gens.iter().zip(&cof) {
                f = f.add(&g.mul(h).unwrap()).unwrap();
            }
            prop_assert!(ideal.contains(&f).unwrap());
            // a standard monomial added to a member gives a non-member
            let gb = ideal.groebner();
            let nf = ideal.reduce(&GradedPoly::monomial(&amb(2), 1, 1, vec![3, 3])).unwrap();
            if !nf.is_zero() && !ideal.is_unit() {
                let g = f.add(&nf).unwrap();
                prop_assert!(!ideal.contains(&g).unwrap());
            }
            prop_assert_eq!(gb.groebner(), gb);
        }

        #[test]
        fn krull_dim_monotone(chain in proptest::collection::vec(small_poly(2), 1..4)) {
            let mut prev = GradedIdeal::new(&amb(2), vec![]).unwrap().krull_dim();
            prop_assert_eq!(prev, 3);
            for k in 1..=chain.len() {
                let dim = GradedIdeal::new(&amb(2), chain[..k].to_vec()).unwrap().krull_dim();
                prop_assert!(dim <= prev);
                prev = dim;
            }
        }
    }
}
