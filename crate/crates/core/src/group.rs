//! Builtin uniform pro-p group models in chart coordinates.
//!
//! Every model fixes an ordered basis `(h_1, …, h_d)` and identifies the group
//! with `Z_p^d` through `ψ(x) = h_1^{x_1} ⋯ h_d^{x_d}`.  Coordinates are held
//! as residues modulo `p^N`.  A model may also be *rebased*: its chart then
//! uses a different ordered basis, given by elements of the canonical chart.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::padic::{
    self, inv_mod, mulmod, pow, signed_rep, vp, PadicError, PadicScalar, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("unknown group id `{0}`")]
    UnknownGroup(String),
    #[error("elements belong to different group models")]
    ModelMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("declared omega {declared} for basis element {index} but it has omega {actual}")]
    OmegaMismatch { index: usize, declared: Rational, actual: String },
    #[error("basis elements do not form an ordered basis (linear part singular mod p)")]
    NotABasis,
    #[error("chart inversion did not converge")]
    ChartInversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `Z_p^d`.
    Abelian,
    /// Unitriangular 3×3 matrices `1 + p·(strictly upper triangular)` over `Z_p`.
    Heisenberg,
    /// `Z_p ⋊ {±1}`; distributions live on the uniform subgroup `H = Z_p`.
    Semidirect,
}

/// A different ordered basis of a canonical model.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Frame {
    /// Canonical coordinates of the new basis elements.
    basis: Vec<Vec<u64>>,
    /// Inverse modulo `p^N` of the matrix whose columns are `basis`.
    linear_inverse: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupModel {
    kind: ModelKind,
    p: u64,
    d: usize,
    cap: u32,
    omega: Vec<Rational>,
    frame: Option<Frame>,
}

/// `ω` of an element: `∞` for the identity, exact, or only a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Omega {
    Infinite,
    Exact(Rational),
    AtLeast(Rational),
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Infinite => write!(f, "inf"),
            Omega::Exact(r) => write!(f, "{r}"),
            Omega::AtLeast(r) => write!(f, ">={r}"),
        }
    }
}

/// Outcome of the (HYP) check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypCertificate {
    pub holds: bool,
    /// `min_{i≠j}(ω(h_i)+ω(h_j)) − p/(p−1)`; `None` when `d = 1` (no pairs).
    pub slack: Option<Rational>,
}

impl GroupModel {
    pub fn abelian(d: usize, p: u64, cap: u32) -> Result<Self, GroupError> {
        Self::builtin(ModelKind::Abelian, d, p, cap)
    }

    pub fn heisenberg(p: u64, cap: u32) -> Result<Self, GroupError> {
        Self::builtin(ModelKind::Heisenberg, 3, p, cap)
    }

    pub fn semidirect(p: u64, cap: u32) -> Result<Self, GroupError> {
        Self::builtin(ModelKind::Semidirect, 1, p, cap)
    }

    fn builtin(kind: ModelKind, d: usize, p: u64, cap: u32) -> Result<Self, GroupError> {
        padic::check_context(p, cap)?;
        if d == 0 {
            return Err(GroupError::Dimension { expected: 1, got: 0 });
        }
        Ok(GroupModel { kind, p, d, cap, omega: vec![Rational::from(1); d], frame: None })
    }

    /// Parses `abelian:<d>:<p>`, `heisenberg:<p>` or `semidirect:<p>`.
    pub fn parse(id: &str, cap: u32) -> Result<Self, GroupError> {
        let parts: Vec<&str> = id.trim().split(':').collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| GroupError::UnknownGroup(id.to_string()));
        match parts.as_slice() {
            ["abelian", d, p] => Self::abelian(num(d)? as usize, num(p)?, cap),
            ["heisenberg", p] => Self::heisenberg(num(p)?, cap),
            ["semidirect", p] => Self::semidirect(num(p)?, cap),
            _ => Err(GroupError::UnknownGroup(id.to_string())),
        }
    }

    /// The group selection string of the underlying canonical model.
    pub fn id(&self) -> String {
        match self.kind {
            ModelKind::Abelian => format!("abelian:{}:{}", self.d, self.p),
            ModelKind::Heisenberg => format!("heisenberg:{}", self.p),
            ModelKind::Semidirect => format!("semidirect:{}", self.p),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn modulus(&self) -> u64 {
        pow(self.p, self.cap)
    }

    pub fn omega_values(&self) -> &[Rational] {
        &self.omega
    }

    pub fn is_rebased(&self) -> bool {
        self.frame.is_some()
    }

    /// Canonical coordinates of the chart's basis elements, if rebased.
    pub fn frame_basis(&self) -> Option<&[Vec<u64>]> {
        self.frame.as_ref().map(|f| f.basis.as_slice())
    }

    /// The same group with the canonical ordered basis.
    pub fn canonical(&self) -> GroupModel {
        GroupModel { frame: None, ..self.clone() }
    }

    pub fn zero_scalar(&self) -> PadicScalar {
        PadicScalar::zero(self.p, self.cap)
    }

    pub fn one_scalar(&self) -> PadicScalar {
        PadicScalar::one(self.p, self.cap)
    }

    pub fn int(&self, x: i128) -> PadicScalar {
        PadicScalar::from_int(self.p, self.cap, x)
    }

    /// Reduces a signed integer modulo `p^N`.
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus() as i128) as u64
    }

    pub fn hyp_check(&self) -> HypCertificate {
        let bound = Rational::new(self.p as i64, self.p as i64 - 1);
        let mut best: Option<Rational> = None;
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j {
                    let s = self.omega[i] + self.omega[j];
                    best = Some(best.map_or(s, |b: Rational| b.min(s)));
                }
            }
        }
        let slack = best.map(|b| b - bound);
        HypCertificate { holds: slack.is_none_or(|s| s > Rational::zero()), slack }
    }

    /// Checks the p-valuation range `ω(h_i) > 1/(p−1)`.
    pub fn omega_in_range(&self) -> bool {
        let lower = Rational::new(1, self.p as i64 - 1);
        self.omega.iter().all(|w| *w > lower)
    }

    // ---- raw coordinate arithmetic in the canonical chart ----

    fn canon_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        let add = |x: u64, y: u64| ((x as u128 + y as u128) % m as u128) as u64;
        match self.kind {
            ModelKind::Abelian | ModelKind::Semidirect => {
                a.iter().zip(b).map(|(x, y)| add(*x, *y)).collect()
            }
            ModelKind::Heisenberg => {
                // (x,y,z)(x',y',z') = (x+x', y+y', z+z' − p·x'·y)
                let corr = mulmod(mulmod(b[0], a[1], m), self.p % m, m);
                vec![add(a[0], b[0]), add(a[1], b[1]), add(add(a[2], b[2]), m - corr) % m]
            }
        }
    }

    fn canon_inv(&self, a: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        let neg = |x: u64| (m - x) % m;
        match self.kind {
            ModelKind::Abelian | ModelKind::Semidirect => a.iter().map(|x| neg(*x)).collect(),
            ModelKind::Heisenberg => {
                // (x,y,z)^{-1} = (−x, −y, −z − p·x·y)
                let pxy = mulmod(mulmod(a[0], a[1], m), self.p % m, m);
                vec![neg(a[0]), neg(a[1]), neg(((a[2] as u128 + pxy as u128) % m as u128) as u64)]
            }
        }
    }

    /// `ψ(a)^y` for a p-adic exponent `y` given as a residue.
    fn canon_pow(&self, a: &[u64], y: u64) -> Vec<u64> {
        let m = self.modulus();
        match self.kind {
            ModelKind::Abelian | ModelKind::Semidirect => a.iter().map(|x| mulmod(*x, y, m)).collect(),
            ModelKind::Heisenberg => {
                // (ya, yb, yc − p·a·b·C(y,2))
                let half = inv_mod(2, m);
                let c2 = mulmod(mulmod(y, (y + m - 1) % m, m), half, m);
                let corr = mulmod(mulmod(mulmod(a[0], a[1], m), c2, m), self.p % m, m);
                vec![
                    mulmod(a[0], y, m),
                    mulmod(a[1], y, m),
                    (mulmod(a[2], y, m) + m - corr) % m,
                ]
            }
        }
    }

    /// Canonical coordinates of `Π h'_i^{y_i}` for a rebased model.
    fn frame_to_canon(&self, frame: &Frame, y: &[u64]) -> Vec<u64> {
        let mut acc = vec![0u64; self.d];
        for (h, yi) in frame.basis.iter().zip(y) {
            let term = self.canon_pow(h, *yi);
            acc = self.canon_mul(&acc, &term);
        }
        acc
    }

    /// Solves `Π h'_i^{y_i} = x` by p-adic successive approximation.
    fn canon_to_frame(&self, frame: &Frame, x: &[u64]) -> Result<Vec<u64>, GroupError> {
        let m = self.modulus();
        let d = self.d;
        let mut y = vec![0u64; d];
        for _ in 0..=self.cap + 1 {
            let fx = self.frame_to_canon(frame, &y);
            let diff: Vec<u64> = (0..d).map(|i| (x[i] + m - fx[i]) % m).collect();
            if diff.iter().all(|v| *v == 0) {
                return Ok(y);
            }
            for i in 0..d {
                let mut acc: u128 = 0;
                for j in 0..d {
                    acc += mulmod(frame.linear_inverse[i][j], diff[j], m) as u128;
                }
                y[i] = ((y[i] as u128 + acc) % m as u128) as u64;
            }
        }
        Err(GroupError::ChartInversion)
    }

    /// Canonical coordinates of an element given in this model's chart.
    pub(crate) fn to_canonical(&self, coords: &[u64]) -> Vec<u64> {
        match &self.frame {
            None => coords.to_vec(),
            Some(f) => self.frame_to_canon(f, coords),
        }
    }

    /// Chart coordinates of an element given canonically.
    pub(crate) fn from_canonical(&self, canon: &[u64]) -> Result<Vec<u64>, GroupError> {
        match &self.frame {
            None => Ok(canon.to_vec()),
            Some(f) => self.canon_to_frame(f, canon),
        }
    }

    pub(crate) fn mul_coords(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        match &self.frame {
            None => self.canon_mul(a, b),
            Some(f) => {
                let prod = self.canon_mul(&self.frame_to_canon(f, a), &self.frame_to_canon(f, b));
                self.canon_to_frame(f, &prod).expect("rebased chart is a bijection")
            }
        }
    }

    pub(crate) fn inv_coords(&self, a: &[u64]) -> Vec<u64> {
        match &self.frame {
            None => self.canon_inv(a),
            Some(f) => {
                let inv = self.canon_inv(&self.frame_to_canon(f, a));
                self.canon_to_frame(f, &inv).expect("rebased chart is a bijection")
            }
        }
    }

    /// The same group charted by the ordered basis `basis` with declared `ω` values.
    pub fn rebase(
        self: &Arc<Self>,
        basis: &[GroupElement],
        declared: &[Rational],
    ) -> Result<Arc<GroupModel>, GroupError> {
        if basis.len() != self.d || declared.len() != self.d {
            return Err(GroupError::Dimension { expected: self.d, got: basis.len() });
        }
        for (i, h) in basis.iter().enumerate() {
            if !Arc::ptr_eq(&h.model, self) && *h.model != **self {
                return Err(GroupError::ModelMismatch);
            }
            match h.omega() {
                Omega::Exact(w) if w == declared[i] => {}
                other => {
                    return Err(GroupError::OmegaMismatch {
                        index: i,
                        declared: declared[i],
                        actual: other.to_string(),
                    })
                }
            }
        }
        // Only the ω ≡ const situation of the builtin models is certified:
        // then the basis condition is invertibility of the linear part mod p.
        if declared.iter().any(|w| *w != declared[0]) || self.omega.iter().any(|w| *w != declared[0]) {
            return Err(GroupError::NotABasis);
        }
        let canon: Vec<Vec<u64>> = basis.iter().map(|h| self.to_canonical(&h.coords)).collect();
        let m = self.modulus();
        // column j of the matrix is canon[j]
        let mat: Vec<Vec<u64>> = (0..self.d).map(|i| (0..self.d).map(|j| canon[j][i]).collect()).collect();
        let linear_inverse = invert_matrix(&mat, self.p, m).ok_or(GroupError::NotABasis)?;
        let frame = Frame { basis: canon, linear_inverse };
        let model = GroupModel {
            omega: declared.to_vec(),
            frame: Some(frame),
            ..self.canonical()
        };
        Ok(Arc::new(model))
    }

    /// Rebuilds a rebased model from stored canonical basis coordinates.
    pub fn rebase_canonical(&self, basis: Vec<Vec<u64>>) -> Result<GroupModel, GroupError> {
        let canon = Arc::new(self.canonical());
        let elems = basis
            .into_iter()
            .map(|c| GroupElement::new(&canon, c))
            .collect::<Result<Vec<_>, _>>()?;
        let declared = self.omega.clone();
        canon.rebase(&elems, &declared).map(|a| (*a).clone())
    }
}

fn invert_matrix(mat: &[Vec<u64>], p: u64, m: u64) -> Option<Vec<Vec<u64>>> {
    let n = mat.len();
    let mut a: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|x| x % m).collect()).collect();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|r| !a[*r][col].is_multiple_of(p))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pinv = inv_mod(a[col][col], m);
        for j in 0..n {
            a[col][j] = mulmod(a[col][j], pinv, m);
            inv[col][j] = mulmod(inv[col][j], pinv, m);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = (a[r][j] + m - mulmod(f, a[col][j], m)) % m;
                    inv[r][j] = (inv[r][j] + m - mulmod(f, inv[col][j], m)) % m;
                }
            }
        }
    }
    Some(inv)
}

/// A group element: it is its chart coordinates modulo `p^N`.
#[derive(Debug, Clone)]
pub struct GroupElement {
    model: Arc<GroupModel>,
    coords: Vec<u64>,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && (Arc::ptr_eq(&self.model, &other.model) || self.model == other.model)
    }
}

impl Eq for GroupElement {}

impl GroupElement {
    pub fn new(model: &Arc<GroupModel>, coords: Vec<u64>) -> Result<Self, GroupError> {
        if coords.len() != model.d {
            return Err(GroupError::Dimension { expected: model.d, got: coords.len() });
        }
        let m = model.modulus();
        Ok(GroupElement { model: model.clone(), coords: coords.into_iter().map(|c| c % m).collect() })
    }

    /// Element with integer chart coordinates.
    pub fn from_ints(model: &Arc<GroupModel>, coords: &[i128]) -> Result<Self, GroupError> {
        Self::new(model, coords.iter().map(|c| model.reduce(*c)).collect())
    }

    pub fn identity(model: &Arc<GroupModel>) -> Self {
        GroupElement { model: model.clone(), coords: vec![0; model.d] }
    }

    /// The basis element `h_i` (0-based index).
    pub fn basis(model: &Arc<GroupModel>, i: usize) -> Self {
        let mut c = vec![0; model.d];
        c[i] = 1;
        GroupElement { model: model.clone(), coords: c }
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> PadicScalar {
        PadicScalar::from_int(self.model.p, self.model.cap, self.coords[i] as i128)
    }

    /// Coordinates as signed representatives in `(-p^N/2, p^N/2]`.
    pub fn signed_coords(&self) -> Vec<i128> {
        let m = self.model.modulus();
        self.coords.iter().map(|c| signed_rep(*c, m)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    fn same_model(&self, other: &Self) -> Result<(), GroupError> {
        if Arc::ptr_eq(&self.model, &other.model) || self.model == other.model {
            Ok(())
        } else {
            Err(GroupError::ModelMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_model(other)?;
        Ok(GroupElement { model: self.model.clone(), coords: self.model.mul_coords(&self.coords, &other.coords) })
    }

    pub fn inv(&self) -> Self {
        GroupElement { model: self.model.clone(), coords: self.model.inv_coords(&self.coords) }
    }

    /// `g^{-1} h^{-1} g h`.
    pub fn commutator(&self, other: &Self) -> Result<Self, GroupError> {
        self.inv().mul(&other.inv())?.mul(self)?.mul(other)
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, h: &Self) -> Result<Self, GroupError> {
        self.mul(h)?.mul(&self.inv())
    }

    /// `g^y` for an integer exponent.
    pub fn pow(&self, y: i128) -> Self {
        let m = &self.model;
        let canon = m.to_canonical(&self.coords);
        let powed = m.canonical().canon_pow(&canon, m.reduce(y));
        let coords = m.from_canonical(&powed).expect("rebased chart is a bijection");
        GroupElement { model: m.clone(), coords }
    }

    /// `ω(ψ(x)) = min_i (ω(h_i) + v_p(x_i))`.
    pub fn omega(&self) -> Omega {
        let m = &self.model;
        let mut nonzero: Option<Rational> = None;
        let mut unknown: Option<Rational> = None;
        for (i, c) in self.coords.iter().enumerate() {
            if *c == 0 {
                let b = m.omega[i] + Rational::from(m.cap as i64);
                unknown = Some(unknown.map_or(b, |u: Rational| u.min(b)));
            } else {
                let w = m.omega[i] + Rational::from(vp(m.p, *c) as i64);
                nonzero = Some(nonzero.map_or(w, |u: Rational| u.min(w)));
            }
        }
        match (nonzero, unknown) {
            (None, _) => Omega::Infinite,
            (Some(w), None) => Omega::Exact(w),
            (Some(w), Some(u)) if w <= u => Omega::Exact(w),
            (Some(_), Some(u)) => Omega::AtLeast(u),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.signed_coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `ψ(x,y,z) = I + p·x·E12 + p·y·E23 + (p·z + p²·x·y)·E13` modulo `modulus`.
pub fn heisenberg_matrix(p: u64, x: i128, y: i128, z: i128, modulus: i128) -> [[i128; 3]; 3] {
    let p = p as i128;
    let r = |v: i128| v.rem_euclid(modulus);
    [
        [1, r(p * x), r(p * z + r(r(p * p) * r(x * y)))],
        [0, 1, r(p * y)],
        [0, 0, 1],
    ]
}

/// Inverse of [`heisenberg_matrix`]: `x = M12/p, y = M23/p, z = M13/p − p·x·y`.
///
/// The matrix entries must be known modulo `p^(N+2)` to recover `N` digits.
pub fn heisenberg_unchart(p: u64, m: &[[i128; 3]; 3], modulus: i128) -> (i128, i128, i128) {
    let pi = p as i128;
    let x = m[0][1] / pi;
    let y = m[1][2] / pi;
    let z = (m[0][2] / pi - pi * ((x * y).rem_euclid(modulus))).rem_euclid(modulus);
    (x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u64 = 5;
    const N: u32 = 12;

    fn heis() -> Arc<GroupModel> {
        Arc::new(GroupModel::heisenberg(P, N).unwrap())
    }

    fn random_elem(m: &Arc<GroupModel>, rng: &mut ChaCha8Rng) -> GroupElement {
        let coords = (0..m.dim()).map(|_| rng.random_range(0..m.modulus())).collect();
        GroupElement::new(m, coords).unwrap()
    }

    fn matmul(a: &[[i128; 3]; 3], b: &[[i128; 3]; 3], modulus: i128) -> [[i128; 3]; 3] {
        let mut c = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0i128;
                for k in 0..3 {
                    acc = (acc + (a[i][k] % modulus) * (b[k][j] % modulus)).rem_euclid(modulus);
                }
                c[i][j] = acc;
            }
        }
        c
    }

    #[test]
    fn parse_group_ids() {
        assert_eq!(GroupModel::parse("abelian:2:5", N).unwrap().dim(), 2);
        assert_eq!(GroupModel::parse("heisenberg:7", N).unwrap().kind(), ModelKind::Heisenberg);
        assert!(GroupModel::parse("heisenberg:4", N).is_err());
        assert!(GroupModel::parse("free:3", N).is_err());
        assert_eq!(GroupModel::parse("semidirect:5", N).unwrap().id(), "semidirect:5");
    }

    #[test]
    fn abelian_law() {
        let m = Arc::new(GroupModel::abelian(1, P, N).unwrap());
        let a = GroupElement::from_ints(&m, &[3]).unwrap();
        let b = GroupElement::from_ints(&m, &[-7]).unwrap();
        assert_eq!(a.mul(&b).unwrap().signed_coords(), vec![-4]);
        assert_eq!(a.inv().signed_coords(), vec![-3]);
        assert!(a.commutator(&b).unwrap().is_identity());
    }

    #[test]
    fn heisenberg_basis_products() {
        let m = heis();
        let h1 = GroupElement::basis(&m, 0);
        let h2 = GroupElement::basis(&m, 1);
        assert_eq!(h1.mul(&h2).unwrap().signed_coords(), vec![1, 1, 0]);
        assert_eq!(h2.mul(&h1).unwrap().signed_coords(), vec![1, 1, -(P as i128)]);
        assert_eq!(h1.inv().signed_coords(), vec![-1, 0, 0]);
        assert_eq!(h1.commutator(&h2).unwrap().signed_coords(), vec![0, 0, P as i128]);
        let g = GroupElement::from_ints(&m, &[4, -2, 9]).unwrap();
        assert!(g.mul(&g.inv()).unwrap().is_identity());
    }

    #[test]
    fn omega_examples() {
        let m = heis();
        assert_eq!(GroupElement::identity(&m).omega(), Omega::Infinite);
        assert_eq!(GroupElement::basis(&m, 0).omega(), Omega::Exact(Rational::from(1)));
        let g = GroupElement::from_ints(&m, &[P as i128, 0, 1]).unwrap();
        assert_eq!(g.omega(), Omega::Exact(Rational::from(1)));
        let g = GroupElement::from_ints(&m, &[0, 0, 25]).unwrap();
        assert_eq!(g.omega(), Omega::Exact(Rational::from(3)));
    }

    #[test]
    fn hyp_certificates() {
        let m = GroupModel::heisenberg(5, N).unwrap();
        let c = m.hyp_check();
        assert!(c.holds);
        assert_eq!(c.slack, Some(Rational::new(3, 4)));
        let m = GroupModel::abelian(2, 3, N).unwrap();
        assert_eq!(m.hyp_check().slack, Some(Rational::new(1, 2)));
        let mut bad = GroupModel::abelian(2, 3, N).unwrap();
        bad.omega = vec![Rational::new(1, 2); 2];
        assert!(!bad.hyp_check().holds);
        assert!(GroupModel::semidirect(5, N).unwrap().hyp_check().holds);
    }

    #[test]
    fn heisenberg_law_matches_matrix_oracle() {
        let m = heis();
        let guard = pow(P, N + 2) as i128;
        let modn = m.modulus() as i128;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = random_elem(&m, &mut rng);
            let b = random_elem(&m, &mut rng);
            let (ac, bc) = (a.signed_coords(), b.signed_coords());
            let ma = heisenberg_matrix(P, ac[0], ac[1], ac[2], guard);
            let mb = heisenberg_matrix(P, bc[0], bc[1], bc[2], guard);
            let (x, y, z) = heisenberg_unchart(P, &matmul(&ma, &mb, guard), guard);
            let got = a.mul(&b).unwrap();
            assert_eq!(got.coords(), &[x.rem_euclid(modn) as u64, y.rem_euclid(modn) as u64, z.rem_euclid(modn) as u64]);
        }
    }

    #[test]
    fn chart_is_bijective() {
        let guard = pow(P, N + 2) as i128;
        let modn = pow(P, N) as i128;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (x, y, z) = (
                rng.random_range(0..modn),
                rng.random_range(0..modn),
                rng.random_range(0..modn),
            );
            let mat = heisenberg_matrix(P, x, y, z, guard);
            let (x2, y2, z2) = heisenberg_unchart(P, &mat, guard);
            assert_eq!((x2.rem_euclid(modn), y2.rem_euclid(modn), z2.rem_euclid(modn)), (x, y, z));
        }
    }

    #[test]
    fn associativity_all_models() {
        let models = [
            Arc::new(GroupModel::abelian(2, P, N).unwrap()),
            heis(),
            Arc::new(GroupModel::semidirect(P, N).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in &models {
            for _ in 0..500 {
                let (a, b, c) = (random_elem(m, &mut rng), random_elem(m, &mut rng), random_elem(m, &mut rng));
                assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn omega_axioms_on_samples() {
        let m = heis();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ge = |a: Omega, b: Rational| match a {
            Omega::Infinite => true,
            Omega::Exact(x) | Omega::AtLeast(x) => x >= b,
        };
        for _ in 0..200 {
            let g = random_elem(&m, &mut rng);
            let h = random_elem(&m, &mut rng);
            let (Omega::Exact(wg), Omega::Exact(wh)) = (g.omega(), h.omega()) else { continue };
            assert!(ge(g.commutator(&h).unwrap().omega(), wg + wh));
            assert!(ge(g.mul(&h.inv()).unwrap().omega(), wg.min(wh)));
            if let Omega::Exact(wp) = g.pow(P as i128).omega() {
                assert_eq!(wp, wg + Rational::from(1));
            }
        }
    }

    #[test]
    fn powers_match_repeated_products() {
        let m = heis();
        let g = GroupElement::from_ints(&m, &[2, 3, -1]).unwrap();
        let mut acc = GroupElement::identity(&m);
        for k in 0..12 {
            assert_eq!(g.pow(k), acc);
            acc = acc.mul(&g).unwrap();
        }
        assert_eq!(g.pow(-1), g.inv());
    }

    #[test]
    fn rebased_chart_roundtrip() {
        let m = heis();
        let b1 = GroupElement::basis(&m, 0).mul(&GroupElement::basis(&m, 1)).unwrap();
        let basis = vec![b1, GroupElement::basis(&m, 1), GroupElement::basis(&m, 2)];
        let rb = m.rebase(&basis, &[Rational::from(1); 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let g = random_elem(&m, &mut rng);
            let y = rb.from_canonical(g.coords()).unwrap();
            assert_eq!(rb.to_canonical(&y), g.coords());
        }
        let bad = vec![GroupElement::basis(&m, 0), GroupElement::basis(&m, 0), GroupElement::basis(&m, 2)];
        assert_eq!(m.rebase(&bad, &[Rational::from(1); 3]), Err(GroupError::NotABasis));
    }
}
