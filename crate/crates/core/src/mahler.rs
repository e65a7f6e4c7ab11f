//! Mahler expansions of builtin functions on `Z_p^d`, the Amice decay report,
//! the pairing `⟨λ, f⟩`, and projection to finite group algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::dist::expand::{indices, MultiIndex};
use crate::dist::norm::log_tail_exponent;
use crate::dist::{DistError, Distribution};
use crate::group::GroupModel;
use crate::padic::{floor_i64, int_binomial, mulmod, pow, vp, NormValue, PadicError, PadicScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MahlerError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("function needs dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid level {0} (need 1 <= n <= N)")]
    Level(u32),
    #[error("unbounded tail: {0}")]
    UnboundedTail(String),
    #[error("distribution carries no Dirac witness")]
    NoWitness,
    #[error("bad function spec `{0}`")]
    Spec(String),
}

/// Builtin test functions on chart coordinates.  Axis indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    Constant(i128),
    Coordinate(usize),
    Monomial(Vec<u32>),
    /// `(1+p)^{x_i}`.
    PowerSeries1p(usize),
    /// Indicator of the coset `a + p^n Z_p^d`.
    Indicator { a: Vec<i128>, n: u32 },
}

/// Analytic bound on Mahler coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// `c_α = 0` for `|α| > deg`.
    FiniteSupport(u32),
    /// `|c_α| ≤ p^{-rate·|α|}`.
    Geometric(Rational),
}

impl FunctionSpec {
    pub fn decay(&self) -> Option<Decay> {
        match self {
            FunctionSpec::Constant(_) => Some(Decay::FiniteSupport(0)),
            FunctionSpec::Coordinate(_) => Some(Decay::FiniteSupport(1)),
            FunctionSpec::Monomial(a) => Some(Decay::FiniteSupport(a.iter().sum())),
            FunctionSpec::PowerSeries1p(_) => Some(Decay::Geometric(Rational::from(1))),
            FunctionSpec::Indicator { .. } => None,
        }
    }

    fn check_dim(&self, d: usize) -> Result<(), MahlerError> {
        let need = match self {
            FunctionSpec::Constant(_) => return Ok(()),
            FunctionSpec::Coordinate(i) | FunctionSpec::PowerSeries1p(i) => {
                if *i < d {
                    return Ok(());
                }
                i + 1
            }
            FunctionSpec::Monomial(a) => a.len(),
            FunctionSpec::Indicator { a, .. } => a.len(),
        };
        if need == d {
            Ok(())
        } else {
            Err(MahlerError::Dimension { expected: need, got: d })
        }
    }

    /// `f(x)` modulo `p^N` for integral chart coordinates `x` (residues mod `p^N`).
    pub fn eval(&self, p: u64, cap: u32, x: &[u64]) -> Result<PadicScalar, MahlerError> {
        self.check_dim(x.len())?;
        let m = pow(p, cap);
        let r = match self {
            FunctionSpec::Constant(c) => c.rem_euclid(m as i128) as u64,
            FunctionSpec::Coordinate(i) => x[*i] % m,
            FunctionSpec::Monomial(a) => {
                a.iter().zip(x).fold(1 % m, |acc, (k, xi)| mulmod(acc, powmod(xi % m, *k as u64, m), m))
            }
            FunctionSpec::PowerSeries1p(i) => powmod((1 + p) % m, x[*i] % m, m),
            FunctionSpec::Indicator { a, n } => {
                let mn = pow(p, (*n).min(cap)) as i128;
                let hit = a.iter().zip(x).all(|(ai, xi)| (*xi as i128 - ai).rem_euclid(mn) == 0);
                u64::from(hit)
            }
        };
        Ok(PadicScalar::from_int(p, cap, r as i128))
    }
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[String]| v.join(",");
        match self {
            FunctionSpec::Constant(c) => write!(f, "const:{c}"),
            FunctionSpec::Coordinate(i) => write!(f, "coord:{}", i + 1),
            FunctionSpec::Monomial(a) => write!(f, "mono:{}", list(&a.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
            FunctionSpec::PowerSeries1p(i) => write!(f, "exp1p:{}", i + 1),
            FunctionSpec::Indicator { a, n } => {
                write!(f, "ind:{}:{n}", list(&a.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = MahlerError;

    /// `const:<c>`, `coord:<i>`, `mono:<a1,..,ad>`, `exp1p:<i>`, `ind:<a1,..,ad>:<n>` (axes 1-based).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MahlerError::Spec(s.to_string());
        let axis = |t: &str| -> Result<usize, MahlerError> {
            match t.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(bad()),
            }
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["const", c] => c.parse().map(FunctionSpec::Constant).map_err(|_| bad()),
            ["coord", i] => Ok(FunctionSpec::Coordinate(axis(i)?)),
            ["exp1p", i] => Ok(FunctionSpec::PowerSeries1p(axis(i)?)),
            ["mono", a] => {
                let a = a.split(',').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
                Ok(FunctionSpec::Monomial(a))
            }
            ["ind", a, n] => {
                let a = a.split(',').map(|x| x.trim().parse::<i128>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
                let n = n.parse::<u32>().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(FunctionSpec::Indicator { a, n })
            }
            _ => Err(bad()),
        }
    }
}

/// Mahler coefficients `c_α` for `|α| ≤ A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahlerTable {
    pub p: u64,
    pub cap: u32,
    pub d: usize,
    pub a_cap: u32,
    pub entries: BTreeMap<MultiIndex, PadicScalar>,
    pub decay: Option<Decay>,
}

fn ones(d: usize) -> Vec<Rational> {
    vec![Rational::from(1); d]
}

/// `c_α = Σ_{β≤α} (−1)^{|α−β|} C(α,β) f(β)` for all `|α| ≤ A`, exactly modulo `p^N`.
pub fn mahler_coeffs(f: &FunctionSpec, p: u64, cap: u32, d: usize, a_cap: u32) -> Result<MahlerTable, MahlerError> {
    f.check_dim(d)?;
    let m = pow(p, cap);
    let alphas = indices(&ones(d), Rational::from(a_cap as i64));
    let mut values: BTreeMap<MultiIndex, u64> = BTreeMap::new();
    for beta in &alphas {
        let x: Vec<u64> = beta.iter().map(|b| *b as u64).collect();
        values.insert(beta.clone(), f.eval(p, cap, &x)?.residue()?);
    }
    let mut entries = BTreeMap::new();
    for alpha in &alphas {
        let mut acc: u128 = 0;
        let mut beta = vec![0u32; d];
        loop {
            let mut c: u64 = 1 % m;
            let mut flips = 0;
            for i in 0..d {
                c = mulmod(c, (int_binomial(alpha[i] as u64, beta[i] as u64) % m as u128) as u64, m);
                flips += alpha[i] - beta[i];
            }
            let term = mulmod(c, values[&beta], m) as u128;
            acc = if flips % 2 == 0 { (acc + term) % m as u128 } else { (acc + m as u128 - term) % m as u128 };
            let mut i = 0;
            while i < d && beta[i] == alpha[i] {
                beta[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
            beta[i] += 1;
        }
        entries.insert(alpha.clone(), PadicScalar::from_int(p, cap, acc as i128));
    }
    Ok(MahlerTable { p, cap, d, a_cap, entries, decay: f.decay() })
}

impl MahlerTable {
    /// `Σ_α c_α C(x, α)` over the stored table.
    pub fn evaluate(&self, x: &[u64]) -> Result<PadicScalar, MahlerError> {
        if x.len() != self.d {
            return Err(MahlerError::Dimension { expected: self.d, got: x.len() });
        }
        let mut acc = PadicScalar::zero(self.p, self.cap);
        for (alpha, c) in &self.entries {
            let mut b = PadicScalar::one(self.p, self.cap);
            for (xi, k) in x.iter().zip(alpha) {
                b = b.try_mul(&crate::padic::binom_padic(&PadicScalar::from_int(self.p, self.cap, *xi as i128), *k)?)?;
            }
            acc = acc.try_add(&b.try_mul(c)?)?;
        }
        Ok(acc)
    }

    /// Certified exponent `e` with `|c_α| ≤ p^{-e}` for coefficients beyond the table
    /// (`None`: exactly zero).  Integral functions have integral coefficients.
    fn beyond_bound(&self, size: u32) -> Option<Rational> {
        match self.decay {
            Some(Decay::FiniteSupport(deg)) if size > deg => None,
            Some(Decay::Geometric(rate)) => Some(rate * Rational::from(size as i64)),
            _ => Some(Rational::from(0)),
        }
    }
}

/// A pairing value and the bound on what the truncation omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub value: PadicScalar,
    /// `|⟨λ,f⟩ − value| ≤ max(error, p^{-abs(value)})`.
    pub error: NormValue,
}

impl Pairing {
    /// Exponent `k` such that the pairing is known modulo `p^k` (rounded down).
    pub fn known_to(&self) -> i64 {
        let a = self.value.abs_precision() as i64;
        match self.error {
            NormValue::Zero => a,
            NormValue::Pow(e) => a.min(floor_i64(e)),
        }
    }

    pub fn agrees_with(&self, x: &PadicScalar) -> bool {
        let Ok(diff) = self.value.try_sub(x) else {
            return false;
        };
        match diff.valuation() {
            None => true,
            Some(v) => match self.error {
                NormValue::Zero => false,
                NormValue::Pow(e) => Rational::from(v as i64) >= e,
            },
        }
    }
}

fn tail_exponent_at(lambda: &Distribution, alpha: &[u32]) -> Option<Rational> {
    let ta = lambda.tau(alpha);
    let tail = lambda.tail();
    let mut best = tail.terms.iter().map(|t| t.scale + (t.onset - ta).max(Rational::from(0))).min();
    if let Some(l) = &tail.log {
        let k = alpha[l.axis];
        let on_axis = k > 0 && alpha.iter().enumerate().all(|(i, a)| i == l.axis || *a == 0);
        if on_axis {
            let e = l.scale - Rational::from(vp(lambda.model().prime(), k as u64) as i64);
            best = Some(best.map_or(e, |b| b.min(e)));
        }
    }
    best
}

/// `⟨λ, f⟩ = Σ_α d_α c_α` with a certified bound on the omitted terms.
pub fn pair(lambda: &Distribution, t: &MahlerTable) -> Result<Pairing, MahlerError> {
    let model = lambda.model();
    if model.dim() != t.d {
        return Err(MahlerError::Dimension { expected: model.dim(), got: t.d });
    }
    if model.prime() != t.p {
        return Err(PadicError::MixedPrimes(model.prime(), t.p).into());
    }
    if model.cap() != t.cap {
        return Err(PadicError::PrecisionMismatch(model.cap(), t.cap).into());
    }
    let size = |a: &[u32]| a.iter().sum::<u32>();
    let mut value = PadicScalar::zero(t.p, t.cap);
    let mut err: Option<Rational> = None;
    let mut bump = |e: Rational| err = Some(err.map_or(e, |x: Rational| x.min(e)));

    for (alpha, d) in lambda.terms() {
        if t.beyond_bound(size(alpha)).is_none() {
            continue;
        }
        match t.entries.get(alpha) {
            Some(c) => value = value.try_add(&d.try_mul(c)?)?,
            None => {
                if let Some(b) = t.beyond_bound(size(alpha)) {
                    bump(Rational::from(d.valuation_lower_bound() as i64) + b);
                }
            }
        }
    }
    if !lambda.is_exact() {
        for (alpha, c) in &t.entries {
            if lambda.tau(alpha) > lambda.trunc() {
                if let Some(e) = tail_exponent_at(lambda, alpha) {
                    bump(e + Rational::from(c.valuation_lower_bound() as i64));
                }
            }
        }
        // indices outside both the table and the stored head
        let tail = lambda.tail();
        match t.decay {
            None => return Err(MahlerError::UnboundedTail("no decay certificate for an inexact distribution".into())),
            Some(Decay::FiniteSupport(deg)) => {
                if deg > t.a_cap {
                    for alpha in indices(&ones(t.d), Rational::from(deg as i64)) {
                        if size(&alpha) > t.a_cap && lambda.tau(&alpha) > lambda.trunc() {
                            if let Some(e) = tail_exponent_at(lambda, &alpha) {
                                bump(e);
                            }
                        }
                    }
                }
            }
            Some(Decay::Geometric(rate)) => {
                let wmax = model.omega_values().iter().copied().max().expect("nonempty");
                let least = Rational::from(t.a_cap as i64 + 1).max(lambda.t_plus() / wmax);
                for term in &tail.terms {
                    bump(term.scale + rate * least);
                }
                if let Some(l) = &tail.log {
                    let w = model.omega_values()[l.axis];
                    let kmax = (floor_i64(lambda.trunc() / w).max(0) as u64).max(t.a_cap as u64);
                    bump(log_tail_exponent(l, Rational::from(1), kmax, rate, t.p));
                }
            }
        }
    }
    let error = err.map_or(NormValue::Zero, NormValue::Pow);
    Ok(Pairing { value, error })
}

/// Sorting verdict for the tail half of an Amice sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmiceVerdict {
    Decaying,
    NotDecaying,
    Inconclusive,
}

impl fmt::Display for AmiceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AmiceVerdict::Decaying => "decaying",
            AmiceVerdict::NotDecaying => "not-decaying",
            AmiceVerdict::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

/// `max_{|α|=k} |c_α| ρ^k`, exact or only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmiceLevel {
    pub k: u32,
    pub value: NormValue,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmiceRow {
    /// `ρ = p^{sigma}`.
    pub sigma: Rational,
    pub levels: Vec<AmiceLevel>,
    pub verdict: AmiceVerdict,
}

pub fn amice_report(t: &MahlerTable, grid: &[Rational]) -> Vec<AmiceRow> {
    grid.iter()
        .map(|&sigma| {
            let levels: Vec<AmiceLevel> = (0..=t.a_cap).map(|k| amice_level(t, k, sigma)).collect();
            let half = &levels[(t.a_cap as usize).div_ceil(2)..];
            let non_increasing = half.windows(2).all(|w| w[1].value <= w[0].value);
            let first = half.first().map(|l| l.value).unwrap_or(NormValue::Zero);
            let last = half.last().map(|l| l.value).unwrap_or(NormValue::Zero);
            let verdict = if non_increasing && (last < first || last.is_zero()) {
                AmiceVerdict::Decaying
            } else if half.iter().all(|l| l.exact) {
                AmiceVerdict::NotDecaying
            } else {
                AmiceVerdict::Inconclusive
            };
            AmiceRow { sigma, levels, verdict }
        })
        .collect()
}

fn amice_level(t: &MahlerTable, k: u32, sigma: Rational) -> AmiceLevel {
    let shift = -sigma * Rational::from(k as i64);
    if let Some(Decay::FiniteSupport(deg)) = t.decay {
        if k > deg {
            return AmiceLevel { k, value: NormValue::Zero, exact: true };
        }
    }
    let cert = match t.decay {
        Some(Decay::Geometric(rate)) => Some(rate * Rational::from(k as i64)),
        _ => None,
    };
    let mut exact_max = NormValue::Zero;
    let mut bound_max = NormValue::Zero;
    for (alpha, c) in &t.entries {
        if alpha.iter().sum::<u32>() != k {
            continue;
        }
        match c.valuation() {
            Some(v) => exact_max = exact_max.max(NormValue::Pow(Rational::from(v as i64))),
            None => {
                let mut e = Rational::from(c.abs_precision() as i64);
                if let Some(r) = cert {
                    e = e.max(r);
                }
                bound_max = bound_max.max(NormValue::Pow(e));
            }
        }
    }
    let exact = bound_max <= exact_max && !(exact_max.is_zero() && !bound_max.is_zero());
    AmiceLevel { k, value: exact_max.max(bound_max).scale(shift), exact }
}

/// An element of the group algebra of `G / G_n`, keyed by chart coordinates mod `p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    model: Arc<GroupModel>,
    level: u32,
    terms: BTreeMap<Vec<u64>, PadicScalar>,
}

impl GroupAlgebraElement {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u64>, PadicScalar> {
        &self.terms
    }

    fn key(&self, x: &[u64]) -> Vec<u64> {
        let mn = pow(self.model.prime(), self.level);
        x.iter().map(|c| c % mn).collect()
    }

    /// Coefficient of the coset `[x]`.
    pub fn coeff(&self, x: &[u64]) -> PadicScalar {
        self.terms.get(&self.key(x)).cloned().unwrap_or_else(|| self.model.zero_scalar())
    }

    pub fn mul(&self, other: &GroupAlgebraElement) -> Result<GroupAlgebraElement, MahlerError> {
        if self.level != other.level || *self.model != *other.model {
            return Err(DistError::ModelMismatch.into());
        }
        let mut terms: BTreeMap<Vec<u64>, PadicScalar> = BTreeMap::new();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                let k = self.key(&self.model.mul_coords(g, h));
                let c = a.try_mul(b)?;
                let slot = terms.entry(k).or_insert_with(|| self.model.zero_scalar());
                *slot = slot.try_add(&c)?;
            }
        }
        Ok(GroupAlgebraElement { model: self.model.clone(), level: self.level, terms })
    }

    /// Equality treating absent cosets as zero.
    pub fn agrees_with(&self, other: &GroupAlgebraElement) -> bool {
        self.level == other.level
            && self.terms.keys().chain(other.terms.keys()).all(|k| self.coeff(k).agrees_with(&other.coeff(k)))
    }
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero_cert())
            .map(|(k, c)| {
                let k: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                format!("{c}*[{}]", k.join(","))
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Σ a_j [g_j mod G_n]` for the Dirac witness of `λ`.
pub fn finite_level_project(lambda: &Distribution, n: u32) -> Result<GroupAlgebraElement, MahlerError> {
    let model = lambda.model();
    if n == 0 || n > model.cap() {
        return Err(MahlerError::Level(n));
    }
    let form = lambda.dirac_form().ok_or(MahlerError::NoWitness)?;
    let mut out = GroupAlgebraElement { model: model.clone(), level: n, terms: BTreeMap::new() };
    for (x, a) in form {
        let k = out.key(&x);
        let slot = out.terms.entry(k).or_insert_with(|| model.zero_scalar());
        *slot = slot.try_add(&a)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossVerdict {
    Agree,
    Disagree,
    Inconclusive,
}

impl fmt::Display for CrossVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CrossVerdict::Agree => "agree",
            CrossVerdict::Disagree => "disagree",
            CrossVerdict::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crosscheck {
    pub verdict: CrossVerdict,
    pub pairing: Option<Pairing>,
    pub projected: PadicScalar,
}

/// Compares `⟨λ, 1_{a + p^n Z_p^d}⟩` through the Mahler table against the
/// coefficient of `[a]` in the level-`n` projection.
pub fn indicator_crosscheck(lambda: &Distribution, a: &[i128], n: u32, a_cap: u32) -> Result<Crosscheck, MahlerError> {
    let model = lambda.model();
    let f = FunctionSpec::Indicator { a: a.to_vec(), n };
    let table = mahler_coeffs(&f, model.prime(), model.cap(), model.dim(), a_cap)?;
    let proj = finite_level_project(lambda, n)?;
    let key: Vec<u64> = a.iter().map(|x| model.reduce(*x)).collect();
    let projected = proj.coeff(&key);
    let pairing = match pair(lambda, &table) {
        Ok(p) => p,
        Err(MahlerError::UnboundedTail(_)) => {
            return Ok(Crosscheck { verdict: CrossVerdict::Inconclusive, pairing: None, projected })
        }
        Err(e) => return Err(e),
    };
    let k = pairing.known_to().min(projected.abs_precision() as i64);
    let verdict = if k <= 0 {
        CrossVerdict::Inconclusive
    } else {
        let diff = pairing.value.try_sub(&projected)?;
        if (diff.valuation_lower_bound() as i64) >= k {
            CrossVerdict::Agree
        } else {
            CrossVerdict::Disagree
        }
    };
    Ok(Crosscheck { verdict, pairing: Some(pairing), projected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    const P: u64 = 5;
    const N: u32 = 12;

    fn t(x: i64) -> Rational {
        Rational::from(x)
    }

    #[test]
    fn constant_and_square() {
        let c = mahler_coeffs(&FunctionSpec::Constant(1), P, N, 1, 6).unwrap();
        assert_eq!(c.entries[&vec![0]], PadicScalar::one(P, N));
        assert!(c.entries.iter().filter(|(a, _)| a[0] > 0).all(|(_, v)| v.is_zero_cert()));
        let sq = mahler_coeffs(&FunctionSpec::Monomial(vec![2]), P, N, 1, 6).unwrap();
        let want = [0, 1, 2, 0, 0, 0, 0];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(sq.entries[&vec![k as u32]], PadicScalar::from_int(P, N, *w), "k = {k}");
        }
    }

    #[test]
    fn power_series_coefficients_are_powers_of_p() {
        let tab = mahler_coeffs(&FunctionSpec::PowerSeries1p(0), P, 25, 1, 24).unwrap();
        for k in 0..=24u32 {
            assert_eq!(tab.entries[&vec![k]], PadicScalar::p_power(P, 25, k as i32), "k = {k}");
        }
    }

    #[test]
    fn table_reproduces_values() {
        for f in ["mono:2,1", "coord:2", "exp1p:1", "const:-3"] {
            let f: FunctionSpec = f.parse().unwrap();
            let tab = mahler_coeffs(&f, P, N, 2, 6).unwrap();
            for x in [[0u64, 0], [1, 2], [3, 3], [2, 4]] {
                assert_eq!(tab.evaluate(&x).unwrap(), f.eval(P, N, &x).unwrap(), "{f} at {x:?}");
            }
        }
    }

    #[test]
    fn spec_syntax_round_trips() {
        for s in ["const:7", "coord:2", "mono:1,0,3", "exp1p:1", "ind:0,-1:2"] {
            assert_eq!(s.parse::<FunctionSpec>().unwrap().to_string(), s);
        }
        assert!("coord:0".parse::<FunctionSpec>().is_err());
        assert!("ind:1:0".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn amice_examples() {
        let tab = mahler_coeffs(&FunctionSpec::PowerSeries1p(0), P, 25, 1, 24).unwrap();
        let rows = amice_report(&tab, &[Rational::new(1, 2)]);
        assert_eq!(rows[0].levels[4].value, NormValue::Pow(t(2)));
        assert_eq!(rows[0].verdict, AmiceVerdict::Decaying);
        let rows = amice_report(&tab, &[Rational::new(3, 2)]);
        assert_eq!(rows[0].verdict, AmiceVerdict::NotDecaying);
        let c = mahler_coeffs(&FunctionSpec::Constant(4), P, N, 2, 10).unwrap();
        let rows = amice_report(&c, &[t(1)]);
        assert!(rows[0].levels[1..].iter().all(|l| l.value.is_zero() && l.exact));
    }

    #[test]
    fn pairing_examples() {
        let m = Arc::new(GroupModel::abelian(2, P, N).unwrap());
        let f = FunctionSpec::PowerSeries1p(0);
        let tab = mahler_coeffs(&f, P, N, 2, 12).unwrap();
        let g = GroupElement::from_ints(&m, &[123_456, -77]).unwrap();
        let pr = pair(&Distribution::dirac(&g, t(12)).unwrap(), &tab).unwrap();
        assert!(pr.agrees_with(&f.eval(P, N, g.coords()).unwrap()));
        assert!(pr.known_to() >= 10);
        let mono = Distribution::monomial(&m, vec![3, 0], t(12)).unwrap();
        let pr = pair(&mono, &tab).unwrap();
        assert_eq!(pr.value, PadicScalar::p_power(P, N, 3));
        assert_eq!(pr.error, NormValue::Zero);
        let one = pair(&Distribution::one(&m, t(12)).unwrap(), &tab).unwrap();
        assert_eq!(one.value, PadicScalar::one(P, N));
    }

    #[test]
    fn indicator_needs_exact_input() {
        let m = Arc::new(GroupModel::abelian(1, P, N).unwrap());
        let ind = mahler_coeffs(&FunctionSpec::Indicator { a: vec![0], n: 1 }, P, N, 1, 15).unwrap();
        let g = GroupElement::from_ints(&m, &[-3]).unwrap();
        let r = pair(&Distribution::dirac(&g, t(12)).unwrap(), &ind);
        assert!(matches!(r, Err(MahlerError::UnboundedTail(_))));
    }

    #[test]
    fn lie_generator_pairs_to_derivative() {
        let m = Arc::new(GroupModel::abelian(1, P, N).unwrap());
        let tab = mahler_coeffs(&FunctionSpec::Coordinate(0), P, N, 1, 12).unwrap();
        let pr = pair(&Distribution::lie_generator(&m, 0, t(12)).unwrap(), &tab).unwrap();
        assert_eq!(pr.value, PadicScalar::one(P, N));
        assert_eq!(pr.error, NormValue::Zero);
    }

    #[test]
    fn projections() {
        let m = Arc::new(GroupModel::abelian(1, P, N).unwrap());
        let b = Distribution::monomial(&m, vec![1], t(6)).unwrap();
        let pb = finite_level_project(&b, 1).unwrap();
        assert_eq!(pb.to_string(), "0:244140624:12*[0] + 0:1:12*[1]");
        let g = GroupElement::from_ints(&m, &[-8]).unwrap();
        let pg = finite_level_project(&Distribution::dirac(&g, t(6)).unwrap(), 1).unwrap();
        assert_eq!(pg.coeff(&[2]), m.one_scalar());
        let lie = Distribution::lie_generator(&m, 0, t(6)).unwrap();
        assert_eq!(finite_level_project(&lie, 1), Err(MahlerError::NoWitness));
    }

    #[test]
    fn heisenberg_projection_is_multiplicative() {
        let m = Arc::new(GroupModel::heisenberg(P, N).unwrap());
        let g = GroupElement::from_ints(&m, &[3, -2, 17]).unwrap();
        let h = GroupElement::from_ints(&m, &[-1, 4, 2]).unwrap();
        let a = Distribution::dirac(&g, t(4)).unwrap().sub(&Distribution::one(&m, t(4)).unwrap()).unwrap();
        let b = Distribution::dirac(&h, t(4)).unwrap();
        for n in [1, 2] {
            let lhs = finite_level_project(&a.mul(&b).unwrap(), n).unwrap();
            let rhs = finite_level_project(&a, n).unwrap().mul(&finite_level_project(&b, n).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs));
        }
    }

    #[test]
    fn crosscheck_examples() {
        let m = Arc::new(GroupModel::abelian(2, P, N).unwrap());
        let g = GroupElement::from_ints(&m, &[2, 1]).unwrap();
        let dg = Distribution::dirac(&g, t(12)).unwrap();
        let hit = indicator_crosscheck(&dg, &[7, 1], 1, 15).unwrap();
        assert_eq!(hit.verdict, CrossVerdict::Agree);
        assert_eq!(hit.projected, m.one_scalar());
        let miss = indicator_crosscheck(&dg, &[0, 0], 1, 15).unwrap();
        assert_eq!(miss.verdict, CrossVerdict::Agree);
        assert!(miss.projected.is_zero_cert());
        let l = Distribution::monomial(&m, vec![1, 0], t(12)).unwrap().sub(&Distribution::monomial(&m, vec![0, 1], t(12)).unwrap()).unwrap();
        for a in [[0, 1], [1, 0], [3, 4]] {
            assert_eq!(indicator_crosscheck(&l, &a, 1, 15).unwrap().verdict, CrossVerdict::Agree);
        }
    }
}
