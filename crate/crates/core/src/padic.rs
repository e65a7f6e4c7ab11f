//! Fixed absolute precision p-adic scalars and exact norm values in `p^Q`.
//!
//! A [`PadicScalar`] is an element of `Q_p` known modulo `p^k` for some
//! absolute precision `k`.  Every scalar also carries the working cap `N`
//! of its context: integral values are never known beyond `p^N`, and a
//! value with denominator `p^m` is known at most modulo `p^(N - m)`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

pub type Rational = Rational64;

/// Largest admissible `p^N`; products of two residues must fit in `u128`.
const MODULUS_LIMIT: u128 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("precision {cap} out of range for p = {p} (need 1 <= N and p^N <= 2^62)")]
    PrecisionRange { p: u64, cap: u32 },
    #[error("scalars over different primes ({0} vs {1})")]
    MixedPrimes(u64, u64),
    #[error("scalars with different precision caps ({0} vs {1})")]
    PrecisionMismatch(u32, u32),
    #[error("operation requires an integral scalar")]
    NotIntegral,
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut f = 3;
    while f * f <= p {
        if p.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Checks that `(p, N)` is a usable working context.
pub fn check_context(p: u64, cap: u32) -> Result<(), PadicError> {
    if !is_odd_prime(p) {
        return Err(PadicError::InvalidPrime(p));
    }
    if cap == 0 || checked_pow(p, cap).is_none_or(|m| m as u128 > MODULUS_LIMIT) {
        return Err(PadicError::PrecisionRange { p, cap });
    }
    Ok(())
}

fn checked_pow(p: u64, k: u32) -> Option<u64> {
    p.checked_pow(k)
}

pub(crate) fn pow(p: u64, k: u32) -> u64 {
    p.pow(k)
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of a unit modulo `m`.
pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    debug_assert_eq!(g, 1, "{a} is not invertible modulo {m}");
    x.rem_euclid(m as i128) as u64
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Splits a nonzero integer into `(v_p(x), x / p^v)`.
pub(crate) fn split_p(p: u64, mut x: i128) -> (u32, i128) {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p as i128 == 0 {
        x /= p as i128;
        v += 1;
    }
    (v, x)
}

pub fn vp(p: u64, k: u64) -> u32 {
    if k == 0 {
        return u32::MAX;
    }
    split_p(p, k as i128).0
}

/// `floor(log_p k)` for `k >= 1`.
pub(crate) fn log_floor(p: u64, k: u64) -> u32 {
    let mut l = 0;
    let mut q = p;
    while q <= k {
        l += 1;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    l
}

/// Signed representative of a residue modulo `m`, in `(-m/2, m/2]`.
pub(crate) fn signed_rep(x: u64, m: u64) -> i128 {
    if x > m / 2 {
        x as i128 - m as i128
    } else {
        x as i128
    }
}

/// A norm value: either zero or `p^(-e)` for an exact rational `e`.
///
/// Ordered as real numbers, so `Pow(2) < Pow(1) < Pow(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormValue {
    Zero,
    Pow(Rational),
}

impl NormValue {
    pub fn one() -> Self {
        NormValue::Pow(Rational::zero())
    }

    /// `p^(-e)`.
    pub fn from_exponent(e: Rational) -> Self {
        NormValue::Pow(e)
    }

    pub fn exponent(&self) -> Option<Rational> {
        match self {
            NormValue::Zero => None,
            NormValue::Pow(e) => Some(*e),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NormValue::Zero)
    }

    pub fn mul(self, other: NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Pow(a), NormValue::Pow(b)) => NormValue::Pow(a + b),
            _ => NormValue::Zero,
        }
    }

    /// Multiplies by `p^(-x)`.
    pub fn scale(self, x: Rational) -> NormValue {
        match self {
            NormValue::Zero => NormValue::Zero,
            NormValue::Pow(e) => NormValue::Pow(e + x),
        }
    }

    /// `self / other`; `other` must be nonzero.
    pub fn div(self, other: NormValue) -> NormValue {
        match (self, other) {
            (_, NormValue::Zero) => panic!("division by the zero norm"),
            (NormValue::Zero, _) => NormValue::Zero,
            (NormValue::Pow(a), NormValue::Pow(b)) => NormValue::Pow(a - b),
        }
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormValue::Zero, NormValue::Zero) => Ordering::Equal,
            (NormValue::Zero, _) => Ordering::Less,
            (_, NormValue::Zero) => Ordering::Greater,
            (NormValue::Pow(a), NormValue::Pow(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => write!(f, "0"),
            NormValue::Pow(e) => write!(f, "p^{}", -e),
        }
    }
}

/// Result of [`PadicScalar::abs_val`]: the exact norm, or only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormBound {
    pub value: NormValue,
    pub exact: bool,
}

impl NormBound {
    pub fn upper(&self) -> NormValue {
        self.value
    }
}

/// An element of `Q_p` at capped absolute precision.
///
/// Canonical form: either `p^v * u mod p^abs` with `v < abs` and `u` a unit
/// reduced modulo `p^(abs - v)`, or the certificate "value ≡ 0 mod p^abs".
/// The representation is unique, so derived equality is bit-exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    cap: u32,
    abs: i32,
    head: Option<(i32, u64)>,
}

impl PadicScalar {
    pub fn zero(p: u64, cap: u32) -> Self {
        PadicScalar { p, cap, abs: cap as i32, head: None }
    }

    pub fn one(p: u64, cap: u32) -> Self {
        Self::from_int(p, cap, 1)
    }

    pub fn from_int(p: u64, cap: u32, x: i128) -> Self {
        if x == 0 {
            return Self::zero(p, cap);
        }
        let (v, u) = split_p(p, x);
        let m = pow(p, cap.saturating_sub(v).max(1));
        Self::normalize(p, cap, v as i32, u.rem_euclid(m as i128) as u64, cap as i32)
    }

    /// `p^k` exactly; negative `k` lowers the precision window by `|k|`.
    pub fn p_power(p: u64, cap: u32, k: i32) -> Self {
        Self::normalize(p, cap, k, 1, cap as i32 + k.min(0))
    }

    /// `1/k` for a nonzero integer `k`, with the unit part inverted modulo `p^N`.
    pub fn inverse_of_int(p: u64, cap: u32, k: i128) -> Self {
        assert!(k != 0, "inverse of zero");
        let (v, u) = split_p(p, k);
        let m = pow(p, cap);
        let unit = inv_mod(u.rem_euclid(m as i128) as u64, m);
        Self::normalize(p, cap, -(v as i32), unit, cap as i32 - v as i32)
    }

    /// Builds `p^v * unit mod p^abs` from raw parts, normalizing.
    pub fn from_parts(p: u64, cap: u32, v: i32, unit: u64, abs: i32) -> Self {
        Self::normalize(p, cap, v, unit, abs)
    }

    /// The certificate "value ≡ 0 mod p^abs".
    pub fn zero_cert(p: u64, cap: u32, abs: i32) -> Self {
        PadicScalar { p, cap, abs: abs.min(cap as i32), head: None }
    }

    /// Normal form of `p^w * x + O(p^abs)` for a nonnegative integer `x`.
    pub(crate) fn normalize(p: u64, cap: u32, w: i32, x: u64, abs: i32) -> Self {
        let mut abs = abs.min(cap as i32);
        if x == 0 || w >= abs {
            return Self::zero_cert(p, cap, abs);
        }
        let (t, u) = split_p(p, x as i128);
        let v = w + t as i32;
        abs = abs.min(cap as i32 + v.min(0));
        if v >= abs {
            return Self::zero_cert(p, cap, abs);
        }
        let m = pow(p, (abs - v) as u32);
        PadicScalar { p, cap, abs, head: Some((v, (u as u64) % m)) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Absolute precision `k`: the value is known modulo `p^k`.
    pub fn abs_precision(&self) -> i32 {
        self.abs
    }

    /// Exact valuation, when determined.
    pub fn valuation(&self) -> Option<i32> {
        self.head.map(|(v, _)| v)
    }

    /// Lower bound for the valuation (exact when determined).
    pub fn valuation_lower_bound(&self) -> i32 {
        self.head.map_or(self.abs, |(v, _)| v)
    }

    /// Unit part `u` (reduced modulo `p^(abs - v)`), when the valuation is exact.
    pub fn unit(&self) -> Option<u64> {
        self.head.map(|(_, u)| u)
    }

    /// Denominator exponent `m >= 0` (value = `p^-m` times an integral part).
    pub fn denominator_exponent(&self) -> u32 {
        self.head.map_or(0, |(v, _)| (-v).max(0) as u32)
    }

    pub fn is_zero_cert(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation_lower_bound() >= 0
    }

    /// Unit part reduced to `F_p`; `None` unless the valuation is exact.
    pub fn residue_unit(&self) -> Option<u64> {
        self.head.map(|(_, u)| u % self.p)
    }

    pub fn abs_val(&self) -> NormBound {
        match self.head {
            Some((v, _)) => NormBound { value: NormValue::Pow(Rational::from(v as i64)), exact: true },
            None => NormBound { value: NormValue::Pow(Rational::from(self.abs as i64)), exact: false },
        }
    }

    fn check(&self, other: &Self) -> Result<(), PadicError> {
        if self.p != other.p {
            return Err(PadicError::MixedPrimes(self.p, other.p));
        }
        if self.cap != other.cap {
            return Err(PadicError::PrecisionMismatch(self.cap, other.cap));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        let abs = self.abs.min(other.abs);
        let w = match (self.head, other.head) {
            (None, None) => return Ok(Self::zero_cert(self.p, self.cap, abs)),
            (Some((a, _)), None) => a,
            (None, Some((b, _))) => b,
            (Some((a, _)), Some((b, _))) => a.min(b),
        };
        if w >= abs {
            return Ok(Self::zero_cert(self.p, self.cap, abs));
        }
        let m = pow(self.p, (abs - w) as u32);
        let lift = |s: &Self| -> u64 {
            match s.head {
                Some((v, u)) if v < abs => mulmod(u % m, pow(self.p, (v - w) as u32) % m, m),
                _ => 0,
            }
        };
        let x = (lift(self) as u128 + lift(other) as u128) % m as u128;
        Ok(Self::normalize(self.p, self.cap, w, x as u64, abs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        let (p, cap) = (self.p, self.cap);
        match (self.head, other.head) {
            (Some((va, ua)), Some((vb, ub))) => {
                let abs = (va + other.abs).min(vb + self.abs);
                let v = va + vb;
                if v >= abs {
                    return Ok(Self::zero_cert(p, cap, abs));
                }
                let rel = ((abs - v) as u32).min(cap);
                let m = pow(p, rel);
                Ok(Self::normalize(p, cap, v, mulmod(ua % m, ub % m, m), abs))
            }
            (Some((va, _)), None) => Ok(Self::zero_cert(p, cap, va + other.abs)),
            (None, Some((vb, _))) => Ok(Self::zero_cert(p, cap, vb + self.abs)),
            (None, None) => Ok(Self::zero_cert(p, cap, self.abs + other.abs)),
        }
    }

    pub fn neg(&self) -> Self {
        match self.head {
            None => self.clone(),
            Some((v, u)) => {
                let m = pow(self.p, (self.abs - v) as u32);
                PadicScalar { head: Some((v, m - u)), ..self.clone() }
            }
        }
    }

    /// Multiplies by `p^k` (division when `k < 0`).
    pub fn shift(&self, k: i32) -> Self {
        match self.head {
            None => Self::zero_cert(self.p, self.cap, self.abs + k),
            Some((v, u)) => Self::normalize(self.p, self.cap, v + k, u, self.abs + k),
        }
    }

    /// Forgets precision beyond `p^k`.
    pub fn with_abs_cap(&self, k: i32) -> Self {
        if k >= self.abs {
            return self.clone();
        }
        match self.head {
            None => Self::zero_cert(self.p, self.cap, k),
            Some((v, u)) => Self::normalize(self.p, self.cap, v, u, k),
        }
    }

    /// True when both values agree at the coarser of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.try_sub(other).map(|d| d.is_zero_cert()).unwrap_or(false)
    }

    /// Residue of an integral scalar as an integer in `[0, p^abs)`.
    pub fn residue(&self) -> Result<u64, PadicError> {
        if !self.is_integral() {
            return Err(PadicError::NotIntegral);
        }
        if self.abs <= 0 {
            return Ok(0);
        }
        let m = pow(self.p, self.abs as u32);
        Ok(match self.head {
            None => 0,
            Some((v, u)) => mulmod(u, pow(self.p, v as u32), m),
        })
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.head {
            Some((v, u)) => write!(f, "{v}:{u}:{}", self.abs),
            None => write!(f, "{}:0:{}", self.abs, self.abs),
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr for &PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: &PadicScalar) -> PadicScalar {
                self.$inner(rhs).expect("incompatible p-adic scalars")
            }
        }
        impl std::ops::$tr for PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: PadicScalar) -> PadicScalar {
                self.$inner(&rhs).expect("incompatible p-adic scalars")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl std::ops::Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

/// Exact data of the integer binomial coefficients `C(x, k)`, `k = 0..=kmax`,
/// for an integer `x`: each entry is `None` for an exact zero, otherwise the
/// valuation and the unit part modulo `p^N`.
pub(crate) fn binomial_row(p: u64, cap: u32, x: i128, kmax: u32) -> Vec<Option<(u32, u64)>> {
    let m = pow(p, cap);
    let mut row = Vec::with_capacity(kmax as usize + 1);
    let mut v: i64 = 0;
    let mut unit: u64 = 1 % m;
    let mut zero = false;
    row.push(Some((0, unit)));
    for k in 1..=kmax as i128 {
        let factor = x - k + 1;
        if factor == 0 {
            zero = true;
        }
        if zero {
            row.push(None);
            continue;
        }
        let (a, fu) = split_p(p, factor);
        let (b, ku) = split_p(p, k);
        v += a as i64 - b as i64;
        let fu = fu.rem_euclid(m as i128) as u64;
        let ku = inv_mod(ku.rem_euclid(m as i128) as u64, m);
        unit = mulmod(mulmod(unit, fu, m), ku, m);
        debug_assert!(v >= 0);
        row.push(Some((v as u32, unit)));
    }
    row
}

/// Residue modulo `m` of an entry of [`binomial_row`].
pub(crate) fn binomial_residue(p: u64, entry: Option<(u32, u64)>, m: u64) -> u64 {
    match entry {
        None => 0,
        Some((v, u)) => {
            // v can exceed the exponent of m; then the residue is 0
            let mut r = u % m;
            for _ in 0..v {
                r = mulmod(r, p, m);
                if r == 0 {
                    break;
                }
            }
            r
        }
    }
}

/// `C(x, k)` for an integral scalar `x`.
///
/// The value of `C(x, k)` modulo `p^(k_x - floor(log_p k))` only depends on
/// `x` modulo `p^(k_x)`, so the result carries that absolute precision.
pub fn binom_padic(x: &PadicScalar, k: u32) -> Result<PadicScalar, PadicError> {
    if !x.is_integral() {
        return Err(PadicError::NotIntegral);
    }
    let (p, cap) = (x.p, x.cap);
    if k == 0 {
        return Ok(PadicScalar::one(p, cap));
    }
    let loss = log_floor(p, k as u64) as i32;
    let abs = x.abs.max(0);
    let xm = if abs == 0 { 1 } else { pow(p, abs as u32) };
    let rep = signed_rep(x.residue()?, xm);
    let row = binomial_row(p, cap, rep, k);
    Ok(match row[k as usize] {
        None => PadicScalar::zero_cert(p, cap, abs - loss),
        Some((v, u)) => PadicScalar::normalize(p, cap, v as i32, u, abs - loss),
    })
}

/// Integer binomial coefficient; panics on overflow (callers stay small).
pub(crate) fn int_binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Ceiling of a rational as `i64`.
pub(crate) fn ceil_i64(r: Rational) -> i64 {
    let (q, rem) = r.numer().div_rem(r.denom());
    if rem.is_positive() {
        q + 1
    } else {
        q
    }
}

/// Floor of a rational as `i64`.
pub(crate) fn floor_i64(r: Rational) -> i64 {
    r.numer().div_floor(r.denom())
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 5;
    const N: u32 = 12;

    fn scalar() -> impl Strategy<Value = PadicScalar> {
        (-2i32..4, 0u64..pow(P, N)).prop_map(|(v, u)| {
            let u = if u % P == 0 { u + 1 } else { u };
            PadicScalar::from_parts(P, N, v, u, N as i32 + v.min(0))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn abs_val_is_multiplicative(a in scalar(), b in scalar()) {
            let prod = &a * &b;
            prop_assume!(prod.valuation().is_some());
            prop_assert_eq!(prod.abs_val().value, a.abs_val().value.mul(b.abs_val().value));
        }

        #[test]
        fn ultrametric_inequality(a in scalar(), b in scalar()) {
            let sum = &a + &b;
            let (na, nb) = (a.abs_val().value, b.abs_val().value);
            prop_assert!(sum.abs_val().value <= na.max(nb));
            if na != nb && sum.valuation().is_some() {
                prop_assert_eq!(sum.abs_val().value, na.max(nb));
            }
        }

        #[test]
        fn pascal_relation(x in -100_000i128..100_000, k in 1u32..30) {
            let xs = PadicScalar::from_int(P, N, x);
            let xm = PadicScalar::from_int(P, N, x - 1);
            let lhs = binom_padic(&xs, k).unwrap();
            let rhs = &binom_padic(&xm, k).unwrap() + &binom_padic(&xm, k - 1).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn add_sub_roundtrip(a in scalar(), b in scalar()) {
            let back = &(&a + &b) - &b;
            prop_assert!(back.agrees_with(&a));
        }
    }
}
