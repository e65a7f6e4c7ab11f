//! Seeded random samples for the verification suites.

use std::sync::Arc;

use rand::Rng;

use crate::dist::{DiracForm, Distribution, MultiIndex};
use crate::group::{GroupElement, GroupModel};
use crate::padic::{PadicScalar, Rational};

pub fn unit<R: Rng>(rng: &mut R, m: &GroupModel) -> PadicScalar {
    let md = m.modulus();
    loop {
        let u = rng.random_range(1..md);
        if u % m.prime() != 0 {
            return m.int(u as i128);
        }
    }
}

/// `p^v·u` with `0 ≤ v ≤ vmax` and a random unit `u`.
pub fn scalar<R: Rng>(rng: &mut R, m: &GroupModel, vmax: i32) -> PadicScalar {
    let v = rng.random_range(0..=vmax);
    unit(rng, m).shift(v)
}

pub fn element<R: Rng>(rng: &mut R, m: &Arc<GroupModel>) -> GroupElement {
    let coords = (0..m.dim()).map(|_| rng.random_range(0..m.modulus())).collect();
    GroupElement::new(m, coords).expect("coordinates in range")
}

/// Element with nonnegative integer coordinates of total size at most `size`.
pub fn small_element<R: Rng>(rng: &mut R, m: &Arc<GroupModel>, size: u32) -> GroupElement {
    let alpha = multi_index(rng, m.dim(), size);
    GroupElement::new(m, alpha.iter().map(|a| *a as u64).collect()).expect("small coordinates")
}

/// Random `α` with `|α| ≤ size`.
pub fn multi_index<R: Rng>(rng: &mut R, d: usize, size: u32) -> MultiIndex {
    let total = rng.random_range(0..=size);
    let mut alpha = vec![0u32; d];
    for _ in 0..total {
        alpha[rng.random_range(0..d)] += 1;
    }
    alpha
}

/// Terms `c_j b^{β_j}` with `|β_j| ≤ size`; the first coefficient is a unit when `unit_first`.
pub fn head_terms<R: Rng>(
    rng: &mut R,
    m: &GroupModel,
    size: u32,
    count: usize,
    vmax: i32,
    unit_first: bool,
) -> Vec<(MultiIndex, PadicScalar)> {
    (0..count)
        .map(|j| {
            let beta = multi_index(rng, m.dim(), size);
            let c = if j == 0 && unit_first { unit(rng, m) } else { scalar(rng, m, vmax) };
            (beta, c)
        })
        .collect()
}

/// `Σ c_j b^{β_j}` as an exact distribution at truncation `trunc`.
pub fn build_head(m: &Arc<GroupModel>, terms: &[(MultiIndex, PadicScalar)], trunc: Rational) -> Distribution {
    let mut acc = Distribution::zero(m, trunc).expect("nonnegative truncation");
    for (beta, c) in terms {
        let t = Distribution::monomial_scaled(m, beta.clone(), c.clone(), trunc).expect("index within truncation");
        acc = acc.add(&t).expect("same model");
    }
    acc
}

/// Random exact head: 1–3 terms of size at most 3, coefficient valuations at most 2.
pub fn head<R: Rng>(rng: &mut R, m: &Arc<GroupModel>, trunc: Rational) -> Distribution {
    let count = rng.random_range(1..=3);
    build_head(m, &head_terms(rng, m, 3, count, 2, false), trunc)
}

/// `Σ a_j δ_{g_j}` with 1–3 random points; `small` keeps the points exact-expandable.
pub fn dirac_combination<R: Rng>(rng: &mut R, m: &Arc<GroupModel>, trunc: Rational, small: Option<u32>) -> Distribution {
    let count = rng.random_range(1..=3);
    let points: DiracForm = (0..count)
        .map(|_| {
            let g = match small {
                Some(s) => small_element(rng, m, s),
                None => element(rng, m),
            };
            (g.coords().to_vec(), scalar(rng, m, 2))
        })
        .collect();
    Distribution::dirac_combination(m, points, trunc).expect("valid points")
}

/// A mixture: exact heads, Dirac combinations, and Dirac expansions stripped of their witness.
pub fn any<R: Rng>(rng: &mut R, m: &Arc<GroupModel>, trunc: Rational) -> Distribution {
    match rng.random_range(0..4) {
        0 => head(rng, m, trunc),
        1 => dirac_combination(rng, m, trunc, None),
        2 => dirac_combination(rng, m, trunc, Some(3)),
        _ => {
            let d = dirac_combination(rng, m, trunc, None);
            Distribution::from_parts(m, d.terms().clone(), trunc, d.tail().clone(), None).expect("same data")
        }
    }
}

/// Exact distributions only: heads or small Dirac combinations.
pub fn exact<R: Rng>(rng: &mut R, m: &Arc<GroupModel>, trunc: Rational) -> Distribution {
    if rng.random_bool(0.5) {
        head(rng, m, trunc)
    } else {
        dirac_combination(rng, m, trunc, Some(3))
    }
}
