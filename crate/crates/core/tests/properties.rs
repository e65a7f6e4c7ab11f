//! Randomized invariants of the distribution algebra, the pairing and the file formats.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padist::dist::{Conjugator, Distribution, RadiusParam};
use padist::format::{read_distribution, write_distribution};
use padist::group::{GroupElement, GroupModel};
use padist::mahler::{finite_level_project, mahler_coeffs, pair, FunctionSpec};
use padist::padic::{NormValue, PadicScalar, Rational};
use padist::verify::sample;

const P: u64 = 5;
const N: u32 = 12;

fn models() -> Vec<Arc<GroupModel>> {
    vec![
        Arc::new(GroupModel::abelian(2, P, N).unwrap()),
        Arc::new(GroupModel::heisenberg(P, N).unwrap()),
        Arc::new(GroupModel::semidirect(P, N).unwrap()),
    ]
}

fn radii() -> Vec<RadiusParam> {
    [(3, 4), (1, 2), (1, 4), (1, 1)].iter().map(|&(n, d)| RadiusParam::new(Rational::new(n, d)).unwrap()).collect()
}

fn t(x: i64) -> Rational {
    Rational::from(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), which in 0usize..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = sample::any(&mut rng, m, t(6));
        let text = write_distribution(&d);
        let back = read_distribution(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(write_distribution(&back), text);
    }

    #[test]
    fn dirac_embedding_is_multiplicative(seed in any::<u64>(), which in 0usize..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (sample::element(&mut rng, m), sample::element(&mut rng, m));
        let lhs = Distribution::dirac(&g, t(6)).unwrap().mul(&Distribution::dirac(&h, t(6)).unwrap()).unwrap();
        let rhs = Distribution::dirac(&g.mul(&h).unwrap(), t(6)).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn norms_are_submultiplicative(seed in any::<u64>(), which in 0usize..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (sample::any(&mut rng, m, t(6)), sample::any(&mut rng, m, t(6)));
        let xy = x.mul(&y).unwrap();
        for r in radii() {
            prop_assert!(xy.norm(&r).upper <= x.norm(&r).upper.mul(y.norm(&r).upper));
        }
    }

    #[test]
    fn norm_intervals_are_ordered(seed in any::<u64>(), which in 0usize..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::any(&mut rng, m, t(6));
        for r in radii() {
            let n = x.norm(&r);
            prop_assert!(n.lower <= n.upper);
            if x.is_exact() {
                prop_assert!(n.is_collapsed());
            }
        }
    }

    #[test]
    fn inner_conjugation_is_an_isometry(seed in any::<u64>(), which in 0usize..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::exact(&mut rng, m, t(6));
        let g = sample::element(&mut rng, m);
        let y = x.conjugate(&Conjugator::Inner(g.clone())).unwrap();
        for r in radii() {
            prop_assert_eq!(y.norm(&r), x.norm(&r));
        }
        // conjugating back by g^-1 restores λ
        prop_assert!(y.conjugate(&Conjugator::Inner(g.inv())).unwrap().agrees_with(&x));
    }

    #[test]
    fn basis_change_preserves_norms(seed in any::<u64>(), a in 1i128..5, b in 0i128..25, c in 1i128..5) {
        let m = Arc::new(GroupModel::abelian(2, P, N).unwrap());
        let basis = [GroupElement::from_ints(&m, &[a, b]).unwrap(), GroupElement::from_ints(&m, &[0, c]).unwrap()];
        let target = m.rebase(&basis, m.omega_values()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::exact(&mut rng, &m, t(6));
        let y = x.change_basis(&target).unwrap();
        let r = RadiusParam::new(Rational::new(1, 2)).unwrap();
        prop_assert_eq!(y.norm(&r), x.norm(&r));
        prop_assert!(y.change_basis(&m).unwrap().agrees_with(&x));
    }

    #[test]
    fn pairing_is_linear(seed in any::<u64>(), scale in -30i128..30, f in 0usize..3) {
        let m = Arc::new(GroupModel::heisenberg(P, N).unwrap());
        let spec = [FunctionSpec::PowerSeries1p(1), FunctionSpec::Monomial(vec![1, 1, 0]), FunctionSpec::Coordinate(2)][f].clone();
        let tab = mahler_coeffs(&spec, P, N, 3, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (sample::exact(&mut rng, &m, t(12)), sample::exact(&mut rng, &m, t(12)));
        let a = PadicScalar::from_int(P, N, scale);
        let lhs = pair(&x.scale(&a).unwrap().add(&y).unwrap(), &tab).unwrap();
        let (px, py) = (pair(&x, &tab).unwrap(), pair(&y, &tab).unwrap());
        let rhs = a.try_mul(&px.value).unwrap().try_add(&py.value).unwrap();
        // combined error: the larger of the two reported bounds
        let err = px.error.max(py.error).max(lhs.error);
        let diff = lhs.value.try_sub(&rhs).unwrap();
        let ok = match diff.valuation() {
            None => true,
            Some(v) => err >= NormValue::Pow(t(v as i64)),
        };
        prop_assert!(ok, "lhs {} rhs {} err {}", lhs.value, rhs, err);
    }

    #[test]
    fn projection_is_multiplicative(seed in any::<u64>(), which in 0usize..3, level in 1u32..3) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::dirac_combination(&mut rng, m, t(4), None);
        let y = sample::dirac_combination(&mut rng, m, t(4), None);
        let lhs = finite_level_project(&x.mul(&y).unwrap(), level).unwrap();
        let rhs = finite_level_project(&x, level).unwrap().mul(&finite_level_project(&y, level).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }
}
