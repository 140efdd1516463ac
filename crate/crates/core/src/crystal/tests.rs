use super::*;
use crate::base_rings::matrix::{scalar, zeros};
use crate::corpus;
use crate::pd_series::pd_invert_affine;
use proptest::prelude::*;

fn q3() -> OkRing {
    OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap()
}

fn c1(ok: &OkRing, a: i64) -> Crystal {
    Crystal::new(ok.clone(), scalar(ok, 1, &ok.from_int(a))).unwrap()
}

#[test]
fn nilpotency_examples() {
    let ok = q3();
    let one = ok.one();
    let v = check_nilpotent(&ok, &scalar(&ok, 1, &ok.zero()), &one, 6, 10);
    assert_eq!(v, NilpotencyVerdict::CertifiedNilpotent { n_star: 1, attained_valuation: 6 });

    let f9 = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], 6)).unwrap();
    let v = check_nilpotent(&f9, &scalar(&f9, 1, &f9.x()), &f9.one(), 6, 100);
    assert!(matches!(v, NilpotencyVerdict::ResidueObstruction { .. }));

    // v(Π_{i<n}(i+3)) counts i ≡ 0 mod 3 when every factor is exact
    let big = OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 30)).unwrap();
    let a = scalar(&big, 1, &big.from_int(3));
    for target in 1..=4u32 {
        let expect = (1..).find(|&n: &usize| {
            (0..n).map(|i| crate::base_rings::modint::vp(i as u64 + 3, 3)).sum::<u32>() >= target
        });
        match check_nilpotent(&big, &a, &big.one(), target, 200) {
            NilpotencyVerdict::CertifiedNilpotent { n_star, .. } => assert_eq!(Some(n_star), expect),
            v => panic!("{v:?}"),
        }
    }
}

#[test]
fn inconclusive_under_tiny_budget() {
    let ok = q3();
    let v = check_nilpotent(&ok, &scalar(&ok, 1, &ok.from_int(3)), &ok.one(), 6, 2);
    assert_eq!(v, NilpotencyVerdict::Inconclusive { budget: 2 });
}

#[test]
fn coefficient_examples() {
    let ok = q3();
    let a = strat_coeffs(&c1(&ok, 0), 3);
    assert_eq!(a[0], scalar(&ok, 1, &ok.one()));
    assert!(a[1..].iter().all(|m| *m == zeros(&ok, 1, 1)));
    let a = strat_coeffs(&c1(&ok, 1), 5);
    for (n, m) in a.iter().enumerate() {
        let fact: i64 = (1..=n as i64).product();
        assert_eq!(*m, scalar(&ok, 1, &ok.from_int(fact)));
    }
    let a = strat_coeffs(&c1(&ok, -1), 4);
    assert_eq!(a[1], scalar(&ok, 1, &ok.from_int(-1)));
    assert!(a[2..].iter().all(|m| *m == zeros(&ok, 1, 1)));
}

#[test]
fn stratification_examples() {
    let ok = q3();
    let mr = MatRing::new(ok.clone(), 1);
    let eps = build_stratification(&c1(&ok, 0), 6).unwrap();
    assert_eq!(eps, PdSeries::constant(&mr, 1, 6, identity(&ok, 1)));
    let eps = build_stratification(&c1(&ok, -1), 6).unwrap();
    assert_eq!(eps.len(), 2);
    let eps = build_stratification(&c1(&ok, 1), 6).unwrap();
    let inv = pd_invert_affine(&ok, &ok.one(), 1, 6, 0);
    for n in 0..=6 {
        assert_eq!(eps.coeff_or(&mr, &[n]).get(0, 0), &inv.coeff_or(&ok, &[n]));
    }
}

#[test]
fn cocycle_on_corpus() {
    for c in corpus::crystal_corpus(6, 3, 3, 11).unwrap() {
        let r = verify_cocycle(&c, 8).unwrap();
        assert_eq!(r.coefficient_identities, 9);
    }
    let ok = q3();
    verify_cocycle(&c1(&ok, 0), 8).unwrap();
}

#[test]
fn cocycle_detects_perturbation() {
    let ok = OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap();
    let mut r = corpus::rng(3);
    let c = corpus::random_admissible_crystal(&ok, 2, &mut r).unwrap();
    let mut coeffs = strat_coeffs(&c, 17);
    let delta = scalar(&ok, 2, &ok.one());
    perturb(&ok, &mut coeffs, 2, &delta);
    let err = verify_cocycle_coeffs(&ok, ok.alpha(), &coeffs, 8).unwrap_err();
    assert!(matches!(err, Error::CocycleViolation { .. }), "{err:?}");
}

#[test]
fn roundtrip_and_rejections() {
    let ok = q3();
    let mr = MatRing::new(ok.clone(), 1);
    let eps = PdSeries::constant(&mr, 1, 5, identity(&ok, 1));
    assert_eq!(pair_from_stratification(&ok, &eps).unwrap().matrix, zeros(&ok, 1, 1));
    let mut bad = build_stratification(&c1(&ok, 1), 5).unwrap();
    bad.add_term(&mr, Mono::from_slice(&[3]), identity(&ok, 1));
    assert_eq!(pair_from_stratification(&ok, &bad), Err(Error::NotAStratification { index: 3 }));

    let f9 = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], 6)).unwrap();
    let mr9 = MatRing::new(f9.clone(), 1);
    let mut eps = PdSeries::constant(&mr9, 1, 4, identity(&f9, 1));
    eps.add_term(&mr9, Mono::from_slice(&[1]), scalar(&f9, 1, &f9.x()));
    assert!(matches!(pair_from_stratification(&f9, &eps), Err(Error::NotAdmissible(_))));
}

#[test]
fn rational_crystals_refuse_lattice_operations() {
    let ok = q3();
    let c = Crystal::with_denominator(ok.clone(), scalar(&ok, 1, &ok.one()), 1).unwrap();
    assert!(matches!(build_stratification(&c, 4), Err(Error::NotAdmissible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roundtrip(seed in any::<u64>(), which in 0usize..6, rank in 1usize..=3) {
        let ok = if which == 5 {
            let mut s = corpus::spec(2, &[0, 1], &[-2, 1], 8);
            s.assume_linear_disjoint = Some(true);
            OkRing::new(s).unwrap()
        } else {
            corpus::standard_rings(5).swap_remove(which)
        };
        let mut r = corpus::rng(seed);
        let c = corpus::random_admissible_crystal(&ok, rank, &mut r).unwrap();
        let eps = build_stratification(&c, 8).unwrap();
        prop_assert_eq!(pair_from_stratification(&ok, &eps).unwrap(), c.clone());
        prop_assert_eq!(recursion_defect(&ok, &c.matrix, ok.alpha(), &strat_coeffs(&c, 8)), None);
    }

    #[test]
    fn nilpotency_monotone(seed in any::<u64>(), t in 1u32..=6) {
        let ok = corpus::standard_rings(6).swap_remove(4);
        let mut r = corpus::rng(seed);
        let a = corpus::random_admissible_matrix(&ok, 2, &mut r).unwrap();
        let alpha = ok.alpha();
        if let NilpotencyVerdict::CertifiedNilpotent { n_star, .. } = check_nilpotent(&ok, &a, alpha, t, 500) {
            for t2 in 0..=t {
                match check_nilpotent(&ok, &a, alpha, t2, 500) {
                    NilpotencyVerdict::CertifiedNilpotent { n_star: m, .. } => prop_assert!(m <= n_star),
                    v => prop_assert!(false, "{:?}", v),
                }
            }
        } else {
            prop_assert!(false, "admissible matrix not certified");
        }
    }
}
