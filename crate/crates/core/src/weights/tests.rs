use super::*;
use crate::base_rings::matrix::{mat_inverse, scalar, zeros};
use crate::corpus;
use proptest::prelude::*;
use rand::Rng as _;

fn q3() -> OkRing {
    OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap()
}

fn prof(r: &[u32]) -> WeightProfile {
    WeightProfile::new(r.to_vec()).unwrap()
}

fn triangular_witness(ok: &OkRing, r: &[u32], rng: &mut rand_chacha::ChaCha8Rng) -> Matrix<OkElem> {
    let n = r.len();
    let t = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            ok.mul_int(ok.alpha(), r[i] as u64)
        } else if j > i {
            ok.random(rng)
        } else {
            ok.zero()
        }
    });
    let s = corpus::random_gl(ok, n, rng);
    let s_inv = mat_inverse(ok, &s).unwrap();
    mat_mul(ok, &mat_mul(ok, &s, &t), &s_inv)
}

#[test]
fn profile_validation() {
    assert!(WeightProfile::new(vec![0, 2, 1]).is_err());
    assert!(WeightProfile::new(vec![]).is_err());
    assert_eq!(WeightProfile::parse("0, 1,3").unwrap().r, vec![0, 1, 3]);
    assert!(WeightProfile::parse("0,-1").is_err());
}

#[test]
fn weight_examples() {
    let ok = q3();
    let a = ok.alpha().clone();
    let r = [0, 1, 3];
    let b = Matrix::from_fn(3, 3, |i, j| if i == j { ok.mul_int(&a, r[i] as u64) } else { ok.zero() });
    let v = weight_nilpotency_check(&ok, &b, &prof(&r), &a, 6, 10).unwrap();
    assert!(matches!(v, NilpotencyVerdict::CertifiedNilpotent { n_star: 1, .. }));
    let v = weight_nilpotency_check(&ok, &zeros(&ok, 1, 1), &prof(&[1]), &a, 6, 10).unwrap();
    assert_eq!(v, NilpotencyVerdict::ResidueObstruction { witness_power: 1 });
    let mut rng = corpus::rng(4);
    let b = Matrix::from_fn(3, 3, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => ok.mul_int(&a, r[i] as u64),
        std::cmp::Ordering::Less => ok.random(&mut rng),
        _ => ok.zero(),
    });
    let v = weight_nilpotency_check(&ok, &b, &prof(&r), &a, 6, 10).unwrap();
    match v {
        NilpotencyVerdict::CertifiedNilpotent { n_star, .. } => assert!(n_star <= 3),
        v => panic!("{v:?}"),
    }
    assert!(matches!(
        weight_nilpotency_check(&ok, &zeros(&ok, 2, 2), &prof(&[1]), &a, 6, 10),
        Err(Error::ShapeMismatch(_))
    ));
    // X = [3] is topologically nilpotent but needs six powers to reach 3^6
    let v = weight_nilpotency_check(&ok, &scalar(&ok, 1, &ok.from_int(-3)), &prof(&[0]), &a, 6, 3).unwrap();
    assert_eq!(v, NilpotencyVerdict::Inconclusive { budget: 3 });
}

#[test]
fn poly_nilpotency_examples() {
    let ok = q3();
    let zero = Crystal::new(ok.clone(), zeros(&ok, 2, 2)).unwrap();
    assert!(poly_nilpotency_check(&zero).unwrap().is_certified());
    let f9 = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], 6)).unwrap();
    let bad = Crystal::new(f9.clone(), scalar(&f9, 1, &f9.x())).unwrap();
    assert!(bad.nilpotency() == NilpotencyVerdict::ResidueObstruction { witness_power: 1 });
    assert_eq!(poly_nilpotency_check(&bad).unwrap(), NilpotencyVerdict::ResidueObstruction { witness_power: 1 });
}

#[test]
fn poly_nilpotency_agrees_with_admissibility() {
    for c in corpus::crystal_corpus(6, 3, 4, 21).unwrap() {
        assert!(poly_nilpotency_check(&c).unwrap().is_certified());
    }
    // random matrices: residue verdicts agree with the admissibility test
    let mut rng = corpus::rng(8);
    for ok in corpus::standard_rings(6) {
        for _ in 0..10 {
            let n = rng.gen_range(1..=3);
            let a = Matrix::from_fn(n, n, |_, _| ok.random(&mut rng));
            let c = Crystal::new(ok.clone(), a).unwrap();
            let ours = poly_nilpotency_check(&c).unwrap();
            let theirs = c.nilpotency();
            assert_eq!(ours.is_certified(), !matches!(theirs, NilpotencyVerdict::ResidueObstruction { .. }));
        }
    }
}

#[test]
fn fl_examples() {
    let t = TruncPoly::new(3, 8);
    let n = Matrix::from_rows(vec![vec![t.zero(), t.one()], vec![t.zero(), t.zero()]]);
    let r = fl_check(3, &prof(&[0, 1]), &n, 8).unwrap();
    assert!(r.product.iter().flatten().all(|x| t.is_zero(x)));
    assert_eq!(r.nilpotency_index, 1);

    let t5 = TruncPoly::new(5, 6);
    let z = Matrix::from_fn(3, 3, |_, _| t5.zero());
    let r = fl_check(5, &prof(&[0, 2, 5]), &z, 6).unwrap();
    assert!(r.product.iter().flatten().all(|x| t5.is_zero(x)));

    let bad = Matrix::from_fn(2, 2, |i, j| if i == 1 && j == 0 { t.one() } else { t.zero() });
    assert!(matches!(fl_check(3, &prof(&[0, 1]), &bad, 8), Err(Error::StructureViolation(_))));
    assert!(matches!(fl_check(3, &prof(&[0, 4]), &n, 8), Err(Error::InvalidSpec(_))));
    assert!(matches!(fl_check(4, &prof(&[0, 1]), &n, 8), Err(Error::InvalidSpec(_))));
}

#[test]
fn qint_mod_p() {
    let t = TruncPoly::new(5, 12);
    // [5]_q = 5 + 10μ + 10μ² + 5μ³ + μ⁴ ≡ m1^20 ≡ 0 mod (5, m1^12)
    assert!(t.is_zero(&t.qint(5)));
    // [2]_q = 2 + μ ≡ 2 + m1^5
    assert_eq!(t.qint(2), t.from_coeffs(&[2, 0, 0, 0, 0, 1]));
    assert!(t.is_zero(&t.qint(0)));
}

#[test]
fn fl_p5_example() {
    let t = TruncPoly::new(5, 6);
    let mut rng = corpus::rng(55);
    let n = Matrix::from_fn(3, 3, |i, j| {
        if j > i {
            (0..6).map(|_| rng.gen_range(0..5u64)).collect()
        } else {
            t.zero()
        }
    });
    let r = fl_check(5, &prof(&[0, 2, 5]), &n, 6).unwrap();
    assert!(r.nilpotency_index <= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fl_product_strictly_upper(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7]), d in 1usize..=4, cap in 1usize..10) {
        let mut rng = corpus::rng(seed);
        let mut r: Vec<u32> = (0..d).map(|_| rng.gen_range(0..=p as u32)).collect();
        r.sort();
        let n = Matrix::from_fn(d, d, |i, j| {
            if j > i { (0..cap).map(|_| rng.gen_range(0..p)).collect() } else { vec![0; cap] }
        });
        let rep = fl_check(p, &prof(&r), &n, cap).unwrap();
        prop_assert!(rep.nilpotency_index <= d);
    }

    #[test]
    fn conjugated_triangular_witnesses(seed in any::<u64>(), ring in 0usize..5, d in 1usize..=3) {
        let ok = corpus::standard_rings(6)[ring].clone();
        let mut rng = corpus::rng(seed);
        let mut r: Vec<u32> = (0..d).map(|_| rng.gen_range(0..6)).collect();
        r.sort();
        let b = triangular_witness(&ok, &r, &mut rng);
        let v = weight_nilpotency_check(&ok, &b, &prof(&r), ok.alpha(), ok.horizon(), 4 * d).unwrap();
        prop_assert!(v.is_certified(), "{:?}", v);
    }
}
