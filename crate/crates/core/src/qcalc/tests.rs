use super::*;
use crate::corpus;
use proptest::prelude::*;

fn q3() -> OkRing {
    OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap()
}

fn w(q: &QRing, c: &[i64]) -> Vec<WElem> {
    c.iter().map(|&x| q.w.from_int(x)).collect()
}

/// Σ_k c_k μ^k in m1, via the binomial expansion of (1+m1)^p − 1.
fn in_mu(q: &QRing, c: &[i64], u_deg: usize) -> QElem {
    let mu = q.mu();
    let mut pw = q.one();
    let mut out = q.zero();
    for &k in c {
        out = q.add(&out, &q.mul_int(&pw, crate::base_rings::modint::reduce_i64(k, q.w.m)));
        pw = q.mul(&pw, &mu);
    }
    q.mul(&out, &q.u_pow(u_deg))
}

#[test]
fn qint_examples() {
    let q = QRing::new(&q3(), 4, 10);
    assert!(q.is_zero(&qint(&q, 0)));
    assert_eq!(qint(&q, 1), q.one());
    assert_eq!(qint(&q, 2), in_mu(&q, &[2, 1], 0));
    // μ = 3m1 + 3m1² + m1³
    assert_eq!(q.mu(), {
        let mut a = q.zero();
        for (j, c) in [(1, 3), (2, 3), (3, 1)] {
            q.set(&mut a, 0, j, q.w.from_int(c));
        }
        a
    });
    let bin = binomial_table(10, q.w.m);
    for n in 0..=10 {
        let c = qint_mu(&q, n, &bin);
        assert_eq!(c.first().copied().unwrap_or(0), n as u64);
    }
}

#[test]
fn dq_examples() {
    let q = QRing::new(&q3(), 6, 8);
    assert_eq!(d_q(&q, &w(&q, &[0, 1])), q.one());
    assert_eq!(d_q(&q, &w(&q, &[0, 0, 1])), in_mu(&q, &[2, 1], 1));
    assert!(q.is_zero(&d_q(&q, &w(&q, &[5]))));
}

#[test]
fn tau_examples() {
    let q = QRing::new(&q3(), 6, 8);
    for n in 0..=6 {
        let un = q.u_pow(n);
        let lhs = q.sub(&tau_action(&q, &un), &un);
        let rhs = q.mul(&q.mul(&q.mu(), &qint(&q, n)), &un);
        assert_eq!(lhs, rhs, "n = {n}");
    }
    let c = q.constant(q.w.from_int(7));
    assert_eq!(tau_action(&q, &c), c);
    assert_eq!(tau_action(&q, &q.m1()), q.m1());
}

#[test]
fn phi_examples() {
    let q = QRing::new(&q3(), 9, 9);
    assert_eq!(phi_action(&q, &q.u_pow(1)).unwrap(), q.u_pow(3));
    assert_eq!(phi_action(&q, &q.m1()).unwrap(), q.mu());
    assert!(matches!(phi_action(&q, &q.u_pow(4)), Err(Error::TruncationLoss(_))));
    // ∇φ(u) = ξu^{p−1}φ(∇u)
    verify_phi_nabla(&q, &w(&q, &[0, 1])).unwrap();
    let f9 = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], 6)).unwrap();
    let q9 = QRing::new(&f9, 9, 6);
    let x = q9.constant(q9.w.x());
    let phix = phi_action(&q9, &x).unwrap();
    assert_eq!(phix, q9.constant(q9.w.frobenius(&q9.w.x())));
    assert_ne!(phix, x);
}

#[test]
fn ring_is_commutative_with_unit() {
    let q = QRing::new(&q3(), 5, 5);
    let mut rng = corpus::rng(2);
    let (a, b, c) = (q.random(&mut rng), q.random(&mut rng), q.random(&mut rng));
    assert_eq!(q.mul(&a, &b), q.mul(&b, &a));
    assert_eq!(q.mul(&q.mul(&a, &b), &c), q.mul(&a, &q.mul(&b, &c)));
    assert_eq!(q.mul(&a, &q.one()), a);
    // ξ·m1 = μ
    assert_eq!(q.mul(&q.xi(), &q.m1()), q.mu());
}

#[test]
fn dq_power_examples() {
    let ok = q3();
    let q = QRing::new(&ok, 12, 10);
    for h in 1..=4 {
        let r = verify_dq_power_of_e(&q, &ok, h).unwrap();
        assert_eq!(r.h, h);
    }
    // h = 2, E = u − 3: d_q(E²) = (2+μ)u − 6
    let e2 = w(&q, &[9, -6, 1]);
    let expect = q.sub(&in_mu(&q, &[2, 1], 1), &q.constant(q.w.from_int(6)));
    assert_eq!(d_q(&q, &e2), expect);
    // E^{h−1} does not divide d_q(E^h) in the free ring: at u = 3 the value is 3μ
    let at3 = (0..=q.dm)
        .map(|j| (0..=q.du).fold(q.w.zero(), |acc, i| q.w.add(&acc, &q.w.scale_int(&q.get(&expect, i, j), 3u64.pow(i as u32)))))
        .collect::<Vec<_>>();
    assert_eq!(at3[1], q.w.from_int(9));
    assert!(verify_dq_power_of_e(&q, &ok, 0).is_err());
    assert!(matches!(verify_dq_power_of_e(&QRing::new(&ok, 3, 4), &ok, 4), Err(Error::TruncationLoss(_))));
}

#[test]
fn dq_power_ramified() {
    for (ok, hs) in [
        (OkRing::new(corpus::spec(3, &[0, 1], &[-3, 0, 1], 6)).unwrap(), 4),
        (OkRing::new(corpus::spec(3, &[0, 1], &[3, 6, 1], 6)).unwrap(), 3),
        (corpus::standard_rings(6)[4].clone(), 3),
    ] {
        let q = QRing::new(&ok, 12, 8);
        for h in 1..=hs {
            verify_dq_power_of_e(&q, &ok, h).unwrap();
        }
    }
}

#[test]
fn untwisted_leibniz_fails() {
    let q = QRing::new(&q3(), 6, 6);
    let (f, g) = (w(&q, &[0, 1]), w(&q, &[0, 1]));
    verify_leibniz(&q, &f, &g).unwrap();
    // the plain product rule would give 2u, but d_q(u²) = (2+μ)u
    let plain = q.mul_int(&q.u_pow(1), 2);
    assert_ne!(d_q(&q, &w(&q, &[0, 0, 1])), plain);
}

#[test]
fn verify_all_runs() {
    for ok in corpus::standard_rings(6) {
        let r = verify_all(&ok, 3, 12, 6, 3, &mut corpus::rng(9)).unwrap();
        assert_eq!(r.dq_powers.len(), 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn identities_on_random_series(seed in any::<u64>(), ring in 0usize..5) {
        let ok = corpus::standard_rings(6)[ring].clone();
        let q = QRing::new(&ok, 10, 6);
        let mut rng = corpus::rng(seed);
        let f = q.random_u_series(&mut rng, 10);
        let g = q.random_u_series(&mut rng, 6);
        prop_assert!(verify_tau_identity(&q, &f).is_ok());
        prop_assert!(verify_leibniz(&q, &f, &g).is_ok());
        prop_assert!(verify_nabla_routes(&q, &f).is_ok());
        prop_assert!(verify_dq_mod_xi(&q, &ok, &f).is_ok());
        let small = q.random_u_series(&mut rng, 10 / ok.p() as usize);
        prop_assert!(verify_phi_nabla(&q, &small).is_ok());
    }

    #[test]
    fn random_eisenstein_p3(a in 0i64..9, b in 1i64..9, h in 1usize..=3) {
        prop_assume!(b % 3 != 0);
        let ok = OkRing::new(corpus::spec(3, &[0, 1], &[3 * b, 3 * a, 1], 6)).unwrap();
        let q = QRing::new(&ok, 8, 6);
        prop_assert!(verify_dq_power_of_e(&q, &ok, h).is_ok());
    }
}
