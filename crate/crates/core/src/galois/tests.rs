use super::*;
use crate::base_rings::matrix::{scalar, zeros};
use crate::corpus;
use crate::pd_series::PdSeries;
use proptest::prelude::*;
use rand::Rng as _;

fn q3() -> OkRing {
    OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap()
}

fn ram3() -> OkRing {
    OkRing::new(corpus::spec(3, &[0, 1], &[-3, 0, 1], 6)).unwrap()
}

fn cs(ok: &OkRing, cap: usize, chi: Option<i64>) -> CycSpec {
    CycSpec::new(ok, cap, chi).unwrap()
}

fn random_lam(cs: &CycSpec, rng: &mut impl rand::Rng) -> LamElem {
    (0..=cs.cap())
        .map(|_| (0..cs.cyc().p - 1).map(|_| cs.ok().random(rng)).collect())
        .collect()
}

#[test]
fn zeta_degrees() {
    let degs: Vec<usize> = corpus::standard_rings(6).iter().map(|ok| zeta_degree(ok).unwrap()).collect();
    assert_eq!(degs, vec![2, 2, 2, 4, 4]);
    let split = OkRing::new(corpus::split_cyclotomic_spec(6)).unwrap();
    assert_eq!(zeta_degree(&split).unwrap(), 1);
    assert!(matches!(CycSpec::new(&split, 4, None), Err(Error::ZetaReducible(_))));
}

#[test]
fn p2_with_flag() {
    let ok = OkRing::new(crate::base_rings::RingSpec::unramified(2, 6)).unwrap();
    let c = CycSpec::new(&ok, 4, None).unwrap();
    assert_eq!(c.cyc().zeta_pow(1), c.cyc().neg(&c.cyc().one()));
}

#[test]
fn non_unit_chi_rejected() {
    assert!(matches!(CycSpec::new(&q3(), 4, Some(6)), Err(Error::InvalidSpec(_))));
}

#[test]
fn divided_zeta_powers() {
    let c = cs(&q3(), 4, None);
    let cyc = c.cyc();
    // (1−ζ)^2 = −3ζ when ζ^2 + ζ + 1 = 0
    assert_eq!(cyc.divided_one_minus_zeta(2, 0).unwrap(), cyc.mul_int(&cyc.neg(&cyc.zeta_pow(1)), 3));
    assert_eq!(cyc.mul_int(&cyc.divided_one_minus_zeta(2, 3).unwrap(), 2), cyc.neg(&cyc.zeta_pow(1)));
    assert!(matches!(cyc.divided_one_minus_zeta(1, 3), Err(Error::DivisionFailure(_))));
}

#[test]
fn group_elem_grammar() {
    let p = |s: &str| s.parse::<GroupElem>().unwrap();
    assert_eq!(p("1"), GroupElem::IDENTITY);
    assert_eq!(p("tau"), GroupElem::TAU);
    assert_eq!(p("tau^2*gamma"), GroupElem::new(2, 1));
    assert_eq!(p("gamma^-3"), GroupElem::new(0, -3));
    assert_eq!(p(" tau^-1 * gamma^2 "), GroupElem::new(-1, 2));
    for bad in ["gamma*tau", "tau*tau", "sigma", "tau^x", "", "tau*gamma*gamma"] {
        assert!(bad.parse::<GroupElem>().is_err(), "{bad}");
    }
    for g in [GroupElem::new(3, 0), GroupElem::new(0, 2), GroupElem::new(-1, 4), GroupElem::IDENTITY] {
        assert_eq!(p(&g.to_string()), g);
    }
}

#[test]
fn group_law() {
    let c = cs(&q3(), 4, None);
    let (t, g) = (GroupElem::TAU, GroupElem::GAMMA);
    // γτ = τ^χ γ
    assert_eq!(c.compose(&g, &t), GroupElem::new(4, 1));
    assert_eq!(c.compose(&t, &g), GroupElem::new(1, 1));
    let inv = GroupElem::new(0, -1);
    assert_eq!(c.compose(&c.compose(&inv, &t), &g), GroupElem::new(c.chi_of(&inv) as i64, 0));
}

#[test]
fn tau_on_lambda() {
    for ok in [q3(), ram3()] {
        let c = cs(&ok, 8, None);
        let lam = &c.lam;
        let cyc = c.cyc();
        let tl = c.act_on_lambda(&GroupElem::TAU);
        let one_minus = cyc.sub(&cyc.one(), &cyc.zeta_pow(1));
        let k = cyc.ok_scale(&ok.mul(&ok.pi(), ok.alpha()), &one_minus);
        let factor = lam.sub(&lam.one(), &lam.monomial(1, k));
        assert_eq!(lam.mul(&tl, &factor), lam.lambda());
        assert_eq!(c.act_on_lambda(&GroupElem::IDENTITY), lam.lambda());
    }
}

#[test]
fn gamma_fixes_base() {
    let ok = q3();
    let c = cs(&ok, 6, Some(2));
    let mut rng = corpus::rng(1);
    for _ in 0..10 {
        let x = c.lam.constant(c.cyc().from_ok(&ok.random(&mut rng)));
        assert_eq!(c.galois_act(&GroupElem::GAMMA, &x), x);
        assert_eq!(c.galois_act(&GroupElem::TAU, &x), x);
    }
    // with χ = 2, γ moves ζ to ζ^2
    let z = c.lam.constant(c.cyc().zeta_pow(1));
    assert_eq!(c.galois_act(&GroupElem::GAMMA, &z), c.lam.constant(c.cyc().zeta_pow(2)));
}

#[test]
fn action_is_a_group_action() {
    for (ok, chi) in [(q3(), None), (q3(), Some(2)), (ram3(), Some(2)), (corpus::standard_rings(6)[3].clone(), Some(2))] {
        let c = cs(&ok, 6, chi);
        let sample = standard_sample(&c);
        let mut rng = corpus::rng(7);
        let xs: Vec<LamElem> = (0..3).map(|_| random_lam(&c, &mut rng)).chain([c.lam.lambda()]).collect();
        for g in &sample {
            for h in &sample {
                let gh = c.compose(g, h);
                for x in &xs {
                    assert_eq!(c.galois_act(&gh, x), c.galois_act(g, &c.galois_act(h, x)), "{g} {h}");
                }
            }
        }
        for x in &xs {
            assert_eq!(&c.galois_act(&GroupElem::IDENTITY, x), x);
        }
    }
}

#[test]
fn cocycle_examples() {
    let ok = q3();
    let c = cs(&ok, 8, None);
    let zero = Crystal::new(ok.clone(), zeros(&ok, 2, 2)).unwrap();
    for g in standard_sample(&c) {
        assert_eq!(cocycle_u(&c, &zero, &g).unwrap(), identity_matrix(&c, 2));
    }
    for ok in [q3(), ram3()] {
        let c = cs(&ok, 8, None);
        let m = Crystal::new(ok.clone(), scalar(&ok, 1, &ok.neg(ok.alpha()))).unwrap();
        let cyc = c.cyc();
        let x = cyc.ok_scale(&ok.mul(&ok.pi(), ok.alpha()), &cyc.sub(&cyc.one(), &cyc.zeta_pow(1)));
        for a in 0..4 {
            let u = cocycle_u(&c, &m, &GroupElem::new(a, 0)).unwrap();
            let expect = c.lam.sub(&c.lam.one(), &c.lam.monomial(1, cyc.mul_int(&x, a as u64)));
            assert_eq!(u.get(0, 0), &expect);
        }
        assert_eq!(cocycle_u(&c, &m, &GroupElem::GAMMA).unwrap(), identity_matrix(&c, 1));
        verify_cocycle_identity(&c, &m, &[GroupElem::TAU]).unwrap();
    }
}

#[test]
fn cocycle_needs_admissible() {
    let f9 = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], 6)).unwrap();
    let c = cs(&f9, 4, None);
    let bad = Crystal::new(f9.clone(), scalar(&f9, 1, &f9.x())).unwrap();
    assert!(matches!(cocycle_u(&c, &bad, &GroupElem::TAU), Err(Error::NotAdmissible(_))));
}

#[test]
fn cocycle_identity_on_corpus() {
    let crystals = corpus::crystal_corpus(6, 3, 4, 11).unwrap();
    assert_eq!(crystals.len(), 20);
    for (k, m) in crystals.iter().enumerate() {
        let chi = if k % 2 == 0 { None } else { Some(2) };
        let c = cs(&m.ring, 8, chi);
        let sample = standard_sample(&c);
        let r = verify_cocycle_identity(&c, m, &sample).unwrap();
        assert_eq!(r.pairs, 36);
    }
}

#[test]
fn cocycle_violation_detected() {
    // a 1×1 "cocycle" built from the wrong α breaks the identity
    let ok = q3();
    let c = cs(&ok, 6, None);
    let m = Crystal::new(ok.clone(), scalar(&ok, 1, &ok.from_int(3))).unwrap();
    let u_t = cocycle_u(&c, &m, &GroupElem::TAU).unwrap();
    let u_2t = cocycle_u(&c, &m, &GroupElem::new(2, 0)).unwrap();
    let mr = MatRing::new(c.lam.clone(), 1);
    assert_eq!(u_2t, mr.mul(&u_t, &c.act_matrix(&GroupElem::TAU, &u_t)));
    let naive = mr.mul(&u_t, &u_t);
    assert_ne!(u_2t, naive);
}

#[test]
fn sen_examples() {
    let ok = q3();
    let zero = Crystal::new(ok.clone(), zeros(&ok, 2, 2)).unwrap();
    assert_eq!(sen_operator(&zero).unwrap(), (zeros(&ok, 2, 2), 0));
    for ok in [q3(), ram3(), corpus::standard_rings(6)[4].clone()] {
        let m = Crystal::new(ok.clone(), scalar(&ok, 1, &ok.neg(ok.alpha()))).unwrap();
        assert_eq!(sen_operator(&m).unwrap(), (scalar(&ok, 1, &ok.one()), 0));
    }
    let a = Matrix::from_rows(vec![vec![ok.from_int(3), ok.from_int(1)], vec![ok.zero(), ok.from_int(-2)]]);
    let m = Crystal::new(ok.clone(), a.clone()).unwrap();
    assert_eq!(sen_operator(&m).unwrap(), (a.map(|x| ok.neg(x)), 0));
    // α = 2π over u² − 3: Θ = −π/(2π) keeps no denominator, −1/(2π) keeps one
    let r = ram3();
    let m = Crystal::new(r.clone(), scalar(&r, 1, &r.pi())).unwrap();
    let half = r.invert(&r.from_int(2)).unwrap();
    assert_eq!(sen_operator(&m).unwrap(), (scalar(&r, 1, &r.neg(&half)), 0));
    let m = Crystal::new(r.clone(), scalar(&r, 1, &r.one())).unwrap();
    assert_eq!(sen_operator(&m).unwrap(), (scalar(&r, 1, &r.neg(&half)), 1));
}

#[test]
fn h0_examples() {
    let ok = q3();
    let c = cs(&ok, 8, None);
    let zero = Crystal::new(ok.clone(), zeros(&ok, 2, 2)).unwrap();
    let r = h0_equals_invariants(&c, &zero).unwrap();
    assert_eq!((r.kernel_dim, r.invariant_vectors, r.non_invariant_witnesses), (2, 2, 0));
    let d = Matrix::from_rows(vec![vec![ok.zero(), ok.zero()], vec![ok.zero(), ok.from_int(3)]]);
    let r = h0_equals_invariants(&c, &Crystal::new(ok.clone(), d).unwrap()).unwrap();
    assert_eq!((r.kernel_dim, r.invariant_vectors, r.non_invariant_witnesses), (1, 1, 1));
    let r = h0_equals_invariants(&c, &Crystal::new(ok.clone(), scalar(&ok, 1, &ok.from_int(3))).unwrap()).unwrap();
    assert_eq!((r.kernel_dim, r.invariant_vectors, r.non_invariant_witnesses), (0, 0, 1));
}

#[test]
fn h0_on_corpus() {
    for m in corpus::crystal_corpus(6, 3, 2, 5).unwrap() {
        let c = cs(&m.ring, 6, None);
        let r = h0_equals_invariants(&c, &m).unwrap();
        assert_eq!(r.invariant_vectors, r.kernel_dim);
    }
}

#[test]
fn etale_examples() {
    let ok = q3();
    let r = etale_comparison_dims(&Crystal::new(ok.clone(), zeros(&ok, 2, 2)).unwrap()).unwrap();
    assert_eq!((r.phi_dims, r.sen_dims, r.agree), ((2, 2), (2, 2), true));
    let r = etale_comparison_dims(&Crystal::new(ok.clone(), scalar(&ok, 1, &ok.from_int(3))).unwrap()).unwrap();
    assert_eq!((r.phi_dims, r.agree), ((0, 0), true));
    let d = Matrix::from_rows(vec![vec![ok.zero(), ok.zero()], vec![ok.zero(), ok.from_int(3)]]);
    let r = etale_comparison_dims(&Crystal::new(ok.clone(), d).unwrap()).unwrap();
    assert_eq!((r.phi_dims, r.agree), ((1, 1), true));
    let rat = Crystal::with_denominator(ok.clone(), d_rat(&ok), 2).unwrap();
    assert!(etale_comparison_dims(&rat).unwrap().agree);
}

fn d_rat(ok: &OkRing) -> Matrix<OkElem> {
    Matrix::from_rows(vec![vec![ok.one(), ok.from_int(2)], vec![ok.from_int(2), ok.from_int(4)]])
}

#[test]
fn nabla_examples() {
    let ok = q3();
    let c = cs(&ok, 6, None);
    let lam = &c.lam;
    let one = PdSeries::constant(&ok, 1, 5, ok.one());
    assert!(nabla_pd(&c, &one).unwrap().is_zero());
    // ∇X = λ(1 + (ζ−1)πλα)^{-1}(1 − αX)
    let x = PdSeries::var(&ok, 1, 5, 0);
    let nx = nabla_pd(&c, &x).unwrap();
    let cyc = c.cyc();
    let k = cyc.ok_scale(&ok.mul(&ok.pi(), ok.alpha()), &cyc.sub(&cyc.zeta_pow(1), &cyc.one()));
    let denom = lam.add(&lam.one(), &lam.monomial(1, k));
    let c0 = nx.coeff_or(lam, &[0]);
    let c1 = nx.coeff_or(lam, &[1]);
    assert_eq!(lam.mul(&c0, &denom), lam.lambda());
    assert_eq!(lam.mul(&c1, &denom), lam.monomial(1, cyc.from_ok(&ok.neg(ok.alpha()))));
    assert_eq!(nx.len(), 2);
    let two_var = PdSeries::var(&ok, 2, 3, 0);
    assert!(matches!(nabla_pd(&c, &two_var), Err(Error::ShapeMismatch(_))));
}

#[test]
fn nabla_identities() {
    for ok in [q3(), ram3(), corpus::standard_rings(6)[3].clone()] {
        let c = cs(&ok, 6, None);
        let r = verify_nabla(&c, 6).unwrap();
        assert_eq!(r.leibniz_pairs, 28);
    }
}

#[test]
fn tau_minus_one_on_random_series() {
    let ok = ram3();
    let c = cs(&ok, 6, None);
    let mut rng = corpus::rng(3);
    let scale = {
        let cyc = c.cyc();
        cyc.ok_scale(&ok.pi(), &cyc.sub(&cyc.zeta_pow(1), &cyc.one()))
    };
    for _ in 0..5 {
        let mut f = PdSeries::zero(1, 6);
        for n in 0..=6 {
            if rng.gen_bool(0.7) {
                f.add_term(&ok, crate::pd_series::Mono::from_slice(&[n]), ok.random(&mut rng));
            }
        }
        let lhs = tau_pd(&c, &f).unwrap();
        let lifted = f.terms.iter().fold(PdSeries::zero(1, 6), |mut acc, (m, x)| {
            acc.add_term(&c.lam, *m, c.lam.constant(c.cyc().from_ok(x)));
            acc
        });
        let rhs = nabla_pd(&c, &f).unwrap().map(&c.lam, |x| x.iter().map(|y| c.cyc().mul(y, &scale)).collect());
        assert_eq!(lhs.sub(&c.lam, &lifted), rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cocycle_identity_random(seed in any::<u64>(), ring in 0usize..5, chi in prop::sample::select(vec![None, Some(2i64)])) {
        let ok = corpus::standard_rings(6)[ring].clone();
        let mut rng = corpus::rng(seed);
        let m = corpus::random_admissible_crystal(&ok, 2, &mut rng).unwrap();
        let c = cs(&ok, 6, chi);
        let a = rng.gen_range(-3i64..4);
        let b = rng.gen_range(-2i64..3);
        let g = GroupElem::new(a, b);
        let h = GroupElem::new(rng.gen_range(-3i64..4), rng.gen_range(-2i64..3));
        prop_assert!(verify_cocycle_identity(&c, &m, &[g, h]).is_ok());
    }

    #[test]
    fn sen_kernel_matches(seed in any::<u64>(), ring in 0usize..5) {
        let ok = corpus::standard_rings(6)[ring].clone();
        let mut rng = corpus::rng(seed);
        let m = corpus::random_admissible_crystal(&ok, 3, &mut rng).unwrap();
        let (theta, den) = sen_operator(&m).unwrap();
        // −Θ·unit(α)·π^{v(α)} recovers A
        let (unit, v) = ok.unit_part(ok.alpha()).unwrap();
        let k = ok.neg(&ok.mul(&unit, &ok.pow(&ok.pi(), (v - den) as u64)));
        prop_assert_eq!(theta.map(|x| ok.mul(x, &k)), m.matrix.clone());
        prop_assert!(etale_comparison_dims(&m).unwrap().agree);
    }
}
